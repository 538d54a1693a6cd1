//! Command implementations behind the `gadgetcheck` binary.
//!
//! Each command writes to caller-supplied streams and returns its exit status, so the
//! binary stays a thin argument parser and the commands are testable in-process.

use std::io::Write;
use std::path::Path;

use crate::circuit::{gadgetize, parse_circuit, resolve, serialize, AdaptiveCircuit};
use crate::config::CampaignConfig;
use crate::polysim::single_output_probability;
use crate::protocol::verify;
use crate::prover::SimulatedDevice;

/// Success, or an accepted verification.
pub const EXIT_OK: i32 = 0;
/// The verifier rejected.
pub const EXIT_REJECT: i32 = 1;
/// Bad arguments or unusable input.
pub const EXIT_USAGE: i32 = 2;

/// File names written by `verify` into the report directory.
pub const REPORT_JSON: &str = "verdict.json";
pub const REPORT_TEXT: &str = "verdict.txt";

fn load_circuit(path: &Path) -> Result<AdaptiveCircuit, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_circuit(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Replace every bare T by a gadget; circuits without T are returned unchanged.
fn ensure_gadgetized(c: AdaptiveCircuit) -> AdaptiveCircuit {
    if c.t_count() > 0 {
        gadgetize(&c)
    } else {
        c
    }
}

/// Parse `0101`-style outcome strings; `-` and the empty string mean no outcomes.
pub fn parse_outcomes(s: &str) -> Result<Vec<bool>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!("outcome string may only contain 0 and 1, found {other:?}")),
        })
        .collect()
}

pub fn cmd_gadgetize(
    in_path: &Path,
    out_path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let circuit = match load_circuit(in_path) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let gadgetized = gadgetize(&circuit);
    if let Err(e) = std::fs::write(out_path, serialize(&gadgetized)) {
        let _ = writeln!(err, "error: {}: {e}", out_path.display());
        return EXIT_USAGE;
    }
    let _ = writeln!(
        out,
        "t={} lines={} (was {}, +{} MAGIC)",
        gadgetized.gadget_count(),
        gadgetized.n_lines,
        circuit.n_lines,
        gadgetized.n_lines - circuit.n_lines
    );
    EXIT_OK
}

pub fn cmd_probability(
    circuit_path: &Path,
    outcomes: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = (|| {
        let circuit = ensure_gadgetized(load_circuit(circuit_path)?);
        let bits = parse_outcomes(outcomes)?;
        let seq = resolve(&circuit, &bits).map_err(|e| e.to_string())?;
        let p0 = single_output_probability(&seq, false).map_err(|e| e.to_string())?;
        let p1 = single_output_probability(&seq, true).map_err(|e| e.to_string())?;
        Ok::<_, String>((p0, p1))
    })();
    match result {
        Ok((p0, p1)) => {
            let _ = writeln!(out, "P(0)={p0:.12}");
            let _ = writeln!(out, "P(1)={p1:.12}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn cmd_verify(config_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let fail = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "error: {msg}");
        EXIT_USAGE
    };
    let cfg = match CampaignConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => return fail(err, format!("{}: {e}", config_path.display())),
    };
    if let Err(e) = cfg.fault.check() {
        return fail(err, e.to_string());
    }
    let circuit = match load_circuit(&cfg.circuit_path) {
        Ok(c) => ensure_gadgetized(c),
        Err(e) => return fail(err, e),
    };
    let device = SimulatedDevice::new(cfg.fault);
    let report = match verify(&device, &circuit, &cfg.verify_params()) {
        Ok(r) => r,
        Err(e) => return fail(err, e.to_string()),
    };

    let dir = cfg.resolve_output_dir(config_path.parent().unwrap_or(Path::new(".")));
    let summary = report.summary();
    let written = std::fs::create_dir_all(&dir)
        .and_then(|_| std::fs::write(dir.join(REPORT_JSON), report.to_json() + "\n"))
        .and_then(|_| std::fs::write(dir.join(REPORT_TEXT), &summary));
    if let Err(e) = written {
        return fail(err, format!("{}: {e}", dir.display()));
    }
    let _ = write!(out, "{summary}");
    let _ = writeln!(out, "report     {}", dir.join(REPORT_JSON).display());
    if report.accepted() {
        EXIT_OK
    } else {
        EXIT_REJECT
    }
}

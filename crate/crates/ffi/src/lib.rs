//! C ABI over the `gadgetcheck` verifier.
//!
//! Objects cross the boundary as opaque handles (`GcCircuit`, `GcReport`) that the caller
//! releases with the matching `*_free` function. Every fallible call returns a
//! [`GcStatus`]; on failure, [`gc_last_error`] describes the most recent error on the
//! calling thread. Strings returned through out-parameters are owned by the caller and
//! must be released with [`gc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gadgetcheck::circuit::{gadgetize, parse_circuit, resolve, serialize, AdaptiveCircuit};
use gadgetcheck::polysim::single_output_probability;
use gadgetcheck::protocol::{verify, VerdictReport, VerifyParams};
use gadgetcheck::prover::{FaultModel, SimulatedDevice};

/// Result code of every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Circuit text failed to parse or validate.
    Parse = 3,
    /// A numeric argument or fault specification was rejected.
    InvalidArgument = 4,
    /// Gadget outcomes do not match the circuit.
    Resolve = 5,
    /// The probability engine or the protocol could not run.
    Computation = 6,
    /// Rust code panicked; the handle arguments should be considered unusable.
    Panic = 7,
}

/// A parsed adaptive circuit.
pub struct GcCircuit(AdaptiveCircuit);

/// The outcome of a verification campaign.
pub struct GcReport(VerdictReport);

/// Campaign parameters. Obtain defaults from [`gc_verify_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcVerifyParams {
    pub seed: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub delta: f64,
    pub extra_check_lines: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (GcStatus, String)>) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (GcStatus, String)> {
    if p.is_null() {
        return Err((GcStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (GcStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, (GcStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (GcStatus::NullArgument, format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), (GcStatus, String)> {
    if p.is_null() {
        Err((GcStatus::NullArgument, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs removed")
        .into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the next call
/// into this library from the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate circuit text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_parse(text: *const c_char, out: *mut *mut GcCircuit) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        let text = str_arg(text, "text")?;
        let c = parse_circuit(text).map_err(|e| (GcStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(GcCircuit(c)));
        Ok(())
    })
}

/// Release a circuit handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_free(c: *mut GcCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of lines, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_line_count(c: *const GcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.n_lines)
}

/// Number of T-gadgets, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_gadget_count(c: *const GcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.gadget_count())
}

/// Number of bare T gates, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_t_count(c: *const GcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.t_count())
}

/// New circuit with every T replaced by a gadget on a fresh MAGIC line.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_gadgetize(c: *const GcCircuit, out: *mut *mut GcCircuit) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        let c = ref_arg(c, "circuit")?;
        *out = Box::into_raw(Box::new(GcCircuit(gadgetize(&c.0))));
        Ok(())
    })
}

/// Canonical text of the circuit. Free the result with [`gc_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_circuit_serialize(c: *const GcCircuit, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        let c = ref_arg(c, "circuit")?;
        *out = to_c_string(serialize(&c.0));
        Ok(())
    })
}

/// Probability that the output reads `outcome` (0 or 1) when gadget `i` is fixed to
/// `outcomes[i]`. Bare T gates are gadgetized first. `outcomes` may be null when
/// `n_outcomes` is 0.
///
/// # Safety
/// `c` must be a live handle, `outcomes` must point to `n_outcomes` bytes, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_output_probability(
    c: *const GcCircuit,
    outcomes: *const u8,
    n_outcomes: usize,
    outcome: u8,
    out: *mut f64,
) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        let c = ref_arg(c, "circuit")?;
        if outcome > 1 {
            return Err((GcStatus::InvalidArgument, format!("outcome must be 0 or 1, got {outcome}")));
        }
        let bits: Vec<bool> = if n_outcomes == 0 {
            Vec::new()
        } else if outcomes.is_null() {
            return Err((GcStatus::NullArgument, "outcomes is null".into()));
        } else {
            let raw = std::slice::from_raw_parts(outcomes, n_outcomes);
            if let Some(b) = raw.iter().find(|&&b| b > 1) {
                return Err((GcStatus::InvalidArgument, format!("gadget outcome {b} is not 0 or 1")));
            }
            raw.iter().map(|&b| b == 1).collect()
        };
        let circuit = if c.0.t_count() > 0 { gadgetize(&c.0) } else { c.0.clone() };
        let seq = resolve(&circuit, &bits).map_err(|e| (GcStatus::Resolve, e.to_string()))?;
        *out = single_output_probability(&seq, outcome == 1)
            .map_err(|e| (GcStatus::Computation, e.to_string()))?;
        Ok(())
    })
}

/// Default campaign parameters.
#[no_mangle]
pub extern "C" fn gc_verify_params_default() -> GcVerifyParams {
    let d = VerifyParams::default();
    GcVerifyParams {
        seed: d.seed,
        epsilon: d.epsilon,
        eta: d.eta,
        delta: d.delta,
        extra_check_lines: d.extra_check_lines,
    }
}

/// Run a full verification campaign against the built-in simulated device.
///
/// `fault` is a fault specification such as `"gadget_coin_bias 0.1"`; null means an ideal
/// device. Bare T gates are gadgetized first. A rejected run still returns `GC_STATUS_OK`;
/// inspect the report with [`gc_report_accepted`].
///
/// # Safety
/// `c` must be a live handle, `params` readable, `fault` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_verify(
    c: *const GcCircuit,
    params: *const GcVerifyParams,
    fault: *const c_char,
    out: *mut *mut GcReport,
) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        let c = ref_arg(c, "circuit")?;
        let p = *ref_arg(params, "params")?;
        let fault: FaultModel = if fault.is_null() {
            FaultModel::Ideal
        } else {
            str_arg(fault, "fault")?
                .parse()
                .map_err(|e: gadgetcheck::prover::FaultSpecError| (GcStatus::InvalidArgument, e.to_string()))?
        };
        fault
            .check()
            .map_err(|e| (GcStatus::InvalidArgument, e.to_string()))?;
        let params = VerifyParams {
            seed: p.seed,
            epsilon: p.epsilon,
            eta: p.eta,
            delta: p.delta,
            extra_check_lines: p.extra_check_lines,
            ..VerifyParams::default()
        };
        let circuit = if c.0.t_count() > 0 { gadgetize(&c.0) } else { c.0.clone() };
        let report = verify(&SimulatedDevice::new(fault), &circuit, &params).map_err(|e| {
            let status = match e {
                gadgetcheck::protocol::ProtocolError::Parameter(_) => GcStatus::InvalidArgument,
                _ => GcStatus::Computation,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(GcReport(report)));
        Ok(())
    })
}

/// 1 if the report accepts, 0 if it rejects or the handle is null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_report_accepted(r: *const GcReport) -> c_int {
    r.as_ref().map_or(0, |r| c_int::from(r.0.accepted()))
}

/// Certified additive error of an accepted report, or NaN.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_report_epsilon_prime(r: *const GcReport) -> f64 {
    r.as_ref().and_then(|r| r.0.epsilon_prime).unwrap_or(f64::NAN)
}

/// JSON serialization of the report. Free the result with [`gc_string_free`].
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_report_json(r: *const GcReport, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = to_c_string(ref_arg(r, "report")?.0.to_json());
        Ok(())
    })
}

/// Human-readable summary of the report. Free the result with [`gc_string_free`].
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_report_summary(r: *const GcReport, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = to_c_string(ref_arg(r, "report")?.0.summary());
        Ok(())
    })
}

/// Release a report handle. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gc_report_free(r: *mut GcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{AdaptiveCircuit, Clifford, FixedOp, FixedSequence, Instruction, Line, OUTPUT_LABEL};
use crate::pauli::Pauli;

use super::{FaultModel, ProverError, StateVector, Transcript};

/// Default statevector size limit.
pub const DEFAULT_MAX_LINES: usize = 20;

/// Amplitudes the branch cache may hold before it stops memoising.
const CACHE_AMPLITUDE_BUDGET: usize = 1 << 22;

/// Seed of one repetition: a master seed plus a counter-based stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunSeed {
    pub seed: u64,
    pub stream: u64,
}

impl From<u64> for RunSeed {
    fn from(seed: u64) -> Self {
        RunSeed { seed, stream: 0 }
    }
}

impl RunSeed {
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Classical result of one non-adaptive run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedRun {
    /// One bit per measurement op, in sequence order.
    pub measurements: Vec<bool>,
    pub final_output: bool,
}

/// The quantum device as the verifier sees it: circuits go in, bits come out.
pub trait Device {
    /// Execute `circuit` adaptively and record the branch taken.
    fn run_adaptive(&self, circuit: &AdaptiveCircuit, seed: u64) -> Result<Transcript, ProverError>;

    /// Execute `seq` as written; gadget corrections stay frozen whatever the fresh readouts are.
    fn run_fixed(&self, seq: &FixedSequence, seed: RunSeed) -> Result<FixedRun, ProverError>;

    /// Run repetitions `0..reps` on streams `RunSeed { seed, stream: r }`, passing each result
    /// to `sink`. Stops early when `sink` breaks. Returns the number of completed repetitions.
    fn run_fixed_batch(
        &self,
        seq: &FixedSequence,
        seed: u64,
        reps: u64,
        sink: &mut dyn FnMut(u64, &[bool]) -> ControlFlow<()>,
    ) -> Result<u64, ProverError> {
        for r in 0..reps {
            let run = self.run_fixed(seq, RunSeed { seed, stream: r })?;
            if sink(r, &run.measurements).is_break() {
                return Ok(r + 1);
            }
        }
        Ok(reps)
    }
}

/// In-process statevector device with an optional fault model.
#[derive(Debug, Clone)]
pub struct SimulatedDevice {
    pub fault: FaultModel,
    pub max_lines: usize,
}

impl Default for SimulatedDevice {
    fn default() -> Self {
        SimulatedDevice::new(FaultModel::Ideal)
    }
}

#[derive(Clone, Copy)]
enum Readout {
    Born,
    Gadget,
    Output,
}

impl SimulatedDevice {
    pub fn new(fault: FaultModel) -> Self {
        SimulatedDevice {
            fault,
            max_lines: DEFAULT_MAX_LINES,
        }
    }

    pub fn with_max_lines(mut self, max_lines: usize) -> Self {
        self.max_lines = max_lines;
        self
    }

    fn initial_state(&self, inputs: &[crate::circuit::InputState]) -> Result<StateVector, ProverError> {
        self.fault.check()?;
        StateVector::product(inputs, self.fault.magic_offset(), self.max_lines)
    }

    fn apply_noisy(&self, state: &mut StateVector, g: &Clifford, rng: &mut ChaCha8Rng) {
        state.apply(g);
        if let FaultModel::Depolarizing { p_err } = self.fault {
            if rng.random::<f64>() < p_err {
                let lines = g.lines();
                if lines.len() == 1 {
                    let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
                    state.apply_pauli(lines[0], p);
                } else {
                    const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
                    let k = rng.random_range(1..16usize);
                    state.apply_pauli(lines[0], PAULIS[k % 4]);
                    state.apply_pauli(lines[1], PAULIS[k / 4]);
                }
            }
        }
    }

    /// Draw a readout from a pre-computed `p_one`. Consumes exactly one uniform, plus one
    /// more for a lying output.
    fn readout(&self, p_one: f64, kind: Readout, rng: &mut ChaCha8Rng, line: Line) -> Result<(bool, bool), ProverError> {
        let u: f64 = rng.random();
        let physical = match (kind, self.fault) {
            (Readout::Gadget, FaultModel::GadgetCoinBias { bias }) => {
                let b = u < 0.5 + bias;
                let p = if b { p_one } else { 1.0 - p_one };
                if p < 1e-12 {
                    return Err(ProverError::ImpossibleOutcome { line, outcome: b });
                }
                b
            }
            _ => u < p_one,
        };
        let reported = match (kind, self.fault) {
            (Readout::Output, FaultModel::Liar { q }) => rng.random::<f64>() >= q,
            _ => physical,
        };
        Ok((physical, reported))
    }

    fn readout_kind(op: &FixedOp) -> Readout {
        match op {
            FixedOp::GadgetMeasure { .. } => Readout::Gadget,
            FixedOp::Measure { label, .. } if label == OUTPUT_LABEL => Readout::Output,
            _ => Readout::Born,
        }
    }

    /// Apply unitaries from `from` up to the next measurement; returns its position
    /// (or `ops.len()`).
    fn advance(
        &self,
        seq: &FixedSequence,
        state: &mut StateVector,
        from: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        for (pos, op) in seq.ops.iter().enumerate().skip(from) {
            if op.measured_line().is_some() {
                return pos;
            }
            if let Some(g) = op.unitary() {
                self.apply_noisy(state, &g, rng);
            }
        }
        seq.ops.len()
    }

    fn check_fixed(&self, seq: &FixedSequence) -> Result<(), ProverError> {
        for op in &seq.ops {
            for l in op.lines() {
                if l >= seq.n_lines {
                    return Err(ProverError::LineOutOfRange(l));
                }
            }
        }
        Ok(())
    }
}

impl Device for SimulatedDevice {
    fn run_adaptive(&self, circuit: &AdaptiveCircuit, seed: u64) -> Result<Transcript, ProverError> {
        let mut state = self.initial_state(&circuit.inputs)?;
        let mut rng = RunSeed::from(seed).rng();
        let mut gadget_outcomes = Vec::new();
        let mut final_output = None;
        let last = circuit.instructions.len().saturating_sub(1);
        for (idx, ins) in circuit.instructions.iter().enumerate() {
            match ins {
                Instruction::Gate(g) => self.apply_noisy(&mut state, g, &mut rng),
                Instruction::T(_) => return Err(ProverError::NonClifford(idx)),
                Instruction::TGadget { target, ancilla } => {
                    self.apply_noisy(&mut state, &Clifford::Cx(*target, *ancilla), &mut rng);
                    let p = state.prob_one(*ancilla);
                    let (m, _) = self.readout(p, Readout::Gadget, &mut rng, *ancilla)?;
                    state.collapse(*ancilla, m);
                    if m {
                        self.apply_noisy(&mut state, &Clifford::S(*target), &mut rng);
                    }
                    gadget_outcomes.push(m);
                }
                Instruction::Measure { line, label } => {
                    let kind = if label == OUTPUT_LABEL {
                        Readout::Output
                    } else {
                        Readout::Born
                    };
                    let p = state.prob_one(*line);
                    let (physical, reported) = self.readout(p, kind, &mut rng, *line)?;
                    state.collapse(*line, physical);
                    if idx == last {
                        final_output = Some(reported);
                    }
                }
            }
        }
        let final_output = final_output.ok_or(ProverError::NoOutput)?;
        Transcript::new(circuit, seed, gadget_outcomes, final_output)
    }

    fn run_fixed(&self, seq: &FixedSequence, seed: RunSeed) -> Result<FixedRun, ProverError> {
        self.check_fixed(seq)?;
        let mut state = self.initial_state(&seq.inputs)?;
        let mut rng = seed.rng();
        let mut measurements = Vec::new();
        let mut pos = self.advance(seq, &mut state, 0, &mut rng);
        while pos < seq.ops.len() {
            let op = &seq.ops[pos];
            let line = op.measured_line().expect("advance stops at measurements");
            let p = state.prob_one(line);
            let (physical, reported) = self.readout(p, Self::readout_kind(op), &mut rng, line)?;
            state.collapse(line, physical);
            measurements.push(reported);
            pos = self.advance(seq, &mut state, pos + 1, &mut rng);
        }
        let final_output = *measurements.last().ok_or(ProverError::NoOutput)?;
        Ok(FixedRun {
            measurements,
            final_output,
        })
    }

    fn run_fixed_batch(
        &self,
        seq: &FixedSequence,
        seed: u64,
        reps: u64,
        sink: &mut dyn FnMut(u64, &[bool]) -> ControlFlow<()>,
    ) -> Result<u64, ProverError> {
        if self.fault.is_noisy_between_measurements() {
            for r in 0..reps {
                let run = self.run_fixed(seq, RunSeed { seed, stream: r })?;
                if sink(r, &run.measurements).is_break() {
                    return Ok(r + 1);
                }
            }
            return Ok(reps);
        }
        self.check_fixed(seq)?;
        let mut tree = BranchCache::new(self, seq)?;
        let mut outs = Vec::new();
        let mut rng = RunSeed { seed, stream: 0 }.rng();
        for r in 0..reps {
            rng = reseed(rng, seed, r);
            outs.clear();
            tree.walk(self, &mut rng, &mut outs)?;
            if outs.is_empty() {
                return Err(ProverError::NoOutput);
            }
            if sink(r, &outs).is_break() {
                return Ok(r + 1);
            }
        }
        Ok(reps)
    }
}

fn reseed(mut rng: ChaCha8Rng, seed: u64, stream: u64) -> ChaCha8Rng {
    if stream == 0 {
        return RunSeed { seed, stream }.rng();
    }
    rng.set_stream(stream);
    rng.set_word_pos(0);
    rng
}

struct Node {
    pos: usize,
    p_one: f64,
    state: StateVector,
    children: [Option<usize>; 2],
}

/// Memoised measurement tree of a sequence whose gates are deterministic. Each node holds the
/// state just before a measurement; walking it consumes the same random draws as
/// [`SimulatedDevice::run_fixed`], so results are identical run for run.
struct BranchCache<'a> {
    seq: &'a FixedSequence,
    nodes: Vec<Node>,
    cached_amplitudes: usize,
}

impl<'a> BranchCache<'a> {
    fn new(dev: &SimulatedDevice, seq: &'a FixedSequence) -> Result<Self, ProverError> {
        let mut state = dev.initial_state(&seq.inputs)?;
        // Gates are deterministic here, so the rng passed to `advance` is never drawn from.
        let mut unused = RunSeed::from(0).rng();
        let pos = dev.advance(seq, &mut state, 0, &mut unused);
        let mut cache = BranchCache {
            seq,
            nodes: Vec::new(),
            cached_amplitudes: 0,
        };
        cache.push(pos, state);
        Ok(cache)
    }

    fn push(&mut self, pos: usize, state: StateVector) -> usize {
        let p_one = match self.seq.ops.get(pos).and_then(FixedOp::measured_line) {
            Some(l) => state.prob_one(l),
            None => 0.0,
        };
        self.cached_amplitudes += state.amplitudes().len();
        self.nodes.push(Node {
            pos,
            p_one,
            state,
            children: [None, None],
        });
        self.nodes.len() - 1
    }

    fn walk(
        &mut self,
        dev: &SimulatedDevice,
        rng: &mut ChaCha8Rng,
        outs: &mut Vec<bool>,
    ) -> Result<(), ProverError> {
        let len = self.seq.ops.len();
        let mut node = 0;
        loop {
            let (pos, p_one) = (self.nodes[node].pos, self.nodes[node].p_one);
            if pos >= len {
                return Ok(());
            }
            let op = &self.seq.ops[pos];
            let line = op.measured_line().expect("nodes sit at measurements");
            let (physical, reported) = dev.readout(p_one, SimulatedDevice::readout_kind(op), rng, line)?;
            outs.push(reported);
            let slot = usize::from(physical);
            if let Some(child) = self.nodes[node].children[slot] {
                node = child;
                continue;
            }
            let mut state = self.nodes[node].state.clone();
            state.collapse(line, physical);
            let mut unused = RunSeed::from(0).rng();
            let next = dev.advance(self.seq, &mut state, pos + 1, &mut unused);
            if self.cached_amplitudes + state.amplitudes().len() > CACHE_AMPLITUDE_BUDGET {
                // Out of budget: finish this run without memoising.
                return self.finish_uncached(dev, state, next, rng, outs);
            }
            let child = self.push(next, state);
            self.nodes[node].children[slot] = Some(child);
            node = child;
        }
    }

    fn finish_uncached(
        &self,
        dev: &SimulatedDevice,
        mut state: StateVector,
        mut pos: usize,
        rng: &mut ChaCha8Rng,
        outs: &mut Vec<bool>,
    ) -> Result<(), ProverError> {
        let mut unused = RunSeed::from(0).rng();
        while pos < self.seq.ops.len() {
            let op = &self.seq.ops[pos];
            let line = op.measured_line().expect("advance stops at measurements");
            let p = state.prob_one(line);
            let (physical, reported) = dev.readout(p, SimulatedDevice::readout_kind(op), rng, line)?;
            state.collapse(line, physical);
            outs.push(reported);
            pos = dev.advance(self.seq, &mut state, pos + 1, &mut unused);
        }
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use crate::polysim::DEFAULT_K_MAX;

use super::ProtocolError;

/// Default number of extra lines read out at each gadget stage.
pub const DEFAULT_EXTRA_CHECK_LINES: usize = 2;

/// Tolerances and repetition counts for one verification campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestPlan {
    /// Number of T-gadgets.
    pub t: usize,
    /// Relative tolerance on the probability of the recorded gadget branch.
    pub epsilon: f64,
    /// Additive tolerance of the gate test.
    pub eta: f64,
    /// Failure probability allowed to each estimation batch.
    pub delta: f64,
    /// Allowed deviation of each gadget readout probability from 1/2; zero when `t == 0`.
    pub d_gadget: f64,
    pub r_gate: u64,
    pub r_meas: u64,
    pub extra_check_lines: usize,
    pub k_max: usize,
}

/// Hoeffding: repetitions so that a frequency is within `tolerance` of its mean with
/// probability at least `1 - delta`.
pub fn hoeffding_repetitions(tolerance: f64, delta: f64) -> u64 {
    ((2.0 / delta).ln() / (2.0 * tolerance * tolerance)).ceil() as u64
}

/// Hoeffding confidence half-width after `reps` samples at failure probability `delta`.
pub fn hoeffding_half_width(reps: u64, delta: f64) -> f64 {
    if reps == 0 {
        return f64::INFINITY;
    }
    ((2.0 / delta).ln() / (2.0 * reps as f64)).sqrt()
}

/// Per-gadget tolerance `d` with `(1/2 + d)^t = (1 + epsilon) / 2^t`.
pub fn gadget_tolerance(t: usize, epsilon: f64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    (epsilon.ln_1p() / t as f64).exp_m1() / 2.0
}

/// Build the test plan for `t` gadgets.
pub fn plan(t: usize, epsilon: f64, eta: f64, delta: f64) -> Result<TestPlan, ProtocolError> {
    for (name, v) in [("epsilon", epsilon), ("eta", eta), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(ProtocolError::Parameter(format!("{name} = {v} is outside (0, 1)")));
        }
    }
    let d_gadget = gadget_tolerance(t, epsilon);
    let r_meas = if t == 0 {
        0
    } else {
        hoeffding_repetitions(d_gadget / 2.0, delta)
    };
    Ok(TestPlan {
        t,
        epsilon,
        eta,
        delta,
        d_gadget,
        r_gate: hoeffding_repetitions(eta, delta),
        r_meas,
        extra_check_lines: DEFAULT_EXTRA_CHECK_LINES,
        k_max: DEFAULT_K_MAX,
    })
}

impl TestPlan {
    pub fn with_extra_check_lines(mut self, k: usize) -> Self {
        self.extra_check_lines = k;
        self
    }

    /// Acceptance band for a gadget readout frequency around 1/2. The estimate is accurate to
    /// `d_gadget / 2`, so a frequency inside this band certifies `|p - 1/2| <= d_gadget`.
    pub fn gadget_band(&self) -> f64 {
        self.d_gadget / 2.0
    }

    /// Union-bound failure probability over the gate batch and the `t` gadget batches.
    pub fn delta_total(&self) -> f64 {
        self.delta * (self.t + 1) as f64
    }

    /// `[(1/2 - d)^t, (1/2 + d)^t]`.
    pub fn pi_bound(&self) -> [f64; 2] {
        let t = self.t as i32;
        [(0.5 - self.d_gadget).powi(t), (0.5 + self.d_gadget).powi(t)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_gadgets_means_no_measurement_tests() {
        let p = plan(0, 0.1, 0.05, 0.01).unwrap();
        assert_eq!(p.r_meas, 0);
        assert_eq!(p.d_gadget, 0.0);
        assert_eq!(p.pi_bound(), [1.0, 1.0]);
    }

    #[test]
    fn gadget_tolerance_three_gadgets() {
        // (1.05^(1/3) - 1) / 2, evaluated independently of the implementation's log1p/expm1 route.
        let expected = (1.05f64.powf(1.0 / 3.0) - 1.0) / 2.0;
        let d = plan(3, 0.05, 0.05, 0.01).unwrap().d_gadget;
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.0081982).abs() < 5e-8);
    }

    #[test]
    fn gate_repetitions() {
        assert_eq!(plan(1, 0.05, 0.05, 0.01).unwrap().r_gate, 1060);
    }

    #[test]
    fn identity_at_t_ten() {
        let p = plan(10, 0.05, 0.05, 0.01).unwrap();
        assert!(((0.5 + p.d_gadget).powi(10) * 1024.0 - 1.05).abs() < 1e-12);
    }

    #[test]
    fn parameter_ranges() {
        assert!(plan(1, 0.0, 0.1, 0.1).is_err());
        assert!(plan(1, 0.1, 1.0, 0.1).is_err());
        assert!(plan(1, 0.1, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn half_width_shrinks_with_repetitions() {
        let a = hoeffding_half_width(100, 0.01);
        let b = hoeffding_half_width(400, 0.01);
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!(hoeffding_half_width(hoeffding_repetitions(0.03, 0.01), 0.01) <= 0.03);
    }
}

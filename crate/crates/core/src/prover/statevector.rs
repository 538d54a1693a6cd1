use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::circuit::{Clifford, InputState, Line};
use crate::pauli::Pauli;

use super::ProverError;

/// Dense `2^n` amplitude vector. Line `i` is bit `i` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

/// Amplitudes `(a0, a1)` of a single-line input. `magic_offset` shifts the phase of `MAGIC`.
pub fn input_amplitudes(s: &InputState, magic_offset: f64) -> (Complex64, Complex64) {
    match *s {
        InputState::Zero => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        InputState::One => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        InputState::Magic => (
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4 + magic_offset),
        ),
        InputState::General { theta, phi } => (
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ),
    }
}

impl StateVector {
    /// Product state of `inputs`, `MAGIC` phases shifted by `magic_offset` radians.
    pub fn product(
        inputs: &[InputState],
        magic_offset: f64,
        max_lines: usize,
    ) -> Result<Self, ProverError> {
        let n = inputs.len();
        if n > max_lines {
            return Err(ProverError::TooManyLines { n, max: max_lines });
        }
        let mut amps = Vec::with_capacity(1 << n);
        amps.push(Complex64::new(1.0, 0.0));
        for s in inputs {
            let (a0, a1) = input_amplitudes(s, magic_offset);
            let len = amps.len();
            amps.resize(2 * len, Complex64::new(0.0, 0.0));
            for i in 0..len {
                let v = amps[i];
                amps[i] = v * a0;
                amps[i + len] = v * a1;
            }
        }
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two(), "amplitude count must be a power of two");
        StateVector {
            n: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn pairs(&mut self, line: Line, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let bit = 1usize << line;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + bit {
                let (lo, hi) = self.amps.split_at_mut(i + bit);
                f(&mut lo[i], &mut hi[0]);
            }
            base += 2 * bit;
        }
    }

    pub fn apply(&mut self, g: &Clifford) {
        let i = Complex64::new(0.0, 1.0);
        match *g {
            Clifford::H(a) => self.pairs(a, |x, y| {
                let (u, v) = (*x, *y);
                *x = (u + v) * FRAC_1_SQRT_2;
                *y = (u - v) * FRAC_1_SQRT_2;
            }),
            Clifford::S(a) => self.pairs(a, |_, y| *y *= i),
            Clifford::Sdg(a) => self.pairs(a, |_, y| *y *= -i),
            Clifford::X(a) => self.pairs(a, std::mem::swap),
            Clifford::Y(a) => self.pairs(a, |x, y| {
                let (u, v) = (*x, *y);
                *x = -i * v;
                *y = i * u;
            }),
            Clifford::Z(a) => self.pairs(a, |_, y| *y = -*y),
            Clifford::Cx(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for idx in 0..self.amps.len() {
                    if idx & cb != 0 && idx & tb == 0 {
                        self.amps.swap(idx, idx | tb);
                    }
                }
            }
            Clifford::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                for (idx, v) in self.amps.iter_mut().enumerate() {
                    if idx & mask == mask {
                        *v = -*v;
                    }
                }
            }
            Clifford::Swap(a, b) => {
                let (ab, bb) = (1usize << a, 1usize << b);
                for idx in 0..self.amps.len() {
                    if idx & ab != 0 && idx & bb == 0 {
                        self.amps.swap(idx, idx ^ ab ^ bb);
                    }
                }
            }
        }
    }

    /// `diag(1, e^{i angle})` on `line`.
    pub fn apply_phase(&mut self, line: Line, angle: f64) {
        let w = Complex64::from_polar(1.0, angle);
        self.pairs(line, |_, y| *y *= w);
    }

    /// The T gate `diag(1, e^{iπ/4})`.
    pub fn apply_t(&mut self, line: Line) {
        self.apply_phase(line, FRAC_PI_4);
    }

    pub fn apply_pauli(&mut self, line: Line, p: Pauli) {
        match p {
            Pauli::I => {}
            Pauli::X => self.apply(&Clifford::X(line)),
            Pauli::Y => self.apply(&Clifford::Y(line)),
            Pauli::Z => self.apply(&Clifford::Z(line)),
        }
    }

    /// Born probability of reading 1 on `line`.
    pub fn prob_one(&self, line: Line) -> f64 {
        let bit = 1usize << line;
        self.amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & bit != 0)
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }

    /// Project `line` onto `outcome` and renormalise. Returns the probability of the outcome.
    pub fn collapse(&mut self, line: Line, outcome: bool) -> f64 {
        let bit = 1usize << line;
        let keep = if outcome { bit } else { 0 };
        let mut p = 0.0;
        for (idx, v) in self.amps.iter_mut().enumerate() {
            if idx & bit == keep {
                p += v.norm_sqr();
            } else {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            for v in &mut self.amps {
                *v *= s;
            }
        }
        p
    }

    /// Drop a line that is in a definite basis state, keeping the amplitudes where it reads
    /// `value`. The result is renormalised.
    pub fn without_line(&self, line: Line, value: bool) -> StateVector {
        let bit = 1usize << line;
        let low = bit - 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len() / 2];
        for (j, out) in amps.iter_mut().enumerate() {
            let idx = (j & low) | ((j & !low) << 1) | if value { bit } else { 0 };
            *out = self.amps[idx];
        }
        let mut s = StateVector {
            n: self.n - 1,
            amps,
        };
        let norm = s.norm_sqr().sqrt();
        if norm > 0.0 {
            for v in &mut s.amps {
                *v /= norm;
            }
        }
        s
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn all_zero_product() {
        let s = StateVector::product(&[InputState::Zero; 3], 0.0, 20).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn magic_amplitudes() {
        let s = StateVector::product(&[InputState::Magic], 0.0, 20).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4)));
        let s = StateVector::product(&[InputState::Magic], 0.3, 20).unwrap();
        assert!(close(
            s.amplitudes()[1],
            Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4 + 0.3)
        ));
    }

    #[test]
    fn magic_equals_general_form() {
        let a = StateVector::product(&[InputState::Magic], 0.0, 20).unwrap();
        let b = StateVector::product(
            &[InputState::General {
                theta: std::f64::consts::FRAC_PI_2,
                phi: FRAC_PI_4,
            }],
            0.0,
            20,
        )
        .unwrap();
        assert!(close(a.amplitudes()[0], b.amplitudes()[0]));
        assert!(close(a.amplitudes()[1], b.amplitudes()[1]));
    }

    #[test]
    fn line_limit() {
        assert!(matches!(
            StateVector::product(&[InputState::Zero; 4], 0.0, 3),
            Err(ProverError::TooManyLines { n: 4, max: 3 })
        ));
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::product(&[InputState::Zero], 0.0, 20).unwrap();
        s.apply(&Clifford::H(0));
        assert!(close(s.amplitudes()[0], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn s_squared_is_z() {
        let mut a = StateVector::product(&[InputState::Zero], 0.0, 20).unwrap();
        a.apply(&Clifford::H(0));
        let mut b = a.clone();
        a.apply(&Clifford::S(0));
        a.apply(&Clifford::S(0));
        b.apply(&Clifford::Z(0));
        assert!(close(a.amplitudes()[1], b.amplitudes()[1]));
    }

    #[test]
    fn measuring_one_is_certain() {
        let mut s = StateVector::product(&[InputState::One, InputState::Zero], 0.0, 20).unwrap();
        assert_eq!(s.prob_one(0), 1.0);
        assert_eq!(s.collapse(0, true), 1.0);
        assert_eq!(s.prob_one(1), 0.0);
    }

    #[test]
    fn without_line_extracts_factor() {
        let s = StateVector::product(
            &[InputState::General { theta: 1.0, phi: 0.5 }, InputState::One, InputState::Magic],
            0.0,
            20,
        )
        .unwrap();
        let r = s.without_line(1, true);
        let expected = StateVector::product(
            &[InputState::General { theta: 1.0, phi: 0.5 }, InputState::Magic],
            0.0,
            20,
        )
        .unwrap();
        assert!((r.fidelity(&expected) - 1.0).abs() < 1e-14);
    }
}

//! Signed Pauli operators and their conjugation by Clifford gates.
//!
//! A [`PauliOperator`] is `±P_0 ⊗ … ⊗ P_{n-1}` stored as packed `x`/`z` bit vectors, with
//! `(x, z) = (1, 1)` denoting `Y` itself so every operator is Hermitian.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::circuit::{Clifford, Line};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PauliError {
    #[error("operator sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("gate acts on line {line} but the operator has {n} lines")]
    LineOutOfRange { line: Line, n: usize },
}

/// One of `+1, -1, +i, -i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    /// The phase `i^k`.
    pub fn from_power(k: i32) -> Self {
        match k.rem_euclid(4) {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power(self) -> i32 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

impl Mul for Phase {
    type Output = Phase;

    // Phases compose by adding exponents of i.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::PlusOne => "+1",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-1",
            Phase::MinusI => "-i",
        })
    }
}

/// Single-line Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            negative: false,
        }
    }

    /// `+P` on `line`, identity elsewhere.
    pub fn single(n: usize, line: Line, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(line, p);
        op
    }

    pub fn z(n: usize, line: Line) -> Self {
        Self::single(n, line, Pauli::Z)
    }

    /// Build from factors, e.g. `from_factors(&[Pauli::Z, Pauli::I, Pauli::X], false)`.
    pub fn from_factors(factors: &[Pauli], negative: bool) -> Self {
        let mut op = Self::identity(factors.len());
        for (i, &p) in factors.iter().enumerate() {
            op.set(i, p);
        }
        op.negative = negative;
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    fn xb(&self, i: Line) -> bool {
        self.x[i / 64] >> (i % 64) & 1 == 1
    }

    fn zb(&self, i: Line) -> bool {
        self.z[i / 64] >> (i % 64) & 1 == 1
    }

    fn put(&mut self, i: Line, x: bool, z: bool) {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        if x {
            self.x[w] |= b;
        } else {
            self.x[w] &= !b;
        }
        if z {
            self.z[w] |= b;
        } else {
            self.z[w] &= !b;
        }
    }

    pub fn get(&self, i: Line) -> Pauli {
        Pauli::from_bits(self.xb(i), self.zb(i))
    }

    pub fn set(&mut self, i: Line, p: Pauli) {
        let (x, z) = p.bits();
        self.put(i, x, z);
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    /// Lines carrying a non-identity factor.
    pub fn support(&self) -> Vec<Line> {
        (0..self.n).filter(|&i| self.get(i) != Pauli::I).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        let mut parity = 0u32;
        for k in 0..self.x.len() {
            parity ^= ((self.x[k] & other.z[k]) ^ (self.z[k] & other.x[k])).count_ones() & 1;
        }
        parity == 0
    }

    fn check(&self, line: Line) -> Result<(), PauliError> {
        if line >= self.n {
            return Err(PauliError::LineOutOfRange { line, n: self.n });
        }
        Ok(())
    }

    /// In-place `P ← g P g†`.
    pub fn conjugate_in_place(&mut self, g: &Clifford) -> Result<(), PauliError> {
        for l in g.lines() {
            self.check(l)?;
        }
        match *g {
            Clifford::H(a) => {
                let (x, z) = (self.xb(a), self.zb(a));
                self.negative ^= x & z;
                self.put(a, z, x);
            }
            Clifford::S(a) => {
                let (x, z) = (self.xb(a), self.zb(a));
                self.negative ^= x & z;
                self.put(a, x, z ^ x);
            }
            Clifford::Sdg(a) => {
                let (x, z) = (self.xb(a), self.zb(a));
                self.negative ^= x & !z;
                self.put(a, x, z ^ x);
            }
            Clifford::X(a) => self.negative ^= self.zb(a),
            Clifford::Z(a) => self.negative ^= self.xb(a),
            Clifford::Y(a) => self.negative ^= self.xb(a) ^ self.zb(a),
            Clifford::Cx(c, t) => {
                let (xc, zc, xt, zt) = (self.xb(c), self.zb(c), self.xb(t), self.zb(t));
                self.negative ^= xc & zt & !(xt ^ zc);
                self.put(t, xt ^ xc, zt);
                self.put(c, xc, zc ^ zt);
            }
            Clifford::Cz(a, b) => {
                let (xa, za, xb, zb) = (self.xb(a), self.zb(a), self.xb(b), self.zb(b));
                self.negative ^= xa & xb & (za ^ zb);
                self.put(a, xa, za ^ xb);
                self.put(b, xb, zb ^ xa);
            }
            Clifford::Swap(a, b) => {
                let (xa, za, xb, zb) = (self.xb(a), self.zb(a), self.xb(b), self.zb(b));
                self.put(a, xb, zb);
                self.put(b, xa, za);
            }
        }
        Ok(())
    }

    /// In-place `P ← g† P g`, the Heisenberg-picture update used when propagating
    /// an observable backwards through `g`.
    pub fn conjugate_adjoint_in_place(&mut self, g: &Clifford) -> Result<(), PauliError> {
        self.conjugate_in_place(&g.adjoint())
    }
}

/// `g p g†`, the image of `p` under the Clifford `g`.
pub fn conjugate(p: &PauliOperator, g: &Clifford) -> Result<PauliOperator, PauliError> {
    let mut out = p.clone();
    out.conjugate_in_place(g)?;
    Ok(out)
}

/// `g† p g`.
pub fn conjugate_adjoint(p: &PauliOperator, g: &Clifford) -> Result<PauliOperator, PauliError> {
    let mut out = p.clone();
    out.conjugate_adjoint_in_place(g)?;
    Ok(out)
}

/// Exponent `k` in `P1 P2 = i^k P3` for single-line factors given as `(x, z)` bits.
fn product_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (i32::from(x2), i32::from(z2));
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// `p q = phase · r` with `r` carrying a `+` sign.
pub fn multiply(
    p: &PauliOperator,
    q: &PauliOperator,
) -> Result<(Phase, PauliOperator), PauliError> {
    if p.n != q.n {
        return Err(PauliError::SizeMismatch(p.n, q.n));
    }
    let mut k = 2 * i32::from(p.negative ^ q.negative);
    let mut r = PauliOperator::identity(p.n);
    for i in 0..p.n {
        let (x1, z1, x2, z2) = (p.xb(i), p.zb(i), q.xb(i), q.zb(i));
        k += product_exponent(x1, z1, x2, z2);
        r.put(i, x1 ^ x2, z1 ^ z2);
    }
    Ok((Phase::from_power(k), r))
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for p in self.factors() {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pauli::{I, X, Y, Z};

    #[test]
    fn hadamard_maps_z_to_x() {
        let p = conjugate(&PauliOperator::z(1, 0), &Clifford::H(0)).unwrap();
        assert_eq!(p, PauliOperator::single(1, 0, X));
    }

    #[test]
    fn cx_spreads_target_z() {
        let p = conjugate(&PauliOperator::z(2, 1), &Clifford::Cx(0, 1)).unwrap();
        assert_eq!(p, PauliOperator::from_factors(&[Z, Z], false));
    }

    #[test]
    fn phase_gate_rotates_x_to_y() {
        let x = PauliOperator::single(1, 0, X);
        let y = PauliOperator::single(1, 0, Y);
        assert_eq!(conjugate(&x, &Clifford::S(0)).unwrap(), y);
        assert_eq!(conjugate(&y, &Clifford::S(0)).unwrap(), x.clone().negated());
        assert_eq!(conjugate_adjoint(&x, &Clifford::S(0)).unwrap(), y.negated());
    }

    #[test]
    fn products() {
        let x = PauliOperator::single(1, 0, X);
        let z = PauliOperator::single(1, 0, Z);
        assert_eq!(multiply(&x, &x).unwrap(), (Phase::PlusOne, PauliOperator::identity(1)));
        assert_eq!(
            multiply(&x, &z).unwrap(),
            (Phase::MinusI, PauliOperator::single(1, 0, Y))
        );
        let a = PauliOperator::from_factors(&[Z, Z, I], false);
        let b = PauliOperator::from_factors(&[I, Z, Z], false);
        assert_eq!(
            multiply(&a, &b).unwrap(),
            (Phase::PlusOne, PauliOperator::from_factors(&[Z, I, Z], false))
        );
    }

    #[test]
    fn size_and_range_errors() {
        assert_eq!(
            multiply(&PauliOperator::identity(1), &PauliOperator::identity(2)),
            Err(PauliError::SizeMismatch(1, 2))
        );
        assert!(conjugate(&PauliOperator::identity(2), &Clifford::Cx(0, 2)).is_err());
    }

    #[test]
    fn wide_operators_cross_word_boundary() {
        let mut p = PauliOperator::z(130, 129);
        p.conjugate_in_place(&Clifford::Cx(3, 129)).unwrap();
        assert_eq!(p.support(), vec![3, 129]);
        assert!(p.commutes_with(&PauliOperator::z(130, 70)));
        assert!(!p.commutes_with(&PauliOperator::single(130, 3, X)));
    }

    #[test]
    fn display() {
        let p = PauliOperator::from_factors(&[X, I, Y], true);
        assert_eq!(p.to_string(), "-XIY");
    }
}

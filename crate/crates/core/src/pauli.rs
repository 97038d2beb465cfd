//! Exact two-qubit Pauli algebra.
//!
//! Products are tracked over the discrete phase group {1, i, −1, −i} so that line
//! parities come out as exact signs, never as floating approximations.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::linalg::{kron, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];

    pub fn matrix(self) -> ComplexMatrix {
        let c = Complex64::new;
        let entries = match self {
            PauliLetter::I => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            PauliLetter::X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            PauliLetter::Y => [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
            PauliLetter::Z => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        };
        ComplexMatrix::from_row_major(2, entries.to_vec()).expect("2x2")
    }

    /// Single-letter product `self · rhs = phase · letter`.
    pub fn product(self, rhs: PauliLetter) -> (Phase, PauliLetter) {
        use PauliLetter::*;
        match (self, rhs) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
        }
    }

    fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// Element of {1, i, −1, −i}, stored as the exponent of i mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// `Some(±1)` when the phase is real.
    pub fn as_sign(self) -> Option<Sign> {
        match self.0 {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl From<Sign> for Phase {
    fn from(s: Sign) -> Phase {
        match s {
            Sign::Plus => Phase::ONE,
            Sign::Minus => Phase::MINUS_ONE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Signed two-qubit Pauli word `sign · (P₁ ⊗ P₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    pub sign: Sign,
    pub letters: [PauliLetter; 2],
}

impl PauliWord {
    pub const fn new(sign: Sign, first: PauliLetter, second: PauliLetter) -> Self {
        Self {
            sign,
            letters: [first, second],
        }
    }

    pub const fn plus(first: PauliLetter, second: PauliLetter) -> Self {
        Self::new(Sign::Plus, first, second)
    }

    pub const fn minus(first: PauliLetter, second: PauliLetter) -> Self {
        Self::new(Sign::Minus, first, second)
    }

    pub fn is_identity(&self) -> bool {
        self.letters == [PauliLetter::I, PauliLetter::I]
    }

    /// The same letters with sign +1.
    pub fn unsigned(&self) -> Self {
        Self {
            sign: Sign::Plus,
            ..*self
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            sign: self.sign.flipped(),
            ..*self
        }
    }

    pub fn y_count(&self) -> usize {
        self.letters
            .iter()
            .filter(|&&l| l == PauliLetter::Y)
            .count()
    }

    /// Two Pauli words commute iff they differ (both non-identity) on an even
    /// number of tensor factors.
    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != PauliLetter::I && **b != PauliLetter::I && a != b)
            .count();
        clashes % 2 == 0
    }

    /// Exact product `self · other`, returned as an overall phase times an
    /// unsigned word.
    pub fn product(&self, other: &PauliWord) -> (Phase, PauliWord) {
        let mut phase = Phase::from(self.sign) * Phase::from(other.sign);
        let mut letters = [PauliLetter::I; 2];
        for k in 0..2 {
            let (ph, l) = self.letters[k].product(other.letters[k]);
            phase = phase * ph;
            letters[k] = l;
        }
        (phase, PauliWord::new(Sign::Plus, letters[0], letters[1]))
    }

    /// 4×4 matrix with the first letter acting on the more significant qubit.
    pub fn matrix(&self) -> ComplexMatrix {
        let m = kron(&self.letters[0].matrix(), &self.letters[1].matrix()).expect("4x4");
        m.scale_real(self.sign.as_f64())
    }

    /// All 15 unsigned non-identity two-qubit words.
    pub fn nontrivial() -> Vec<PauliWord> {
        let mut out = Vec::with_capacity(15);
        for &a in &PauliLetter::ALL {
            for &b in &PauliLetter::ALL {
                let w = PauliWord::plus(a, b);
                if !w.is_identity() {
                    out.push(w);
                }
            }
        }
        out
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        write!(
            f,
            "{}{}",
            self.letters[0].symbol(),
            self.letters[1].symbol()
        )
    }
}

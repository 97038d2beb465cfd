//! CHSH and Collins–Gisin violability from the correlation matrix.
//!
//! Correlations are normalized as C_ν = Tr{(N⊗M)ρ}/2, in which convention a state
//! can violate CHSH iff the two largest eigenvalues of CᵀC sum to more than 1/4.

use crate::linalg::{mat3_mul, mat3_transpose, sym3_eigenvalues};
use crate::states::{correlation_data, BellDiagParams, TwoQubitState};

/// Bound on λ₁ + λ₂ of CᵀC for CHSH-local states.
pub const CHSH_BOUND: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshReport {
    pub lambda_sum: f64,
    pub violated: bool,
    pub margin: f64,
}

impl ChshReport {
    fn from_sum(lambda_sum: f64) -> Self {
        let margin = lambda_sum - CHSH_BOUND;
        Self {
            lambda_sum,
            violated: margin > 0.0,
            margin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    /// 2 − (4λ₍₁₎² + λ₍₂₎²)/|λ₍₁₎|; equals 2 when the correlations vanish.
    pub slack: f64,
    pub violated: bool,
}

pub fn chsh_violable(s: &TwoQubitState) -> ChshReport {
    let c = correlation_data(s).c_nu;
    let ctc = mat3_mul(&mat3_transpose(&c), &c);
    let ev = sym3_eigenvalues(&ctc).expect("CᵀC is symmetric");
    ChshReport::from_sum(ev[0] + ev[1])
}

/// CHSH verdict for a Bell-diagonal point straight from the three cylinder
/// inequalities, without building a state.
pub fn chsh_violable_bell_diagonal(p: &BellDiagParams) -> ChshReport {
    let [x, y, z] = p.correlation_diagonal().map(|v| v * v);
    let lambda_sum = (x + y).max(x + z).max(y + z);
    ChshReport::from_sum(lambda_sum)
}

pub fn cg_violable(p: &BellDiagParams) -> CgReport {
    cg_from_eigenvalues(p.correlation_diagonal())
}

fn cg_from_eigenvalues(lambda: [f64; 3]) -> CgReport {
    let mut order = [0, 1, 2];
    // stable sort keeps the first index on ties
    order.sort_by(|&i, &j| (lambda[j] * lambda[j]).total_cmp(&(lambda[i] * lambda[i])));
    let (l1, l2) = (lambda[order[0]], lambda[order[1]]);
    let slack = if l1 == 0.0 {
        2.0
    } else {
        2.0 - (4.0 * l1 * l1 + l2 * l2) / l1.abs()
    };
    CgReport {
        slack,
        violated: slack < 0.0,
    }
}

//! Werner and Bell-diagonal two-qubit states, their correlation data, and the
//! four-qubit two-copy states the games are played on.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    is_psd, kron, permute_qubits, ComplexMatrix, QubitPermutation, Real3, DEFAULT_TOL,
    HERMITIAN_TOL,
};
use crate::pauli::{PauliLetter, PauliWord};

/// Negativity below this bound marks a partial transpose as non-positive.
pub const ENTANGLEMENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PsiPlus,
        BellState::PhiMinus,
        BellState::PsiMinus,
    ];

    /// Amplitudes in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn vector(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellState::PhiPlus => [h, z, z, h],
            BellState::PhiMinus => [h, z, z, -h],
            BellState::PsiPlus => [z, h, h, z],
            BellState::PsiMinus => [z, h, -h, z],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector())
    }
}

/// Fidelity of a modified Werner state with |Φ⁺⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(invalid(format!(
                "Werner fidelity {fidelity} outside [0, 1]"
            )));
        }
        Ok(Self(fidelity))
    }

    pub fn fidelity(self) -> f64 {
        self.0
    }

    /// The Bell-diagonal point this Werner state corresponds to.
    pub fn as_bell_diagonal(self) -> BellDiagParams {
        let rest = (1.0 - self.0) / 3.0;
        BellDiagParams {
            a: self.0,
            b: rest,
            c: rest,
        }
    }
}

/// Weights of |Φ⁺⟩, |Ψ⁺⟩ and |Φ⁻⟩; the |Ψ⁻⟩ weight is `1 − a − b − c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDiagParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BellDiagParams {
    /// Slack allowed on the simplex constraints to absorb rounding in
    /// computed parameters.
    const SIMPLEX_TOL: f64 = 1e-12;

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = Self { a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c } = *self;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(invalid(format!("non-finite Bell weights ({a}, {b}, {c})")));
        }
        if a < -Self::SIMPLEX_TOL || b < -Self::SIMPLEX_TOL || c < -Self::SIMPLEX_TOL {
            return Err(invalid(format!("negative Bell weight in ({a}, {b}, {c})")));
        }
        if a + b + c > 1.0 + Self::SIMPLEX_TOL {
            return Err(invalid(format!(
                "Bell weights ({a}, {b}, {c}) sum to {} > 1",
                a + b + c
            )));
        }
        Ok(())
    }

    pub fn d(&self) -> f64 {
        1.0 - self.a - self.b - self.c
    }

    /// Weights in the order Φ⁺, Ψ⁺, Φ⁻, Ψ⁻ (matching [`BellState::ALL`]).
    pub fn weights(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d()]
    }

    pub fn max_weight(&self) -> f64 {
        self.weights().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Diagonal of the correlation matrix: (a+b−½, b+c−½, a+c−½).
    pub fn correlation_diagonal(&self) -> [f64; 3] {
        [
            self.a + self.b - 0.5,
            self.b + self.c - 0.5,
            self.a + self.c - 0.5,
        ]
    }

    /// Full correlations Tr{(N⊗N)ρ} for N = X, Y, Z.
    pub fn pauli_correlations(&self) -> [f64; 3] {
        self.correlation_diagonal().map(|x| 2.0 * x)
    }
}

/// Two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
}

impl TwoQubitState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(invalid(format!(
                "two-qubit state needs a 4x4 matrix, got {0}x{0}",
                rho.dim()
            )));
        }
        check_density(&rho)?;
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        observable.trace_product(&self.rho).re
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }

    /// ⟨β|ρ|β⟩ for each Bell state in [`BellState::ALL`] order.
    pub fn bell_weights(&self) -> [f64; 4] {
        BellState::ALL.map(|b| self.expectation(&b.projector()))
    }

    /// Recovers (a, b, c) when the state is diagonal in the Bell basis.
    pub fn bell_diagonal_params(&self, tol: f64) -> Option<BellDiagParams> {
        let w = self.bell_weights();
        let params = BellDiagParams {
            a: w[0],
            b: w[1],
            c: w[2],
        };
        let rebuilt = bell_diagonal_matrix(&params);
        rebuilt.approx_eq(&self.rho, tol).then_some(params)
    }

    pub fn partial_transpose_second(&self) -> ComplexMatrix {
        partial_transpose(&self.rho, 1)
    }

    pub fn partial_transpose_first(&self) -> ComplexMatrix {
        partial_transpose(&self.rho, 0)
    }
}

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_hermitian(HERMITIAN_TOL) {
        return Err(invalid("density matrix is not Hermitian"));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
        return Err(invalid(format!("density matrix has trace {tr}")));
    }
    if !is_psd(rho, DEFAULT_TOL)? {
        return Err(invalid("density matrix is not positive semidefinite"));
    }
    Ok(())
}

/// Partial transpose of a 4×4 operator on qubit `which` (0 = first factor).
fn partial_transpose(m: &ComplexMatrix, which: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4);
    let shift = 1 - which;
    for i in 0..4 {
        for j in 0..4 {
            let (bi, bj) = ((i >> shift) & 1, (j >> shift) & 1);
            let mask = !(1 << shift) & 3;
            let si = (i & mask) | (bj << shift);
            let sj = (j & mask) | (bi << shift);
            out.set(i, j, m.get(si, sj));
        }
    }
    out
}

/// Bloch vectors and correlation matrix of a two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationData {
    pub tau_a: [f64; 3],
    pub tau_b: [f64; 3],
    /// `c_nu[n][m] = Tr{(N⊗M)ρ} / 2` with N, M ranging over X, Y, Z.
    pub c_nu: Real3,
}

const XYZ: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

pub fn bell_state(kind: BellState) -> TwoQubitState {
    TwoQubitState {
        rho: kind.projector(),
    }
}

fn bell_diagonal_matrix(p: &BellDiagParams) -> ComplexMatrix {
    BellState::ALL
        .iter()
        .zip(p.weights())
        .fold(ComplexMatrix::zeros(4), |acc, (b, w)| {
            &acc + &b.projector().scale_real(w)
        })
}

pub fn werner(f: WernerParam) -> TwoQubitState {
    let rest = (1.0 - f.fidelity()) / 3.0;
    let rho = [BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus]
        .iter()
        .fold(
            BellState::PhiPlus.projector().scale_real(f.fidelity()),
            |acc, b| &acc + &b.projector().scale_real(rest),
        );
    TwoQubitState { rho }
}

pub fn bell_diagonal(p: BellDiagParams) -> Result<TwoQubitState> {
    p.validate()?;
    TwoQubitState::new(bell_diagonal_matrix(&p))
}

pub fn correlation_data(s: &TwoQubitState) -> CorrelationData {
    let id = PauliLetter::I;
    let tau_a = XYZ.map(|n| s.expectation(&PauliWord::plus(n, id).matrix()));
    let tau_b = XYZ.map(|n| s.expectation(&PauliWord::plus(id, n).matrix()));
    let mut c_nu = [[0.0; 3]; 3];
    for (i, &n) in XYZ.iter().enumerate() {
        for (j, &m) in XYZ.iter().enumerate() {
            c_nu[i][j] = s.expectation(&PauliWord::plus(n, m).matrix()) / 2.0;
        }
    }
    CorrelationData { tau_a, tau_b, c_nu }
}

/// PPT verdict: entangled iff the partial transpose has an eigenvalue below
/// `-ENTANGLEMENT_TOL`.
pub fn is_entangled(s: &TwoQubitState) -> bool {
    s.partial_transpose_second()
        .min_eigenvalue()
        .expect("partial transpose of a Hermitian matrix is Hermitian")
        < -ENTANGLEMENT_TOL
}

/// Four-qubit operator with factor order (A1, A2, B1, B2).
#[derive(Clone, Debug, PartialEq)]
pub struct FourQubitState {
    rho: ComplexMatrix,
}

impl FourQubitState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != 16 {
            return Err(invalid(format!(
                "four-qubit state needs a 16x16 matrix, got {0}x{0}",
                rho.dim()
            )));
        }
        check_density(&rho)?;
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Reduced state of the first pair (A1, B1), tracing out A2 and B2.
    pub fn reduced_first_pair(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4);
        let index =
            |a1: usize, a2: usize, b1: usize, b2: usize| (a1 << 3) | (a2 << 2) | (b1 << 1) | b2;
        for a1 in 0..2 {
            for b1 in 0..2 {
                for a1p in 0..2 {
                    for b1p in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a2 in 0..2 {
                            for b2 in 0..2 {
                                acc += self.rho.get(index(a1, a2, b1, b2), index(a1p, a2, b1p, b2));
                            }
                        }
                        out.set(a1 * 2 + b1, a1p * 2 + b1p, acc);
                    }
                }
            }
        }
        out
    }
}

/// ρ ⊗ ρ with factors reordered from (A1, B1, A2, B2) to (A1, A2, B1, B2).
pub fn two_copy(s: &TwoQubitState) -> FourQubitState {
    let doubled = kron(&s.rho, &s.rho).expect("16x16");
    let reorder = QubitPermutation::new(vec![0, 2, 1, 3]).expect("valid permutation");
    FourQubitState {
        rho: permute_qubits(&doubled, &reorder).expect("16x16 is four qubits"),
    }
}

impl From<WernerParam> for TwoQubitState {
    fn from(f: WernerParam) -> Self {
        werner(f)
    }
}

impl TryFrom<BellDiagParams> for TwoQubitState {
    type Error = Error;

    fn try_from(p: BellDiagParams) -> Result<Self> {
        bell_diagonal(p)
    }
}

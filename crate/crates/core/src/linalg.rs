//! Small dense complex matrices.
//!
//! Everything in this crate lives in dimension 2, 4 or 16 (8 shows up as an
//! intermediate Kronecker factor), plus real 3×3 correlation matrices. Storage is
//! a flat row-major `Vec`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Default absolute tolerance for floating comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance below which a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest dimension any operator in this crate reaches.
pub const MAX_DIM: usize = 16;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn supported_dim(dim: usize) -> bool {
    dim == 3 || (dim.is_power_of_two() && (2..=MAX_DIM).contains(&dim))
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(supported_dim(dim), "unsupported matrix dimension {dim}");
        Self {
            dim,
            data: vec![C0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C1;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if !supported_dim(dim) {
            return Err(Error::Configuration(format!(
                "matrix dimension {dim} is not supported"
            )));
        }
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(N, data).expect("supported dimension")
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * m.dim + i] = e;
        }
        m
    }

    /// Outer product |v⟩⟨v|.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = C0;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(HERMITIAN_TOL) {
            return Err(invalid("matrix is not Hermitian"));
        }
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| self.get(i, j));
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.hermitian_eigenvalues()?[0])
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, m) = (a.dim, b.dim);
    let dim = n * m;
    if !dim.is_power_of_two() || dim > MAX_DIM {
        return Err(Error::Configuration(format!(
            "kron of {n}x{n} and {m}x{m} gives unsupported dimension {dim}"
        )));
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            let aij = a.data[i * n + j];
            if aij == C0 {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out.data[(i * m + k) * dim + j * m + l] = aij * b.data[k * m + l];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| invalid("kron_all needs at least one factor"))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, f| kron(&acc, f))
}

/// Reordering of tensor factors: factor `k` of the result is factor `order[k]`
/// of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitPermutation {
    order: Vec<usize>,
}

impl QubitPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &q in &order {
            if q >= order.len() || seen[q] {
                return Err(invalid(format!("{order:?} is not a permutation")));
            }
            seen[q] = true;
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.order.len()];
        for (k, &q) in self.order.iter().enumerate() {
            inv[q] = k;
        }
        Self { order: inv }
    }

    /// Maps a basis index of the permuted space to the index it came from.
    fn source_index(&self, index: usize) -> usize {
        let n = self.order.len();
        let mut src = 0;
        for (k, &q) in self.order.iter().enumerate() {
            let bit = (index >> (n - 1 - k)) & 1;
            src |= bit << (n - 1 - q);
        }
        src
    }
}

/// Conjugates `m` by the unitary that reorders its qubit factors.
///
/// Factor 0 is the most significant bit of the basis index, matching [`kron`].
pub fn permute_qubits(m: &ComplexMatrix, p: &QubitPermutation) -> Result<ComplexMatrix> {
    let dim = m.dim;
    if !dim.is_power_of_two() || dim < 2 {
        return Err(invalid(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if p.len() != n {
        return Err(invalid(format!(
            "permutation of length {} applied to a {n}-qubit operator",
            p.len()
        )));
    }
    let src: Vec<usize> = (0..dim).map(|i| p.source_index(i)).collect();
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.data[i * dim + j] = m.data[src[i] * dim + src[j]];
        }
    }
    Ok(out)
}

/// `true` iff the smallest eigenvalue of the Hermitian matrix is at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(m.min_eigenvalue()? >= -tol)
}

/// Real 3×3 matrix, row-major.
pub type Real3 = [[f64; 3]; 3];

pub fn mat3_mul(a: &Real3, b: &Real3) -> Real3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &Real3) -> Real3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn det3(m: &Real3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Eigenvalues of a real symmetric 3×3 matrix, sorted descending.
///
/// Uses the trigonometric closed form; when the shifted matrix is nearly
/// scalar or the discriminant is within 1e-12 of zero it switches to cyclic
/// Jacobi rotations, which handle exact degeneracies cleanly.
pub fn sym3_eigenvalues(m: &Real3) -> Result<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (m[i][j] - m[j][i]).abs() > HERMITIAN_TOL {
                return Err(invalid(format!(
                    "matrix is not symmetric at ({i},{j}): {} vs {}",
                    m[i][j], m[j][i]
                )));
            }
        }
    }
    if m[0][1] == 0.0 && m[0][2] == 0.0 && m[1][2] == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| b.total_cmp(a));
        return Ok(d);
    }

    let mut values = match trigonometric_eigenvalues(m, scale) {
        Some(v) => v,
        None => jacobi_eigenvalues(m),
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

fn trigonometric_eigenvalues(m: &Real3, scale: f64) -> Option<[f64; 3]> {
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let off = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    if p <= 1e-12 * scale {
        return None;
    }
    let mut b = *m;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (*x - if i == j { q } else { 0.0 }) / p;
        }
    }
    // char poly of b is λ³ − 3λ − det(b); discriminant vanishes at |det b| = 2
    let r = det3(&b) / 2.0;
    if (1.0 - r.abs()).abs() <= 1e-12 {
        return None;
    }
    let phi = r.clamp(-1.0, 1.0).acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    Some([l1, l2, l3])
}

fn jacobi_eigenvalues(m: &Real3) -> [f64; 3] {
    let mut a = *m;
    for _sweep in 0..64 {
        let off: f64 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A ← Jᵀ A J with J the (p,q) rotation
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

//! Dense complex matrix substrate.
//!
//! Everything here works on small dense matrices (dimension at most 81), so
//! plain `nalgebra` storage is used throughout. The Hermitian eigensolver is a
//! cyclic Jacobi iteration on the real-symmetric embedding
//! `A + iB -> [[A, -B], [B, A]]`, which is slow-ish but very accurate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix (row count, column count, entries).
pub type ComplexMatrix = DMatrix<Complex64>;

/// Tolerance used to decide whether a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Default rank cutoff for support projectors.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise deviation of `a` from its adjoint.
pub fn hermitian_defect(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && hermitian_defect(a) <= tol
}

/// `(A + A†) / 2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// `Re Tr[A B]`, the real Hilbert–Schmidt pairing for Hermitian arguments.
pub fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    // Tr[AB] = sum_ij A_ij B_ji
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..a.ncols() {
            let x = a[(i, j)] * b[(j, i)];
            acc += x.re;
        }
    }
    acc
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().copied().sum()
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Outer product `|u><v|`.
pub fn ket_bra(u: &DVector<Complex64>, v: &DVector<Complex64>) -> ComplexMatrix {
    u * v.adjoint()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of operators, left to right.
pub fn kron_all<'a, I>(ops: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    ops.into_iter()
        .fold(identity(1), |acc, op| acc.kronecker(op))
}

/// Which tensor factor a partial transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial transpose of an operator on `C^dA ⊗ C^dB`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: (usize, usize),
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let d = da * db;
    if m.nrows() != d || m.ncols() != d {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} operator for a {da}x{db} bipartition",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    // <ij| M |kl>
                    let v = m[(i * db + j, k * db + l)];
                    let (r, c) = match subsystem {
                        Subsystem::A => (k * db + j, i * db + l),
                        Subsystem::B => (i * db + l, k * db + j),
                    };
                    out[(r, c)] = v;
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Eigensolver

/// Cyclic Jacobi on a dense real symmetric matrix stored row-major.
/// Returns (eigenvalues, eigenvectors as columns of a row-major n×n array).
fn jacobi_symmetric(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J, J the (p, q) Givens rotation
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[i * n + i]).collect();
    (evals, v)
}

/// Hermitian eigendecomposition. Eigenvalues are sorted in descending order
/// and the eigenvectors are the columns of the returned unitary.
pub fn herm_eig(a: &ComplexMatrix) -> Result<(DVector<f64>, ComplexMatrix)> {
    let defect = hermitian_defect(a);
    if !a.is_square() || defect > HERMITIAN_TOL * (1.0 + a.norm()) || !defect.is_finite() {
        return Err(LinalgError::NonHermitian(defect));
    }
    let d = a.nrows();
    if d == 0 {
        return Ok((DVector::zeros(0), ComplexMatrix::zeros(0, 0)));
    }
    let h = hermitian_part(a);
    let n = 2 * d;
    let mut emb = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            let z = h[(i, j)];
            emb[i * n + j] = z.re;
            emb[(i + d) * n + (j + d)] = z.re;
            emb[i * n + (j + d)] = -z.im;
            emb[(i + d) * n + j] = z.im;
        }
    }
    let (evals, evecs) = jacobi_symmetric(emb, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| evals[y].total_cmp(&evals[x]));

    // Each complex eigenvector appears twice in the embedding, as (u; v) and
    // (-v; u). Pick a complex-orthonormal subset greedily in eigenvalue order.
    let mut chosen: Vec<DVector<Complex64>> = Vec::with_capacity(d);
    for &col in &order {
        if chosen.len() == d {
            break;
        }
        let mut w = DVector::from_fn(d, |i, _| c64(evecs[i * n + col], evecs[(i + d) * n + col]));
        for _ in 0..2 {
            for u in &chosen {
                let proj = u.dotc(&w);
                w -= u * proj;
            }
        }
        let norm = w.norm();
        if norm > 0.5 {
            chosen.push(w / c64(norm, 0.0));
        }
    }
    if chosen.len() < d {
        // Degenerate pathological input; complete the basis from unit vectors.
        for e in 0..d {
            if chosen.len() == d {
                break;
            }
            let mut w = DVector::from_fn(d, |i, _| if i == e { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
            for u in &chosen {
                let proj = u.dotc(&w);
                w -= u * proj;
            }
            let norm = w.norm();
            if norm > 1e-6 {
                chosen.push(w / c64(norm, 0.0));
            }
        }
    }
    let mut pairs: Vec<(f64, DVector<Complex64>)> = chosen
        .into_iter()
        .map(|u| {
            let lambda = (u.adjoint() * &h * &u)[(0, 0)].re;
            (lambda, u)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let values = DVector::from_iterator(d, pairs.iter().map(|p| p.0));
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (k, (_, u)) in pairs.iter().enumerate() {
        vectors.set_column(k, u);
    }
    Ok((values, vectors))
}

/// Eigenvalues only, descending.
pub fn herm_eigvals(a: &ComplexMatrix) -> Result<DVector<f64>> {
    herm_eig(a).map(|(v, _)| v)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    let v = herm_eigvals(a)?;
    Ok(v.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Apply a scalar function to the spectrum of a Hermitian matrix.
pub fn herm_map<F: Fn(f64) -> f64>(a: &ComplexMatrix, f: F) -> Result<ComplexMatrix> {
    let (vals, vecs) = herm_eig(a)?;
    let d = vals.len();
    let mut scaled = vecs.clone();
    for k in 0..d {
        let fk = f(vals[k]);
        for i in 0..d {
            scaled[(i, k)] *= fk;
        }
    }
    Ok(scaled * vecs.adjoint())
}

/// Square root of a PSD matrix; eigenvalues below zero are clipped.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_map(a, |x| if x > 0.0 { x.sqrt() } else { 0.0 })
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigvals(a)?.iter().map(|x| x.abs()).sum())
}

/// Trace of the positive part, `Tr[A]_+`.
pub fn positive_part_trace(a: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigvals(a)?.iter().filter(|x| **x > 0.0).sum())
}

// ---------------------------------------------------------------------------
// States

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LinalgError::InvalidState(format!(
                "non-square {}x{} matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermitian_defect(&matrix);
        if !defect.is_finite() || defect > HERMITIAN_TOL {
            return Err(LinalgError::NonHermitian(defect));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(LinalgError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lmin = min_eigenvalue(&matrix)?;
        if lmin < -PSD_TOL {
            return Err(LinalgError::InvalidState(format!(
                "negative eigenvalue {lmin:.3e}"
            )));
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    /// Normalizes the trace and clips tiny negative eigenvalues before validating.
    /// Meant for solver outputs that are states up to round-off.
    pub fn from_numerical(matrix: &ComplexMatrix) -> Result<Self> {
        let h = hermitian_part(matrix);
        let clipped = herm_map(&h, |x| x.max(0.0))?;
        let tr = trace(&clipped).re;
        if !(tr > 0.0) {
            return Err(LinalgError::InvalidState("zero trace".into()));
        }
        Self::new(clipped.unscale(tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: identity(d).unscale(d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Tensor power `ρ^{⊗n}` for `n ≥ 1`.
    pub fn tensor_power(&self, n: usize) -> DensityMatrix {
        assert!(n >= 1, "tensor power needs n >= 1");
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self);
        }
        out
    }

    /// Convex combination `p ρ + (1 − p) σ`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        check_dims(self, other)?;
        DensityMatrix::new(self.matrix.scale(p) + other.matrix.scale(1.0 - p))
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        herm_eigvals(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        inner(&self.matrix, &self.matrix)
    }

    pub fn overlap(&self, op: &ComplexMatrix) -> f64 {
        inner(&self.matrix, op)
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LinalgError::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(LinalgError::InvalidState("zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / c64(norm, 0.0),
        })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::normalized(DVector::from_column_slice(amps))
    }

    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(LinalgError::IndexOutOfRange(format!("basis index {k} for dimension {d}")));
        }
        let mut v = DVector::zeros(d);
        v[k] = c64(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ket_bra(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.projector(),
        }
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn apply(&self, u: &ComplexMatrix) -> Result<PureState> {
        if u.ncols() != self.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} operator on a {}-dimensional state",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        PureState::normalized(u * &self.amplitudes)
    }
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Square root of a PSD matrix with rounding-level eigenvalues set to zero.
fn clean_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let vals = herm_eigvals(a)?;
    let top = vals.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = 8.0 * f64::EPSILON * a.nrows() as f64 * top;
    herm_map(a, |x| if x > floor { x.sqrt() } else { 0.0 })
}

/// Uhlmann fidelity `‖√ρ √σ‖₁²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let prod = clean_sqrt(rho.matrix())? * clean_sqrt(sigma.matrix())?;
    let root: f64 = prod.svd(false, false).singular_values.sum();
    Ok((root * root).clamp(0.0, 1.0))
}

pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    Ok((0.5 * trace_norm(&(rho.matrix() - sigma.matrix()))?).clamp(0.0, 1.0))
}

pub fn purified_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((1.0 - fidelity(rho, sigma)?).max(0.0).sqrt())
}

/// Projector onto the eigenvectors of `ρ` with eigenvalue above `rank_tol`.
pub fn support_projector(rho: &DensityMatrix, rank_tol: f64) -> ComplexMatrix {
    let (vals, vecs) = herm_eig(rho.matrix()).expect("density matrices are Hermitian");
    let d = rho.dim();
    let mut p = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        if vals[k] > rank_tol {
            let col = vecs.column(k).into_owned();
            p += ket_bra(&col, &col);
        }
    }
    p
}

/// Orthonormal basis (as columns) of the kernel of `ρ` at the given cutoff.
pub fn kernel_basis(rho: &DensityMatrix, rank_tol: f64) -> ComplexMatrix {
    let (vals, vecs) = herm_eig(rho.matrix()).expect("density matrices are Hermitian");
    let cols: Vec<usize> = (0..rho.dim()).filter(|&k| vals[k] <= rank_tol).collect();
    let mut out = ComplexMatrix::zeros(rho.dim(), cols.len());
    for (j, &k) in cols.iter().enumerate() {
        out.set_column(j, &vecs.column(k));
    }
    out
}

// ---------------------------------------------------------------------------
// Pauli and Weyl operators

pub fn pauli_i() -> ComplexMatrix {
    identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

/// Single-qubit Pauli by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(index: usize) -> Result<ComplexMatrix> {
    match index {
        0 => Ok(pauli_i()),
        1 => Ok(pauli_x()),
        2 => Ok(pauli_y()),
        3 => Ok(pauli_z()),
        _ => Err(LinalgError::IndexOutOfRange(format!("Pauli index {index}"))),
    }
}

/// `n`-qubit Pauli string. `index` is read in base 4 with the first qubit as
/// the most significant digit, so `pauli_string(2, 4*1 + 3)` is `X ⊗ Z`.
pub fn pauli_string(n: usize, index: usize) -> Result<ComplexMatrix> {
    let count = 4usize.checked_pow(n as u32).ok_or_else(|| {
        LinalgError::IndexOutOfRange(format!("{n} qubits"))
    })?;
    if index >= count {
        return Err(LinalgError::IndexOutOfRange(format!(
            "Pauli string {index} on {n} qubits"
        )));
    }
    let mut digits = vec![0usize; n];
    let mut rest = index;
    for k in (0..n).rev() {
        digits[k] = rest % 4;
        rest /= 4;
    }
    let factors: Vec<ComplexMatrix> = digits.iter().map(|&k| pauli(k).unwrap()).collect();
    Ok(kron_all(factors.iter()))
}

/// Pauli string from a label such as `"XIZ"`.
pub fn pauli_from_label(label: &str) -> Result<ComplexMatrix> {
    let factors = label
        .chars()
        .map(|ch| match ch {
            'I' => Ok(pauli_i()),
            'X' => Ok(pauli_x()),
            'Y' => Ok(pauli_y()),
            'Z' => Ok(pauli_z()),
            other => Err(LinalgError::IndexOutOfRange(format!("Pauli label {other:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(kron_all(factors.iter()))
}

/// Generalized shift `X|j> = |j+1 mod d>`.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        x[((j + 1) % d, j)] = c64(1.0, 0.0);
    }
    x
}

/// Generalized clock `Z|j> = ω^j |j>` with `ω = e^{2πi/d}`.
pub fn clock(d: usize) -> ComplexMatrix {
    let mut z = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        z[(j, j)] = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64);
    }
    z
}

/// Displacement operator `D_{k1,k2} = −e^{iπ/d} X^{k1} Z^{k2}`.
pub fn weyl_operator(d: usize, k1: usize, k2: usize) -> Result<ComplexMatrix> {
    if d < 2 || k1 >= d || k2 >= d {
        return Err(LinalgError::IndexOutOfRange(format!(
            "Weyl operator ({k1}, {k2}) in dimension {d}"
        )));
    }
    let x = shift(d);
    let z = clock(d);
    let mut op = identity(d);
    for _ in 0..k1 {
        op = &op * &x;
    }
    for _ in 0..k2 {
        op = &op * &z;
    }
    let phase = -Complex64::from_polar(1.0, std::f64::consts::PI / d as f64);
    Ok(op * phase)
}

/// `‖U U† − I‖_max`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let d = u.nrows();
    let prod = u * u.adjoint() - identity(d);
    prod.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis of the Hermitian operators on `C^d` under `Re Tr[AB]`:
/// diagonal units, then symmetric and antisymmetric off-diagonal pairs.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = c64(1.0, 0.0);
        out.push(e);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(i, j)] = c64(r, 0.0);
            s[(j, i)] = c64(r, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = c64(0.0, -r);
            a[(j, i)] = c64(0.0, r);
            out.push(a);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(a: &ComplexMatrix) -> Vec<f64> {
    let d = a.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(a[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = a[(i, j)];
            out.push(s2 * z.re);
            out.push(-s2 * z.im);
        }
    }
    out
}

/// Inverse of [`hermitian_coords`].
pub fn hermitian_from_coords(d: usize, coords: &[f64]) -> ComplexMatrix {
    assert_eq!(coords.len(), d * d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c64(coords[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c64(r * coords[k], -r * coords[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol
        }
    }

    fn ket(v: &[(f64, f64)]) -> PureState {
        PureState::from_slice(&v.iter().map(|&(r, i)| c64(r, i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn eig_identity_and_z() {
        let (vals, _) = herm_eig(&identity(2)).unwrap();
        assert!(close(vals[0], 1.0, 1e-14) && close(vals[1], 1.0, 1e-14));
        let (vals, vecs) = herm_eig(&pauli_z()).unwrap();
        assert!(close(vals[0], 1.0, 1e-14) && close(vals[1], -1.0, 1e-14));
        assert!(close(vecs[(0, 0)].norm(), 1.0, 1e-12));
        assert!(close(vecs[(1, 1)].norm(), 1.0, 1e-12));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]);
        assert!(matches!(herm_eig(&m), Err(LinalgError::NonHermitian(_))));
    }

    #[test]
    fn face_state_spectrum() {
        let s = 1.0 / 3f64.sqrt();
        let m = (identity(2) + (pauli_x() + pauli_y() + pauli_z()).scale(s)).scale(0.5);
        let vals = herm_eigvals(&m).unwrap();
        assert!(close(vals[0], 1.0, 1e-12));
        assert!(close(vals[1], 0.0, 1e-12));
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::basis(2, 0).unwrap().density();
        let one = PureState::basis(2, 1).unwrap().density();
        assert!(close(fidelity(&zero, &zero).unwrap(), 1.0, 1e-12));
        assert!(close(fidelity(&zero, &one).unwrap(), 0.0, 1e-12));
        assert!(close(trace_distance(&zero, &one).unwrap(), 1.0, 1e-12));
        assert!(close(trace_distance(&zero, &zero).unwrap(), 0.0, 1e-12));

        // Φ_κ = κΦ + (1−κ)σ* with σ* orthogonal to Φ
        let phi = ket(&[(0., 0.), (1., 0.), (-1., 0.)]).density();
        let sigma = ket(&[(1., 0.), (0., 0.), (0., 0.)]).density();
        let mixed = phi.mix(&sigma, 0.3).unwrap();
        assert!(close(fidelity(&phi, &mixed).unwrap(), 0.3, 1e-10));
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(3);
        assert!(matches!(fidelity(&a, &b), Err(LinalgError::DimensionMismatch(_))));
        assert!(matches!(trace_distance(&a, &b), Err(LinalgError::DimensionMismatch(_))));
    }

    #[test]
    fn support_projectors() {
        let psi = ket(&[(1., 0.), (0., 1.)]);
        let p = support_projector(&psi.density(), DEFAULT_RANK_TOL);
        assert!((p - psi.projector()).norm() < 1e-10);
        let p = support_projector(&DensityMatrix::maximally_mixed(2), DEFAULT_RANK_TOL);
        assert!((p - identity(2)).norm() < 1e-10);

        // rank-2 mixture of orthogonal pure states
        let phi = ket(&[(0., 0.), (1., 0.), (-1., 0.)]);
        let star = ket(&[(1., 0.), (0., 0.), (0., 0.)]);
        let mixed = phi.density().mix(&star.density(), 0.4).unwrap();
        let p = support_projector(&mixed, DEFAULT_RANK_TOL);
        assert!((&p - (phi.projector() + star.projector())).norm() < 1e-10);
        assert!((&p * &p - &p).norm() < 1e-9);
    }

    #[test]
    fn kron_and_partial_transpose() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let bell = ket(&[(1., 0.), (0., 0.), (0., 0.), (1., 0.)]).projector();
        let pt = partial_transpose(&bell, (2, 2), Subsystem::B).unwrap();
        let vals = herm_eigvals(&pt).unwrap();
        assert!(close(vals[3], -0.5, 1e-12));
        assert!(close(vals[0], 0.5, 1e-12));
        let back = partial_transpose(&pt, (2, 2), Subsystem::B).unwrap();
        assert!((back - bell).norm() < 1e-14);
        assert!(partial_transpose(&identity(3), (2, 2), Subsystem::A).is_err());
    }

    #[test]
    fn pauli_and_weyl() {
        assert_eq!(pauli_string(1, 3).unwrap(), pauli_z());
        assert_eq!(pauli_string(2, 7).unwrap(), kron(&pauli_x(), &pauli_z()));
        assert_eq!(pauli_from_label("XZ").unwrap(), kron(&pauli_x(), &pauli_z()));
        assert!(pauli_string(1, 4).is_err());
        let w = weyl_operator(3, 0, 0).unwrap();
        let expected = identity(3) * -Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!((w - expected).norm() < 1e-14);
        assert!(weyl_operator(3, 3, 0).is_err());
        for k1 in 0..3 {
            for k2 in 0..3 {
                assert!(unitarity_defect(&weyl_operator(3, k1, k2).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn three_qubit_paulis_are_trace_orthogonal() {
        let ps: Vec<_> = (0..64).map(|k| pauli_string(3, k).unwrap()).collect();
        for (i, a) in ps.iter().enumerate() {
            assert!(hermitian_defect(a) < 1e-15);
            for (j, b) in ps.iter().enumerate() {
                let t = trace(&(a * b));
                let want = if i == j { 8.0 } else { 0.0 };
                assert!((t - c64(want, 0.0)).norm() < 1e-12, "({i},{j}) -> {t}");
            }
        }
    }

    #[test]
    fn hermitian_coordinates_round_trip() {
        let basis = hermitian_basis(3);
        assert_eq!(basis.len(), 9);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(close(inner(a, b), want, 1e-14));
            }
        }
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64(0.3, 0.), c64(0.1, -0.2), c64(0.1, 0.2), c64(0.7, 0.)],
        );
        let back = hermitian_from_coords(2, &hermitian_coords(&m));
        assert!((back - m).norm() < 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(identity(2)).is_err());
        assert!(DensityMatrix::new(pauli_x()).is_err());
        let bad = ComplexMatrix::from_row_slice(2, 2, &[c64(1.5, 0.), c64(0., 0.), c64(0., 0.), c64(-0.5, 0.)]);
        assert!(DensityMatrix::new(bad).is_err());
        assert!(PureState::new(DVector::from_element(2, c64(1.0, 0.0))).is_err());
    }
}

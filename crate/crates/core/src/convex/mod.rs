//! Small dense LP and SDP solvers.
//!
//! [`solve_sdp`] takes problems in the inequality form
//! `min c'y  s.t.  sum_i y_i F_{b,i} - G_b ⪰ 0` over Hermitian blocks, with
//! optional affine inequality and equality rows. [`solve_lp`] takes
//! `min c'x  s.t.  Ax = b, x ≥ l`. Both run the interior-point kernel in
//! [`ipm`]; the [`builder`] module offers a modeling layer on top.

pub mod builder;
mod ipm;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{hermitian_defect, ComplexMatrix};
use ipm::{BlockKind, BlockVec, ConeProblem, ConeStatus, Part};

pub use builder::{AffMat, AffScalar, Model, ModelSolution};

/// Solver tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative primal and dual residual target.
    pub feas_tol: f64,
    /// Absolute duality gap target.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Ray quality required to declare infeasibility.
    pub infeas_tol: f64,
    /// Residual accepted when the iteration stalls before reaching `feas_tol`.
    pub fallback_feas_tol: f64,
    /// Gap accepted when the iteration stalls before reaching `gap_tol`.
    pub fallback_gap_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            gap_tol: 1e-6,
            max_iter: 200,
            infeas_tol: 1e-8,
            fallback_feas_tol: 1e-7,
            fallback_gap_tol: 1e-6,
        }
    }
}

impl SolverOptions {
    /// Tight tolerances used by the measure routines.
    pub fn precise() -> Self {
        Self {
            feas_tol: 1e-9,
            gap_tol: 1e-9,
            ..Self::default()
        }
    }

    /// Sets both the feasibility and the gap target to `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            feas_tol: tol,
            gap_tol: tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
    NumericalBreakdown,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("problem was not solved to optimality (status {0:?})")]
    NotSolved(Status),
    #[error("malformed problem: {0}")]
    Malformed(String),
}

/// Multipliers returned alongside a solution.
#[derive(Debug, Clone, Default)]
pub struct DualCertificate {
    /// One multiplier per inequality row (for LPs: per variable bound).
    pub inequalities: Vec<f64>,
    /// One multiplier per equality row.
    pub equalities: Vec<f64>,
    /// Dual PSD matrix for each block, in block order.
    pub blocks: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    /// Primal objective value.
    pub value: f64,
    /// Dual objective value.
    pub dual_value: f64,
    /// Primal variables.
    pub primal: Vec<f64>,
    pub dual: DualCertificate,
    /// `|value - dual_value|`.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// Absolute gap between primal and dual objective of an optimal solution.
pub fn check_duality_gap(sol: &Solution) -> Result<f64, SolverError> {
    if sol.status != Status::Optimal {
        return Err(SolverError::NotSolved(sol.status));
    }
    Ok((sol.value - sol.dual_value).abs())
}

/// `sum_i coeffs_i y_i - rhs`, constrained to be `≥ 0` or `= 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// `sum_i y_i F_i - G ⪰ 0`. Only nonzero coefficients need to be listed.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdBlock {
    pub constant: ComplexMatrix,
    pub coefficients: Vec<(usize, ComplexMatrix)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<PsdBlock>,
    pub inequalities: Vec<AffineRow>,
    pub equalities: Vec<AffineRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_matrix: DMatrix<f64>,
    pub eq_rhs: Vec<f64>,
    /// Lower bound per variable; `f64::NEG_INFINITY` marks a free variable.
    pub lower: Vec<f64>,
}

impl LinearProgram {
    fn validate(&self) -> Result<(), SolverError> {
        let n = self.objective.len();
        if self.eq_matrix.ncols() != n && self.eq_matrix.nrows() > 0 {
            return Err(SolverError::Malformed(format!(
                "{} objective entries for {} matrix columns",
                n,
                self.eq_matrix.ncols()
            )));
        }
        if self.eq_matrix.nrows() != self.eq_rhs.len() || self.lower.len() != n {
            return Err(SolverError::Malformed("inconsistent dimensions".into()));
        }
        if self.eq_rhs.iter().any(|v| !v.is_finite())
            || self.objective.iter().any(|v| !v.is_finite())
            || self.lower.iter().any(|v| v.is_nan() || *v == f64::INFINITY)
        {
            return Err(SolverError::Malformed("non-finite data".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

const REAL_TOL: f64 = 1e-14;

fn upper_triplets(m: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let n = m.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = if i == j { m[(i, i)] } else { 0.5 * (m[(i, j)] + m[(j, i)]) };
            if v != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Real symmetric image of a Hermitian matrix: the real part alone when
/// `real_block`, otherwise `[[A, -B], [B, A]]`.
fn embed(h: &ComplexMatrix, real_block: bool) -> DMatrix<f64> {
    let d = h.nrows();
    if real_block {
        return DMatrix::from_fn(d, d, |i, j| h[(i, j)].re);
    }
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = h[(i, j)];
            m[(i, j)] = z.re;
            m[(i + d, j + d)] = z.re;
            m[(i, j + d)] = -z.im;
            m[(i + d, j)] = z.im;
        }
    }
    m
}

fn unembed(x: &DMatrix<f64>, real_block: bool) -> ComplexMatrix {
    if real_block {
        return x.map(|v| Complex64::new(v, 0.0));
    }
    let d = x.nrows() / 2;
    ComplexMatrix::from_fn(d, d, |i, j| {
        Complex64::new(
            x[(i, j)] + x[(i + d, j + d)],
            x[(i + d, j)] - x[(i, j + d)],
        )
    })
}

/// Drops linearly dependent constraints of (P) by reparametrizing `y = T w`.
/// Returns `None` when the dependent rows are inconsistent with `b`.
fn reduce_dependent(p: ConeProblem) -> Option<(ConeProblem, Option<DMatrix<f64>>)> {
    let m = p.b.len();
    if m == 0 {
        return Some((p, None));
    }
    // Dense vectorization of every A_k.
    let mut offsets = Vec::with_capacity(p.blocks.len());
    let mut total = 0;
    for kind in &p.blocks {
        offsets.push(total);
        total += match kind {
            BlockKind::Sdp(n) => n * (n + 1) / 2,
            BlockKind::Lp(n) => *n,
        };
    }
    let mut vecs = DMatrix::<f64>::zeros(m, total);
    let s2 = std::f64::consts::SQRT_2;
    for (k, parts) in p.a.iter().enumerate() {
        for (bi, part) in parts {
            let off = offsets[*bi];
            match (part, p.blocks[*bi]) {
                (Part::Sdp(t), BlockKind::Sdp(n)) => {
                    for &(i, j, v) in t {
                        // packed upper triangle, row major
                        let idx = i * n - i * (i + 1) / 2 + j;
                        vecs[(k, off + idx)] += if i == j { v } else { s2 * v };
                    }
                }
                (Part::Lp(e), _) => {
                    for &(i, v) in e {
                        vecs[(k, off + i)] += v;
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let gram = &vecs * vecs.transpose();
    let eig = SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let cut = 1e-11 * lmax.max(1e-300);
    let keep: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > cut).collect();
    if keep.len() == m {
        return Some((p, None));
    }
    let bnorm = 1.0 + p.b.norm();
    for i in 0..m {
        if eig.eigenvalues[i] <= cut {
            let n = eig.eigenvectors.column(i);
            if n.dot(&p.b).abs() > 1e-8 * bnorm {
                return None;
            }
        }
    }
    let t = DMatrix::from_fn(m, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    // Rebuild A' = sum_k T_kj A_k from the dense vectorization.
    let reduced = t.transpose() * &vecs;
    let mut a = Vec::with_capacity(keep.len());
    for j in 0..keep.len() {
        let mut parts = Vec::new();
        for (bi, kind) in p.blocks.iter().enumerate() {
            let off = offsets[bi];
            match *kind {
                BlockKind::Sdp(n) => {
                    let mut trip = Vec::new();
                    let mut idx = 0;
                    for i in 0..n {
                        for jj in i..n {
                            let v = reduced[(j, off + idx)];
                            idx += 1;
                            if v.abs() > 1e-15 {
                                trip.push((i, jj, if i == jj { v } else { v / s2 }));
                            }
                        }
                    }
                    if !trip.is_empty() {
                        parts.push((bi, Part::Sdp(trip)));
                    }
                }
                BlockKind::Lp(n) => {
                    let e: Vec<(usize, f64)> = (0..n)
                        .map(|i| (i, reduced[(j, off + i)]))
                        .filter(|(_, v)| v.abs() > 1e-15)
                        .collect();
                    if !e.is_empty() {
                        parts.push((bi, Part::Lp(e)));
                    }
                }
            }
        }
        a.push(parts);
    }
    let b = t.transpose() * &p.b;
    Some((
        ConeProblem {
            blocks: p.blocks,
            c: p.c,
            a,
            b,
        },
        Some(t),
    ))
}

fn failed_solution(status: Status, num_vars: usize, iterations: usize) -> Solution {
    Solution {
        status,
        value: f64::NAN,
        dual_value: f64::NAN,
        primal: vec![f64::NAN; num_vars],
        dual: DualCertificate::default(),
        gap: f64::NAN,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        iterations,
    }
}

fn validate_sdp(p: &SdpProblem) -> Result<(), SolverError> {
    if p.objective.len() != p.num_vars {
        return Err(SolverError::Malformed(format!(
            "{} objective entries for {} variables",
            p.objective.len(),
            p.num_vars
        )));
    }
    for (bi, blk) in p.blocks.iter().enumerate() {
        let d = blk.constant.nrows();
        if !blk.constant.is_square() || d > 64 {
            return Err(SolverError::Malformed(format!("block {bi} has unsupported shape")));
        }
        if hermitian_defect(&blk.constant) > 1e-10 {
            return Err(SolverError::Malformed(format!("block {bi} constant is not Hermitian")));
        }
        for (i, f) in &blk.coefficients {
            if *i >= p.num_vars || f.shape() != (d, d) {
                return Err(SolverError::Malformed(format!("block {bi} coefficient {i} is malformed")));
            }
            if hermitian_defect(f) > 1e-10 {
                return Err(SolverError::Malformed(format!("block {bi} coefficient {i} is not Hermitian")));
            }
        }
    }
    for row in p.inequalities.iter().chain(&p.equalities) {
        if row.coeffs.iter().any(|(i, v)| *i >= p.num_vars || !v.is_finite()) || !row.rhs.is_finite() {
            return Err(SolverError::Malformed("affine row is malformed".into()));
        }
    }
    Ok(())
}

/// Solves `min c'y` subject to the problem's PSD blocks and affine rows.
///
/// The dual certificate carries one PSD matrix `X_b` per block, one
/// multiplier per inequality and per equality, satisfying
/// `c_i = sum_b <F_{b,i}, X_b> + sum_l a_{l,i} λ_l + sum_e e_{e,i} μ_e`.
pub fn solve_sdp(p: &SdpProblem, opts: &SolverOptions) -> Result<Solution, SolverError> {
    validate_sdp(p)?;
    let m = p.num_vars;
    let c = DVector::from_column_slice(&p.objective);

    // Eliminate equalities: y = y0 + N z.
    let (y0, nmat) = if p.equalities.is_empty() {
        (DVector::zeros(m), None)
    } else {
        let q = p.equalities.len();
        let mut e = DMatrix::zeros(q, m);
        let mut beta = DVector::zeros(q);
        for (r, row) in p.equalities.iter().enumerate() {
            for &(i, v) in &row.coeffs {
                e[(r, i)] += v;
            }
            beta[r] = row.rhs;
        }
        let svd = e.clone().svd(true, true);
        let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
        let tol = 1e-11 * smax.max(1e-300) * (m.max(q) as f64);
        let y0 = svd
            .solve(&beta, tol)
            .map_err(|s| SolverError::Malformed(s.to_string()))?;
        if (&e * &y0 - &beta).norm() > 1e-8 * (1.0 + beta.norm()) {
            return Ok(failed_solution(Status::Infeasible, m, 0));
        }
        // Null space from the full right singular basis.
        let full = DMatrix::from_fn(m, m, |r, cc| if r == cc { 1.0 } else { 0.0 });
        let vt = svd.v_t.unwrap();
        let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
        // Project the identity off the row space.
        let row_space = vt.rows(0, rank).transpose();
        let proj = &full - &row_space * row_space.transpose();
        let eig = SymmetricEigen::new(proj);
        let cols: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        let n = DMatrix::from_fn(m, cols.len(), |r, cc| eig.eigenvectors[(r, cols[cc])]);
        (y0, Some(n))
    };
    let mz = nmat.as_ref().map_or(m, |n| n.ncols());
    let to_z = |coeffs: &[(usize, f64)]| -> (Vec<f64>, f64) {
        // returns coefficients in z and the constant contributed by y0
        let mut dense = vec![0.0; m];
        for &(i, v) in coeffs {
            dense[i] += v;
        }
        let konst: f64 = dense.iter().zip(y0.iter()).map(|(a, b)| a * b).sum();
        match &nmat {
            None => (dense, konst),
            Some(n) => {
                let d = DVector::from_vec(dense);
                (n.tr_mul(&d).iter().copied().collect(), konst)
            }
        }
    };

    // Assemble the cone problem in the z variables.
    let mut blocks = Vec::new();
    let mut cvec = Vec::new();
    let mut a: Vec<Vec<(usize, Part)>> = vec![Vec::new(); mz];
    let mut real_flags = Vec::new();
    for blk in &p.blocks {
        let d = blk.constant.nrows();
        let is_real = blk.constant.iter().all(|z| z.im.abs() <= REAL_TOL)
            && blk
                .coefficients
                .iter()
                .all(|(_, f)| f.iter().all(|z| z.im.abs() <= REAL_TOL));
        real_flags.push(is_real);
        let size = if is_real { d } else { 2 * d };
        // Effective constant G' = G - sum y0_i F_i, coefficients F'_j = sum_i N_ij F_i.
        let mut g = embed(&blk.constant, is_real);
        let embedded: Vec<(usize, DMatrix<f64>)> = blk
            .coefficients
            .iter()
            .map(|(i, f)| (*i, embed(f, is_real)))
            .collect();
        for (i, f) in &embedded {
            if y0[*i] != 0.0 {
                g -= f * y0[*i];
            }
        }
        let bi = blocks.len();
        blocks.push(BlockKind::Sdp(size));
        cvec.push(BlockVec::Sdp(-g));
        match &nmat {
            None => {
                let mut acc: Vec<Option<DMatrix<f64>>> = vec![None; m];
                for (i, f) in embedded {
                    match &mut acc[i] {
                        Some(x) => *x += f,
                        slot => *slot = Some(f),
                    }
                }
                for (i, f) in acc.into_iter().enumerate() {
                    if let Some(f) = f {
                        let t = upper_triplets(&(-f));
                        if !t.is_empty() {
                            a[i].push((bi, Part::Sdp(t)));
                        }
                    }
                }
            }
            Some(n) => {
                for j in 0..mz {
                    let mut acc = DMatrix::zeros(size, size);
                    for (i, f) in &embedded {
                        let w = n[(*i, j)];
                        if w != 0.0 {
                            acc -= f * w;
                        }
                    }
                    let t = upper_triplets(&acc);
                    if !t.is_empty() {
                        a[j].push((bi, Part::Sdp(t)));
                    }
                }
            }
        }
    }
    let nineq = p.inequalities.len();
    if nineq > 0 {
        let bi = blocks.len();
        blocks.push(BlockKind::Lp(nineq));
        let mut cl = DVector::zeros(nineq);
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mz];
        for (l, row) in p.inequalities.iter().enumerate() {
            let (coef, konst) = to_z(&row.coeffs);
            cl[l] = -(row.rhs - konst);
            for (j, v) in coef.into_iter().enumerate() {
                if v != 0.0 {
                    cols[j].push((l, -v));
                }
            }
        }
        cvec.push(BlockVec::Lp(cl));
        for (j, col) in cols.into_iter().enumerate() {
            if !col.is_empty() {
                a[j].push((bi, Part::Lp(col)));
            }
        }
    }
    let (cz, cconst) = to_z(
        &p.objective
            .iter()
            .enumerate()
            .map(|(i, v)| (i, *v))
            .collect::<Vec<_>>(),
    );
    let b = -DVector::from_vec(cz);
    let cone = ConeProblem {
        blocks,
        c: cvec,
        a,
        b,
    };
    let Some((cone, tmat)) = reduce_dependent(cone) else {
        return Ok(failed_solution(Status::Unbounded, m, 0));
    };
    if cone.blocks.is_empty() {
        // No constraints at all: bounded only if the objective vanishes.
        let status = if cone.b.norm() <= 1e-12 { Status::Optimal } else { Status::Unbounded };
        let mut sol = failed_solution(status, m, 0);
        if status == Status::Optimal {
            sol.primal = y0.iter().copied().collect();
            sol.value = cconst;
            sol.dual_value = cconst;
            sol.gap = 0.0;
            sol.primal_residual = 0.0;
            sol.dual_residual = 0.0;
        }
        return Ok(sol);
    }
    let res = ipm::solve(&cone, opts);

    let status = match res.status {
        ConeStatus::Optimal => Status::Optimal,
        ConeStatus::PrimalInfeasible => Status::Unbounded,
        ConeStatus::DualInfeasible => Status::Infeasible,
        ConeStatus::MaxIter => Status::MaxIter,
        ConeStatus::Breakdown => Status::NumericalBreakdown,
    };
    let w = res.y.clone();
    let z = match &tmat {
        Some(t) => t * w,
        None => w,
    };
    let y = match &nmat {
        Some(n) => &y0 + n * &z,
        None => &y0 + &z,
    };
    let mut dual = DualCertificate::default();
    let mut bi = 0;
    for &is_real in &real_flags {
        if let BlockVec::Sdp(x) = &res.x[bi] {
            dual.blocks.push(unembed(x, is_real));
        }
        bi += 1;
    }
    if nineq > 0 {
        if let BlockVec::Lp(x) = &res.x[bi] {
            dual.inequalities = x.iter().copied().collect();
        }
    }
    if !p.equalities.is_empty() {
        // Recover equality multipliers from stationarity by least squares.
        let mut resid = c.clone();
        for (blk, xb) in p.blocks.iter().zip(&dual.blocks) {
            for (i, f) in &blk.coefficients {
                resid[*i] -= crate::linalg::inner(f, xb);
            }
        }
        for (row, lam) in p.inequalities.iter().zip(&dual.inequalities) {
            for &(i, v) in &row.coeffs {
                resid[i] -= v * lam;
            }
        }
        let q = p.equalities.len();
        let mut et = DMatrix::zeros(m, q);
        for (r, row) in p.equalities.iter().enumerate() {
            for &(i, v) in &row.coeffs {
                et[(i, r)] += v;
            }
        }
        let mu = et
            .svd(true, true)
            .solve(&resid, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(q));
        dual.equalities = mu.iter().copied().collect();
    }
    let value = c.dot(&y);
    let dual_value = -res.pobj + cconst;
    Ok(Solution {
        status,
        value,
        dual_value,
        primal: y.iter().copied().collect(),
        dual,
        gap: (value - dual_value).abs(),
        primal_residual: res.dinf,
        dual_residual: res.pinf,
        iterations: res.iterations,
    })
}

/// Solves `min c'x  s.t.  Ax = b, x ≥ l`.
///
/// The dual certificate holds the equality multipliers `y` and the bound
/// multipliers (reduced costs) `c - A'y`.
pub fn solve_lp(p: &LinearProgram, opts: &SolverOptions) -> Result<Solution, SolverError> {
    p.validate()?;
    let n = p.objective.len();
    let rows = p.eq_rhs.len();
    // Column map: finite bound -> one shifted entry, free -> split pair.
    let mut cols: Vec<(usize, f64)> = Vec::new(); // (variable, sign)
    let mut shift = DVector::zeros(n);
    for j in 0..n {
        if p.lower[j].is_finite() {
            shift[j] = p.lower[j];
            cols.push((j, 1.0));
        } else {
            cols.push((j, 1.0));
            cols.push((j, -1.0));
        }
    }
    let nn = cols.len();
    let rhs = if rows > 0 {
        DVector::from_column_slice(&p.eq_rhs) - &p.eq_matrix * &shift
    } else {
        DVector::zeros(0)
    };
    let cl = DVector::from_iterator(nn, cols.iter().map(|&(j, s)| s * p.objective[j]));
    let a: Vec<Vec<(usize, Part)>> = (0..rows)
        .map(|r| {
            let e: Vec<(usize, f64)> = cols
                .iter()
                .enumerate()
                .map(|(k, &(j, s))| (k, s * p.eq_matrix[(r, j)]))
                .filter(|(_, v)| *v != 0.0)
                .collect();
            if e.is_empty() {
                vec![]
            } else {
                vec![(0, Part::Lp(e))]
            }
        })
        .collect();
    let const_obj: f64 = p.objective.iter().zip(shift.iter()).map(|(c, l)| c * l).sum();
    let cone = ConeProblem {
        blocks: vec![BlockKind::Lp(nn)],
        c: vec![BlockVec::Lp(cl)],
        a,
        b: rhs,
    };
    if nn == 0 {
        let mut sol = failed_solution(Status::Optimal, 0, 0);
        sol.value = 0.0;
        sol.dual_value = 0.0;
        sol.gap = 0.0;
        return Ok(sol);
    }
    let Some((cone, tmat)) = reduce_dependent(cone) else {
        return Ok(failed_solution(Status::Infeasible, n, 0));
    };
    let res = ipm::solve(&cone, opts);
    let status = match res.status {
        ConeStatus::Optimal => Status::Optimal,
        ConeStatus::PrimalInfeasible => Status::Infeasible,
        ConeStatus::DualInfeasible => Status::Unbounded,
        ConeStatus::MaxIter => Status::MaxIter,
        ConeStatus::Breakdown => Status::NumericalBreakdown,
    };
    let BlockVec::Lp(u) = &res.x[0] else { unreachable!() };
    let mut x = shift.clone();
    for (k, &(j, s)) in cols.iter().enumerate() {
        x[j] += s * u[k];
    }
    let yv = match &tmat {
        Some(t) => t * &res.y,
        None => res.y.clone(),
    };
    let reduced: Vec<f64> = (0..n)
        .map(|j| {
            let mut r = p.objective[j];
            for i in 0..rows {
                r -= p.eq_matrix[(i, j)] * yv[i];
            }
            r
        })
        .collect();
    let value = DVector::from_column_slice(&p.objective).dot(&x);
    let dual_value = res.dobj + const_obj;
    Ok(Solution {
        status,
        value,
        dual_value,
        primal: x.iter().copied().collect(),
        dual: DualCertificate {
            inequalities: reduced,
            equalities: yv.iter().copied().collect(),
            blocks: Vec::new(),
        },
        gap: (value - dual_value).abs(),
        primal_residual: res.pinf,
        dual_residual: res.dinf,
        iterations: res.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, herm_eigvals, identity};

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn lp_lower_bound() {
        let lp = LinearProgram {
            objective: vec![1.0],
            eq_matrix: DMatrix::zeros(0, 1),
            eq_rhs: vec![],
            lower: vec![1.0],
        };
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.value - 1.0).abs() < 1e-7);
        assert!(check_duality_gap(&s).unwrap() < 1e-6);
    }

    #[test]
    fn lp_with_free_variables_and_redundant_rows() {
        // min x + y s.t. x - y = 1 (twice), y >= 0, x free -> x=1, y=0
        let lp = LinearProgram {
            objective: vec![1.0, 1.0],
            eq_matrix: DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 2.0, -2.0]),
            eq_rhs: vec![1.0, 2.0],
            lower: vec![f64::NEG_INFINITY, 0.0],
        };
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.value - 1.0).abs() < 1e-6, "{}", s.value);
    }

    #[test]
    fn lp_infeasible_and_unbounded() {
        let lp = LinearProgram {
            objective: vec![1.0, 1.0],
            eq_matrix: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]),
            eq_rhs: vec![1.0, 3.0],
            lower: vec![0.0, 0.0],
        };
        assert_eq!(solve_lp(&lp, &opts()).unwrap().status, Status::Infeasible);
        let lp = LinearProgram {
            objective: vec![-1.0, 0.0],
            eq_matrix: DMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
            eq_rhs: vec![0.0],
            lower: vec![0.0, 0.0],
        };
        assert_eq!(solve_lp(&lp, &opts()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn sdp_largest_eigenvalue() {
        // min t s.t. t I - A ⪰ 0
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.5, -0.5), c64(0.5, 0.5), c64(-1.0, 0.0)],
        );
        let p = SdpProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: vec![PsdBlock {
                constant: a.clone(),
                coefficients: vec![(0, identity(2))],
            }],
            ..Default::default()
        };
        let s = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        let lmax = herm_eigvals(&a).unwrap()[0];
        assert!((s.value - lmax).abs() < 1e-6);
        assert!(s.dual_value <= s.value + 1e-9);
        // the dual block is a unit-trace PSD matrix supported on the top eigenvector
        let x = &s.dual.blocks[0];
        assert!((crate::linalg::trace(x).re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sdp_with_equalities() {
        // min y0 + y1 s.t. y0 - y1 = 0.5, diag(y0, y1) ⪰ 0 -> 0.5
        let e00 = ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(0., 0.)]);
        let e11 = ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 0.), c64(0., 0.), c64(1., 0.)]);
        let p = SdpProblem {
            num_vars: 2,
            objective: vec![1.0, 1.0],
            blocks: vec![PsdBlock {
                constant: ComplexMatrix::zeros(2, 2),
                coefficients: vec![(0, e00), (1, e11)],
            }],
            equalities: vec![AffineRow {
                coeffs: vec![(0, 1.0), (1, -1.0)],
                rhs: 0.5,
            }],
            ..Default::default()
        };
        let s = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.value - 0.5).abs() < 1e-6);
        assert!((s.primal[0] - 0.5).abs() < 1e-5 && s.primal[1].abs() < 1e-5);
    }

    #[test]
    fn sdp_infeasible_and_unbounded() {
        // y ⪰ 0 and -y - 1 ≥ 0: infeasible
        let p = SdpProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: vec![PsdBlock {
                constant: ComplexMatrix::zeros(1, 1),
                coefficients: vec![(0, identity(1))],
            }],
            inequalities: vec![AffineRow {
                coeffs: vec![(0, -1.0)],
                rhs: 1.0,
            }],
            ..Default::default()
        };
        assert_eq!(solve_sdp(&p, &opts()).unwrap().status, Status::Infeasible);
        // min -y s.t. y ⪰ 0: unbounded
        let p = SdpProblem {
            num_vars: 1,
            objective: vec![-1.0],
            blocks: vec![PsdBlock {
                constant: ComplexMatrix::zeros(1, 1),
                coefficients: vec![(0, identity(1))],
            }],
            ..Default::default()
        };
        assert_eq!(solve_sdp(&p, &opts()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn gap_of_unsolved_is_error() {
        let s = failed_solution(Status::MaxIter, 1, 200);
        assert_eq!(check_duality_gap(&s), Err(SolverError::NotSolved(Status::MaxIter)));
    }
}

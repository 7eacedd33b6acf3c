//! A small modeling layer over [`solve_sdp`](super::solve_sdp).
//!
//! Expressions are affine in the model's real variables: [`AffScalar`] for
//! real scalars and [`AffMat`] for complex matrices. Hermitian matrix
//! variables are parametrized in the orthonormal basis of
//! [`hermitian_basis`](crate::linalg::hermitian_basis).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{solve_sdp, AffineRow, PsdBlock, SdpProblem, Solution, SolverError, SolverOptions, Status};
use crate::linalg::{self, c64, hermitian_basis, hermitian_defect, ComplexMatrix, Subsystem};

/// Real affine expression `constant + sum_i coeff_i y_i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffScalar {
    terms: BTreeMap<usize, f64>,
    constant: f64,
}

impl AffScalar {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    fn var(i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(i, 1.0);
        Self { terms, constant: 0.0 }
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&i, &v)| (i, v * s)).collect(),
            constant: self.constant * s,
        }
    }

    fn add_scaled(&mut self, other: &AffScalar, s: f64) {
        for (&i, &v) in &other.terms {
            *self.terms.entry(i).or_insert(0.0) += s * v;
        }
        self.constant += s * other.constant;
    }

    /// Sum of a collection of expressions.
    pub fn sum<'a, I: IntoIterator<Item = &'a AffScalar>>(items: I) -> AffScalar {
        let mut out = AffScalar::default();
        for it in items {
            out.add_scaled(it, 1.0);
        }
        out
    }

    fn row(&self) -> AffineRow {
        AffineRow {
            coeffs: self
                .terms
                .iter()
                .filter(|(_, v)| **v != 0.0)
                .map(|(&i, &v)| (i, v))
                .collect(),
            rhs: -self.constant,
        }
    }
}

impl Add for AffScalar {
    type Output = AffScalar;
    fn add(mut self, rhs: AffScalar) -> AffScalar {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl Sub for AffScalar {
    type Output = AffScalar;
    fn sub(mut self, rhs: AffScalar) -> AffScalar {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Add<f64> for AffScalar {
    type Output = AffScalar;
    fn add(mut self, rhs: f64) -> AffScalar {
        self.constant += rhs;
        self
    }
}

impl Sub<f64> for AffScalar {
    type Output = AffScalar;
    fn sub(mut self, rhs: f64) -> AffScalar {
        self.constant -= rhs;
        self
    }
}

impl Mul<f64> for AffScalar {
    type Output = AffScalar;
    fn mul(self, rhs: f64) -> AffScalar {
        self.scale(rhs)
    }
}

impl Neg for AffScalar {
    type Output = AffScalar;
    fn neg(self) -> AffScalar {
        self.scale(-1.0)
    }
}

/// Complex-matrix-valued affine expression `C + sum_i y_i T_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffMat {
    rows: usize,
    cols: usize,
    constant: ComplexMatrix,
    terms: BTreeMap<usize, ComplexMatrix>,
}

impl AffMat {
    pub fn constant(m: ComplexMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            constant: m,
            terms: BTreeMap::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(ComplexMatrix::zeros(rows, cols))
    }

    /// `s · M` for a scalar expression `s` and a constant matrix `M`.
    pub fn from_scalar(s: &AffScalar, m: &ComplexMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            constant: m * c64(s.constant, 0.0),
            terms: s
                .terms
                .iter()
                .map(|(&i, &v)| (i, m * c64(v, 0.0)))
                .collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn map<F: Fn(&ComplexMatrix) -> ComplexMatrix>(&self, f: F) -> Self {
        let constant = f(&self.constant);
        Self {
            rows: constant.nrows(),
            cols: constant.ncols(),
            constant,
            terms: self.terms.iter().map(|(&i, m)| (i, f(m))).collect(),
        }
    }

    fn add_scaled(&mut self, other: &AffMat, s: Complex64) {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in affine sum");
        self.constant += &other.constant * s;
        for (&i, m) in &other.terms {
            match self.terms.get_mut(&i) {
                Some(t) => *t += m * s,
                None => {
                    self.terms.insert(i, m * s);
                }
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|m| m * c64(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        self.map(|m| m.adjoint())
    }

    /// `A · X`.
    pub fn left_mul(&self, a: &ComplexMatrix) -> Self {
        self.map(|m| a * m)
    }

    /// `X · B`.
    pub fn right_mul(&self, b: &ComplexMatrix) -> Self {
        self.map(|m| m * b)
    }

    /// `U X U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        let ud = u.adjoint();
        self.map(|m| u * m * &ud)
    }

    pub fn partial_transpose(&self, dims: (usize, usize), sys: Subsystem) -> Self {
        self.map(|m| linalg::partial_transpose(m, dims, sys).expect("dimension checked by caller"))
    }

    /// `Re Tr[X]`.
    pub fn trace_re(&self) -> AffScalar {
        AffScalar {
            terms: self
                .terms
                .iter()
                .map(|(&i, m)| (i, linalg::trace(m).re))
                .collect(),
            constant: linalg::trace(&self.constant).re,
        }
    }

    /// `Re Tr[H X]`.
    pub fn inner(&self, h: &ComplexMatrix) -> AffScalar {
        AffScalar {
            terms: self
                .terms
                .iter()
                .map(|(&i, m)| (i, linalg::inner(h, m)))
                .collect(),
            constant: linalg::inner(h, &self.constant),
        }
    }

    /// `[[a, b], [c, d]]`.
    pub fn block2(a: &AffMat, b: &AffMat, c: &AffMat, d: &AffMat) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let place = |out: &mut ComplexMatrix, m: &ComplexMatrix, r0: usize, c0: usize| {
            out.view_mut((r0, c0), m.shape()).copy_from(m);
        };
        let mut constant = ComplexMatrix::zeros(rows, cols);
        place(&mut constant, &a.constant, 0, 0);
        place(&mut constant, &b.constant, 0, a.cols);
        place(&mut constant, &c.constant, a.rows, 0);
        place(&mut constant, &d.constant, a.rows, a.cols);
        let mut terms: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
        for (src, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for (&i, m) in &src.terms {
                let t = terms
                    .entry(i)
                    .or_insert_with(|| ComplexMatrix::zeros(rows, cols));
                place(t, m, r0, c0);
            }
        }
        Self {
            rows,
            cols,
            constant,
            terms,
        }
    }

    /// Value at a given variable assignment.
    pub fn evaluate(&self, y: &[f64]) -> ComplexMatrix {
        let mut out = self.constant.clone();
        for (&i, m) in &self.terms {
            out += m * c64(y[i], 0.0);
        }
        out
    }
}

impl Add for AffMat {
    type Output = AffMat;
    fn add(mut self, rhs: AffMat) -> AffMat {
        self.add_scaled(&rhs, c64(1.0, 0.0));
        self
    }
}

impl Sub for AffMat {
    type Output = AffMat;
    fn sub(mut self, rhs: AffMat) -> AffMat {
        self.add_scaled(&rhs, c64(-1.0, 0.0));
        self
    }
}

impl Add<&ComplexMatrix> for AffMat {
    type Output = AffMat;
    fn add(mut self, rhs: &ComplexMatrix) -> AffMat {
        self.constant += rhs;
        self
    }
}

impl Sub<&ComplexMatrix> for AffMat {
    type Output = AffMat;
    fn sub(mut self, rhs: &ComplexMatrix) -> AffMat {
        self.constant -= rhs;
        self
    }
}

impl Mul<f64> for AffMat {
    type Output = AffMat;
    fn mul(self, rhs: f64) -> AffMat {
        self.scale(rhs)
    }
}

impl Neg for AffMat {
    type Output = AffMat;
    fn neg(self) -> AffMat {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsdId(usize);
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IneqId(usize);
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqId(usize);

#[derive(Debug, Clone, Default)]
pub struct Model {
    num_vars: usize,
    objective: AffScalar,
    maximize: bool,
    psd: Vec<AffMat>,
    ineq: Vec<AffScalar>,
    eq: Vec<AffScalar>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn scalar(&mut self) -> AffScalar {
        self.num_vars += 1;
        AffScalar::var(self.num_vars - 1)
    }

    /// A free Hermitian `d × d` matrix variable (`d²` real parameters).
    pub fn hermitian(&mut self, d: usize) -> AffMat {
        let mut terms = BTreeMap::new();
        for b in hermitian_basis(d) {
            terms.insert(self.num_vars, b);
            self.num_vars += 1;
        }
        AffMat {
            rows: d,
            cols: d,
            constant: ComplexMatrix::zeros(d, d),
            terms,
        }
    }

    /// A free complex `rows × cols` matrix variable (`2·rows·cols` parameters).
    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> AffMat {
        let mut terms = BTreeMap::new();
        for r in 0..rows {
            for c in 0..cols {
                for unit in [c64(1.0, 0.0), c64(0.0, 1.0)] {
                    let mut e = ComplexMatrix::zeros(rows, cols);
                    e[(r, c)] = unit;
                    terms.insert(self.num_vars, e);
                    self.num_vars += 1;
                }
            }
        }
        AffMat {
            rows,
            cols,
            constant: ComplexMatrix::zeros(rows, cols),
            terms,
        }
    }

    /// Requires `e ⪰ 0`. The expression must be square and Hermitian.
    pub fn psd(&mut self, e: AffMat) -> PsdId {
        self.psd.push(e);
        PsdId(self.psd.len() - 1)
    }

    /// Requires `e ≥ 0`.
    pub fn nonneg(&mut self, e: AffScalar) -> IneqId {
        self.ineq.push(e);
        IneqId(self.ineq.len() - 1)
    }

    /// Requires `e = 0`.
    pub fn eq(&mut self, e: AffScalar) -> EqId {
        self.eq.push(e);
        EqId(self.eq.len() - 1)
    }

    pub fn minimize(&mut self, e: AffScalar) {
        self.objective = e;
        self.maximize = false;
    }

    pub fn maximize(&mut self, e: AffScalar) {
        self.objective = e;
        self.maximize = true;
    }

    /// The problem in solver form (always a minimization).
    pub fn to_problem(&self) -> Result<SdpProblem, SolverError> {
        let sign = if self.maximize { -1.0 } else { 1.0 };
        let mut objective = vec![0.0; self.num_vars];
        for (&i, &v) in &self.objective.terms {
            objective[i] = sign * v;
        }
        let mut blocks = Vec::with_capacity(self.psd.len());
        for (bi, e) in self.psd.iter().enumerate() {
            if e.rows != e.cols {
                return Err(SolverError::Malformed(format!("PSD constraint {bi} is not square")));
            }
            let tol = 1e-10;
            if hermitian_defect(&e.constant) > tol
                || e.terms.values().any(|m| hermitian_defect(m) > tol)
            {
                return Err(SolverError::Malformed(format!("PSD constraint {bi} is not Hermitian")));
            }
            blocks.push(PsdBlock {
                constant: -linalg::hermitian_part(&e.constant),
                coefficients: e
                    .terms
                    .iter()
                    .filter(|(_, m)| m.iter().any(|z| *z != c64(0.0, 0.0)))
                    .map(|(&i, m)| (i, linalg::hermitian_part(m)))
                    .collect(),
            });
        }
        Ok(SdpProblem {
            num_vars: self.num_vars,
            objective,
            blocks,
            inequalities: self.ineq.iter().map(|e| e.row()).collect(),
            equalities: self.eq.iter().map(|e| e.row()).collect(),
        })
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<ModelSolution, SolverError> {
        let problem = self.to_problem()?;
        let solution = solve_sdp(&problem, opts)?;
        let sign = if self.maximize { -1.0 } else { 1.0 };
        Ok(ModelSolution {
            status: solution.status,
            value: sign * solution.value + self.objective.constant,
            dual_value: sign * solution.dual_value + self.objective.constant,
            solution,
        })
    }
}

/// Result of [`Model::solve`]. Values are in the model's own sense
/// (maximization problems report the maximum).
#[derive(Debug, Clone)]
pub struct ModelSolution {
    pub status: Status,
    pub value: f64,
    pub dual_value: f64,
    pub solution: Solution,
}

impl ModelSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn gap(&self) -> f64 {
        (self.value - self.dual_value).abs()
    }

    pub fn value_of(&self, e: &AffScalar) -> f64 {
        e.constant
            + e.terms
                .iter()
                .map(|(&i, &v)| v * self.solution.primal[i])
                .sum::<f64>()
    }

    pub fn matrix_of(&self, e: &AffMat) -> ComplexMatrix {
        e.evaluate(&self.solution.primal)
    }

    /// Dual PSD matrix of a constraint (multiplier of the minimization form).
    pub fn psd_dual(&self, id: PsdId) -> &ComplexMatrix {
        &self.solution.dual.blocks[id.0]
    }

    pub fn ineq_dual(&self, id: IneqId) -> f64 {
        self.solution.dual.inequalities[id.0]
    }

    pub fn eq_dual(&self, id: EqId) -> f64 {
        self.solution.dual.equalities[id.0]
    }
}

//! One-shot resource measures over a free set.
//!
//! Every measure is computed by a single convex program over the free set
//! (or an exact vertex scan where linearity allows it). Values are in bits.

use thiserror::Error;

use crate::convex::{AffMat, AffScalar, Model, ModelSolution, SolverError, SolverOptions, Status};
use crate::linalg::{
    self, c64, herm_eig, identity, pauli_string, ComplexMatrix, DensityMatrix, LinalgError,
    DEFAULT_RANK_TOL,
};
use crate::sets::{ConeRule, FreeSet, FreeSetKind, SetsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("free set has no elements")]
    EmptySet,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("solver did not converge ({0:?})")]
    Solver(Status),
    #[error("robustness is zero; the complement state is undefined")]
    NoComplement,
    #[error("reference ladder is empty")]
    EmptyLadder,
    #[error(transparent)]
    Malformed(#[from] SolverError),
    #[error(transparent)]
    Sets(#[from] SetsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

/// A measure value: finite bits or a tagged divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    /// The smoothing ball contains a free state.
    Contained,
    /// The program certified that the value diverges.
    Infinite,
}

#[derive(Debug, Clone)]
pub struct MeasureValue {
    pub value: Value,
    /// Optimal free state, or the optimal smoothed state for smoothed measures.
    pub witness_state: Option<DensityMatrix>,
    /// Optimal test `P`, witness `W`, or affine point `σ`, depending on the measure.
    pub witness_operator: Option<ComplexMatrix>,
    /// For robustness measures: the state `σ*` completing the decomposition.
    pub complement: Option<DensityMatrix>,
    /// Robustness-type coefficient (`t` for D_max, `1 + s` for D_s).
    pub scale: Option<f64>,
    pub dual_gap: f64,
    pub flag: Option<Flag>,
}

impl MeasureValue {
    fn finite(bits: f64) -> Self {
        Self {
            value: Value::Finite(bits.max(0.0)),
            witness_state: None,
            witness_operator: None,
            complement: None,
            scale: None,
            dual_gap: 0.0,
            flag: None,
        }
    }

    fn infinite() -> Self {
        Self {
            value: Value::Infinite,
            flag: Some(Flag::Infinite),
            ..Self::finite(0.0)
        }
    }

    /// Bits, with `f64::INFINITY` standing in for a tagged divergence.
    pub fn bits(&self) -> f64 {
        match self.value {
            Value::Finite(b) => b,
            Value::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == Value::Infinite
    }

    /// The complement state, or `NoComplement` when the robustness vanishes.
    pub fn require_complement(&self) -> Result<&DensityMatrix> {
        self.complement.as_ref().ok_or(MeasureError::NoComplement)
    }
}

/// Primal and dual values of the distillation-fidelity program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFidelity {
    pub primal: f64,
    pub dual: f64,
}

impl GFidelity {
    pub fn gap(&self) -> f64 {
        (self.primal - self.dual).abs()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    pub solver: SolverOptions,
    /// Eigenvalues at or below this count as zero when forming supports.
    pub rank_tol: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::precise(),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Tolerance used when comparing a measure against ladder rates.
const LADDER_TOL: f64 = 1e-6;

struct Support {
    /// Eigenvectors spanning the support, as columns.
    v: ComplexMatrix,
    /// Matching eigenvalues as a diagonal matrix.
    diag: ComplexMatrix,
    /// Orthonormal kernel basis, as columns.
    kernel: ComplexMatrix,
    projector: ComplexMatrix,
}

fn support(rho: &DensityMatrix, tol: f64) -> Result<Support> {
    let (vals, vecs) = herm_eig(rho.matrix())?;
    let d = rho.dim();
    let keep: Vec<usize> = (0..d).filter(|&k| vals[k] > tol).collect();
    let drop: Vec<usize> = (0..d).filter(|&k| vals[k] <= tol).collect();
    let mut v = ComplexMatrix::zeros(d, keep.len());
    let mut diag = ComplexMatrix::zeros(keep.len(), keep.len());
    for (j, &k) in keep.iter().enumerate() {
        v.set_column(j, &vecs.column(k));
        diag[(j, j)] = c64(vals[k], 0.0);
    }
    let mut kernel = ComplexMatrix::zeros(d, drop.len());
    for (j, &k) in drop.iter().enumerate() {
        kernel.set_column(j, &vecs.column(k));
    }
    let projector = &v * v.adjoint();
    Ok(Support {
        v,
        diag,
        kernel,
        projector,
    })
}

fn check_dims(rho: &DensityMatrix, set: &FreeSet) -> Result<()> {
    if rho.dim() != set.dim() {
        return Err(MeasureError::DimensionMismatch(format!(
            "state has dimension {}, free set {} has dimension {}",
            rho.dim(),
            set.label(),
            set.dim()
        )));
    }
    match set.kind() {
        FreeSetKind::VertexHull(v) | FreeSetKind::SdpCone(ConeRule::Generated(v)) if v.is_empty() => {
            Err(MeasureError::EmptySet)
        }
        _ => Ok(()),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(MeasureError::InvalidParameter(format!("epsilon {eps} not in [0,1)")));
    }
    Ok(())
}

fn optimal(sol: ModelSolution) -> Result<ModelSolution> {
    if sol.is_optimal() {
        Ok(sol)
    } else {
        Err(MeasureError::Solver(sol.status))
    }
}

/// Normalizes a cone element into a state. `None` if it is (numerically) zero.
fn normalize(m: &ComplexMatrix) -> Option<DensityMatrix> {
    let tr = linalg::trace(m).re;
    if tr <= 1e-12 {
        return None;
    }
    DensityMatrix::from_numerical(&m.unscale(tr)).ok()
}

fn scalar_identity(t: &AffScalar, d: usize) -> AffMat {
    AffMat::from_scalar(t, &identity(d))
}

/// Generators of the free cone when it is polyhedral.
fn generators(set: &FreeSet) -> Option<Vec<ComplexMatrix>> {
    match set.kind() {
        FreeSetKind::VertexHull(v) | FreeSetKind::SdpCone(ConeRule::Generated(v)) => {
            Some(v.iter().map(|s| s.matrix().clone()).collect())
        }
        FreeSetKind::SdpCone(ConeRule::Diagonal) => Some(
            (0..set.dim())
                .map(|i| {
                    let mut e = ComplexMatrix::zeros(set.dim(), set.dim());
                    e[(i, i)] = c64(1.0, 0.0);
                    e
                })
                .collect(),
        ),
        FreeSetKind::SdpCone(ConeRule::Ppt { .. }) => None,
    }
}

/// A trace-one variable ranging over the affine hull of the set.
fn affine_state(model: &mut Model, set: &FreeSet) -> AffMat {
    let mut x = AffMat::constant(set.affine_base().matrix().clone());
    for b in set.affine_basis() {
        x = x + AffMat::from_scalar(&model.scalar(), b);
    }
    x
}

/// `ρ − base` has a component outside the affine directions.
fn outside_affine_hull(rho: &DensityMatrix, set: &FreeSet) -> bool {
    let mut r = rho.matrix() - set.affine_base().matrix();
    for b in set.affine_basis() {
        let c = linalg::inner(b, &r);
        r -= b * c64(c, 0.0);
    }
    r.norm() > 1e-8
}

/// Measure evaluator with fixed numerical options.
#[derive(Debug, Clone, Copy, Default)]
pub struct Evaluator {
    pub options: MeasureOptions,
}

impl Evaluator {
    pub fn new(options: MeasureOptions) -> Self {
        Self { options }
    }

    fn solve(&self, model: &Model) -> Result<ModelSolution> {
        Ok(model.solve(&self.options.solver)?)
    }

    pub fn d_min(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
        check_dims(rho, set)?;
        let sup = support(rho, self.options.rank_tol)?;
        if let FreeSetKind::VertexHull(vs) = set.kind() {
            // linear in σ, so the optimum sits on a vertex
            let (best, overlap) = vs
                .iter()
                .map(|v| linalg::inner(&sup.projector, v.matrix()))
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, o)| if o > acc.1 { (i, o) } else { acc });
            if overlap <= 1e-14 {
                return Ok(MeasureValue::infinite());
            }
            let mut out = MeasureValue::finite(-overlap.min(1.0).log2());
            out.witness_state = Some(vs[best].clone());
            out.witness_operator = Some(sup.projector);
            return Ok(out);
        }
        let d = set.dim();
        let mut model = Model::new();
        let t = model.scalar();
        let e = scalar_identity(&t, d) - &sup.projector;
        let handle = set.constrain_dual_cone(&mut model, &e);
        model.minimize(t);
        let sol = optimal(self.solve(&model)?)?;
        if sol.value <= 1e-12 {
            return Ok(MeasureValue::infinite());
        }
        let mut out = MeasureValue::finite(-sol.value.min(1.0).log2());
        out.witness_state = normalize(&handle.value(&sol));
        out.witness_operator = Some(sup.projector);
        out.dual_gap = sol.gap();
        Ok(out)
    }

    /// Max-relative entropy. Vertex hulls are solved through the witness
    /// form `max Tr[ρW]` over `W ⪰ 0, I − W ∈ cone(F)*`; cone sets through
    /// `min Tr S` over `S ⪰ ρ, S ∈ cone(F)`.
    pub fn d_max(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
        check_dims(rho, set)?;
        let d = set.dim();
        let mut model = Model::new();
        let (t, sigma, w, gap) = match set.kind() {
            FreeSetKind::VertexHull(_) => {
                let w = model.hermitian(d);
                model.psd(w.clone());
                let e = AffMat::constant(identity(d)) - w.clone();
                let handle = set.constrain_dual_cone(&mut model, &e);
                model.maximize(w.inner(rho.matrix()));
                let sol = self.solve(&model)?;
                if sol.status == Status::Unbounded {
                    return Ok(MeasureValue::infinite());
                }
                let sol = optimal(sol)?;
                (sol.value, handle.value(&sol), Some(sol.matrix_of(&w)), sol.gap())
            }
            FreeSetKind::SdpCone(_) => {
                let s = set.cone_variable(&mut model);
                model.psd(s.clone() - rho.matrix());
                model.minimize(s.trace_re());
                let sol = self.solve(&model)?;
                if sol.status == Status::Infeasible {
                    return Ok(MeasureValue::infinite());
                }
                let sol = optimal(sol)?;
                (sol.value, sol.matrix_of(&s), None, sol.gap())
            }
        };
        let t = t.max(1.0);
        let mut out = MeasureValue::finite(t.log2());
        out.witness_state = normalize(&sigma);
        out.witness_operator = w;
        out.scale = Some(t);
        out.dual_gap = gap;
        if t > 1.0 + 1e-9 {
            if let Some(s) = &out.witness_state {
                out.complement = normalize(&(s.matrix() * c64(t, 0.0) - rho.matrix()));
            }
        }
        Ok(out)
    }

    /// Standard robustness `log(1 + s)` with `ρ = (1+s)σ − sτ`, `σ, τ ∈ F`.
    pub fn d_s(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
        check_dims(rho, set)?;
        let d = set.dim();
        let mut model = Model::new();
        let (total, sigma, tau, w, gap) = match set.kind() {
            FreeSetKind::VertexHull(vs) => {
                if outside_affine_hull(rho, set) {
                    return Ok(MeasureValue::infinite());
                }
                // W ranges over span(F); other directions are invisible to ρ
                let w = if set.is_full_dimensional() {
                    model.hermitian(d)
                } else {
                    let mut w = AffMat::from_scalar(&model.scalar(), set.affine_base().matrix());
                    for b in set.affine_basis() {
                        w = w + AffMat::from_scalar(&model.scalar(), b);
                    }
                    w
                };
                let mut lower = Vec::with_capacity(vs.len());
                let mut upper = Vec::with_capacity(vs.len());
                for v in vs {
                    let tv = w.inner(v.matrix());
                    lower.push(model.nonneg(tv.clone()));
                    upper.push(model.nonneg(-tv + 1.0));
                }
                model.maximize(w.inner(rho.matrix()));
                let sol = self.solve(&model)?;
                if sol.status == Status::Unbounded {
                    return Ok(MeasureValue::infinite());
                }
                let sol = optimal(sol)?;
                let mut plus = ComplexMatrix::zeros(d, d);
                let mut minus = ComplexMatrix::zeros(d, d);
                for (v, (lo, up)) in vs.iter().zip(lower.iter().zip(&upper)) {
                    plus += v.matrix() * c64(sol.ineq_dual(*up).max(0.0), 0.0);
                    minus += v.matrix() * c64(sol.ineq_dual(*lo).max(0.0), 0.0);
                }
                (sol.value, plus, minus, Some(sol.matrix_of(&w)), sol.gap())
            }
            FreeSetKind::SdpCone(_) => {
                let s = set.cone_variable(&mut model);
                let diff = s.clone() - rho.matrix();
                set.constrain_cone(&mut model, &diff);
                model.minimize(s.trace_re());
                let sol = self.solve(&model)?;
                if sol.status == Status::Infeasible {
                    return Ok(MeasureValue::infinite());
                }
                let sol = optimal(sol)?;
                let sm = sol.matrix_of(&s);
                let tm = &sm - rho.matrix();
                (sol.value, sm, tm, None, sol.gap())
            }
        };
        let total = total.max(1.0);
        let mut out = MeasureValue::finite(total.log2());
        out.witness_state = normalize(&sigma);
        out.witness_operator = w;
        out.scale = Some(total);
        out.dual_gap = gap;
        if total > 1.0 + 1e-9 {
            out.complement = normalize(&tau);
        }
        Ok(out)
    }

    /// Hypothesis-testing measure. The infimum over `σ ∈ F` and the
    /// supremum over tests are exchanged (the objective is bilinear and
    /// both sets are convex and compact), giving one minimization of `t`
    /// with `Tr[Pσ] ≤ t` imposed through the dual cone.
    pub fn d_h(&self, rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
        check_dims(rho, set)?;
        check_eps(eps)?;
        let d = set.dim();
        let mut model = Model::new();
        let p = if eps == 0.0 {
            // Tr[Pρ] = 1 pins P to the support; only the kernel block is free
            let sup = support(rho, self.options.rank_tol)?;
            let k = sup.kernel.ncols();
            let mut p = AffMat::constant(sup.projector.clone());
            if k > 0 {
                let q = model.hermitian(k);
                model.psd(q.clone());
                model.psd(AffMat::constant(identity(k)) - q.clone());
                p = p + q.conjugate_by(&sup.kernel);
            }
            p
        } else {
            let p = model.hermitian(d);
            model.psd(p.clone());
            model.psd(AffMat::constant(identity(d)) - p.clone());
            model.nonneg(p.inner(rho.matrix()) - (1.0 - eps));
            p
        };
        let t = model.scalar();
        let e = scalar_identity(&t, d) - p.clone();
        let handle = set.constrain_dual_cone(&mut model, &e);
        model.minimize(t);
        let sol = optimal(self.solve(&model)?)?;
        if sol.value <= 1e-12 {
            return Ok(MeasureValue::infinite());
        }
        let mut out = MeasureValue::finite(-sol.value.min(1.0).log2());
        out.witness_state = normalize(&handle.value(&sol));
        out.witness_operator = Some(sol.matrix_of(&p));
        out.dual_gap = sol.gap();
        Ok(out)
    }

    pub fn d_min_aff(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
        self.d_h_aff(rho, set, 0.0)
    }

    /// Hypothesis testing against the affine hull. The inner minimization
    /// over tests is replaced by its dual, so the whole quantity is a single
    /// maximization over the affine parameters of `σ`.
    pub fn d_h_aff(&self, rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
        check_dims(rho, set)?;
        check_eps(eps)?;
        let d = set.dim();
        if eps == 0.0 && set.is_full_dimensional() {
            let mut out = MeasureValue::finite(0.0);
            out.witness_operator = Some(rho.matrix().clone());
            return Ok(out);
        }
        let mut model = Model::new();
        let mut sigma = AffMat::constant(set.affine_base().matrix().clone());
        for b in set.affine_basis() {
            sigma = sigma + AffMat::from_scalar(&model.scalar(), b);
        }
        if eps == 0.0 {
            let sup = support(rho, self.options.rank_tol)?;
            let k = sup.kernel.ncols();
            if k == 0 {
                return Ok(MeasureValue::finite(0.0));
            }
            let y = model.hermitian(k);
            model.psd(y.clone());
            model.psd(sigma.conjugate_by(&sup.kernel.adjoint()) + y.clone());
            model.maximize(sigma.inner(&sup.projector) - y.trace_re());
        } else {
            let y = model.scalar();
            model.nonneg(y.clone());
            let big_y = model.hermitian(d);
            model.psd(big_y.clone());
            model.psd(sigma.clone() + big_y.clone() - AffMat::from_scalar(&y, rho.matrix()));
            model.maximize(y * (1.0 - eps) - big_y.trace_re());
        }
        let sol = optimal(self.solve(&model)?)?;
        let mut out = if sol.value <= 1e-12 {
            MeasureValue::infinite()
        } else {
            MeasureValue::finite(-sol.value.min(1.0).log2())
        };
        out.witness_operator = Some(sol.matrix_of(&sigma));
        out.dual_gap = sol.gap();
        Ok(out)
    }

    /// `max_{σ∈F} √F(ρ, σ)` and the maximizer.
    pub fn max_root_fidelity(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<(f64, Option<DensityMatrix>)> {
        check_dims(rho, set)?;
        let sup = support(rho, self.options.rank_tol)?;
        let mut model = Model::new();
        let sigma = set.cone_variable(&mut model);
        model.eq(sigma.trace_re() - 1.0);
        let x = fidelity_block(&mut model, &sup, &sigma);
        model.maximize(x);
        let sol = optimal(self.solve(&model)?)?;
        Ok((sol.value.min(1.0), normalize(&sol.matrix_of(&sigma))))
    }

    pub fn d_max_smooth(&self, rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
        self.smoothed(rho, set, eps, false)
    }

    pub fn d_s_smooth(&self, rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
        self.smoothed(rho, set, eps, true)
    }

    fn smoothed(&self, rho: &DensityMatrix, set: &FreeSet, eps: f64, standard: bool) -> Result<MeasureValue> {
        check_dims(rho, set)?;
        check_eps(eps)?;
        if eps == 0.0 {
            return if standard { self.d_s(rho, set) } else { self.d_max(rho, set) };
        }
        let target = (1.0 - eps).sqrt();
        let (best, sigma) = self.max_root_fidelity(rho, set)?;
        if best >= target - 1e-9 {
            let mut out = MeasureValue::finite(0.0);
            out.witness_state = sigma;
            out.flag = Some(Flag::Contained);
            return Ok(out);
        }
        let d = set.dim();
        let sup = support(rho, self.options.rank_tol)?;
        // a standard decomposition forces the smoothed state into aff(F)
        let affine = standard && !set.is_full_dimensional();
        if affine {
            let mut model = Model::new();
            let smooth = affine_state(&mut model, set);
            model.psd(smooth.clone());
            let x = fidelity_block(&mut model, &sup, &smooth);
            model.maximize(x);
            let sol = optimal(self.solve(&model)?)?;
            if sol.value < target - 1e-7 {
                return Ok(MeasureValue::infinite());
            }
        }
        let mut model = Model::new();
        let smooth = if affine {
            affine_state(&mut model, set)
        } else {
            let h = model.hermitian(d);
            model.eq(h.trace_re() - 1.0);
            h
        };
        model.psd(smooth.clone());
        let x = fidelity_block(&mut model, &sup, &smooth);
        model.nonneg(x - target);
        let s = set.cone_variable(&mut model);
        let diff = s.clone() - smooth.clone();
        if standard {
            set.constrain_cone(&mut model, &diff);
        } else {
            model.psd(diff);
        }
        model.minimize(s.trace_re());
        let sol = self.solve(&model)?;
        if sol.status == Status::Infeasible {
            return Ok(MeasureValue::infinite());
        }
        let sol = optimal(sol)?;
        let t = sol.value.max(1.0);
        let mut out = MeasureValue::finite(t.log2());
        out.witness_state = DensityMatrix::from_numerical(&sol.matrix_of(&smooth)).ok();
        out.scale = Some(t);
        out.dual_gap = sol.gap();
        Ok(out)
    }

    /// Largest `w` with `ρ = wσ + (1 − w)τ`, `σ ∈ F`, `τ` any state.
    pub fn weight(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<f64> {
        check_dims(rho, set)?;
        let sup = support(rho, self.options.rank_tol)?;
        let r = sup.v.ncols();
        let vd = sup.v.adjoint();
        let mut model = Model::new();
        // the free part must live on the support of ρ
        let part = match generators(set) {
            Some(gens) => {
                let mut part = AffMat::zeros(r, r);
                let mut any = false;
                for g in gens {
                    if linalg::trace(&g).re - linalg::inner(&sup.projector, &g) > 1e-8 {
                        continue;
                    }
                    let lam = model.scalar();
                    model.nonneg(lam.clone());
                    part = part + AffMat::from_scalar(&lam, &(&vd * &g * &sup.v));
                    any = true;
                }
                if !any {
                    return Ok(0.0);
                }
                part
            }
            None => {
                let FreeSetKind::SdpCone(ConeRule::Ppt { dims }) = set.kind() else {
                    unreachable!("non-polyhedral sets are PPT cones");
                };
                let q = model.hermitian(r);
                model.psd(q.clone());
                model.psd(q.conjugate_by(&sup.v).partial_transpose(*dims, linalg::Subsystem::B));
                q
            }
        };
        model.psd(AffMat::constant(sup.diag.clone()) - part.clone());
        model.maximize(part.trace_re());
        let sol = optimal(self.solve(&model)?)?;
        Ok(sol.value.clamp(0.0, 1.0))
    }

    /// `min_{σ∈F} ½‖ρ − σ‖₁`.
    pub fn r_tr(&self, rho: &DensityMatrix, set: &FreeSet) -> Result<f64> {
        check_dims(rho, set)?;
        let d = set.dim();
        let mut model = Model::new();
        let sigma = set.cone_variable(&mut model);
        model.eq(sigma.trace_re() - 1.0);
        let y = model.hermitian(d);
        model.psd(y.clone());
        model.psd(y.clone() + sigma - rho.matrix());
        model.minimize(y.trace_re());
        let sol = optimal(self.solve(&model)?)?;
        Ok(sol.value.max(0.0))
    }

    /// Optimal fidelity of a test that accepts every free state with
    /// probability at most `1/K`, computed in both primal and dual form.
    pub fn g_fidelity(&self, rho: &DensityMatrix, set: &FreeSet, k: f64) -> Result<GFidelity> {
        check_dims(rho, set)?;
        if !(k >= 1.0) || !k.is_finite() {
            return Err(MeasureError::InvalidParameter(format!("K = {k} must be ≥ 1")));
        }
        let d = set.dim();

        let mut primal = Model::new();
        let w = primal.hermitian(d);
        primal.psd(w.clone());
        primal.psd(AffMat::constant(identity(d)) - w.clone());
        let e = AffMat::constant(identity(d).unscale(k)) - w.clone();
        set.constrain_dual_cone(&mut primal, &e);
        primal.maximize(w.inner(rho.matrix()));
        let p = optimal(self.solve(&primal)?)?;

        let mut dual = Model::new();
        let z = set.cone_variable(&mut dual);
        let y = dual.hermitian(d);
        dual.psd(y.clone());
        dual.psd(y.clone() + z.clone() - rho.matrix());
        dual.minimize(y.trace_re() + z.trace_re() * (1.0 / k));
        let q = optimal(self.solve(&dual)?)?;

        Ok(GFidelity {
            primal: p.value,
            dual: q.value,
        })
    }

    /// Largest ladder rate not exceeding the hypothesis-testing measure
    /// (`d_h` for full-dimensional sets, `d_h_aff` otherwise). Returns 0
    /// when no rate qualifies.
    pub fn one_shot_yield(&self, rho: &DensityMatrix, set: &FreeSet, ladder: &[f64], eps: f64) -> Result<f64> {
        check_ladder(ladder)?;
        let m = if set.is_full_dimensional() {
            self.d_h(rho, set, eps)?
        } else {
            self.d_h_aff(rho, set, eps)?
        };
        let v = m.bits();
        Ok(ladder
            .iter()
            .copied()
            .filter(|&r| r <= v + LADDER_TOL)
            .last()
            .unwrap_or(0.0))
    }

    /// Smallest ladder rate not below the smoothed robustness
    /// (`d_s_smooth` for full-dimensional sets, `d_max_smooth` otherwise).
    /// Returns `f64::INFINITY` when the ladder tops out below it.
    pub fn one_shot_cost(&self, rho: &DensityMatrix, set: &FreeSet, ladder: &[f64], eps: f64) -> Result<f64> {
        check_ladder(ladder)?;
        let m = if set.is_full_dimensional() {
            self.d_s_smooth(rho, set, eps)?
        } else {
            self.d_max_smooth(rho, set, eps)?
        };
        let v = m.bits();
        Ok(ladder
            .iter()
            .copied()
            .find(|&r| r >= v - LADDER_TOL)
            .unwrap_or(f64::INFINITY))
    }
}

/// Adds `X` with `[[D, X†], [X, ρ′]] ⪰ 0` on the support of `ρ` and
/// returns `Re Tr[X V†]`, whose maximum is `√F(ρ, ρ′)`.
fn fidelity_block(model: &mut Model, sup: &Support, other: &AffMat) -> AffScalar {
    let d = sup.v.nrows();
    let r = sup.v.ncols();
    let x = model.complex_matrix(d, r);
    let block = AffMat::block2(&AffMat::constant(sup.diag.clone()), &x.adjoint(), &x, other);
    model.psd(block);
    x.right_mul(&sup.v.adjoint()).trace_re()
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(MeasureError::EmptyLadder);
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MeasureError::InvalidParameter("ladder rates must increase strictly".into()));
    }
    Ok(())
}

/// `(1/2ⁿ) Σ_P |Tr(A P)|` over the `4ⁿ` Pauli strings.
pub fn stab_norm(a: &ComplexMatrix, n: usize) -> Result<f64> {
    let d = 1usize << n;
    if a.nrows() != d || a.ncols() != d {
        return Err(MeasureError::DimensionMismatch(format!(
            "{}x{} operator for {n} qubits",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut total = 0.0;
    for idx in 0..d * d {
        let p = pauli_string(n, idx)?;
        total += linalg::trace(&(a * p)).norm();
    }
    Ok(total / d as f64)
}

pub fn d_min(rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
    Evaluator::default().d_min(rho, set)
}

pub fn d_max(rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
    Evaluator::default().d_max(rho, set)
}

pub fn d_s(rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
    Evaluator::default().d_s(rho, set)
}

pub fn d_h(rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
    Evaluator::default().d_h(rho, set, eps)
}

pub fn d_max_smooth(rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
    Evaluator::default().d_max_smooth(rho, set, eps)
}

pub fn d_s_smooth(rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
    Evaluator::default().d_s_smooth(rho, set, eps)
}

pub fn d_min_aff(rho: &DensityMatrix, set: &FreeSet) -> Result<MeasureValue> {
    Evaluator::default().d_min_aff(rho, set)
}

pub fn d_h_aff(rho: &DensityMatrix, set: &FreeSet, eps: f64) -> Result<MeasureValue> {
    Evaluator::default().d_h_aff(rho, set, eps)
}

pub fn weight(rho: &DensityMatrix, set: &FreeSet) -> Result<f64> {
    Evaluator::default().weight(rho, set)
}

pub fn r_tr(rho: &DensityMatrix, set: &FreeSet) -> Result<f64> {
    Evaluator::default().r_tr(rho, set)
}

pub fn g_fidelity(rho: &DensityMatrix, set: &FreeSet, k: f64) -> Result<GFidelity> {
    Evaluator::default().g_fidelity(rho, set, k)
}

pub fn one_shot_yield(rho: &DensityMatrix, set: &FreeSet, ladder: &[f64], eps: f64) -> Result<f64> {
    Evaluator::default().one_shot_yield(rho, set, ladder, eps)
}

pub fn one_shot_cost(rho: &DensityMatrix, set: &FreeSet, ladder: &[f64], eps: f64) -> Result<f64> {
    Evaluator::default().one_shot_cost(rho, set, ladder, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{
        coherence_set, complement, face_state, max_coherent_pure, named_state, norrell_pure,
        ppt_set, stabilizer_states, stabilizer_states_qutrit, strange_pure, t_qutrit_pure,
    };

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn strange_collapse() {
        let f = stabilizer_states_qutrit(1).unwrap();
        let s = strange_pure().density();
        let a = d_min(&s, &f).unwrap().bits();
        let b = d_max(&s, &f).unwrap().bits();
        let c = d_s(&s, &f).unwrap().bits();
        assert!(close(a, 1.0, 1e-9), "{a}");
        assert!(close(b, 1.0, 1e-6), "{b}");
        assert!(close(c, 1.0, 1e-6), "{c}");
    }

    #[test]
    fn face_values() {
        let f = stabilizer_states(1).unwrap();
        let rho = face_state();
        let a = d_min(&rho, &f).unwrap().bits();
        let c = d_s(&rho, &f).unwrap().bits();
        let b = d_max(&rho, &f).unwrap().bits();
        let dmin = -((1.0 + 1.0 / 3f64.sqrt()) / 2.0).log2();
        let ds = ((1.0 + 3f64.sqrt()) / 2.0).log2();
        assert!(close(a, dmin, 1e-9), "{a}");
        assert!(close(c, ds, 1e-6), "{c}");
        assert!(c - b >= 1e-3, "{b} {c}");
    }

    #[test]
    fn bell_ppt_and_free_states() {
        let f = ppt_set(2, 2).unwrap();
        let bell = named_state("bell2").unwrap();
        assert!(close(d_max(&bell, &f).unwrap().bits(), 1.0, 1e-6));
        let mm = DensityMatrix::maximally_mixed(4);
        assert!(d_max(&mm, &f).unwrap().bits() < 1e-6);
        assert!(d_min(&mm, &f).unwrap().bits() < 1e-6);
    }

    #[test]
    fn hypothesis_testing() {
        let f = stabilizer_states_qutrit(1).unwrap();
        let s = strange_pure().density();
        assert!(close(d_h(&s, &f, 0.0).unwrap().bits(), 1.0, 1e-6));
        let v = d_h(&s, &f, 0.2).unwrap().bits();
        assert!(close(v, 1.0 + (1.0f64 / 0.8).log2(), 1e-6), "{v}");
    }

    #[test]
    fn affine_and_coherence() {
        let f = coherence_set(2).unwrap();
        let phi = max_coherent_pure(2).density();
        let v = d_min_aff(&phi, &f).unwrap().bits();
        assert!(close(v, 1.0, 1e-6), "{v}");
        let zero = DensityMatrix::new(linalg::ket_bra(
            crate::linalg::PureState::basis(2, 0).unwrap().amplitudes(),
            crate::linalg::PureState::basis(2, 0).unwrap().amplitudes(),
        ))
        .unwrap();
        assert!(d_min_aff(&zero, &f).unwrap().bits() < 1e-6);
        let magic = stabilizer_states(1).unwrap();
        assert_eq!(d_min_aff(&face_state(), &magic).unwrap().bits(), 0.0);
    }

    #[test]
    fn weights_and_distances() {
        let f = stabilizer_states_qutrit(1).unwrap();
        let s = strange_pure();
        assert!(close(weight(&complement(&s), &f).unwrap(), 1.0, 1e-6));
        assert!(weight(&complement(&t_qutrit_pure()), &f).unwrap() < 1e-6);
        assert!(close(r_tr(&s.density(), &f).unwrap(), 0.5, 1e-6));
        assert!(close(r_tr(&norrell_pure().density(), &f).unwrap(), 1.0 / 3.0, 1e-6));
    }

    #[test]
    fn smoothed_strange() {
        let f = stabilizer_states_qutrit(1).unwrap();
        let s = strange_pure().density();
        let eps: f64 = 0.3;
        let expect = (1.0 - (1.0 / (1.0 - eps)).log2()).max(0.0);
        let a = d_max_smooth(&s, &f, eps).unwrap().bits();
        let b = d_s_smooth(&s, &f, eps).unwrap().bits();
        assert!(close(a, expect, 1e-5), "{a} {expect}");
        assert!(close(b, expect, 1e-5), "{b} {expect}");
        let c = d_max_smooth(&s, &f, 0.6).unwrap();
        assert_eq!(c.flag, Some(Flag::Contained));
    }

    #[test]
    fn stab_norms() {
        assert!(close(stab_norm(&identity(2).unscale(2.0), 1).unwrap(), 0.5, 1e-12));
        let p = crate::linalg::PureState::basis(2, 0).unwrap().projector();
        assert!(close(stab_norm(&p, 1).unwrap(), 1.0, 1e-12));
        assert!(stab_norm(&p, 2).is_err());
    }

    #[test]
    fn g_fidelity_values() {
        let f = stabilizer_states_qutrit(1).unwrap();
        let g = g_fidelity(&strange_pure().density(), &f, 2.0).unwrap();
        assert!(close(g.primal, 1.0, 1e-6) && g.gap() < 1e-6, "{g:?}");
        let free = DensityMatrix::maximally_mixed(3);
        let g = g_fidelity(&free, &f, 4.0).unwrap();
        assert!(close(g.primal, 0.25, 1e-6) && g.gap() < 1e-6, "{g:?}");
    }

    #[test]
    fn ladder() {
        let f = stabilizer_states_qutrit(1).unwrap();
        let s = strange_pure().density();
        let ladder = [1.0, 2.0, 3.0];
        assert_eq!(one_shot_yield(&s, &f, &ladder, 0.0).unwrap(), 1.0);
        assert_eq!(one_shot_cost(&s, &f, &ladder, 0.0).unwrap(), 1.0);
        assert_eq!(one_shot_yield(&s, &f, &[], 0.0), Err(MeasureError::EmptyLadder));
    }
}

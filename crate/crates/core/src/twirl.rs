//! Free channels that stabilize a reference state: the measure-and-prepare
//! map built from measure witnesses, finite-group twirls, and the concrete
//! dephasing constructions for the catalog magic states.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    self, c64, clock, identity, kron, kron_all, unitarity_defect, weyl_operator, ComplexMatrix,
    DensityMatrix, LinalgError, PureState, DEFAULT_RANK_TOL,
};
use crate::measures::{Evaluator, MeasureError};
use crate::sets::{self, ConeRule, FreeSet, FreeSetKind, SetsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwirlError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("robustness is zero; no complement state exists")]
    NoComplement,
    #[error("state is not an eigenvector (sine distance {0:.3e})")]
    NotEigenvector(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("no catalog entry {0:?}")]
    CatalogMiss(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Sets(#[from] SetsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, TwirlError>;

/// A quantum channel on density matrices of a fixed dimension.
pub trait Channel {
    fn dim(&self) -> usize;

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;

    /// Whether the channel maps the free set into itself.
    fn verify_free(&self, set: &FreeSet) -> Result<FreenessReport> {
        check_dim(self.dim(), set.dim())?;
        let (points, confidence) = test_points(set)?;
        let mut images = Vec::with_capacity(points.len());
        for p in &points {
            images.push(self.apply(p)?);
        }
        check_images(set, &images, confidence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Every extreme point of the set was checked.
    Exact,
    /// The set has no finite vertex list; a fixed sample was checked.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreenessReport {
    pub free: bool,
    pub worst_violation: f64,
    pub confidence: Confidence,
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(TwirlError::DimensionMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}

/// States whose images decide freeness. For hulls these are the vertices,
/// which suffices because channels are linear.
fn test_points(set: &FreeSet) -> Result<(Vec<DensityMatrix>, Confidence)> {
    let d = set.dim();
    Ok(match set.kind() {
        FreeSetKind::VertexHull(v) | FreeSetKind::SdpCone(ConeRule::Generated(v)) => {
            (v.clone(), Confidence::Exact)
        }
        FreeSetKind::SdpCone(ConeRule::Diagonal) => (
            (0..d)
                .map(|k| PureState::basis(d, k).map(|p| p.density()))
                .collect::<std::result::Result<_, _>>()?,
            Confidence::Exact,
        ),
        FreeSetKind::SdpCone(ConeRule::Ppt { dims }) => {
            let local = |n: usize| -> Result<Vec<PureState>> {
                let mut out = Vec::new();
                for k in 0..n {
                    out.push(PureState::basis(n, k)?);
                }
                for k in 0..n {
                    let amps: Vec<Complex64> = (0..n)
                        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / n as f64))
                        .collect();
                    out.push(PureState::from_slice(&amps)?);
                }
                Ok(out)
            };
            let mut pts = vec![DensityMatrix::maximally_mixed(d)];
            for a in local(dims.0)? {
                for b in local(dims.1)? {
                    pts.push(a.kron(&b).density());
                }
            }
            (pts, Confidence::Sampled)
        }
    })
}

fn check_images(set: &FreeSet, images: &[DensityMatrix], confidence: Confidence) -> Result<FreenessReport> {
    let mut worst: f64 = 0.0;
    let mut free = true;
    for img in images {
        let m = set.membership(img)?;
        worst = worst.max(m.violation);
        free &= m.member;
    }
    Ok(FreenessReport {
        free,
        worst_violation: worst,
        confidence,
    })
}

/// `Λ(ρ) = Tr[P*ρ] Φ + Tr[(I − P*)ρ] σ*`.
#[derive(Debug, Clone)]
pub struct TwirlChannel {
    pub p_star: ComplexMatrix,
    pub phi: DensityMatrix,
    pub sigma_star: DensityMatrix,
}

const CHANNEL_TOL: f64 = 1e-8;

impl TwirlChannel {
    pub fn new(p_star: ComplexMatrix, phi: DensityMatrix, sigma_star: DensityMatrix) -> Result<Self> {
        let d = phi.dim();
        check_dim(p_star.nrows(), d)?;
        check_dim(sigma_star.dim(), d)?;
        let eig = linalg::herm_eigvals(&p_star)?;
        if eig[0] > 1.0 + CHANNEL_TOL || eig[d - 1] < -CHANNEL_TOL {
            return Err(TwirlError::PreconditionFailed("effect outside [0, I]".into()));
        }
        let checks = [
            ("Tr[P Φ]", 1.0 - phi.overlap(&p_star)),
            ("Tr[P σ*]", sigma_star.overlap(&p_star)),
            ("Tr[Φ σ*]", sigma_star.overlap(phi.matrix())),
        ];
        for (name, defect) in checks {
            if defect > CHANNEL_TOL {
                return Err(TwirlError::PreconditionFailed(format!("{name} off by {defect:.3e}")));
            }
        }
        Ok(Self {
            p_star,
            phi,
            sigma_star,
        })
    }

    /// Replaces `σ*` by its average under an ensemble that fixes `Φ` and the
    /// effect. The complement is generally not unique; averaging over a free
    /// symmetry group of `Φ` picks the invariant one and keeps the channel free.
    pub fn symmetrized(&self, ensemble: &UnitaryEnsemble) -> Result<Self> {
        check_dim(ensemble.dim(), self.dim())?;
        for u in &ensemble.unitaries {
            let ud = u.adjoint();
            let moved = (u * self.phi.matrix() * &ud - self.phi.matrix()).norm()
                + (u * &self.p_star * &ud - &self.p_star).norm();
            if moved > CHANNEL_TOL {
                return Err(TwirlError::PreconditionFailed(format!(
                    "ensemble member moves the reference state by {moved:.3e}"
                )));
            }
        }
        let sigma = twirl_average(ensemble, &self.sigma_star)?;
        Self::new(self.p_star.clone(), self.phi.clone(), sigma)
    }

    /// Weight placed on `Φ` for input `ρ`.
    fn coefficient(&self, rho: &DensityMatrix) -> f64 {
        rho.overlap(&self.p_star)
    }
}

impl Channel for TwirlChannel {
    fn dim(&self) -> usize {
        self.phi.dim()
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(rho.dim(), self.dim())?;
        let a = self.coefficient(rho);
        let out = self.phi.matrix() * c64(a, 0.0) + self.sigma_star.matrix() * c64(1.0 - a, 0.0);
        Ok(DensityMatrix::from_numerical(&out)?)
    }

    /// Images lie on the segment from `σ*` to `Φ`, so only the two extreme
    /// images need a membership test.
    fn verify_free(&self, set: &FreeSet) -> Result<FreenessReport> {
        check_dim(self.dim(), set.dim())?;
        let (points, confidence) = test_points(set)?;
        let coeffs: Vec<f64> = points.iter().map(|p| self.coefficient(p)).collect();
        let lo = coeffs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = coeffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let at = |a: f64| {
            DensityMatrix::from_numerical(
                &(self.phi.matrix() * c64(a, 0.0) + self.sigma_star.matrix() * c64(1.0 - a, 0.0)),
            )
        };
        check_images(set, &[at(lo)?, at(hi)?], confidence)
    }
}

pub fn apply_channel(c: &TwirlChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    c.apply(rho)
}

/// Builds the measure-and-prepare channel from measure witnesses. For a
/// full-dimensional set this needs `D_min(Φ) = D_s(Φ)`; otherwise
/// `D_min,aff(Φ) = D_max(Φ)`. The effect is the support projector of `Φ`
/// and `σ*` is the robustness complement.
pub fn measure_prepare_channel(phi: &DensityMatrix, set: &FreeSet, ev: &Evaluator) -> Result<TwirlChannel> {
    let (low, high, names) = if set.is_full_dimensional() {
        (ev.d_min(phi, set)?, ev.d_s(phi, set)?, ("d_min", "d_s"))
    } else {
        (ev.d_min_aff(phi, set)?, ev.d_max(phi, set)?, ("d_min_aff", "d_max"))
    };
    let gap = (low.bits() - high.bits()).abs();
    if !(gap <= 1e-5) {
        return Err(TwirlError::PreconditionFailed(format!(
            "{} = {} but {} = {}",
            names.0,
            low.bits(),
            names.1,
            high.bits()
        )));
    }
    let complement = high.complement.as_ref().ok_or(TwirlError::NoComplement)?;
    let p = linalg::support_projector(phi, DEFAULT_RANK_TOL);
    let leak = complement.overlap(&p);
    if leak > 1e-6 {
        return Err(TwirlError::PreconditionFailed(format!(
            "complement overlaps the support by {leak:.3e}"
        )));
    }
    // strip the solver-level leakage so the channel identities hold exactly
    let q = identity(phi.dim()) - &p;
    let cleaned = DensityMatrix::from_numerical(&(&q * complement.matrix() * &q))?;
    TwirlChannel::new(p, phi.clone(), cleaned)
}

/// A finite weighted set of unitaries.
#[derive(Debug, Clone)]
pub struct UnitaryEnsemble {
    pub unitaries: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

impl UnitaryEnsemble {
    pub fn new(unitaries: Vec<ComplexMatrix>, weights: Vec<f64>) -> Result<Self> {
        let d = unitaries
            .first()
            .ok_or_else(|| TwirlError::InvalidEnsemble("no unitaries".into()))?
            .nrows();
        if unitaries.len() != weights.len() {
            return Err(TwirlError::InvalidEnsemble("one weight per unitary".into()));
        }
        for (i, u) in unitaries.iter().enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(TwirlError::DimensionMismatch(format!("member {i}")));
            }
            let defect = unitarity_defect(u);
            if defect > 1e-10 {
                return Err(TwirlError::InvalidEnsemble(format!("member {i} off unitary by {defect:.3e}")));
            }
        }
        if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(TwirlError::InvalidEnsemble("weights are not a distribution".into()));
        }
        Ok(Self { unitaries, weights })
    }

    pub fn uniform(unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let n = unitaries.len().max(1);
        Self::new(unitaries, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    /// The product ensemble acting on two tensor factors.
    pub fn tensor(&self, other: &UnitaryEnsemble) -> Result<Self> {
        let mut us = Vec::with_capacity(self.len() * other.len());
        let mut ws = Vec::with_capacity(self.len() * other.len());
        for (a, wa) in self.unitaries.iter().zip(&self.weights) {
            for (b, wb) in other.unitaries.iter().zip(&other.weights) {
                us.push(kron(a, b));
                ws.push(wa * wb);
            }
        }
        Self::new(us, ws)
    }
}

impl Channel for UnitaryEnsemble {
    fn dim(&self) -> usize {
        self.unitaries[0].nrows()
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        twirl_average(self, rho)
    }

    /// If every member permutes the vertices the average is free outright;
    /// otherwise the averaged images are tested.
    fn verify_free(&self, set: &FreeSet) -> Result<FreenessReport> {
        check_dim(self.dim(), set.dim())?;
        if let Some(vs) = set.vertices() {
            let index: HashSet<Vec<i64>> = vs.iter().map(|v| matrix_key(v.matrix())).collect();
            let permutes = self.unitaries.iter().all(|u| {
                let ud = u.adjoint();
                vs.iter().all(|v| index.contains(&matrix_key(&(u * v.matrix() * &ud))))
            });
            if permutes {
                return Ok(FreenessReport {
                    free: true,
                    worst_violation: 0.0,
                    confidence: Confidence::Exact,
                });
            }
        }
        let (points, confidence) = test_points(set)?;
        let mut images = Vec::with_capacity(points.len());
        for p in &points {
            images.push(self.apply(p)?);
        }
        check_images(set, &images, confidence)
    }
}

/// `Σ_g w_g U_g ρ U_g†`.
pub fn twirl_average(e: &UnitaryEnsemble, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim(rho.dim(), e.dim())?;
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (u, &w) in e.unitaries.iter().zip(&e.weights) {
        out += u * rho.matrix() * u.adjoint() * c64(w, 0.0);
    }
    Ok(DensityMatrix::from_numerical(&out)?)
}

const KEY_SCALE: f64 = 1e6;

fn matrix_key(m: &ComplexMatrix) -> Vec<i64> {
    m.iter()
        .flat_map(|z| [(z.re * KEY_SCALE).round() as i64, (z.im * KEY_SCALE).round() as i64])
        .collect()
}

/// Rotates the first largest-magnitude entry onto the positive real axis.
fn canonical_phase(u: &ComplexMatrix) -> ComplexMatrix {
    let max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = u
        .iter()
        .find(|z| z.norm() >= max - 1e-6)
        .copied()
        .unwrap_or(c64(1.0, 0.0));
    u * (pivot.conj() / pivot.norm())
}

/// A finite unitary group modulo global phase.
#[derive(Debug, Clone)]
pub struct GroupClosure {
    pub elements: Vec<ComplexMatrix>,
    pub generator_labels: Vec<String>,
    /// The cap was reached before the closure completed.
    pub capped: bool,
}

impl GroupClosure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ensemble(&self) -> Result<UnitaryEnsemble> {
        UnitaryEnsemble::uniform(self.elements.clone())
    }
}

pub const DEFAULT_GROUP_CAP: usize = 20_000;

/// Breadth-first product closure of the generators, deduplicated up to phase.
pub fn group_closure(generators: &[ComplexMatrix], cap: usize) -> Result<GroupClosure> {
    let d = generators
        .first()
        .ok_or_else(|| TwirlError::InvalidEnsemble("no generators".into()))?
        .nrows();
    for (i, g) in generators.iter().enumerate() {
        if g.nrows() != d || unitarity_defect(g) > 1e-10 {
            return Err(TwirlError::InvalidEnsemble(format!("generator {i} is not a {d}x{d} unitary")));
        }
    }
    let start = identity(d);
    let mut seen = HashSet::new();
    seen.insert(matrix_key(&canonical_phase(&start)));
    let mut elements = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    let mut capped = false;
    'bfs: while let Some(u) = queue.pop_front() {
        for g in generators {
            let next = canonical_phase(&(g * &u));
            if seen.insert(matrix_key(&next)) {
                if elements.len() >= cap {
                    capped = true;
                    break 'bfs;
                }
                elements.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(GroupClosure {
        elements,
        generator_labels: (0..generators.len()).map(|i| format!("g{i}")).collect(),
        capped,
    })
}

/// Whether `Φ` spans the joint eigenspace of the unitaries, each taken at
/// the eigenvalue it has on `Φ`.
pub fn eigenvector_uniqueness(unitaries: &[ComplexMatrix], phi: &PureState) -> Result<bool> {
    let d = phi.dim();
    let v = phi.amplitudes();
    let mut basis = identity(d);
    for u in unitaries {
        check_dim(u.nrows(), d)?;
        let uv = u * v;
        let lambda = v.dotc(&uv);
        let sine = (&uv - v * lambda).norm();
        if sine > 1e-8 {
            return Err(TwirlError::NotEigenvector(sine));
        }
        // restrict the current subspace to the kernel of U − λ
        let shifted = (u - identity(d) * lambda) * &basis;
        let m = basis.ncols();
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let keep: Vec<usize> = (0..m).filter(|&i| svd.singular_values[i] <= 1e-8).collect();
        let mut null = ComplexMatrix::zeros(m, keep.len());
        for (j, &i) in keep.iter().enumerate() {
            null.set_column(j, &vt.row(i).adjoint());
        }
        basis = &basis * null;
        if basis.ncols() == 0 {
            break;
        }
    }
    Ok(basis.ncols() == 1)
}

// ---------------------------------------------------------------------------
// Catalog constructions

/// `K = S·H`, which cycles the Pauli axes.
pub fn face_clifford() -> ComplexMatrix {
    sets::phase_s() * sets::hadamard()
}

/// Uniform average over `{I, K, K²}`.
pub fn face_ensemble() -> Result<UnitaryEnsemble> {
    let k = face_clifford();
    UnitaryEnsemble::uniform(vec![identity(2), k.clone(), &k * &k])
}

fn omega8(p: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * p as f64 / 8.0)
}

fn scaled(rows: &[[(f64, f64); 8]; 8], factor: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |i, j| c64(rows[i][j].0, rows[i][j].1) * factor)
}

/// The order-7 Clifford stabilizing the Hoggar state.
pub fn hoggar_u7() -> ComplexMatrix {
    const O: (f64, f64) = (0., 0.);
    const P: (f64, f64) = (1., 0.);
    const M: (f64, f64) = (-1., 0.);
    const I: (f64, f64) = (0., 1.);
    const J: (f64, f64) = (0., -1.);
    let rows = [
        [O, O, P, O, J, O, O, O],
        [O, O, I, O, M, O, O, O],
        [O, O, O, J, O, M, O, O],
        [O, O, O, M, O, J, O, O],
        [P, O, O, O, O, O, J, O],
        [J, O, O, O, O, O, P, O],
        [O, J, O, O, O, O, O, M],
        [O, P, O, O, O, O, O, I],
    ];
    scaled(&rows, omega8(5) * FRAC_1_SQRT_2)
}

/// The order-12 Clifford stabilizing the Hoggar state.
pub fn hoggar_u12() -> ComplexMatrix {
    const O: (f64, f64) = (0., 0.);
    const P: (f64, f64) = (1., 0.);
    const M: (f64, f64) = (-1., 0.);
    const I: (f64, f64) = (0., 1.);
    const J: (f64, f64) = (0., -1.);
    let rows = [
        [O, O, O, O, P, I, O, O],
        [O, O, O, O, M, I, O, O],
        [P, J, O, O, O, O, O, O],
        [M, J, O, O, O, O, O, O],
        [O, O, P, I, O, O, O, O],
        [O, O, M, I, O, O, O, O],
        [O, O, O, O, O, O, P, J],
        [O, O, O, O, O, O, M, J],
    ];
    scaled(&rows, omega8(3) * FRAC_1_SQRT_2)
}

pub fn hoggar_group(cap: usize) -> Result<GroupClosure> {
    let mut g = group_closure(&[hoggar_u7(), hoggar_u12()], cap)?;
    g.generator_labels = vec!["U7".into(), "U12".into()];
    Ok(g)
}

/// Weyl operator `D_k` on a qutrit.
fn weyl3(k: (usize, usize)) -> ComplexMatrix {
    weyl_operator(3, k.0, k.1).expect("qutrit indices are in range")
}

/// Displacement `τ^{k₁k₂} X^{k₁} Z^{k₂}` with `τ = −e^{iπ/3}`. Symplectic
/// Cliffords permute these without picking up phases.
fn displacement3(k: (usize, usize)) -> ComplexMatrix {
    let tau = Complex64::from_polar(-1.0, PI / 3.0);
    linalg::shift(3).pow(k.0 as u32) * clock(3).pow(k.1 as u32) * tau.powu((k.0 * k.1) as u32)
}

/// The qutrit Cliffords fixing `|S⟩` and permuting the displacement
/// operators exactly; one per element of SL(2, Z₃).
pub fn sl2z3_cliffords() -> Result<Vec<ComplexMatrix>> {
    let group = group_closure(
        &[sets::qutrit_fourier(), sets::qutrit_phase(), linalg::shift(3)],
        DEFAULT_GROUP_CAP,
    )?;
    let labels: Vec<(usize, usize)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
    let ops: Vec<ComplexMatrix> = labels.iter().map(|&k| displacement3(k)).collect();
    let s = sets::strange_pure();
    let mut out = Vec::new();
    for u in &group.elements {
        let us = u * s.amplitudes();
        if (1.0 - s.amplitudes().dotc(&us).norm()).abs() > 1e-8 {
            continue;
        }
        let ud = u.adjoint();
        let exact = ops.iter().all(|d| {
            let img = u * d * &ud;
            ops.iter().any(|w| (&img - w).norm() < 1e-8)
        });
        if exact {
            out.push(u.clone());
        }
    }
    Ok(out)
}

/// The informationally complete family `D_k |S⟩⟨S| D_k†`.
pub fn strange_sic_projector(k: (usize, usize)) -> DensityMatrix {
    let s = sets::strange_pure().density();
    let d = weyl3(k);
    DensityMatrix::from_numerical(&(&d * s.matrix() * d.adjoint())).expect("conjugated projector")
}

/// Third-level unitaries in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagicGate {
    /// `diag(1, e^{iπ/4})`.
    QubitT,
    /// `diag(e^{2πi/9}, 1, e^{−2πi/9})`.
    QutritT,
    /// Three-qubit Toffoli.
    Toffoli,
}

impl MagicGate {
    pub fn parse(label: &str) -> Result<Self> {
        match label.trim().to_ascii_lowercase().as_str() {
            "t" | "qubit_t" => Ok(Self::QubitT),
            "t3" | "qutrit_t" | "t_qutrit" => Ok(Self::QutritT),
            "toffoli" | "ccz" => Ok(Self::Toffoli),
            _ => Err(TwirlError::CatalogMiss(label.to_string())),
        }
    }

    /// `(local dimension, number of sites)`.
    pub fn shape(self) -> (usize, usize) {
        match self {
            Self::QubitT => (2, 1),
            Self::QutritT => (3, 1),
            Self::Toffoli => (2, 3),
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Self::QubitT => {
                let mut t = identity(2);
                t[(1, 1)] = Complex64::from_polar(1.0, PI / 4.0);
                t
            }
            Self::QutritT => {
                let mut t = identity(3);
                t[(0, 0)] = Complex64::from_polar(1.0, 2.0 * PI / 9.0);
                t[(2, 2)] = Complex64::from_polar(1.0, -2.0 * PI / 9.0);
                t
            }
            Self::Toffoli => {
                let mut t = identity(8);
                t[(6, 6)] = c64(0.0, 0.0);
                t[(7, 7)] = c64(0.0, 0.0);
                t[(6, 7)] = c64(1.0, 0.0);
                t[(7, 6)] = c64(1.0, 0.0);
                t
            }
        }
    }
}

/// Stabilizer inputs `U|0…0⟩` in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizerInput {
    Zero,
    /// The Fourier (Hadamard) image of `|0⟩` on every site.
    Plus,
}

impl StabilizerInput {
    fn clifford(self, d: usize, t: usize) -> ComplexMatrix {
        let local = match (self, d) {
            (Self::Zero, _) => identity(d),
            (Self::Plus, 2) => sets::hadamard(),
            (Self::Plus, _) => sets::qutrit_fourier(),
        };
        kron_all(std::iter::repeat_n(&local, t))
    }
}

/// Dephasing ensemble for `|ψ⟩ = V U |0…0⟩`: the uniform average of
/// `Π_k W_{j_k k}` with `W_{jk} = (VU) Z_k^j (VU)†`, which are Clifford
/// because `V` is third-level. Returns the ensemble and `|ψ⟩`.
pub fn clifford_magic_dephasing(gate: MagicGate, input: StabilizerInput) -> Result<(UnitaryEnsemble, PureState)> {
    let (d, t) = gate.shape();
    let vu = gate.matrix() * input.clifford(d, t);
    let vud = vu.adjoint();
    let z = clock(d);
    let site_z = |k: usize, j: usize| -> ComplexMatrix {
        let mut zj = identity(d);
        for _ in 0..j {
            zj = &zj * &z;
        }
        let factors: Vec<ComplexMatrix> = (0..t).map(|s| if s == k { zj.clone() } else { identity(d) }).collect();
        kron_all(factors.iter())
    };
    let mut members = Vec::with_capacity(d.pow(t as u32));
    for idx in 0..d.pow(t as u32) {
        let mut prod = identity(d.pow(t as u32));
        let mut r = idx;
        for k in 0..t {
            let j = r % d;
            r /= d;
            prod = prod * site_z(k, j);
        }
        members.push(&vu * prod * &vud);
    }
    let zero = PureState::basis(d.pow(t as u32), 0)?;
    let psi = zero.apply(&vu)?;
    Ok((UnitaryEnsemble::uniform(members)?, psi))
}

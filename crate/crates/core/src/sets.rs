//! Free sets and the catalog of named resource states.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::convex::builder::{IneqId, PsdId};
use crate::convex::{AffMat, Model, ModelSolution, SolverOptions};
use crate::linalg::{
    self, c64, hermitian_basis, hermitian_coords, hermitian_from_coords, identity, kron_all,
    min_eigenvalue, partial_transpose, ComplexMatrix, DensityMatrix, LinalgError, PureState,
    Subsystem,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetsError {
    #[error("{0} is out of the supported range")]
    OutOfRange(String),
    #[error("unknown state label {0:?}")]
    UnknownLabel(String),
    #[error("reference and complement overlap by {0:.3e}")]
    NotOrthogonal(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Membership rule of a free set given implicitly by convex constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeRule {
    /// PSD, unit trace, PSD partial transpose on `dA ⊗ dB`.
    Ppt { dims: (usize, usize) },
    /// PSD, unit trace, diagonal in the computational basis.
    Diagonal,
    /// Convex hull of the given states, written as a lifted cone
    /// `{sum_i λ_i g_i : λ ≥ 0}` rather than by vertex enumeration.
    Generated(Vec<DensityMatrix>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FreeSetKind {
    VertexHull(Vec<DensityMatrix>),
    SdpCone(ConeRule),
}

/// A convex set of free states on `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSet {
    kind: FreeSetKind,
    label: String,
    dim: usize,
    affine_base: DensityMatrix,
    affine_basis: Vec<ComplexMatrix>,
}

/// Handle on the multiplier of a dual-cone constraint.
#[derive(Debug, Clone)]
pub enum ConeMultiplier {
    Rows(Vec<IneqId>, Vec<ComplexMatrix>),
    Psd(PsdId),
}

impl ConeMultiplier {
    /// The multiplier as an element of `cone(F)`.
    pub fn value(&self, sol: &ModelSolution) -> ComplexMatrix {
        match self {
            ConeMultiplier::Rows(ids, gens) => {
                let d = gens.first().map_or(0, |g| g.nrows());
                let mut out = ComplexMatrix::zeros(d, d);
                for (id, g) in ids.iter().zip(gens) {
                    out += g * c64(sol.ineq_dual(*id).max(0.0), 0.0);
                }
                out
            }
            ConeMultiplier::Psd(id) => linalg::hermitian_part(sol.psd_dual(*id)),
        }
    }
}

/// Outcome of a membership test.
#[derive(Debug, Clone)]
pub struct Membership {
    pub member: bool,
    /// Amount by which the state escapes the set (zero for members).
    pub violation: f64,
    /// On exclusion: `W` with `Tr[Wρ] > max_{σ∈F} Tr[Wσ]`.
    pub witness: Option<ComplexMatrix>,
}

const RANK_TOL: f64 = 1e-8;
const MEMBER_TOL: f64 = 1e-7;

/// Orthonormal basis of the span of the given traceless directions.
fn gram_schmidt(dirs: impl Iterator<Item = Vec<f64>>, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in dirs {
        if basis.len() == dim {
            break;
        }
        let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let p: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > RANK_TOL * n0.max(1.0) {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

fn traceless_basis(d: usize) -> Vec<ComplexMatrix> {
    let centre = identity(d).unscale(d as f64);
    let dirs = hermitian_basis(d)
        .into_iter()
        .map(|b| hermitian_coords(&(b.clone() - &centre * linalg::trace(&b))));
    gram_schmidt(dirs, d * d - 1)
        .into_iter()
        .map(|v| hermitian_from_coords(d, &v))
        .collect()
}

impl FreeSet {
    /// Convex hull of explicit vertices. The affine hull is computed by
    /// Gram–Schmidt on vertex differences.
    pub fn vertex_hull(vertices: Vec<DensityMatrix>, label: &str) -> Result<Self, SetsError> {
        let dim = vertices
            .first()
            .ok_or_else(|| SetsError::OutOfRange("empty vertex list".into()))?
            .dim();
        if vertices.iter().any(|v| v.dim() != dim) {
            return Err(LinalgError::DimensionMismatch("vertices of unequal dimension".into()).into());
        }
        let base = centroid(&vertices);
        let b0 = hermitian_coords(base.matrix());
        let dirs = vertices.iter().map(|v| {
            hermitian_coords(v.matrix())
                .into_iter()
                .zip(&b0)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>()
        });
        let coords = gram_schmidt(dirs, dim * dim - 1);
        let affine_basis = if coords.len() == dim * dim - 1 {
            traceless_basis(dim)
        } else {
            coords.iter().map(|v| hermitian_from_coords(dim, v)).collect()
        };
        Ok(Self {
            kind: FreeSetKind::VertexHull(vertices),
            label: label.to_string(),
            dim,
            affine_base: base,
            affine_basis,
        })
    }

    fn cone(rule: ConeRule, dim: usize, label: &str) -> Result<Self, SetsError> {
        let (base, affine_basis) = match &rule {
            ConeRule::Ppt { .. } => (DensityMatrix::maximally_mixed(dim), traceless_basis(dim)),
            ConeRule::Diagonal => (DensityMatrix::maximally_mixed(dim), diagonal_traceless(dim)),
            ConeRule::Generated(gens) => {
                let hull = FreeSet::vertex_hull(gens.clone(), label)?;
                (hull.affine_base, hull.affine_basis)
            }
        };
        Ok(Self {
            kind: FreeSetKind::SdpCone(rule),
            label: label.to_string(),
            dim,
            affine_base: base,
            affine_basis,
        })
    }

    pub fn kind(&self) -> &FreeSetKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> Option<&[DensityMatrix]> {
        match &self.kind {
            FreeSetKind::VertexHull(v) => Some(v),
            _ => None,
        }
    }

    /// A point of the set used as the origin of the affine parametrization.
    pub fn affine_base(&self) -> &DensityMatrix {
        &self.affine_base
    }

    /// Orthonormal traceless directions spanning `aff(F) - base`.
    pub fn affine_basis(&self) -> &[ComplexMatrix] {
        &self.affine_basis
    }

    /// True when the affine hull is the whole trace-one hyperplane.
    pub fn is_full_dimensional(&self) -> bool {
        self.affine_basis.len() == self.dim * self.dim - 1
    }

    /// The same set described as a lifted cone over its vertices.
    pub fn as_generated_cone(&self) -> Option<FreeSet> {
        let v = self.vertices()?;
        FreeSet::cone(
            ConeRule::Generated(v.to_vec()),
            self.dim,
            &format!("{}-cone", self.label),
        )
        .ok()
    }

    /// A new matrix variable ranging over `cone(F)`.
    pub fn cone_variable(&self, model: &mut Model) -> AffMat {
        let d = self.dim;
        match &self.kind {
            FreeSetKind::VertexHull(gens) | FreeSetKind::SdpCone(ConeRule::Generated(gens)) => {
                let mut s = AffMat::zeros(d, d);
                for g in gens {
                    let lam = model.scalar();
                    model.nonneg(lam.clone());
                    s = s + AffMat::from_scalar(&lam, g.matrix());
                }
                s
            }
            FreeSetKind::SdpCone(ConeRule::Diagonal) => {
                let mut s = AffMat::zeros(d, d);
                for i in 0..d {
                    let lam = model.scalar();
                    model.nonneg(lam.clone());
                    let mut e = ComplexMatrix::zeros(d, d);
                    e[(i, i)] = c64(1.0, 0.0);
                    s = s + AffMat::from_scalar(&lam, &e);
                }
                s
            }
            FreeSetKind::SdpCone(ConeRule::Ppt { dims }) => {
                let s = model.hermitian(d);
                model.psd(s.clone());
                model.psd(s.partial_transpose(*dims, Subsystem::B));
                s
            }
        }
    }

    /// Constrains `e` to the dual cone: `Tr[e σ] ≥ 0` for every `σ ∈ F`.
    /// The returned handle recovers the multiplier, an element of `cone(F)`.
    pub fn constrain_dual_cone(&self, model: &mut Model, e: &AffMat) -> ConeMultiplier {
        let d = self.dim;
        match &self.kind {
            FreeSetKind::VertexHull(gens) | FreeSetKind::SdpCone(ConeRule::Generated(gens)) => {
                let ids = gens.iter().map(|g| model.nonneg(e.inner(g.matrix()))).collect();
                ConeMultiplier::Rows(ids, gens.iter().map(|g| g.matrix().clone()).collect())
            }
            FreeSetKind::SdpCone(ConeRule::Diagonal) => {
                let mut ids = Vec::with_capacity(d);
                let mut units = Vec::with_capacity(d);
                for i in 0..d {
                    let mut p = ComplexMatrix::zeros(d, d);
                    p[(i, i)] = c64(1.0, 0.0);
                    ids.push(model.nonneg(e.inner(&p)));
                    units.push(p);
                }
                ConeMultiplier::Rows(ids, units)
            }
            FreeSetKind::SdpCone(ConeRule::Ppt { dims }) => {
                // (PSD ∩ PSD^Γ)* = PSD + PSD^Γ
                let b = model.hermitian(d);
                model.psd(b.clone());
                ConeMultiplier::Psd(model.psd(e.clone() - b.partial_transpose(*dims, Subsystem::B)))
            }
        }
    }

    /// Constrains `e` to lie in `cone(F)`.
    pub fn constrain_cone(&self, model: &mut Model, e: &AffMat) {
        let d = self.dim;
        match &self.kind {
            FreeSetKind::VertexHull(_) | FreeSetKind::SdpCone(ConeRule::Generated(_)) => {
                let s = self.cone_variable(model);
                let diff = e.clone() - s;
                for b in hermitian_basis(d) {
                    model.eq(diff.inner(&b));
                }
            }
            FreeSetKind::SdpCone(ConeRule::Diagonal) => {
                for (k, b) in hermitian_basis(d).into_iter().enumerate() {
                    if k < d {
                        model.nonneg(e.inner(&b));
                    } else {
                        model.eq(e.inner(&b));
                    }
                }
            }
            FreeSetKind::SdpCone(ConeRule::Ppt { dims }) => {
                model.psd(e.clone());
                model.psd(e.partial_transpose(*dims, Subsystem::B));
            }
        }
    }

    /// Whether `ρ` lies in the set, with a separating witness otherwise.
    pub fn membership(&self, rho: &DensityMatrix) -> Result<Membership, SetsError> {
        if rho.dim() != self.dim {
            return Err(LinalgError::DimensionMismatch(format!(
                "state of dimension {} against a set of dimension {}",
                rho.dim(),
                self.dim
            ))
            .into());
        }
        match &self.kind {
            FreeSetKind::VertexHull(v) | FreeSetKind::SdpCone(ConeRule::Generated(v)) => {
                hull_membership(rho, v)
            }
            FreeSetKind::SdpCone(ConeRule::Ppt { dims }) => {
                let pt = partial_transpose(rho.matrix(), *dims, Subsystem::B)?;
                let (vals, vecs) = linalg::herm_eig(&pt)?;
                let lmin = vals[vals.len() - 1];
                if lmin >= -MEMBER_TOL {
                    return Ok(Membership {
                        member: true,
                        violation: 0.0,
                        witness: None,
                    });
                }
                let v = vecs.column(vals.len() - 1).into_owned();
                let w = -partial_transpose(&linalg::ket_bra(&v, &v), *dims, Subsystem::B)?;
                Ok(Membership {
                    member: false,
                    violation: -lmin,
                    witness: Some(w),
                })
            }
            FreeSetKind::SdpCone(ConeRule::Diagonal) => {
                let m = rho.matrix();
                let mut worst = (0.0, 0, 0);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        if i != j && m[(i, j)].norm() > worst.0 {
                            worst = (m[(i, j)].norm(), i, j);
                        }
                    }
                }
                if worst.0 <= MEMBER_TOL {
                    return Ok(Membership {
                        member: true,
                        violation: 0.0,
                        witness: None,
                    });
                }
                let (_, i, j) = worst;
                let phase = m[(j, i)].conj() / m[(j, i)].norm();
                let mut w = ComplexMatrix::zeros(self.dim, self.dim);
                w[(i, j)] = phase;
                w[(j, i)] = phase.conj();
                Ok(Membership {
                    member: false,
                    violation: 2.0 * worst.0,
                    witness: Some(w),
                })
            }
        }
    }
}

fn centroid(vs: &[DensityMatrix]) -> DensityMatrix {
    let d = vs[0].dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for v in vs {
        m += v.matrix();
    }
    DensityMatrix::from_numerical(&m.unscale(vs.len() as f64)).expect("mean of states is a state")
}

fn diagonal_traceless(d: usize) -> Vec<ComplexMatrix> {
    let dirs = (0..d).map(|i| {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = c64(1.0, 0.0);
        hermitian_coords(&(m - identity(d).unscale(d as f64)))
    });
    gram_schmidt(dirs, d - 1)
        .into_iter()
        .map(|v| hermitian_from_coords(d, &v))
        .collect()
}

fn hull_membership(rho: &DensityMatrix, vertices: &[DensityMatrix]) -> Result<Membership, SetsError> {
    // Fast path: a pure state is in the hull only if it is a vertex.
    for v in vertices {
        if (v.matrix() - rho.matrix()).norm() <= 1e-10 {
            return Ok(Membership {
                member: true,
                violation: 0.0,
                witness: None,
            });
        }
    }
    // max Tr[Wρ] - u  s.t. Tr[W v_i] ≤ u, W in the unit box.
    let d = rho.dim();
    let mut model = Model::new();
    let w = model.hermitian(d);
    let u = model.scalar();
    for v in vertices {
        model.nonneg(u.clone() - w.inner(v.matrix()));
    }
    for b in hermitian_basis(d) {
        let coord = w.inner(&b);
        model.nonneg(coord.clone() + 1.0);
        model.nonneg(-coord + 1.0);
    }
    model.maximize(w.inner(rho.matrix()) - u);
    let sol = model
        .solve(&SolverOptions::precise())
        .map_err(|e| SetsError::OutOfRange(e.to_string()))?;
    let value = sol.value.max(0.0);
    if !sol.is_optimal() && !value.is_finite() {
        return Err(SetsError::OutOfRange(format!(
            "membership program ended with {:?}",
            sol.status
        )));
    }
    if value <= MEMBER_TOL {
        Ok(Membership {
            member: true,
            violation: value,
            witness: None,
        })
    } else {
        Ok(Membership {
            member: false,
            violation: value,
            witness: Some(sol.matrix_of(&w)),
        })
    }
}

// ---------------------------------------------------------------------------
// Stabilizer states

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[c64(FRAC_1_SQRT_2, 0.), c64(FRAC_1_SQRT_2, 0.), c64(FRAC_1_SQRT_2, 0.), c64(-FRAC_1_SQRT_2, 0.)],
    )
}

pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(0., 1.)])
}

fn omega3() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Qutrit Fourier gate `F|j> = (1/√3) sum_k ω^{jk} |k>`.
pub fn qutrit_fourier() -> ComplexMatrix {
    let w = omega3();
    ComplexMatrix::from_fn(3, 3, |k, j| w.powu((j * k) as u32) / 3f64.sqrt())
}

/// Qutrit phase gate `diag(1, 1, ω)`.
pub fn qutrit_phase() -> ComplexMatrix {
    let mut s = identity(3);
    s[(2, 2)] = omega3();
    s
}

fn embed_single(op: &ComplexMatrix, site: usize, n: usize, d: usize) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = (0..n)
        .map(|k| if k == site { op.clone() } else { identity(d) })
        .collect();
    kron_all(factors.iter())
}

/// Controlled addition `|a>|b> -> |a>|b + a mod d>` between two sites.
fn controlled_add(control: usize, target: usize, n: usize, d: usize) -> ComplexMatrix {
    let dim = d.pow(n as u32);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let mut digits = vec![0usize; n];
        let mut r = idx;
        for k in (0..n).rev() {
            digits[k] = r % d;
            r /= d;
        }
        digits[target] = (digits[target] + digits[control]) % d;
        let out = digits.iter().fold(0, |acc, &x| acc * d + x);
        u[(out, idx)] = c64(1.0, 0.0);
    }
    u
}

/// `H` and `S` on each qubit and `CNOT` on each ordered pair.
pub fn clifford_generators_qubit(n: usize) -> Vec<ComplexMatrix> {
    let mut gens = Vec::new();
    for k in 0..n {
        gens.push(embed_single(&hadamard(), k, n, 2));
        gens.push(embed_single(&phase_s(), k, n, 2));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gens.push(controlled_add(a, b, n, 2));
            }
        }
    }
    gens
}

/// Fourier and phase gates on each qutrit and `SUM` on each ordered pair.
pub fn clifford_generators_qutrit(n: usize) -> Vec<ComplexMatrix> {
    let mut gens = Vec::new();
    for k in 0..n {
        gens.push(embed_single(&qutrit_fourier(), k, n, 3));
        gens.push(embed_single(&qutrit_phase(), k, n, 3));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gens.push(controlled_add(a, b, n, 3));
            }
        }
    }
    gens
}

fn projector_key(m: &ComplexMatrix) -> Vec<i64> {
    let mut key = Vec::with_capacity(2 * m.len());
    for z in m.iter() {
        key.push((z.re * 1e7).round() as i64);
        key.push((z.im * 1e7).round() as i64);
    }
    key
}

/// Orbit of `|0…0>` under conjugation by the generators, deduplicated on
/// projectors so global phases never matter.
fn orbit(gens: &[ComplexMatrix], dim: usize, expected: usize) -> Vec<PureState> {
    let start = PureState::basis(dim, 0).expect("nonzero dimension");
    let mut seen = HashSet::new();
    seen.insert(projector_key(&start.projector()));
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(psi) = queue.pop_front() {
        for g in gens {
            let next = psi.apply(g).expect("generator dimension matches");
            if seen.insert(projector_key(&next.projector())) {
                out.push(next.clone());
                queue.push_back(next);
            }
        }
        assert!(out.len() <= expected, "stabilizer orbit exceeded {expected} states");
    }
    out
}

/// `d^n prod_{k=1..n} (d^k + 1)`.
pub fn stabilizer_count(d: usize, n: usize) -> usize {
    (1..=n).fold(d.pow(n as u32), |acc, k| acc * (d.pow(k as u32) + 1))
}

/// Pure stabilizer states of `n ≤ 3` qubits, in generation order.
pub fn stabilizer_pure_states(n: usize) -> Result<Vec<PureState>, SetsError> {
    if !(1..=3).contains(&n) {
        return Err(SetsError::OutOfRange(format!("{n} qubits")));
    }
    let expected = stabilizer_count(2, n);
    let states = orbit(&clifford_generators_qubit(n), 1 << n, expected);
    assert_eq!(states.len(), expected, "qubit stabilizer count");
    Ok(states)
}

/// Pure stabilizer states of `n ≤ 2` qutrits, in generation order.
pub fn stabilizer_pure_states_qutrit(n: usize) -> Result<Vec<PureState>, SetsError> {
    if !(1..=2).contains(&n) {
        return Err(SetsError::OutOfRange(format!("{n} qutrits")));
    }
    let expected = stabilizer_count(3, n);
    let states = orbit(&clifford_generators_qutrit(n), 3usize.pow(n as u32), expected);
    assert_eq!(states.len(), expected, "qutrit stabilizer count");
    Ok(states)
}

pub fn stabilizer_states(n: usize) -> Result<FreeSet, SetsError> {
    let v = stabilizer_pure_states(n)?.iter().map(|s| s.density()).collect();
    FreeSet::vertex_hull(v, &format!("stab{n}"))
}

pub fn stabilizer_states_qutrit(n: usize) -> Result<FreeSet, SetsError> {
    let v = stabilizer_pure_states_qutrit(n)?
        .iter()
        .map(|s| s.density())
        .collect();
    FreeSet::vertex_hull(v, &format!("stab3_{n}"))
}

/// Diagonal states in dimension `d`, as the hull of the basis projectors.
pub fn coherence_set(d: usize) -> Result<FreeSet, SetsError> {
    if d < 2 {
        return Err(SetsError::OutOfRange(format!("dimension {d}")));
    }
    let v = (0..d)
        .map(|k| PureState::basis(d, k).map(|s| s.density()))
        .collect::<Result<Vec<_>, _>>()?;
    FreeSet::vertex_hull(v, &format!("coh{d}"))
}

/// Diagonal states described by the cone rule instead of vertices.
pub fn coherence_cone(d: usize) -> Result<FreeSet, SetsError> {
    if d < 2 {
        return Err(SetsError::OutOfRange(format!("dimension {d}")));
    }
    FreeSet::cone(ConeRule::Diagonal, d, &format!("coh{d}-cone"))
}

/// States with positive partial transpose on `C^dA ⊗ C^dB`.
pub fn ppt_set(da: usize, db: usize) -> Result<FreeSet, SetsError> {
    if da < 2 || db < 2 || da * db > 64 {
        return Err(SetsError::OutOfRange(format!("{da}x{db} bipartition")));
    }
    FreeSet::cone(ConeRule::Ppt { dims: (da, db) }, da * db, &format!("ppt{da}x{db}"))
}

// ---------------------------------------------------------------------------
// Catalog

fn ket(amps: &[Complex64]) -> PureState {
    PureState::from_slice(amps).expect("catalog amplitudes are nonzero")
}

pub fn face_state() -> DensityMatrix {
    let s = 1.0 / 3f64.sqrt();
    let m = (identity(2) + (linalg::pauli_x() + linalg::pauli_y() + linalg::pauli_z()) * c64(s, 0.0))
        * c64(0.5, 0.0);
    DensityMatrix::new(m).expect("face state is valid")
}

/// The +1 eigenvector of `(X + Y + Z)/√3`.
pub fn face_pure() -> PureState {
    let (_, vecs) = linalg::herm_eig(face_state().matrix()).expect("Hermitian");
    let v: DVector<Complex64> = vecs.column(0).into_owned();
    // fix the phase so the first amplitude is real positive
    let phase = v[0].conj() / v[0].norm();
    PureState::normalized(v * phase).expect("eigenvector")
}

pub fn hoggar_pure() -> PureState {
    ket(&[
        c64(1., 1.),
        c64(0., 0.),
        c64(-1., 0.),
        c64(1., 0.),
        c64(0., -1.),
        c64(-1., 0.),
        c64(0., 0.),
        c64(0., 0.),
    ])
}

pub fn strange_pure() -> PureState {
    ket(&[c64(0., 0.), c64(1., 0.), c64(-1., 0.)])
}

pub fn norrell_pure() -> PureState {
    ket(&[c64(-1., 0.), c64(2., 0.), c64(-1., 0.)])
}

pub fn t_qutrit_pure() -> PureState {
    ket(&[
        Complex64::from_polar(1.0, 2.0 * PI / 9.0),
        c64(1., 0.),
        Complex64::from_polar(1.0, -2.0 * PI / 9.0),
    ])
}

/// `(1/√m) sum_i |ii>`.
pub fn bell_pure(m: usize) -> PureState {
    let mut v = vec![c64(0., 0.); m * m];
    for i in 0..m {
        v[i * m + i] = c64(1., 0.);
    }
    ket(&v)
}

/// `(1/√m) sum_i |i>`.
pub fn max_coherent_pure(m: usize) -> PureState {
    ket(&vec![c64(1., 0.); m])
}

fn parse_index(label: &str, prefix: &str) -> Option<usize> {
    let rest = label.strip_prefix(prefix)?;
    let rest = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(rest);
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    rest.parse().ok()
}

/// Pure catalog state by label.
///
/// Labels: `face`, `hoggar`, `strange`, `norrell`, `t_qutrit`, `bell(m)`,
/// `max_coherent(m)`; `bell2` and `max_coherent3` style spellings also parse.
pub fn named_pure(label: &str) -> Result<PureState, SetsError> {
    let l = label.trim().to_ascii_lowercase();
    match l.as_str() {
        "face" => return Ok(face_pure()),
        "hoggar" => return Ok(hoggar_pure()),
        "strange" => return Ok(strange_pure()),
        "norrell" => return Ok(norrell_pure()),
        "t_qutrit" | "t" => return Ok(t_qutrit_pure()),
        _ => {}
    }
    let check = |m: usize| {
        if (2..=8).contains(&m) {
            Ok(m)
        } else {
            Err(SetsError::OutOfRange(format!("{label}")))
        }
    };
    if let Some(m) = parse_index(&l, "max_coherent") {
        return Ok(max_coherent_pure(check(m)?));
    }
    if let Some(m) = parse_index(&l, "bell") {
        return Ok(bell_pure(check(m)?));
    }
    Err(SetsError::UnknownLabel(label.to_string()))
}

pub fn named_state(label: &str) -> Result<DensityMatrix, SetsError> {
    named_pure(label).map(|p| p.density())
}

/// `κ Φ + (1 − κ) σ*` for `σ*` orthogonal to `Φ`.
pub fn isotropic(
    phi: &DensityMatrix,
    sigma_star: &DensityMatrix,
    kappa: f64,
) -> Result<DensityMatrix, SetsError> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(SetsError::OutOfRange(format!("kappa {kappa}")));
    }
    if phi.dim() != sigma_star.dim() {
        return Err(LinalgError::DimensionMismatch("isotropic mixture".into()).into());
    }
    let overlap = linalg::inner(phi.matrix(), sigma_star.matrix());
    if overlap > 1e-8 {
        return Err(SetsError::NotOrthogonal(overlap));
    }
    Ok(phi.mix(sigma_star, kappa)?)
}

/// `(I − ψ)/(d − 1)`, the normalized complement of a pure state.
pub fn complement(psi: &PureState) -> DensityMatrix {
    let d = psi.dim();
    DensityMatrix::new((identity(d) - psi.projector()).unscale((d - 1) as f64))
        .expect("complement of a pure state is a state")
}

/// Smallest eigenvalue of the partial transpose.
pub fn ppt_margin(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64, SetsError> {
    Ok(min_eigenvalue(&partial_transpose(rho.matrix(), dims, Subsystem::B)?)?)
}

//! Real symmetric cone interior-point kernel.
//!
//! Solves the pair
//!
//! ```text
//!   (P)  min <C, X>  s.t. <A_k, X> = b_k,  X in K
//!   (D)  max b'y     s.t. sum_k y_k A_k + Z = C,  Z in K
//! ```
//!
//! where `K` is a product of real PSD cones and nonnegative orthants. The
//! search direction is HKM with a Mehrotra predictor-corrector step, started
//! from an infeasible point. Infeasibility is reported when the iterates
//! diverge along a Farkas ray.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::SolverOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BlockKind {
    Sdp(usize),
    Lp(usize),
}

#[derive(Debug, Clone)]
pub(crate) enum BlockVec {
    Sdp(DMatrix<f64>),
    Lp(DVector<f64>),
}

impl BlockVec {
    fn zeros(kind: BlockKind) -> Self {
        match kind {
            BlockKind::Sdp(n) => BlockVec::Sdp(DMatrix::zeros(n, n)),
            BlockKind::Lp(n) => BlockVec::Lp(DVector::zeros(n)),
        }
    }

    fn scaled_identity(kind: BlockKind, s: f64) -> Self {
        match kind {
            BlockKind::Sdp(n) => BlockVec::Sdp(DMatrix::identity(n, n) * s),
            BlockKind::Lp(n) => BlockVec::Lp(DVector::from_element(n, s)),
        }
    }

    fn dot(&self, other: &BlockVec) -> f64 {
        match (self, other) {
            (BlockVec::Sdp(a), BlockVec::Sdp(b)) => a.dot(b),
            (BlockVec::Lp(a), BlockVec::Lp(b)) => a.dot(b),
            _ => unreachable!("block kinds differ"),
        }
    }

    fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    fn axpy(&mut self, alpha: f64, x: &BlockVec) {
        match (self, x) {
            (BlockVec::Sdp(a), BlockVec::Sdp(b)) => *a += b * alpha,
            (BlockVec::Lp(a), BlockVec::Lp(b)) => a.axpy(alpha, b, 1.0),
            _ => unreachable!("block kinds differ"),
        }
    }
}

/// One constraint's restriction to a block. SDP triplets hold the upper
/// triangle (`i <= j`) of a symmetric matrix.
#[derive(Debug, Clone)]
pub(crate) enum Part {
    Sdp(Vec<(usize, usize, f64)>),
    Lp(Vec<(usize, f64)>),
}

#[derive(Debug, Clone)]
pub(crate) struct ConeProblem {
    pub blocks: Vec<BlockKind>,
    pub c: Vec<BlockVec>,
    /// `a[k]` lists `(block, part)` pairs of constraint `k`.
    pub a: Vec<Vec<(usize, Part)>>,
    pub b: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ConeStatus {
    Optimal,
    /// (P) has no feasible point; a ray of (D) was found.
    PrimalInfeasible,
    /// (D) has no feasible point; a ray of (P) was found.
    DualInfeasible,
    MaxIter,
    Breakdown,
}

#[derive(Debug, Clone)]
pub(crate) struct ConeResult {
    pub status: ConeStatus,
    pub x: Vec<BlockVec>,
    pub y: DVector<f64>,
    pub pobj: f64,
    pub dobj: f64,
    pub pinf: f64,
    pub dinf: f64,
    pub iterations: usize,
}

fn sym_dot_dense(part: &[(usize, usize, f64)], g: &DMatrix<f64>) -> f64 {
    // Tr[A G] for symmetric A given by its upper triangle, G arbitrary.
    let mut acc = 0.0;
    for &(i, j, v) in part {
        if i == j {
            acc += v * g[(i, i)];
        } else {
            acc += v * (g[(i, j)] + g[(j, i)]);
        }
    }
    acc
}

fn dense_of(part: &[(usize, usize, f64)], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j, v) in part {
        m[(i, j)] += v;
        if i != j {
            m[(j, i)] += v;
        }
    }
    m
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
}

/// Largest step `alpha` keeping `x + alpha dx` in the cone (∞ if unbounded).
fn max_step(x: &BlockVec, dx: &BlockVec) -> Option<f64> {
    match (x, dx) {
        (BlockVec::Lp(x), BlockVec::Lp(dx)) => {
            let mut a = f64::INFINITY;
            for i in 0..x.len() {
                if dx[i] < 0.0 {
                    a = a.min(-x[i] / dx[i]);
                }
            }
            Some(a)
        }
        (BlockVec::Sdp(x), BlockVec::Sdp(dx)) => {
            let chol = Cholesky::new(x.clone())?;
            let l = chol.l();
            let w1 = l.solve_lower_triangular(dx)?;
            let mut w2 = l.solve_lower_triangular(&w1.transpose())?;
            symmetrize(&mut w2);
            let lam = SymmetricEigen::new(w2)
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            Some(if lam < 0.0 { -1.0 / lam } else { f64::INFINITY })
        }
        _ => unreachable!(),
    }
}

struct Workspace<'a> {
    p: &'a ConeProblem,
    /// Constraints touching each block.
    touching: Vec<Vec<(usize, usize)>>,
    /// Dense coefficient matrix of each LP block (rows = entries, cols = touching index).
    lp_dense: Vec<Option<DMatrix<f64>>>,
    /// Dense copies of large SDP parts.
    sdp_dense: Vec<Vec<Option<DMatrix<f64>>>>,
    m: usize,
}

impl<'a> Workspace<'a> {
    fn new(p: &'a ConeProblem) -> Self {
        let nb = p.blocks.len();
        let mut touching = vec![Vec::new(); nb];
        for (k, parts) in p.a.iter().enumerate() {
            for (pi, (blk, _)) in parts.iter().enumerate() {
                touching[*blk].push((k, pi));
            }
        }
        let mut lp_dense = vec![None; nb];
        let mut sdp_dense = vec![Vec::new(); nb];
        for (bi, kind) in p.blocks.iter().enumerate() {
            match *kind {
                BlockKind::Lp(n) => {
                    let mut d = DMatrix::zeros(n, touching[bi].len());
                    for (col, &(k, pi)) in touching[bi].iter().enumerate() {
                        if let Part::Lp(entries) = &p.a[k][pi].1 {
                            for &(i, v) in entries {
                                d[(i, col)] += v;
                            }
                        }
                    }
                    lp_dense[bi] = Some(d);
                }
                BlockKind::Sdp(n) => {
                    sdp_dense[bi] = touching[bi]
                        .iter()
                        .map(|&(k, pi)| match &p.a[k][pi].1 {
                            Part::Sdp(t) if t.len() > 2 * n => Some(dense_of(t, n)),
                            _ => None,
                        })
                        .collect();
                }
            }
        }
        Self {
            p,
            touching,
            lp_dense,
            sdp_dense,
            m: p.b.len(),
        }
    }

    /// `A(X)` with `X` given per block (may be non-symmetric for SDP blocks).
    fn apply_a(&self, x: &[BlockVec]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (bi, kind) in self.p.blocks.iter().enumerate() {
            match (kind, &x[bi]) {
                (BlockKind::Lp(_), BlockVec::Lp(xv)) => {
                    let d = self.lp_dense[bi].as_ref().unwrap();
                    let prod = d.tr_mul(xv);
                    for (col, &(k, _)) in self.touching[bi].iter().enumerate() {
                        out[k] += prod[col];
                    }
                }
                (BlockKind::Sdp(_), BlockVec::Sdp(xm)) => {
                    for &(k, pi) in &self.touching[bi] {
                        if let Part::Sdp(t) = &self.p.a[k][pi].1 {
                            out[k] += sym_dot_dense(t, xm);
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        out
    }

    /// `sum_k y_k A_k` per block.
    fn apply_at(&self, y: &DVector<f64>) -> Vec<BlockVec> {
        let mut out: Vec<BlockVec> = self.p.blocks.iter().map(|k| BlockVec::zeros(*k)).collect();
        for (bi, kind) in self.p.blocks.iter().enumerate() {
            match (kind, &mut out[bi]) {
                (BlockKind::Lp(_), BlockVec::Lp(o)) => {
                    let d = self.lp_dense[bi].as_ref().unwrap();
                    let yy = DVector::from_iterator(
                        self.touching[bi].len(),
                        self.touching[bi].iter().map(|&(k, _)| y[k]),
                    );
                    *o += d * yy;
                }
                (BlockKind::Sdp(_), BlockVec::Sdp(o)) => {
                    for &(k, pi) in &self.touching[bi] {
                        if let Part::Sdp(t) = &self.p.a[k][pi].1 {
                            let yk = y[k];
                            for &(i, j, v) in t {
                                o[(i, j)] += yk * v;
                                if i != j {
                                    o[(j, i)] += yk * v;
                                }
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        out
    }

    /// Schur complement `M_ij = <A_i, X A_j Z^{-1}>`.
    fn schur(&self, x: &[BlockVec], zinv: &[BlockVec]) -> DMatrix<f64> {
        let mut mm = DMatrix::zeros(self.m, self.m);
        for (bi, kind) in self.p.blocks.iter().enumerate() {
            let touch = &self.touching[bi];
            if touch.is_empty() {
                continue;
            }
            match (kind, &x[bi], &zinv[bi]) {
                (BlockKind::Lp(_), BlockVec::Lp(xv), BlockVec::Lp(zi)) => {
                    let d = self.lp_dense[bi].as_ref().unwrap();
                    let mut scaled = d.clone();
                    for r in 0..scaled.nrows() {
                        let s = xv[r] * zi[r];
                        for c in 0..scaled.ncols() {
                            scaled[(r, c)] *= s;
                        }
                    }
                    let local = d.tr_mul(&scaled);
                    for (ci, &(ki, _)) in touch.iter().enumerate() {
                        for (cj, &(kj, _)) in touch.iter().enumerate() {
                            mm[(ki, kj)] += local[(ci, cj)];
                        }
                    }
                }
                (BlockKind::Sdp(n), BlockVec::Sdp(xm), BlockVec::Sdp(zi)) => {
                    let n = *n;
                    for (cj, &(kj, pj)) in touch.iter().enumerate() {
                        let Part::Sdp(tj) = &self.p.a[kj][pj].1 else { unreachable!() };
                        let g = match &self.sdp_dense[bi][cj] {
                            Some(dense) => xm * dense * zi,
                            None => {
                                let mut g = DMatrix::zeros(n, n);
                                for &(p, q, v) in tj {
                                    g.ger(v, &xm.column(p), &zi.row(q).transpose(), 1.0);
                                    if p != q {
                                        g.ger(v, &xm.column(q), &zi.row(p).transpose(), 1.0);
                                    }
                                }
                                g
                            }
                        };
                        for &(ki, pi) in touch.iter() {
                            if ki > kj {
                                continue;
                            }
                            let Part::Sdp(ti) = &self.p.a[ki][pi].1 else { unreachable!() };
                            let val = sym_dot_dense(ti, &g);
                            mm[(ki, kj)] += val;
                            if ki != kj {
                                mm[(kj, ki)] += val;
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        symmetrize(&mut mm);
        mm
    }
}

fn solve_schur(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Some(ch.solve(rhs));
    }
    let scale = m.diagonal().iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let mut reg = 1e-14 * scale;
    for _ in 0..8 {
        let mut mr = m.clone();
        for i in 0..mr.nrows() {
            mr[(i, i)] += reg;
        }
        if let Some(ch) = Cholesky::new(mr) {
            return Some(ch.solve(rhs));
        }
        reg *= 100.0;
    }
    m.clone().lu().solve(rhs)
}

fn inverse_pd(z: &BlockVec) -> Option<BlockVec> {
    match z {
        BlockVec::Lp(v) => {
            if v.iter().all(|&x| x > 0.0) {
                Some(BlockVec::Lp(v.map(|x| 1.0 / x)))
            } else {
                None
            }
        }
        BlockVec::Sdp(m) => {
            let mut inv = Cholesky::new(m.clone())?.inverse();
            symmetrize(&mut inv);
            Some(BlockVec::Sdp(inv))
        }
    }
}

struct Direction {
    dx: Vec<BlockVec>,
    dy: DVector<f64>,
    dz: Vec<BlockVec>,
}

pub(crate) fn solve(p: &ConeProblem, opts: &SolverOptions) -> ConeResult {
    let ws = Workspace::new(p);
    let nb = p.blocks.len();
    let nu: f64 = p
        .blocks
        .iter()
        .map(|k| match k {
            BlockKind::Sdp(n) | BlockKind::Lp(n) => *n as f64,
        })
        .sum::<f64>()
        .max(1.0);

    // Infeasible starting point, scaled per block from the data norms.
    let mut a_norms = vec![vec![0.0f64; 0]; nb];
    for bi in 0..nb {
        a_norms[bi] = ws.touching[bi]
            .iter()
            .map(|&(k, pi)| match &p.a[k][pi].1 {
                Part::Sdp(t) => t
                    .iter()
                    .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
                    .sum::<f64>()
                    .sqrt(),
                Part::Lp(e) => e.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt(),
            })
            .collect();
    }
    let mut x: Vec<BlockVec> = Vec::with_capacity(nb);
    let mut z: Vec<BlockVec> = Vec::with_capacity(nb);
    for (bi, kind) in p.blocks.iter().enumerate() {
        let n = match kind {
            BlockKind::Sdp(n) | BlockKind::Lp(n) => *n as f64,
        };
        let sn = n.sqrt();
        let mut xi = 10.0f64.max(sn);
        let mut eta = 10.0f64.max(sn).max(p.c[bi].norm_sq().sqrt());
        for (t, &(k, _)) in ws.touching[bi].iter().enumerate() {
            let an = a_norms[bi][t];
            xi = xi.max(sn * (1.0 + p.b[k].abs()) / (1.0 + an));
            eta = eta.max(an);
        }
        x.push(BlockVec::scaled_identity(*kind, xi));
        z.push(BlockVec::scaled_identity(*kind, eta));
    }
    let mut y = DVector::zeros(ws.m);

    let bnorm = p.b.norm();
    let cnorm = p.c.iter().map(|c| c.norm_sq()).sum::<f64>().sqrt();
    let mut status: ConeStatus;
    let mut iterations = 0;
    let mut stall = 0;
    let (mut pobj, mut dobj, mut pinf, mut dinf);

    loop {
        // Residuals and objectives.
        let ax = ws.apply_a(&x);
        let rp = &p.b - &ax;
        let aty = ws.apply_at(&y);
        let mut rd: Vec<BlockVec> = p.c.clone();
        for bi in 0..nb {
            rd[bi].axpy(-1.0, &z[bi]);
            rd[bi].axpy(-1.0, &aty[bi]);
        }
        pobj = (0..nb).map(|bi| p.c[bi].dot(&x[bi])).sum::<f64>();
        dobj = p.b.dot(&y);
        let rdn = rd.iter().map(|r| r.norm_sq()).sum::<f64>().sqrt();
        pinf = rp.norm() / (1.0 + bnorm);
        dinf = rdn / (1.0 + cnorm);
        let xz: f64 = (0..nb).map(|bi| x[bi].dot(&z[bi])).sum();
        let mu = xz / nu;
        let gap = pobj - dobj;
        let gap_scale = 1.0;

        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && gap.abs() <= opts.gap_tol * gap_scale
            && xz <= opts.gap_tol * gap_scale
        {
            status = ConeStatus::Optimal;
            break;
        }

        // Farkas rays.
        if iterations > 3 {
            let aty_z = {
                let mut s = 0.0;
                for bi in 0..nb {
                    let mut t = aty[bi].clone();
                    t.axpy(1.0, &z[bi]);
                    s += t.norm_sq();
                }
                s.sqrt()
            };
            if dobj > 0.0 && aty_z / dobj <= opts.infeas_tol && dobj > 1e-8 {
                status = ConeStatus::PrimalInfeasible;
                break;
            }
            if pobj < 0.0 && ax.norm() / (-pobj) <= opts.infeas_tol && -pobj > 1e-8 {
                status = ConeStatus::DualInfeasible;
                break;
            }
            let xnorm = x.iter().map(|b| b.norm_sq()).sum::<f64>().sqrt();
            let ynorm = y.norm();
            if !(xnorm < 1e13 && ynorm < 1e13) {
                status = if dobj > 0.0 && dobj >= -pobj {
                    ConeStatus::PrimalInfeasible
                } else if pobj < 0.0 {
                    ConeStatus::DualInfeasible
                } else {
                    ConeStatus::Breakdown
                };
                break;
            }
        }

        if iterations >= opts.max_iter {
            status = ConeStatus::MaxIter;
            break;
        }
        iterations += 1;

        let Some(zinv) = z.iter().map(inverse_pd).collect::<Option<Vec<_>>>() else {
            status = ConeStatus::Breakdown;
            break;
        };
        let mmat = ws.schur(&x, &zinv);

        // X Rd Z^{-1} term of the right-hand side.
        let x_rd_zinv: Vec<BlockVec> = (0..nb)
            .map(|bi| match (&x[bi], &rd[bi], &zinv[bi]) {
                (BlockVec::Sdp(xm), BlockVec::Sdp(r), BlockVec::Sdp(zi)) => {
                    BlockVec::Sdp(xm * r * zi)
                }
                (BlockVec::Lp(xv), BlockVec::Lp(r), BlockVec::Lp(zi)) => {
                    BlockVec::Lp(xv.component_mul(r).component_mul(zi))
                }
                _ => unreachable!(),
            })
            .collect();
        let a_xrdz = ws.apply_a(&x_rd_zinv);

        // Direction for target sigma*mu with an optional second-order term.
        let direction = |sigma_mu: f64, corr: Option<&Vec<BlockVec>>| -> Option<Direction> {
            // target[bi] = sigma mu Z^{-1} - X - corr
            let mut target: Vec<BlockVec> = (0..nb)
                .map(|bi| {
                    let mut t = zinv[bi].clone();
                    match &mut t {
                        BlockVec::Sdp(m) => *m *= sigma_mu,
                        BlockVec::Lp(v) => *v *= sigma_mu,
                    }
                    t.axpy(-1.0, &x[bi]);
                    t
                })
                .collect();
            if let Some(c) = corr {
                for bi in 0..nb {
                    target[bi].axpy(-1.0, &c[bi]);
                }
            }
            let rhs = &rp - ws.apply_a(&target) + &a_xrdz;
            let dy = solve_schur(&mmat, &rhs)?;
            if dy.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let atdy = ws.apply_at(&dy);
            let mut dz = rd.clone();
            for bi in 0..nb {
                dz[bi].axpy(-1.0, &atdy[bi]);
            }
            let dx: Vec<BlockVec> = (0..nb)
                .map(|bi| match (&target[bi], &x[bi], &dz[bi], &zinv[bi]) {
                    (BlockVec::Sdp(t), BlockVec::Sdp(xm), BlockVec::Sdp(d), BlockVec::Sdp(zi)) => {
                        let mut v = t - xm * d * zi;
                        symmetrize(&mut v);
                        BlockVec::Sdp(v)
                    }
                    (BlockVec::Lp(t), BlockVec::Lp(xv), BlockVec::Lp(d), BlockVec::Lp(zi)) => {
                        BlockVec::Lp(t - xv.component_mul(d).component_mul(zi))
                    }
                    _ => unreachable!(),
                })
                .collect();
            Some(Direction { dx, dy, dz })
        };

        let steps = |d: &Direction| -> Option<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for bi in 0..nb {
                ap = ap.min(max_step(&x[bi], &d.dx[bi])?);
                ad = ad.min(max_step(&z[bi], &d.dz[bi])?);
            }
            Some((ap, ad))
        };

        let Some(pred) = direction(0.0, None) else {
            status = ConeStatus::Breakdown;
            break;
        };
        let Some((ap, ad)) = steps(&pred) else {
            status = ConeStatus::Breakdown;
            break;
        };
        let ap1 = ap.min(1.0);
        let ad1 = ad.min(1.0);
        let mut mu_aff = 0.0;
        for bi in 0..nb {
            let mut xa = x[bi].clone();
            xa.axpy(ap1, &pred.dx[bi]);
            let mut za = z[bi].clone();
            za.axpy(ad1, &pred.dz[bi]);
            mu_aff += xa.dot(&za);
        }
        mu_aff /= nu;
        let ratio = (mu_aff / mu).clamp(0.0, 1.0);
        let mut sigma = ratio.powi(3).max(if ap1.min(ad1) < 0.2 { 0.3 } else { 0.0 });
        if !sigma.is_finite() {
            sigma = 0.5;
        }

        let corr: Vec<BlockVec> = (0..nb)
            .map(|bi| match (&pred.dx[bi], &pred.dz[bi], &zinv[bi]) {
                (BlockVec::Sdp(a), BlockVec::Sdp(b), BlockVec::Sdp(zi)) => BlockVec::Sdp(a * b * zi),
                (BlockVec::Lp(a), BlockVec::Lp(b), BlockVec::Lp(zi)) => {
                    BlockVec::Lp(a.component_mul(b).component_mul(zi))
                }
                _ => unreachable!(),
            })
            .collect();
        let full = match direction(sigma * mu, Some(&corr)) {
            Some(d) => d,
            None => {
                status = ConeStatus::Breakdown;
                break;
            }
        };
        let (dir, (ap, ad)) = match steps(&full) {
            Some(s) if s.0.min(s.1) > 1e-3 * ap1.min(ad1) => (full, s),
            _ => match direction(sigma.max(0.5) * mu, None) {
                Some(d) => match steps(&d) {
                    Some(s) => (d, s),
                    None => {
                        status = ConeStatus::Breakdown;
                        break;
                    }
                },
                None => {
                    status = ConeStatus::Breakdown;
                    break;
                }
            },
        };
        let gamma = 0.9 + 0.09 * ap1.min(ad1);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap.min(ad) < 1e-10 {
            stall += 1;
        } else {
            stall = 0;
        }
        if stall >= 5 {
            status = ConeStatus::Breakdown;
            break;
        }
        for bi in 0..nb {
            x[bi].axpy(ap, &dir.dx[bi]);
            z[bi].axpy(ad, &dir.dz[bi]);
            if let BlockVec::Sdp(m) = &mut x[bi] {
                symmetrize(m);
            }
            if let BlockVec::Sdp(m) = &mut z[bi] {
                symmetrize(m);
            }
        }
        y.axpy(ad, &dir.dy, 1.0);
    }

    // Accept a stalled iterate when it meets the loose default contract.
    if matches!(status, ConeStatus::MaxIter | ConeStatus::Breakdown) {
        let gap_scale = 1.0;
        let feas = opts.fallback_feas_tol.max(opts.feas_tol);
        if pinf <= feas
            && dinf <= feas
            && (pobj - dobj).abs() <= opts.fallback_gap_tol.max(opts.gap_tol) * gap_scale
        {
            status = ConeStatus::Optimal;
        }
    }

    ConeResult {
        status,
        x,
        y,
        pobj,
        dobj,
        pinf,
        dinf,
        iterations,
    }
}

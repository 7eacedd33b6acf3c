#![allow(dead_code)]
//! Seeded random instances and independent reference solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resq::linalg::{herm_eigvals, ComplexMatrix, DensityMatrix, PureState};
use std::time::Instant;

pub mod checks;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal by Box–Muller.
pub fn normal<R: Rng>(r: &mut R) -> f64 {
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn ginibre<R: Rng>(r: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(r), normal(r)))
}

pub fn random_hermitian<R: Rng>(r: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(r, d, d);
    (&g + g.adjoint()).unscale(2.0)
}

/// Haar unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng>(r: &mut R, d: usize) -> ComplexMatrix {
    let qr = ginibre(r, d, d).qr();
    let (q, rr) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let z = rr[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= ph;
        }
    }
    u
}

/// Induced-measure state of the given rank.
pub fn random_state<R: Rng>(r: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(r, d, rank.max(1));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.unscale(t)).expect("Ginibre state")
}

pub fn random_full_rank_state<R: Rng>(r: &mut R, d: usize) -> DensityMatrix {
    random_state(r, d, d)
}

pub fn random_pure<R: Rng>(r: &mut R, d: usize) -> PureState {
    let v = DVector::from_fn(d, |_, _| Complex64::new(normal(r), normal(r)));
    PureState::normalized(v).expect("nonzero vector")
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn min_eig(a: &ComplexMatrix) -> f64 {
    herm_eigvals(a).expect("hermitian").min()
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableauOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Dense two-phase tableau simplex with Bland's rule for
/// `min c'x  s.t.  Ax = b, x ≥ 0`.
pub fn tableau_simplex(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> TableauOutcome {
    const TOL: f64 = 1e-10;
    let (m, n) = a.shape();
    // Columns: x (n), artificials (m), rhs.
    let width = n + m + 1;
    let mut t = DMatrix::<f64>::zeros(m + 1, width);
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = s * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, width - 1)] = s * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let pivot = |t: &mut DMatrix<f64>, basis: &mut Vec<usize>, row: usize, col: usize| {
        let p = t[(row, col)];
        for j in 0..t.ncols() {
            t[(row, j)] /= p;
        }
        for i in 0..t.nrows() {
            if i != row {
                let f = t[(i, col)];
                if f != 0.0 {
                    for j in 0..t.ncols() {
                        let v = t[(row, j)];
                        t[(i, j)] -= f * v;
                    }
                }
            }
        }
        basis[row] = col;
    };

    // Returns false when unbounded.
    let run = |t: &mut DMatrix<f64>, basis: &mut Vec<usize>, allowed: usize| -> bool {
        loop {
            let obj = t.nrows() - 1;
            let Some(col) = (0..allowed).find(|&j| t[(obj, j)] < -TOL) else {
                return true;
            };
            let mut best: Option<(f64, usize)> = None;
            for i in 0..obj {
                if t[(i, col)] > TOL {
                    let ratio = t[(i, t.ncols() - 1)] / t[(i, col)];
                    match best {
                        Some((r, bi)) if ratio > r + TOL || (ratio > r - TOL && basis[i] > basis[bi]) => {}
                        _ => best = Some((ratio, i)),
                    }
                }
            }
            match best {
                None => return false,
                Some((_, row)) => pivot(t, basis, row, col),
            }
        }
    };

    // Phase one: minimize the sum of artificials.
    for j in 0..width {
        let s: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = if (n..n + m).contains(&j) { 0.0 } else { -s };
    }
    run(&mut t, &mut basis, n + m);
    if -t[(m, width - 1)] > 1e-8 {
        return TableauOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| t[(i, j)].abs() > 1e-9) {
                pivot(&mut t, &mut basis, i, col);
            }
        }
    }
    // Phase two.
    for j in 0..width {
        t[(m, j)] = if j < n { c[j] } else { 0.0 };
    }
    for i in 0..m {
        let bj = basis[i];
        if bj < n {
            let f = t[(m, bj)];
            for j in 0..width {
                let v = t[(i, j)];
                t[(m, j)] -= f * v;
            }
        }
    }
    // Artificials stay at zero: exclude them from entering.
    if !run(&mut t, &mut basis, n) {
        return TableauOutcome::Unbounded;
    }
    TableauOutcome::Optimal(-t[(m, width - 1)])
}

/// Random LP `min c'x, Ax = b, x ≥ 0` that is feasible and bounded:
/// `b = A x0` with `x0 > 0` and `c = A'y0 + s0` with `s0 ≥ 0`.
pub struct RandomLp {
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

pub fn random_lp<R: Rng>(r: &mut R, m: usize, n: usize) -> RandomLp {
    let a = DMatrix::from_fn(m, n, |_, _| normal(r));
    let x0 = DVector::from_fn(n, |_, _| r.gen_range(0.1..2.0));
    let y0 = DVector::from_fn(m, |_, _| normal(r));
    let s0 = DVector::from_fn(n, |_, _| r.gen_range(0.0..2.0));
    let b = &a * x0;
    let c = a.transpose() * y0 + s0;
    RandomLp { a, b: b.iter().copied().collect(), c: c.iter().copied().collect() }
}

/// `min t  s.t.  t B_k − A_k ⪰ 0,  t ≥ c_j`, with every `B_k ≻ 0`.
pub struct PencilSdp {
    pub pencils: Vec<(ComplexMatrix, ComplexMatrix)>,
    pub floors: Vec<f64>,
}

pub fn random_pencil_sdp<R: Rng>(r: &mut R) -> PencilSdp {
    let blocks = r.gen_range(1..=3);
    let pencils = (0..blocks)
        .map(|_| {
            let d = r.gen_range(1..=6);
            let g = ginibre(r, d, d);
            let b = &g * g.adjoint() + ComplexMatrix::identity(d, d).scale(0.2);
            (b, random_hermitian(r, d))
        })
        .collect();
    let rows = r.gen_range(0..=17);
    let floors = (0..rows).map(|_| 2.0 * normal(r)).collect();
    PencilSdp { pencils, floors }
}

impl PencilSdp {
    pub fn feasible(&self, t: f64) -> bool {
        self.floors.iter().all(|c| t >= *c)
            && self.pencils.iter().all(|(b, a)| min_eig(&(b.scale(t) - a)) >= 0.0)
    }

    /// Bisection on `t` with an eigenvalue feasibility test.
    pub fn bisection_value(&self) -> f64 {
        let mut hi = 1.0;
        while !self.feasible(hi) {
            hi *= 2.0;
        }
        let mut lo = -1.0;
        while self.feasible(lo) {
            lo *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        hi
    }
}

/// Proptest configuration with a fixed seed and no persistence files.
pub fn fixed_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x7e57_5eed),
        failure_persistence: None,
        ..proptest::test_runner::Config::default()
    }
}

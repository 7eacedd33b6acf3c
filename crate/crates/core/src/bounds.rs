//! Closed-form yield/cost bound functions and exact smoothed values for
//! isotropic reference families.

use thiserror::Error;

use crate::linalg::DensityMatrix;
use crate::measures::{Evaluator, MeasureError};
use crate::sets::FreeSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("error pair ({0}, {1}) is outside the admissible region")]
    OutOfRegion(f64, f64),
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("bound comparison failed: {0}")]
    AssertionFailure(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

/// Error tolerances for the yield (`eps1`) and the cost (`eps2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    pub eps1: f64,
    pub eps2: f64,
}

/// Which expression of `f` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `ε₁ + √ε₂ < 1`: `f` is the smaller of both expressions.
    SqrtRegion,
    /// Only `(√(1−ε₂) − √ε₁)^{-2}` is defined.
    FallbackRegion,
}

impl ErrorPair {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps1) || !(0.0..=1.0).contains(&eps2) {
            return Err(BoundsError::OutOfRegion(eps1, eps2));
        }
        Ok(Self { eps1, eps2 })
    }

    pub fn region(&self) -> Region {
        if self.eps1 + self.eps2.sqrt() < 1.0 {
            Region::SqrtRegion
        } else {
            Region::FallbackRegion
        }
    }

    fn require_sum_le_one(&self) -> Result<()> {
        if self.eps1 + self.eps2 > 1.0 {
            return Err(BoundsError::OutOfRegion(self.eps1, self.eps2));
        }
        Ok(())
    }

    fn require_sum_lt_one(&self) -> Result<()> {
        if self.eps1 + self.eps2 >= 1.0 {
            return Err(BoundsError::OutOfRegion(self.eps1, self.eps2));
        }
        Ok(())
    }
}

fn fallback_branch(e: &ErrorPair) -> f64 {
    ((1.0 - e.eps2).sqrt() - e.eps1.sqrt()).powi(-2)
}

/// The conversion overhead `f(ε₁, ε₂)`. On the boundary `ε₁ + √ε₂ = 1`
/// the first expression diverges and the fallback is used.
pub fn f_bound(e: ErrorPair) -> Result<f64> {
    e.require_sum_le_one()?;
    let second = fallback_branch(&e);
    Ok(match e.region() {
        Region::SqrtRegion => (1.0 / (1.0 - e.eps1 - e.eps2.sqrt())).min(second),
        Region::FallbackRegion => second,
    })
}

pub fn log_f(e: ErrorPair) -> Result<f64> {
    f_bound(e).map(f64::log2)
}

/// `ε′ = (√(ε₁(1−ε₂)) + √(ε₂(1−ε₁)))²`.
pub fn eps_prime(e: ErrorPair) -> Result<f64> {
    e.require_sum_lt_one()?;
    let a = (e.eps1 * (1.0 - e.eps2)).sqrt();
    let b = (e.eps2 * (1.0 - e.eps1)).sqrt();
    Ok((a + b).powi(2))
}

/// Interval of `ε₁` on which the first expression of `f` is the smaller.
pub fn crossing_interval(eps2: f64) -> (f64, f64) {
    let s = (1.0 - eps2).sqrt();
    let r = 1.0 - eps2.sqrt();
    (0.5 * (1.0 - s) * r, 0.5 * (1.0 + s) * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub pair: ErrorPair,
    pub log_f: f64,
    pub log_inv_1m_eps_prime: f64,
    pub region: Region,
    pub crossing: (f64, f64),
}

/// Both bound functions at one pair. The `ε′` bound is never looser.
pub fn compare_bounds(e: ErrorPair) -> Result<BoundReport> {
    let lf = log_f(e)?;
    let ep = eps_prime(e)?;
    let lp = -(1.0 - ep).log2();
    if lp > lf + 1e-12 {
        return Err(BoundsError::AssertionFailure(format!(
            "log 1/(1-eps') = {lp} exceeds log f = {lf} at ({}, {})",
            e.eps1, e.eps2
        )));
    }
    Ok(BoundReport {
        pair: e,
        log_f: lf,
        log_inv_1m_eps_prime: lp,
        region: e.region(),
        crossing: crossing_interval(e.eps2),
    })
}

/// `(Σᵢ √(pᵢ qᵢ))²`.
pub fn classical_fidelity(p: &[f64], q: &[f64]) -> Result<f64> {
    let valid = |d: &[f64]| {
        d.iter().all(|&x| x >= -1e-12) && (d.iter().sum::<f64>() - 1.0).abs() <= 1e-9
    };
    if p.len() != q.len() || !valid(p) || !valid(q) {
        return Err(BoundsError::InvalidParameter("not a pair of distributions".into()));
    }
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum();
    Ok(s * s)
}

fn binary_fidelity(eta: f64, kappa: f64) -> f64 {
    let s = (eta * kappa).sqrt() + ((1.0 - eta) * (1.0 - kappa)).sqrt();
    s * s
}

const ETA_TOL: f64 = 1e-12;

/// Extreme `η` with `F_cl((η,1−η), (κ,1−κ)) ≥ 1 − ε`. The fidelity rises
/// on `[0, κ]` and falls on `[κ, 1]`, so each end is found by bisection.
pub fn eta_bounds(kappa: f64, eps: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&kappa) || !(0.0..=1.0).contains(&eps) {
        return Err(BoundsError::InvalidParameter(format!("kappa {kappa}, eps {eps}")));
    }
    let target = 1.0 - eps;
    let f = |eta: f64| binary_fidelity(eta, kappa);
    let eta_min = if f(0.0) >= target {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, kappa);
        while hi - lo > ETA_TOL {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let eta_max = if f(1.0) >= target {
        1.0
    } else {
        let (mut lo, mut hi) = (kappa, 1.0);
        while hi - lo > ETA_TOL {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok((eta_min.clamp(0.0, 1.0), eta_max.clamp(0.0, 1.0)))
}

/// Whether the free set spans all states or a lower-dimensional slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    FullDim,
    ReducedDim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedValues {
    /// Known only on the parameter edges (`ε = 0` or `κ = 1`).
    pub d_h: Option<f64>,
    pub d_max_smooth: f64,
    /// Full-dimensional mode only.
    pub d_s_smooth: Option<f64>,
}

fn check_r_kappa(r: f64, kappa: f64) -> Result<()> {
    if !(r >= 0.0) || !(0.0..=1.0).contains(&kappa) {
        return Err(BoundsError::InvalidParameter(format!("r {r}, kappa {kappa}")));
    }
    Ok(())
}

fn lg(x: f64) -> f64 {
    x.log2()
}

/// Exact smoothed measures of `κΦ + (1−κ)σ*` for a reference state `Φ` of
/// value `r` bits whose robustness collapses.
pub fn closed_form_smoothed(r: f64, kappa: f64, eps: f64, mode: Mode) -> Result<SmoothedValues> {
    check_r_kappa(r, kappa)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(BoundsError::InvalidParameter(format!("eps {eps}")));
    }
    let (eta_min, eta_max) = eta_bounds(kappa, eps)?;
    let floor = (-r).exp2();
    let d_h = if kappa == 1.0 {
        Some(r + lg(1.0 / (1.0 - eps)))
    } else if eps == 0.0 {
        match mode {
            Mode::FullDim => Some(0.0),
            Mode::ReducedDim if kappa == 0.0 => Some(lg(1.0 / (1.0 - floor))),
            Mode::ReducedDim => Some(0.0),
        }
    } else {
        None
    };
    let above = if eta_min > 0.0 { r + lg(eta_min) } else { f64::NEG_INFINITY };
    Ok(match mode {
        Mode::FullDim => {
            let v = above.max(0.0);
            SmoothedValues {
                d_h,
                d_max_smooth: v,
                d_s_smooth: Some(v),
            }
        }
        Mode::ReducedDim => {
            let v = if eta_min >= floor {
                above
            } else if eta_max <= floor {
                lg((1.0 - eta_max) / (1.0 - floor))
            } else {
                0.0
            };
            SmoothedValues {
                d_h,
                d_max_smooth: v.max(0.0),
                d_s_smooth: None,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicValues {
    pub d_min: f64,
    pub d_max: f64,
    /// Full-dimensional mode: the standard robustness, equal to `d_max`.
    pub d_s: Option<f64>,
    /// Reduced mode: the affine hypothesis-testing value, equal to `d_min`.
    pub d_min_aff: Option<f64>,
}

/// Unsmoothed measures of `κΦ + (1−κ)σ*`.
pub fn isotropic_exact(r: f64, kappa: f64, mode: Mode) -> Result<IsotropicValues> {
    check_r_kappa(r, kappa)?;
    let floor = (-r).exp2();
    let upper = if kappa > 0.0 { r + lg(kappa) } else { f64::NEG_INFINITY };
    Ok(match mode {
        Mode::FullDim => {
            let d_min = if kappa == 1.0 { r } else { 0.0 };
            let d_max = upper.max(0.0);
            IsotropicValues {
                d_min,
                d_max,
                d_s: Some(d_max),
                d_min_aff: None,
            }
        }
        Mode::ReducedDim => {
            let d_min = if kappa == 1.0 {
                r
            } else if kappa == 0.0 {
                lg(1.0 / (1.0 - floor))
            } else {
                0.0
            };
            let d_max = upper.max(lg((1.0 - kappa) / (1.0 - floor))).max(0.0);
            IsotropicValues {
                d_min,
                d_max,
                d_s: None,
                d_min_aff: Some(d_min),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldCostReport {
    pub bounds: BoundReport,
    pub yield_rate: f64,
    pub cost_rate: f64,
    pub f_holds: bool,
    pub eps_prime_holds: bool,
}

impl YieldCostReport {
    pub fn passed(&self) -> bool {
        self.f_holds && self.eps_prime_holds
    }
}

const YIELD_COST_TOL: f64 = 1e-6;

/// Checks `yield(ε₁) ≤ cost(ε₂) + log f` and the tighter `log 1/(1−ε′)` bound.
pub fn yield_cost_check(
    rho: &DensityMatrix,
    set: &FreeSet,
    ladder: &[f64],
    e: ErrorPair,
    evaluator: &Evaluator,
) -> Result<YieldCostReport> {
    let bounds = compare_bounds(e)?;
    let y = evaluator.one_shot_yield(rho, set, ladder, e.eps1)?;
    let c = evaluator.one_shot_cost(rho, set, ladder, e.eps2)?;
    Ok(YieldCostReport {
        bounds,
        yield_rate: y,
        cost_rate: c,
        f_holds: y <= c + bounds.log_f + YIELD_COST_TOL,
        eps_prime_holds: y <= c + bounds.log_inv_1m_eps_prime + YIELD_COST_TOL,
    })
}

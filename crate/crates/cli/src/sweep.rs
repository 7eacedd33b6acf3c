//! CSV sweeps over the bound functions and the isotropic Strange family.

use std::path::Path;

use clap::ValueEnum;
use resq::bounds::{self, ErrorPair, Mode, Region};
use resq::measures::Evaluator;
use resq::sets;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Bounds,
    Isotropic,
}

pub const BOUNDS_HEADER: [&str; 5] = ["eps1", "eps2", "log_f", "log_eps_prime", "region"];
pub const ISOTROPIC_HEADER: [&str; 6] = ["kappa", "dmin", "dmax", "ds", "dh_eps", "closed_form_deltas"];

fn check_step(step: f64) -> Result<(), CliError> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(CliError::Parse(format!("step {step} not in (0, 0.5]")));
    }
    Ok(())
}

/// Multiples `k·step` for `k = first..` up to `limit` (with a little slack for rounding).
fn ladder(step: f64, first: usize, limit: f64) -> Vec<f64> {
    (first..)
        .map(|k| k as f64 * step)
        .take_while(|x| *x <= limit + 1e-12)
        .map(|x| x.min(limit))
        .collect()
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.12}")
    }
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Unwritable(format!("{}: {e}", path.display()))
}

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<usize, CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))?;
    Ok(rows.len())
}

/// Rows for every `(k₁·step, k₂·step)` with `k₁, k₂ ≥ 1` and `ε₁ + ε₂ < 1`.
/// For `step = 0.5` no cell qualifies.
pub fn bounds_rows(step: f64) -> Result<Vec<Vec<String>>, CliError> {
    check_step(step)?;
    let axis = ladder(step, 1, 1.0);
    let mut rows = Vec::new();
    for &e1 in &axis {
        for &e2 in &axis {
            if e1 + e2 >= 1.0 - 1e-12 {
                continue;
            }
            let p = ErrorPair::new(e1, e2).map_err(|e| CliError::Invalid(e.to_string()))?;
            let lf = bounds::log_f(p).map_err(|e| CliError::Invalid(e.to_string()))?;
            let ep = bounds::eps_prime(p).map_err(|e| CliError::Invalid(e.to_string()))?;
            let region = match p.region() {
                Region::SqrtRegion => "sqrt",
                Region::FallbackRegion => "fallback",
            };
            rows.push(vec![num(e1), num(e2), num(lf), num(-(1.0 - ep).log2()), region.into()]);
        }
    }
    Ok(rows)
}

/// `κ = 0, step, …, 1` on `κ S + (1−κ)(I − S)/2` against the qutrit hull.
/// The last column is the largest deviation from the closed forms.
pub fn isotropic_rows(step: f64, eps: f64, ev: &Evaluator) -> Result<Vec<Vec<String>>, CliError> {
    check_step(step)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(CliError::Parse(format!("eps {eps} not in [0, 1)")));
    }
    let invalid = |e: &dyn std::fmt::Display| CliError::Invalid(e.to_string());
    let set = sets::stabilizer_states_qutrit(1).map_err(|e| invalid(&e))?;
    let strange = sets::strange_pure();
    let phi = strange.density();
    let sigma = sets::complement(&strange);
    let mut kappas = ladder(step, 0, 1.0);
    if kappas.last().is_some_and(|k| *k < 1.0 - 1e-12) {
        kappas.push(1.0);
    }
    let mut rows = Vec::new();
    for kappa in kappas {
        let rho = sets::isotropic(&phi, &sigma, kappa).map_err(|e| invalid(&e))?;
        let dmin = ev.d_min(&rho, &set)?.bits();
        let dmax = ev.d_max(&rho, &set)?.bits();
        let ds = ev.d_s(&rho, &set)?.bits();
        let dh = ev.d_h(&rho, &set, eps)?.bits();
        let exact = bounds::isotropic_exact(1.0, kappa, Mode::FullDim).map_err(|e| invalid(&e))?;
        let smooth = bounds::closed_form_smoothed(1.0, kappa, eps, Mode::FullDim).map_err(|e| invalid(&e))?;
        let mut delta = (dmin - exact.d_min).abs().max((dmax - exact.d_max).abs());
        if let Some(v) = exact.d_s {
            delta = delta.max((ds - v).abs());
        }
        if let Some(v) = smooth.d_h {
            delta = delta.max((dh - v).abs());
        }
        rows.push(vec![num(kappa), num(dmin), num(dmax), num(ds), num(dh), format!("{delta:.3e}")]);
    }
    Ok(rows)
}

/// Writes the sweep and returns the number of data rows.
pub fn cmd_sweep(kind: SweepKind, step: f64, eps: f64, output: &Path, ev: &Evaluator) -> Result<usize, CliError> {
    match kind {
        SweepKind::Bounds => write_rows(output, &BOUNDS_HEADER, &bounds_rows(step)?),
        SweepKind::Isotropic => write_rows(output, &ISOTROPIC_HEADER, &isotropic_rows(step, eps, ev)?),
    }
}

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use resq::convex::SolverOptions;
use resq::linalg::DensityMatrix;
use resq::measures::{stab_norm, Evaluator, Flag, MeasureOptions, MeasureValue};
use resq::sets::{self, FreeSet};

use crate::error::CliError;
use crate::files::{encode_matrix, StateFile};
use crate::report::{format_value, Diagnostics, Report, ResultEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetName {
    /// Stabilizer hull, qubit or qutrit by dimension.
    Stab,
    /// Qutrit stabilizer hull.
    Stab3,
    /// Diagonal (incoherent) states.
    Coh,
    /// PPT states of a bipartition.
    Ppt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    Dmin,
    /// With `--eps > 0`, the smoothed version.
    Dmax,
    /// With `--eps > 0`, the smoothed version.
    Ds,
    Dh,
    /// Affine-hull `D_min`; with `--eps > 0`, the affine `D_H`.
    #[value(name = "dmins_aff")]
    DminsAff,
    Weight,
    Stabnorm,
    Rtr,
    Gfid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRequest {
    pub state: String,
    pub set: SetName,
    pub measure: MeasureName,
    pub eps: f64,
    pub k: Option<f64>,
}

/// Environment variable overriding the solver feasibility and gap targets.
pub const TOL_ENV: &str = "RESQ_TOL";

/// Environment variable capping interior-point iterations.
pub const MAX_ITER_ENV: &str = "RESQ_MAX_ITER";

pub fn solver_options() -> Result<SolverOptions, CliError> {
    let mut opts = tolerance_options()?;
    if let Ok(s) = std::env::var(MAX_ITER_ENV) {
        opts.max_iter = s
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{MAX_ITER_ENV}={s:?} is not a count")))?;
    }
    Ok(opts)
}

fn tolerance_options() -> Result<SolverOptions, CliError> {
    match std::env::var(TOL_ENV) {
        Ok(s) => {
            let tol: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("{TOL_ENV}={s:?} is not a number")))?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(CliError::Parse(format!("{TOL_ENV}={tol} must lie in (0, 1)")));
            }
            Ok(SolverOptions::with_tolerance(tol))
        }
        Err(_) => Ok(SolverOptions::precise()),
    }
}

pub fn evaluator() -> Result<Evaluator, CliError> {
    Ok(Evaluator::new(MeasureOptions {
        solver: solver_options()?,
        ..MeasureOptions::default()
    }))
}

/// Subsystem dimensions of a catalog state.
fn catalog_dims(label: &str, d: usize) -> Vec<usize> {
    let l = label.trim().to_ascii_lowercase();
    if l == "hoggar" {
        vec![2, 2, 2]
    } else if l.starts_with("bell") {
        let m = (d as f64).sqrt().round() as usize;
        vec![m, m]
    } else {
        vec![d]
    }
}

/// A catalog label, or else a path to a state file.
pub fn load_state(source: &str) -> Result<(DensityMatrix, Vec<usize>), CliError> {
    if let Ok(rho) = sets::named_state(source) {
        let dims = catalog_dims(source, rho.dim());
        return Ok((rho, dims));
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Parse(format!("{source:?} is neither a catalog label nor a file")));
    }
    let file = StateFile::load(path)?;
    Ok((file.to_state()?, file.dims))
}

/// `Some(n)` when `d = base^n`.
fn exponent(d: usize, base: usize) -> Option<usize> {
    let mut n = 0;
    let mut x = 1;
    while x < d {
        x *= base;
        n += 1;
    }
    (x == d).then_some(n)
}

pub fn build_set(set: SetName, dims: &[usize]) -> Result<FreeSet, CliError> {
    let d: usize = dims.iter().product();
    let invalid = |why: &str| CliError::Invalid(format!("{set:?} with dims {dims:?}: {why}"));
    let built = match set {
        // `stab` follows the local dimension; `stab3` insists on qutrits
        SetName::Stab => match (exponent(d, 2), exponent(d, 3)) {
            (Some(n @ 1..=3), _) => sets::stabilizer_states(n),
            (_, Some(n @ 1..=2)) => sets::stabilizer_states_qutrit(n),
            _ => return Err(invalid("needs 1 to 3 qubits or 1 to 2 qutrits")),
        },
        SetName::Stab3 => match exponent(d, 3) {
            Some(n @ 1..=2) => sets::stabilizer_states_qutrit(n),
            _ => return Err(invalid("needs 1 or 2 qutrits")),
        },
        SetName::Coh => sets::coherence_set(d),
        SetName::Ppt => match dims {
            [a, b] => sets::ppt_set(*a, *b),
            _ => return Err(invalid("needs exactly two subsystems")),
        },
    };
    built.map_err(|e| CliError::Invalid(e.to_string()))
}

fn measure_entry(name: &str, v: &MeasureValue, diag: &mut Diagnostics) -> ResultEntry {
    diag.dual_gap = Some(format!("{:.3e}", v.dual_gap));
    diag.flag = v.flag.map(|f| match f {
        Flag::Contained => "contained".to_string(),
        Flag::Infinite => "infinite".to_string(),
    });
    let mut entry = ResultEntry::value(name, v.bits());
    entry.witness = v.witness_state.as_ref().map(|w| encode_matrix(w.matrix()));
    entry
}

pub fn cmd_measure(req: &MeasureRequest, ev: &Evaluator) -> Result<Report, CliError> {
    if !(0.0..1.0).contains(&req.eps) {
        return Err(CliError::Parse(format!("eps {} not in [0, 1)", req.eps)));
    }
    let (rho, dims) = load_state(&req.state)?;
    let set = build_set(req.set, &dims)?;
    let mut diag = Diagnostics {
        feas_tol: ev.options.solver.feas_tol,
        gap_tol: ev.options.solver.gap_tol,
        ..Diagnostics::default()
    };
    let smooth = req.eps > 0.0;
    let entry = match req.measure {
        MeasureName::Dmin => measure_entry("d_min", &ev.d_min(&rho, &set)?, &mut diag),
        MeasureName::Dmax if smooth => measure_entry("d_max_smooth", &ev.d_max_smooth(&rho, &set, req.eps)?, &mut diag),
        MeasureName::Dmax => measure_entry("d_max", &ev.d_max(&rho, &set)?, &mut diag),
        MeasureName::Ds if smooth => measure_entry("d_s_smooth", &ev.d_s_smooth(&rho, &set, req.eps)?, &mut diag),
        MeasureName::Ds => measure_entry("d_s", &ev.d_s(&rho, &set)?, &mut diag),
        MeasureName::Dh => measure_entry("d_h", &ev.d_h(&rho, &set, req.eps)?, &mut diag),
        MeasureName::DminsAff if smooth => measure_entry("d_h_aff", &ev.d_h_aff(&rho, &set, req.eps)?, &mut diag),
        MeasureName::DminsAff => measure_entry("d_min_aff", &ev.d_min_aff(&rho, &set)?, &mut diag),
        MeasureName::Weight => ResultEntry::value("weight", ev.weight(&rho, &set)?),
        MeasureName::Rtr => ResultEntry::value("r_tr", ev.r_tr(&rho, &set)?),
        MeasureName::Stabnorm => {
            let n = match exponent(rho.dim(), 2) {
                Some(n) if n >= 1 => n,
                _ => return Err(CliError::Invalid("stabnorm needs qubit dims".into())),
            };
            ResultEntry::value("stab_norm", stab_norm(rho.matrix(), n)?)
        }
        MeasureName::Gfid => {
            let k = req.k.ok_or_else(|| CliError::Invalid("gfid needs --k".into()))?;
            let g = ev.g_fidelity(&rho, &set, k)?;
            diag.dual_gap = Some(format!("{:.3e}", g.gap()));
            ResultEntry::value("g_fidelity", g.primal)
        }
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("state".into(), req.state.clone());
    inputs.insert("set".into(), set.label().to_string());
    inputs.insert("dims".into(), format!("{dims:?}"));
    inputs.insert("eps".into(), format_value(req.eps));
    if let Some(k) = req.k {
        inputs.insert("k".into(), format_value(k));
    }
    Ok(Report {
        command: format!("measure {:?}", req.measure).to_lowercase(),
        inputs,
        results: vec![entry],
        diagnostics: diag,
        wall_time_ms: 0.0,
    })
}

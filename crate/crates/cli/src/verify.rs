//! Named verification suites over catalog states, bound functions and
//! twirling constructions. Every row carries its own tolerance.

use std::collections::BTreeMap;

use clap::ValueEnum;
use resq::bounds::{self, ErrorPair, Mode};
use resq::linalg::{c64, identity, pauli_string, trace_norm, DensityMatrix, PureState};
use resq::measures::{stab_norm, Evaluator};
use resq::sets::{self, FreeSet};
use resq::twirl::{self, Channel, MagicGate, StabilizerInput, UnitaryEnsemble};

use crate::report::{format_value, Diagnostics, Report, ResultEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Props,
    Bounds,
    Isotropic,
    Twirl,
    All,
}

type Fallible<T> = Result<T, String>;

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Default)]
struct Rows(Vec<ResultEntry>);

impl Rows {
    fn close(&mut self, name: &str, got: Fallible<f64>, want: f64, tol: f64) {
        let (value, pass) = match got {
            Ok(v) => (format_value(v), (v - want).abs() <= tol),
            Err(e) => (format!("error: {e}"), false),
        };
        self.0.push(ResultEntry {
            name: name.into(),
            value,
            expected: Some(format_value(want)),
            tolerance: Some(tol),
            pass: Some(pass),
            witness: None,
        });
    }

    /// `got ≥ bound`.
    fn at_least(&mut self, name: &str, got: Fallible<f64>, bound: f64) {
        let (value, pass) = match got {
            Ok(v) => (format_value(v), v >= bound),
            Err(e) => (format!("error: {e}"), false),
        };
        self.0.push(ResultEntry {
            name: name.into(),
            value,
            expected: Some(format!(">= {}", format_value(bound))),
            tolerance: None,
            pass: Some(pass),
            witness: None,
        });
    }

    fn holds(&mut self, name: &str, got: Fallible<bool>) {
        let (value, pass) = match got {
            Ok(b) => (b.to_string(), b),
            Err(e) => (format!("error: {e}"), false),
        };
        self.0.push(ResultEntry {
            name: name.into(),
            value,
            expected: Some("true".into()),
            tolerance: None,
            pass: Some(pass),
            witness: None,
        });
    }
}

fn qutrit_stab() -> Fallible<FreeSet> {
    sets::stabilizer_states_qutrit(1).map_err(s)
}

fn three(rows: &mut Rows, ev: &Evaluator, label: &str, rho: &DensityMatrix, set: &Fallible<FreeSet>, want: f64, tol: f64) {
    let set = match set {
        Ok(set) => set,
        Err(e) => {
            rows.close(&format!("{label} free set"), Err(e.clone()), want, tol);
            return;
        }
    };
    rows.close(&format!("{label} d_min"), ev.d_min(rho, set).map(|v| v.bits()).map_err(s), want, tol);
    rows.close(&format!("{label} d_max"), ev.d_max(rho, set).map(|v| v.bits()).map_err(s), want, tol);
    rows.close(&format!("{label} d_s"), ev.d_s(rho, set).map(|v| v.bits()).map_err(s), want, tol);
}

fn gap_of(ev: &Evaluator, rho: &DensityMatrix, set: &FreeSet) -> Fallible<f64> {
    let lo = ev.d_min(rho, set).map_err(s)?.bits();
    let hi = ev.d_max(rho, set).map_err(s)?.bits();
    Ok(hi - lo)
}

fn props(ev: &Evaluator, rows: &mut Rows) {
    let q3 = qutrit_stab();
    let strange = sets::strange_pure();
    three(rows, ev, "strange", &strange.density(), &q3, 1.0, 1e-6);

    let two = sets::stabilizer_states_qutrit(2).map_err(s);
    let ss = strange.kron(&strange).density();
    let ss_min = two.as_ref().map_err(Clone::clone).and_then(|t| ev.d_min(&ss, t).map(|v| v.bits()).map_err(s));
    rows.close("strange x2 d_min", ss_min, 3.0_f64.log2(), 1e-5);
    rows.close(
        "strange x2 d_max - d_min",
        two.as_ref().map_err(Clone::clone).and_then(|t| gap_of(ev, &ss, t)),
        0.0,
        1e-5,
    );

    let hog = sets::hoggar_pure().density();
    three(rows, ev, "hoggar", &hog, &sets::stabilizer_states(3).map_err(s), (12.0_f64 / 5.0).log2(), 1e-5);
    let flat = (1..64)
        .map(|p| pauli_string(3, p).map(|m| (hog.overlap(&m).abs() - 1.0 / 3.0).abs()))
        .try_fold(0.0_f64, |acc, x| x.map(|x| acc.max(x)))
        .map_err(s);
    rows.close("hoggar pauli flatness deviation", flat, 0.0, 1e-10);
    rows.close("hoggar stab_norm", stab_norm(hog.matrix(), 3).map_err(s), 2.75, 1e-10);

    three(rows, ev, "norrell", &sets::norrell_pure().density(), &q3, 1.5_f64.log2(), 1e-6);

    let face = sets::face_state();
    match sets::stabilizer_states(1) {
        Ok(stab1) => {
            rows.close("face d_max - d_min", gap_of(ev, &face, &stab1), 0.0, 1e-6);
            let ds_gap = ev
                .d_s(&face, &stab1)
                .map_err(s)
                .and_then(|ds| Ok(ds.bits() - ev.d_max(&face, &stab1).map_err(s)?.bits()));
            rows.at_least("face d_s - d_max", ds_gap, 1e-3);
        }
        Err(e) => rows.holds("face free set", Err(s(e))),
    }
    let stab2 = sets::stabilizer_states(2).map_err(s);
    rows.close(
        "face x2 d_max - d_min",
        stab2.as_ref().map_err(Clone::clone).and_then(|t| gap_of(ev, &face.kron(&face), t)),
        0.0,
        1e-6,
    );

    if let Ok(q3) = &q3 {
        let wt = ev.weight(&sets::complement(&sets::t_qutrit_pure()), q3).map_err(s);
        rows.close("weight((I - T)/2)", wt, 0.0, 1e-6);
        let ws = ev.weight(&sets::complement(&strange), q3).map_err(s);
        rows.close("weight((I - S)/2)", ws, 1.0, 1e-6);
        rows.close("strange r_tr", ev.r_tr(&strange.density(), q3).map_err(s), 0.5, 1e-6);
        rows.close("norrell r_tr", ev.r_tr(&sets::norrell_pure().density(), q3).map_err(s), 1.0 / 3.0, 1e-6);
        let g = ev.g_fidelity(&strange.density(), q3, 2.0).map_err(s);
        rows.close("strange G_F(K=2) primal - dual", g.map(|g| g.primal - g.dual), 0.0, 1e-6);
        if let Some(v) = q3.vertices().and_then(|v| v.first()) {
            let g = ev.g_fidelity(v, q3, 4.0).map_err(s);
            rows.close("free vertex G_F(K=4)", g.map(|g| g.primal), 0.25, 1e-8);
        }
    }

    for m in 2..=4 {
        let rho = sets::max_coherent_pure(m).density();
        let set = sets::coherence_set(m).map_err(s);
        let want = (m as f64).log2();
        let label = format!("max_coherent{m}");
        let get = |f: &dyn Fn(&FreeSet) -> Fallible<f64>| set.as_ref().map_err(Clone::clone).and_then(f);
        rows.close(&format!("{label} d_min"), get(&|t| ev.d_min(&rho, t).map(|v| v.bits()).map_err(s)), want, 1e-6);
        rows.close(&format!("{label} d_max"), get(&|t| ev.d_max(&rho, t).map(|v| v.bits()).map_err(s)), want, 1e-6);
        rows.close(
            &format!("{label} d_min_aff"),
            get(&|t| ev.d_min_aff(&rho, t).map(|v| v.bits()).map_err(s)),
            want,
            1e-6,
        );
    }

    three(rows, ev, "bell2 ppt", &sets::bell_pure(2).density(), &sets::ppt_set(2, 2).map_err(s), 1.0, 1e-6);
}

fn pair(a: f64, b: f64) -> Fallible<ErrorPair> {
    ErrorPair::new(a, b).map_err(s)
}

fn bounds_suite(ev: &Evaluator, rows: &mut Rows) {
    rows.close("f(0, 0)", pair(0.0, 0.0).and_then(|p| bounds::f_bound(p).map_err(s)), 1.0, 0.0);

    let grid = || {
        (0..100).flat_map(|i| (0..100).map(move |j| (i as f64 * 0.01, j as f64 * 0.01)))
            .filter(|(a, b)| a + b < 1.0)
    };
    let slack = grid().try_fold(f64::INFINITY, |acc, (a, b)| -> Fallible<f64> {
        let p = pair(a, b)?;
        let lf = bounds::log_f(p).map_err(s)?;
        let lp = -(1.0 - bounds::eps_prime(p).map_err(s)?).log2();
        Ok(acc.min(lf - lp))
    });
    rows.at_least("log f - log 1/(1-eps') on the 0.01 grid", slack, -1e-12);
    let second = grid()
        .filter(|(a, b)| a + b.sqrt() < 1.0)
        .try_fold(f64::INFINITY, |acc, (a, b)| -> Fallible<f64> {
            let ep = bounds::eps_prime(pair(a, b)?).map_err(s)?;
            Ok(acc.min((1.0 - ep) - (1.0 - a - b.sqrt())))
        });
    rows.at_least("(1-eps') - (1-eps1-sqrt eps2) on the 0.01 grid", second, -1e-12);
    let sym = grid().try_fold(0.0_f64, |acc, (a, b)| -> Fallible<f64> {
        let d = bounds::eps_prime(pair(a, b)?).map_err(s)? - bounds::eps_prime(pair(b, a)?).map_err(s)?;
        Ok(acc.max(d.abs()))
    });
    rows.close("eps' asymmetry on the 0.01 grid", sym, 0.0, 1e-15);

    let mut mismatches = 0usize;
    for i in 0..=200 {
        for j in 0..=200 {
            let (e1, e2) = (i as f64 * 0.005, j as f64 * 0.005);
            if e1 + e2.sqrt() >= 1.0 {
                continue;
            }
            let first = 1.0 / (1.0 - e1 - e2.sqrt());
            let fallback = ((1.0 - e2).sqrt() - e1.sqrt()).powi(-2);
            if (first - fallback).abs() < 1e-9 * first {
                continue;
            }
            let (lo, hi) = bounds::crossing_interval(e2);
            if (first < fallback) != (lo < e1 && e1 < hi) {
                mismatches += 1;
            }
        }
    }
    rows.close("crossing interval mismatches on the 0.005 grid", Ok(mismatches as f64), 0.0, 0.0);

    let ladder: Vec<f64> = (0..=16).map(|k| 0.125 * k as f64).collect();
    let states = [
        ("strange", sets::strange_pure().density(), qutrit_stab()),
        ("face", sets::face_state(), sets::stabilizer_states(1).map_err(s)),
        ("norrell", sets::norrell_pure().density(), qutrit_stab()),
    ];
    for (name, rho, set) in &states {
        for (a, b) in [(0.0, 0.0), (0.1, 0.1), (0.05, 0.2)] {
            let ok = set.as_ref().map_err(Clone::clone).and_then(|set| {
                let rep = bounds::yield_cost_check(rho, set, &ladder, pair(a, b)?, ev).map_err(s)?;
                Ok(rep.passed())
            });
            rows.holds(&format!("{name} yield-cost inequalities at ({a}, {b})"), ok);
        }
    }
}

fn isotropic_suite(ev: &Evaluator, rows: &mut Rows) {
    let q3 = match qutrit_stab() {
        Ok(q) => q,
        Err(e) => return rows.holds("qutrit stabilizer set", Err(e)),
    };
    let strange = sets::strange_pure();
    let phi = strange.density();
    let sigma = sets::complement(&strange);
    for kappa in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let rho = match sets::isotropic(&phi, &sigma, kappa) {
            Ok(r) => r,
            Err(e) => return rows.holds("isotropic state", Err(s(e))),
        };
        let want = match bounds::isotropic_exact(1.0, kappa, Mode::FullDim) {
            Ok(w) => w,
            Err(e) => return rows.holds("closed form", Err(s(e))),
        };
        let tag = |n: &str| format!("strange kappa={kappa} {n}");
        rows.close(&tag("d_min"), ev.d_min(&rho, &q3).map(|v| v.bits()).map_err(s), want.d_min, 1e-4);
        rows.close(&tag("d_max"), ev.d_max(&rho, &q3).map(|v| v.bits()).map_err(s), want.d_max, 1e-4);
        if let Some(ds) = want.d_s {
            rows.close(&tag("d_s"), ev.d_s(&rho, &q3).map(|v| v.bits()).map_err(s), ds, 1e-4);
        }
    }
    for eps in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let cf = match bounds::closed_form_smoothed(1.0, 1.0, eps, Mode::FullDim) {
            Ok(c) => c,
            Err(e) => return rows.holds("smoothed closed form", Err(s(e))),
        };
        let tag = |n: &str| format!("strange eps={eps} {n}");
        if let Some(h) = cf.d_h {
            rows.close(&tag("d_h"), ev.d_h(&phi, &q3, eps).map(|v| v.bits()).map_err(s), h, 1e-4);
        }
        rows.close(
            &tag("d_max_smooth"),
            ev.d_max_smooth(&phi, &q3, eps).map(|v| v.bits()).map_err(s),
            cf.d_max_smooth,
            1e-4,
        );
        if let Some(v) = cf.d_s_smooth {
            rows.close(&tag("d_s_smooth"), ev.d_s_smooth(&phi, &q3, eps).map(|v| v.bits()).map_err(s), v, 1e-4);
        }
    }
    // reduced-dimensional family: maximally coherent qutrit
    let coh = match sets::coherence_set(3) {
        Ok(c) => c,
        Err(e) => return rows.holds("coherence set", Err(s(e))),
    };
    let mc = sets::max_coherent_pure(3);
    let r = 3.0_f64.log2();
    for kappa in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let Ok(rho) = sets::isotropic(&mc.density(), &sets::complement(&mc), kappa) else {
            return rows.holds("isotropic state", Err("mixture failed".into()));
        };
        let Ok(want) = bounds::isotropic_exact(r, kappa, Mode::ReducedDim) else {
            return rows.holds("closed form", Err("closed form failed".into()));
        };
        let tag = |n: &str| format!("max_coherent3 kappa={kappa} {n}");
        rows.close(&tag("d_min"), ev.d_min(&rho, &coh).map(|v| v.bits()).map_err(s), want.d_min, 1e-4);
        rows.close(&tag("d_max"), ev.d_max(&rho, &coh).map(|v| v.bits()).map_err(s), want.d_max, 1e-4);
        if let Some(a) = want.d_min_aff {
            rows.close(&tag("d_min_aff"), ev.d_min_aff(&rho, &coh).map(|v| v.bits()).map_err(s), a, 1e-4);
        }
    }
}

/// Deterministic probe states for channel comparisons.
fn probe_states() -> Vec<DensityMatrix> {
    let mut out: Vec<DensityMatrix> = Vec::new();
    for k1 in 0..3 {
        for k2 in 0..3 {
            out.push(twirl::strange_sic_projector((k1, k2)));
        }
    }
    for k in 0..3 {
        if let Ok(b) = PureState::basis(3, k) {
            out.push(b.density());
        }
    }
    out.push(DensityMatrix::maximally_mixed(3));
    out.push(sets::norrell_pure().density());
    out.push(sets::t_qutrit_pure().density());
    let amps = [c64(0.3, 0.1), c64(-0.5, 0.4), c64(0.2, -0.7)];
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if let Ok(p) = PureState::from_slice(&amps.map(|z| z / norm)) {
        out.push(p.density());
    }
    out
}

fn twirl_suite(ev: &Evaluator, rows: &mut Rows) {
    let q3 = match qutrit_stab() {
        Ok(q) => q,
        Err(e) => return rows.holds("qutrit stabilizer set", Err(e)),
    };
    let strange = sets::strange_pure();
    let sl2 = twirl::sl2z3_cliffords().and_then(UnitaryEnsemble::uniform).map_err(s);
    let channel = sl2.as_ref().map_err(Clone::clone).and_then(|g| {
        twirl::measure_prepare_channel(&strange.density(), &q3, ev)
            .and_then(|c| c.symmetrized(g))
            .map_err(s)
    });
    let reference = |rho: &DensityMatrix| {
        let sp = strange.projector();
        let p = rho.overlap(&sp);
        sp.scale(p) + (identity(3) - &sp).scale((1.0 - p) / 2.0)
    };
    let dist = channel.as_ref().map_err(Clone::clone).and_then(|c| {
        probe_states().iter().try_fold(0.0_f64, |acc, rho| {
            let out = c.apply(rho).map_err(s)?;
            Ok(acc.max(trace_norm(&(out.matrix() - reference(rho))).map_err(s)?))
        })
    });
    rows.close("strange channel vs reference map", dist, 0.0, 1e-9);
    let idem = channel.as_ref().map_err(Clone::clone).and_then(|c| {
        probe_states().iter().try_fold(0.0_f64, |acc, rho| {
            let once = c.apply(rho).map_err(s)?;
            let twice = c.apply(&once).map_err(s)?;
            Ok(acc.max((once.matrix() - twice.matrix()).norm()))
        })
    });
    rows.close("strange channel idempotence", idem, 0.0, 1e-9);
    rows.holds(
        "strange channel is free",
        channel.as_ref().map_err(Clone::clone).and_then(|c| c.verify_free(&q3).map(|r| r.free).map_err(s)),
    );

    let target = (identity(3).scale(3.0) - strange.projector()).unscale(8.0);
    let sic = sl2.as_ref().map_err(Clone::clone).and_then(|g| {
        let mut worst: f64 = 0.0;
        for k1 in 0..3 {
            for k2 in 0..3 {
                if (k1, k2) != (0, 0) {
                    let out = twirl::twirl_average(g, &twirl::strange_sic_projector((k1, k2))).map_err(s)?;
                    worst = worst.max((out.matrix() - &target).norm());
                }
            }
        }
        Ok(worst)
    });
    rows.close("SL(2,Z3) twirl of SIC projectors vs (3I - S)/8", sic, 0.0, 1e-9);
    rows.holds(
        "SL(2,Z3) ensemble is free",
        sl2.as_ref().map_err(Clone::clone).and_then(|g| g.verify_free(&q3).map(|r| r.free).map_err(s)),
    );

    let hog = sets::hoggar_pure();
    match twirl::hoggar_group(twirl::DEFAULT_GROUP_CAP) {
        Ok(g) => {
            rows.holds(&format!("hoggar closure under cap ({} elements)", g.len()), Ok(!g.capped));
            let fixes = g.elements.iter().all(|u| {
                let img = u * hog.amplitudes();
                (1.0 - hog.amplitudes().dotc(&img).norm()).abs() <= 1e-9
            });
            rows.holds("hoggar group stabilizes |Hog>", Ok(fixes));
            rows.holds(
                "hoggar eigenvector uniqueness",
                twirl::eigenvector_uniqueness(&g.elements, &hog).map_err(s),
            );
            let free = sets::stabilizer_states(3)
                .map_err(s)
                .and_then(|set| g.ensemble().and_then(|e| e.verify_free(&set)).map(|r| r.free).map_err(s));
            rows.holds("hoggar twirl is free", free);
        }
        Err(e) => rows.holds("hoggar closure", Err(s(e))),
    }

    let face_free = sets::stabilizer_states(1).map_err(s).and_then(|set| {
        twirl::face_ensemble().and_then(|e| e.verify_free(&set)).map(|r| r.free).map_err(s)
    });
    rows.holds("face twirl is free", face_free);

    for gate in [MagicGate::QubitT, MagicGate::QutritT, MagicGate::Toffoli] {
        for input in [StabilizerInput::Zero, StabilizerInput::Plus] {
            let name = format!("{gate:?} {input:?} dephasing fixes its state and is free");
            let ok = twirl::clifford_magic_dephasing(gate, input).map_err(s).and_then(|(ens, psi)| {
                let set = match gate.shape() {
                    (2, n) => sets::stabilizer_states(n),
                    (_, n) => sets::stabilizer_states_qutrit(n),
                }
                .map_err(s)?;
                let out = twirl::twirl_average(&ens, &psi.density()).map_err(s)?;
                let fixed = (out.matrix() - psi.projector()).norm() <= 1e-9;
                Ok(fixed && ens.verify_free(&set).map_err(s)?.free)
            });
            rows.holds(&name, ok);
        }
    }
}

pub fn cmd_verify(suite: Suite, ev: &Evaluator) -> Report {
    let mut rows = Rows::default();
    let run: &[(Suite, fn(&Evaluator, &mut Rows))] = &[
        (Suite::Props, props),
        (Suite::Bounds, bounds_suite),
        (Suite::Isotropic, isotropic_suite),
        (Suite::Twirl, twirl_suite),
    ];
    for (which, f) in run {
        if suite == Suite::All || suite == *which {
            f(ev, &mut rows);
        }
    }
    let mut inputs = BTreeMap::new();
    inputs.insert("suite".into(), format!("{suite:?}").to_lowercase());
    Report {
        command: "verify".into(),
        inputs,
        results: rows.0,
        diagnostics: Diagnostics {
            feas_tol: ev.options.solver.feas_tol,
            gap_tol: ev.options.solver.gap_tol,
            ..Diagnostics::default()
        },
        wall_time_ms: 0.0,
    }
}

//! Randomized invariant checks shared by the acceptance run and the
//! property suites. Each returns a summary line or the first failure.

use super::*;
use resq::convex::{solve_lp, solve_sdp, AffineRow, LinearProgram, PsdBlock, SdpProblem, SolverOptions};
use resq::measures::Evaluator;
use resq::sets::{self, FreeSet};

pub type Check = Result<String, String>;

/// Free sets used by the randomized measure checks.
pub fn test_sets() -> Vec<FreeSet> {
    vec![
        sets::stabilizer_states(1).unwrap(),
        sets::stabilizer_states(2).unwrap(),
        sets::stabilizer_states_qutrit(1).unwrap(),
        sets::coherence_set(3).unwrap(),
        sets::ppt_set(2, 2).unwrap(),
    ]
}

fn err<E: std::fmt::Debug>(ctx: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{ctx}: {e:?}")
}

/// `d_min_aff ≤ d_min ≤ d_max ≤ d_s` (the last only when finite).
pub fn ordering_chain(set: &FreeSet, seed: u64, count: usize) -> Check {
    let ev = Evaluator::default();
    let mut r = rng(seed);
    let d = set.dim();
    let mut finite_ds = 0;
    for i in 0..count {
        let rank = r.gen_range(1..=d);
        let rho = random_state(&mut r, d, rank);
        let ctx = format!("{} sample {i}", set.label());
        let aff = ev.d_min_aff(&rho, set).map_err(err(&format!("{ctx} d_min_aff")))?.bits();
        let dmin = ev.d_min(&rho, set).map_err(err(&format!("{ctx} d_min")))?.bits();
        let dmax = ev.d_max(&rho, set).map_err(err(&format!("{ctx} d_max")))?.bits();
        let ds = ev.d_s(&rho, set).map_err(err(&format!("{ctx} d_s")))?;
        let mut chain_ok = aff <= dmin + 1e-6 && dmin <= dmax + 1e-6;
        if !ds.is_infinite() {
            finite_ds += 1;
            chain_ok &= dmax <= ds.bits() + 1e-6;
        }
        if !chain_ok {
            return Err(format!(
                "{ctx}: aff {aff} min {dmin} max {dmax} s {}",
                ds.bits()
            ));
        }
    }
    Ok(format!("{}: {count} states, {finite_ds} with finite d_s", set.label()))
}

/// `d_h(ρ, 0) = d_min(ρ)` and the ε-monotonicity of the smoothed measures.
pub fn eps_monotonicity(set: &FreeSet, seed: u64, count: usize, grid: &[f64]) -> Check {
    let ev = Evaluator::default();
    let mut r = rng(seed);
    let d = set.dim();
    for i in 0..count {
        let rank = r.gen_range(1..=d);
        let rho = random_state(&mut r, d, rank);
        let ctx = format!("{} sample {i}", set.label());
        let dmin = ev.d_min(&rho, set).map_err(err(&format!("{ctx} d_min")))?.bits();
        let mut prev: Option<(f64, f64, Option<f64>)> = None;
        for &eps in grid {
            let h = ev.d_h(&rho, set, eps).map_err(err(&format!("{ctx} d_h")))?.bits();
            let m = ev.d_max_smooth(&rho, set, eps).map_err(err(&format!("{ctx} d_max_smooth")))?.bits();
            let s = ev.d_s_smooth(&rho, set, eps).map_err(err(&format!("{ctx} d_s_smooth")))?;
            let s = (!s.is_infinite()).then(|| s.bits());
            if eps == 0.0 && (h - dmin).abs() > 1e-6 {
                return Err(format!("{ctx}: d_h(0) = {h} but d_min = {dmin}"));
            }
            if let Some((ph, pm, ps)) = prev {
                let s_bad = matches!((ps, s), (Some(a), Some(b)) if b > a + 1e-6);
                if h < ph - 1e-6 || m > pm + 1e-6 || s_bad {
                    return Err(format!("{ctx}: not monotone at eps {eps}: h {ph}->{h} max {pm}->{m} s {ps:?}->{s:?}"));
                }
            }
            prev = Some((h, m, s));
        }
    }
    Ok(format!("{}: {count} states x {} eps values", set.label(), grid.len()))
}

/// Every measure is zero on every vertex.
pub fn vertex_nullity(set: &FreeSet) -> Check {
    let ev = Evaluator::default();
    let vertices: Vec<_> = match set.vertices() {
        Some(v) => v.to_vec(),
        None => return Err(format!("{} has no vertex list", set.label())),
    };
    let mut worst: f64 = 0.0;
    for (i, v) in vertices.iter().enumerate() {
        let ctx = format!("{} vertex {i}", set.label());
        let vals = [
            ev.d_min(v, set).map_err(err(&format!("{ctx} d_min")))?.bits(),
            ev.d_max(v, set).map_err(err(&format!("{ctx} d_max")))?.bits(),
            ev.d_s(v, set).map_err(err(&format!("{ctx} d_s")))?.bits(),
            ev.d_min_aff(v, set).map_err(err(&format!("{ctx} d_min_aff")))?.bits(),
            ev.d_max_smooth(v, set, 0.1).map_err(err(&format!("{ctx} d_max_smooth")))?.bits(),
            ev.r_tr(v, set).map_err(err(&format!("{ctx} r_tr")))?,
            1.0 - ev.weight(v, set).map_err(err(&format!("{ctx} weight")))?,
        ];
        let m = vals.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if m > 1e-6 {
            return Err(format!("{ctx}: values {vals:?}"));
        }
        worst = worst.max(m);
    }
    Ok(format!("{}: {} vertices, worst {worst:.1e}", set.label(), vertices.len()))
}

/// Vertex-hull `d_max` against the generated-cone description of the same set.
pub fn hull_vs_cone(set: &FreeSet, seed: u64, count: usize) -> Check {
    let ev = Evaluator::default();
    let cone = set.as_generated_cone().ok_or("set has no vertex list")?;
    let mut r = rng(seed);
    let d = set.dim();
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let rank = r.gen_range(1..=d);
        let rho = random_state(&mut r, d, rank);
        let ctx = format!("sample {i}");
        let a = ev.d_max(&rho, set).map_err(err(&format!("{ctx} d_max")))?.bits();
        let b = ev.d_max(&rho, &cone).map_err(err(&format!("{ctx} d_max")))?.bits();
        worst = worst.max((a - b).abs());
        if (a - b).abs() > 1e-5 {
            return Err(format!("{ctx}: hull {a} cone {b}"));
        }
    }
    Ok(format!("{}: {count} states, worst {worst:.1e}", set.label()))
}

pub fn g_fidelity_duality(set: &FreeSet, seed: u64, count: usize) -> Check {
    let ev = Evaluator::default();
    let mut r = rng(seed);
    let d = set.dim();
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let rank = r.gen_range(1..=d);
        let rho = random_state(&mut r, d, rank);
        let k = r.gen_range(1.0..4.0);
        let g = ev.g_fidelity(&rho, set, k).map_err(err(&format!("sample {i}")))?;
        worst = worst.max(g.gap());
        if g.gap() > 1e-6 {
            return Err(format!("sample {i} K {k}: primal {} dual {}", g.primal, g.dual));
        }
    }
    Ok(format!("{}: {count} pairs, worst gap {worst:.1e}", set.label()))
}

/// Interior-point LP values against the tableau simplex.
pub fn lp_oracle(seed: u64, count: usize) -> Check {
    let mut r = rng(seed);
    let opts = SolverOptions::precise();
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let m = r.gen_range(1..=6);
        let n = r.gen_range(m + 1..=m + 8);
        let lp = random_lp(&mut r, m, n);
        let reference = match tableau_simplex(&lp.a, &lp.b, &lp.c) {
            TableauOutcome::Optimal(v) => v,
            other => return Err(format!("LP {i}: simplex reports {other:?} on a feasible bounded program")),
        };
        let prob = LinearProgram {
            objective: lp.c.clone(),
            eq_matrix: lp.a.clone(),
            eq_rhs: lp.b.clone(),
            lower: vec![0.0; n],
        };
        let sol = solve_lp(&prob, &opts).map_err(err(&format!("LP {i}")))?;
        if !sol.is_optimal() {
            return Err(format!("LP {i}: status {:?}", sol.status));
        }
        if sol.dual_value > sol.value + 1e-9 {
            return Err(format!("LP {i}: weak duality {} > {}", sol.dual_value, sol.value));
        }
        let diff = (sol.value - reference).abs() / reference.abs().max(1.0);
        worst = worst.max(diff);
        if diff > 1e-7 {
            return Err(format!("LP {i}: interior point {} simplex {reference}", sol.value));
        }
    }
    Ok(format!("{count} programs, worst {worst:.1e}"))
}

/// Interior-point SDP values against bisection with eigenvalue tests.
pub fn sdp_oracle(seed: u64, count: usize) -> Check {
    let mut r = rng(seed);
    let opts = SolverOptions::precise();
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let p = random_pencil_sdp(&mut r);
        let reference = p.bisection_value();
        let prob = SdpProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: p
                .pencils
                .iter()
                .map(|(b, a)| PsdBlock { constant: a.clone(), coefficients: vec![(0, b.clone())] })
                .collect(),
            inequalities: p.floors.iter().map(|c| AffineRow { coeffs: vec![(0, 1.0)], rhs: *c }).collect(),
            equalities: vec![],
        };
        let sol = solve_sdp(&prob, &opts).map_err(err(&format!("SDP {i}")))?;
        if !sol.is_optimal() {
            return Err(format!("SDP {i}: status {:?}", sol.status));
        }
        if sol.dual_value > sol.value + 1e-9 {
            return Err(format!("SDP {i}: weak duality {} > {}", sol.dual_value, sol.value));
        }
        let diff = (sol.value - reference).abs();
        worst = worst.max(diff);
        if diff > 1e-5 {
            return Err(format!("SDP {i}: interior point {} bisection {reference}", sol.value));
        }
    }
    Ok(format!("{count} programs, worst {worst:.1e}"))
}

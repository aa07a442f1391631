//! Acceptance gate. Each criterion is its own test and prints one
//! `criterion N: PASS|FAIL` line to stderr (uncaptured) with the numbers
//! behind the verdict.

mod common;

use std::io::Write;
use std::time::Instant;

use rand::Rng;

use qdchain::analysis::{
    find_factorization, fit_exponential_plus_constant, fit_factorization_law, fit_log_linear, locate_extremum,
    numerical_derivative, Extremum,
};
use qdchain::correlations::{
    bell_diagonal, bell_diagonal_state, concurrence, discord_closed_form_xy, one_way, symmetric_discord,
    xstate_from_correlators,
};
use qdchain::family::{family_states, FamilySettings, StateFamily};
use qdchain::witness::{dephase, witness, WitnessProfile, CLASSICALITY_TOL};
use qdchain::xy::{xy_correlators, xy_discord_profile, XYPoint};
use qdchain::{MeasurementBasis, ModelPreset, TwoSiteState};

fn report(n: u32, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {verdict}  {detail}");
    assert!(ok, "criterion {n} failed: {detail}");
}

fn hf(gamma: f64) -> f64 {
    (1.0 - gamma * gamma).sqrt()
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| ((lo + k as f64 * step) * 1e9).round() / 1e9).collect()
}

fn ed_settings(n_sites: usize, hx: f64) -> FamilySettings {
    FamilySettings { n_sites, hx, ..FamilySettings::default() }
}

/// Discord curves (r, [(h, Q)]) of one family.
fn discord_curves(preset: &ModelPreset, family: StateFamily, fields: &[f64], settings: &FamilySettings, rs: &[usize]) -> Vec<(usize, Vec<(f64, f64)>)> {
    let mut curves: Vec<(usize, Vec<(f64, f64)>)> = rs.iter().map(|&r| (r, Vec::new())).collect();
    for &h in fields {
        let p = family_states(preset, family, h, settings, rs).unwrap();
        for (c, pair) in curves.iter_mut().zip(&p.pairs) {
            c.1.push((h, one_way(&pair.state).discord));
        }
    }
    curves
}

#[test]
fn criterion_01_measure_identities() {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let (mut worst_identity, mut worst_above, mut worst_below) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut bounds_ok = true;
    for _ in 0..1000 {
        let s = common::random_state(&mut rng);
        let r = one_way(&s);
        worst_identity = worst_identity.max((r.mutual_information - (r.classical_correlation + r.discord)).abs());
        bounds_ok &= r.classical_correlation >= 0.0 && r.classical_correlation <= r.mutual_information;
        let oracle = common::brute_force_discord(&s);
        worst_above = worst_above.max(r.discord - oracle.discord);
        worst_below = worst_below.max(oracle.discord - r.discord);
    }
    let secs = start.elapsed().as_secs_f64();
    // The optimizer may legitimately go below the 1° grid, by about the
    // grid's quadratic resolution; 1e-3 only guards against a broken oracle.
    let ok = worst_identity <= 4.0 * f64::EPSILON && bounds_ok && worst_above <= 1e-9 && worst_below <= 1e-3 && secs < 120.0;
    report(
        1,
        ok,
        format!(
            "1000 states: max|I-(C+Q)| = {worst_identity:.1e}, 0<=C<=I {bounds_ok}, Q_opt - Q_grid <= {worst_above:.1e}, grid excess {worst_below:.1e}, {secs:.1} s"
        ),
    );
}

#[test]
fn criterion_02_closed_forms_match_optimizer() {
    let mut rng = common::rng(2);
    let mut worst_xy = 0.0f64;
    for _ in 0..200 {
        let gamma = rng.random_range(0.05..=1.0);
        let h = rng.random_range(0.0..2.5);
        let r = rng.random_range(1..=4usize);
        let c = xy_correlators(&XYPoint::new(gamma, h).unwrap(), r).unwrap().at(r).unwrap();
        let cf = discord_closed_form_xy(&c).unwrap();
        let num = one_way(&xstate_from_correlators(&c).unwrap());
        worst_xy = worst_xy.max((cf.discord - num.discord).abs()).max((cf.classical_correlation - num.classical_correlation).abs());
    }
    let mut worst_bd = 0.0f64;
    for _ in 0..200 {
        let (c1, c2, c3) = common::random_bell_triple(&mut rng);
        let bd = bell_diagonal(c1, c2, c3).unwrap();
        let num = one_way(&bell_diagonal_state(c1, c2, c3).unwrap());
        worst_bd = worst_bd.max((bd.discord - num.discord).abs()).max((bd.classical_correlation - num.classical_correlation).abs());
    }
    report(2, worst_xy <= 1e-8 && worst_bd <= 1e-8, format!("max deviation XY {worst_xy:.1e}, Bell-diagonal {worst_bd:.1e}"));
}

#[test]
fn criterion_03_factorization_crossing() {
    let preset = ModelPreset::xy(0.7).unwrap();
    let rs = [1, 2, 3];
    let closed = discord_curves(&preset, StateFamily::ClosedForm, &grid(0.6, 0.8, 0.005), &FamilySettings::default(), &rs);
    let cf = find_factorization(&closed, (0.0, 1.0), Some(hf(0.7))).unwrap();
    let cf_ok = cf.common.iter().all(|c| (c.h - 0.714).abs() < 5e-3);
    let ed = discord_curves(&preset, StateFamily::Thermal, &grid(0.65, 0.78, 0.005), &ed_settings(12, 0.0), &rs);
    let ed_est = find_factorization(&ed, (0.0, 1.0), Some(hf(0.7))).unwrap();
    let ed_ok = ed_est.common.iter().all(|c| (c.h - 0.714).abs() < 2e-2);
    let fmt = |v: &[qdchain::analysis::Crossing]| v.iter().map(|c| format!("{:.5}", c.h)).collect::<Vec<_>>().join(" ");
    report(3, cf_ok && ed_ok, format!("closed form [{}], ED L=12 [{}]", fmt(&cf.common), fmt(&ed_est.common)));
}

#[test]
fn criterion_04_broken_state_factorizes() {
    let preset = ModelPreset::xy(0.7).unwrap();
    let p = family_states(&preset, StateFamily::Broken, hf(0.7), &ed_settings(12, 1e-6), &[1, 2, 3]).unwrap();
    let (mut q, mut c, mut impurity) = (0.0f64, 0.0f64, 0.0f64);
    for pair in &p.pairs {
        q = q.max(one_way(&pair.state).discord);
        c = c.max(concurrence(&pair.state));
        impurity = impurity.max(1.0 - pair.state.purity());
    }
    report(4, q < 1e-6 && c < 1e-6 && impurity < 1e-5, format!("max Q {q:.1e}, max concurrence {c:.1e}, max 1-purity {impurity:.1e}"));
}

#[test]
fn criterion_05_factorization_law() {
    let gamma = 0.7;
    let h_f = hf(gamma);
    let preset = ModelPreset::xy(gamma).unwrap();
    let settings = ed_settings(12, 1e-3);
    let mut samples = Vec::new();
    for k in (-10i32..=10).filter(|&k| k != 0) {
        let h = h_f + 0.005 * k as f64;
        let p = family_states(&preset, StateFamily::Broken, h, &settings, &[1, 2, 3]).unwrap();
        for pair in &p.pairs {
            samples.push((pair.r, h, one_way(&pair.state).discord));
        }
    }
    let fit = fit_factorization_law(&samples, h_f, 0.05, 1e-13).unwrap();
    let (exponent, ratio) = (fit.coefficients[1], fit.coefficients[2]);
    let expected = (1.0 - gamma) / (1.0 + gamma);
    let pair12 = fit_factorization_law(&samples.iter().filter(|s| s.0 <= 2).cloned().collect::<Vec<_>>(), h_f, 0.05, 1e-13).unwrap();
    let ratio12 = pair12.coefficients[2];
    let ok = (exponent - 2.0).abs() <= 0.1 && (ratio / expected - 1.0).abs() <= 0.15 && (ratio12 / expected - 1.0).abs() <= 0.15;
    report(
        5,
        ok,
        format!("L=12 hx=1e-3: exponent {exponent:.4}, ratio r=1..3 {ratio:.4}, ratio r=1,2 {ratio12:.4}, target ratio {expected:.4} ± 15%"),
    );
}

#[test]
fn criterion_06_criticality_signatures() {
    let preset = ModelPreset::Ising;
    let fields = grid(0.8, 1.05, 0.01);
    let mut minima = Vec::new();
    for n in [8, 10, 12, 14] {
        let settings = ed_settings(n, 0.0);
        let mut series = Vec::new();
        for &h in &fields {
            let p = family_states(&preset, StateFamily::Thermal, h, &settings, &[1]).unwrap();
            series.push((h, one_way(&p.pairs[0].state).classical_correlation));
        }
        let d = numerical_derivative(&series).unwrap();
        let (h_m, value) = locate_extremum(&d.points, Extremum::Min).unwrap();
        minima.push((n as f64, h_m, value));
    }
    let drifts = minima.windows(2).all(|w| (1.0 - w[1].1).abs() < (1.0 - w[0].1).abs());
    let fit = fit_log_linear(&minima.iter().map(|m| (m.0, m.2)).collect::<Vec<_>>()).unwrap();
    let b = fit.coefficients[1];
    let synthetic: Vec<(f64, f64)> = [8.0f64, 16.0, 32.0, 64.0].iter().map(|&l| (l, -0.29161 - 0.22471 * l.ln())).collect();
    let s = fit_log_linear(&synthetic).unwrap();
    let recovered = (s.coefficients[0] + 0.29161).abs() < 1e-12 && (s.coefficients[1] + 0.22471).abs() < 1e-12;
    let hm: Vec<String> = minima.iter().map(|m| format!("{:.4}", m.1)).collect();
    report(6, drifts && b < 0.0 && recovered, format!("h_m(L=8..14) = [{}], slope b = {b:.4}, synthetic recovery {recovered}", hm.join(" ")));
}

#[test]
fn criterion_07_xxz_limits() {
    let m = bell_diagonal(0.0, 0.0, 1.0).unwrap();
    let exact = m.mutual_information == 1.0 && m.classical_correlation == 1.0 && m.discord == 0.0;
    let num = one_way(&bell_diagonal_state(0.0, 0.0, 1.0).unwrap());
    let numeric = (num.mutual_information - 1.0).abs() < 1e-12 && num.discord.abs() < 1e-12;

    let settings = ed_settings(12, 0.0);
    let energy = |delta: f64| {
        let p = family_states(&ModelPreset::Xxz { delta }, StateFamily::Thermal, 0.0, &settings, &[1]).unwrap();
        p.energy_density.unwrap()
    };
    let mut worst = 0.0f64;
    for delta in [-0.5, 0.5] {
        let step = 1e-3;
        let e = [-2.0, -1.0, 1.0, 2.0].map(|k| energy(delta + k * step));
        let deps = (e[0] - 8.0 * e[1] + 8.0 * e[2] - e[3]) / (12.0 * step);
        let eps = energy(delta);
        let (c1, _, c3) = qdchain::correlations::xxz_correlators_from_energy(eps, deps, delta);
        let p = family_states(&ModelPreset::Xxz { delta }, StateFamily::Thermal, 0.0, &settings, &[1]).unwrap();
        let direct = &p.pairs[0].correlators;
        worst = worst.max((c1 - direct.gxx).abs()).max((c3 - direct.gzz).abs());
    }
    report(7, exact && numeric && worst < 1e-6, format!("mixture I=C=1, Q=0: {exact} (optimizer {numeric}); Hellmann-Feynman max deviation {worst:.1e}"));
}

#[test]
fn criterion_08_witness() {
    let preset = ModelPreset::xy(0.6).unwrap();
    let fields: Vec<f64> = (72..=88).map(|k| k as f64 / 100.0).collect();
    let settings = ed_settings(16, 1e-9);
    let norms: Vec<f64> = fields
        .iter()
        .map(|&h| witness(&family_states(&preset, StateFamily::Broken, h, &settings, &[1]).unwrap().pairs[0].state).trace_norm)
        .collect();
    let at = norms[fields.iter().position(|&h| h == 0.8).unwrap()];
    let profile = WitnessProfile::from_series(fields, norms.clone(), CLASSICALITY_TOL);
    let unique = profile.zeros.len() == 1 && (profile.zeros[0] - 0.8).abs() <= 0.01;
    let next = norms.iter().cloned().filter(|&x| x >= CLASSICALITY_TOL).fold(f64::INFINITY, f64::min);

    let mut rng = common::rng(8);
    let mut classical_ok = true;
    for _ in 0..200 {
        let s = common::random_state(&mut rng);
        let ba = MeasurementBasis::new(rng.random_range(0.0..3.14), rng.random_range(0.0..6.28));
        let bb = MeasurementBasis::new(rng.random_range(0.0..3.14), rng.random_range(0.0..6.28));
        classical_ok &= witness(&dephase(&s, &ba, &bb).unwrap()).trace_norm < CLASSICALITY_TOL;
    }
    let h = 0.5f64.sqrt();
    let z = qdchain::state::C64::new(0.0, 0.0);
    let bell = TwoSiteState::pure([qdchain::state::C64::new(h, 0.0), z, z, qdchain::state::C64::new(h, 0.0)]).unwrap();
    let (wb, qs) = (witness(&bell).trace_norm, symmetric_discord(&bell).bits);
    let bell_ok = wb < CLASSICALITY_TOL && (qs - 1.0).abs() < 1e-9;
    report(
        8,
        unique && classical_ok && bell_ok,
        format!(
            "zeros {:?} (‖W‖(0.8) = {at:.1e}, smallest nonzero {next:.1e}); classical states {classical_ok}; Bell ‖W‖ = {wb:.1e}, Q_sym = {qs:.6}",
            profile.zeros
        ),
    );
}

#[test]
fn criterion_09_pattern_near_factorization() {
    let gamma = 0.7;
    let h_f = hf(gamma);
    let at_hf = xy_correlators(&XYPoint::new(gamma, h_f).unwrap(), 5).unwrap();
    let mut spread = 0.0f64;
    for v in [&at_hf.gxx, &at_hf.gyy, &at_hf.gzz] {
        for x in v.iter() {
            spread = spread.max((x - v[0]).abs());
        }
    }
    let deltas: Vec<f64> = (-5..=5).map(|k| k as f64 * 2e-3).collect();
    let profiles: Vec<_> = deltas.iter().map(|d| xy_correlators(&XYPoint::new(gamma, h_f + d).unwrap(), 5).unwrap()).collect();
    let (mut worst_resid, mut intercept_spread) = (0.0f64, 0.0f64);
    for pick in 0..3 {
        let mut intercepts = Vec::new();
        for r in 0..5 {
            let ys: Vec<f64> = profiles
                .iter()
                .map(|p| match pick {
                    0 => p.gxx[r],
                    1 => p.gyy[r],
                    _ => p.gzz[r],
                })
                .collect();
            let n = deltas.len() as f64;
            let (sx, sy) = (deltas.iter().sum::<f64>(), ys.iter().sum::<f64>());
            let sxx: f64 = deltas.iter().map(|x| x * x).sum();
            let sxy: f64 = deltas.iter().zip(&ys).map(|(x, y)| x * y).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            let intercept = (sy - slope * sx) / n;
            for (x, y) in deltas.iter().zip(&ys) {
                worst_resid = worst_resid.max((y - intercept - slope * x).abs());
            }
            intercepts.push(intercept);
        }
        for i in &intercepts {
            intercept_spread = intercept_spread.max((i - intercepts[0]).abs());
        }
    }
    report(
        9,
        spread <= 1e-8 && worst_resid <= 1e-4 && intercept_spread <= 1e-4,
        format!("r-spread at h_f {spread:.1e}, linear residual {worst_resid:.1e}, intercept spread {intercept_spread:.1e}"),
    );
}

#[test]
fn criterion_10_decay_dichotomy() {
    let fit_at = |h: f64| {
        let q = xy_discord_profile(&XYPoint::new(0.5, h).unwrap(), 30).unwrap();
        let pts: Vec<(f64, f64)> = q.iter().enumerate().map(|(i, x)| ((i + 1) as f64, x.discord)).collect();
        fit_exponential_plus_constant(&pts).unwrap().coefficients[0]
    };
    let (a_para, a_ordered) = (fit_at(1.5), fit_at(0.8));
    report(10, a_para.abs() < 1e-4 && a_ordered > 1e-3, format!("plateau a(h=1.5) = {a_para:.2e}, a(h=0.8) = {a_ordered:.3e}"));
}

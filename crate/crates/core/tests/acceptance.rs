//! Acceptance criteria, one test each. Every test prints a single
//! `ACCEPTANCE n name: PASS|FAIL (detail)` line before asserting.

mod common;

use common::{gradual, steep, verdict};
use fronts::dynamics::{center_manifold_coeffs, zero_plane_equilibria};
use fronts::io;
use fronts::pde::{simulate_front, SimulationConfig};
use fronts::shooting::{self, FrontProfile, ProfileKind, ShootConfig, VelocityClass};
use fronts::verify::{self, CheckReport, RESIDUAL_TOLERANCE};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use std::time::Instant;

#[test]
fn criterion_01_vstar_reproduction() {
    let start = Instant::now();
    let r = shooting::find_v_star(0.5, 2.0, 1e-4, &ShootConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = (1.05..=1.09).contains(&r.v_star) && secs < 60.0;
    verdict("1", "v* reproduction in [1.05, 1.09]", pass, &format!("v* = {:.6}, {secs:.2} s", r.v_star));
    assert!(pass, "v* = {} outside [1.05, 1.09] or runtime {secs} s", r.v_star);
}

#[test]
fn criterion_02_partition_endpoints() {
    let cfg = ShootConfig::default();
    let vs = [-1.0, 0.0, 2.0, 3.0, 5.0];
    let expected = [VelocityClass::NoFront, VelocityClass::NoFront, VelocityClass::Gradual, VelocityClass::Gradual, VelocityClass::Gradual];
    let got: Vec<VelocityClass> = shooting::classify_many(&vs, &cfg).into_iter().map(|c| c.unwrap().class).collect();
    let pass = got == expected;
    verdict("2", "partition endpoints", pass, &format!("{:?}", vs.iter().zip(&got).collect::<Vec<_>>()));
    assert_eq!(got, expected);
}

#[test]
fn criterion_03_center_asymptotics() {
    let (fit, report) = verify::fit_center_asymptotics(&gradual(2.0), 2.0).unwrap();
    let pass = (fit.c_a - 2.0).abs() < 0.2 && (fit.c_q - 2.0).abs() < 0.2 && report.passed;
    verdict("3", "center asymptotics at v=2", pass, &format!("c_a = {:.5}, c_q = {:.5}", fit.c_a, fit.c_q));
    assert!(pass, "{fit:?}");
}

#[test]
fn criterion_04_cone_invariance() {
    let mut details = Vec::new();
    let mut pass = true;
    for v in [2.0, 3.0, 5.0] {
        let c = shooting::classify_velocity(v, &ShootConfig::default()).unwrap();
        let traj = c.outcome.unwrap().trajectory;
        let max_q = traj.samples.iter().map(|s| verify::cone_function(s.point)).fold(f64::NEG_INFINITY, f64::max);
        let report = verify::check_cone_invariance(v, &traj).unwrap();
        pass &= max_q < 0.0 && report.passed;
        details.push(format!("v={v}: max Q = {max_q:.3e} over {} samples", traj.len()));
    }
    verdict("4", "cone invariance", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_05_octant() {
    let vs = [1.12, 1.2, 1.5, 2.0, 3.0, 5.0, 8.0];
    let mut worst = f64::INFINITY;
    let mut converged = 0;
    for c in shooting::classify_many(&vs, &ShootConfig::default()) {
        let c = c.unwrap();
        if c.class != VelocityClass::Gradual && c.class != VelocityClass::SteepCandidate {
            continue;
        }
        converged += 1;
        for s in &c.outcome.unwrap().trajectory.samples {
            worst = worst.min(s.point.a).min(s.point.kappa).min(s.point.q);
        }
    }
    let pass = converged == vs.len() && worst > 0.0;
    verdict("5", "octant property", pass, &format!("{converged} converged shots, min(a, kappa, q) = {worst:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_06_equilibrium_algebra() {
    let mut runner = TestRunner::new(Config { cases: 100, ..Config::default() });
    let result = runner.run(&(1e-9f64..=10.0), |v| {
        let e = zero_plane_equilibria(v).unwrap();
        let (zp, zm) = (e.z_plus, e.z_minus);
        prop_assert!((zp + zm + v).norm() < 1e-12);
        prop_assert!((zp * zm + num_complex::Complex64::i()).norm() < 1e-12);
        prop_assert!(zp.norm() < 1.0 && 1.0 < zm.norm());
        Ok(())
    });
    verdict("6", "equilibrium algebra", result.is_ok(), &format!("100 random v in (0, 10]: {result:?}"));
    result.unwrap();
}

#[test]
fn criterion_07_center_coefficients() {
    let (kappa2, report) = verify::fit_center_coefficients(&gradual(2.0), 2.0).unwrap();
    let expected = center_manifold_coeffs(2.0).unwrap().kappa2;
    let err = (kappa2 / 0.5 - 1.0).abs();
    let pass = expected == 0.5 && err < 0.15 && report.passed;
    verdict("7", "center-manifold kappa2 at v=2", pass, &format!("kappa2 = {kappa2:.6}, relative error {err:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_08_ode_residual() {
    let mut details = Vec::new();
    let mut pass = true;
    let mut profiles: Vec<(String, FrontProfile)> =
        [1.2, 2.0, 3.0, 5.0].iter().map(|&v| (format!("v={v}"), gradual(v))).collect();
    profiles.push(("steep".into(), steep().1.clone()));
    for (label, p) in profiles {
        let mut buf = Vec::new();
        io::write_profile_csv(&mut buf, &p).unwrap();
        let exported = io::read_profile_csv(buf.as_slice(), p.v(), p.kind).unwrap();
        let r = verify::check_ode_residual(&exported, p.v()).unwrap();
        pass &= r.worst_violation <= RESIDUAL_TOLERANCE;
        details.push(format!("{label}: {:.2e}", r.worst_violation));
    }
    verdict("8", "ODE residual <= 1e-6", pass, &details.join(", "));
    assert!(pass);
}

#[test]
fn criterion_09_pde_front_selection() {
    let start = Instant::now();
    let sim = simulate_front(&SimulationConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let v_star = steep().0;
    let err = (sim.track.fitted_speed / v_star - 1.0).abs();
    let pass = err < 0.05 && secs < 300.0;
    verdict(
        "9",
        "PDE speed vs shooting v*",
        pass,
        &format!("speed {:.6}, v* {v_star:.6}, relative {err:.2e}, {secs:.1} s", sim.track.fitted_speed),
    );
    assert!(pass);
}

#[test]
fn criterion_10_scale_invariance() {
    let ratios: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&a| {
            // same travelled distance for every amplitude
            let cfg = SimulationConfig { a, t_end: 200.0 / a, ..Default::default() };
            simulate_front(&cfg).unwrap().track.fitted_speed / a
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / 3.0;
    let dev = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    let pass = dev < 0.02;
    verdict("10", "PDE speed proportional to a", pass, &format!("speed/a = {ratios:.6?}, max deviation {dev:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_11_phase_divergence() {
    let g = verify::check_phase_divergence(&gradual(2.0), ProfileKind::Gradual).unwrap();
    let (v_mid, sp) = steep();
    let s = verify::check_phase_divergence(sp, ProfileKind::Steep).unwrap();
    let pass = g.passed && s.passed;
    verdict(
        "11",
        "phase divergence dichotomy",
        pass,
        &format!("gradual {}; steep at v={v_mid:.7}: {}", g.detail.as_deref().unwrap_or(""), s.detail.as_deref().unwrap_or("")),
    );
    assert!(pass, "{g:?} {s:?}");
}

/// Index of the first sample past `xi`.
fn at(p: &FrontProfile, xi: f64) -> usize {
    p.samples.partition_point(|s| s.xi < xi)
}

fn mutate(p: &FrontProfile, f: impl Fn(&mut FrontProfile)) -> FrontProfile {
    let mut m = p.clone();
    f(&mut m);
    m
}

#[test]
fn criterion_12_suite_integrity() {
    let g = gradual(2.0);
    let (_, sp) = steep();
    let mut reports: Vec<(&str, CheckReport, CheckReport)> = Vec::new();
    let mut push = |name, clean: CheckReport, mutant: CheckReport| reports.push((name, clean, mutant));

    let k = at(&g, 1.0);
    let m = mutate(&g, |m| m.samples[k].a = m.samples[k - 1].a - 1e-9);
    push("monotone_amplitude", verify::check_monotone_amplitude(&g), verify::check_monotone_amplitude(&m));

    let m = mutate(&g, |m| m.samples[k].q = -m.samples[k].q);
    push("monotone_phase", verify::check_monotone_phase(&g), verify::check_monotone_phase(&m));

    let traj = g.trajectory.clone().unwrap();
    let mut bad = traj.clone();
    let j = bad.samples.len() / 2;
    bad.samples[j].point.kappa += 1.0;
    push("cone_invariance", verify::check_cone_invariance(2.0, &traj).unwrap(), verify::check_cone_invariance(2.0, &bad).unwrap());

    let end = g.samples.last().unwrap().xi;
    let m = mutate(&g, |m| m.samples.iter_mut().filter(|s| s.xi > end / 20.0).for_each(|s| s.q *= 1.3));
    push("center_asymptotics", verify::fit_center_asymptotics(&g, 2.0).unwrap().1, verify::fit_center_asymptotics(&m, 2.0).unwrap().1);

    let m = mutate(&g, |m| m.samples.iter_mut().filter(|s| 1.0 - s.a < 0.02).for_each(|s| s.kappa *= 1.3));
    push("center_coefficients", verify::fit_center_coefficients(&g, 2.0).unwrap().1, verify::fit_center_coefficients(&m, 2.0).unwrap().1);

    let m = mutate(&g, |m| m.samples.iter_mut().for_each(|s| s.theta *= 0.5));
    push(
        "phase_divergence_gradual",
        verify::check_phase_divergence(&g, ProfileKind::Gradual).unwrap(),
        verify::check_phase_divergence(&m, ProfileKind::Gradual).unwrap(),
    );

    let m = mutate(sp, |m| m.samples.iter_mut().filter(|s| s.xi > 0.0).for_each(|s| s.theta += 0.01 * s.xi));
    push(
        "phase_divergence_steep",
        verify::check_phase_divergence(sp, ProfileKind::Steep).unwrap(),
        verify::check_phase_divergence(&m, ProfileKind::Steep).unwrap(),
    );

    let m = mutate(&g, |m| m.kind = ProfileKind::Steep);
    push("stable_decay", verify::check_stable_decay(sp).unwrap(), verify::check_stable_decay(&m).unwrap());

    let m = mutate(&g, |m| m.samples[k].b *= 1.0 + 1e-4);
    push("ode_residual", verify::check_ode_residual(&g, 2.0).unwrap(), verify::check_ode_residual(&m, 2.0).unwrap());

    // the symmetry with q left unscaled is the planted defect
    let scaled = verify::scale_map(&g, 2.0).unwrap();
    let m = mutate(&scaled, |m| m.samples.iter_mut().for_each(|s| s.q *= 0.5));
    push(
        "scale_map",
        verify::check_system_residual(&scaled, RESIDUAL_TOLERANCE).unwrap(),
        verify::check_system_residual(&m, RESIDUAL_TOLERANCE).unwrap(),
    );

    let caught: Vec<String> = reports
        .iter()
        .map(|(n, c, m)| format!("{n} {}/{}", if c.passed { "ok" } else { "CLEAN-FAIL" }, if m.passed { "MISSED" } else { "caught" }))
        .collect();
    let pass = reports.iter().all(|(_, c, m)| c.passed && !m.passed);
    verdict("12", "every check fails on its mutant", pass, &caught.join(", "));
    assert!(pass, "{reports:#?}");
}

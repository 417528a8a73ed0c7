mod common;

use common::{gradual, steep};
use fronts::pde::{compare_profile, field_from_profile, simulate_front, SimulationConfig};

#[test]
fn speed_converges_under_refinement() {
    let coarse = simulate_front(&SimulationConfig { n: 2048, dt: 0.02, ..Default::default() }).unwrap();
    let fine = simulate_front(&SimulationConfig::default()).unwrap();
    let (c, f) = (coarse.track.fitted_speed, fine.track.fitted_speed);
    assert!((c / f - 1.0).abs() < 5e-3, "{c} vs {f}");
    assert!(fine.track.fit_residual < 0.05);
}

#[test]
fn reflected_domain_reverses_the_front() {
    let base = SimulationConfig { t_end: 100.0, ..Default::default() };
    let right = simulate_front(&base).unwrap().track.fitted_speed;
    let left = simulate_front(&SimulationConfig { reflect: true, ..base }).unwrap().track.fitted_speed;
    assert!(right > 0.0);
    assert!((left + right).abs() < 1e-9 * right, "{left} vs {right}");
}

#[test]
fn late_field_matches_the_steep_profile() {
    let sim = simulate_front(&SimulationConfig::default()).unwrap();
    let (_, steep) = steep();
    let near = compare_profile(&sim.field, steep, 1.0).unwrap();
    let far = compare_profile(&sim.field, &gradual(2.0), 1.0).unwrap();
    assert!(near.amplitude < 1e-2 && near.complex < 1e-2, "{near:?}");
    assert!(far.amplitude > 10.0 * near.amplitude, "{far:?} vs {near:?}");
    assert!(near.points > 100);
}

#[test]
fn synthetic_field_reproduces_its_profile() {
    let p = gradual(2.0);
    let field = field_from_profile(&p, 1.5, 8192, 400.0, 150.0).unwrap();
    let m = compare_profile(&field, &p, 1.5).unwrap();
    assert!(m.amplitude < 1e-3 && m.complex < 1e-3, "{m:?}");
    assert!((m.anchor - 150.0).abs() < 0.05);
}

#[test]
fn boundary_contact_is_an_error() {
    let r = simulate_front(&SimulationConfig { length: 100.0, n: 1024, t_end: 200.0, ..Default::default() });
    assert!(matches!(r, Err(fronts::pde::PdeError::BoundaryContact { .. })), "{r:?}");
}

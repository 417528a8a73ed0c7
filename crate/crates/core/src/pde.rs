//! Direct simulation of `A_t = i|A|²A + A_xx` in the frame rotating with the
//! far-field state, `Ã_t = i(|Ã|² − a²)Ã + Ã_xx`, on `[0, L]` with Dirichlet
//! ends.
//!
//! Each step is a Strang splitting: an exact half-step of the pointwise
//! rotation, a Crank–Nicolson diffusion step, and another half rotation.

use crate::shooting::FrontProfile;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdeError {
    #[error("invalid simulation input: {0}")]
    InvalidInput(String),
    #[error("field became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("front reached the boundary buffer at t = {t} (x = {position})")]
    BoundaryContact { t: f64, position: f64 },
    #[error("no a/2 crossing in the field at t = {t}")]
    NoCrossing { t: f64 },
    #[error("profile alignment failed: {0}")]
    Alignment(String),
}

/// Complex amplitude on a uniform grid over `[0, length]`, boundary samples
/// pinned to `left` and `right`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeField {
    pub values: Vec<Complex64>,
    pub dx: f64,
    pub t: f64,
    pub left: Complex64,
    pub right: Complex64,
}

impl PdeField {
    pub fn from_fn(n: usize, length: f64, left: Complex64, right: Complex64, f: impl Fn(f64) -> Complex64) -> Result<Self, PdeError> {
        if n < 3 {
            return Err(PdeError::InvalidInput(format!("grid needs at least 3 points, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(PdeError::InvalidInput(format!("domain length must be positive, got {length}")));
        }
        let dx = length / (n - 1) as f64;
        let mut values: Vec<Complex64> = (0..n).map(|i| f(i as f64 * dx)).collect();
        values[0] = left;
        values[n - 1] = right;
        Ok(Self { values, dx, t: 0.0, left, right })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.dx * (self.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Largest `|Ã|` on the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `x` where `|Ã|` first reaches `level` scanning from the low-amplitude
    /// end, linearly interpolated.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let m: Vec<f64> = self.values.iter().map(|z| z.norm()).collect();
        let n = m.len();
        if self.left.norm() <= self.right.norm() {
            (0..n - 1).find(|&i| m[i] < level && m[i + 1] >= level).map(|i| {
                self.x(i) + self.dx * (level - m[i]) / (m[i + 1] - m[i])
            })
        } else {
            (1..n).rev().find(|&i| m[i] < level && m[i - 1] >= level).map(|i| {
                self.x(i) - self.dx * (level - m[i]) / (m[i - 1] - m[i])
            })
        }
    }
}

/// Precomputed splitting step for a fixed grid and time step.
#[derive(Debug, Clone)]
pub struct PdeStepper {
    dt: f64,
    a: f64,
    mu: f64,
    rotation: bool,
    /// Forward-eliminated superdiagonal of the implicit operator.
    cp: Vec<f64>,
    /// Reciprocal pivots of the implicit operator.
    inv_pivot: Vec<f64>,
}

impl PdeStepper {
    pub fn new(n: usize, dx: f64, dt: f64, a: f64) -> Result<Self, PdeError> {
        if n < 3 || !(dx > 0.0) || !(dt > 0.0) || !dt.is_finite() || !a.is_finite() {
            return Err(PdeError::InvalidInput(format!("n = {n}, dx = {dx}, dt = {dt}, a = {a}")));
        }
        let mu = dt / (2.0 * dx * dx);
        let m = n - 2;
        let (diag, off) = (1.0 + 2.0 * mu, -mu);
        let mut cp = vec![0.0; m];
        let mut inv_pivot = vec![0.0; m];
        let mut prev = 0.0;
        for i in 0..m {
            let pivot = diag - off * prev;
            inv_pivot[i] = 1.0 / pivot;
            prev = off * inv_pivot[i];
            cp[i] = prev;
        }
        Ok(Self { dt, a, mu, rotation: true, cp, inv_pivot })
    }

    pub fn for_field(field: &PdeField, dt: f64, a: f64) -> Result<Self, PdeError> {
        Self::new(field.len(), field.dx, dt, a)
    }

    /// Pure diffusion, for testing the implicit substep.
    pub fn without_rotation(mut self) -> Self {
        self.rotation = false;
        self
    }

    fn rotate(&self, values: &mut [Complex64], tau: f64) {
        let a2 = self.a * self.a;
        for z in values.iter_mut() {
            *z *= Complex64::from_polar(1.0, (z.norm_sqr() - a2) * tau);
        }
    }

    fn diffuse(&self, field: &mut PdeField, scratch: &mut Vec<Complex64>) {
        let u = &mut field.values;
        let n = u.len();
        let mu = self.mu;
        scratch.clear();
        scratch.extend((1..n - 1).map(|i| u[i] + mu * (u[i - 1] - 2.0 * u[i] + u[i + 1])));
        let m = scratch.len();
        // implicit boundary contributions; the explicit ones are in the stencil
        scratch[0] += mu * field.left;
        scratch[m - 1] += mu * field.right;
        let off = -mu;
        let mut prev = Complex64::new(0.0, 0.0);
        for (x, inv) in scratch.iter_mut().zip(&self.inv_pivot) {
            prev = (*x - off * prev) * inv;
            *x = prev;
        }
        for i in (0..m - 1).rev() {
            let next = scratch[i + 1];
            scratch[i] -= self.cp[i] * next;
        }
        u[1..n - 1].copy_from_slice(scratch);
        u[0] = field.left;
        u[n - 1] = field.right;
    }

    /// Advances `field` by one time step.
    pub fn step(&self, field: &mut PdeField) -> Result<(), PdeError> {
        let mut scratch = Vec::with_capacity(field.len());
        self.step_with(field, &mut scratch)
    }

    fn step_with(&self, field: &mut PdeField, scratch: &mut Vec<Complex64>) -> Result<(), PdeError> {
        if field.len() != self.cp.len() + 2 {
            return Err(PdeError::InvalidInput("field size does not match the stepper".into()));
        }
        let n = field.len();
        if self.rotation {
            self.rotate(&mut field.values[1..n - 1], 0.5 * self.dt);
        }
        self.diffuse(field, scratch);
        if self.rotation {
            self.rotate(&mut field.values[1..n - 1], 0.5 * self.dt);
        }
        field.t += self.dt;
        if field.values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PdeError::NonFinite { t: field.t });
        }
        Ok(())
    }
}

/// One splitting step of size `dt` with far-field amplitude `a`.
pub fn step(field: &PdeField, dt: f64, a: f64) -> Result<PdeField, PdeError> {
    let mut out = field.clone();
    PdeStepper::for_field(field, dt, a)?.step(&mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub a: f64,
    pub length: f64,
    pub n: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Interval between front-position samples.
    pub output_interval: f64,
    /// Width of the initial tanh ramp.
    pub ramp_width: f64,
    /// Mirror the domain: finite amplitude on the left, front moving left.
    pub reflect: bool,
    /// Record the whole field at this interval as well.
    pub snapshot_interval: Option<f64>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            length: 400.0,
            n: 4096,
            t_end: 200.0,
            dt: 0.01,
            output_interval: 0.5,
            ramp_width: 5.0,
            reflect: false,
            snapshot_interval: None,
        }
    }
}

impl SimulationConfig {
    fn validate(&self) -> Result<(), PdeError> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        let ok = pos(self.a)
            && pos(self.length)
            && self.n >= 3
            && pos(self.t_end)
            && pos(self.dt)
            && self.dt <= self.t_end
            && pos(self.output_interval)
            && pos(self.ramp_width)
            && self.snapshot_interval.is_none_or(pos);
        if ok {
            Ok(())
        } else {
            Err(PdeError::InvalidInput(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrack {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub fitted_speed: f64,
    /// RMS deviation of the positions from the fitted line.
    pub fit_residual: f64,
    /// Time window of the fit.
    pub window: (f64, f64),
}

impl FrontTrack {
    /// Least-squares speed over `t ∈ [t0, t1]`.
    pub fn fit(times: Vec<f64>, positions: Vec<f64>, t0: f64, t1: f64) -> Result<Self, PdeError> {
        let pts: Vec<(f64, f64)> =
            times.iter().zip(&positions).filter(|(t, _)| **t >= t0 && **t <= t1).map(|(&t, &x)| (t, x)).collect();
        if pts.len() < 2 {
            return Err(PdeError::InvalidInput(format!("fewer than two track points in [{t0}, {t1}]")));
        }
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let stx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
        let speed = stx / stt;
        let rms = (pts.iter().map(|p| (p.1 - mx - speed * (p.0 - mt)).powi(2)).sum::<f64>() / n).sqrt();
        Ok(Self { times, positions, fitted_speed: speed, fit_residual: rms, window: (t0, t1) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub field: PdeField,
    pub track: FrontTrack,
    pub snapshots: Vec<PdeField>,
}

/// Where the initial ramp sits, as a fraction of `L` from the zero side.
const START_FRACTION: f64 = 0.2;
/// Fronts must stay this fraction of `L` away from both ends.
const BOUNDARY_BUFFER: f64 = 0.1;

/// Evolves a smoothed step from `0` to `a` and tracks the `|Ã| = a/2` level.
pub fn simulate_front(config: &SimulationConfig) -> Result<Simulation, PdeError> {
    config.validate()?;
    let SimulationConfig { a, length, n, t_end, dt, .. } = *config;
    let zero = Complex64::new(0.0, 0.0);
    let far = Complex64::new(a, 0.0);
    let w = config.ramp_width;
    let mut field = if config.reflect {
        let x0 = (1.0 - START_FRACTION) * length;
        PdeField::from_fn(n, length, far, zero, |x| Complex64::new(0.5 * a * (1.0 - ((x - x0) / w).tanh()), 0.0))?
    } else {
        let x0 = START_FRACTION * length;
        PdeField::from_fn(n, length, zero, far, |x| Complex64::new(0.5 * a * (1.0 + ((x - x0) / w).tanh()), 0.0))?
    };
    let stepper = PdeStepper::for_field(&field, dt, a)?;
    let steps = (t_end / dt).round() as usize;
    let every = ((config.output_interval / dt).round() as usize).max(1);
    let snap_every = config.snapshot_interval.map(|s| ((s / dt).round() as usize).max(1));

    let (lo, hi) = (BOUNDARY_BUFFER * length, (1.0 - BOUNDARY_BUFFER) * length);
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut snapshots = Vec::new();
    let mut scratch = Vec::with_capacity(n);
    let record = |field: &PdeField, times: &mut Vec<f64>, positions: &mut Vec<f64>| -> Result<(), PdeError> {
        let x = field.crossing(0.5 * a).ok_or(PdeError::NoCrossing { t: field.t })?;
        if x < lo || x > hi {
            return Err(PdeError::BoundaryContact { t: field.t, position: x });
        }
        times.push(field.t);
        positions.push(x);
        Ok(())
    };
    record(&field, &mut times, &mut positions)?;
    if snap_every.is_some() {
        snapshots.push(field.clone());
    }
    for k in 1..=steps {
        stepper.step_with(&mut field, &mut scratch)?;
        // recompute time from the step count to keep output times exact
        field.t = k as f64 * dt;
        if k % every == 0 || k == steps {
            record(&field, &mut times, &mut positions)?;
        }
        if snap_every.is_some_and(|s| k % s == 0) {
            snapshots.push(field.clone());
        }
    }
    let track = FrontTrack::fit(times, positions, 0.5 * field.t, field.t)?;
    Ok(Simulation { field, track, snapshots })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileMisfit {
    /// `sup |(|Ã| − a·a_B)| / a` over the compared window.
    pub amplitude: f64,
    /// `sup |θ_x − q_B| / a` where `|Ã| > 0.05 a`.
    pub phase_derivative: f64,
    /// `sup |Ã − e^{iφ}B| / a` after fitting the global phase `φ`.
    pub complex: f64,
    pub global_phase: f64,
    /// Field position of the `a/2` crossing used for alignment.
    pub anchor: f64,
    /// Number of grid points compared.
    pub points: usize,
}

/// Compares a co-rotating field with a unit-amplitude profile scaled to the
/// field's far-field amplitude `a`, using `B_a(ξ) = a B(aξ)`.
pub fn compare_profile(field: &PdeField, profile: &FrontProfile, a: f64) -> Result<ProfileMisfit, PdeError> {
    if !(a > 0.0) {
        return Err(PdeError::InvalidInput(format!("amplitude must be positive, got {a}")));
    }
    if field.left.norm() > field.right.norm() {
        return Err(PdeError::Alignment("field must have its zero state on the left".into()));
    }
    if profile.len() < 2 {
        return Err(PdeError::Alignment("profile has fewer than two samples".into()));
    }
    let x_c = field.crossing(0.5 * a).ok_or(PdeError::NoCrossing { t: field.t })?;
    let (p_lo, p_hi) = (profile.samples[0].xi, profile.samples[profile.len() - 1].xi);

    let mut pairs = Vec::new();
    for i in 1..field.len() - 1 {
        let xi = a * (field.x(i) - x_c);
        if xi < p_lo || xi > p_hi {
            continue;
        }
        let s = interpolate_profile(profile, xi);
        pairs.push((i, s.0 * a, s.1 * a, s.2 * a));
    }
    if pairs.is_empty() {
        return Err(PdeError::Alignment("profile span does not overlap the field".into()));
    }
    let dot: Complex64 = pairs.iter().map(|&(i, _, _, b)| field.values[i] * b.conj()).sum();
    let phi = dot.arg();
    let rot = Complex64::from_polar(1.0, phi);

    let (mut amp, mut dphase, mut cplx) = (0.0f64, 0.0f64, 0.0f64);
    for &(i, am, qm, b) in &pairs {
        let u = field.values[i];
        amp = amp.max((u.norm() - am).abs() / a);
        cplx = cplx.max((u - rot * b).norm() / a);
        if u.norm() > 0.05 * a {
            let du = (field.values[i + 1] - field.values[i - 1]) / (2.0 * field.dx);
            let theta_x = (u.conj() * du).im / u.norm_sqr();
            dphase = dphase.max((theta_x - qm).abs() / a);
        }
    }
    Ok(ProfileMisfit {
        amplitude: amp,
        phase_derivative: dphase,
        complex: cplx,
        global_phase: phi,
        anchor: x_c,
        points: pairs.len(),
    })
}

/// `(a, q, B)` at `xi` by linear interpolation between profile samples.
fn interpolate_profile(profile: &FrontProfile, xi: f64) -> (f64, f64, Complex64) {
    let s = &profile.samples;
    let i = s.partition_point(|p| p.xi <= xi).clamp(1, s.len() - 1);
    let (l, r) = (&s[i - 1], &s[i]);
    let t = if r.xi > l.xi { (xi - l.xi) / (r.xi - l.xi) } else { 0.0 };
    (l.a + t * (r.a - l.a), l.q + t * (r.q - l.q), l.b + (r.b - l.b) * t)
}

/// Synthetic co-rotating field `a B(a(x − x_c))` sampled from a profile.
pub fn field_from_profile(profile: &FrontProfile, a: f64, n: usize, length: f64, x_c: f64) -> Result<PdeField, PdeError> {
    let (p_lo, p_hi) = (profile.samples[0].xi, profile.samples[profile.len() - 1].xi);
    let end = profile.samples[profile.len() - 1].b * a;
    PdeField::from_fn(n, length, Complex64::new(0.0, 0.0), end, |x| {
        let xi = a * (x - x_c);
        if xi < p_lo {
            Complex64::new(0.0, 0.0)
        } else if xi > p_hi {
            end
        } else {
            interpolate_profile(profile, xi).2 * a
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_states_are_fixed() {
        let a = 0.8;
        for c in [Complex64::new(0.0, 0.0), Complex64::new(a, 0.0)] {
            let f = PdeField::from_fn(64, 10.0, c, c, |_| c).unwrap();
            let g = (0..50).try_fold(f.clone(), |g, _| step(&g, 0.05, a)).unwrap();
            for (x, y) in g.values.iter().zip(&f.values) {
                assert!((x - y).norm() < 1e-13, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn rotation_conserves_modulus() {
        let st = PdeStepper::new(5, 1.0, 0.3, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5), Complex64::new(-0.1, 0.0)];
        let before: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        st.rotate(&mut v, 0.7);
        for (z, m) in v.iter().zip(before) {
            assert!((z.norm() - m).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_follows_heat_kernel() {
        let (l, n, t0) = (80.0, 1601, 1.0);
        let f = PdeField::from_fn(n, l, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), |x| {
            Complex64::new((-(x - 40.0).powi(2) / (4.0 * t0)).exp(), 0.0)
        })
        .unwrap();
        let st = PdeStepper::for_field(&f, 0.01, 0.0).unwrap().without_rotation();
        let mut g = f;
        for _ in 0..200 {
            st.step(&mut g).unwrap();
        }
        let t = 2.0;
        let peak = (t0 / (t0 + t)).sqrt();
        let got = g.values[800].re;
        assert!(((got - peak) / peak).abs() < 1e-2, "{got} vs {peak}");
        for i in (0..n).step_by(37) {
            let x = g.x(i) - 40.0;
            let exact = peak * (-x * x / (4.0 * (t0 + t))).exp();
            assert!((g.values[i].re - exact).abs() < 1e-2 * peak);
        }
    }

    #[test]
    fn crossing_is_interpolated_from_the_zero_side() {
        let f = PdeField::from_fn(11, 10.0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), |x| {
            Complex64::new((x / 10.0).min(1.0), 0.0)
        })
        .unwrap();
        assert!((f.crossing(0.55).unwrap() - 5.5).abs() < 1e-12);
        let r = PdeField::from_fn(11, 10.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), |x| {
            Complex64::new(1.0 - x / 10.0, 0.0)
        })
        .unwrap();
        assert!((r.crossing(0.55).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PdeField::from_fn(2, 1.0, Complex64::default(), Complex64::default(), |_| Complex64::default()).is_err());
        assert!(simulate_front(&SimulationConfig { n: 2, ..Default::default() }).is_err());
        assert!(simulate_front(&SimulationConfig { dt: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn boundary_contact_is_reported() {
        let cfg = SimulationConfig { length: 100.0, n: 1001, t_end: 100.0, ..Default::default() };
        match simulate_front(&cfg) {
            Err(PdeError::BoundaryContact { t, position }) => assert!(t > 0.0 && position > 80.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn track_fit_recovers_line() {
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let pos: Vec<f64> = times.iter().map(|t| 3.0 + 1.5 * t).collect();
        let tr = FrontTrack::fit(times, pos, 5.0, 10.0).unwrap();
        assert!((tr.fitted_speed - 1.5).abs() < 1e-12 && tr.fit_residual < 1e-12);
    }
}

//! Shooting along the unstable manifold of `z₊(v)`.
//!
//! For `v > 0` the branch of the unstable manifold entering `a > 0` either
//! blows up, or converges to `(1, 0, 0)` through its stable manifold (steep
//! front) or through its center manifold (gradual front). This module decides
//! which, brackets the velocity where blow-up gives way to convergence, and
//! turns converged trajectories into complex front profiles.

use crate::dynamics::{check_positive, zero_plane_equilibria, DynamicsError, Params, PhasePoint};
use crate::integrate::{
    EventKind, EventSpec, IntegrateError, IntegrateOptions, Integrator, Sample, Tolerance, Trajectory,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("invalid shooting configuration: {0}")]
    InvalidConfig(String),
    #[error("bracket [{lo}, {hi}] is invalid: classified {lo_class:?} and {hi_class:?}")]
    InvalidBracket { lo: f64, hi: f64, lo_class: VelocityClass, hi_class: VelocityClass },
    #[error("shot at v = {v} stayed undecided inside the bracket")]
    UndecidedInBracket { v: f64 },
    #[error("no front profile at v = {v}: classified {class:?}")]
    NotAFront { v: f64, class: VelocityClass },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    /// Seed offset from `z₊(v)` along the `a` axis.
    pub eps: f64,
    pub tol: Tolerance,
    pub blowup_threshold: f64,
    pub norm_z_threshold: f64,
    /// Ball around `(1,0,0)` inside which the slaving test may conclude convergence.
    pub decide_radius: f64,
    /// Stable components must be at most this fraction of the center component.
    pub slaving_ratio: f64,
    /// After convergence is decided, keep integrating until within this
    /// distance of `(1,0,0)`; `None` stops at the decision.
    pub tail_radius: Option<f64>,
    pub initial_span: f64,
    pub max_span: f64,
    pub dense: bool,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            tol: Tolerance::default(),
            blowup_threshold: 10.0,
            norm_z_threshold: 100.0,
            decide_radius: 1e-2,
            slaving_ratio: 0.1,
            tail_radius: Some(5e-4),
            initial_span: 1e3,
            max_span: 1e7,
            dense: true,
        }
    }
}

impl ShootConfig {
    /// Configuration for bisection: stop at the decision, no dense output.
    pub fn decision_only(self) -> Self {
        Self { tail_radius: None, dense: false, ..self }
    }

    fn validate(&self) -> Result<(), ShootError> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !(pos(self.eps) && self.eps <= 1e-4) {
            return Err(ShootError::InvalidConfig(format!("eps must lie in (0, 1e-4], got {}", self.eps)));
        }
        let ok = pos(self.blowup_threshold)
            && self.blowup_threshold > 1.0
            && pos(self.norm_z_threshold)
            && pos(self.decide_radius)
            && pos(self.slaving_ratio)
            && self.tail_radius.is_none_or(pos)
            && pos(self.initial_span)
            && self.max_span >= self.initial_span
            && pos(self.tol.rel)
            && pos(self.tol.abs);
        if ok {
            Ok(())
        } else {
            Err(ShootError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupTrigger {
    Amplitude,
    NormZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OutcomeKind {
    Blowup { xi_blow: f64, trigger: BlowupTrigger },
    ConvergedCenter,
    ConvergedStable,
    Undecided,
}

impl OutcomeKind {
    pub fn label(&self) -> OutcomeLabel {
        match self {
            OutcomeKind::Blowup { .. } => OutcomeLabel::Blowup,
            OutcomeKind::ConvergedCenter => OutcomeLabel::ConvergedCenter,
            OutcomeKind::ConvergedStable => OutcomeLabel::ConvergedStable,
            OutcomeKind::Undecided => OutcomeLabel::Undecided,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeLabel {
    Blowup,
    ConvergedCenter,
    ConvergedStable,
    Undecided,
}

/// Tail statistics behind a center/stable verdict.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// ξ at which convergence was decided.
    pub decided_at: Option<f64>,
    /// Normalized dot of `(a-1, κ, q)` with `(-v, 0, 2)` at the tail end.
    pub alignment: Option<f64>,
    /// Relative change of `ξ q` across the last decade of ξ.
    pub xq_drift: Option<f64>,
    /// RMS log-residual of `1 - a ∝ e^{-vξ}` over the last decade.
    pub exp_rms: Option<f64>,
    /// RMS log-residual of `1 - a ∝ 1/ξ` over the last decade.
    pub inv_rms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootOutcome {
    pub v: f64,
    pub kind: OutcomeKind,
    /// Anchored so that `a(0) = 1/2`.
    pub trajectory: Trajectory,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VelocityClass {
    NoFront,
    Gradual,
    SteepCandidate,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldKind {
    Center,
    Stable,
}

/// First-order point of the unstable manifold of `(0, z₊(v))`.
///
/// `dz/dξ` depends on `a` only through `a²`, so the `a` axis is the exact
/// unstable eigendirection and the seed error is `O(eps²)`.
pub fn seed_unstable_manifold(v: f64, eps: f64) -> Result<PhasePoint, ShootError> {
    check_positive(v)?;
    if !(eps > 0.0 && eps <= 1e-4) {
        return Err(ShootError::InvalidConfig(format!("eps must lie in (0, 1e-4], got {eps}")));
    }
    let z = zero_plane_equilibria(v)?.z_plus;
    Ok(PhasePoint::new(eps, z.re, z.im))
}

/// Integrates from `start` at `xi0`, doubling the span up to `max_span`,
/// until a terminal event fires. Returns the event, or `None` past the cap.
fn run_until_event(
    it: &mut Integrator,
    xi0: f64,
    config: &ShootConfig,
    events: &[EventSpec],
) -> Result<Option<crate::integrate::Event>, ShootError> {
    let mut span = config.initial_span;
    loop {
        if let Some(ev) = it.advance(xi0 + span, events)? {
            return Ok(Some(ev));
        }
        if span >= config.max_span {
            return Ok(None);
        }
        span = (2.0 * span).min(config.max_span);
    }
}

/// One shot along the unstable manifold.
pub fn shoot(v: f64, config: &ShootConfig) -> Result<ShootOutcome, ShootError> {
    config.validate()?;
    let seed = seed_unstable_manifold(v, config.eps)?;
    let opts = IntegrateOptions { tol: config.tol, dense: config.dense, ..Default::default() };
    let mut it = Integrator::new(seed, 0.0, v, opts)?;

    let decide = [
        EventSpec::amplitude_crosses(0.5),
        EventSpec::amplitude_exceeds(config.blowup_threshold),
        EventSpec::norm_z_exceeds(config.norm_z_threshold),
        EventSpec::center_slaved(config.decide_radius, config.slaving_ratio),
    ];
    let first = run_until_event(&mut it, 0.0, config, &decide)?;

    let mut diagnostics = Diagnostics::default();
    let mut kind = match first.map(|e| e.kind) {
        Some(EventKind::AmplitudeExceeds(_)) => {
            OutcomeKind::Blowup { xi_blow: it.xi(), trigger: BlowupTrigger::Amplitude }
        }
        Some(EventKind::NormZExceeds(_)) => OutcomeKind::Blowup { xi_blow: it.xi(), trigger: BlowupTrigger::NormZ },
        Some(EventKind::CenterSlaved { .. }) => {
            diagnostics.decided_at = Some(it.xi());
            OutcomeKind::ConvergedCenter
        }
        _ => OutcomeKind::Undecided,
    };

    if let (OutcomeKind::ConvergedCenter, Some(radius)) = (kind, config.tail_radius) {
        if it.state().distance_to_unit() > radius {
            let tail_events = [
                EventSpec::converged_to(PhasePoint::unit(), radius),
                EventSpec::amplitude_exceeds(config.blowup_threshold),
            ];
            let xi_dec = it.xi();
            match run_until_event(&mut it, xi_dec, config, &tail_events)?.map(|e| e.kind) {
                Some(EventKind::ConvergedTo { .. }) => {}
                Some(EventKind::AmplitudeExceeds(_)) => {
                    kind = OutcomeKind::Blowup { xi_blow: it.xi(), trigger: BlowupTrigger::Amplitude }
                }
                _ => kind = OutcomeKind::Undecided,
            }
        }
    }

    let (mut trajectory, events) = it.finish();
    let anchor = events.iter().find(|e| matches!(e.kind, EventKind::AmplitudeCrosses(_))).map(|e| e.xi);
    if let Some(xi_half) = anchor {
        trajectory.shift(xi_half);
        if let OutcomeKind::Blowup { xi_blow, .. } = &mut kind {
            *xi_blow -= xi_half;
        }
        if let Some(d) = &mut diagnostics.decided_at {
            *d -= xi_half;
        }
    }

    if kind == OutcomeKind::ConvergedCenter && config.tail_radius.is_some() {
        let fit = classify_manifold(&trajectory, v);
        diagnostics = Diagnostics { decided_at: diagnostics.decided_at, ..fit.diagnostics };
        kind = match fit.kind {
            Some(ManifoldKind::Center) => OutcomeKind::ConvergedCenter,
            Some(ManifoldKind::Stable) => OutcomeKind::ConvergedStable,
            None => OutcomeKind::Undecided,
        };
    }

    Ok(ShootOutcome { v, kind, trajectory, diagnostics })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldFit {
    /// `None` when the tail is ambiguous and needs a longer integration.
    pub kind: Option<ManifoldKind>,
    pub diagnostics: Diagnostics,
}

/// Center-vs-stable verdict from the tail of a converging trajectory.
///
/// Center: the tail direction `(a-1, κ, q)` aligns with `(-v, 0, 2)` (dot at
/// least 0.99) and `ξ q` drifts by less than 10% over the last decade of ξ.
/// Stable: `1 - a` is fitted better by `e^{-vξ}` than by `C/ξ`.
pub fn classify_manifold(tail: &Trajectory, v: f64) -> ManifoldFit {
    let end = *tail.last();
    let none = ManifoldFit { kind: None, diagnostics: Diagnostics::default() };
    if !(v > 0.0) || end.xi <= 0.0 || end.point.a >= 1.0 {
        return none;
    }
    let d = end.point - PhasePoint::unit();
    let dir = PhasePoint::new(-v, 0.0, 2.0);
    let alignment = d.dot(&dir) / (d.norm() * dir.norm());

    let decade = tail.tail(end.xi / 10.0);
    if decade.len() < 4 {
        return none;
    }
    let head = decade[0];
    let xq0 = head.xi * head.point.q;
    let xq1 = end.xi * end.point.q;
    let xq_drift = ((xq1 - xq0) / xq1).abs();

    let (exp_rms, inv_rms) = log_fit_residuals(decade, v);
    let diagnostics = Diagnostics {
        decided_at: None,
        alignment: Some(alignment),
        xq_drift: Some(xq_drift),
        exp_rms: Some(exp_rms),
        inv_rms: Some(inv_rms),
    };
    let kind = if alignment >= 0.99 && xq_drift < 0.1 {
        Some(ManifoldKind::Center)
    } else if exp_rms < inv_rms {
        Some(ManifoldKind::Stable)
    } else {
        None
    };
    ManifoldFit { kind, diagnostics }
}

/// RMS residuals of `ln(1-a)` against `c - vξ` and against `c - ln ξ`, each
/// with its intercept fitted by least squares.
fn log_fit_residuals(samples: &[Sample], v: f64) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.point.a < 1.0 && s.xi > 0.0)
        .map(|s| (s.xi, (1.0 - s.point.a).ln()))
        .collect();
    if pts.is_empty() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let rms = |model: &dyn Fn(f64) -> f64| {
        let n = pts.len() as f64;
        let c = pts.iter().map(|&(x, y)| y - model(x)).sum::<f64>() / n;
        (pts.iter().map(|&(x, y)| (y - model(x) - c).powi(2)).sum::<f64>() / n).sqrt()
    };
    (rms(&|x| -v * x), rms(&|x: f64| -x.ln()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub v: f64,
    pub class: VelocityClass,
    pub outcome: Option<ShootOutcome>,
    /// Tail radii tried before reaching a verdict.
    pub attempts: usize,
}

/// Maps a shot onto the velocity partition. `v ≤ 0` needs no integration.
pub fn classify_velocity(v: f64, config: &ShootConfig) -> Result<Classification, ShootError> {
    if !v.is_finite() {
        return Err(DynamicsError::NonFiniteVelocity(v).into());
    }
    if v <= 0.0 {
        return Ok(Classification { v, class: VelocityClass::NoFront, outcome: None, attempts: 0 });
    }
    let mut cfg = *config;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let out = shoot(v, &cfg)?;
        let class = match out.kind {
            OutcomeKind::Blowup { .. } => VelocityClass::NoFront,
            OutcomeKind::ConvergedCenter => VelocityClass::Gradual,
            OutcomeKind::ConvergedStable => VelocityClass::SteepCandidate,
            OutcomeKind::Undecided => VelocityClass::Undecided,
        };
        // an ambiguous tail is retried with a longer one
        let retry = class == VelocityClass::Undecided
            && out.diagnostics.decided_at.is_some()
            && attempts < 3;
        if !retry {
            return Ok(Classification { v, class, outcome: Some(out), attempts });
        }
        cfg.tail_radius = cfg.tail_radius.map(|r| r / 10.0);
    }
}

/// Classifies several velocities in parallel; results keep the input order.
pub fn classify_many(vs: &[f64], config: &ShootConfig) -> Vec<Result<Classification, ShootError>> {
    vs.par_iter().map(|&v| classify_velocity(v, config)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VStarResult {
    pub v_star: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub endpoint_outcomes: (OutcomeLabel, OutcomeLabel),
}

/// Bisection on the blow-up / center-convergence predicate.
pub fn find_v_star(v_lo: f64, v_hi: f64, tol: f64, config: &ShootConfig) -> Result<VStarResult, ShootError> {
    if !(tol > 0.0) || !(v_lo < v_hi) {
        return Err(ShootError::InvalidConfig(format!("need v_lo < v_hi and tol > 0, got [{v_lo}, {v_hi}], {tol}")));
    }
    let lo_class = classify_velocity(v_lo, config)?.class;
    let hi_class = classify_velocity(v_hi, config)?.class;
    if lo_class != VelocityClass::NoFront || hi_class != VelocityClass::Gradual {
        return Err(ShootError::InvalidBracket { lo: v_lo, hi: v_hi, lo_class, hi_class });
    }
    let decision = config.decision_only();
    let (mut lo, mut hi) = (v_lo, v_hi);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        match shoot(mid, &decision)?.kind {
            OutcomeKind::Blowup { .. } => lo = mid,
            OutcomeKind::ConvergedCenter | OutcomeKind::ConvergedStable => hi = mid,
            OutcomeKind::Undecided => return Err(ShootError::UndecidedInBracket { v: mid }),
        }
    }
    Ok(VStarResult {
        v_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
        endpoint_outcomes: (OutcomeLabel::Blowup, OutcomeLabel::ConvergedCenter),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Gradual,
    Steep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub xi: f64,
    pub a: f64,
    pub kappa: f64,
    pub q: f64,
    pub theta: f64,
    pub b: Complex64,
}

impl ProfileSample {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.a, self.kappa, self.q)
    }
}

/// A front `B(ξ) = a(ξ) e^{iθ(ξ)}` sampled on a smooth grid: uniform spacing
/// through the transition, geometrically stretched along a long tail.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontProfile {
    pub params: Params,
    pub kind: ProfileKind,
    pub tol: Tolerance,
    pub samples: Vec<ProfileSample>,
    /// The anchored shot, when the profile was computed rather than loaded.
    pub trajectory: Option<Trajectory>,
}

impl FrontProfile {
    pub fn v(&self) -> f64 {
        self.params.v
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample-only trajectory view of the profile.
    pub fn as_trajectory(&self) -> Trajectory {
        Trajectory::from_samples(self.params.v, self.samples.iter().map(|s| Sample { xi: s.xi, point: s.point() }).collect())
    }

    /// Linear interpolation of `(a, q)` at `xi`, `None` outside the span.
    pub fn amplitude_and_q(&self, xi: f64) -> Option<(f64, f64)> {
        let s = &self.samples;
        if s.is_empty() || xi < s[0].xi || xi > s[s.len() - 1].xi {
            return None;
        }
        let i = s.partition_point(|p| p.xi <= xi).min(s.len() - 1).max(1);
        let (l, r) = (&s[i - 1], &s[i]);
        let t = if r.xi > l.xi { (xi - l.xi) / (r.xi - l.xi) } else { 0.0 };
        Some((l.a + t * (r.a - l.a), l.q + t * (r.q - l.q)))
    }
}

/// Grid spacing through the transition region.
pub const PROFILE_SPACING: f64 = 0.02;
/// Per-sample growth rate of the spacing along the tail.
const STRETCH_RATE: f64 = 1e-3;
/// Spacing starts to grow past this ξ.
const STRETCH_START: f64 = 40.0;

/// Smooth grid `ξ(s)` with `ξ'(s) = Δ (1 + e^{β (s - s₁)})`.
fn profile_grid(xi_start: f64, xi_end: f64) -> Vec<f64> {
    let d = PROFILE_SPACING;
    let s1 = ((STRETCH_START - xi_start) / d).max(0.0);
    let b = STRETCH_RATE;
    let at = |s: f64| xi_start + d * (s + ((b * (s - s1)).exp() - (-b * s1).exp()) / b);
    let mut grid = Vec::new();
    let mut s = 0.0;
    loop {
        let x = at(s);
        if x > xi_end {
            break;
        }
        grid.push(x);
        s += 1.0;
    }
    grid
}

/// `∫ q dξ` over `[x0, x1]` along the dense output, 3-point Gauss–Legendre
/// on each integration step inside the interval.
fn integrate_q(traj: &Trajectory, x0: f64, x1: f64) -> Result<f64, IntegrateError> {
    if x1 < x0 {
        return integrate_q(traj, x1, x0).map(|x| -x);
    }
    let i0 = traj.samples.partition_point(|s| s.xi <= x0);
    let mut cuts = vec![x0];
    cuts.extend(traj.samples[i0..].iter().map(|s| s.xi).take_while(|&x| x < x1));
    cuts.push(x1);
    let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
        for k in 0..3 {
            total += weights[k] * r * traj.interpolate(m + r * nodes[k])?.q;
        }
    }
    Ok(total)
}

/// Builds a profile from an anchored dense trajectory.
pub fn profile_from_trajectory(
    traj: &Trajectory,
    kind: ProfileKind,
    tol: Tolerance,
) -> Result<FrontProfile, ShootError> {
    let (x_lo, x_hi) = traj.span();
    if !traj.dense || !(x_lo < 0.0 && x_hi > 0.0) {
        return Err(ShootError::InvalidConfig("profile needs a dense trajectory spanning the a = 1/2 anchor".into()));
    }
    let grid = profile_grid(x_lo, x_hi);
    let mut samples = Vec::with_capacity(grid.len());
    let mut theta = -integrate_q(traj, grid[0], 0.0)?;
    let mut prev = grid[0];
    for &xi in &grid {
        theta += integrate_q(traj, prev, xi)?;
        prev = xi;
        let p = traj.interpolate(xi)?;
        samples.push(ProfileSample {
            xi,
            a: p.a,
            kappa: p.kappa,
            q: p.q,
            theta,
            b: Complex64::from_polar(p.a, theta),
        });
    }
    Ok(FrontProfile { params: Params::normalized(traj.v), kind, tol, samples, trajectory: Some(traj.clone()) })
}

/// Gradual front profile at `v`.
pub fn front_profile(v: f64, config: &ShootConfig) -> Result<FrontProfile, ShootError> {
    let c = classify_velocity(v, config)?;
    let kind = match c.class {
        VelocityClass::Gradual => ProfileKind::Gradual,
        VelocityClass::SteepCandidate => ProfileKind::Steep,
        class => return Err(ShootError::NotAFront { v, class }),
    };
    let out = c.outcome.expect("positive velocity was integrated");
    profile_from_trajectory(&out.trajectory, kind, config.tol)
}

/// Stable components may exceed the center component by at most this factor
/// before a steep profile is cut.
pub const STEEP_CUT_RATIO: f64 = 100.0;

/// Steep-front approximation at a velocity near `v*`: the shot is followed
/// along the stable manifold of `(1,0,0)` and cut once the stable components
/// have decayed to `cut_ratio` times the residual center component.
pub fn steep_profile(v: f64, config: &ShootConfig) -> Result<FrontProfile, ShootError> {
    steep_profile_with_cut(v, STEEP_CUT_RATIO, config)
}

pub fn steep_profile_with_cut(v: f64, cut_ratio: f64, config: &ShootConfig) -> Result<FrontProfile, ShootError> {
    config.validate()?;
    let seed = seed_unstable_manifold(v, config.eps)?;
    let opts = IntegrateOptions { tol: config.tol, dense: true, ..Default::default() };
    let mut it = Integrator::new(seed, 0.0, v, opts)?;
    let events = [
        EventSpec::amplitude_crosses(0.5),
        EventSpec::amplitude_exceeds(config.blowup_threshold),
        EventSpec::norm_z_exceeds(config.norm_z_threshold),
        EventSpec::center_dominates(config.decide_radius, cut_ratio),
    ];
    let ev = run_until_event(&mut it, 0.0, config, &events)?;
    let (mut traj, all) = it.finish();
    match ev.map(|e| e.kind) {
        Some(EventKind::CenterDominates { .. }) => {}
        _ => {
            return Err(ShootError::NotAFront { v, class: VelocityClass::NoFront });
        }
    }
    let anchor = all
        .iter()
        .find(|e| matches!(e.kind, EventKind::AmplitudeCrosses(_)))
        .map(|e| e.xi)
        .ok_or_else(|| ShootError::InvalidConfig("no a = 1/2 crossing".into()))?;
    traj.shift(anchor);
    profile_from_trajectory(&traj, ProfileKind::Steep, config.tol)
}

//! Adaptive integration of the travelling-wave system.
//!
//! Dormand–Prince 5(4) with PI step-size control and Hairer's continuous
//! extension for dense output. Events are located by bisection on the dense
//! interpolant.

use crate::dynamics::{linearization_at_one, PhasePoint};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("invalid integration request: {0}")]
    InvalidInput(String),
    #[error("step size underflow at xi = {xi} (state {last:?})")]
    StepUnderflow { xi: f64, last: PhasePoint },
    #[error("non-finite state at xi = {xi} (last valid state {last:?})")]
    NonFinite { xi: f64, last: PhasePoint },
    #[error("step budget of {max_steps} exhausted at xi = {xi}")]
    TooManySteps { xi: f64, max_steps: usize },
    #[error("xi = {xi} outside trajectory span [{lo}, {hi}]")]
    OutOfSpan { xi: f64, lo: f64, hi: f64 },
}

/// Error tolerance per step. `abs` applies to `κ` and `q` only: `a` is
/// controlled purely relatively, since the flow is linear in `a` near the
/// invariant plane and the seed amplitude sits far below any useful
/// absolute floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-12 }
    }
}

impl Tolerance {
    fn floor(&self, component: usize) -> f64 {
        if component == 0 {
            f64::MIN_POSITIVE
        } else {
            self.abs
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { rel: self.rel * factor, abs: self.abs * factor }
    }

    fn validate(&self) -> Result<(), IntegrateError> {
        if self.rel > 0.0 && self.abs > 0.0 && self.rel.is_finite() && self.abs.is_finite() {
            Ok(())
        } else {
            Err(IntegrateError::InvalidInput(format!("tolerances must be positive: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    /// `a` passes through `level`.
    AmplitudeCrosses(f64),
    /// `a` grows beyond `threshold`.
    AmplitudeExceeds(f64),
    /// `|z|` grows beyond `threshold`.
    NormZExceeds(f64),
    /// The state enters the ball of `radius` around `target`.
    ConvergedTo { target: PhasePoint, radius: f64 },
    /// The state is within `radius` of `(1,0,0)` on the `a < 1` side of the
    /// stable tangent plane, with stable components at most `ratio` times the
    /// center component: the trajectory is slaved to the attracting branch of
    /// the center manifold.
    CenterSlaved { radius: f64, ratio: f64 },
    /// The state is within `radius` of `(1,0,0)` and both stable components
    /// are at most `ratio` times the center component, on either side of the
    /// stable tangent plane.
    CenterDominates { radius: f64, ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub kind: EventKind,
    pub direction: Direction,
    pub terminal: bool,
}

impl EventSpec {
    pub fn new(kind: EventKind, direction: Direction, terminal: bool) -> Result<Self, IntegrateError> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        let valid = match kind {
            EventKind::AmplitudeCrosses(l) => ok(l),
            EventKind::AmplitudeExceeds(t) | EventKind::NormZExceeds(t) => ok(t),
            EventKind::ConvergedTo { target, radius } => ok(radius) && target.is_finite(),
            EventKind::CenterSlaved { radius, ratio } => ok(radius) && ok(ratio),
            EventKind::CenterDominates { radius, ratio } => ok(radius) && ok(ratio),
        };
        if valid {
            Ok(Self { kind, direction, terminal })
        } else {
            Err(IntegrateError::InvalidInput(format!("bad event parameters: {kind:?}")))
        }
    }

    pub fn amplitude_crosses(level: f64) -> Self {
        Self { kind: EventKind::AmplitudeCrosses(level), direction: Direction::Rising, terminal: false }
    }

    pub fn amplitude_exceeds(threshold: f64) -> Self {
        Self { kind: EventKind::AmplitudeExceeds(threshold), direction: Direction::Rising, terminal: true }
    }

    pub fn norm_z_exceeds(threshold: f64) -> Self {
        Self { kind: EventKind::NormZExceeds(threshold), direction: Direction::Rising, terminal: true }
    }

    pub fn converged_to(target: PhasePoint, radius: f64) -> Self {
        Self {
            kind: EventKind::ConvergedTo { target, radius },
            direction: Direction::Rising,
            terminal: true,
        }
    }

    pub fn center_slaved(radius: f64, ratio: f64) -> Self {
        Self {
            kind: EventKind::CenterSlaved { radius, ratio },
            direction: Direction::Rising,
            terminal: true,
        }
    }

    pub fn center_dominates(radius: f64, ratio: f64) -> Self {
        Self {
            kind: EventKind::CenterDominates { radius, ratio },
            direction: Direction::Rising,
            terminal: true,
        }
    }

    /// Signed event function; the event fires when it changes sign in
    /// `direction`.
    fn value(&self, p: PhasePoint, v: f64) -> f64 {
        match self.kind {
            EventKind::AmplitudeCrosses(level) => p.a - level,
            EventKind::AmplitudeExceeds(t) => p.a - t,
            EventKind::NormZExceeds(t) => p.z().norm() - t,
            EventKind::ConvergedTo { target, radius } => radius - (p - target).norm(),
            EventKind::CenterSlaved { radius, ratio } => {
                if center_slaved(p, v, radius, ratio) {
                    1.0
                } else {
                    -1.0
                }
            }
            EventKind::CenterDominates { radius, ratio } => {
                if center_dominates(p, v, radius, ratio) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Which end of the refined bracket is reported as the event state.
    fn report_after(&self) -> bool {
        matches!(
            self.kind,
            EventKind::ConvergedTo { .. } | EventKind::CenterSlaved { .. } | EventKind::CenterDominates { .. }
        )
    }
}

/// Slaving test used by [`EventKind::CenterSlaved`].
pub fn center_slaved(p: PhasePoint, v: f64, radius: f64, ratio: f64) -> bool {
    if !(v > 0.0) || p.a >= 1.0 || p.distance_to_unit() >= radius {
        return false;
    }
    let Ok(lin) = linearization_at_one(v) else {
        return false;
    };
    let (s_fast, s_gen, c) = lin.decompose(p);
    c < 0.0 && s_fast.abs().max(s_gen.abs()) <= ratio * c.abs()
}

/// Test used by [`EventKind::CenterDominates`].
pub fn center_dominates(p: PhasePoint, v: f64, radius: f64, ratio: f64) -> bool {
    if !(v > 0.0) || p.distance_to_unit() >= radius {
        return false;
    }
    let Ok(lin) = linearization_at_one(v) else {
        return false;
    };
    let (s_fast, s_gen, c) = lin.decompose(p);
    s_fast.abs().max(s_gen.abs()) <= ratio * c.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub xi: f64,
    pub point: PhasePoint,
}

/// Quartic continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DenseSegment {
    xi0: f64,
    h: f64,
    coeffs: [[f64; 3]; 5],
}

impl DenseSegment {
    fn eval(&self, xi: f64) -> PhasePoint {
        let t = (xi - self.xi0) / self.h;
        let t1 = 1.0 - t;
        let c = &self.coeffs;
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])));
        }
        PhasePoint::from_array(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Index into the event list passed to the integrator.
    pub index: usize,
    pub kind: EventKind,
    pub xi: f64,
    pub point: PhasePoint,
}

/// A sampled solution. `segments[i]` interpolates between `samples[i]` and
/// `samples[i + 1]` when `dense` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub v: f64,
    pub samples: Vec<Sample>,
    pub dense: bool,
    segments: Vec<DenseSegment>,
}

impl Trajectory {
    /// A sample-only trajectory; interpolation falls back to linear.
    pub fn from_samples(v: f64, samples: Vec<Sample>) -> Self {
        Self { v, samples, dense: false, segments: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn span(&self) -> (f64, f64) {
        (self.first().xi, self.last().xi)
    }

    /// Translate so that `xi_new = xi - delta`.
    pub fn shift(&mut self, delta: f64) {
        for s in &mut self.samples {
            s.xi -= delta;
        }
        for seg in &mut self.segments {
            seg.xi0 -= delta;
        }
    }

    /// Applies `(ξ, a, κ, q) → (ξ/λ, λa, λκ, λq)` in place, velocity included.
    pub(crate) fn rescale(&mut self, lambda: f64) {
        self.v *= lambda;
        for s in &mut self.samples {
            s.xi /= lambda;
            s.point = lambda * s.point;
        }
        for seg in &mut self.segments {
            seg.xi0 /= lambda;
            seg.h /= lambda;
            for row in &mut seg.coeffs {
                for x in row.iter_mut() {
                    *x *= lambda;
                }
            }
        }
    }

    /// Drops everything after `xi`, ending the trajectory at the interpolated
    /// state there.
    pub fn truncate_at(&mut self, xi: f64) -> Result<(), IntegrateError> {
        let p = self.interpolate(xi)?;
        let i = self.samples.partition_point(|s| s.xi < xi);
        self.samples.truncate(i);
        self.samples.push(Sample { xi, point: p });
        if self.dense {
            self.segments.truncate(self.samples.len() - 1);
        }
        Ok(())
    }

    pub fn interpolate(&self, xi: f64) -> Result<PhasePoint, IntegrateError> {
        let (lo, hi) = self.span();
        if !(xi >= lo && xi <= hi) {
            return Err(IntegrateError::OutOfSpan { xi, lo, hi });
        }
        let i = self.samples.partition_point(|s| s.xi <= xi);
        // samples[i - 1].xi <= xi < samples[i].xi, or xi is the final node
        let k = i - 1;
        let s = &self.samples[k];
        if s.xi == xi || k + 1 == self.samples.len() {
            return Ok(s.point);
        }
        if self.dense {
            Ok(self.segments[k].eval(xi))
        } else {
            let n = &self.samples[k + 1];
            let t = (xi - s.xi) / (n.xi - s.xi);
            Ok((1.0 - t) * s.point + t * n.point)
        }
    }

    /// Samples with `xi >= from`.
    pub fn tail(&self, from: f64) -> &[Sample] {
        let i = self.samples.partition_point(|s| s.xi < from);
        &self.samples[i..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub tol: Tolerance,
    /// Keep dense-output coefficients.
    pub dense: bool,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { tol: Tolerance::default(), dense: true, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult {
    pub trajectory: Trajectory,
    /// Every triggered event, in ξ order.
    pub events: Vec<Event>,
    /// The terminal event that stopped integration, if any.
    pub terminal: Option<Event>,
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type V3 = [f64; 3];

#[inline]
fn f3(y: V3, v: f64) -> V3 {
    let [a, k, q] = y;
    [k * a, -v * k + q * q - k * k, 1.0 - a * a - v * q - 2.0 * q * k]
}

#[inline]
fn comb(y: V3, h: f64, terms: &[(f64, &V3)]) -> V3 {
    let mut out = y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Stateful stepper that can extend a trajectory in several calls.
pub struct Integrator {
    v: f64,
    opts: IntegrateOptions,
    xi: f64,
    y: V3,
    dy: V3,
    h: f64,
    err_old: f64,
    steps: usize,
    trajectory: Trajectory,
    events: Vec<Event>,
}

impl Integrator {
    pub fn new(start: PhasePoint, xi0: f64, v: f64, opts: IntegrateOptions) -> Result<Self, IntegrateError> {
        opts.tol.validate()?;
        if !start.is_finite() || !v.is_finite() || !xi0.is_finite() {
            return Err(IntegrateError::InvalidInput("non-finite start".into()));
        }
        if !(start.a > 0.0) {
            return Err(IntegrateError::InvalidInput(format!("start amplitude must be positive, got {}", start.a)));
        }
        let y = start.to_array();
        let dy = f3(y, v);
        let mut it = Self {
            v,
            opts,
            xi: xi0,
            y,
            dy,
            h: 0.0,
            err_old: 1e-4,
            steps: 0,
            trajectory: Trajectory {
                v,
                samples: vec![Sample { xi: xi0, point: start }],
                dense: opts.dense,
                segments: Vec::new(),
            },
            events: Vec::new(),
        };
        it.h = it.initial_step();
        Ok(it)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn state(&self) -> PhasePoint {
        PhasePoint::from_array(self.y)
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn finish(self) -> (Trajectory, Vec<Event>) {
        (self.trajectory, self.events)
    }

    fn scale(&self, y: &V3, i: usize) -> f64 {
        self.opts.tol.floor(i) + self.opts.tol.rel * y[i].abs()
    }

    // Hairer & Wanner, "hinit".
    fn initial_step(&self) -> f64 {
        let y = self.y;
        let f0 = self.dy;
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..3 {
            let sk = self.scale(&y, i);
            d0 += (y[i] / sk).powi(2);
            d1 += (f0[i] / sk).powi(2);
        }
        let (d0, d1) = ((d0 / 3.0).sqrt(), (d1 / 3.0).sqrt());
        let h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = comb(y, h0, &[(1.0, &f0)]);
        let f1 = f3(y1, self.v);
        let mut d2 = 0.0;
        for i in 0..3 {
            d2 += ((f1[i] - f0[i]) / self.scale(&y, i)).powi(2);
        }
        let d2 = (d2 / 3.0).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Integrates up to `xi_end` or the first terminal event.
    pub fn advance(&mut self, xi_end: f64, events: &[EventSpec]) -> Result<Option<Event>, IntegrateError> {
        const SAFETY: f64 = 0.9;
        const BETA: f64 = 0.04;
        const ALPHA: f64 = 0.2 - BETA * 0.75;
        const FAC_MIN: f64 = 0.2;
        const FAC_MAX: f64 = 10.0;

        let v = self.v;
        let mut g_prev: Vec<f64> = events.iter().map(|e| e.value(self.state(), v)).collect();

        while self.xi < xi_end {
            if self.steps >= self.opts.max_steps {
                return Err(IntegrateError::TooManySteps { xi: self.xi, max_steps: self.opts.max_steps });
            }
            let mut h = self.h.min(xi_end - self.xi);
            let last_step = h >= xi_end - self.xi;
            if h <= 1e-14 * self.xi.abs().max(1.0) {
                return Err(IntegrateError::StepUnderflow { xi: self.xi, last: self.state() });
            }
            let y = self.y;
            let k1 = self.dy;
            let k2 = f3(comb(y, h, &[(A21, &k1)]), v);
            let k3 = f3(comb(y, h, &[(A31, &k1), (A32, &k2)]), v);
            let k4 = f3(comb(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), v);
            let k5 = f3(comb(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), v);
            let k6 = f3(comb(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]), v);
            let y1 = comb(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f3(y1, v);
            self.steps += 1;

            let mut err = 0.0;
            for i in 0..3 {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = self.opts.tol.floor(i) + self.opts.tol.rel * y[i].abs().max(y1[i].abs());
                err += (e / sk).powi(2);
            }
            let err = (err / 3.0).sqrt();

            if !err.is_finite() || !y1.iter().all(|x| x.is_finite()) {
                // shrink and retry; give up once the step underflows
                self.h = h * FAC_MIN;
                if self.h <= 1e-14 * self.xi.abs().max(1.0) {
                    return Err(IntegrateError::NonFinite { xi: self.xi + h, last: self.state() });
                }
                continue;
            }

            if err <= 1.0 {
                let fac = (SAFETY * err.max(1e-10).powf(-ALPHA) * self.err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX);
                self.err_old = err.max(1e-4);

                let mut coeffs = [[0.0; 3]; 5];
                for i in 0..3 {
                    let dyi = y1[i] - y[i];
                    let bspl = h * k1[i] - dyi;
                    coeffs[0][i] = y[i];
                    coeffs[1][i] = dyi;
                    coeffs[2][i] = bspl;
                    coeffs[3][i] = dyi - h * k7[i] - bspl;
                    coeffs[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let seg = DenseSegment { xi0: self.xi, h, coeffs };
                let xi_new = if last_step { xi_end } else { self.xi + h };

                // events on this step, earliest terminal one wins
                let p1 = PhasePoint::from_array(y1);
                let mut hits: Vec<Event> = Vec::new();
                for (idx, spec) in events.iter().enumerate() {
                    let g1 = spec.value(p1, v);
                    let g0 = g_prev[idx];
                    let crossed = match spec.direction {
                        Direction::Rising => g0 < 0.0 && g1 >= 0.0,
                        Direction::Falling => g0 > 0.0 && g1 <= 0.0,
                        Direction::Any => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
                    };
                    g_prev[idx] = g1;
                    if crossed {
                        let ev = self.refine(spec, idx, &seg, self.xi, xi_new, PhasePoint::from_array(y), p1);
                        hits.push(ev);
                    }
                }
                hits.sort_by(|a, b| a.xi.total_cmp(&b.xi));
                let terminal = hits.iter().position(|e| events[e.index].terminal);

                if let Some(ti) = terminal {
                    let ev = hits[ti].clone();
                    self.events.extend(hits.into_iter().take(ti + 1));
                    self.push_step(seg, ev.xi, ev.point);
                    self.xi = ev.xi;
                    self.y = ev.point.to_array();
                    self.dy = f3(self.y, v);
                    self.h = h * fac;
                    return Ok(Some(ev));
                }
                self.events.extend(hits);
                self.push_step(seg, xi_new, p1);
                self.xi = xi_new;
                self.y = y1;
                self.dy = k7;
                self.h = h * fac;
            } else {
                let fac = (SAFETY * err.powf(-ALPHA)).clamp(FAC_MIN, 1.0);
                h *= fac;
                self.h = h;
            }
        }
        Ok(None)
    }

    fn push_step(&mut self, seg: DenseSegment, xi: f64, p: PhasePoint) {
        if self.opts.dense {
            self.trajectory.segments.push(seg);
        }
        self.trajectory.samples.push(Sample { xi, point: p });
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        spec: &EventSpec,
        index: usize,
        seg: &DenseSegment,
        mut lo: f64,
        mut hi: f64,
        p_lo: PhasePoint,
        p_hi: PhasePoint,
    ) -> Event {
        let v = self.v;
        let g_lo0 = spec.value(p_lo, v);
        let width_tol = self.opts.tol.abs.max(self.opts.tol.rel * hi.abs());
        let (mut plo, mut phi) = (p_lo, p_hi);
        for _ in 0..200 {
            if hi - lo <= width_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let pm = seg.eval(mid);
            let gm = spec.value(pm, v);
            // same side as the pre-crossing value?
            if (gm < 0.0) == (g_lo0 < 0.0) && gm != 0.0 {
                lo = mid;
                plo = pm;
            } else {
                hi = mid;
                phi = pm;
            }
        }
        let (xi, point) = if spec.report_after() {
            (hi, phi)
        } else if matches!(spec.kind, EventKind::AmplitudeExceeds(_) | EventKind::NormZExceeds(_))
            || spec.value(plo, v).abs() <= spec.value(phi, v).abs()
        {
            (lo, plo)
        } else {
            (hi, phi)
        };
        Event { index, kind: spec.kind, xi, point }
    }
}

/// Integrates the `ω = 1` system from `start` over `span`.
pub fn integrate(
    start: PhasePoint,
    v: f64,
    span: (f64, f64),
    opts: IntegrateOptions,
    events: &[EventSpec],
) -> Result<IntegrationResult, IntegrateError> {
    if !(span.0 < span.1) {
        return Err(IntegrateError::InvalidInput(format!("empty span {span:?}")));
    }
    let mut it = Integrator::new(start, span.0, v, opts)?;
    let terminal = it.advance(span.1, events)?;
    let (trajectory, events) = it.finish();
    Ok(IntegrationResult { trajectory, events, terminal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{second_derivative_a, zero_plane_equilibria};

    #[test]
    fn equilibrium_stays_constant() {
        for v in [0.5, 1.0, 3.0] {
            let r = integrate(PhasePoint::unit(), v, (0.0, 10.0), IntegrateOptions::default(), &[]).unwrap();
            assert!(r.events.is_empty() && r.terminal.is_none());
            assert!(r.trajectory.samples.iter().all(|s| s.point == PhasePoint::unit()));
            assert_eq!(r.trajectory.last().xi, 10.0);
            let mid = r.trajectory.interpolate(3.3).unwrap();
            assert_eq!(mid, PhasePoint::unit());
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let o = IntegrateOptions::default();
        assert!(integrate(PhasePoint::new(0.0, 0.1, 0.1), 1.0, (0.0, 1.0), o, &[]).is_err());
        assert!(integrate(PhasePoint::unit(), 1.0, (1.0, 1.0), o, &[]).is_err());
        let bad = IntegrateOptions { tol: Tolerance { rel: 0.0, abs: 1e-12 }, ..o };
        assert!(integrate(PhasePoint::unit(), 1.0, (0.0, 1.0), bad, &[]).is_err());
        assert!(EventSpec::new(EventKind::AmplitudeExceeds(-1.0), Direction::Rising, true).is_err());
    }

    #[test]
    fn negative_velocity_blows_up() {
        let z = zero_plane_equilibria(1.0).unwrap().z_plus;
        let start = PhasePoint::new(0.5, z.re, z.im);
        let r = integrate(start, -1.0, (0.0, 1e3), IntegrateOptions::default(), &[EventSpec::amplitude_exceeds(10.0)])
            .unwrap();
        let ev = r.terminal.expect("blow-up event");
        assert!(ev.xi.is_finite() && ev.xi < 1e3);
        assert!(ev.point.a <= 10.0 && ev.point.a > 10.0 - 1e-6);
    }

    fn generic_run(tol: Tolerance) -> Trajectory {
        let opts = IntegrateOptions { tol, ..Default::default() };
        integrate(PhasePoint::new(0.2, 0.4, 0.3), 1.5, (0.0, 8.0), opts, &[]).unwrap().trajectory
    }

    #[test]
    fn self_convergence() {
        let tol = Tolerance::default();
        let a = generic_run(tol).last().point;
        let b = generic_run(tol.scaled(0.5)).last().point;
        let d = (a - b).norm();
        assert!(d < 10.0 * tol.rel, "endpoint difference {d}");
    }

    #[test]
    fn interpolation_at_nodes_and_against_reintegration() {
        let traj = generic_run(Tolerance::default());
        let s = traj.samples[5];
        assert_eq!(traj.interpolate(s.xi).unwrap(), s.point);
        assert!(traj.interpolate(-0.1).is_err());
        assert!(traj.interpolate(8.1).is_err());
        for k in [3usize, 10, 20] {
            let (x0, x1) = (traj.samples[k].xi, traj.samples[k + 1].xi);
            let mid = 0.5 * (x0 + x1);
            let p = traj.interpolate(mid).unwrap();
            let re = integrate(PhasePoint::new(0.2, 0.4, 0.3), 1.5, (0.0, mid), IntegrateOptions::default(), &[])
                .unwrap()
                .trajectory
                .last()
                .point;
            assert!((p - re).norm() < 1e-9, "k={k}: {}", (p - re).norm());
        }
    }

    #[test]
    fn second_derivative_identity_along_trajectory() {
        let traj = generic_run(Tolerance::default());
        let v = 1.5;
        let h = 1e-3;
        let (lo, hi) = traj.span();
        let aprime = |xi: f64| {
            let p = traj.interpolate(xi).unwrap();
            p.kappa * p.a
        };
        let mut xi = lo + 0.1;
        while xi < hi - 0.1 {
            let fd = (aprime(xi + h) - aprime(xi - h)) / (2.0 * h);
            let exact = second_derivative_a(traj.interpolate(xi).unwrap(), v);
            // central-difference truncation ~ h² a''''/6
            assert!((fd - exact).abs() < 1e-6, "xi={xi}: {fd} vs {exact}");
            xi += 0.37;
        }
    }

    #[test]
    fn crossing_event_is_refined() {
        let opts = IntegrateOptions::default();
        let r = integrate(
            PhasePoint::new(0.2, 0.4, 0.3),
            1.5,
            (0.0, 8.0),
            opts,
            &[EventSpec::amplitude_crosses(0.5)],
        )
        .unwrap();
        assert_eq!(r.events.len(), 1);
        let ev = &r.events[0];
        assert!((ev.point.a - 0.5).abs() < 1e-10);
        assert!(r.terminal.is_none());
        assert_eq!(r.trajectory.last().xi, 8.0);
    }

    #[test]
    fn advance_in_chunks_matches_single_run() {
        let start = PhasePoint::new(0.2, 0.4, 0.3);
        let mut it = Integrator::new(start, 0.0, 1.5, IntegrateOptions::default()).unwrap();
        it.advance(3.0, &[]).unwrap();
        it.advance(8.0, &[]).unwrap();
        let chunked = it.state();
        let single = generic_run(Tolerance::default()).last().point;
        assert!((chunked - single).norm() < 1e-9);
    }

    #[test]
    fn shift_and_truncate() {
        let mut traj = generic_run(Tolerance::default());
        let p = traj.interpolate(4.0).unwrap();
        traj.shift(4.0);
        assert_eq!(traj.interpolate(0.0).unwrap(), p);
        traj.truncate_at(1.0).unwrap();
        assert_eq!(traj.last().xi, 1.0);
        assert_eq!(traj.interpolate(0.0).unwrap(), p);
    }
}

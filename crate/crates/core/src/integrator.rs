//! Dormand–Prince 5(4) integration with event location.

use crate::dynsys::{State, VectorField};
use crate::expr::EvalError;
use crate::linalg::{dist, inf_norm};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrateError {
    #[error("step size underflow at t={t} (dt={dt:e})")]
    StepUnderflow { t: f64, dt: f64 },
    #[error("exceeded {steps} steps at t={t}")]
    MaxSteps { t: f64, steps: usize },
    #[error("cannot evaluate the field at t={t}: {source}")]
    Eval {
        t: f64,
        #[source]
        source: EvalError,
    },
    #[error("non-finite initial state")]
    NonFinite,
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub tol: f64,
    pub max_steps: usize,
    /// Keep every accepted step; when false only the endpoints are kept.
    pub record: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-9,
            max_steps: 1_000_000,
            record: true,
        }
    }
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Options {
            tol,
            ..Options::default()
        }
    }

    pub fn endpoints_only(mut self) -> Self {
        self.record = false;
        self
    }
}

/// Sign change of an event function that counts as a crossing, taken in
/// the order the trajectory is traversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

pub type EventFn<'a> = Box<dyn Fn(&State) -> f64 + Send + Sync + 'a>;

pub struct EventSpec<'a> {
    pub id: usize,
    pub g: EventFn<'a>,
    pub direction: Crossing,
    pub terminal: bool,
}

impl<'a> EventSpec<'a> {
    pub fn new(
        id: usize,
        direction: Crossing,
        terminal: bool,
        g: impl Fn(&State) -> f64 + Send + Sync + 'a,
    ) -> Self {
        EventSpec {
            id,
            g: Box::new(g),
            direction,
            terminal,
        }
    }

    fn crosses(&self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self.direction {
            Crossing::Rising => rising,
            Crossing::Falling => falling,
            Crossing::Either => rising || falling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub id: usize,
    pub t: f64,
    pub state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TimeLimit,
    Event(usize),
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, State)>,
    pub termination: Termination,
    pub events: Vec<EventRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        self.samples.last().map(|s| s.1).unwrap_or([f64::NAN; 2])
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(f64::NAN)
    }

    pub fn points(&self) -> Vec<State> {
        self.samples.iter().map(|s| s.1).collect()
    }

    /// `t,x[,y]` with one row per sample and 17 significant digits.
    pub fn to_csv(&self, dim: usize) -> String {
        let mut out = String::from(if dim == 1 { "t,x\n" } else { "t,x,y\n" });
        for (t, x) in &self.samples {
            let _ = write!(out, "{t:.16e}");
            for v in &x[..dim] {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Field evaluation with the time direction folded in.
struct Rhs<'a> {
    field: &'a VectorField,
    sign: f64,
}

impl Rhs<'_> {
    fn eval(&self, x: &State) -> Result<State, EvalError> {
        let v = self.field.eval(x)?;
        Ok([self.sign * v[0], self.sign * v[1]])
    }
}

struct Trial {
    state: State,
    k_end: State,
    err: f64,
    // h times a local Lipschitz estimate; explicit stability needs it small
    stiffness: f64,
    // error estimate relative to the step's displacement
    drift: f64,
}

// larger drift means the stages disagree about the local direction, as
// happens when a step straddles a pole
const MAX_DRIFT: f64 = 0.01;

const STABLE_HL: f64 = 3.3;

impl Trial {
    fn accepted(&self, tol: f64) -> bool {
        self.err <= tol && self.stiffness <= STABLE_HL && self.drift <= MAX_DRIFT
    }
}

fn combo(x: &State, h: f64, ks: &[State], w: &[f64]) -> State {
    let mut out = *x;
    for (k, c) in ks.iter().zip(w) {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One Dormand–Prince step without acceptance logic. `err` is the scaled
/// error estimate max |e_i| / (1 + max(|x_i|, |x'_i|)).
fn dp_step(rhs: &Rhs, x: &State, k1: &State, h: f64) -> Result<Trial, EvalError> {
    let mut ks = [*k1; 7];
    ks[1] = rhs.eval(&combo(x, h, &ks[..1], &A2))?;
    ks[2] = rhs.eval(&combo(x, h, &ks[..2], &A3))?;
    ks[3] = rhs.eval(&combo(x, h, &ks[..3], &A4))?;
    ks[4] = rhs.eval(&combo(x, h, &ks[..4], &A5))?;
    let y6 = combo(x, h, &ks[..5], &A6);
    ks[5] = rhs.eval(&y6)?;
    let state = combo(x, h, &ks[..6], &B);
    ks[6] = rhs.eval(&state)?;
    let mut err = 0.0f64;
    let mut e_abs = [0.0; 2];
    for i in 0..2 {
        let e: f64 = h * (0..7).map(|s| E[s] * ks[s][i]).sum::<f64>();
        let sc = 1.0 + x[i].abs().max(state[i].abs());
        err = err.max(e.abs() / sc);
        e_abs[i] = e;
    }
    let e_norm = e_abs[0].hypot(e_abs[1]);
    let moved = dist(&state, x);
    let drift = if k1[0] * ks[6][0] + k1[1] * ks[6][1] < 0.0 {
        // the direction of motion reversed inside one step
        f64::INFINITY
    } else if e_norm <= 1e-14 * (1.0 + inf_norm(x)) {
        0.0
    } else {
        e_norm / moved
    };
    if !(state[0].is_finite() && state[1].is_finite()) {
        err = f64::INFINITY;
    }
    let dy = dist(&state, &y6);
    let stiffness = if dy > 0.0 {
        h * dist(&ks[6], &ks[5]) / dy
    } else {
        0.0
    };
    Ok(Trial {
        state,
        k_end: ks[6],
        err,
        stiffness,
        drift,
    })
}

fn underflow(t: f64, dt: f64) -> bool {
    dt < 1e-14 * t.abs() + 1e-30
}

/// Step-size controller state; the previous accepted error feeds the PI
/// term.
struct Controller {
    prev_err: f64,
}

impl Controller {
    fn reject(&mut self, dt: f64, trial: &Trial, tol: f64) -> f64 {
        let mut h = self.next(dt, trial.err / tol, false);
        if trial.stiffness > STABLE_HL {
            h = h.min(dt * (0.9 * STABLE_HL / trial.stiffness).max(0.2));
        }
        if trial.drift > MAX_DRIFT {
            h = h.min(dt * 0.5);
        }
        h
    }

    fn next(&mut self, dt: f64, err_ratio: f64, accepted: bool) -> f64 {
        let ratio = if err_ratio == 0.0 {
            5.0
        } else if accepted {
            0.9 * err_ratio.powf(-0.17) * self.prev_err.powf(0.04)
        } else {
            0.9 * err_ratio.powf(-0.2)
        };
        let ratio = if accepted {
            ratio.clamp(0.2, 5.0)
        } else {
            ratio.clamp(0.2, 1.0)
        };
        if accepted {
            self.prev_err = err_ratio.max(1e-4);
        }
        dt * ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub state: State,
    pub t: f64,
    pub dt_used: f64,
    pub dt_next: f64,
    pub err: f64,
}

/// Take one accepted step forward in time, retrying with smaller `dt`
/// until the error estimate is within `tol`.
pub fn step(
    field: &VectorField,
    state: &State,
    t: f64,
    dt: f64,
    tol: f64,
) -> Result<StepResult, IntegrateError> {
    if !(dt > 0.0) {
        return Err(IntegrateError::BadStep(dt));
    }
    let rhs = Rhs { field, sign: 1.0 };
    let k1 = rhs
        .eval(state)
        .map_err(|source| IntegrateError::Eval { t, source })?;
    let mut ctl = Controller { prev_err: 1.0 };
    let mut h = dt;
    loop {
        if underflow(t, h) {
            return Err(IntegrateError::StepUnderflow { t, dt: h });
        }
        match dp_step(&rhs, state, &k1, h) {
            Ok(trial) if trial.accepted(tol) => {
                let dt_next = ctl.next(h, trial.err / tol, true);
                return Ok(StepResult {
                    state: trial.state,
                    t: t + h,
                    dt_used: h,
                    dt_next,
                    err: trial.err,
                });
            }
            Ok(trial) => h = ctl.reject(h, &trial, tol),
            Err(_) => h *= 0.2,
        }
    }
}

fn initial_step(rhs: &Rhs, x: &State, k1: &State, tol: f64, span: f64) -> f64 {
    let sc = |i: usize| tol * (1.0 + x[i].abs());
    let norm = |v: &State| ((v[0] / sc(0)).powi(2) + (v[1] / sc(1)).powi(2)).sqrt();
    let d0 = norm(x);
    let d1 = norm(k1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let x1 = [x[0] + h0 * k1[0], x[1] + h0 * k1[1]];
    let d2 = match rhs.eval(&x1) {
        Ok(k) => norm(&[k[0] - k1[0], k[1] - k1[1]]) / h0,
        Err(_) => return h0.min(span),
    };
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / m).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrate from `t_span.0` to `t_span.1`; a decreasing span runs the
/// flow backward.
pub fn integrate(
    field: &VectorField,
    x0: State,
    t_span: (f64, f64),
    opts: &Options,
    events: &[EventSpec],
) -> Result<Trajectory, IntegrateError> {
    if !(x0[0].is_finite() && x0[1].is_finite()) {
        return Err(IntegrateError::NonFinite);
    }
    let (t0, t1) = t_span;
    let sign = if t1 < t0 { -1.0 } else { 1.0 };
    let span = (t1 - t0).abs();
    let rhs = Rhs { field, sign };
    let at = |tau: f64| t0 + sign * tau;

    let mut x = x0;
    let mut k = rhs
        .eval(&x)
        .map_err(|source| IntegrateError::Eval { t: t0, source })?;
    let mut traj = Trajectory {
        samples: vec![(t0, x0)],
        termination: Termination::TimeLimit,
        events: Vec::new(),
    };
    if span == 0.0 {
        return Ok(traj);
    }
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(&x)).collect();
    let mut tau = 0.0;
    let mut h = initial_step(&rhs, &x, &k, opts.tol, span);
    let mut ctl = Controller { prev_err: 1.0 };
    let mut steps = 0usize;

    while tau < span {
        if steps >= opts.max_steps {
            return Err(IntegrateError::MaxSteps {
                t: at(tau),
                steps,
            });
        }
        let last = tau + h >= span;
        let hs = if last { span - tau } else { h };
        if underflow(at(tau), hs) && !last {
            return Err(IntegrateError::StepUnderflow { t: at(tau), dt: hs });
        }
        let trial = match dp_step(&rhs, &x, &k, hs) {
            Ok(trial) if trial.accepted(opts.tol) => trial,
            Ok(trial) => {
                h = ctl.reject(hs, &trial, opts.tol);
                continue;
            }
            Err(_) => {
                h = hs * 0.2;
                continue;
            }
        };
        steps += 1;

        // events crossed inside this step, in order of occurrence
        let mut hits: Vec<(f64, usize, State)> = Vec::new();
        let g_new: Vec<f64> = events.iter().map(|e| (e.g)(&trial.state)).collect();
        for (i, ev) in events.iter().enumerate() {
            if ev.crosses(g_prev[i], g_new[i]) {
                let (s, state) = locate(&rhs, &x, &k, hs, &ev.g, g_prev[i], trial.state);
                hits.push((s, i, state));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (s, i, state) in &hits {
            let ev = &events[*i];
            traj.events.push(EventRecord {
                id: ev.id,
                t: at(tau + s),
                state: *state,
            });
            if ev.terminal {
                traj.samples.push((at(tau + s), *state));
                traj.termination = Termination::Event(ev.id);
                return Ok(traj);
            }
        }

        tau = if last { span } else { tau + hs };
        x = trial.state;
        k = trial.k_end;
        g_prev = g_new;
        if opts.record || tau >= span {
            traj.samples.push((at(tau), x));
        }
        h = ctl.next(hs, trial.err / opts.tol, true);
    }
    Ok(traj)
}

/// Bisection on the step length for a zero of `g`.
fn locate(
    rhs: &Rhs,
    x: &State,
    k: &State,
    h: f64,
    g: &EventFn,
    g_lo: f64,
    end: State,
) -> (f64, State) {
    let (mut lo, mut hi) = (0.0, h);
    let mut best = (h, end);
    let lo_sign = g_lo < 0.0;
    for _ in 0..200 {
        if hi - lo < 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let Ok(trial) = dp_step(rhs, x, k, mid) else {
            break;
        };
        let gm = g(&trial.state);
        if gm.abs() < 1e-12 {
            return (mid, trial.state);
        }
        if (gm < 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
            best = (mid, trial.state);
        }
    }
    best
}

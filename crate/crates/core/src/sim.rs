//! Event-driven fixed-step integration of the walking dynamics.
//!
//! Classical RK4 advances the four-dimensional state `(x, y, vx, vy)` with
//! the support phase held fixed. Touchdown, takeoff and apex surfaces are
//! watched across every step and localized by bisection on the step
//! fraction, so transitions happen on the event surface rather than on the
//! step grid. Output samples land on exact multiples of the sampling
//! interval by integrating a truncated partial step, never by interpolation.

use alloc::vec::Vec;

use crate::dynamics::{
    accelerations, apply_takeoff, apply_touchdown, takeoff_condition, total_energy,
    touchdown_condition, DynamicsError, GaitParams, InvalidParam, Phase, SimState,
};

/// Bisection stops once the event time is bracketed tighter than this, s.
pub const EVENT_TIME_TOLERANCE: f64 = 1e-9;

/// Apex-start initial conditions: the stance leg is vertical, the center of
/// mass sits `y_offset` below the rest length and moves forward at `v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    /// Initial horizontal position (and stance foot point), m.
    pub x0: f64,
    /// Initial compression of the stance leg, m; the apex height is
    /// `rest_length - y_offset`.
    pub y_offset: f64,
    /// Initial horizontal speed, m/s.
    pub v0: f64,
}

impl InitialConditions {
    pub fn validate(&self, params: &GaitParams) -> Result<(), InvalidParam> {
        if !self.x0.is_finite() {
            return Err(InvalidParam { name: "x0", value: self.x0 });
        }
        if !(self.y_offset >= 0.0 && self.y_offset < params.rest_length) {
            return Err(InvalidParam { name: "y_offset", value: self.y_offset });
        }
        if !(self.v0.is_finite() && self.v0 > 0.0) {
            return Err(InvalidParam { name: "v0", value: self.v0 });
        }
        Ok(())
    }

    /// The state the simulation starts from.
    pub fn initial_state(&self, params: &GaitParams) -> SimState {
        SimState {
            t: 0.0,
            x: self.x0,
            y: params.rest_length - self.y_offset,
            vx: self.v0,
            vy: 0.0,
            phase: Phase::SingleSupport { foot: self.x0 },
        }
    }
}

impl Default for InitialConditions {
    fn default() -> Self {
        InitialConditions { x0: 0.0, y_offset: 0.0, v0: 0.85 }
    }
}

/// Duration, output sampling interval and internal integrator step, s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub duration: f64,
    pub output_dt: f64,
    pub internal_h: f64,
}

impl SimSettings {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(InvalidParam { name: "duration", value: self.duration });
        }
        if !(self.output_dt.is_finite() && self.output_dt > 0.0) {
            return Err(InvalidParam { name: "output_dt", value: self.output_dt });
        }
        if !(self.internal_h.is_finite() && self.internal_h > 0.0)
            || self.internal_h > self.output_dt
        {
            return Err(InvalidParam { name: "internal_h", value: self.internal_h });
        }
        Ok(())
    }
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings { duration: 15.0, output_dt: 0.1, internal_h: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Touchdown,
    Takeoff,
    Apex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

/// Support phase tag attached to each output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportPhase {
    Single,
    Double,
}

/// A trajectory that violates walking validity, with the failure time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaitFailure {
    /// Center of mass reached the ground (`y <= 0`).
    Fall { t: f64 },
    /// Forward progress reversed (`vx <= 0`).
    Reversal { t: f64 },
    /// State became non-finite.
    Blowup { t: f64 },
}

impl GaitFailure {
    pub fn time(&self) -> f64 {
        match *self {
            GaitFailure::Fall { t } | GaitFailure::Reversal { t } | GaitFailure::Blowup { t } => t,
        }
    }
}

impl core::fmt::Display for GaitFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GaitFailure::Fall { t } => write!(f, "fall at t = {t} s"),
            GaitFailure::Reversal { t } => write!(f, "reversal at t = {t} s"),
            GaitFailure::Blowup { t } => write!(f, "numerical blowup at t = {t} s"),
        }
    }
}

impl core::error::Error for GaitFailure {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimError {
    /// Step size must be strictly positive.
    NonPositiveStep,
    /// The integrator produced a non-finite state.
    NonFiniteState,
    /// Event localization was asked for an interval without a sign change.
    NoSignChange,
    Dynamics(DynamicsError),
}

impl From<DynamicsError> for SimError {
    fn from(e: DynamicsError) -> Self {
        SimError::Dynamics(e)
    }
}

impl core::fmt::Display for SimError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SimError::NonPositiveStep => write!(f, "step size must be positive"),
            SimError::NonFiniteState => write!(f, "integrator produced a non-finite state"),
            SimError::NoSignChange => write!(f, "no sign change in the event bracket"),
            SimError::Dynamics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimError {}

/// Uniformly sampled trajectory with the step-event log and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Output sampling interval, s.
    pub dt: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub vxs: Vec<f64>,
    pub vys: Vec<f64>,
    pub phases: Vec<SupportPhase>,
    pub events: Vec<Event>,
    pub params: GaitParams,
    pub init: InitialConditions,
    /// Max relative deviation of total energy from its initial value.
    pub energy_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Sample time of index `i`.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }
}

/// One classical Runge-Kutta step of size `h` with the phase held fixed.
pub fn rk4_step(state: &SimState, params: &GaitParams, h: f64) -> Result<SimState, SimError> {
    if !(h > 0.0) {
        return Err(SimError::NonPositiveStep);
    }
    let deriv = |x: f64, y: f64, vx: f64, vy: f64| -> Result<[f64; 4], SimError> {
        let probe = SimState { x, y, vx, vy, ..*state };
        let (ax, ay) = accelerations(&probe, params)?;
        Ok([vx, vy, ax, ay])
    };
    let k1 = deriv(state.x, state.y, state.vx, state.vy)?;
    let k2 = deriv(
        state.x + 0.5 * h * k1[0],
        state.y + 0.5 * h * k1[1],
        state.vx + 0.5 * h * k1[2],
        state.vy + 0.5 * h * k1[3],
    )?;
    let k3 = deriv(
        state.x + 0.5 * h * k2[0],
        state.y + 0.5 * h * k2[1],
        state.vx + 0.5 * h * k2[2],
        state.vy + 0.5 * h * k2[3],
    )?;
    let k4 = deriv(
        state.x + h * k3[0],
        state.y + h * k3[1],
        state.vx + h * k3[2],
        state.vy + h * k3[3],
    )?;
    let sixth = h / 6.0;
    let next = SimState {
        t: state.t + h,
        x: state.x + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y: state.y + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        vx: state.vx + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        vy: state.vy + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
        phase: state.phase,
    };
    if next.x.is_finite() && next.y.is_finite() && next.vx.is_finite() && next.vy.is_finite() {
        Ok(next)
    } else {
        Err(SimError::NonFiniteState)
    }
}

/// Required crossing direction of an event condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    /// From strictly positive to non-positive.
    Falling,
    /// From strictly negative to non-negative.
    Rising,
}

impl CrossingDirection {
    fn brackets(&self, start: f64, end: f64) -> bool {
        match self {
            CrossingDirection::Falling => start > 0.0 && end <= 0.0,
            CrossingDirection::Rising => start < 0.0 && end >= 0.0,
        }
    }

    fn crossed(&self, value: f64) -> bool {
        match self {
            CrossingDirection::Falling => value <= 0.0,
            CrossingDirection::Rising => value >= 0.0,
        }
    }
}

/// Localizes a zero crossing of `condition` inside the step `[t, t + h]`.
///
/// Bisects the step fraction until the time bracket is tighter than
/// [`EVENT_TIME_TOLERANCE`] and returns the event time together with the
/// state integrated to the crossed side of the final bracket.
pub fn locate_event<F>(
    state: &SimState,
    params: &GaitParams,
    h: f64,
    condition: F,
    direction: CrossingDirection,
) -> Result<(f64, SimState), SimError>
where
    F: Fn(&SimState) -> f64,
{
    let start = condition(state);
    let full = rk4_step(state, params, h)?;
    let end = condition(&full);
    if !direction.brackets(start, end) {
        return Err(SimError::NoSignChange);
    }
    let mut lo = 0.0_f64;
    let mut hi = h;
    let mut state_hi = full;
    while hi - lo > EVENT_TIME_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let probe = rk4_step(state, params, mid)?;
        if direction.crossed(condition(&probe)) {
            hi = mid;
            state_hi = probe;
        } else {
            lo = mid;
        }
    }
    Ok((state_hi.t, state_hi))
}

/// Simulates a gait from apex-start initial conditions.
///
/// Integrates with fixed internal steps, localizing touchdown, takeoff and
/// apex events by bisection, and emits samples at exact multiples of
/// `settings.output_dt`. Returns a [`GaitFailure`] the moment the trajectory
/// stops being a valid walk.
///
/// # Panics
///
/// Panics if `params`, `ic` or `settings` violate their invariants; callers
/// validate user input before simulating.
pub fn simulate(
    params: &GaitParams,
    ic: &InitialConditions,
    settings: &SimSettings,
) -> Result<Trajectory, GaitFailure> {
    params.validate().expect("valid gait parameters");
    ic.validate(params).expect("valid initial conditions");
    settings.validate().expect("valid simulation settings");

    let n_samples = crate::math::floor(settings.duration / settings.output_dt) as usize + 1;
    let mut state = ic.initial_state(params);
    let reference_energy = total_energy(&state, params);
    let mut run = Run {
        params,
        internal_h: settings.internal_h,
        reference_energy,
        energy_drift: 0.0,
        events: Vec::new(),
    };
    run.check_failure(&state)?;

    let mut traj = Trajectory {
        dt: settings.output_dt,
        xs: Vec::with_capacity(n_samples),
        ys: Vec::with_capacity(n_samples),
        vxs: Vec::with_capacity(n_samples),
        vys: Vec::with_capacity(n_samples),
        phases: Vec::with_capacity(n_samples),
        events: Vec::new(),
        params: *params,
        init: *ic,
        energy_drift: 0.0,
    };
    push_sample(&mut traj, &state);

    for i in 1..n_samples {
        let target = i as f64 * settings.output_dt;
        run.advance_to(&mut state, target)?;
        push_sample(&mut traj, &state);
    }

    traj.events = run.events;
    traj.energy_drift = run.energy_drift;
    Ok(traj)
}

fn push_sample(traj: &mut Trajectory, state: &SimState) {
    traj.xs.push(state.x);
    traj.ys.push(state.y);
    traj.vxs.push(state.vx);
    traj.vys.push(state.vy);
    traj.phases.push(match state.phase {
        Phase::SingleSupport { .. } => SupportPhase::Single,
        Phase::DoubleSupport { .. } => SupportPhase::Double,
    });
}

struct Run<'a> {
    params: &'a GaitParams,
    internal_h: f64,
    reference_energy: f64,
    energy_drift: f64,
    events: Vec<Event>,
}

impl Run<'_> {
    /// Advances `state` to exactly `t_target`, handling events on the way.
    fn advance_to(&mut self, state: &mut SimState, t_target: f64) -> Result<(), GaitFailure> {
        while state.t < t_target {
            let remaining = t_target - state.t;
            let h = remaining.min(self.internal_h);
            let lands = h >= remaining;
            let proposed = match rk4_step(state, self.params, h) {
                Ok(s) => s,
                Err(_) => return Err(GaitFailure::Blowup { t: state.t }),
            };
            match self.first_event(state, &proposed, h) {
                Ok(Some((event, event_state))) => {
                    *state = event_state;
                    self.events.push(event);
                }
                Ok(None) => {
                    *state = proposed;
                    if lands {
                        // Kill accumulated rounding so samples sit on the
                        // exact output grid.
                        state.t = t_target;
                    }
                }
                Err(_) => return Err(GaitFailure::Blowup { t: state.t }),
            }
            self.track_energy(state);
            self.check_failure(state)?;
        }
        Ok(())
    }

    /// Finds the earliest event crossing inside `[state, proposed]`, applies
    /// its transition, and returns the post-transition state.
    fn first_event(
        &self,
        state: &SimState,
        proposed: &SimState,
        h: f64,
    ) -> Result<Option<(Event, SimState)>, SimError> {
        match state.phase {
            Phase::SingleSupport { .. } => {
                let td = |s: &SimState| touchdown_condition(s, self.params);
                let touchdown = if CrossingDirection::Falling.brackets(td(state), td(proposed)) {
                    Some(locate_event(
                        state,
                        self.params,
                        h,
                        td,
                        CrossingDirection::Falling,
                    )?)
                } else {
                    None
                };
                let apex_cond = |s: &SimState| s.vy;
                let apex = if CrossingDirection::Falling
                    .brackets(apex_cond(state), apex_cond(proposed))
                {
                    Some(locate_event(
                        state,
                        self.params,
                        h,
                        apex_cond,
                        CrossingDirection::Falling,
                    )?)
                } else {
                    None
                };
                // Earliest crossing wins when both fire within one step.
                let pick_touchdown = match (&touchdown, &apex) {
                    (Some((t_td, _)), Some((t_apex, _))) => t_td <= t_apex,
                    (Some(_), None) => true,
                    _ => false,
                };
                if pick_touchdown {
                    let (t, s) = touchdown.expect("touchdown candidate");
                    // A grazing contact without descent is not a touchdown.
                    if s.vy < 0.0 {
                        let after = apply_touchdown(&s, self.params)?;
                        return Ok(Some((Event { t, kind: EventKind::Touchdown }, after)));
                    }
                    return Ok(None);
                }
                if let Some((t, s)) = apex {
                    return Ok(Some((Event { t, kind: EventKind::Apex }, s)));
                }
                Ok(None)
            }
            Phase::DoubleSupport { .. } => {
                let to = |s: &SimState| takeoff_condition(s, self.params);
                if CrossingDirection::Rising.brackets(to(state), to(proposed)) {
                    let (t, s) =
                        locate_event(state, self.params, h, to, CrossingDirection::Rising)?;
                    let after = apply_takeoff(&s)?;
                    return Ok(Some((Event { t, kind: EventKind::Takeoff }, after)));
                }
                Ok(None)
            }
        }
    }

    fn track_energy(&mut self, state: &SimState) {
        let energy = total_energy(state, self.params);
        let scale = self.reference_energy.abs().max(1e-12);
        let drift = (energy - self.reference_energy).abs() / scale;
        if drift > self.energy_drift {
            self.energy_drift = drift;
        }
    }

    fn check_failure(&self, state: &SimState) -> Result<(), GaitFailure> {
        if !(state.x.is_finite()
            && state.y.is_finite()
            && state.vx.is_finite()
            && state.vy.is_finite())
        {
            return Err(GaitFailure::Blowup { t: state.t });
        }
        if state.y <= 0.0 {
            return Err(GaitFailure::Fall { t: state.t });
        }
        if state.vx <= 0.0 {
            return Err(GaitFailure::Reversal { t: state.t });
        }
        Ok(())
    }
}

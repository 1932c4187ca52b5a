//! Compliant-leg walking dynamics.
//!
//! A point mass rides on one (single support) or two (double support)
//! massless linear leg springs attached to fixed foot points on the ground.
//! Each spring of stiffness `k` and rest length `l0` pushes the center of
//! mass away from its foot with force `k (l0 - l)` along the leg, so the
//! per-leg force coefficient is `k (l0 / l - 1)`.
//!
//! Accelerations are computed through the stiffness-to-mass ratio
//! `rho = k / m`: dividing `k` by `m` *before* touching the state means two
//! parameter sets with the same floating-point `rho` produce bit-identical
//! dynamics, which is exactly the scale invariance the identifiability
//! diagnostics probe.

use crate::math;

/// Event-surface tolerance (m) accepted by the phase transitions.
pub const TRANSITION_TOLERANCE: f64 = 1e-6;

/// Physical parameters of one simulated subject.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitParams {
    /// Body mass, kg.
    pub mass: f64,
    /// Leg spring stiffness, N/m.
    pub stiffness: f64,
    /// Rest (equilibrium) leg length, m.
    pub rest_length: f64,
    /// Angle of attack of the leading leg at touchdown, rad above ground.
    pub attack_angle: f64,
    /// Gravitational acceleration, m/s².
    pub gravity: f64,
}

impl GaitParams {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        check_positive("mass", self.mass)?;
        check_positive("stiffness", self.stiffness)?;
        check_positive("rest_length", self.rest_length)?;
        check_positive("gravity", self.gravity)?;
        if !self.attack_angle.is_finite()
            || self.attack_angle <= 0.0
            || self.attack_angle >= core::f64::consts::FRAC_PI_2
        {
            return Err(InvalidParam {
                name: "attack_angle",
                value: self.attack_angle,
            });
        }
        Ok(())
    }

    /// The parameter combination the trajectory actually depends on.
    pub fn reduced(&self) -> ReducedParams {
        ReducedParams {
            stiffness_ratio: self.stiffness / self.mass,
            rest_length: self.rest_length,
        }
    }

    /// Same subject with mass and stiffness scaled by `factor`.
    pub fn mass_scaled(&self, factor: f64) -> GaitParams {
        GaitParams {
            mass: self.mass * factor,
            stiffness: self.stiffness * factor,
            ..*self
        }
    }
}

/// Reduced parameterization: stiffness-to-mass ratio and rest length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    /// `stiffness / mass`, s⁻².
    pub stiffness_ratio: f64,
    /// Rest leg length, m.
    pub rest_length: f64,
}

/// Ground contact configuration. Foot points are global x coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    SingleSupport { foot: f64 },
    DoubleSupport { back_foot: f64, front_foot: f64 },
}

impl Phase {
    pub fn is_single(&self) -> bool {
        matches!(self, Phase::SingleSupport { .. })
    }

    pub fn is_double(&self) -> bool {
        matches!(self, Phase::DoubleSupport { .. })
    }
}

/// Instantaneous mechanical state of the center of mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    /// Time, s.
    pub t: f64,
    /// Horizontal center-of-mass position, m (global frame).
    pub x: f64,
    /// Center-of-mass height, m.
    pub y: f64,
    /// Horizontal velocity, m/s.
    pub vx: f64,
    /// Vertical velocity, m/s.
    pub vy: f64,
    pub phase: Phase,
}

/// A parameter or initial-condition field violating its invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvalidParam {
    pub name: &'static str,
    pub value: f64,
}

impl core::fmt::Display for InvalidParam {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "invalid {}: {}", self.name, self.value)
    }
}

impl core::error::Error for InvalidParam {}

fn check_positive(name: &'static str, value: f64) -> Result<(), InvalidParam> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(InvalidParam { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DynamicsError {
    /// A stance leg has zero length; the state is degenerate.
    SingularLeg,
    /// Transition applied in the wrong phase.
    NotSingleSupport,
    /// Transition applied in the wrong phase.
    NotDoubleSupport,
    /// Touchdown applied while the center of mass is not descending.
    NotDescending { vy: f64 },
    /// Transition applied away from its event surface.
    OffEventSurface { residual: f64 },
}

impl core::fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DynamicsError::SingularLeg => write!(f, "stance leg has zero length"),
            DynamicsError::NotSingleSupport => {
                write!(f, "transition requires single support")
            }
            DynamicsError::NotDoubleSupport => {
                write!(f, "transition requires double support")
            }
            DynamicsError::NotDescending { vy } => {
                write!(f, "touchdown requires vy < 0, got vy = {vy}")
            }
            DynamicsError::OffEventSurface { residual } => {
                write!(f, "transition applied {residual} m away from the event surface")
            }
        }
    }
}

impl core::error::Error for DynamicsError {}

/// Leg spring force coefficient `k (l0 / |leg| - 1)`, N/m.
///
/// `leg` is the vector from the foot point to the center of mass. The
/// coefficient is positive while the leg is compressed and negative while it
/// is stretched; multiplying it by the leg vector gives the spring force.
pub fn spring_coeff(
    stiffness: f64,
    rest_length: f64,
    leg: (f64, f64),
) -> Result<f64, DynamicsError> {
    let len = math::sqrt(leg.0 * leg.0 + leg.1 * leg.1);
    if len == 0.0 {
        return Err(DynamicsError::SingularLeg);
    }
    Ok(stiffness * (rest_length / len - 1.0))
}

/// Per-mass force coefficient `rho (l0 / |leg| - 1)`, s⁻².
fn per_mass_coeff(
    stiffness_ratio: f64,
    rest_length: f64,
    leg: (f64, f64),
) -> Result<f64, DynamicsError> {
    let len = math::sqrt(leg.0 * leg.0 + leg.1 * leg.1);
    if len == 0.0 {
        return Err(DynamicsError::SingularLeg);
    }
    Ok(stiffness_ratio * (rest_length / len - 1.0))
}

/// Center-of-mass acceleration `(ax, ay)` for the current support phase.
///
/// One spring term in single support, two in double support, gravity always:
/// `ax = Σ pᵢ (x - footᵢ)`, `ay = Σ pᵢ y - g` with `pᵢ` the per-mass
/// coefficient of stance leg `i`. Only `rho = k / m` ever enters.
pub fn accelerations(state: &SimState, params: &GaitParams) -> Result<(f64, f64), DynamicsError> {
    let reduced = params.reduced();
    let mut ax = 0.0;
    let mut ay = 0.0;
    match state.phase {
        Phase::SingleSupport { foot } => {
            let leg = (state.x - foot, state.y);
            let p = per_mass_coeff(reduced.stiffness_ratio, reduced.rest_length, leg)?;
            ax += p * leg.0;
            ay += p * leg.1;
        }
        Phase::DoubleSupport {
            back_foot,
            front_foot,
        } => {
            let back = (state.x - back_foot, state.y);
            let front = (state.x - front_foot, state.y);
            let p_back = per_mass_coeff(reduced.stiffness_ratio, reduced.rest_length, back)?;
            let p_front = per_mass_coeff(reduced.stiffness_ratio, reduced.rest_length, front)?;
            ax += p_back * back.0 + p_front * front.0;
            ay += p_back * back.1 + p_front * front.1;
        }
    }
    Ok((ax, ay - params.gravity))
}

/// Signed touchdown indicator `y - l0 sin(alpha0)`, m.
///
/// The leading leg, swung to the attack angle, reaches the ground when this
/// crosses zero from above while the center of mass descends (`vy < 0`).
pub fn touchdown_condition(state: &SimState, params: &GaitParams) -> f64 {
    state.y - params.rest_length * math::sin(params.attack_angle)
}

/// Attaches the leading leg at the attack angle; kinematics are untouched.
///
/// The new spring attaches at exactly its rest length, so the transition is
/// impulse-free and conserves energy.
pub fn apply_touchdown(state: &SimState, params: &GaitParams) -> Result<SimState, DynamicsError> {
    let foot = match state.phase {
        Phase::SingleSupport { foot } => foot,
        Phase::DoubleSupport { .. } => return Err(DynamicsError::NotSingleSupport),
    };
    if state.vy >= 0.0 {
        return Err(DynamicsError::NotDescending { vy: state.vy });
    }
    let residual = touchdown_condition(state, params);
    if residual.abs() > TRANSITION_TOLERANCE {
        return Err(DynamicsError::OffEventSurface { residual });
    }
    Ok(SimState {
        phase: Phase::DoubleSupport {
            back_foot: foot,
            front_foot: state.x + params.rest_length * math::cos(params.attack_angle),
        },
        ..*state
    })
}

/// Signed takeoff indicator: trailing leg length minus rest length, m.
///
/// Double support ends when the trailing spring unloads, i.e. when this
/// crosses zero from below. In single support the (only) stance leg is used.
pub fn takeoff_condition(state: &SimState, params: &GaitParams) -> f64 {
    let foot = match state.phase {
        Phase::SingleSupport { foot } => foot,
        Phase::DoubleSupport { back_foot, .. } => back_foot,
    };
    let dx = state.x - foot;
    math::sqrt(dx * dx + state.y * state.y) - params.rest_length
}

/// Releases the trailing leg; kinematics are untouched.
///
/// The released spring is at rest length and stores no energy.
pub fn apply_takeoff(state: &SimState) -> Result<SimState, DynamicsError> {
    match state.phase {
        Phase::DoubleSupport { front_foot, .. } => Ok(SimState {
            phase: Phase::SingleSupport { foot: front_foot },
            ..*state
        }),
        Phase::SingleSupport { .. } => Err(DynamicsError::NotDoubleSupport),
    }
}

/// Total mechanical energy, J: kinetic + gravitational + spring terms.
pub fn total_energy(state: &SimState, params: &GaitParams) -> f64 {
    let kinetic = 0.5 * params.mass * (state.vx * state.vx + state.vy * state.vy);
    let gravitational = params.mass * params.gravity * state.y;
    let spring = |foot: f64| {
        let dx = state.x - foot;
        let len = math::sqrt(dx * dx + state.y * state.y);
        let defect = params.rest_length - len;
        0.5 * params.stiffness * defect * defect
    };
    let elastic = match state.phase {
        Phase::SingleSupport { foot } => spring(foot),
        Phase::DoubleSupport {
            back_foot,
            front_foot,
        } => spring(back_foot) + spring(front_foot),
    };
    kinetic + gravitational + elastic
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> GaitParams {
        GaitParams {
            mass: 70.0,
            stiffness: 9000.0,
            rest_length: 0.7,
            attack_angle: 69.0_f64.to_radians(),
            gravity: 10.0,
        }
    }

    fn single(x: f64, y: f64, foot: f64) -> SimState {
        SimState {
            t: 0.0,
            x,
            y,
            vx: 1.0,
            vy: -0.1,
            phase: Phase::SingleSupport { foot },
        }
    }

    #[test]
    fn spring_coeff_zero_at_rest_length() {
        assert_eq!(spring_coeff(8000.0, 0.7, (0.0, 0.7)).unwrap(), 0.0);
    }

    #[test]
    fn spring_coeff_half_length_gives_stiffness() {
        assert_relative_eq!(
            spring_coeff(8000.0, 0.7, (0.0, 0.35)).unwrap(),
            8000.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn spring_coeff_reference_value() {
        // 9000 * (0.7 / sqrt(0.45) - 1), evaluated in extended precision.
        assert_relative_eq!(
            spring_coeff(9000.0, 0.7, (0.3, 0.6)).unwrap(),
            391.4855054991167,
            max_relative = 1e-12
        );
    }

    #[test]
    fn spring_coeff_rejects_zero_length_leg() {
        assert_eq!(
            spring_coeff(9000.0, 0.7, (0.0, 0.0)),
            Err(DynamicsError::SingularLeg)
        );
    }

    #[test]
    fn accelerations_pure_gravity_at_rest_length() {
        let s = single(2.0, 0.7, 2.0);
        let (ax, ay) = accelerations(&s, &params()).unwrap();
        assert_eq!(ax, 0.0);
        assert_relative_eq!(ay, -10.0, max_relative = 1e-15);
    }

    #[test]
    fn accelerations_cancel_for_symmetric_double_support() {
        let s = SimState {
            t: 0.0,
            x: 1.0,
            y: 0.55,
            vx: 1.0,
            vy: 0.0,
            phase: Phase::DoubleSupport {
                back_foot: 1.0 - 0.25,
                front_foot: 1.0 + 0.25,
            },
        };
        let (ax, _) = accelerations(&s, &params()).unwrap();
        assert_eq!(ax, 0.0);
    }

    #[test]
    fn accelerations_reference_value() {
        // p = (9000/70)(0.7/sqrt(0.45) - 1); ax = 0.3 p; ay = 0.6 p - 10.
        let s = single(0.3, 0.6, 0.0);
        let (ax, ay) = accelerations(&s, &params()).unwrap();
        assert_relative_eq!(ax, 1.6777950235676431, max_relative = 1e-12);
        assert_relative_eq!(ay, -6.6444099528647138, max_relative = 1e-12);
    }

    #[test]
    fn touchdown_condition_zero_on_surface() {
        let p = params();
        let y = p.rest_length * p.attack_angle.sin();
        let s = single(0.0, y, 0.0);
        assert_eq!(touchdown_condition(&s, &p), 0.0);
    }

    #[test]
    fn touchdown_condition_reference_value() {
        // 0.7 (1 - sin 69°), evaluated in extended precision.
        let s = single(0.0, 0.70, 0.0);
        assert_relative_eq!(
            touchdown_condition(&s, &params()),
            0.046493701451958776,
            max_relative = 1e-12
        );
    }

    #[test]
    fn touchdown_condition_positive_high_above_surface() {
        let s = single(0.0, 5.0, 0.0);
        assert!(touchdown_condition(&s, &params()) > 0.0);
    }

    #[test]
    fn touchdown_places_front_foot_at_attack_angle() {
        let p = params();
        let y = p.rest_length * p.attack_angle.sin();
        let s = single(5.0, y, 4.8);
        let after = apply_touchdown(&s, &p).unwrap();
        match after.phase {
            Phase::DoubleSupport {
                back_foot,
                front_foot,
            } => {
                assert_eq!(back_foot, 4.8);
                // 5 + 0.7 cos 69°, evaluated in extended precision.
                assert_relative_eq!(front_foot, 5.25085756468171, max_relative = 1e-12);
                // New leg attaches at exactly rest length.
                let dx = after.x - front_foot;
                let len = (dx * dx + after.y * after.y).sqrt();
                assert_relative_eq!(len, p.rest_length, max_relative = 1e-14);
            }
            _ => panic!("touchdown must yield double support"),
        }
        assert_eq!((after.x, after.y, after.vx, after.vy), (s.x, s.y, s.vx, s.vy));
        assert_relative_eq!(
            total_energy(&after, &p),
            total_energy(&s, &p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn touchdown_rejects_ascending_state() {
        let p = params();
        let y = p.rest_length * p.attack_angle.sin();
        let mut s = single(0.0, y, 0.0);
        s.vy = 0.2;
        assert!(matches!(
            apply_touchdown(&s, &p),
            Err(DynamicsError::NotDescending { .. })
        ));
    }

    #[test]
    fn touchdown_rejects_state_off_the_surface() {
        let s = single(0.0, 0.7, 0.0);
        assert!(matches!(
            apply_touchdown(&s, &params()),
            Err(DynamicsError::OffEventSurface { .. })
        ));
    }

    #[test]
    fn takeoff_condition_zero_at_rest_length() {
        let p = params();
        let s = SimState {
            t: 0.0,
            x: 0.7 * p.attack_angle.cos(),
            y: 0.7 * p.attack_angle.sin(),
            vx: 1.0,
            vy: 0.5,
            phase: Phase::DoubleSupport {
                back_foot: 0.0,
                front_foot: 0.6,
            },
        };
        assert!(takeoff_condition(&s, &p).abs() < 1e-15);
    }

    #[test]
    fn takeoff_condition_negative_while_compressed() {
        let p = params();
        let s = SimState {
            t: 0.0,
            x: 0.2,
            y: 0.55,
            vx: 1.0,
            vy: 0.0,
            phase: Phase::DoubleSupport {
                back_foot: 0.0,
                front_foot: 0.6,
            },
        };
        assert!(takeoff_condition(&s, &p) < 0.0);
    }

    #[test]
    fn takeoff_condition_reference_value() {
        // sqrt(0.52) - 0.7, evaluated in extended precision.
        let p = params();
        let s = SimState {
            t: 0.0,
            x: 0.4,
            y: 0.6,
            vx: 1.0,
            vy: 0.0,
            phase: Phase::DoubleSupport {
                back_foot: 0.0,
                front_foot: 0.8,
            },
        };
        assert_relative_eq!(
            takeoff_condition(&s, &p),
            0.021110255092797859,
            max_relative = 1e-12
        );
    }

    #[test]
    fn takeoff_keeps_front_foot_and_kinematics() {
        let p = params();
        let x = 1.0 + 0.7 * p.attack_angle.cos();
        let y = 0.7 * p.attack_angle.sin();
        let s = SimState {
            t: 0.0,
            x,
            y,
            vx: 1.3,
            vy: 0.4,
            phase: Phase::DoubleSupport {
                back_foot: 1.0,
                front_foot: 1.7,
            },
        };
        let after = apply_takeoff(&s).unwrap();
        assert_eq!(after.phase, Phase::SingleSupport { foot: 1.7 });
        assert_eq!((after.x, after.y, after.vx, after.vy), (s.x, s.y, s.vx, s.vy));
        // Trailing spring is at rest length, so dropping it costs no energy.
        assert_relative_eq!(
            total_energy(&after, &p),
            total_energy(&s, &p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn takeoff_rejects_single_support() {
        let s = single(0.0, 0.7, 0.0);
        assert_eq!(apply_takeoff(&s), Err(DynamicsError::NotDoubleSupport));
    }

    #[test]
    fn total_energy_gravitational_only_at_rest() {
        let p = params();
        let s = SimState {
            t: 0.0,
            x: 0.0,
            y: 0.7,
            vx: 0.0,
            vy: 0.0,
            phase: Phase::SingleSupport { foot: 0.0 },
        };
        assert_relative_eq!(total_energy(&s, &p), 490.0, max_relative = 1e-14);
    }

    #[test]
    fn total_energy_adds_kinetic_term() {
        let p = params();
        let s = SimState {
            t: 0.0,
            x: 0.0,
            y: 0.7,
            vx: 1.2,
            vy: 0.0,
            phase: Phase::SingleSupport { foot: 0.0 },
        };
        assert_relative_eq!(total_energy(&s, &p), 540.4, max_relative = 1e-14);
    }

    #[test]
    fn total_energy_adds_spring_term() {
        let p = params();
        let rest = SimState {
            t: 0.0,
            x: 0.0,
            y: 0.7,
            vx: 0.0,
            vy: 0.0,
            phase: Phase::SingleSupport { foot: 0.0 },
        };
        let compressed = SimState { y: 0.65, ..rest };
        let delta = total_energy(&compressed, &p) - total_energy(&rest, &p);
        // 1/2 * 9000 * 0.05^2 - 70 * 10 * 0.05
        assert_relative_eq!(delta, 11.25 - 35.0, max_relative = 1e-10);
    }

    #[test]
    fn accelerations_match_energy_gradient() {
        // Force law consistency: a = -grad(E_potential) / m by central
        // finite differences, away from event surfaces.
        let p = params();
        let states = [
            single(0.3, 0.6, 0.0),
            single(-0.1, 0.72, 0.0),
            SimState {
                t: 0.0,
                x: 0.35,
                y: 0.58,
                vx: 1.1,
                vy: -0.2,
                phase: Phase::DoubleSupport {
                    back_foot: 0.0,
                    front_foot: 0.62,
                },
            },
        ];
        let h = 1e-6;
        for s in states {
            let (ax, ay) = accelerations(&s, &p).unwrap();
            let e = |x: f64, y: f64| {
                let probe = SimState { x, y, vx: 0.0, vy: 0.0, ..s };
                total_energy(&probe, &p)
            };
            let gx = (e(s.x + h, s.y) - e(s.x - h, s.y)) / (2.0 * h);
            let gy = (e(s.x, s.y + h) - e(s.x, s.y - h)) / (2.0 * h);
            assert_relative_eq!(ax, -gx / p.mass, max_relative = 1e-6);
            assert_relative_eq!(ay, -gy / p.mass, max_relative = 1e-6);
        }
    }

    #[test]
    fn double_support_matches_per_step_frame_form() {
        // With the back foot at the origin, the acceleration must equal the
        // per-step-frame expression (P x - Q (d - x)) / m componentwise.
        let p = params();
        let d = 0.62;
        let s = SimState {
            t: 0.0,
            x: 0.35,
            y: 0.58,
            vx: 1.1,
            vy: -0.2,
            phase: Phase::DoubleSupport {
                back_foot: 0.0,
                front_foot: d,
            },
        };
        let (ax, ay) = accelerations(&s, &p).unwrap();
        let back_coeff = spring_coeff(p.stiffness, p.rest_length, (s.x, s.y)).unwrap();
        let front_coeff =
            spring_coeff(p.stiffness, p.rest_length, (s.x - d, s.y)).unwrap();
        let ax_ref = (back_coeff * s.x - front_coeff * (d - s.x)) / p.mass;
        let ay_ref = (back_coeff * s.y + front_coeff * s.y) / p.mass - p.gravity;
        assert_relative_eq!(ax, ax_ref, max_relative = 1e-13);
        assert_relative_eq!(ay, ay_ref, max_relative = 1e-13);
    }

    #[test]
    fn accelerations_exactly_invariant_under_mass_scaling() {
        let base = params();
        let states = [
            single(0.3, 0.6, 0.0),
            SimState {
                t: 0.0,
                x: 0.35,
                y: 0.58,
                vx: 1.1,
                vy: -0.2,
                phase: Phase::DoubleSupport {
                    back_foot: 0.0,
                    front_foot: 0.62,
                },
            },
        ];
        for s in states {
            let reference = accelerations(&s, &base).unwrap();
            for factor in [0.5, 2.0, 4.0, 10.0] {
                let scaled = base.mass_scaled(factor);
                assert_eq!(accelerations(&s, &scaled).unwrap(), reference);
            }
        }
        // The range corners (60, 8000) and (75, 10000) share rho = 400/3.
        let low = GaitParams { mass: 60.0, stiffness: 8000.0, ..base };
        let high = low.mass_scaled(1.25);
        assert_eq!(high.mass, 75.0);
        assert_eq!(high.stiffness, 10000.0);
        for s in states {
            assert_eq!(
                accelerations(&s, &low).unwrap(),
                accelerations(&s, &high).unwrap()
            );
        }
    }

    #[test]
    fn validate_rejects_bad_fields() {
        let mut p = params();
        p.mass = 0.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.attack_angle = core::f64::consts::FRAC_PI_2;
        assert!(p.validate().is_err());
        assert!(params().validate().is_ok());
    }
}

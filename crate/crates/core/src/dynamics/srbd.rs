use super::quadrotor::euler_rotation;
use super::quaternion::{self, cross};
use super::{DynamicsError, Model, RigidBodyState, StateDerivative};
use crate::derivatives::Real;

/// Inertial properties of a legged robot lumped into a single rigid body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrbdParams {
    pub mass: f64,
    pub inertia: [f64; 3],
    pub gravity: f64,
}

impl Default for SrbdParams {
    fn default() -> Self {
        SrbdParams { mass: 12.0, inertia: [0.1, 0.25, 0.3], gravity: 9.81 }
    }
}

/// Single rigid body driven by foot contact forces.
///
/// The flat input holds, per leg, the contact force (world frame) followed by
/// the foot position relative to the base (body frame). Contact flags come
/// from the gait schedule and are part of the model, not of the input; forces
/// of legs in swing are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Srbd {
    pub params: SrbdParams,
    pub contacts: Vec<bool>,
}

impl Srbd {
    pub fn new(params: SrbdParams, contacts: Vec<bool>) -> Self {
        Srbd { params, contacts }
    }

    pub fn legs(&self) -> usize {
        self.contacts.len()
    }
}

impl Model for Srbd {
    fn input_len(&self) -> usize {
        6 * self.legs()
    }

    fn derivative<T: Real>(&self, x: &RigidBodyState<T>, u: &[T]) -> StateDerivative<T> {
        let p = &self.params;
        let mut force = [T::zero(); 3];
        let mut torque = [T::zero(); 3];
        for (leg, _) in self.contacts.iter().enumerate().filter(|(_, c)| **c) {
            let f = [u[6 * leg], u[6 * leg + 1], u[6 * leg + 2]];
            let r = [u[6 * leg + 3], u[6 * leg + 4], u[6 * leg + 5]];
            let f_body = quaternion::rotate_inverse(&x.orientation, &f);
            let t = cross(&r, &f_body);
            for i in 0..3 {
                force[i] += f[i];
                torque[i] += t[i];
            }
        }
        let m = T::from_f64(p.mass);
        StateDerivative {
            linear_velocity: x.linear_velocity,
            linear_acceleration: [force[0] / m, force[1] / m, force[2] / m - T::from_f64(p.gravity)],
            body_rates: x.angular_velocity,
            angular_acceleration: euler_rotation(&p.inertia, &x.angular_velocity, &torque),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegInput {
    pub force: [f64; 3],
    pub relative_position: [f64; 3],
    pub contact: bool,
}

/// Structured inputs for [`srbd_dynamics`].
#[derive(Debug, Clone, PartialEq)]
pub struct SrbdInputs {
    pub legs: Vec<LegInput>,
}

impl SrbdInputs {
    /// A leg without contact must not carry a force.
    pub fn validate(&self) -> Result<(), DynamicsError> {
        for (i, leg) in self.legs.iter().enumerate() {
            if !leg.contact && leg.force.iter().any(|f| *f != 0.0) {
                return Err(DynamicsError::Domain(format!("leg {i} is in swing but carries a force")));
            }
        }
        Ok(())
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.legs.iter().flat_map(|l| l.force.into_iter().chain(l.relative_position)).collect()
    }

    pub fn contacts(&self) -> Vec<bool> {
        self.legs.iter().map(|l| l.contact).collect()
    }
}

/// Checked single-rigid-body dynamics.
pub fn srbd_dynamics(
    x: &RigidBodyState,
    inputs: &SrbdInputs,
    params: &SrbdParams,
) -> Result<StateDerivative, DynamicsError> {
    inputs.validate()?;
    let model = Srbd::new(*params, inputs.contacts());
    Ok(model.derivative(x, &inputs.flatten()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leg(force: [f64; 3], r: [f64; 3], contact: bool) -> LegInput {
        LegInput { force, relative_position: r, contact }
    }

    #[test]
    fn no_contact_is_free_fall() {
        let p = SrbdParams::default();
        let inputs = SrbdInputs { legs: vec![leg([0.0; 3], [0.2, 0.1, -0.3], false); 4] };
        let d = srbd_dynamics(&RigidBodyState::at_rest([0.0; 3]), &inputs, &p).unwrap();
        assert_eq!(d.linear_acceleration, [0.0, 0.0, -p.gravity]);
        assert_eq!(d.angular_acceleration, [0.0; 3]);
    }

    #[test]
    fn symmetric_stance_balances() {
        let p = SrbdParams::default();
        let fz = p.mass * p.gravity / 4.0;
        let legs = [[0.2, 0.15], [0.2, -0.15], [-0.2, 0.15], [-0.2, -0.15]]
            .map(|[x, y]| leg([0.0, 0.0, fz], [x, y, -0.3], true))
            .to_vec();
        let d = srbd_dynamics(&RigidBodyState::at_rest([0.0; 3]), &SrbdInputs { legs }, &p).unwrap();
        assert!(d.linear_acceleration.iter().all(|a| a.abs() < 1e-12));
        assert!(d.angular_acceleration.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn single_leg_torque_is_r_cross_f() {
        let p = SrbdParams::default();
        let r = [0.2, 0.0, -0.3];
        let f = [0.0, 0.0, p.mass * p.gravity];
        let mut legs = vec![leg([0.0; 3], [0.0; 3], false); 4];
        legs[0] = leg(f, r, true);
        let d = srbd_dynamics(&RigidBodyState::at_rest([0.0; 3]), &SrbdInputs { legs }, &p).unwrap();
        // r × f = (0·mg − (−0.3)·0, (−0.3)·0 − 0.2·mg, 0) = (0, −0.2·mg, 0).
        let tau = [0.0, -0.2 * p.mass * p.gravity, 0.0];
        for ((a, t), j) in d.angular_acceleration.iter().zip(tau).zip(p.inertia) {
            assert!((a - t / j).abs() < 1e-12);
        }
        assert!(d.linear_acceleration.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn swing_leg_with_force_is_rejected() {
        let inputs = SrbdInputs { legs: vec![leg([1.0, 0.0, 0.0], [0.0; 3], false)] };
        assert!(srbd_dynamics(&RigidBodyState::at_rest([0.0; 3]), &inputs, &SrbdParams::default()).is_err());
    }
}

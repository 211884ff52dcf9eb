//! Rigid-body models used by the MPC examples.
//!
//! Frames: positions and linear velocities live in the world frame (z up,
//! gravity along −z); angular velocities are body-frame rates. Orientations
//! are unit quaternions `[x, y, z, w]` mapping body to world coordinates and are
//! only ever advanced on the group with [`quaternion::step`], so integration
//! never leaves the unit sphere.

pub mod params;
mod quadrotor;
pub mod quaternion;
mod srbd;

pub use params::ParamsError;
pub use quadrotor::{quadrotor_dynamics, Quadrotor, QuadrotorParams};
pub use srbd::{srbd_dynamics, LegInput, Srbd, SrbdInputs, SrbdParams};

use thiserror::Error;

use crate::derivatives::Real;
use quaternion::{Quat, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("input outside the model's domain: {0}")]
    Domain(String),
    #[error("expected {expected} inputs, got {found}")]
    InputLength { expected: usize, found: usize },
}

/// Pose and twist of a rigid body; the field order is the storage order of the
/// `x` state variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyState<T = f64> {
    pub position: Vec3<T>,
    pub orientation: Quat<T>,
    pub linear_velocity: Vec3<T>,
    pub angular_velocity: Vec3<T>,
}

impl<T: Real> RigidBodyState<T> {
    /// Number of stored scalars.
    pub const SIZE: usize = 13;

    /// At rest at `position` with identity attitude.
    pub fn at_rest(position: Vec3<T>) -> Self {
        RigidBodyState {
            position,
            orientation: quaternion::identity(),
            linear_velocity: [T::zero(); 3],
            angular_velocity: [T::zero(); 3],
        }
    }

    /// Reads the 13 scalars of a state; panics on a shorter slice.
    pub fn from_slice(s: &[T]) -> Self {
        RigidBodyState {
            position: [s[0], s[1], s[2]],
            orientation: [s[3], s[4], s[5], s[6]],
            linear_velocity: [s[7], s[8], s[9]],
            angular_velocity: [s[10], s[11], s[12]],
        }
    }

    pub fn write_to(&self, s: &mut [T]) {
        s[0..3].copy_from_slice(&self.position);
        s[3..7].copy_from_slice(&self.orientation);
        s[7..10].copy_from_slice(&self.linear_velocity);
        s[10..13].copy_from_slice(&self.angular_velocity);
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut v = vec![T::zero(); Self::SIZE];
        self.write_to(&mut v);
        v
    }
}

impl RigidBodyState<f64> {
    pub fn lift<T: Real>(&self) -> RigidBodyState<T> {
        let l = |a: &[f64; 3]| a.map(T::from_f64);
        RigidBodyState {
            position: l(&self.position),
            orientation: self.orientation.map(T::from_f64),
            linear_velocity: l(&self.linear_velocity),
            angular_velocity: l(&self.angular_velocity),
        }
    }
}

/// Time derivative of a [`RigidBodyState`], with the orientation part given as
/// body rates instead of a quaternion derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative<T = f64> {
    pub linear_velocity: Vec3<T>,
    pub linear_acceleration: Vec3<T>,
    pub body_rates: Vec3<T>,
    pub angular_acceleration: Vec3<T>,
}

impl<T: Real> StateDerivative<T> {
    pub const SIZE: usize = 12;

    pub fn write_to(&self, s: &mut [T]) {
        s[0..3].copy_from_slice(&self.linear_velocity);
        s[3..6].copy_from_slice(&self.linear_acceleration);
        s[6..9].copy_from_slice(&self.body_rates);
        s[9..12].copy_from_slice(&self.angular_acceleration);
    }
}

/// Continuous-time rigid-body dynamics with a flat input vector.
pub trait Model {
    fn input_len(&self) -> usize;

    /// Unchecked evaluation; see the model's checked free function for input
    /// validation.
    fn derivative<T: Real>(&self, x: &RigidBodyState<T>, u: &[T]) -> StateDerivative<T>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Velocities first, then positions and orientation with the new velocities.
    #[default]
    SemiImplicitEuler,
    /// Classical fourth-order stages; orientation stages and the final update
    /// use the group step with the stage-weighted body rates.
    Rk4,
}

fn advance<T: Real>(x: &RigidBodyState<T>, d: &StateDerivative<T>, h: T) -> RigidBodyState<T> {
    let add = |a: &Vec3<T>, b: &Vec3<T>| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]];
    RigidBodyState {
        position: add(&x.position, &d.linear_velocity),
        orientation: quaternion::step(&x.orientation, &d.body_rates, h),
        linear_velocity: add(&x.linear_velocity, &d.linear_acceleration),
        angular_velocity: add(&x.angular_velocity, &d.angular_acceleration),
    }
}

/// One integration step of length `dt` with the input held constant.
pub fn integrate_step<T: Real, M: Model>(
    model: &M,
    x: &RigidBodyState<T>,
    u: &[T],
    dt: T,
    integrator: Integrator,
) -> RigidBodyState<T> {
    match integrator {
        Integrator::SemiImplicitEuler => {
            let d = model.derivative(x, u);
            let mut next = *x;
            for i in 0..3 {
                next.linear_velocity[i] = x.linear_velocity[i] + dt * d.linear_acceleration[i];
                next.angular_velocity[i] = x.angular_velocity[i] + dt * d.angular_acceleration[i];
                next.position[i] = x.position[i] + dt * next.linear_velocity[i];
            }
            next.orientation = quaternion::step(&x.orientation, &next.angular_velocity, dt);
            next
        }
        Integrator::Rk4 => {
            let half = dt * T::from_f64(0.5);
            let k1 = model.derivative(x, u);
            let k2 = model.derivative(&advance(x, &k1, half), u);
            let k3 = model.derivative(&advance(x, &k2, half), u);
            let k4 = model.derivative(&advance(x, &k3, dt), u);
            let mix = |f: fn(&StateDerivative<T>) -> Vec3<T>| {
                let (a, b, c, d) = (f(&k1), f(&k2), f(&k3), f(&k4));
                let two = T::from_f64(2.0);
                let six = T::from_f64(6.0);
                [0, 1, 2].map(|i| (a[i] + two * b[i] + two * c[i] + d[i]) / six)
            };
            let avg = StateDerivative {
                linear_velocity: mix(|k| k.linear_velocity),
                linear_acceleration: mix(|k| k.linear_acceleration),
                body_rates: mix(|k| k.body_rates),
                angular_acceleration: mix(|k| k.angular_acceleration),
            };
            advance(x, &avg, dt)
        }
    }
}

/// Steps `x` forward `steps` times with a constant input.
pub fn rollout<M: Model>(
    model: &M,
    x: &RigidBodyState,
    u: &[f64],
    dt: f64,
    steps: usize,
    integrator: Integrator,
) -> RigidBodyState {
    (0..steps).fold(*x, |s, _| integrate_step(model, &s, u, dt, integrator))
}

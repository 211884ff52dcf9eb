use super::quaternion::{self, cross, Vec3};
use super::{DynamicsError, Model, RigidBodyState, StateDerivative};
use crate::derivatives::Real;

/// Physical constants of a four-rotor vehicle in "+" configuration.
///
/// Rotor 1 sits on the body +x arm, 2 on +y, 3 on −x, 4 on −y. Each produces a
/// thrust `k_f·ω²` along body +z and a reaction torque `k_m·ω²` about body z;
/// rotors 1 and 3 push +z, rotors 2 and 4 push −z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrotorParams {
    pub mass: f64,
    /// Diagonal of the body inertia tensor.
    pub inertia: [f64; 3],
    pub thrust_coefficient: f64,
    pub drag_coefficient: f64,
    pub arm_length: f64,
    /// Magnitude of gravitational acceleration, acting along world −z.
    pub gravity: f64,
}

impl Default for QuadrotorParams {
    fn default() -> Self {
        QuadrotorParams {
            mass: 1.0,
            inertia: [0.01, 0.01, 0.02],
            thrust_coefficient: 1e-5,
            drag_coefficient: 1e-7,
            arm_length: 0.2,
            gravity: 9.81,
        }
    }
}

impl QuadrotorParams {
    /// Rotor speed at which the four rotors together carry the weight.
    pub fn hover_speed(&self) -> f64 {
        (self.mass * self.gravity / (4.0 * self.thrust_coefficient)).sqrt()
    }

    pub fn hover_input(&self) -> [f64; 4] {
        [self.hover_speed(); 4]
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = [
            ("mass", self.mass),
            ("inertia_xx", self.inertia[0]),
            ("inertia_yy", self.inertia[1]),
            ("inertia_zz", self.inertia[2]),
            ("thrust_coefficient", self.thrust_coefficient),
            ("drag_coefficient", self.drag_coefficient),
            ("arm_length", self.arm_length),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DynamicsError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.gravity >= 0.0 && self.gravity.is_finite()) {
            return Err(DynamicsError::Domain(format!("gravity must be nonnegative, got {}", self.gravity)));
        }
        Ok(())
    }
}

/// Quadrotor driven by its four rotor speeds (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadrotor {
    pub params: QuadrotorParams,
}

impl Quadrotor {
    pub fn new(params: QuadrotorParams) -> Self {
        Quadrotor { params }
    }

    /// Body-frame collective thrust and torque for the given rotor speeds.
    pub fn wrench<T: Real>(&self, u: &[T]) -> (T, Vec3<T>) {
        let p = &self.params;
        let kf = T::from_f64(p.thrust_coefficient);
        let km = T::from_f64(p.drag_coefficient);
        let arm = T::from_f64(p.arm_length);
        let sq = [u[0] * u[0], u[1] * u[1], u[2] * u[2], u[3] * u[3]];
        let thrust = kf * (sq[0] + sq[1] + sq[2] + sq[3]);
        let torque = [arm * kf * (sq[1] - sq[3]), arm * kf * (sq[2] - sq[0]), km * (sq[0] - sq[1] + sq[2] - sq[3])];
        (thrust, torque)
    }
}

pub(crate) fn euler_rotation<T: Real>(inertia: &[f64; 3], w: &Vec3<T>, torque: &Vec3<T>) -> Vec3<T> {
    let i = inertia.map(T::from_f64);
    let iw = [i[0] * w[0], i[1] * w[1], i[2] * w[2]];
    let gyro = cross(w, &iw);
    [(torque[0] - gyro[0]) / i[0], (torque[1] - gyro[1]) / i[1], (torque[2] - gyro[2]) / i[2]]
}

impl Model for Quadrotor {
    fn input_len(&self) -> usize {
        4
    }

    fn derivative<T: Real>(&self, x: &RigidBodyState<T>, u: &[T]) -> StateDerivative<T> {
        let p = &self.params;
        let (thrust, torque) = self.wrench(u);
        let m = T::from_f64(p.mass);
        let f = quaternion::rotate(&x.orientation, &[T::zero(), T::zero(), thrust]);
        let g = T::from_f64(p.gravity);
        StateDerivative {
            linear_velocity: x.linear_velocity,
            linear_acceleration: [f[0] / m, f[1] / m, f[2] / m - g],
            body_rates: x.angular_velocity,
            angular_acceleration: euler_rotation(&p.inertia, &x.angular_velocity, &torque),
        }
    }
}

/// Checked quadrotor dynamics: rotor speeds must be nonnegative.
pub fn quadrotor_dynamics(
    x: &RigidBodyState,
    rotor_speeds: &[f64],
    params: &QuadrotorParams,
) -> Result<StateDerivative, DynamicsError> {
    if rotor_speeds.len() != 4 {
        return Err(DynamicsError::InputLength { expected: 4, found: rotor_speeds.len() });
    }
    if let Some(w) = rotor_speeds.iter().find(|w| w.is_nan() || **w < 0.0) {
        return Err(DynamicsError::Domain(format!("rotor speed {w} is negative")));
    }
    Ok(Quadrotor::new(*params).derivative(x, rotor_speeds))
}

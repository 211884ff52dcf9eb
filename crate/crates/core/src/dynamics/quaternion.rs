//! Unit quaternions stored as `[x, y, z, w]`, written against [`Real`] so the
//! same code runs on floats and dual numbers.

use crate::derivatives::Real;

pub type Quat<T> = [T; 4];
pub type Vec3<T> = [T; 3];

pub fn identity<T: Real>() -> Quat<T> {
    [T::zero(), T::zero(), T::zero(), T::one()]
}

/// Hamilton product `a ⊗ b`.
pub fn mul<T: Real>(a: &Quat<T>, b: &Quat<T>) -> Quat<T> {
    let [ax, ay, az, aw] = *a;
    let [bx, by, bz, bw] = *b;
    [
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
        aw * bw - ax * bx - ay * by - az * bz,
    ]
}

pub fn conjugate<T: Real>(q: &Quat<T>) -> Quat<T> {
    [-q[0], -q[1], -q[2], q[3]]
}

pub fn norm<T: Real>(q: &Quat<T>) -> T {
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt()
}

pub fn normalize<T: Real>(q: &Quat<T>) -> Quat<T> {
    let n = norm(q);
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

// Below this squared angle the exp/log maps switch to their Taylor series,
// which keeps them exact to rounding and differentiable through zero.
const SMALL_ANGLE_SQ: f64 = 1e-8;

/// Quaternion of the rotation vector `phi` (axis times angle), i.e. the
/// exponential of the pure quaternion `phi / 2`.
pub fn exp<T: Real>(phi: &Vec3<T>) -> Quat<T> {
    let theta_sq = phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2];
    let (s, c) = if theta_sq.value() < SMALL_ANGLE_SQ {
        let t4 = theta_sq * theta_sq;
        (
            T::from_f64(0.5) - theta_sq / T::from_f64(48.0) + t4 / T::from_f64(3840.0),
            T::one() - theta_sq / T::from_f64(8.0) + t4 / T::from_f64(384.0),
        )
    } else {
        let theta = theta_sq.sqrt();
        let half = theta * T::from_f64(0.5);
        (half.sin() / theta, half.cos())
    };
    [s * phi[0], s * phi[1], s * phi[2], c]
}

/// Rotation vector of `q`, taking the short way around (angle in `[0, π]`).
pub fn log<T: Real>(q: &Quat<T>) -> Vec3<T> {
    let q = if q[3].value() < 0.0 { [-q[0], -q[1], -q[2], -q[3]] } else { *q };
    let n_sq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    let w = q[3];
    let scale = if n_sq.value() < SMALL_ANGLE_SQ * w.value() * w.value() {
        // 2·atan(n/w)/n expanded in n²/w².
        let r = n_sq / (w * w);
        T::from_f64(2.0) / w * (T::one() - r / T::from_f64(3.0) + r * r / T::from_f64(5.0))
    } else {
        let n = n_sq.sqrt();
        T::from_f64(2.0) * n.atan2(w) / n
    };
    [scale * q[0], scale * q[1], scale * q[2]]
}

/// Advances an orientation by a body-frame angular velocity held constant for
/// `dt`: `q ⊗ exp(ω·dt)`. Stays on the unit sphere up to rounding.
pub fn step<T: Real>(q: &Quat<T>, omega: &Vec3<T>, dt: T) -> Quat<T> {
    mul(q, &exp(&[omega[0] * dt, omega[1] * dt, omega[2] * dt]))
}

/// `R(q)·v`, rotating a body-frame vector into the world frame.
pub fn rotate<T: Real>(q: &Quat<T>, v: &Vec3<T>) -> Vec3<T> {
    let m = rotation_matrix(q);
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// `R(q)ᵀ·v`, expressing a world-frame vector in the body frame.
pub fn rotate_inverse<T: Real>(q: &Quat<T>, v: &Vec3<T>) -> Vec3<T> {
    let m = rotation_matrix(q);
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

/// Row-major rotation matrix of a unit quaternion.
pub fn rotation_matrix<T: Real>(q: &Quat<T>) -> [[T; 3]; 3] {
    let [x, y, z, w] = *q;
    let one = T::one();
    let two = T::from_f64(2.0);
    [
        [one - two * (y * y + z * z), two * (x * y - z * w), two * (x * z + y * w)],
        [two * (x * y + z * w), one - two * (x * x + z * z), two * (y * z - x * w)],
        [two * (x * z - y * w), two * (y * z + x * w), one - two * (x * x + y * y)],
    ]
}

pub fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

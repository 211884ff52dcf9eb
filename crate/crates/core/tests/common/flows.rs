//! Dynamics as differentiable functions, plus random sampling helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata::derivatives::{finite_difference_jacobian, jacobian, DiffFunction, Real};
use strata::dynamics::{
    integrate_step, quaternion, Integrator, Model, Quadrotor, QuadrotorParams, RigidBodyState, Srbd, SrbdParams,
};

pub fn random_unit_quaternion(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = quaternion::norm(&q);
        if n > 0.1 {
            return q.map(|c| c / n);
        }
    }
}

/// Largest deviation of |q| from one over `steps` random group steps.
pub fn norm_drift(seed: u64, steps: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = random_unit_quaternion(&mut rng);
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-20.0..20.0));
        q = quaternion::step(&q, &w, rng.random_range(0.0..0.1));
        worst = worst.max((quaternion::norm(&q) - 1.0).abs());
    }
    worst
}

/// `(x, u) ↦ ẋ` for a model, as a differentiable function.
pub struct Flow<M>(pub M);

impl<M: Model> DiffFunction for Flow<M> {
    fn input_len(&self) -> usize {
        13 + self.0.input_len()
    }

    fn output_len(&self) -> usize {
        12
    }

    fn eval<T: Real>(&self, z: &[T], out: &mut [T]) {
        let x = RigidBodyState::from_slice(&z[..13]);
        self.0.derivative(&x, &z[13..]).write_to(out);
    }
}

/// One integration step, `(x, u) ↦ x⁺`.
pub struct Step<M>(pub M, pub Integrator);

impl<M: Model> DiffFunction for Step<M> {
    fn input_len(&self) -> usize {
        13 + self.0.input_len()
    }

    fn output_len(&self) -> usize {
        13
    }

    fn eval<T: Real>(&self, z: &[T], out: &mut [T]) {
        let x = RigidBodyState::from_slice(&z[..13]);
        integrate_step(&self.0, &x, &z[13..], T::from_f64(0.02), self.1).write_to(out);
    }
}

pub fn random_state(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = RigidBodyState::at_rest(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
    x.orientation = random_unit_quaternion(rng);
    x.linear_velocity = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
    x.angular_velocity = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
    x.to_vec()
}

/// Forward-mode against central differences (step 1e-6), relative tolerance 1e-5.
pub fn jacobian_mismatch<F: DiffFunction>(f: &F, at: &[f64], what: &str) -> Result<(), String> {
    let ad = jacobian(f, at).map_err(|e| format!("{what}: {e}"))?;
    let fd = finite_difference_jacobian(f, at, 1e-6);
    for (a, b) in ad.iter().zip(fd.iter()) {
        let scale = a.abs().max(b.abs()).max(1.0);
        if (a - b).abs() > 1e-5 * scale {
            return Err(format!("{what}: forward {a} vs central {b} at {at:?}"));
        }
    }
    Ok(())
}

/// Quadrotor flow and both integrator steps at `points` random states.
pub fn check_quadrotor(seed: u64, points: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = Quadrotor::new(QuadrotorParams::default());
    for _ in 0..points {
        let mut z = random_state(&mut rng);
        z.extend((0..4).map(|_| rng.random_range(300.0..700.0)));
        jacobian_mismatch(&Flow(model), &z, "quadrotor flow")?;
        jacobian_mismatch(&Step(model, Integrator::SemiImplicitEuler), &z, "quadrotor euler step")?;
        jacobian_mismatch(&Step(model, Integrator::Rk4), &z, "quadrotor rk4 step")?;
    }
    Ok(())
}

/// SRBD flow and step with random contact patterns at `points` random states.
pub fn check_srbd(seed: u64, points: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..points {
        let contacts: Vec<bool> = (0..4).map(|_| rng.random_bool(0.7)).collect();
        let model = Srbd::new(SrbdParams::default(), contacts);
        let mut z = random_state(&mut rng);
        for _ in 0..4 {
            z.extend((0..2).map(|_| rng.random_range(-20.0..20.0)));
            z.push(rng.random_range(0.0..60.0));
            z.extend([rng.random_range(-0.3..0.3), rng.random_range(-0.2..0.2), rng.random_range(-0.4..-0.2)]);
        }
        jacobian_mismatch(&Flow(model.clone()), &z, "srbd flow")?;
        jacobian_mismatch(&Step(model, Integrator::SemiImplicitEuler), &z, "srbd step")?;
    }
    Ok(())
}

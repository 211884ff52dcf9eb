use crate::derivatives::{DiffFunction, Real};
use crate::dynamics::quaternion::{self, Vec3};
use crate::dynamics::{integrate_step, Integrator, Quadrotor, QuadrotorParams, RigidBodyState};
use crate::fixtures;
use crate::variable::{Hierarchy, Selector};
use crate::varmap::{EagerMap, LazyLocator, Locator, VariableMapMut};
use crate::{query, variables};

use super::SqpError;

/// Per-component quadratic tracking weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub position: f64,
    pub orientation: f64,
    pub linear_velocity: f64,
    pub angular_velocity: f64,
    /// Applied to the deviation of each rotor speed from its reference.
    pub input: f64,
}

impl Weights {
    pub fn stage() -> Weights {
        Weights { position: 10.0, orientation: 1.0, linear_velocity: 1.0, angular_velocity: 0.1, input: 1e-4 }
    }

    pub fn terminal() -> Weights {
        Weights { position: 1e4, orientation: 100.0, linear_velocity: 100.0, angular_velocity: 10.0, input: 0.0 }
    }

    fn sqrt(&self) -> Weights {
        Weights {
            position: self.position.sqrt(),
            orientation: self.orientation.sqrt(),
            linear_velocity: self.linear_velocity.sqrt(),
            angular_velocity: self.angular_velocity.sqrt(),
            input: self.input.sqrt(),
        }
    }

    pub(crate) fn all(&self) -> [f64; 5] {
        [self.position, self.orientation, self.linear_velocity, self.angular_velocity, self.input]
    }
}

/// A quadrotor tracking problem over `horizon` intervals of length `dt`.
///
/// The first state is pinned to `initial_state`; the remaining states and all
/// inputs are decision variables. Rotor speeds are boxed by `input_bounds`.
#[derive(Debug, Clone, PartialEq)]
pub struct OcpInstance {
    pub horizon: usize,
    pub dt: f64,
    pub params: QuadrotorParams,
    pub integrator: Integrator,
    pub stage_weights: Weights,
    pub terminal_weights: Weights,
    pub initial_state: RigidBodyState,
    /// One reference state per knot, `horizon + 1` in total.
    pub reference: Vec<RigidBodyState>,
    pub input_reference: [f64; 4],
    pub input_bounds: (f64, f64),
}

/// Scalars per state in tangent coordinates (orientation takes 3).
pub const STATE_TANGENT: usize = 12;
pub const INPUTS: usize = 4;

impl OcpInstance {
    /// Regulate to hover at the origin, starting at rest at `start`.
    pub fn hover(horizon: usize, dt: f64, start: [f64; 3]) -> OcpInstance {
        let params = QuadrotorParams::default();
        OcpInstance {
            horizon,
            dt,
            params,
            integrator: Integrator::SemiImplicitEuler,
            stage_weights: Weights::stage(),
            terminal_weights: Weights::terminal(),
            initial_state: RigidBodyState::at_rest(start),
            reference: vec![RigidBodyState::at_rest([0.0; 3]); horizon + 1],
            input_reference: params.hover_input(),
            input_bounds: (0.0, 2.0 * params.hover_speed()),
        }
    }

    pub fn validate(&self) -> Result<(), SqpError> {
        let invalid = |m: String| Err(SqpError::InvalidInstance(m));
        if self.horizon == 0 {
            return invalid("horizon must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        let (lo, hi) = self.input_bounds;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return invalid(format!("input bounds are infeasible: lower {lo} > upper {hi}"));
        }
        if lo < 0.0 {
            return invalid(format!("rotor speeds cannot be negative, lower bound {lo}"));
        }
        if self.reference.len() != self.horizon + 1 {
            return invalid(format!("{} reference states for a horizon of {}", self.reference.len(), self.horizon));
        }
        let weights = self.stage_weights.all().into_iter().chain(self.terminal_weights.all());
        if weights.into_iter().any(|w| !(w >= 0.0 && w.is_finite())) {
            return invalid("weights must be finite and nonnegative".into());
        }
        let unit = |q: &[f64; 4]| (quaternion::norm(q) - 1.0).abs() <= 1e-9;
        if !unit(&self.initial_state.orientation) || !self.reference.iter().all(|r| unit(&r.orientation)) {
            return invalid("orientations must be unit quaternions".into());
        }
        self.params.validate().map_err(|e| SqpError::InvalidInstance(e.to_string()))
    }

    pub fn decision_variables(&self) -> Hierarchy {
        fixtures::quadrotor(self.horizon).expect("quadrotor hierarchy")
    }

    /// Layout of the problem data: initial state, per-knot references, input reference.
    #[allow(non_snake_case)]
    pub fn parameters(&self) -> Hierarchy {
        let build = || -> Result<Hierarchy, crate::variable::VarError> {
            let N = self.horizon;
            variables! {
                position: 3;
                orientation: Q;
                linear_velocity: 3;
                angular_velocity: 3;
                rotor_speed: 1;
                initial_state <<= (position, orientation, linear_velocity, angular_velocity);
                x_ref <<= (position, orientation, linear_velocity, angular_velocity);
                X_ref <<= (N + 1) * x_ref;
                u_ref <<= 4 * rotor_speed;
                parameters <<= (initial_state, X_ref, u_ref);
            }
            parameters.build()
        };
        build().expect("parameter hierarchy")
    }

    /// Problem data packed into the [`parameters`](Self::parameters) layout.
    pub fn parameter_buffer(&self) -> Vec<f64> {
        let h = self.parameters();
        let mut map = EagerMap::<f64>::new(&h);
        map.get_mut(&query!["initial_state"]).unwrap().write(&self.initial_state.to_vec()).unwrap();
        for (k, r) in self.reference.iter().enumerate() {
            map.get_mut(&query!["x_ref", k]).unwrap().write(&r.to_vec()).unwrap();
        }
        map.get_mut(&query!["u_ref"]).unwrap().write(&self.input_reference).unwrap();
        map.into_buffer()
    }

    /// Tangent-space dimension of the free decision variables.
    pub fn tangent_len(&self) -> usize {
        self.horizon * (STATE_TANGENT + INPUTS)
    }

    pub fn defect_len(&self) -> usize {
        self.horizon * STATE_TANGENT
    }

    pub fn residual_len(&self) -> usize {
        (self.horizon + 1) * STATE_TANGENT + self.horizon * INPUTS
    }

    /// The default initial guess: the initial state repeated over the horizon
    /// and the input reference at every interval.
    pub fn initial_guess(&self) -> Vec<f64> {
        let h = self.decision_variables();
        let mut map = EagerMap::<f64>::new(&h);
        let x0 = self.initial_state.to_vec();
        for k in 0..=self.horizon {
            map.get_mut(&query!["x", k]).unwrap().write(&x0).unwrap();
        }
        for k in 0..self.horizon {
            map.get_mut(&query!["u", k]).unwrap().write(&self.input_reference).unwrap();
        }
        map.into_buffer()
    }
}

/// The multiple-shooting NLP of an [`OcpInstance`] over the flat decision
/// buffer, with subvariables located through `L`.
#[derive(Debug, Clone)]
pub struct Transcription<L = LazyLocator> {
    instance: OcpInstance,
    model: Quadrotor,
    locator: L,
    state: Selector,
    input: Selector,
    sqrt_stage: Weights,
    sqrt_terminal: Weights,
}

/// Transcribes with a lazy locator.
pub fn transcribe(instance: &OcpInstance) -> Result<Transcription<LazyLocator>, SqpError> {
    let h = instance.decision_variables();
    Transcription::new(instance, LazyLocator::new(&h))
}

fn sub3<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl<L: Locator> Transcription<L> {
    pub fn new(instance: &OcpInstance, locator: L) -> Result<Self, SqpError> {
        instance.validate()?;
        let h = locator.hierarchy();
        if *h != instance.decision_variables() {
            return Err(SqpError::InvalidInstance("locator hierarchy does not match the horizon".into()));
        }
        let state = h.selector(&["x"])?;
        let input = h.selector(&["u"])?;
        Ok(Transcription {
            model: Quadrotor::new(instance.params),
            sqrt_stage: instance.stage_weights.sqrt(),
            sqrt_terminal: instance.terminal_weights.sqrt(),
            instance: instance.clone(),
            locator,
            state,
            input,
        })
    }

    pub fn instance(&self) -> &OcpInstance {
        &self.instance
    }

    pub fn locator(&self) -> &L {
        &self.locator
    }

    pub fn decision_len(&self) -> usize {
        self.locator.hierarchy().size()
    }

    pub(crate) fn state_offset(&self, k: usize) -> usize {
        self.locator.locate_at(&self.state, &[k]).expect("state index in range").offset
    }

    pub(crate) fn input_offset(&self, k: usize) -> usize {
        self.locator.locate_at(&self.input, &[k]).expect("input index in range").offset
    }

    pub fn state<T: Real>(&self, z: &[T], k: usize) -> RigidBodyState<T> {
        let o = self.state_offset(k);
        RigidBodyState::from_slice(&z[o..o + RigidBodyState::<T>::SIZE])
    }

    pub fn input<'z, T: Real>(&self, z: &'z [T], k: usize) -> &'z [T] {
        let o = self.input_offset(k);
        &z[o..o + INPUTS]
    }

    /// Weighted tracking residuals; the cost is half their squared norm.
    pub fn residuals<T: Real>(&self, z: &[T], out: &mut [T]) {
        let n = self.instance.horizon;
        let mut i = 0;
        for k in 0..=n {
            let w = if k == n { &self.sqrt_terminal } else { &self.sqrt_stage };
            let x = self.state(z, k);
            let r = self.instance.reference[k].lift::<T>();
            let err_q = quaternion::log(&quaternion::mul(&quaternion::conjugate(&r.orientation), &x.orientation));
            let parts = [
                (w.position, sub3(&x.position, &r.position)),
                (w.orientation, err_q),
                (w.linear_velocity, sub3(&x.linear_velocity, &r.linear_velocity)),
                (w.angular_velocity, sub3(&x.angular_velocity, &r.angular_velocity)),
            ];
            for (weight, e) in parts {
                for v in e {
                    out[i] = T::from_f64(weight) * v;
                    i += 1;
                }
            }
        }
        let wu = T::from_f64(self.sqrt_stage.input);
        for k in 0..n {
            for (u, r) in self.input(z, k).iter().zip(self.instance.input_reference) {
                out[i] = wu * (*u - T::from_f64(r));
                i += 1;
            }
        }
    }

    pub fn cost<T: Real>(&self, z: &[T]) -> T {
        let mut r = vec![T::zero(); self.instance.residual_len()];
        self.residuals(z, &mut r);
        let mut s = T::zero();
        for v in r {
            s += v * v;
        }
        s * T::from_f64(0.5)
    }

    /// Dynamics defects `x_{k+1} ⊖ step(x_k, u_k)`, 12 per interval; the
    /// orientation part is `log(q_{k+1}⁻¹ ⊗ q⁺)`.
    pub fn defects<T: Real>(&self, z: &[T], out: &mut [T]) {
        let dt = T::from_f64(self.instance.dt);
        for k in 0..self.instance.horizon {
            let x = self.state(z, k);
            let next = self.state(z, k + 1);
            let step = integrate_step(&self.model, &x, self.input(z, k), dt, self.instance.integrator);
            let d = &mut out[k * STATE_TANGENT..(k + 1) * STATE_TANGENT];
            let dq = quaternion::log(&quaternion::mul(&quaternion::conjugate(&next.orientation), &step.orientation));
            d[0..3].copy_from_slice(&sub3(&next.position, &step.position));
            d[3..6].copy_from_slice(&dq);
            d[6..9].copy_from_slice(&sub3(&next.linear_velocity, &step.linear_velocity));
            d[9..12].copy_from_slice(&sub3(&next.angular_velocity, &step.angular_velocity));
        }
    }

    /// Applies a tangent step to `z`: additive on vectors, `q ⊗ exp(δθ)` on
    /// orientations. The pinned first state is left untouched.
    pub fn retract<T: Real>(&self, z: &[f64], delta: &[T]) -> Vec<T> {
        let mut out: Vec<T> = z.iter().map(|v| T::from_f64(*v)).collect();
        let n = self.instance.horizon;
        for k in 1..=n {
            let o = self.state_offset(k);
            let d = &delta[(k - 1) * STATE_TANGENT..k * STATE_TANGENT];
            for i in 0..3 {
                out[o + i] += d[i];
                out[o + 7 + i] += d[6 + i];
                out[o + 10 + i] += d[9 + i];
            }
            let q = [out[o + 3], out[o + 4], out[o + 5], out[o + 6]];
            let q = quaternion::mul(&q, &quaternion::exp(&[d[3], d[4], d[5]]));
            out[o + 3..o + 7].copy_from_slice(&q);
        }
        let base = n * STATE_TANGENT;
        for k in 0..n {
            let o = self.input_offset(k);
            for i in 0..INPUTS {
                out[o + i] += delta[base + k * INPUTS + i];
            }
        }
        out
    }

    /// Tangent index of rotor `i` at interval `k`.
    pub fn input_tangent_index(&self, k: usize, i: usize) -> usize {
        self.instance.horizon * STATE_TANGENT + k * INPUTS + i
    }

    pub(crate) fn pin_initial_state(&self, z: &mut [f64]) {
        let o = self.state_offset(0);
        self.instance.initial_state.write_to(&mut z[o..o + RigidBodyState::<f64>::SIZE]);
    }
}

/// Which NLP function a [`TangentFunction`] exposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlpPart {
    Residuals,
    Defects,
}

/// An NLP function seen as a function of a tangent step at a base point.
pub struct TangentFunction<'a, L> {
    pub transcription: &'a Transcription<L>,
    pub base: &'a [f64],
    pub part: NlpPart,
}

impl<L: Locator> DiffFunction for TangentFunction<'_, L> {
    fn input_len(&self) -> usize {
        self.transcription.instance.tangent_len()
    }

    fn output_len(&self) -> usize {
        match self.part {
            NlpPart::Residuals => self.transcription.instance.residual_len(),
            NlpPart::Defects => self.transcription.instance.defect_len(),
        }
    }

    fn eval<T: Real>(&self, delta: &[T], out: &mut [T]) {
        let z = self.transcription.retract(self.base, delta);
        match self.part {
            NlpPart::Residuals => self.transcription.residuals(&z, out),
            NlpPart::Defects => self.transcription.defects(&z, out),
        }
    }
}

/// An NLP function of the raw decision buffer, quaternion components included.
pub struct BufferFunction<'a, L> {
    pub transcription: &'a Transcription<L>,
    pub part: NlpPart,
}

impl<L: Locator> DiffFunction for BufferFunction<'_, L> {
    fn input_len(&self) -> usize {
        self.transcription.decision_len()
    }

    fn output_len(&self) -> usize {
        match self.part {
            NlpPart::Residuals => self.transcription.instance.residual_len(),
            NlpPart::Defects => self.transcription.instance.defect_len(),
        }
    }

    fn eval<T: Real>(&self, z: &[T], out: &mut [T]) {
        match self.part {
            NlpPart::Residuals => self.transcription.residuals(z, out),
            NlpPart::Defects => self.transcription.defects(z, out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rollout;

    #[test]
    fn layout_sizes() {
        let inst = OcpInstance::hover(30, 0.05, [1.0, 0.0, 0.0]);
        let tr = transcribe(&inst).unwrap();
        assert_eq!(tr.decision_len(), 523);
        assert_eq!(inst.defect_len(), 30 * 12);
        assert_eq!(inst.tangent_len(), 30 * 16);
        assert_eq!(inst.parameters().size(), 13 + 31 * 13 + 4);
        assert_eq!(inst.parameter_buffer().len(), inst.parameters().size());
    }

    #[test]
    fn rollout_consistent_trajectory_has_no_defects() {
        let inst = OcpInstance::hover(5, 0.05, [0.3, -0.2, 0.5]);
        let tr = transcribe(&inst).unwrap();
        let mut z = inst.initial_guess();
        let model = Quadrotor::new(inst.params);
        let u = [480.0, 500.0, 510.0, 495.0];
        let mut x = inst.initial_state;
        for k in 0..inst.horizon {
            let o = tr.input_offset(k);
            z[o..o + 4].copy_from_slice(&u);
            x = rollout(&model, &x, &u, inst.dt, 1, inst.integrator);
            let o = tr.state_offset(k + 1);
            x.write_to(&mut z[o..o + 13]);
        }
        let mut d = vec![1.0; inst.defect_len()];
        tr.defects(&z, &mut d);
        assert!(d.iter().all(|v| v.abs() < 1e-14), "{d:?}");
    }

    #[test]
    fn cost_vanishes_on_reference() {
        let inst = OcpInstance::hover(4, 0.05, [0.0; 3]);
        let tr = transcribe(&inst).unwrap();
        assert_eq!(tr.cost(&inst.initial_guess()), 0.0);
    }

    #[test]
    fn validation() {
        let mut inst = OcpInstance::hover(4, 0.05, [0.0; 3]);
        inst.input_bounds = (600.0, 100.0);
        assert!(matches!(transcribe(&inst), Err(SqpError::InvalidInstance(_))));
        let mut inst = OcpInstance::hover(4, 0.05, [0.0; 3]);
        inst.reference.pop();
        assert!(transcribe(&inst).is_err());
        let mut inst = OcpInstance::hover(4, 0.05, [0.0; 3]);
        inst.initial_state.orientation = [0.0, 0.0, 0.0, 2.0];
        assert!(transcribe(&inst).is_err());
    }
}

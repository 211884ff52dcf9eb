//! Receding-horizon quadrotor control: solve, apply the first input, step the
//! plant, shift the previous solution as the next guess.
//!
//! Trajectory CSV columns:
//! `t,px,py,pz,qx,qy,qz,qw,vx,vy,vz,wx,wy,wz,u1,u2,u3,u4`. The last row holds
//! the final state and leaves the input columns empty.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dynamics::{integrate_step, quaternion, Integrator, Quadrotor, QuadrotorParams, RigidBodyState};
use crate::sqp::{self, OcpInstance, SqpError, SqpOptions, SqpReport, Termination, Transcription};
use crate::varmap::EagerLocator;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("invalid demo configuration: {0}")]
    Config(String),
    #[error("solver failed at step {step}: {source}")]
    Solver { step: usize, source: SqpError },
    #[error("solver did not converge at step {step} ({}, max defect {:e})", report.termination, report.max_defect)]
    NotConverged { step: usize, report: Box<SqpReport> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub params: QuadrotorParams,
    pub horizon: usize,
    pub dt: f64,
    pub steps: usize,
    pub start: [f64; 3],
    pub target: [f64; 3],
    /// Moves the target to the second position at the given step.
    pub target_step: Option<(usize, [f64; 3])>,
    pub integrator: Integrator,
    pub options: SqpOptions,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            params: QuadrotorParams::default(),
            horizon: 15,
            dt: 0.05,
            steps: 200,
            start: [1.0, 0.0, 0.0],
            target: [0.0; 3],
            target_step: None,
            integrator: Integrator::SemiImplicitEuler,
            options: SqpOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: RigidBodyState,
    pub input: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSummary {
    pub iterations: usize,
    pub termination: Termination,
    pub max_defect: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoResult {
    pub trajectory: Vec<Sample>,
    pub solves: Vec<SolveSummary>,
    /// Target in force at the end of the run.
    pub final_target: [f64; 3],
}

impl DemoResult {
    pub fn final_state(&self) -> &RigidBodyState {
        &self.trajectory.last().expect("at least the initial state").state
    }

    pub fn final_position_error(&self) -> f64 {
        let p = self.final_state().position;
        (0..3).map(|i| (p[i] - self.final_target[i]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_quaternion_drift(&self) -> f64 {
        self.trajectory.iter().map(|s| (quaternion::norm(&s.state.orientation) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("t,px,py,pz,qx,qy,qz,qw,vx,vy,vz,wx,wy,wz,u1,u2,u3,u4\n");
        for sample in &self.trajectory {
            let mut row = vec![sample.t];
            row.extend(sample.state.to_vec());
            let mut line = row.iter().map(|v| number(*v)).collect::<Vec<_>>().join(",");
            match sample.input {
                Some(u) => u.iter().for_each(|v| write!(line, ",{}", number(*v)).unwrap()),
                None => line.push_str(",,,,"),
            }
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let iterations: usize = self.solves.iter().map(|s| s.iterations).sum();
        let slowest = self.solves.iter().map(|s| s.elapsed).max().unwrap_or_default();
        let worst_defect = self.solves.iter().map(|s| s.max_defect).fold(0.0, f64::max);
        format!(
            "steps={}\nsqp_iterations={iterations}\nmax_solve_ms={:.3}\nmax_defect={worst_defect:e}\n\
             final_position_error={:e}\nmax_quaternion_drift={:e}\n",
            self.solves.len(),
            slowest.as_secs_f64() * 1e3,
            self.final_position_error(),
            self.max_quaternion_drift(),
        )
    }
}

/// Shortest round-trip form, in exponent notation for tiny magnitudes.
fn number(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn instance(config: &DemoConfig, state: RigidBodyState, target: [f64; 3]) -> OcpInstance {
    let mut inst = OcpInstance::hover(config.horizon, config.dt, target);
    inst.params = config.params;
    inst.input_reference = config.params.hover_input();
    inst.input_bounds = (0.0, 2.0 * config.params.hover_speed());
    inst.integrator = config.integrator;
    inst.initial_state = state;
    inst.reference = vec![RigidBodyState::at_rest(target); config.horizon + 1];
    inst
}

/// Moves every knot one interval earlier, repeating the last one.
fn shift<L: crate::varmap::Locator>(tr: &Transcription<L>, z: &[f64]) -> Vec<f64> {
    let n = tr.instance().horizon;
    let mut out = z.to_vec();
    for k in 0..=n {
        let (dst, src) = (tr.state_offset(k), tr.state_offset((k + 1).min(n)));
        out[dst..dst + 13].copy_from_slice(&z[src..src + 13]);
    }
    for k in 0..n {
        let (dst, src) = (tr.input_offset(k), tr.input_offset((k + 1).min(n - 1)));
        out[dst..dst + 4].copy_from_slice(&z[src..src + 4]);
    }
    out
}

pub fn run(config: &DemoConfig) -> Result<DemoResult, DemoError> {
    if config.steps == 0 {
        return Err(DemoError::Config("steps must be positive".into()));
    }
    let mut state = RigidBodyState::at_rest(config.start);
    let mut target = config.target;
    let first = instance(config, state, target);
    first.validate().map_err(|source| DemoError::Solver { step: 0, source })?;
    let locator = EagerLocator::new(&first.decision_variables());
    let plant = Quadrotor::new(config.params);

    let mut guess = first.initial_guess();
    let mut trajectory = Vec::with_capacity(config.steps + 1);
    let mut solves = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        if let Some((at, next)) = config.target_step {
            if step == at {
                target = next;
            }
        }
        let inst = instance(config, state, target);
        let tr = Transcription::new(&inst, locator.clone()).map_err(|source| DemoError::Solver { step, source })?;
        let started = Instant::now();
        let (z, report) =
            sqp::solve(&tr, &guess, &config.options).map_err(|source| DemoError::Solver { step, source })?;
        let elapsed = started.elapsed();
        let acceptable =
            report.converged() || (report.termination == Termination::MaxIterations && report.max_defect < 1e-6);
        if !acceptable {
            return Err(DemoError::NotConverged { step, report: Box::new(report) });
        }
        let u: [f64; 4] = tr.input(&z, 0).try_into().unwrap();
        trajectory.push(Sample { t: step as f64 * config.dt, state, input: Some(u) });
        solves.push(SolveSummary {
            iterations: report.iterations.len(),
            termination: report.termination,
            max_defect: report.max_defect,
            elapsed,
        });
        state = integrate_step(&plant, &state, &u, config.dt, config.integrator);
        guess = shift(&tr, &z);
    }
    trajectory.push(Sample { t: config.steps as f64 * config.dt, state, input: None });
    Ok(DemoResult { trajectory, solves, final_target: target })
}

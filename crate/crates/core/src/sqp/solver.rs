use nalgebra::DVector;

use super::kkt::{solve_qp, Bound};
use super::ocp::{NlpPart, TangentFunction, Transcription, INPUTS};
use super::SqpError;
use crate::derivatives::value_and_jacobian;
use crate::dynamics::quaternion;
use crate::varmap::Locator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqpOptions {
    pub max_iterations: usize,
    /// Converged when both stationarity and defect are below this.
    pub tolerance: f64,
    /// Also converged when the defect is below `defect_tolerance` and
    /// stationarity below `stationarity_tolerance`.
    pub defect_tolerance: f64,
    pub stationarity_tolerance: f64,
    pub armijo: f64,
    pub min_step: f64,
    /// Merit penalty lower bound as a multiple of the largest multiplier.
    pub penalty_factor: f64,
}

impl Default for SqpOptions {
    fn default() -> Self {
        SqpOptions {
            max_iterations: 50,
            tolerance: 1e-6,
            defect_tolerance: 1e-8,
            stationarity_tolerance: 1e-5,
            armijo: 1e-4,
            min_step: 1e-8,
            penalty_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::LineSearchFailed => "line_search_failed",
        })
    }
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub merit_before: f64,
    pub merit_after: f64,
    pub penalty: f64,
    pub step_size: f64,
    pub step_norm: f64,
    pub cost: f64,
    /// Largest absolute defect after the step.
    pub max_defect: f64,
    pub regularization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqpReport {
    pub iterations: Vec<IterationRecord>,
    pub termination: Termination,
    pub cost: f64,
    pub max_defect: f64,
    pub stationarity: f64,
    /// Infinity norm of the last QP step (zero-length when converged at start).
    pub last_step_norm: f64,
}

impl SqpReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

fn norm1(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

struct Evaluation {
    cost: f64,
    defects: DVector<f64>,
}

fn evaluate<L: Locator>(tr: &Transcription<L>, z: &[f64]) -> Option<Evaluation> {
    let cost = tr.cost(z);
    let mut c = vec![0.0; tr.instance().defect_len()];
    tr.defects(z, &mut c);
    (cost.is_finite() && c.iter().all(|v| v.is_finite())).then(|| Evaluation { cost, defects: DVector::from_vec(c) })
}

/// Applies a tangent step and renormalizes the orientations.
fn step_to<L: Locator>(tr: &Transcription<L>, z: &[f64], d: &[f64]) -> Vec<f64> {
    let mut next = tr.retract(z, d);
    for k in 1..=tr.instance().horizon {
        let o = tr.state_offset(k) + 3;
        let q = quaternion::normalize(&[next[o], next[o + 1], next[o + 2], next[o + 3]]);
        next[o..o + 4].copy_from_slice(&q);
    }
    next
}

/// Solves the transcribed problem from `guess` and returns the final decision
/// buffer. The first state of `guess` is overwritten with the initial state.
pub fn solve<L: Locator>(
    tr: &Transcription<L>,
    guess: &[f64],
    options: &SqpOptions,
) -> Result<(Vec<f64>, SqpReport), SqpError> {
    let inst = tr.instance();
    if guess.len() != tr.decision_len() {
        return Err(SqpError::GuessLength { expected: tr.decision_len(), found: guess.len() });
    }
    let mut z = guess.to_vec();
    tr.pin_initial_state(&mut z);
    for k in 0..=inst.horizon {
        let q = tr.state(&z, k).orientation;
        if (quaternion::norm(&q) - 1.0).abs() > 1e-6 {
            return Err(SqpError::InvalidGuess(format!("orientation {k} is not a unit quaternion")));
        }
    }
    let (lo, hi) = inst.input_bounds;
    for k in 0..inst.horizon {
        if tr.input(&z, k).iter().any(|u| !(*u >= lo && *u <= hi)) {
            return Err(SqpError::InvalidGuess(format!("input {k} violates the rotor speed bounds")));
        }
    }

    let mut records = Vec::new();
    let mut penalty = 0.0_f64;
    let mut termination = Termination::MaxIterations;
    let (mut stationarity, mut last_step_norm) = (f64::INFINITY, f64::INFINITY);
    let mut current = evaluate(tr, &z).ok_or_else(|| SqpError::NonFinite { iterate: z.clone() })?;

    for iteration in 0..=options.max_iterations {
        let residuals = TangentFunction { transcription: tr, base: &z, part: NlpPart::Residuals };
        let defects = TangentFunction { transcription: tr, base: &z, part: NlpPart::Defects };
        let nonfinite = |_| SqpError::NonFinite { iterate: z.clone() };
        let (r, jr) = value_and_jacobian(&residuals, &vec![0.0; inst.tangent_len()]).map_err(nonfinite)?;
        let (c, jc) = value_and_jacobian(&defects, &vec![0.0; inst.tangent_len()]).map_err(nonfinite)?;
        let g = jr.transpose() * &r;
        let h = jr.transpose() * &jr;

        let mut bounds = Vec::with_capacity(inst.horizon * INPUTS);
        for k in 0..inst.horizon {
            for (i, u) in tr.input(&z, k).iter().enumerate() {
                bounds.push(Bound { index: tr.input_tangent_index(k, i), lower: lo - u, upper: hi - u });
            }
        }
        let qp = solve_qp(&h, &g, &jc, &(-&c), &bounds)?;
        let d = &qp.step;
        stationarity = (&g + jc.transpose() * &qp.multipliers + &qp.bound_multipliers).amax();
        last_step_norm = d.amax();
        let defect = c.amax();
        if stationarity.max(defect) < options.tolerance
            || (defect < options.defect_tolerance && stationarity < options.stationarity_tolerance)
        {
            termination = Termination::Converged;
            break;
        }
        if iteration == options.max_iterations {
            break;
        }

        // ℓ1 merit: the penalty must dominate the multipliers and make the
        // step a descent direction with some margin.
        let c1 = norm1(&c);
        let quad = g.dot(d) + 0.5 * d.dot(&(&h * d));
        penalty = penalty.max(options.penalty_factor * qp.multipliers.amax()).max(1.0);
        while c1 > 0.0 && quad > 0.5 * penalty * c1 {
            penalty *= 2.0;
        }
        let merit = current.cost + penalty * c1;
        let slope = g.dot(d) - penalty * c1;

        let mut alpha = 1.0;
        let accepted = loop {
            let trial = step_to(tr, &z, (d * alpha).as_slice());
            if let Some(e) = evaluate(tr, &trial) {
                let m = e.cost + penalty * norm1(&e.defects);
                if m <= merit + options.armijo * alpha * slope {
                    break Some((trial, e, m));
                }
            }
            alpha *= 0.5;
            if alpha < options.min_step {
                break None;
            }
        };
        let Some((trial, e, m)) = accepted else {
            termination = Termination::LineSearchFailed;
            break;
        };
        records.push(IterationRecord {
            merit_before: merit,
            merit_after: m,
            penalty,
            step_size: alpha,
            step_norm: alpha * last_step_norm,
            cost: e.cost,
            max_defect: e.defects.amax(),
            regularization: qp.regularization,
        });
        z = trial;
        current = e;
    }

    let report = SqpReport {
        iterations: records,
        termination,
        cost: current.cost,
        max_defect: current.defects.amax(),
        stationarity,
        last_step_norm,
    };
    Ok((z, report))
}

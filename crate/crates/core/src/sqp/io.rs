//! Text form of problem instances and solver reports.
//!
//! Instances are `key=value` lines; vectors are comma separated. Reference
//! states are listed one key per knot (`reference.0`, `reference.1`, ...).

use std::fmt::Write as _;

use super::ocp::{OcpInstance, Weights};
use super::solver::SqpReport;
use crate::dynamics::params::{parse_pairs, parse_value, ParamsError};
use crate::dynamics::{Integrator, QuadrotorParams, RigidBodyState};

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn list(key: &str, value: &str, len: usize) -> Result<Vec<f64>, ParamsError> {
    let v = value.split(',').map(|s| parse_value(key, s.trim())).collect::<Result<Vec<f64>, _>>()?;
    if v.len() != len {
        return Err(ParamsError::Invalid(format!("`{key}` needs {len} values, got {}", v.len())));
    }
    Ok(v)
}

fn weight_keys(prefix: &str, w: &Weights) -> [(String, f64); 5] {
    let names = ["position", "orientation", "linear_velocity", "angular_velocity", "input"];
    let values = w.all();
    [0, 1, 2, 3, 4].map(|i| (format!("{prefix}.{}", names[i]), values[i]))
}

pub fn instance_to_kv(inst: &OcpInstance) -> String {
    let mut s = String::new();
    let integrator = match inst.integrator {
        Integrator::SemiImplicitEuler => "semi_implicit_euler",
        Integrator::Rk4 => "rk4",
    };
    writeln!(s, "horizon={}\ndt={}\nintegrator={integrator}", inst.horizon, inst.dt).unwrap();
    s.push_str(&inst.params.to_kv());
    for (k, v) in
        weight_keys("stage", &inst.stage_weights).into_iter().chain(weight_keys("terminal", &inst.terminal_weights))
    {
        writeln!(s, "{k}={v}").unwrap();
    }
    writeln!(s, "initial_state={}", join(&inst.initial_state.to_vec())).unwrap();
    for (k, r) in inst.reference.iter().enumerate() {
        writeln!(s, "reference.{k}={}", join(&r.to_vec())).unwrap();
    }
    writeln!(s, "input_reference={}", join(&inst.input_reference)).unwrap();
    writeln!(s, "input_bounds={},{}", inst.input_bounds.0, inst.input_bounds.1).unwrap();
    s
}

/// Parses an instance. Every key is required except the vehicle parameters,
/// which default like [`QuadrotorParams::from_kv`].
pub fn instance_from_kv(text: &str) -> Result<OcpInstance, ParamsError> {
    let mut pairs = parse_pairs(text)?;
    let mut take = |key: &str| pairs.remove(key).ok_or_else(|| ParamsError::MissingKey(key.to_owned()));
    let horizon: usize = parse_value("horizon", &take("horizon")?)?;
    let dt: f64 = parse_value("dt", &take("dt")?)?;
    let integrator = match take("integrator")?.as_str() {
        "semi_implicit_euler" => Integrator::SemiImplicitEuler,
        "rk4" => Integrator::Rk4,
        other => return Err(ParamsError::Value { key: "integrator".into(), value: other.into() }),
    };
    let mut weights = |prefix: &str| -> Result<Weights, ParamsError> {
        let mut v = [0.0; 5];
        for (i, (key, _)) in weight_keys(prefix, &Weights::stage()).into_iter().enumerate() {
            v[i] = parse_value(&key, &take(&key)?)?;
        }
        Ok(Weights { position: v[0], orientation: v[1], linear_velocity: v[2], angular_velocity: v[3], input: v[4] })
    };
    let stage_weights = weights("stage")?;
    let terminal_weights = weights("terminal")?;
    let state = |key: &str, value: &str| list(key, value, 13).map(|v| RigidBodyState::from_slice(&v));
    let initial_state = state("initial_state", &take("initial_state")?)?;
    let reference = (0..=horizon)
        .map(|k| {
            let key = format!("reference.{k}");
            state(&key, &take(&key)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let u = list("input_reference", &take("input_reference")?, 4)?;
    let b = list("input_bounds", &take("input_bounds")?, 2)?;
    let rest: String = pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    let params = QuadrotorParams::from_kv(&rest)?;
    Ok(OcpInstance {
        horizon,
        dt,
        params,
        integrator,
        stage_weights,
        terminal_weights,
        initial_state,
        reference,
        input_reference: [u[0], u[1], u[2], u[3]],
        input_bounds: (b[0], b[1]),
    })
}

/// Summary lines followed by one CSV row per accepted iteration.
pub fn report_to_text(report: &SqpReport) -> String {
    let mut s = format!(
        "termination={}\niterations={}\ncost={:e}\nmax_defect={:e}\nstationarity={:e}\n\n",
        report.termination,
        report.iterations.len(),
        report.cost,
        report.max_defect,
        report.stationarity
    );
    s.push_str("iteration,merit_before,merit_after,penalty,step_size,step_norm,cost,max_defect,regularization\n");
    for (i, r) in report.iterations.iter().enumerate() {
        writeln!(
            s,
            "{i},{:e},{:e},{:e},{},{:e},{:e},{:e},{:e}",
            r.merit_before, r.merit_after, r.penalty, r.step_size, r.step_norm, r.cost, r.max_defect, r.regularization
        )
        .unwrap();
    }
    s
}

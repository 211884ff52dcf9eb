//! Size, index and path-equivalence assertions on the quadrotor decision
//! variables with `N = 30`, plus the totals of the legged-robot layouts.

#![allow(non_snake_case)]

use std::fmt::Write as _;

use crate::fixtures;
use crate::variable::{Hierarchy, Query, VarError};
use crate::{query, variables};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

fn index(h: &Hierarchy, q: &Query) -> String {
    h.index(q).map_or_else(|e| format!("error: {e}"), |i| i.to_string())
}

fn equal(h: &Hierarchy, a: &Query, b: &Query) -> String {
    match (h.resolve(a), h.resolve(b)) {
        (Ok(x), Ok(y)) => (x == y).to_string(),
        (Err(e), _) | (_, Err(e)) => format!("error: {e}"),
    }
}

fn build_all() -> Result<Vec<Check>, VarError> {
    let N = 30;
    variables! {
        position: 3;
        orientation: Q;
        linear_velocity: 3;
        angular_velocity: 3;
        rotor_speed: 1;
        x <<= (position, orientation, linear_velocity, angular_velocity);
        X <<= (N + 1) * x;
        u <<= 4 * rotor_speed;
        U <<= N * u;
        decision_variables <<= (X, U);
    }
    let (x, X, u, U, dv) = (x.build()?, X.build()?, u.build()?, U.build()?, decision_variables.build()?);

    let mut checks = Vec::new();
    let mut push = |name: String, expected: String, actual: String| checks.push(Check { name, expected, actual });

    for (name, h, expected) in
        [("x", &x, 13), ("X", &X, 403), ("u", &u, 4), ("U", &U, 120), ("decision_variables", &dv, 523)]
    {
        push(format!("{name}.size"), expected.to_string(), h.size().to_string());
    }

    let indices: [(&str, &Hierarchy, Query, usize); 8] = [
        ("X(x, 0).index", &X, query!["x", 0], 0),
        ("X(x, 1).index", &X, query!["x", 1], 13),
        ("X(x, 1, linear_velocity).index", &X, query!["x", 1, "linear_velocity"], 20),
        ("decision_variables(U).index", &dv, query!["U"], 403),
        ("U(u, 0).index", &U, query!["u", 0], 0),
        ("U(u, 1).index", &U, query!["u", 1], 4),
        ("U(u, 1, rotor_speed, 0).index", &U, query!["u", 1, "rotor_speed", 0], 4),
        ("U(u, 1, rotor_speed, 1).index", &U, query!["u", 1, "rotor_speed", 1], 5),
    ];
    for (name, h, q, expected) in indices {
        push(name.to_owned(), expected.to_string(), index(h, &q));
    }

    let equalities: [(&str, &Hierarchy, Query, Query); 6] = [
        (
            "X(x, 1, linear_velocity) == X(linear_velocity, 1)",
            &X,
            query!["x", 1, "linear_velocity"],
            query!["linear_velocity", 1],
        ),
        (
            "U(u, 1, rotor_speed, 0) == U(rotor_speed, 1, 0)",
            &U,
            query!["u", 1, "rotor_speed", 0],
            query!["rotor_speed", 1, 0],
        ),
        (
            "U(u, 1, rotor_speed, 1) == U(rotor_speed, 1, 1)",
            &U,
            query!["u", 1, "rotor_speed", 1],
            query!["rotor_speed", 1, 1],
        ),
        (
            "decision_variables(X, x, 1, linear_velocity) == decision_variables(linear_velocity, 1)",
            &dv,
            query!["X", "x", 1, "linear_velocity"],
            query!["linear_velocity", 1],
        ),
        (
            "decision_variables(U, u, 2, rotor_speed, 3) == decision_variables(u, 2, rotor_speed, 3)",
            &dv,
            query!["U", "u", 2, "rotor_speed", 3],
            query!["u", 2, "rotor_speed", 3],
        ),
        (
            "decision_variables(U, u, 2, rotor_speed, 3) == decision_variables(rotor_speed, 2, 3)",
            &dv,
            query!["U", "u", 2, "rotor_speed", 3],
            query!["rotor_speed", 2, 3],
        ),
    ];
    for (name, h, a, b) in equalities {
        push(name.to_owned(), "true".into(), equal(h, &a, &b));
    }

    push("locomotion(N=30, legs=4).size".into(), "1123".into(), fixtures::locomotion(30, 4)?.size().to_string());
    push(
        "loco_manipulation(N=10, robots=2, legs=4).size".into(),
        "1029".into(),
        fixtures::loco_manipulation(10, 2, 4)?.size().to_string(),
    );
    Ok(checks)
}

/// Evaluates every assertion. `fault` names an assertion whose computed
/// value is shifted by one, to exercise the failure path.
pub fn run(fault: Option<&str>) -> Vec<Check> {
    let mut checks = build_all().unwrap_or_else(|e| {
        vec![Check { name: "build hierarchies".into(), expected: "ok".into(), actual: format!("error: {e}") }]
    });
    if let Some(name) = fault {
        for c in checks.iter_mut().filter(|c| c.name == name) {
            c.actual = match c.actual.parse::<i64>() {
                Ok(v) => (v + 1).to_string(),
                Err(_) => format!("not {}", c.actual),
            };
        }
    }
    checks
}

pub fn names() -> Vec<String> {
    run(None).into_iter().map(|c| c.name).collect()
}

/// One `PASS`/`FAIL` line per assertion and a closing count.
pub fn table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(s, "{status}  {:width$}  expected {:>5}  got {}", c.name, c.expected, c.actual).unwrap();
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    writeln!(s, "{passed}/{} assertions passed", checks.len()).unwrap();
    s
}

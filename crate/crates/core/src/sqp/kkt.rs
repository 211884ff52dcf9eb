//! Dense equality-constrained QP with simple bounds on a subset of variables.
//!
//! minimize ½ dᵀHd + gᵀd  subject to  A d = b,  lo_i ≤ d_i ≤ hi_i.
//!
//! Bounds are handled with an active set: each pass solves the KKT system with
//! the working bounds held as equalities, adds violated bounds and releases
//! one bound whose multiplier has the wrong sign.

use nalgebra::{DMatrix, DVector};

use super::SqpError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub step: DVector<f64>,
    /// Equality multipliers, with stationarity `Hd + g + Aᵀλ + ν = 0`.
    pub multipliers: DVector<f64>,
    /// Bound multipliers per variable, zero where no bound is active.
    pub bound_multipliers: DVector<f64>,
    /// Diagonal shift that was needed to factor the KKT matrix.
    pub regularization: f64,
    pub active_bounds: usize,
}

const REGULARIZATION: [f64; 8] = [0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2];
const MAX_ACTIVE_SET_PASSES: usize = 200;
const FEASIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

/// Step, equality multipliers, bound multipliers and the regularization used.
type KktSolution = (DVector<f64>, DVector<f64>, DVector<f64>, f64);

fn solve_kkt(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    active: &[(Bound, Side)],
) -> Option<KktSolution> {
    let n = h.nrows();
    let m = a.nrows();
    let k = active.len();
    let dim = n + m + k;
    let mut kkt = DMatrix::<f64>::zeros(dim, dim);
    kkt.view_mut((0, 0), (n, n)).copy_from(h);
    kkt.view_mut((n, 0), (m, n)).copy_from(a);
    kkt.view_mut((0, n), (n, m)).copy_from(&a.transpose());
    let mut rhs = DVector::<f64>::zeros(dim);
    rhs.rows_mut(0, n).copy_from(&(-g));
    rhs.rows_mut(n, m).copy_from(b);
    for (j, (bound, side)) in active.iter().enumerate() {
        kkt[(n + m + j, bound.index)] = 1.0;
        kkt[(bound.index, n + m + j)] = 1.0;
        rhs[n + m + j] = match side {
            Side::Lower => bound.lower,
            Side::Upper => bound.upper,
        };
    }
    for reg in REGULARIZATION {
        let mut mat = kkt.clone();
        for i in 0..n {
            mat[(i, i)] += reg;
        }
        for i in n..dim {
            mat[(i, i)] -= reg * 1e-3;
        }
        let Some(sol) = mat.lu().solve(&rhs) else { continue };
        if sol.iter().all(|v| v.is_finite()) {
            let d = sol.rows(0, n).into_owned();
            let lambda = sol.rows(n, m).into_owned();
            let mut nu = DVector::zeros(n);
            for (j, (bound, _)) in active.iter().enumerate() {
                nu[bound.index] = sol[n + m + j];
            }
            return Some((d, lambda, nu, reg));
        }
    }
    None
}

/// Solves the bounded QP. Fails if the KKT matrix stays singular under every
/// regularization or the active set does not settle.
pub fn solve_qp(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    bounds: &[Bound],
) -> Result<QpSolution, SqpError> {
    let mut active: Vec<(Bound, Side)> = Vec::new();
    for _ in 0..MAX_ACTIVE_SET_PASSES {
        let (d, lambda, nu, reg) = solve_kkt(h, g, a, b, &active).ok_or(SqpError::SingularKkt)?;
        let mut added = false;
        for bound in bounds {
            if active.iter().any(|(b, _)| b.index == bound.index) {
                continue;
            }
            let v = d[bound.index];
            if v < bound.lower - FEASIBILITY_TOL {
                active.push((*bound, Side::Lower));
                added = true;
            } else if v > bound.upper + FEASIBILITY_TOL {
                active.push((*bound, Side::Upper));
                added = true;
            }
        }
        if added {
            continue;
        }
        // Lower bounds need ν ≤ 0, upper bounds ν ≥ 0.
        let wrong = active
            .iter()
            .enumerate()
            .map(|(j, (bound, side))| {
                let v = nu[bound.index];
                (j, if *side == Side::Lower { v } else { -v })
            })
            .filter(|(_, v)| *v > FEASIBILITY_TOL)
            .max_by(|x, y| x.1.total_cmp(&y.1));
        match wrong {
            Some((j, _)) => {
                active.swap_remove(j);
            }
            None => {
                return Ok(QpSolution {
                    step: d,
                    multipliers: lambda,
                    bound_multipliers: nu,
                    regularization: reg,
                    active_bounds: active.len(),
                })
            }
        }
    }
    Err(SqpError::ActiveSetCycling)
}

//! Forward-mode derivatives of functions over a single flat buffer.
//!
//! A [`DiffFunction`] reads all of its inputs from one slice, the layout
//! solvers and derivative tools expect. Jacobians are assembled one column at a
//! time by seeding a dual number along each input direction.

mod dual;

pub use dual::{Dual, Real};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("expected {expected} inputs, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("output {index} is not finite at the evaluation point")]
    NonFinite { index: usize },
}

/// A vector-valued function of one flat input buffer.
pub trait DiffFunction {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    /// Writes all outputs; `out.len() == self.output_len()`.
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]);
}

fn check_arity<F: DiffFunction>(f: &F, at: &[f64]) -> Result<(), DiffError> {
    if at.len() != f.input_len() {
        return Err(DiffError::Arity { expected: f.input_len(), found: at.len() });
    }
    Ok(())
}

/// Plain evaluation, rejecting non-finite outputs.
pub fn evaluate<F: DiffFunction>(f: &F, at: &[f64]) -> Result<DVector<f64>, DiffError> {
    check_arity(f, at)?;
    let mut out = vec![0.0; f.output_len()];
    f.eval(at, &mut out);
    if let Some(index) = out.iter().position(|v| !v.is_finite()) {
        return Err(DiffError::NonFinite { index });
    }
    Ok(DVector::from_vec(out))
}

/// Dense `output_len × input_len` Jacobian at `at`.
pub fn jacobian<F: DiffFunction>(f: &F, at: &[f64]) -> Result<DMatrix<f64>, DiffError> {
    Ok(value_and_jacobian(f, at)?.1)
}

/// Function value and Jacobian from the same sweep of directional passes.
pub fn value_and_jacobian<F: DiffFunction>(f: &F, at: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>), DiffError> {
    check_arity(f, at)?;
    let (n, m) = (f.input_len(), f.output_len());
    let mut x: Vec<Dual> = at.iter().map(|&v| Dual::constant(v)).collect();
    let mut out = vec![Dual::default(); m];
    let mut jac = DMatrix::zeros(m, n);
    let mut value = None;

    for j in 0..n {
        x[j].eps = 1.0;
        f.eval(&x, &mut out);
        x[j].eps = 0.0;
        for (i, o) in out.iter().enumerate() {
            jac[(i, j)] = o.eps;
        }
        if value.is_none() {
            value = Some(out.iter().map(|o| o.re).collect::<Vec<_>>());
        }
    }
    let value = match value {
        Some(v) => v,
        None => {
            let mut plain = vec![0.0; m];
            f.eval(at, &mut plain);
            plain
        }
    };
    if let Some(index) = value.iter().position(|v| !v.is_finite()) {
        return Err(DiffError::NonFinite { index });
    }
    if let Some(index) = (0..m).find(|&i| jac.row(i).iter().any(|v| !v.is_finite())) {
        return Err(DiffError::NonFinite { index });
    }
    Ok((DVector::from_vec(value), jac))
}

/// Gradient of a scalar-valued function.
pub fn gradient<F: DiffFunction>(f: &F, at: &[f64]) -> Result<DVector<f64>, DiffError> {
    if f.output_len() != 1 {
        return Err(DiffError::Arity { expected: 1, found: f.output_len() });
    }
    Ok(jacobian(f, at)?.row(0).transpose())
}

/// Central finite differences, for checking the above.
pub fn finite_difference_jacobian<F: DiffFunction>(f: &F, at: &[f64], step: f64) -> DMatrix<f64> {
    let (n, m) = (f.input_len(), f.output_len());
    let mut jac = DMatrix::zeros(m, n);
    let mut x = at.to_vec();
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for j in 0..n {
        x[j] = at[j] + step;
        f.eval(&x, &mut plus);
        x[j] = at[j] - step;
        f.eval(&x, &mut minus);
        x[j] = at[j];
        for i in 0..m {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Square;

    impl DiffFunction for Square {
        fn input_len(&self) -> usize {
            3
        }
        fn output_len(&self) -> usize {
            3
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            for (o, v) in out.iter_mut().zip(x) {
                *o = *v * *v;
            }
        }
    }

    struct Identity;

    impl DiffFunction for Identity {
        fn input_len(&self) -> usize {
            3
        }
        fn output_len(&self) -> usize {
            3
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            out.copy_from_slice(x);
        }
    }

    struct HalfNorm;

    impl DiffFunction for HalfNorm {
        fn input_len(&self) -> usize {
            4
        }
        fn output_len(&self) -> usize {
            1
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            let mut s = T::zero();
            for v in x {
                s += *v * *v;
            }
            out[0] = s * T::from_f64(0.5);
        }
    }

    struct Affine;

    impl DiffFunction for Affine {
        fn input_len(&self) -> usize {
            2
        }
        fn output_len(&self) -> usize {
            2
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            out[0] = T::from_f64(2.0) * x[0] - T::from_f64(3.0) * x[1] + T::from_f64(1.0);
            out[1] = x[1] * T::from_f64(-0.5);
        }
    }

    struct Reciprocal;

    impl DiffFunction for Reciprocal {
        fn input_len(&self) -> usize {
            1
        }
        fn output_len(&self) -> usize {
            1
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            out[0] = T::one() / x[0];
        }
    }

    #[test]
    fn identity_jacobian() {
        assert_eq!(jacobian(&Identity, &[0.3, -1.0, 2.0]).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn elementwise_square() {
        let j = jacobian(&Square, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(j, DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0, 6.0])));
    }

    #[test]
    fn half_norm_gradient_is_x() {
        let x = [1.0, -2.0, 0.5, 3.0];
        assert_eq!(gradient(&HalfNorm, &x).unwrap().as_slice(), &x);
    }

    #[test]
    fn affine_jacobian_is_constant() {
        let a = jacobian(&Affine, &[0.0, 0.0]).unwrap();
        let b = jacobian(&Affine, &[10.0, -4.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        assert_eq!(jacobian(&Identity, &[1.0]), Err(DiffError::Arity { expected: 3, found: 1 }));
        assert_eq!(jacobian(&Reciprocal, &[0.0]), Err(DiffError::NonFinite { index: 0 }));
        assert!(gradient(&Identity, &[1.0, 2.0, 3.0]).is_err());
    }
}

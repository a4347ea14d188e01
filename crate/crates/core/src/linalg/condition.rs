//! Extreme eigenvalues of SPD matrices by Lanczos with full reorthogonalization.
//!
//! `λ_max` comes from Lanczos on `A`, `λ_min` from the same iteration on `A^{-1}`
//! (inverse iteration accelerated in a Krylov space), using a solver for the
//! inner systems.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::SparseSym;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionEstimate {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub kappa: f64,
}

pub const MIN_LANCZOS_STEPS: usize = 50;
pub const MAX_LANCZOS_STEPS: usize = 200;

/// Largest eigenvalue of the symmetric operator `apply` by Lanczos from the
/// normalized all-ones vector.
pub fn lanczos_largest(n: usize, mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>>) -> Result<f64> {
    let steps = MAX_LANCZOS_STEPS.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let inv = 1.0 / (n as f64).sqrt();
    basis.push(vec![inv; n]);
    let mut estimate = f64::NAN;
    for j in 0..steps {
        let mut w = apply(&basis[j])?;
        let a: f64 = w.iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for v in &basis {
                let c: f64 = w.iter().zip(v).map(|(x, y)| x * y).sum();
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tri_max = tridiagonal_max(&alpha, &beta);
        let converged = j + 1 >= MIN_LANCZOS_STEPS.min(n) && (tri_max - estimate).abs() <= 1e-12 * tri_max.abs();
        estimate = tri_max;
        if converged || b <= 1e-14 * tri_max.abs() || j + 1 == steps {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok(estimate)
}

fn tridiagonal_max(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    SymmetricEigen::new(t).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `κ₂(A) = λ_max / λ_min`; `inverse` solves `A x = b`.
pub fn estimate_condition_2(
    a: &SparseSym,
    mut inverse: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<ConditionEstimate> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let lambda_max = lanczos_largest(n, |x| Ok(a.mul(x)))?;
    let inv_max = lanczos_largest(n, &mut inverse)?;
    if !(inv_max > 0.0) {
        return Err(Error::NotPositiveDefinite(format!("inverse iteration produced {inv_max:.3e}")));
    }
    let lambda_min = 1.0 / inv_max;
    Ok(ConditionEstimate { lambda_max, lambda_min, kappa: lambda_max / lambda_min })
}

/// Dense eigen-solve oracle.
pub fn dense_condition_2(a: &DMatrix<f64>) -> f64 {
    let e = SymmetricEigen::new(a.clone()).eigenvalues;
    let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

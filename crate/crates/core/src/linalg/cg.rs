use crate::error::{Error, Result};
use crate::linalg::SparseSym;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    Jacobi,
}

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Relative residual target `||Ax - b|| / ||b||`.
    pub tol: f64,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { tol: 1e-12, max_iter: 100_000, preconditioner: Preconditioner::Jacobi }
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned conjugate gradients. A search direction with non-positive
/// curvature aborts with [`Error::NotPositiveDefinite`].
pub fn solve_cg(a: &SparseSym, b: &[f64], opts: &CgOptions) -> Result<CgOutcome> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension(format!("rhs length {} for {n}x{n} matrix", b.len())));
    }
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(CgOutcome { x: vec![0.0; n], iterations: 0, residual: 0.0 });
    }
    let inv_diag: Vec<f64> = match opts.preconditioner {
        Preconditioner::None => vec![1.0; n],
        Preconditioner::Jacobi => {
            let d = a.diagonal();
            if let Some(i) = d.iter().position(|&v| v <= 0.0) {
                return Err(Error::NotPositiveDefinite(format!("non-positive diagonal entry at row {i}")));
            }
            d.iter().map(|v| 1.0 / v).collect()
        }
    };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    // outer restarts refresh the residual from scratch so the reported residual is the true one
    for _restart in 0..4 {
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        let mut rnorm = norm(&r);
        while rnorm > opts.tol * bnorm {
            if iterations >= opts.max_iter {
                return Err(Error::NoConvergence { iterations, residual: rnorm / bnorm });
            }
            a.matvec(&p, &mut ap);
            let curvature = dot(&p, &ap);
            if curvature <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!(
                    "search direction {iterations} has curvature {curvature:.3e}"
                )));
            }
            let alpha = rz / curvature;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                z[i] = inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
            rnorm = norm(&r);
            iterations += 1;
        }
        a.matvec(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        let true_res = norm(&r) / bnorm;
        if true_res <= opts.tol {
            return Ok(CgOutcome { x, iterations, residual: true_res });
        }
    }
    let residual = norm(&r) / bnorm;
    // the attainable accuracy is limited by roundoff; accept within a modest factor
    if residual <= 10.0 * opts.tol {
        Ok(CgOutcome { x, iterations, residual })
    } else {
        Err(Error::NoConvergence { iterations, residual })
    }
}

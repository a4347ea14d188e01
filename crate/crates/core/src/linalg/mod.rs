//! Sparse symmetric storage, SPD solvers and condition-number estimation.

mod cg;
mod condition;
mod direct;
mod sparse;

pub use cg::{solve_cg, CgOptions, CgOutcome, Preconditioner};
pub use condition::{dense_condition_2, estimate_condition_2, lanczos_largest, ConditionEstimate};
pub use direct::{solve_dense_cholesky, SparseCholesky, DENSE_LIMIT};
pub use sparse::{SparseSym, ELIMINATED};

use crate::error::Result;

/// Systems up to this size are factored directly under [`SolverKind::Auto`].
pub const AUTO_DIRECT_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Sparse Cholesky below [`AUTO_DIRECT_LIMIT`] unknowns, Jacobi-CG above.
    Auto,
    Cg,
    Direct,
}

impl std::str::FromStr for SolverKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverKind::Auto),
            "cg" => Ok(SolverKind::Cg),
            "direct" => Ok(SolverKind::Direct),
            other => Err(crate::Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: Vec<f64>,
    /// CG iterations; zero for direct solves.
    pub iterations: usize,
    pub residual: f64,
    pub direct: bool,
}

/// Solves the SPD system with the requested strategy and reports the true relative residual.
pub fn solve_spd(a: &SparseSym, b: &[f64], kind: SolverKind, cg: &CgOptions) -> Result<SolveReport> {
    let direct = match kind {
        SolverKind::Direct => true,
        SolverKind::Cg => false,
        SolverKind::Auto => a.dim() <= AUTO_DIRECT_LIMIT,
    };
    if direct {
        let chol = SparseCholesky::factor(a)?;
        let mut x = chol.solve(b);
        // one step of iterative refinement
        let r: Vec<f64> = b.iter().zip(a.mul(&x)).map(|(bi, ai)| bi - ai).collect();
        let dx = chol.solve(&r);
        x.iter_mut().zip(dx).for_each(|(xi, d)| *xi += d);
        let residual = relative_residual(a, &x, b);
        Ok(SolveReport { x, iterations: 0, residual, direct: true })
    } else {
        let out = solve_cg(a, b, cg)?;
        Ok(SolveReport { x: out.x, iterations: out.iterations, residual: out.residual, direct: false })
    }
}

pub fn relative_residual(a: &SparseSym, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bn == 0.0 { r } else { r / bn }
}

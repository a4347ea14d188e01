use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SparseSym;

pub const DENSE_LIMIT: usize = 5000;

/// Dense Cholesky solve; failure of the factorization means the matrix is not SPD.
pub fn solve_dense_cholesky(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    if a.nrows() > DENSE_LIMIT {
        return Err(Error::Dimension(format!("dense solve limited to {DENSE_LIMIT} unknowns, got {}", a.nrows())));
    }
    if a.nrows() != b.len() || !a.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix with rhs of length {}", a.nrows(), a.ncols(), b.len())));
    }
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("dense Cholesky factorization failed".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(b)).iter().copied().collect())
}

/// Sparse Cholesky factorization with fill-reducing ordering.
pub struct SparseCholesky {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
    n: usize,
}

impl std::fmt::Debug for SparseCholesky {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseCholesky").field("n", &self.n).finish()
    }
}

impl SparseCholesky {
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let n = a.dim();
        let triplets: Vec<Triplet<usize, usize, f64>> =
            a.lower_triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Dimension(format!("sparse matrix construction: {e:?}")))?;
        drop(triplets);
        let llt = mat
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::NotPositiveDefinite(format!("sparse Cholesky factorization failed: {e:?}")))?;
        Ok(SparseCholesky { llt, n })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = faer::Col::<f64>::from_fn(self.n, |i| b[i]);
        let x = self.llt.solve(&rhs);
        (0..self.n).map(|i| x[i]).collect()
    }
}

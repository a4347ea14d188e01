use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Marker for an eliminated (Dirichlet) degree of freedom in element DOF maps.
pub const ELIMINATED: usize = usize::MAX;

/// Symmetric matrix in compressed row storage; both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Zero matrix with the pattern induced by elements whose DOFs are listed
    /// `stride` at a time in `element_dofs` (entries equal to [`ELIMINATED`] are skipped).
    pub fn from_element_pattern(n: usize, element_dofs: &[usize], stride: usize) -> Self {
        assert!(stride > 0 && element_dofs.len() % stride == 0);
        let mut count = vec![0usize; n + 1];
        for &d in element_dofs.iter().filter(|&&d| d != ELIMINATED) {
            count[d + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut dof_elems = vec![0u32; count[n]];
        let mut fill = count.clone();
        for (e, chunk) in element_dofs.chunks(stride).enumerate() {
            for &d in chunk.iter().filter(|&&d| d != ELIMINATED) {
                dof_elems[fill[d]] = e as u32;
                fill[d] += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols: Vec<u32> = Vec::new();
        let mut scratch: Vec<u32> = Vec::new();
        for r in 0..n {
            scratch.clear();
            for &e in &dof_elems[count[r]..count[r + 1]] {
                let chunk = &element_dofs[e as usize * stride..(e as usize + 1) * stride];
                scratch.extend(chunk.iter().filter(|&&d| d != ELIMINATED).map(|&d| d as u32));
            }
            scratch.sort_unstable();
            scratch.dedup();
            cols.extend_from_slice(&scratch);
            row_ptr.push(cols.len());
        }
        let vals = vec![0.0; cols.len()];
        SparseSym { n, row_ptr, cols, vals }
    }

    /// Builds from `(row, col) -> value` entries; the map must be symmetric.
    pub fn from_accumulator(n: usize, entries: &BTreeMap<(usize, usize), f64>) -> Result<Self> {
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for (&(r, c), &v) in entries {
            if r >= n || c >= n {
                return Err(Error::Dimension(format!("entry ({r}, {c}) outside {n}x{n}")));
            }
            row_ptr[r + 1] += 1;
            cols.push(c as u32);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let m = SparseSym { n, row_ptr, cols, vals };
        if !m.is_structurally_symmetric() {
            return Err(Error::Dimension("accumulated entries are not structurally symmetric".into()));
        }
        Ok(m.finalize())
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let mut entries = BTreeMap::new();
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                if a[(r, c)] != 0.0 || a[(c, r)] != 0.0 {
                    entries.insert((r, c), a[(r, c)]);
                }
            }
        }
        Self::from_accumulator(a.nrows(), &entries).expect("dense input is structurally symmetric")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.cols[range.clone()], &self.vals[range])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&(c as u32)) {
            Ok(i) => vals[i],
            Err(_) => 0.0,
        }
    }

    /// Adds `v` to an entry of the pattern.
    pub fn add(&mut self, r: usize, c: usize, v: f64) -> Result<()> {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&(c as u32)) {
            Ok(i) => {
                self.vals[range.start + i] += v;
                Ok(())
            }
            Err(_) => Err(Error::DofMap(format!("entry ({r}, {c}) not in sparsity pattern"))),
        }
    }

    /// Scatters a dense element matrix; eliminated DOFs are skipped.
    pub fn add_element(&mut self, dofs: &[usize], local: &DMatrix<f64>) -> Result<()> {
        for (i, &r) in dofs.iter().enumerate() {
            if r == ELIMINATED {
                continue;
            }
            let start = self.row_ptr[r];
            let cols = &self.cols[start..self.row_ptr[r + 1]];
            for (j, &c) in dofs.iter().enumerate() {
                if c == ELIMINATED {
                    continue;
                }
                let pos = cols
                    .binary_search(&(c as u32))
                    .map_err(|_| Error::DofMap(format!("entry ({r}, {c}) not in sparsity pattern")))?;
                self.vals[start + pos] += local[(i, j)];
            }
        }
        Ok(())
    }

    /// Drops explicit zeros.
    pub fn finalize(self) -> Self {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        row_ptr.push(0);
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.n {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[i] != 0.0 {
                    cols.push(self.cols[i]);
                    vals.push(self.vals[i]);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSym { n: self.n, row_ptr, cols, vals }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[i] * x[self.cols[i] as usize];
            }
            *yr = s;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[(r, c as usize)] = v;
            }
        }
        out
    }

    fn is_structurally_symmetric(&self) -> bool {
        (0..self.n).all(|r| {
            let (cols, _) = self.row(r);
            cols.iter().all(|&c| self.row(c as usize).0.binary_search(&(r as u32)).is_ok())
        })
    }

    /// `max |a_ij - a_ji| / max |a_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c as usize, r)).abs());
                scale = scale.max(v.abs());
            }
        }
        if scale == 0.0 { 0.0 } else { worst / scale }
    }

    /// Lower-triangle `(row, col, value)` entries.
    pub fn lower_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).filter(move |(&c, _)| (c as usize) <= r).map(move |(&c, &v)| (r, c as usize, v))
        })
    }

    /// Matrix Market coordinate format, symmetric, lower triangle, 1-based.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        let entries: Vec<_> = self.lower_triplets().collect();
        writeln!(w, "{} {} {}", self.n, self.n, entries.len())?;
        for (r, c, v) in entries {
            writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_assembly_and_finalize() {
        // two 1D linear elements sharing dof 1; dof 2 eliminated
        let dofs = [0, 1, 1, ELIMINATED];
        let mut a = SparseSym::from_element_pattern(2, &dofs, 2);
        let k = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        a.add_element(&dofs[0..2], &k).unwrap();
        a.add_element(&dofs[2..4], &k).unwrap();
        assert_eq!(a.to_dense(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]));
        assert_eq!(a.symmetry_defect(), 0.0);
        assert!(a.add(0, 5, 1.0).is_err() || a.dim() == 2);
    }

    #[test]
    fn explicit_zeros_removed() {
        let dense = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let mut a = SparseSym::from_element_pattern(2, &[0, 1], 2);
        a.add_element(&[0, 1], &dense).unwrap();
        assert_eq!(a.nnz(), 4);
        let a = a.finalize();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.mul(&[1.0, 1.0]), vec![2.0, 3.0]);
    }

    #[test]
    fn matrix_market_layout() {
        let a = SparseSym::from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real symmetric");
        assert_eq!(lines[1], "2 2 3");
        assert!(lines[3].starts_with("2 1 -1.0"));
    }

    #[test]
    fn accumulator_rejects_asymmetric_pattern() {
        let mut e = BTreeMap::new();
        e.insert((0, 1), 1.0);
        assert!(SparseSym::from_accumulator(2, &e).is_err());
    }
}

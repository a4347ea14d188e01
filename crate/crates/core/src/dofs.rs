//! Global numbering of the virtual degrees of freedom.
//!
//! Layout: vertex values, then `k-1` nodal values per edge, then
//! `k(k-1)/2` interior values per triangle. Edge node `m` (1-based) of edge
//! `(a, b)` with `a < b` sits at `a + (m/k)(b - a)`.

use crate::error::{Error, Result};
use crate::linalg::ELIMINATED;
use crate::mesh::{Point, TriangleMesh};
use crate::poly::dim_pk;

#[derive(Debug, Clone)]
pub struct VirtualDofs {
    pub k: usize,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_triangles: usize,
    /// Per-element boundary node count, `3k`.
    pub boundary_per_element: usize,
    /// Per-element interior DOF count, `dim P_{k-2}`.
    pub interior_per_element: usize,
    /// `true` for DOFs on the boundary of the domain.
    pub dirichlet: Vec<bool>,
    /// Global DOF to unknown index, or [`ELIMINATED`].
    pub free_index: Vec<usize>,
    pub num_free: usize,
}

impl VirtualDofs {
    pub fn new(mesh: &TriangleMesh, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::UnsupportedDegree { degree: 0, min: 1, max: usize::MAX });
        }
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let nt = mesh.num_triangles();
        let interior = if k >= 2 { dim_pk(k - 2) } else { 0 };
        let total = nv + (k - 1) * ne + nt * interior;
        let mut dirichlet = vec![false; total];
        for (v, &b) in mesh.boundary_vertex.iter().enumerate() {
            dirichlet[v] = b;
        }
        for (e, edge) in mesh.edges.iter().enumerate() {
            if edge.is_boundary() {
                for m in 1..k {
                    dirichlet[nv + e * (k - 1) + (m - 1)] = true;
                }
            }
        }
        let mut free_index = vec![ELIMINATED; total];
        let mut num_free = 0;
        for (i, &d) in dirichlet.iter().enumerate() {
            if !d {
                free_index[i] = num_free;
                num_free += 1;
            }
        }
        Ok(VirtualDofs {
            k,
            num_vertices: nv,
            num_edges: ne,
            num_triangles: nt,
            boundary_per_element: 3 * k,
            interior_per_element: interior,
            dirichlet,
            free_index,
            num_free,
        })
    }

    pub fn total(&self) -> usize {
        self.dirichlet.len()
    }

    pub fn per_element(&self) -> usize {
        self.boundary_per_element + self.interior_per_element
    }

    pub fn edge_dof(&self, edge: usize, m: usize) -> usize {
        debug_assert!(m >= 1 && m < self.k);
        self.num_vertices + edge * (self.k - 1) + (m - 1)
    }

    pub fn interior_dof(&self, triangle: usize, i: usize) -> usize {
        self.num_vertices + self.num_edges * (self.k - 1) + triangle * self.interior_per_element + i
    }

    /// Global DOFs of triangle `t` in local order: vertices, then the `k-1`
    /// nodes of each local edge `v_j -> v_{j+1}` in that direction, then interiors.
    pub fn element_dofs(&self, mesh: &TriangleMesh, t: usize) -> Vec<usize> {
        let k = self.k;
        let tri = mesh.triangles[t];
        let mut out = Vec::with_capacity(self.per_element());
        out.extend_from_slice(&tri);
        for j in 0..3 {
            let e = mesh.triangle_edges[t][j];
            let forward = mesh.edges[e].vertices[0] == tri[j];
            for l in 1..k {
                let m = if forward { l } else { k - l };
                out.push(self.edge_dof(e, m));
            }
        }
        out.extend((0..self.interior_per_element).map(|i| self.interior_dof(t, i)));
        out
    }

    /// Element DOFs of every triangle renumbered to unknowns, flattened with stride [`Self::per_element`].
    pub fn free_element_dofs(&self, mesh: &TriangleMesh) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.per_element() * self.num_triangles);
        for t in 0..self.num_triangles {
            out.extend(self.element_dofs(mesh, t).into_iter().map(|d| self.free_index[d]));
        }
        out
    }

    /// Coordinates of every vertex and edge node, indexed by global DOF.
    pub fn nodal_points(&self, mesh: &TriangleMesh) -> Vec<Point> {
        let k = self.k;
        let mut pts = mesh.vertices.clone();
        for edge in &mesh.edges {
            let [a, b] = edge.vertices.map(|v| mesh.vertices[v]);
            for m in 1..k {
                let s = m as f64 / k as f64;
                pts.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        pts
    }

    /// Expands a vector of unknowns to all global DOFs, with zero on the boundary.
    pub fn expand(&self, free: &[f64]) -> Result<Vec<f64>> {
        if free.len() != self.num_free {
            return Err(Error::Dimension(format!("expected {} unknowns, got {}", self.num_free, free.len())));
        }
        Ok(self.free_index.iter().map(|&i| if i == ELIMINATED { 0.0 } else { free[i] }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_irregular8_mesh, gen_uniform_mesh, MacroSplit};
    use crate::hct::build_local_space;

    #[test]
    fn counts_and_mask() {
        for k in 1..=6 {
            for mesh in [gen_uniform_mesh(3).unwrap(), gen_irregular8_mesh(2).unwrap()] {
                let d = VirtualDofs::new(&mesh, k).unwrap();
                let (v, e, t) = (mesh.num_vertices(), mesh.num_edges(), mesh.num_triangles());
                assert_eq!(d.total(), v + (k - 1) * e + t * k * (k - 1) / 2);
                for tri in 0..t {
                    for i in 0..d.interior_per_element {
                        assert!(!d.dirichlet[d.interior_dof(tri, i)]);
                    }
                }
                let pts = d.nodal_points(&mesh);
                for (i, p) in pts.iter().enumerate() {
                    let on_boundary = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
                    assert_eq!(d.dirichlet[i], on_boundary, "dof {i} at {p:?}");
                }
            }
        }
    }

    #[test]
    fn local_nodes_agree_with_global_positions() {
        let mesh = gen_irregular8_mesh(2).unwrap();
        for k in 1..=5 {
            let d = VirtualDofs::new(&mesh, k).unwrap();
            let pts = d.nodal_points(&mesh);
            for t in 0..mesh.num_triangles() {
                let space = build_local_space(k, MacroSplit::from_points(t, mesh.triangle_points(t))).unwrap();
                let local = space.node_points();
                for (i, g) in d.element_dofs(&mesh, t).into_iter().take(3 * k).enumerate() {
                    let (p, q) = (local[i], pts[g]);
                    assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn expand_round_trip() {
        let mesh = gen_uniform_mesh(3).unwrap();
        let d = VirtualDofs::new(&mesh, 2).unwrap();
        let free: Vec<f64> = (0..d.num_free).map(|i| i as f64 + 1.0).collect();
        let full = d.expand(&free).unwrap();
        for (g, &i) in d.free_index.iter().enumerate() {
            if i == ELIMINATED {
                assert_eq!(full[g], 0.0);
            } else {
                assert_eq!(full[g], free[i]);
            }
        }
        assert!(d.expand(&free[1..]).is_err());
    }
}

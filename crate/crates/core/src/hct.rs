//! Continuous piecewise-`P_k` space on the barycentric split of a triangle and
//! the energy projection of a virtual function onto it.
//!
//! Macro node numbering (all counts for degree `k`):
//!
//! | range | nodes |
//! |---|---|
//! | `0..3` | parent vertices |
//! | `3..3k` | `k-1` uniform nodes per parent edge `v_j -> v_{j+1}` |
//! | `3k` | barycenter |
//! | `3k+1..3k+1+3(k-1)` | `k-1` nodes per internal edge `v_j -> x0` |
//! | rest | `(k-1)(k-2)/2` interior lattice nodes per sub-triangle |
//!
//! The first `3k` nodes are the boundary nodes; the remainder are bubbles.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{MacroSplit, Point};
use crate::poly::{dim_pk, ScaledMonomialBasis, SimplexLagrange};
use crate::problem::ExactField;
use crate::quadrature::{quad_rule_triangle, TriangleQuadRule};

pub const MIN_DEGREE: usize = 1;
pub const MAX_DEGREE: usize = 6;

pub fn check_degree(k: usize) -> Result<()> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&k) {
        return Err(Error::UnsupportedDegree { degree: k, min: MIN_DEGREE, max: MAX_DEGREE });
    }
    Ok(())
}

pub fn hct_dim(k: usize) -> usize {
    4 + 6 * (k - 1) + 3 * (k - 1) * (k.max(2) - 2) / 2
}

/// Degree-dependent data shared by every element: lattice-to-macro maps,
/// reference quadrature with tabulated basis values, reference stiffness parts.
#[derive(Debug)]
pub struct HctReference {
    pub k: usize,
    pub lagrange: SimplexLagrange,
    /// For sub-triangle `i`, the macro node of each lattice point.
    pub sub_to_macro: [Vec<usize>; 3],
    pub quad: TriangleQuadRule,
    /// `values[q][a]`: reference basis `a` at quadrature point `q`.
    values: Vec<Vec<f64>>,
    stiff_xx: DMatrix<f64>,
    stiff_xy: DMatrix<f64>,
    stiff_yy: DMatrix<f64>,
    mass: DMatrix<f64>,
}

impl HctReference {
    pub fn new(k: usize) -> Result<Arc<Self>> {
        check_degree(k)?;
        let lagrange = SimplexLagrange::new(k);
        let n_int = if k >= 3 { (k - 1) * (k - 2) / 2 } else { 0 };
        let interior_base = 3 * k + 1 + 3 * (k - 1);
        let sub_to_macro = [0usize, 1, 2].map(|i| {
            let next = (i + 1) % 3;
            let mut counter = 0;
            lagrange
                .lattice
                .iter()
                .map(|&[a0, a1, a2]| {
                    if a2 == 0 {
                        if a1 == 0 {
                            i
                        } else if a0 == 0 {
                            next
                        } else {
                            3 + i * (k - 1) + (a1 - 1)
                        }
                    } else if a2 == k {
                        3 * k
                    } else if a1 == 0 {
                        3 * k + 1 + i * (k - 1) + (a2 - 1)
                    } else if a0 == 0 {
                        3 * k + 1 + next * (k - 1) + (a2 - 1)
                    } else {
                        counter += 1;
                        interior_base + i * n_int + counter - 1
                    }
                })
                .collect::<Vec<_>>()
        });
        let quad = quad_rule_triangle(2 * k + 6)?;
        let n = lagrange.len();
        let mut values = Vec::with_capacity(quad.len());
        let mut stiff_xx = DMatrix::zeros(n, n);
        let mut stiff_xy = DMatrix::zeros(n, n);
        let mut stiff_yy = DMatrix::zeros(n, n);
        let mut mass = DMatrix::zeros(n, n);
        for (lambda, &w) in quad.points.iter().zip(&quad.weights) {
            let (v, g) = lagrange.eval(*lambda);
            // reference triangle area 1/2
            let w = 0.5 * w;
            for a in 0..n {
                for b in 0..n {
                    stiff_xx[(a, b)] += w * g[a][0] * g[b][0];
                    stiff_xy[(a, b)] += w * (g[a][0] * g[b][1] + g[a][1] * g[b][0]);
                    stiff_yy[(a, b)] += w * g[a][1] * g[b][1];
                    mass[(a, b)] += w * v[a] * v[b];
                }
            }
            values.push(v);
        }
        Ok(Arc::new(HctReference { k, lagrange, sub_to_macro, quad, values, stiff_xx, stiff_xy, stiff_yy, mass }))
    }

    pub fn dim(&self) -> usize {
        hct_dim(self.k)
    }

    pub fn num_boundary(&self) -> usize {
        3 * self.k
    }
}

/// Affine map of the reference triangle onto a sub-triangle.
#[derive(Debug, Clone, Copy)]
struct SubMap {
    origin: Point,
    jac: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
    det: f64,
}

impl SubMap {
    fn new(p: &[Point; 3]) -> Self {
        let jac = [[p[1][0] - p[0][0], p[2][0] - p[0][0]], [p[1][1] - p[0][1], p[2][1] - p[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        SubMap { origin: p[0], jac, inv, det }
    }

    fn to_physical(&self, xi: f64, eta: f64) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi + self.jac[0][1] * eta,
            self.origin[1] + self.jac[1][0] * xi + self.jac[1][1] * eta,
        ]
    }

    fn to_reference(&self, p: Point) -> (f64, f64) {
        let d = [p[0] - self.origin[0], p[1] - self.origin[1]];
        (self.inv[0][0] * d[0] + self.inv[0][1] * d[1], self.inv[1][0] * d[0] + self.inv[1][1] * d[1])
    }

    /// Physical gradient from a reference gradient: `J^{-T} g`.
    fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [self.inv[0][0] * g[0] + self.inv[1][0] * g[1], self.inv[0][1] * g[0] + self.inv[1][1] * g[1]]
    }
}

/// The local space `{ v in C(K) : v|K_i in P_k(K_i) }` on one macro-triangle.
#[derive(Debug, Clone)]
pub struct HctLocalSpace {
    pub reference: Arc<HctReference>,
    pub split: MacroSplit,
    maps: [SubMap; 3],
}

pub fn build_local_space(k: usize, split: MacroSplit) -> Result<HctLocalSpace> {
    Ok(HctLocalSpace::new(HctReference::new(k)?, split))
}

impl HctLocalSpace {
    pub fn new(reference: Arc<HctReference>, split: MacroSplit) -> Self {
        let maps = split.local_sub_triangles.map(|s| SubMap::new(&s));
        HctLocalSpace { reference, split, maps }
    }

    pub fn k(&self) -> usize {
        self.reference.k
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn num_boundary(&self) -> usize {
        self.reference.num_boundary()
    }

    pub fn num_bubbles(&self) -> usize {
        self.dim() - self.num_boundary()
    }

    pub fn boundary_index(&self) -> std::ops::Range<usize> {
        0..self.num_boundary()
    }

    pub fn bubble_index(&self) -> std::ops::Range<usize> {
        self.num_boundary()..self.dim()
    }

    pub fn node_points(&self) -> Vec<Point> {
        let r = &self.reference;
        let kf = r.k as f64;
        let mut pts = vec![[f64::NAN; 2]; self.dim()];
        for (i, map) in self.maps.iter().enumerate() {
            for (a, &node) in r.lagrange.lattice.iter().zip(&r.sub_to_macro[i]) {
                pts[node] = self.split.to_global(map.to_physical(a[1] as f64 / kf, a[2] as f64 / kf));
            }
        }
        pts
    }

    /// Index of the sub-triangle containing `p` (the one with the largest minimal barycentric coordinate).
    pub fn locate(&self, p: Point) -> usize {
        let q = self.split.to_local(p);
        let mut best = (0, f64::NEG_INFINITY);
        for (i, map) in self.maps.iter().enumerate() {
            let (xi, eta) = map.to_reference(q);
            let m = xi.min(eta).min(1.0 - xi - eta);
            if m > best.1 {
                best = (i, m);
            }
        }
        best.0
    }

    /// Values and gradients of every macro basis function at `p`.
    pub fn eval(&self, p: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        self.eval_on(self.locate(p), p)
    }

    /// Evaluation using the polynomial piece of sub-triangle `sub`.
    pub fn eval_on(&self, sub: usize, p: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        let r = &self.reference;
        let map = &self.maps[sub];
        let (xi, eta) = map.to_reference(self.split.to_local(p));
        let (v, g) = r.lagrange.eval([1.0 - xi - eta, xi, eta]);
        let mut vals = vec![0.0; self.dim()];
        let mut grads = vec![[0.0; 2]; self.dim()];
        for (a, &node) in r.sub_to_macro[sub].iter().enumerate() {
            vals[node] = v[a];
            grads[node] = map.grad(g[a]);
        }
        (vals, grads)
    }

    /// Quadrature over the macro-triangle: `(sub, physical point, weight, reference values)`.
    pub fn quadrature(&self) -> impl Iterator<Item = (usize, Point, f64, &[f64])> + '_ {
        self.local_quadrature().map(|(i, q, w, v)| (i, self.split.to_global(q), w, v))
    }

    /// As [`Self::quadrature`] with points in the element's local frame.
    pub fn local_quadrature(&self) -> impl Iterator<Item = (usize, Point, f64, &[f64])> + '_ {
        let r = &self.reference;
        (0..3).flat_map(move |i| {
            let map = &self.maps[i];
            let area = 0.5 * map.det.abs();
            r.quad.points.iter().zip(&r.quad.weights).zip(&r.values).map(move |((l, &w), v)| {
                (i, map.to_physical(l[1], l[2]), w * area, v.as_slice())
            })
        })
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.quadrature().map(|(_, p, w, _)| w * f(p)).sum()
    }

    /// `(grad phi_i, grad phi_j)_K` over all macro nodes.
    pub fn stiffness(&self) -> DMatrix<f64> {
        let r = &self.reference;
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (i, map) in self.maps.iter().enumerate() {
            let inv = map.inv;
            // C = J^{-1} J^{-T}
            let c00 = inv[0][0] * inv[0][0] + inv[0][1] * inv[0][1];
            let c01 = inv[0][0] * inv[1][0] + inv[0][1] * inv[1][1];
            let c11 = inv[1][0] * inv[1][0] + inv[1][1] * inv[1][1];
            let det = map.det.abs();
            let nodes = &r.sub_to_macro[i];
            for a in 0..nodes.len() {
                for b in 0..nodes.len() {
                    out[(nodes[a], nodes[b])] +=
                        det * (c00 * r.stiff_xx[(a, b)] + c01 * r.stiff_xy[(a, b)] + c11 * r.stiff_yy[(a, b)]);
                }
            }
        }
        out
    }

    pub fn mass(&self) -> DMatrix<f64> {
        let r = &self.reference;
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (i, map) in self.maps.iter().enumerate() {
            let det = map.det.abs();
            let nodes = &r.sub_to_macro[i];
            for a in 0..nodes.len() {
                for b in 0..nodes.len() {
                    out[(nodes[a], nodes[b])] += det * r.mass[(a, b)];
                }
            }
        }
        out
    }

    /// `(f, phi_i)_K` for every macro node.
    pub fn load(&self, f: impl Fn(Point) -> f64) -> DVector<f64> {
        let r = &self.reference;
        let mut out = DVector::zeros(self.dim());
        for (i, p, w, v) in self.quadrature() {
            let fw = w * f(p);
            for (a, &node) in r.sub_to_macro[i].iter().enumerate() {
                out[node] += fw * v[a];
            }
        }
        out
    }

    /// `(m_j, phi_i)_K` for every macro node `i` and monomial `m_j` of a basis
    /// expressed in the local frame.
    pub fn monomial_moments(&self, basis: &ScaledMonomialBasis) -> DMatrix<f64> {
        let r = &self.reference;
        let mut out = DMatrix::zeros(self.dim(), basis.len());
        for (i, p, w, v) in self.local_quadrature() {
            let m = basis.values(p);
            for (a, &node) in r.sub_to_macro[i].iter().enumerate() {
                for (j, mj) in m.iter().enumerate() {
                    out[(node, j)] += w * v[a] * mj;
                }
            }
        }
        out
    }

    /// Scaled monomial basis of `P_{k-2}` used for Laplacian data (origin barycenter,
    /// scale diameter), in the local frame.
    pub fn laplacian_basis(&self) -> Option<ScaledMonomialBasis> {
        (self.k() >= 2)
            .then(|| ScaledMonomialBasis::new(self.split.local_barycenter, self.split.diameter(), self.k() - 2))
    }

    /// Cholesky factor of the bubble block of the stiffness matrix.
    pub fn bubble_cholesky(&self, stiffness: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let nb = self.num_boundary();
        let nn = self.num_bubbles();
        let kbb = stiffness.view((nb, nb), (nn, nn)).into_owned();
        kbb.cholesky()
            .ok_or_else(|| Error::SingularLocal(format!("bubble block of element {}", self.split.parent)))
    }

    /// Solves for the bubble coefficients given the boundary coefficients and
    /// the bubble right side `(-Δv, w_b)_K`.
    fn solve_bubbles(&self, boundary_values: &[f64], bubble_rhs: DVector<f64>) -> Result<DVector<f64>> {
        let nb = self.num_boundary();
        let nn = self.num_bubbles();
        let k = self.stiffness();
        let chol = self.bubble_cholesky(&k)?;
        let cb = DVector::from_column_slice(boundary_values);
        let rhs = bubble_rhs - k.view((nb, 0), (nn, nb)) * &cb;
        let bubbles = chol.solve(&rhs);
        let mut out = DVector::zeros(self.dim());
        out.rows_mut(0, nb).copy_from(&cb);
        out.rows_mut(nb, nn).copy_from(&bubbles);
        Ok(out)
    }
}

/// A member of an [`HctLocalSpace`], stored by nodal coefficients.
#[derive(Debug, Clone)]
pub struct HctFunction<'a> {
    pub space: &'a HctLocalSpace,
    pub coefficients: DVector<f64>,
}

impl HctFunction<'_> {
    pub fn value(&self, p: Point) -> f64 {
        let (v, _) = self.space.eval(p);
        v.iter().zip(self.coefficients.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn gradient(&self, p: Point) -> [f64; 2] {
        let (_, g) = self.space.eval(p);
        g.iter().zip(self.coefficients.iter()).fold([0.0; 2], |acc, (gi, c)| [acc[0] + c * gi[0], acc[1] + c * gi[1]])
    }
}

/// Local stiffness over all macro nodes.
pub fn local_stiffness_hct(space: &HctLocalSpace) -> DMatrix<f64> {
    space.stiffness()
}

/// Energy projection of the virtual function with boundary trace given by its
/// nodal values and `-Δv = Σ laplacian[j] m_j` (scaled monomials of degree `k-2`).
pub fn project_hct<'a>(space: &'a HctLocalSpace, boundary_values: &[f64], laplacian: &[f64]) -> Result<HctFunction<'a>> {
    let k = space.k();
    if boundary_values.len() != space.num_boundary() {
        return Err(Error::Dimension(format!(
            "expected {} boundary values, got {}",
            space.num_boundary(),
            boundary_values.len()
        )));
    }
    let nl = if k >= 2 { dim_pk(k - 2) } else { 0 };
    if laplacian.len() != nl {
        return Err(Error::Dimension(format!("expected {nl} Laplacian coefficients, got {}", laplacian.len())));
    }
    let rhs = match space.laplacian_basis() {
        Some(basis) => {
            let moments = space.monomial_moments(&basis);
            let nb = space.num_boundary();
            moments.rows(nb, space.num_bubbles()) * DVector::from_column_slice(laplacian)
        }
        None => DVector::zeros(space.num_bubbles()),
    };
    let coefficients = space.solve_bubbles(boundary_values, rhs)?;
    Ok(HctFunction { space, coefficients })
}

/// Projection of an exact solution: boundary nodes take exact values, bubbles
/// solve the energy condition with right side `(-Δu, w_b)_K`.
pub fn interpolate_exact_solution<'a>(space: &'a HctLocalSpace, exact: &dyn ExactField) -> Result<HctFunction<'a>> {
    let nodes = space.node_points();
    let boundary: Vec<f64> = nodes[..space.num_boundary()].iter().map(|&p| exact.value(p)).collect();
    let load = space.load(|p| -exact.laplacian(p));
    let rhs = load.rows(space.num_boundary(), space.num_bubbles()).into_owned();
    let coefficients = space.solve_bubbles(&boundary, rhs)?;
    Ok(HctFunction { space, coefficients })
}

/// Coefficients of the `L^2(K)` projection of `g` onto the Laplacian basis of `space`.
pub fn project_onto_laplacian_basis(space: &HctLocalSpace, g: impl Fn(Point) -> f64) -> Result<Vec<f64>> {
    let Some(basis) = space.laplacian_basis() else {
        return Ok(Vec::new());
    };
    let n = basis.len();
    let mut gram = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (_, q, w, _) in space.local_quadrature() {
        let m = basis.values(q);
        let gp = g(space.split.to_global(q));
        for a in 0..n {
            rhs[a] += w * gp * m[a];
            for b in 0..n {
                gram[(a, b)] += w * m[a] * m[b];
            }
        }
    }
    let chol = gram.cholesky().ok_or_else(|| Error::SingularLocal("monomial Gram matrix".into()))?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}

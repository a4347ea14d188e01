//! Stabilizer-free virtual elements: `a_h(u, v) = Σ_K (∇Π∇u, ∇Π∇v)_K`.
//!
//! Interior DOFs parametrize `-Δv ∈ P_{k-2}`. The raw coefficients `q` of
//! `-Δv = h^{-2} Σ_m q_m m_m` (scaled monomials, origin at the barycenter, scale
//! `h` = diameter) are mapped through a per-element triangular factor that makes
//! the interior block of the local stiffness the identity. Without it the
//! interior block spans many orders of magnitude for large `k`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::assembly::{self, Discretization, LocalSystem, SolveOptions, Solution, SourceField, SourceTreatment};
use crate::error::{Error, Result};
use crate::hct::{project_onto_laplacian_basis, HctFunction, HctLocalSpace, HctReference};
use crate::mesh::{split_hct, Point, TriangleMesh};
use crate::problem::ExactField;

/// DOF-to-field map of one element.
#[derive(Debug, Clone)]
pub struct ElementBasis {
    /// HCT nodal coefficients of `Π∇v` per local DOF.
    pub projection: DMatrix<f64>,
    /// Upper triangular `R`: interior DOFs are `R q` for raw coefficients `q`.
    pub interior_map: DMatrix<f64>,
}

impl ElementBasis {
    pub fn new(space: &HctLocalSpace, stiffness: &DMatrix<f64>) -> Result<Self> {
        let mut projection = raw_projection(space, stiffness)?;
        let nb = space.num_boundary();
        let nq = projection.ncols() - nb;
        if nq == 0 {
            return Ok(ElementBasis { projection, interior_map: DMatrix::zeros(0, 0) });
        }
        let raw = projection.columns(nb, nq).into_owned();
        let block = raw.transpose() * stiffness * &raw;
        let block = (&block + block.transpose()) * 0.5;
        let l = block
            .cholesky()
            .ok_or_else(|| Error::SingularLocal(format!("interior block of element {}", space.split.parent)))?
            .unpack();
        // columns times R^{-1} with R = L^T, so the interior block becomes the identity
        let scaled = l
            .solve_lower_triangular(&raw.transpose())
            .ok_or_else(|| Error::SingularLocal(format!("interior factor of element {}", space.split.parent)))?
            .transpose();
        projection.columns_mut(nb, nq).copy_from(&scaled);
        Ok(ElementBasis { projection, interior_map: l.transpose() })
    }

    /// Local DOFs of the virtual interpolant: exact nodal values on the boundary,
    /// the `L^2` projection of `-Δu` as Laplacian data.
    pub fn interpolate(&self, space: &HctLocalSpace, exact: &dyn ExactField) -> Result<DVector<f64>> {
        let nodes = space.node_points();
        let h = space.split.diameter();
        let mut out: Vec<f64> = nodes[..space.num_boundary()].iter().map(|&p| exact.value(p)).collect();
        let lap = project_onto_laplacian_basis(space, |p| -exact.laplacian(p))?;
        if !lap.is_empty() {
            let q = DVector::from_iterator(lap.len(), lap.into_iter().map(|c| c * h * h));
            out.extend((&self.interior_map * q).iter());
        }
        Ok(DVector::from_vec(out))
    }
}

/// Matrix mapping local DOFs (boundary nodal values, then interior
/// coefficients) to HCT nodal coefficients of `Π∇v`.
pub fn local_projection_matrix(space: &HctLocalSpace) -> Result<DMatrix<f64>> {
    Ok(ElementBasis::new(space, &space.stiffness())?.projection)
}

/// Projection for the raw interior coefficients `q` of `-Δv = h^{-2} Σ q_m m_m`.
fn raw_projection(space: &HctLocalSpace, stiffness: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let nb = space.num_boundary();
    let nn = space.num_bubbles();
    let basis = space.laplacian_basis();
    let nq = basis.as_ref().map_or(0, |b| b.len());
    let chol = space.bubble_cholesky(stiffness)?;
    // bubble right sides: -K_{bB} for boundary DOFs, h^{-2} (m_m, w_b) for interior DOFs
    let mut rhs = DMatrix::zeros(nn, nb + nq);
    rhs.view_mut((0, 0), (nn, nb)).copy_from(&(-stiffness.view((nb, 0), (nn, nb))));
    if let Some(basis) = &basis {
        let h = space.split.diameter();
        let moments = space.monomial_moments(basis);
        rhs.view_mut((0, nb), (nn, nq)).copy_from(&(moments.view((nb, 0), (nn, nq)) / (h * h)));
    }
    let bubbles = chol.solve(&rhs);
    let mut p = DMatrix::zeros(nb + nn, nb + nq);
    p.view_mut((0, 0), (nb, nb)).fill_with_identity();
    p.view_mut((nb, 0), (nn, nb + nq)).copy_from(&bubbles);
    Ok(p)
}

/// Element stiffness `P^T K P` and load `P^T (f, φ_i)_K`.
pub fn local_element_matrices(
    space: &HctLocalSpace,
    projection: &DMatrix<f64>,
    f: impl Fn(Point) -> f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let k = space.stiffness();
    let a = projection.transpose() * (&k * projection);
    let a = (&a + a.transpose()) * 0.5;
    let load = projection.transpose() * space.load(f);
    (a, load)
}

/// Local DOFs of the virtual interpolant of `exact` (see [`ElementBasis::interpolate`]).
pub fn interpolate_dofs(space: &HctLocalSpace, exact: &dyn ExactField) -> Result<DVector<f64>> {
    ElementBasis::new(space, &space.stiffness())?.interpolate(space, exact)
}

/// The stabilizer-free HCT virtual element method of degree `k`.
#[derive(Debug, Clone)]
pub struct SfHct {
    reference: Arc<HctReference>,
    pub source: SourceTreatment,
}

impl SfHct {
    pub fn new(k: usize) -> Result<Self> {
        Ok(SfHct { reference: HctReference::new(k)?, source: SourceTreatment::default() })
    }

    pub fn with_source(mut self, source: SourceTreatment) -> Self {
        self.source = source;
        self
    }

    pub fn local_space(&self, mesh: &TriangleMesh, t: usize) -> Result<HctLocalSpace> {
        Ok(HctLocalSpace::new(self.reference.clone(), split_hct(mesh, t)?))
    }
}

impl Discretization for SfHct {
    fn degree(&self) -> usize {
        self.reference.k
    }

    fn name(&self) -> String {
        format!("sf-hct k={}", self.reference.k)
    }

    fn local(&self, mesh: &TriangleMesh, t: usize, problem: &dyn ExactField) -> Result<LocalSystem> {
        let space = self.local_space(mesh, t)?;
        let field_stiffness = space.stiffness();
        let basis = ElementBasis::new(&space, &field_stiffness)?;
        let field_mass = space.mass();
        let load = match self.source {
            SourceTreatment::Quadrature => basis.projection.transpose() * space.load(|p| problem.source(p)),
            SourceTreatment::Interpolated => {
                let fh = &basis.projection * basis.interpolate(&space, &SourceField(problem))?;
                basis.projection.transpose() * (&field_mass * fh)
            }
        };
        let constant = DVector::from_fn(basis.projection.ncols(), |i, _| if i < space.num_boundary() { 1.0 } else { 0.0 });
        Ok(LocalSystem {
            constant,
            field_mass,
            interpolant: basis.interpolate(&space, problem)?,
            projection: basis.projection,
            field_stiffness,
            stabilizer: None,
            load,
        })
    }
}

/// Discrete solution with the per-element projections `u_h = Π∇ũ`.
#[derive(Debug, Clone)]
pub struct SfSolution {
    pub method: SfHct,
    pub solution: Solution,
}

impl SfSolution {
    /// The projected solution on triangle `t`.
    pub fn element_field<'a>(&self, mesh: &TriangleMesh, space: &'a HctLocalSpace) -> Result<HctFunction<'a>> {
        let t = space.split.parent;
        let dofs = &self.solution.system.dofs;
        let d = DVector::from_iterator(
            dofs.per_element(),
            dofs.element_dofs(mesh, t).into_iter().map(|g| self.solution.values[g]),
        );
        let p = local_projection_matrix(space)?;
        Ok(HctFunction { space, coefficients: p * d })
    }
}

/// Solves `-Δu = f` with homogeneous Dirichlet data, `f` taken from `problem`.
pub fn solve_sf_vem(mesh: &TriangleMesh, k: usize, problem: &dyn ExactField, options: &SolveOptions) -> Result<SfSolution> {
    let method = SfHct::new(k)?;
    let solution = assembly::solve(&method, mesh, problem, options)?;
    if !(solution.report.residual <= options.cg.tol.max(1e-10)) {
        return Err(Error::NoConvergence { iterations: solution.report.iterations, residual: solution.report.residual });
    }
    Ok(SfSolution { method, solution })
}

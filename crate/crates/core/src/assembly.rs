//! Method-independent assembly, solution and error evaluation.
//!
//! Every method describes an element by a [`LocalSystem`]: a projection from
//! local DOFs onto a computable field basis, the field's stiffness and mass
//! matrices, an optional stabilizer, the load vector and the DOFs of the
//! reference interpolant of the exact solution.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::dofs::VirtualDofs;
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, CgOptions, SolveReport, SolverKind, SparseSym};
use crate::mesh::TriangleMesh;
use crate::problem::ExactField;

#[derive(Debug, Clone)]
pub struct LocalSystem {
    /// Field coefficients per local DOF (`field_dim x num_dofs`).
    pub projection: DMatrix<f64>,
    pub field_stiffness: DMatrix<f64>,
    pub field_mass: DMatrix<f64>,
    pub stabilizer: Option<DMatrix<f64>>,
    /// `(f, v_h)_K` for the projected local basis functions.
    pub load: DVector<f64>,
    /// Local DOFs of the reference interpolant of the exact solution.
    pub interpolant: DVector<f64>,
    /// Local DOFs of the constant function 1, the kernel of the stiffness.
    pub constant: DVector<f64>,
}

impl LocalSystem {
    /// `P^T K P + S`, symmetrized, with the constant mode projected out.
    ///
    /// Rounding in the projection leaves `A c` at a few hundred ulps, with the same
    /// sign on every element of a given shape; on structured meshes this adds up to
    /// a spurious source. `Q^T A Q` with `Q = I - c c^T / |c|^2` restores `A c = 0`
    /// to representation accuracy.
    pub fn stiffness(&self) -> DMatrix<f64> {
        let kp = &self.field_stiffness * &self.projection;
        let mut a = self.projection.transpose() * kp;
        if let Some(s) = &self.stabilizer {
            a += s;
        }
        let a = (&a + a.transpose()) * 0.5;
        let c = &self.constant;
        let cc = c.dot(c);
        if cc == 0.0 {
            return a;
        }
        let u = c / cc;
        let ac = &a * c;
        let cac = c.dot(&ac);
        let mut out = a;
        out -= &ac * u.transpose();
        out -= &u * ac.transpose();
        out += &u * u.transpose() * cac;
        out
    }

    /// Squared `L^2` norm and `H^1` seminorm of the projected field with DOFs `d`.
    pub fn field_norms_sq(&self, d: &DVector<f64>) -> (f64, f64) {
        let c = &self.projection * d;
        (c.dot(&(&self.field_mass * &c)), c.dot(&(&self.field_stiffness * &c)))
    }
}

/// How the source enters the load vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceTreatment {
    /// `(f, Π v_h)_K` with `f` integrated by quadrature.
    Quadrature,
    /// `(Π I_h f, Π v_h)_K`: the source is replaced by the projection of its
    /// own interpolant in the discrete space, as for the solution.
    #[default]
    Interpolated,
}

impl SourceTreatment {
    pub fn name(self) -> &'static str {
        match self {
            SourceTreatment::Quadrature => "quadrature",
            SourceTreatment::Interpolated => "interpolated",
        }
    }
}

impl std::str::FromStr for SourceTreatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quadrature" | "exact" => Ok(SourceTreatment::Quadrature),
            "interpolated" | "interpolant" => Ok(SourceTreatment::Interpolated),
            other => Err(Error::Config(format!("unknown source treatment '{other}' (quadrature, interpolated)"))),
        }
    }
}

/// `f` viewed as a field in its own right, so it can be interpolated like `u`.
pub struct SourceField<'a>(pub &'a dyn ExactField);

impl ExactField for SourceField<'_> {
    fn value(&self, p: crate::mesh::Point) -> f64 {
        self.0.source(p)
    }
    fn gradient(&self, _: crate::mesh::Point) -> [f64; 2] {
        unimplemented!("source gradients are never needed")
    }
    fn laplacian(&self, p: crate::mesh::Point) -> f64 {
        self.0.source_laplacian(p)
    }
}

/// A discretization of `-Δu = f` with homogeneous Dirichlet data on the shared DOF layout.
pub trait Discretization {
    fn degree(&self) -> usize;

    fn name(&self) -> String;

    /// Local data of triangle `t`; `problem` supplies `f = -Δu` and the exact solution.
    fn local(&self, mesh: &TriangleMesh, t: usize, problem: &dyn ExactField) -> Result<LocalSystem>;
}

/// Element stiffness and load with their global DOF map.
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub element: usize,
    pub dofs: Vec<usize>,
    pub stiffness: DMatrix<f64>,
    pub load: DVector<f64>,
}

pub fn element_matrices<D: Discretization + ?Sized>(
    method: &D,
    mesh: &TriangleMesh,
    dofs: &VirtualDofs,
    t: usize,
    problem: &dyn ExactField,
) -> Result<ElementMatrices> {
    let local = method.local(mesh, t, problem)?;
    let map = dofs.element_dofs(mesh, t);
    if local.projection.ncols() != map.len() || local.load.len() != map.len() {
        return Err(Error::DofMap(format!(
            "element {t}: {} local DOFs against a map of {}",
            local.projection.ncols(),
            map.len()
        )));
    }
    Ok(ElementMatrices { element: t, dofs: map, stiffness: local.stiffness(), load: local.load })
}

/// Global system on the unknowns (boundary DOFs eliminated by deletion).
#[derive(Debug, Clone)]
pub struct Assembled {
    pub dofs: VirtualDofs,
    pub matrix: SparseSym,
    pub rhs: Vec<f64>,
    /// Load over all global DOFs, boundary included.
    pub full_load: Vec<f64>,
}

pub fn assemble_global<D: Discretization + ?Sized>(
    method: &D,
    mesh: &TriangleMesh,
    problem: &dyn ExactField,
) -> Result<Assembled> {
    let dofs = VirtualDofs::new(mesh, method.degree())?;
    let stride = dofs.per_element();
    let free = dofs.free_element_dofs(mesh);
    let mut matrix = SparseSym::from_element_pattern(dofs.num_free, &free, stride);
    let mut rhs = vec![0.0; dofs.num_free];
    let mut full_load = vec![0.0; dofs.total()];
    for t in 0..mesh.num_triangles() {
        let em = element_matrices(method, mesh, &dofs, t, problem)?;
        let local_free = &free[t * stride..(t + 1) * stride];
        matrix.add_element(local_free, &em.stiffness)?;
        for (i, (&g, &f)) in em.dofs.iter().zip(local_free).enumerate() {
            full_load[g] += em.load[i];
            if f != crate::linalg::ELIMINATED {
                rhs[f] += em.load[i];
            }
        }
    }
    Ok(Assembled { dofs, matrix: matrix.finalize(), rhs, full_load })
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub solver: SolverKind,
    pub cg: CgOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { solver: SolverKind::Auto, cg: CgOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub system: Assembled,
    /// Values of all global DOFs (zero on the boundary).
    pub values: Vec<f64>,
    pub report: SolveReport,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
}

pub fn solve<D: Discretization + ?Sized>(
    method: &D,
    mesh: &TriangleMesh,
    problem: &dyn ExactField,
    options: &SolveOptions,
) -> Result<Solution> {
    let start = Instant::now();
    let system = assemble_global(method, mesh, problem)?;
    let assembly_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let report = if system.dofs.num_free == 0 {
        SolveReport { x: Vec::new(), iterations: 0, residual: 0.0, direct: true }
    } else {
        solve_spd(&system.matrix, &system.rhs, options.solver, &options.cg)?
    };
    let solve_seconds = start.elapsed().as_secs_f64();
    let values = system.dofs.expand(&report.x)?;
    Ok(Solution { system, values, report, assembly_seconds, solve_seconds })
}

/// `L^2` norm and `H^1` seminorm of `reference - u_h`, both taken as projected fields.
pub fn error_norms<D: Discretization + ?Sized>(
    method: &D,
    mesh: &TriangleMesh,
    problem: &dyn ExactField,
    values: &[f64],
) -> Result<(f64, f64)> {
    let dofs = VirtualDofs::new(mesh, method.degree())?;
    if values.len() != dofs.total() {
        return Err(Error::Dimension(format!(
            "solution has {} DOFs but the mesh carries {}",
            values.len(),
            dofs.total()
        )));
    }
    let (mut l2, mut h1) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let local = method.local(mesh, t, problem)?;
        let map = dofs.element_dofs(mesh, t);
        let diff = DVector::from_iterator(map.len(), map.iter().enumerate().map(|(i, &g)| local.interpolant[i] - values[g]));
        let (a, b) = local.field_norms_sq(&diff);
        l2 += a.max(0.0);
        h1 += b.max(0.0);
    }
    Ok((l2.sqrt(), h1.sqrt()))
}

/// Global DOFs of the reference interpolant (boundary DOFs included).
pub fn interpolant_dofs<D: Discretization + ?Sized>(
    method: &D,
    mesh: &TriangleMesh,
    problem: &dyn ExactField,
) -> Result<Vec<f64>> {
    let dofs = VirtualDofs::new(mesh, method.degree())?;
    let mut out = vec![0.0; dofs.total()];
    for t in 0..mesh.num_triangles() {
        let local = method.local(mesh, t, problem)?;
        for (i, g) in dofs.element_dofs(mesh, t).into_iter().enumerate() {
            out[g] = local.interpolant[i];
        }
    }
    Ok(out)
}

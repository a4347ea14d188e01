//! Property suites behind the `verify` subcommand. Each check is
//! deterministic (fixed seeds) and reports a one-line summary.

use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::assembly::assemble_global;
use crate::classic::{DofScaling, PolyElement};
use crate::error::Result;
use crate::hct::{build_local_space, project_hct, MAX_DEGREE};
use crate::linalg::{solve_cg, CgOptions, SparseCholesky, SparseSym};
use crate::mesh::{signed_area, MacroSplit, MeshFamily, Point, TriangleMesh};
use crate::poly::{monomial_exponents, HarmonicBasis};
use crate::problem::{Polynomial, ZeroField};
use crate::quadrature::{quad_rule_triangle, MAX_QUADRATURE_DEGREE};
use crate::sfvem::{interpolate_dofs, local_projection_matrix, SfHct};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> Outcome {
    match result {
        Ok((passed, detail)) => Outcome { name, passed, detail },
        Err(e) => Outcome { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Smallest interior angle in radians.
pub fn min_angle(v: &[Point; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let (a, b, c) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
            let (u, w) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
            (u[0] * w[1] - u[1] * w[0]).abs().atan2(u[0] * w[0] + u[1] * w[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// A random triangle with vertices in `[-1, 1]^2`, area at least `0.05` and
/// no angle below 10 degrees.
pub fn random_triangle(rng: &mut impl Rng) -> [Point; 3] {
    loop {
        let v: [Point; 3] = std::array::from_fn(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let a = signed_area(&v);
        if a.abs() > 0.05 && min_angle(&v) > 10f64.to_radians() {
            return if a > 0.0 { v } else { [v[0], v[2], v[1]] };
        }
    }
}

/// A uniformly random point of the triangle.
pub fn random_point_in(rng: &mut impl Rng, t: &[Point; 3]) -> Point {
    let (mut a, mut b): (f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
    if a + b > 1.0 {
        (a, b) = (1.0 - a, 1.0 - b);
    }
    [
        t[0][0] + a * (t[1][0] - t[0][0]) + b * (t[2][0] - t[0][0]),
        t[0][1] + a * (t[1][1] - t[0][1]) + b * (t[2][1] - t[0][1]),
    ]
}

/// P1 finite element stiffness by the cotangent formula, interior vertices only.
pub fn p1_fem_stiffness(mesh: &TriangleMesh) -> SparseSym {
    let mut index = vec![usize::MAX; mesh.num_vertices()];
    let mut n = 0;
    for (v, &b) in mesh.boundary_vertex.iter().enumerate() {
        if !b {
            index[v] = n;
            n += 1;
        }
    }
    let mut entries = std::collections::BTreeMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.triangle_points(t);
        let area = signed_area(&p);
        let grad = |i: usize| [p[(i + 1) % 3][1] - p[(i + 2) % 3][1], p[(i + 2) % 3][0] - p[(i + 1) % 3][0]];
        for i in 0..3 {
            for j in 0..3 {
                let (r, c) = (index[tri[i]], index[tri[j]]);
                if r == usize::MAX || c == usize::MAX {
                    continue;
                }
                let (gi, gj) = (grad(i), grad(j));
                *entries.entry((r, c)).or_insert(0.0) += (gi[0] * gj[0] + gi[1] * gj[1]) / (4.0 * area);
            }
        }
    }
    SparseSym::from_accumulator(n, &entries).expect("cotangent pattern is symmetric")
}

fn quadrature_oracle() -> Result<(bool, String)> {
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    let mut worst: f64 = 0.0;
    for degree in 0..=MAX_QUADRATURE_DEGREE {
        let rule = quad_rule_triangle(degree)?;
        for (a, b) in monomial_exponents(degree) {
            let exact = fact(a) * fact(b) / fact(a + b + 2);
            let approx: f64 =
                0.5 * rule.points.iter().zip(&rule.weights).map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32)).sum::<f64>();
            worst = worst.max((approx - exact).abs() / exact);
        }
    }
    Ok((worst <= 1e-12, format!("max relative error {worst:.2e} over degrees 0..={MAX_QUADRATURE_DEGREE}")))
}

/// `Π∇` reproduces `P_k`: 100 random polynomials on 50 random triangles per degree.
pub fn hct_polynomial_reproduction(polys: usize, triangles: usize) -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for k in 1..=MAX_DEGREE {
        let tris: Vec<[Point; 3]> = (0..triangles).map(|_| random_triangle(&mut rng)).collect();
        for (n, tri) in tris.iter().enumerate() {
            let space = build_local_space(k, MacroSplit::from_points(n, *tri))?;
            let p = local_projection_matrix(&space)?;
            let nodes = space.node_points();
            for _ in 0..polys.div_ceil(triangles).max(1) {
                let poly = Polynomial::random(k, &mut rng);
                let d = interpolate_dofs(&space, &poly)?;
                let c = &p * &d;
                let f = crate::hct::HctFunction { space: &space, coefficients: c };
                let sup = nodes.iter().map(|&x| poly.value_at(x).abs()).fold(0.0, f64::max);
                for _ in 0..5 {
                    let x = random_point_in(&mut rng, tri);
                    worst = worst.max((f.value(x) - poly.value_at(x)).abs() / sup);
                }
            }
        }
    }
    Ok((worst <= 1e-9, format!("max relative deviation {worst:.2e}")))
}

fn projection_of_polynomial_data() -> Result<(bool, String)> {
    // project_hct with exact trace and exact -Δp also reproduces p
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for k in 1..=MAX_DEGREE {
        let tri = random_triangle(&mut rng);
        let space = build_local_space(k, MacroSplit::from_points(0, tri))?;
        let poly = Polynomial::random(k, &mut rng);
        let nodes = space.node_points();
        let trace: Vec<f64> = nodes[..space.num_boundary()].iter().map(|&x| poly.value_at(x)).collect();
        let lap = crate::hct::project_onto_laplacian_basis(&space, |x| -poly.laplacian_at(x))?;
        let f = project_hct(&space, &trace, &lap)?;
        let x = random_point_in(&mut rng, &tri);
        worst = worst.max((f.value(x) - poly.value_at(x)).abs());
    }
    Ok((worst <= 1e-9, format!("max deviation {worst:.2e}")))
}

fn harmonic_laplacian() -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(3);
    let basis = HarmonicBasis::new(4, &[5, 6, 7, 8, 9, 10], [0.3, 0.4], 0.7)?;
    let mut worst: f64 = 0.0;
    for idx in 0..basis.len() {
        let terms = basis.monomial_coefficients(idx);
        for _ in 0..100 {
            let x: [f64; 2] = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
            let (mut lap, mut mag) = (0.0, 0.0);
            for &(j, l, c) in &terms {
                let mut add = |v: f64| {
                    lap += v;
                    mag += v.abs();
                };
                if j >= 2 {
                    add(c * (j * (j - 1)) as f64 * x[0].powi(j as i32 - 2) * x[1].powi(l as i32));
                }
                if l >= 2 {
                    add(c * (l * (l - 1)) as f64 * x[0].powi(j as i32) * x[1].powi(l as i32 - 2));
                }
            }
            worst = worst.max(lap.abs() / (1.0 + mag));
        }
    }
    Ok((worst <= 1e-10, format!("max scaled Laplacian {worst:.2e}")))
}

/// k = 1 stiffness equals the cotangent P1 stiffness, both families, levels `1..=max_level`.
pub fn p1_equivalence(max_level: usize) -> Result<(bool, String)> {
    let method = SfHct::new(1)?;
    let mut worst: f64 = 0.0;
    for family in [MeshFamily::Uniform, MeshFamily::Irregular8] {
        for level in 1..=max_level {
            let mesh = family.generate(level)?;
            let a = assemble_global(&method, &mesh, &ZeroField)?.matrix;
            let b = p1_fem_stiffness(&mesh);
            if a.dim() != b.dim() {
                return Ok((false, format!("{} level {level}: dimensions {} vs {}", family.name(), a.dim(), b.dim())));
            }
            for r in 0..a.dim() {
                let (cols, vals) = b.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    worst = worst.max((a.get(r, c as usize) - v).abs());
                }
                let (cols, vals) = a.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    worst = worst.max((b.get(r, c as usize) - v).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-12, format!("max entry difference {worst:.2e}")))
}

/// Global SF matrices are SPD: Cholesky on `dense_levels`, CG without
/// negative curvature on `cg_levels`, degrees 1..=6, both families.
pub fn sf_coercivity(dense_levels: std::ops::RangeInclusive<usize>, cg_levels: std::ops::RangeInclusive<usize>) -> Result<(bool, String)> {
    let mut checked = 0;
    for k in 1..=MAX_DEGREE {
        let method = SfHct::new(k)?;
        for family in [MeshFamily::Uniform, MeshFamily::Irregular8] {
            for level in dense_levels.clone().chain(cg_levels.clone()) {
                let mesh = family.generate(level)?;
                let a = assemble_global(&method, &mesh, &ZeroField)?.matrix;
                if a.dim() == 0 {
                    continue;
                }
                let ok = if dense_levels.contains(&level) {
                    a.to_dense().cholesky().is_some()
                } else {
                    let b = vec![1.0; a.dim()];
                    match solve_cg(&a, &b, &CgOptions { tol: 1e-8, ..CgOptions::default() }) {
                        Ok(_) => true,
                        Err(crate::Error::NotPositiveDefinite(_)) => false,
                        Err(e) => return Err(e),
                    }
                };
                if !ok {
                    return Ok((false, format!("k={k} {} level {level} is not positive definite", family.name())));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} systems positive definite")))
}

fn classic_reproduction() -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    let mut stab: f64 = 0.0;
    for k in 1..=crate::classic::CLASSIC_MAX_DEGREE {
        for _ in 0..100 {
            let tri = random_triangle(&mut rng);
            let el = PolyElement::new(tri, k, &[], DofScaling::Standard)?;
            let poly = Polynomial::random(k, &mut rng);
            let d = el.dofs_of(|x| poly.value_at(x))?;
            let c = el.project(&d);
            let scale: f64 = poly.terms.iter().map(|t| t.2.abs()).sum();
            let x = random_point_in(&mut rng, &tri);
            worst = worst.max((el.field_value(&c, x) - poly.value_at(x)).abs() / scale);
            // the stabilizer kernel is the range of the DOF map, so test (I - DΠ)d directly
            let residual = &d - &el.dof_matrix * &c;
            stab = stab.max(residual.amax() / d.amax());
        }
    }
    Ok((worst <= 1e-10 && stab <= 1e-10, format!("projection deviation {worst:.2e}, stabilizer on polynomials {stab:.2e}")))
}

fn cholesky_matches_cg() -> Result<(bool, String)> {
    let mesh = MeshFamily::Uniform.generate(3)?;
    let sys = assemble_global(&SfHct::new(1)?, &mesh, &crate::problem::ManufacturedSolution::sine())?;
    let dense = crate::linalg::solve_dense_cholesky(&sys.matrix.to_dense(), &sys.rhs)?;
    let cg = solve_cg(&sys.matrix, &sys.rhs, &CgOptions::default())?.x;
    let sparse = SparseCholesky::factor(&sys.matrix)?.solve(&sys.rhs);
    let d1 = DVector::from_vec(dense.clone()) - DVector::from_vec(cg);
    let d2 = DVector::from_vec(dense) - DVector::from_vec(sparse);
    let worst = d1.amax().max(d2.amax());
    Ok((worst <= 1e-10, format!("max difference {worst:.2e}")))
}

pub fn run_all(full: bool) -> Vec<Outcome> {
    let mut out = vec![
        outcome("quadrature-vs-factorial-oracle", quadrature_oracle()),
        outcome("hct-polynomial-reproduction", hct_polynomial_reproduction(100, 50)),
        outcome("hct-projection-of-polynomial-data", projection_of_polynomial_data()),
        outcome("harmonic-laplacian-vanishes", harmonic_laplacian()),
        outcome("p1-stiffness-equivalence", p1_equivalence(4)),
        outcome("classic-projection-and-stabilizer", classic_reproduction()),
        outcome("direct-vs-iterative-solvers", cholesky_matches_cg()),
    ];
    let coercivity = if full { sf_coercivity(1..=3, 4..=6) } else { sf_coercivity(1..=3, 4..=4) };
    out.push(outcome("sf-global-coercivity", coercivity));
    out
}

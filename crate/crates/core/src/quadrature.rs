//! Gauss rules on `[0, 1]` and collapsed (Duffy) tensor rules on triangles.

use crate::error::{Error, Result};
use crate::mesh::Point;

pub const MAX_QUADRATURE_DEGREE: usize = 30;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss rule on `[0, 1]`; weights sum to 1.
#[derive(Debug, Clone)]
pub struct EdgeQuadRule {
    pub degree: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn quad_rule_edge(degree: usize) -> Result<EdgeQuadRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(EdgeQuadRule {
        degree,
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&wi| 0.5 * wi).collect(),
    })
}

/// Rule on a triangle in barycentric coordinates. Weights sum to 1 and are
/// multiplied by the physical area at use.
#[derive(Debug, Clone)]
pub struct TriangleQuadRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleQuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points and area-scaled weights on the triangle `p`.
    pub fn mapped(&self, p: &[Point; 3]) -> impl Iterator<Item = (Point, f64)> + '_ {
        let p = *p;
        let area = crate::mesh::signed_area(&p).abs();
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            (
                [
                    l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                    l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
                ],
                w * area,
            )
        })
    }

    pub fn integrate(&self, p: &[Point; 3], f: impl Fn(Point) -> f64) -> f64 {
        self.mapped(p).map(|(x, w)| w * f(x)).sum()
    }
}

/// Collapsed tensor-product Gauss rule exact for polynomials of total degree `degree`.
pub fn quad_rule_triangle(degree: usize) -> Result<TriangleQuadRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    let n = (degree + 2).div_ceil(2);
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        // s in [0,1] carries the (1 - s) Jacobian of the collapse
        let s = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let t = 0.5 * (x[j] + 1.0);
            let (xi, eta) = (s, t * (1.0 - s));
            points.push([1.0 - xi - eta, xi, eta]);
            // reference area 1/2 normalized to 1
            weights.push(0.25 * w[i] * w[j] * (1.0 - s) * 2.0);
        }
    }
    Ok(TriangleQuadRule { degree, points, weights })
}

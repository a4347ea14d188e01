//! Exact fields: the manufactured sine solution and general bivariate polynomials.

use std::f64::consts::PI;

use crate::mesh::Point;

/// A smooth field with closed-form gradient and Laplacian.
pub trait ExactField: Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
    fn laplacian(&self, p: Point) -> f64;

    /// Right side of `-Δu = f`.
    fn source(&self, p: Point) -> f64 {
        -self.laplacian(p)
    }

    /// `Δf`. The default is a fourth-order central difference of [`ExactField::source`].
    fn source_laplacian(&self, p: Point) -> f64 {
        let h = 1e-3;
        let f0 = self.source(p);
        let mut s = 0.0;
        for d in [[1.0, 0.0], [0.0, 1.0]] {
            let at = |t: f64| self.source([p[0] + t * d[0], p[1] + t * d[1]]);
            s += (-at(2.0 * h) + 16.0 * at(h) - 30.0 * f0 + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h);
        }
        s
    }
}

/// `u = sin(πx) sin(πy)` on the unit square, `f = 2π² sin(πx) sin(πy)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ManufacturedSolution;

impl ManufacturedSolution {
    pub fn sine() -> Self {
        ManufacturedSolution
    }
}

impl ExactField for ManufacturedSolution {
    fn value(&self, p: Point) -> f64 {
        (PI * p[0]).sin() * (PI * p[1]).sin()
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let (sx, cx) = (PI * p[0]).sin_cos();
        let (sy, cy) = (PI * p[1]).sin_cos();
        [PI * cx * sy, PI * sx * cy]
    }

    fn laplacian(&self, p: Point) -> f64 {
        -2.0 * PI * PI * self.value(p)
    }

    fn source_laplacian(&self, p: Point) -> f64 {
        -4.0 * PI.powi(4) * self.value(p)
    }
}

/// Constant-zero source (homogeneous problem).
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl ExactField for ZeroField {
    fn value(&self, _: Point) -> f64 {
        0.0
    }
    fn gradient(&self, _: Point) -> [f64; 2] {
        [0.0; 2]
    }
    fn laplacian(&self, _: Point) -> f64 {
        0.0
    }
    fn source_laplacian(&self, _: Point) -> f64 {
        0.0
    }
}

/// `Σ c_{jl} x^j y^l` in global coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(usize, usize, f64)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { terms: vec![(0, 0, c)] }
    }

    /// Random coefficients in `[-1, 1]` for every monomial of total degree `<= degree`.
    pub fn random(degree: usize, rng: &mut impl rand::Rng) -> Self {
        let terms = crate::poly::monomial_exponents(degree)
            .into_iter()
            .map(|(j, l)| (j, l, rng.random_range(-1.0..1.0)))
            .collect();
        Polynomial { terms }
    }

    pub fn value_at(&self, p: Point) -> f64 {
        self.terms.iter().map(|&(j, l, c)| c * p[0].powi(j as i32) * p[1].powi(l as i32)).sum()
    }

    pub fn gradient_at(&self, p: Point) -> [f64; 2] {
        self.terms.iter().fold([0.0; 2], |acc, &(j, l, c)| {
            let dx = if j > 0 { c * j as f64 * p[0].powi(j as i32 - 1) * p[1].powi(l as i32) } else { 0.0 };
            let dy = if l > 0 { c * l as f64 * p[0].powi(j as i32) * p[1].powi(l as i32 - 1) } else { 0.0 };
            [acc[0] + dx, acc[1] + dy]
        })
    }

    /// The polynomial `Δp`.
    pub fn laplacian_polynomial(&self) -> Polynomial {
        let mut terms = Vec::new();
        for &(j, l, c) in &self.terms {
            if j >= 2 {
                terms.push((j - 2, l, c * (j * (j - 1)) as f64));
            }
            if l >= 2 {
                terms.push((j, l - 2, c * (l * (l - 1)) as f64));
            }
        }
        Polynomial { terms }
    }

    pub fn laplacian_at(&self, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(j, l, c)| {
                let mut s = 0.0;
                if j >= 2 {
                    s += c * (j * (j - 1)) as f64 * p[0].powi(j as i32 - 2) * p[1].powi(l as i32);
                }
                if l >= 2 {
                    s += c * (l * (l - 1)) as f64 * p[0].powi(j as i32) * p[1].powi(l as i32 - 2);
                }
                s
            })
            .sum()
    }
}

impl ExactField for Polynomial {
    fn value(&self, p: Point) -> f64 {
        self.value_at(p)
    }
    fn gradient(&self, p: Point) -> [f64; 2] {
        self.gradient_at(p)
    }
    fn laplacian(&self, p: Point) -> f64 {
        self.laplacian_at(p)
    }
    fn source_laplacian(&self, p: Point) -> f64 {
        -self.laplacian_polynomial().laplacian_at(p)
    }
}

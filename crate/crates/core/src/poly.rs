//! Polynomial bases: scaled monomials, harmonic polynomials, uniform-node
//! Lagrange bases on segments and on the reference triangle.

use crate::error::{Error, Result};
use crate::mesh::Point;

pub fn dim_pk(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Exponent pairs `(j, l)` with `j + l <= d`, graded, `x`-powers descending within a degree.
pub fn monomial_exponents(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim_pk(d));
    for deg in 0..=d {
        for l in 0..=deg {
            out.push((deg - l, l));
        }
    }
    out
}

/// `((x - x0) / s)^j ((y - y0) / s)^l` for all `j + l <= degree`.
#[derive(Debug, Clone)]
pub struct ScaledMonomialBasis {
    pub origin: Point,
    pub scale: f64,
    pub degree: usize,
    pub exponents: Vec<(usize, usize)>,
}

impl ScaledMonomialBasis {
    pub fn new(origin: Point, scale: f64, degree: usize) -> Self {
        ScaledMonomialBasis { origin, scale, degree, exponents: monomial_exponents(degree) }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    fn powers(&self, p: Point) -> (Vec<f64>, Vec<f64>) {
        let sx = (p[0] - self.origin[0]) / self.scale;
        let sy = (p[1] - self.origin[1]) / self.scale;
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * sx;
            py[i] = py[i - 1] * sy;
        }
        (px, py)
    }

    pub fn values(&self, p: Point) -> Vec<f64> {
        let (px, py) = self.powers(p);
        self.exponents.iter().map(|&(j, l)| px[j] * py[l]).collect()
    }

    /// Values and gradients `(value, [d/dx, d/dy])` at `p`.
    pub fn eval(&self, p: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        let (px, py) = self.powers(p);
        let inv = 1.0 / self.scale;
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for &(j, l) in &self.exponents {
            vals.push(px[j] * py[l]);
            let dx = if j > 0 { j as f64 * px[j - 1] * py[l] * inv } else { 0.0 };
            let dy = if l > 0 { l as f64 * px[j] * py[l - 1] * inv } else { 0.0 };
            grads.push([dx, dy]);
        }
        (vals, grads)
    }

    /// Laplacian of basis function `idx` as coefficients over the same basis family of degree `degree - 2`.
    pub fn laplacian_coefficients(&self, idx: usize) -> Vec<(usize, f64)> {
        let (j, l) = self.exponents[idx];
        let s2 = self.scale * self.scale;
        let mut out = Vec::new();
        if j >= 2 {
            out.push((monomial_index(j - 2, l), (j * (j - 1)) as f64 / s2));
        }
        if l >= 2 {
            out.push((monomial_index(j, l - 2), (l * (l - 1)) as f64 / s2));
        }
        out
    }
}

/// Position of `(j, l)` in [`monomial_exponents`].
pub fn monomial_index(j: usize, l: usize) -> usize {
    let deg = j + l;
    deg * (deg + 1) / 2 + l
}

/// `Re` and `Im` of `((x - x0) + i (y - y0))^j / s^j` for each listed degree.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub origin: Point,
    pub scale: f64,
    pub degrees: Vec<usize>,
}

impl HarmonicBasis {
    pub fn new(k: usize, degrees: &[usize], origin: Point, scale: f64) -> Result<Self> {
        if let Some(&d) = degrees.iter().find(|&&d| d <= k) {
            return Err(Error::HarmonicDegree { degree: d, k });
        }
        Ok(HarmonicBasis { origin, scale, degrees: degrees.to_vec() })
    }

    pub fn len(&self) -> usize {
        2 * self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Values and gradients, ordered `Re z^j, Im z^j` per degree.
    pub fn eval(&self, p: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        let zr = (p[0] - self.origin[0]) / self.scale;
        let zi = (p[1] - self.origin[1]) / self.scale;
        let inv = 1.0 / self.scale;
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for &j in &self.degrees {
            let (pr, pi) = cpow(zr, zi, j);
            let (qr, qi) = cpow(zr, zi, j - 1);
            let (dr, di) = (j as f64 * qr * inv, j as f64 * qi * inv);
            vals.push(pr);
            vals.push(pi);
            // d/dx z^j = j z^{j-1}, d/dy z^j = i j z^{j-1}
            grads.push([dr, -di]);
            grads.push([di, dr]);
        }
        (vals, grads)
    }

    /// Monomial expansion of function `idx` in unscaled local variables, as `(j, l, coefficient)`.
    pub fn monomial_coefficients(&self, idx: usize) -> Vec<(usize, usize, f64)> {
        let j = self.degrees[idx / 2];
        let imaginary = idx % 2 == 1;
        let s = self.scale.powi(j as i32);
        let mut out = Vec::new();
        // (x + i y)^j = sum_m C(j, m) x^{j-m} i^m y^m
        let mut binom = 1.0;
        for m in 0..=j {
            if m > 0 {
                binom = binom * (j - m + 1) as f64 / m as f64;
            }
            let coef = match (m % 4, imaginary) {
                (0, false) => 1.0,
                (2, false) => -1.0,
                (1, true) => 1.0,
                (3, true) => -1.0,
                _ => 0.0,
            };
            if coef != 0.0 {
                out.push((j - m, m, coef * binom / s));
            }
        }
        out
    }
}

fn cpow(re: f64, im: f64, n: usize) -> (f64, f64) {
    let (mut r, mut i) = (1.0, 0.0);
    for _ in 0..n {
        let nr = r * re - i * im;
        i = r * im + i * re;
        r = nr;
    }
    (r, i)
}

/// Lagrange basis of degree `k` on the uniform nodes `t = m / k` of `[0, 1]`.
pub fn lagrange_1d_uniform(k: usize, t: f64) -> Vec<f64> {
    (0..=k)
        .map(|m| {
            let tm = m as f64 / k as f64;
            (0..=k)
                .filter(|&n| n != m)
                .map(|n| {
                    let tn = n as f64 / k as f64;
                    (t - tn) / (tm - tn)
                })
                .product()
        })
        .collect()
}

/// Nodal Lagrange basis of degree `k` on the uniform barycentric lattice of the
/// reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone)]
pub struct SimplexLagrange {
    pub k: usize,
    /// Lattice multi-indices `(a0, a1, a2)` summing to `k`.
    pub lattice: Vec<[usize; 3]>,
}

impl SimplexLagrange {
    pub fn new(k: usize) -> Self {
        let mut lattice = Vec::with_capacity(dim_pk(k));
        for a2 in 0..=k {
            for a1 in 0..=(k - a2) {
                lattice.push([k - a1 - a2, a1, a2]);
            }
        }
        SimplexLagrange { k, lattice }
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Values and gradients with respect to reference coordinates `(xi, eta)`.
    pub fn eval(&self, lambda: [f64; 3]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let k = self.k;
        let kf = k as f64;
        // per coordinate: table[m][a] = prod_{j<a} (k lambda_m - j)/(j+1) and its lambda-derivative
        let mut val = [[0.0; 8]; 3];
        let mut der = [[0.0; 8]; 3];
        assert!(k <= 7);
        for m in 0..3 {
            val[m][0] = 1.0;
            der[m][0] = 0.0;
            for a in 1..=k {
                let factor = (kf * lambda[m] - (a - 1) as f64) / a as f64;
                val[m][a] = val[m][a - 1] * factor;
                der[m][a] = der[m][a - 1] * factor + val[m][a - 1] * kf / a as f64;
            }
        }
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for a in &self.lattice {
            let v0 = val[0][a[0]];
            let v1 = val[1][a[1]];
            let v2 = val[2][a[2]];
            vals.push(v0 * v1 * v2);
            let d0 = der[0][a[0]] * v1 * v2;
            let d1 = v0 * der[1][a[1]] * v2;
            let d2 = v0 * v1 * der[2][a[2]];
            // lambda0 = 1 - xi - eta, lambda1 = xi, lambda2 = eta
            grads.push([d1 - d0, d2 - d0]);
        }
        (vals, grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn monomials_at_origin_and_gradient() {
        let b = ScaledMonomialBasis::new([0.3, 0.2], 0.5, 3);
        assert_eq!(b.len(), 10);
        let (v, g) = b.eval([0.3, 0.2]);
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&x| x == 0.0));
        assert_eq!(b.exponents[1], (1, 0));
        let (_, g2) = b.eval([0.9, -0.4]);
        assert_eq!(g[1], [2.0, 0.0]);
        assert_eq!(g2[1], [2.0, 0.0]);
    }

    #[test]
    fn monomial_gradients_match_finite_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let b = ScaledMonomialBasis::new([0.1, 0.4], 0.7, 5);
        let h = 1e-6;
        for _ in 0..20 {
            let p = [rng.random_range(-0.5..1.0), rng.random_range(-0.5..1.0)];
            let (_, g) = b.eval(p);
            let vp = b.values([p[0] + h, p[1]]);
            let vm = b.values([p[0] - h, p[1]]);
            let wp = b.values([p[0], p[1] + h]);
            let wm = b.values([p[0], p[1] - h]);
            for i in 0..b.len() {
                let fdx = (vp[i] - vm[i]) / (2.0 * h);
                let fdy = (wp[i] - wm[i]) / (2.0 * h);
                assert!((fdx - g[i][0]).abs() < 1e-6 * (1.0 + fdx.abs()));
                assert!((fdy - g[i][1]).abs() < 1e-6 * (1.0 + fdy.abs()));
            }
        }
    }

    #[test]
    fn monomial_index_matches_ordering() {
        for (i, &(j, l)) in monomial_exponents(6).iter().enumerate() {
            assert_eq!(monomial_index(j, l), i);
        }
    }

    #[test]
    fn harmonic_counts_and_rejection() {
        let o = [0.0, 0.0];
        assert_eq!(HarmonicBasis::new(2, &[3], o, 1.0).unwrap().len(), 2);
        let d: Vec<usize> = (5..=10).collect();
        assert_eq!(HarmonicBasis::new(4, &d, o, 1.0).unwrap().len(), 12);
        assert!(matches!(HarmonicBasis::new(2, &[2, 3], o, 1.0), Err(Error::HarmonicDegree { degree: 2, k: 2 })));
    }

    #[test]
    fn harmonic_laplacian_vanishes_symbolically() {
        let hb = HarmonicBasis::new(1, &[2, 3, 4, 5, 6, 7, 8, 9, 10], [0.2, 0.1], 0.3).unwrap();
        for idx in 0..hb.len() {
            let coeffs = hb.monomial_coefficients(idx);
            let mut lap = std::collections::BTreeMap::<(usize, usize), f64>::new();
            for &(j, l, c) in &coeffs {
                if j >= 2 {
                    *lap.entry((j - 2, l)).or_default() += c * (j * (j - 1)) as f64;
                }
                if l >= 2 {
                    *lap.entry((j, l - 2)).or_default() += c * (l * (l - 1)) as f64;
                }
            }
            let scale: f64 = coeffs.iter().map(|c| c.2.abs()).fold(0.0, f64::max);
            for v in lap.values() {
                assert!(v.abs() <= 1e-12 * scale, "idx {idx}: {v}");
            }
        }
    }

    #[test]
    fn harmonic_laplacian_vanishes_numerically() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let hb = HarmonicBasis::new(4, &[5, 6, 7, 8, 9, 10], [0.5, 0.5], 0.4).unwrap();
        for _ in 0..100 {
            let p = [rng.random_range(0.3..0.7), rng.random_range(0.3..0.7)];
            let (dx, dy): (f64, f64) = ((p[0] - 0.5) / 0.4, (p[1] - 0.5) / 0.4);
            for idx in 0..hb.len() {
                // Laplacian of the expansion evaluated term by term in scaled variables
                let mut lap = 0.0;
                let mut magnitude = 0.0;
                for (j, l, c) in hb.monomial_coefficients(idx) {
                    let c = c * 0.4f64.powi((j + l) as i32);
                    let mut add = |t: f64| {
                        lap += t;
                        magnitude += t.abs();
                    };
                    if j >= 2 {
                        add(c * (j * (j - 1)) as f64 * dx.powi(j as i32 - 2) * dy.powi(l as i32));
                    }
                    if l >= 2 {
                        add(c * (l * (l - 1)) as f64 * dx.powi(j as i32) * dy.powi(l as i32 - 2));
                    }
                }
                assert!(lap.abs() <= 1e-10 * (1.0 + magnitude), "function {idx}: {lap}");
            }
        }
    }

    #[test]
    fn harmonic_values_match_expansion() {
        let hb = HarmonicBasis::new(2, &[3, 4], [0.1, -0.2], 0.6).unwrap();
        let p = [0.45, 0.3];
        let (v, _) = hb.eval(p);
        for idx in 0..hb.len() {
            let dx = p[0] - 0.1;
            let dy = p[1] + 0.2;
            let s: f64 = hb
                .monomial_coefficients(idx)
                .iter()
                .map(|&(j, l, c)| c * dx.powi(j as i32) * dy.powi(l as i32))
                .sum();
            assert!((s - v[idx]).abs() < 1e-13);
        }
    }

    #[test]
    fn simplex_lagrange_nodal_and_unity() {
        for k in 1..=6 {
            let b = SimplexLagrange::new(k);
            assert_eq!(b.len(), dim_pk(k));
            for (i, a) in b.lattice.iter().enumerate() {
                let l = a.map(|x| x as f64 / k as f64);
                let (v, _) = b.eval(l);
                for (j, &vj) in v.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((vj - expect).abs() < 1e-12);
                }
            }
            let (v, g) = b.eval([0.2, 0.5, 0.3]);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let gs = g.iter().fold([0.0, 0.0], |acc, x| [acc[0] + x[0], acc[1] + x[1]]);
            assert!(gs[0].abs() < 1e-11 && gs[1].abs() < 1e-11);
        }
    }

    #[test]
    fn lagrange_1d_reproduces_polynomials() {
        for k in 1..=6 {
            let t = 0.37;
            let w = lagrange_1d_uniform(k, t);
            let approx: f64 = (0..=k).map(|m| w[m] * (m as f64 / k as f64).powi(k as i32)).sum();
            assert!((approx - t.powi(k as i32)).abs() < 1e-13);
        }
    }
}

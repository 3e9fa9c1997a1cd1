//! Triangle quadrature in barycentric coordinates.
//!
//! Low degrees use symmetric closed-form rules (centroid, 3-point, 7-point
//! Radon). From degree 6 upward a collapsed (conical product) Gauss-Legendre
//! rule is used. Every rule has strictly positive weights and interior points.
//! Weights are normalized to sum to one and get scaled by the element area at
//! the use site.

use crate::error::{Error, Result};
use crate::mesh::TriangleGeometry;

pub const MAX_DEGREE: usize = 14;

/// Default degree for element matrices and residuals.
pub const ASSEMBLY_DEGREE: usize = 8;

/// Default degree for error norms against an exact solution.
pub const ERROR_DEGREE: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// A rule exact for all polynomials of total degree `<= degree`.
pub fn rule(degree: usize) -> Result<QuadratureRule> {
    match degree {
        1 => Ok(QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            exact_degree: 1,
        }),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            Ok(QuadratureRule {
                points: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![1.0 / 3.0; 3],
                exact_degree: 2,
            })
        }
        3..=5 => Ok(radon7()),
        6..=MAX_DEGREE => Ok(collapsed_gauss(degree)),
        _ => Err(Error::UnsupportedQuadratureDegree(degree, MAX_DEGREE)),
    }
}

/// `area * sum_i w_i f(p_i)`.
pub fn integrate<F: Fn([f64; 3]) -> f64>(f: F, geometry: &TriangleGeometry, rule: &QuadratureRule) -> f64 {
    geometry.area * rule.iter().map(|(p, w)| w * f(*p)).sum::<f64>()
}

fn radon7() -> QuadratureRule {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    let mut points = vec![[1.0 / 3.0; 3]];
    let mut weights = vec![9.0 / 40.0];
    for (a, w) in [(a1, w1), (a2, w2)] {
        let b = 1.0 - 2.0 * a;
        points.extend([[b, a, a], [a, b, a], [a, a, b]]);
        weights.extend([w; 3]);
    }
    QuadratureRule {
        points,
        weights,
        exact_degree: 5,
    }
}

/// Duffy-collapsed tensor Gauss rule: `(s, t)` in the unit square maps to
/// barycentrics `(s, (1-s) t, (1-s)(1-t))` with Jacobian `(1-s)`.
fn collapsed_gauss(degree: usize) -> QuadratureRule {
    let ns = (degree + 2).div_ceil(2);
    let nt = (degree + 1).div_ceil(2);
    let (xs, ws) = gauss_legendre_unit(ns);
    let (xt, wt) = gauss_legendre_unit(nt);
    let mut points = Vec::with_capacity(ns * nt);
    let mut weights = Vec::with_capacity(ns * nt);
    for (s, wsi) in xs.iter().zip(&ws) {
        for (t, wti) in xt.iter().zip(&wt) {
            points.push([*s, (1.0 - s) * t, (1.0 - s) * (1.0 - t)]);
            weights.push(2.0 * wsi * wti * (1.0 - s));
        }
    }
    QuadratureRule {
        points,
        weights,
        exact_degree: degree,
    }
}

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
pub(crate) fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

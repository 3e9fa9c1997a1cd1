use super::{signed_area, Point};

/// Affine data of one triangle: area and the constant gradients of its
/// barycentric coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleGeometry {
    pub points: [Point; 3],
    pub area: f64,
    pub grad_lambda: [[f64; 2]; 3],
}

impl TriangleGeometry {
    /// Returns `None` for a triangle with non-positive signed area.
    pub fn new(points: [Point; 3]) -> Option<Self> {
        let area = signed_area(&points);
        if !(area > 0.0) {
            return None;
        }
        let inv = 1.0 / (2.0 * area);
        let mut grad_lambda = [[0.0; 2]; 3];
        for (i, g) in grad_lambda.iter_mut().enumerate() {
            let p = points[(i + 1) % 3];
            let q = points[(i + 2) % 3];
            *g = [(p[1] - q[1]) * inv, (q[0] - p[0]) * inv];
        }
        Some(Self {
            points,
            area,
            grad_lambda,
        })
    }

    pub fn to_physical(&self, bary: [f64; 3]) -> Point {
        let p = &self.points;
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    /// Physical gradient from partial derivatives with respect to the three
    /// barycentric coordinates.
    #[inline]
    pub fn gradient(&self, d_bary: [f64; 3]) -> [f64; 2] {
        let g = &self.grad_lambda;
        [
            d_bary[0] * g[0][0] + d_bary[1] * g[1][0] + d_bary[2] * g[2][0],
            d_bary[0] * g[0][1] + d_bary[1] * g[1][1] + d_bary[2] * g[2][1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_gradients_sum_to_zero_and_are_dual() {
        let g = TriangleGeometry::new([[0.3, -0.2], [1.7, 0.4], [0.1, 2.2]]).unwrap();
        for c in 0..2 {
            let s: f64 = g.grad_lambda.iter().map(|v| v[c]).sum();
            assert!(s.abs() < 1e-14);
        }
        // grad(lambda_i) . (p_j - p_0) = delta_ij - delta_i0
        for i in 0..3 {
            for j in 1..3 {
                let d = [
                    g.points[j][0] - g.points[0][0],
                    g.points[j][1] - g.points[0][1],
                ];
                let val = g.grad_lambda[i][0] * d[0] + g.grad_lambda[i][1] * d[1];
                let expected = (i == j) as i32 as f64 - (i == 0) as i32 as f64;
                assert!((val - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn clockwise_is_rejected() {
        assert!(TriangleGeometry::new([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_none());
    }
}

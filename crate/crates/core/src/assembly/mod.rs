//! Taylor-Hood saddle-point system.
//!
//! With velocity basis `phi_l` and pressure basis `psi_j` the discrete problem
//! reads
//!
//! ```text
//! [ A   B  0 ] [u]   [f]
//! [ B^T 0  m ] [p] = [0]
//! [ 0   m^T 0] [mu]  [0]
//! ```
//!
//! with `A_lj = (grad phi_j, grad phi_l)`, `B_lj = -(psi_j, div phi_l)` and
//! `m_j = (psi_j, 1)`. The last row pins the pressure mean to zero.

mod sparse;

pub use sparse::SparseMatrix;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point, DEFAULT_BOUNDARY_TAG};
use crate::quadrature::QuadratureRule;
use crate::spaces::{p1_basis, p2_basis, DofMap, Tabulation};

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleSystem {
    /// Velocity stiffness, `2 N_u x 2 N_u`.
    pub a: SparseMatrix,
    /// Velocity-pressure coupling, `2 N_u x N_q`.
    pub b: SparseMatrix,
    /// `m_j = integral of psi_j`.
    pub m: Vec<f64>,
    pub rhs_v: Vec<f64>,
    pub rhs_p: Vec<f64>,
    pub dirichlet_mask: Vec<bool>,
    pub dirichlet_values: Vec<f64>,
}

impl SaddleSystem {
    pub fn n_velocity(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_pressure(&self) -> usize {
        self.b.ncols()
    }
}

/// Saddle system with the mean-zero multiplier appended. Unknowns are ordered
/// `[velocity | pressure | multiplier]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub n_velocity: usize,
    pub n_pressure: usize,
}

impl AugmentedSystem {
    pub fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let (u, rest) = x.split_at(self.n_velocity);
        let (p, mu) = rest.split_at(self.n_pressure);
        (u.to_vec(), p.to_vec(), mu[0])
    }
}

struct LocalMatrices {
    a: [[f64; 6]; 6],
    b: [[[f64; 3]; 2]; 6],
}

fn local_taylor_hood(mesh: &Mesh, t: usize, p2: &Tabulation, p1: &Tabulation, rule: &QuadratureRule) -> Result<LocalMatrices> {
    let g = mesh.geometry(t)?;
    let mut a = [[0.0; 6]; 6];
    let mut b = [[[0.0; 3]; 2]; 6];
    for (q, w) in rule.weights.iter().enumerate() {
        let w = w * g.area;
        let grads: [[f64; 2]; 6] = std::array::from_fn(|i| g.gradient(p2.d_bary(i, q)));
        for i in 0..6 {
            for j in i..6 {
                a[i][j] += w * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
            }
            for c in 0..2 {
                for k in 0..3 {
                    b[i][c][k] -= w * p1.value(k, q) * grads[i][c];
                }
            }
        }
    }
    for i in 0..6 {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    Ok(LocalMatrices { a, b })
}

/// Stiffness and coupling blocks, pressure mean vector, zero right-hand side.
/// Element contributions are computed in parallel and summed in element order.
pub fn assemble_taylor_hood(mesh: &Mesh, dofmap: &DofMap, rule: &QuadratureRule) -> Result<SaddleSystem> {
    let p2 = Tabulation::new(&p2_basis(), rule);
    let p1 = Tabulation::new(&p1_basis(), rule);
    let locals = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| local_taylor_hood(mesh, t, &p2, &p1, rule))
        .collect::<Result<Vec<_>>>()?;

    let nvel = dofmap.n_velocity_dofs();
    let npre = dofmap.n_pressure_dofs();
    let mut ta = Vec::with_capacity(locals.len() * 72);
    let mut tb = Vec::with_capacity(locals.len() * 36);
    let mut m = vec![0.0; npre];
    for (t, loc) in locals.iter().enumerate() {
        let vn = dofmap.velocity_nodes[t];
        let pn = dofmap.pressure_nodes[t];
        for i in 0..6 {
            for j in 0..6 {
                for c in 0..2 {
                    ta.push((2 * vn[i] + c, 2 * vn[j] + c, loc.a[i][j]));
                }
            }
            for c in 0..2 {
                for k in 0..3 {
                    tb.push((2 * vn[i] + c, pn[k], loc.b[i][c][k]));
                }
            }
        }
        let third = mesh.area(t) / 3.0;
        for k in pn {
            m[k] += third;
        }
    }
    Ok(SaddleSystem {
        a: SparseMatrix::from_triplets(nvel, nvel, &ta)?,
        b: SparseMatrix::from_triplets(nvel, npre, &tb)?,
        m,
        rhs_v: vec![0.0; nvel],
        rhs_p: vec![0.0; npre],
        dirichlet_mask: dofmap.dirichlet.clone(),
        dirichlet_values: vec![0.0; nvel],
    })
}

/// Load vector `(f, phi_l)` over the velocity dofs.
pub fn assemble_rhs<F>(f: F, mesh: &Mesh, dofmap: &DofMap, rule: &QuadratureRule) -> Result<Vec<f64>>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    let p2 = Tabulation::new(&p2_basis(), rule);
    let locals = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t)?;
            let mut loc = [[0.0; 2]; 6];
            for (q, (x, w)) in rule.iter().enumerate() {
                let fx = f(g.to_physical(*x));
                for (i, li) in loc.iter_mut().enumerate() {
                    let s = w * g.area * p2.value(i, q);
                    li[0] += s * fx[0];
                    li[1] += s * fx[1];
                }
            }
            Ok(loc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rhs = vec![0.0; dofmap.n_velocity_dofs()];
    for (t, loc) in locals.iter().enumerate() {
        for (i, &node) in dofmap.velocity_nodes[t].iter().enumerate() {
            rhs[2 * node] += loc[i][0];
            rhs[2 * node + 1] += loc[i][1];
        }
    }
    Ok(rhs)
}

/// Coordinates of the velocity nodes: vertices, then edge midpoints.
pub fn velocity_node_points(mesh: &Mesh) -> Vec<Point> {
    let mut pts = mesh.vertices().to_vec();
    for e in &mesh.edges().edges {
        let [a, b] = e.vertices;
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        pts.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
    }
    pts
}

/// Nodal values of Dirichlet data at the boundary velocity nodes (zero
/// elsewhere). `g` receives the node position and the sorted tags of the
/// boundary edges meeting at the node: one tag for midpoints and smooth
/// boundary vertices, two at corners between differently tagged segments.
pub fn boundary_values<G>(mesh: &Mesh, dofmap: &DofMap, g: G) -> Vec<f64>
where
    G: Fn(Point, &[u32]) -> [f64; 2],
{
    let nv = mesh.n_vertices();
    let mut tags: Vec<Vec<u32>> = vec![Vec::new(); dofmap.n_velocity_nodes()];
    for (e, edge) in mesh.edges().edges.iter().enumerate() {
        if edge.is_boundary() {
            let tag = edge.boundary_tag.unwrap_or(DEFAULT_BOUNDARY_TAG);
            for node in [edge.vertices[0], edge.vertices[1], nv + e] {
                if !tags[node].contains(&tag) {
                    tags[node].push(tag);
                }
            }
        }
    }
    let pts = velocity_node_points(mesh);
    let mut values = vec![0.0; dofmap.n_velocity_dofs()];
    for (node, node_tags) in tags.iter_mut().enumerate() {
        if node_tags.is_empty() {
            continue;
        }
        node_tags.sort_unstable();
        let v = g(pts[node], node_tags);
        values[2 * node] = v[0];
        values[2 * node + 1] = v[1];
    }
    values
}

/// Pins the masked velocity dofs to `g`: their couplings move to the
/// right-hand side and their rows and columns of `A` become identity rows;
/// their rows of `B` are removed.
pub fn apply_dirichlet(system: SaddleSystem, g: &[f64]) -> Result<SaddleSystem> {
    let n = system.n_velocity();
    if g.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: g.len() });
    }
    let mask = &system.dirichlet_mask;
    let mut rhs_v = system.rhs_v.clone();
    let mut rhs_p = system.rhs_p.clone();
    let mut ta = Vec::with_capacity(system.a.nnz());
    for (i, j, v) in system.a.triplets() {
        match (mask[i], mask[j]) {
            (false, false) => ta.push((i, j, v)),
            (false, true) => rhs_v[i] -= v * g[j],
            _ => {}
        }
    }
    let mut tb = Vec::with_capacity(system.b.nnz());
    for (i, k, v) in system.b.triplets() {
        if mask[i] {
            rhs_p[k] -= v * g[i];
        } else {
            tb.push((i, k, v));
        }
    }
    let mut values = vec![0.0; n];
    for i in (0..n).filter(|&i| mask[i]) {
        ta.push((i, i, 1.0));
        rhs_v[i] = g[i];
        values[i] = g[i];
    }
    Ok(SaddleSystem {
        a: SparseMatrix::from_triplets(n, n, &ta)?,
        b: SparseMatrix::from_triplets(n, system.n_pressure(), &tb)?,
        m: system.m,
        rhs_v,
        rhs_p,
        dirichlet_mask: system.dirichlet_mask,
        dirichlet_values: values,
    })
}

/// Appends the mean-zero multiplier row and column.
pub fn attach_mean_zero(system: &SaddleSystem) -> Result<AugmentedSystem> {
    let nu = system.n_velocity();
    let np = system.n_pressure();
    let n = nu + np + 1;
    let mut t = Vec::with_capacity(system.a.nnz() + 2 * system.b.nnz() + 2 * np);
    t.extend(system.a.triplets());
    for (i, k, v) in system.b.triplets() {
        t.push((i, nu + k, v));
        t.push((nu + k, i, v));
    }
    for (k, &mk) in system.m.iter().enumerate() {
        t.push((nu + k, n - 1, mk));
        t.push((n - 1, nu + k, mk));
    }
    let mut rhs = Vec::with_capacity(n);
    rhs.extend_from_slice(&system.rhs_v);
    rhs.extend_from_slice(&system.rhs_p);
    rhs.push(0.0);
    Ok(AugmentedSystem {
        matrix: SparseMatrix::from_triplets(n, n, &t)?,
        rhs,
        n_velocity: nu,
        n_pressure: np,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use crate::mesh::Triangle;
    use crate::quadrature::{rule, ASSEMBLY_DEGREE};
    use crate::spaces::build_dof_maps;

    fn single(points: [Point; 3]) -> Mesh {
        Mesh::new(points.to_vec(), vec![Triangle::new([0, 1, 2])], vec![], &BTreeMap::new()).unwrap()
    }

    fn system(mesh: &Mesh) -> SaddleSystem {
        assemble_taylor_hood(mesh, &build_dof_maps(mesh), &rule(ASSEMBLY_DEGREE).unwrap()).unwrap()
    }

    #[test]
    fn reference_vertex_stiffness() {
        // phi_0 = l0 (2 l0 - 1), grad l0 = (-1, -1): |grad phi_0|^2 = 2 (4 l0 - 1)^2,
        // integral over the reference triangle = 2 (16/12 - 8/6 + 1/2) = 1.
        let s = system(&single([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]));
        assert!((s.a.get(0, 0) - 1.0).abs() < 1e-14);
        // vertex 1: |grad phi_1|^2 = (4 l1 - 1)^2 -> 1/2
        assert!((s.a.get(2, 2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn symmetric_with_zero_row_sums() {
        let mesh = Mesh::l_shape().unwrap().refine_uniform().unwrap();
        let s = system(&mesh);
        assert!(s.a.symmetry_defect() <= 1e-12 * s.a.max_abs());
        let ones: Vec<f64> = (0..s.n_velocity()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let r = s.a.mul_vec(&ones).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12));
        let total: f64 = s.m.iter().sum();
        assert!((total - 3.0).abs() < 1e-13);
    }

    #[test]
    fn constant_pressure_has_zero_interior_divergence() {
        let mesh = Mesh::unit_square(3).unwrap();
        let d = build_dof_maps(&mesh);
        let s = system(&mesh);
        let bq = s.b.mul_vec(&vec![1.0; s.n_pressure()]).unwrap();
        for (i, v) in bq.iter().enumerate() {
            if !d.dirichlet[i] {
                assert!(v.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn scaling_one_element() {
        let pts = [[0.1, 0.2], [1.3, 0.4], [0.5, 1.1]];
        let s = 2.5;
        let a = system(&single(pts));
        let b = system(&single(pts.map(|p| [s * p[0], s * p[1]])));
        for (i, j, v) in a.a.triplets() {
            assert!((b.a.get(i, j) - v).abs() < 1e-12 * a.a.max_abs());
        }
        for (i, j, v) in a.b.triplets() {
            assert!((b.b.get(i, j) - s * v).abs() < 1e-12 * s * a.b.max_abs());
        }
    }

    #[test]
    fn rhs_linearity_and_factorial_value() {
        let mesh = single([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]);
        let d = build_dof_maps(&mesh);
        let r = rule(ASSEMBLY_DEGREE).unwrap();
        let f1 = assemble_rhs(|_| [1.0, 0.0], &mesh, &d, &r).unwrap();
        // vertex: integral of 2 l^2 - l = 2|T| (2 * 2!/4! - 1/3!) = 0
        // edge:   integral of 4 l_i l_j = 4 * 2|T| / 4! = |T|/3
        assert!(f1[0].abs() < 1e-15);
        assert!((f1[2 * 3] - 1.0 / 3.0).abs() < 1e-14);
        let f2 = assemble_rhs(|_| [-3.0, 0.0], &mesh, &d, &r).unwrap();
        for (a, b) in f1.iter().zip(&f2) {
            assert!((b + 3.0 * a).abs() < 1e-14);
        }
        assert!(assemble_rhs(|_| [0.0, 0.0], &mesh, &d, &r).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dirichlet_zero_leaves_rhs() {
        let mesh = Mesh::unit_square(2).unwrap();
        let s = system(&mesh);
        let n = s.n_velocity();
        let mask = s.dirichlet_mask.clone();
        let lifted = apply_dirichlet(s, &vec![0.0; n]).unwrap();
        assert!(lifted.rhs_v.iter().all(|&v| v == 0.0));
        for i in (0..n).filter(|&i| mask[i]) {
            let (c, v) = lifted.a.row(i);
            assert_eq!((c, v), (&[i][..], &[1.0][..]));
        }
        let aug = attach_mean_zero(&lifted).unwrap();
        assert!(aug.matrix.is_structurally_symmetric());
        let mut x = vec![0.0; aug.matrix.nrows()];
        x[n..n + lifted.m.len()].fill(1.0);
        let last = aug.matrix.mul_vec(&x).unwrap()[aug.matrix.nrows() - 1];
        assert!((last - 1.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_tags_reach_corners() {
        let mesh = Mesh::unit_square(1).unwrap();
        let d = build_dof_maps(&mesh);
        let seen = std::cell::RefCell::new(Vec::new());
        let v = boundary_values(&mesh, &d, |p, tags| {
            seen.borrow_mut().push((p, tags.to_vec()));
            [p[0], tags.len() as f64]
        });
        let seen = seen.into_inner();
        assert_eq!(seen.len(), 8);
        assert!(seen.iter().any(|(p, t)| *p == [0.0, 0.0] && t == &vec![1, 4]));
        assert_eq!(v.len(), d.n_velocity_dofs());
    }
}

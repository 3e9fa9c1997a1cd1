use nalgebra::{DMatrix, SymmetricEigen};

use super::{element_bubbles, ErrorCoefficients, ErrorMatrices, ResidualVectors};
use crate::assembly::SparseMatrix;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quadrature::QuadratureRule;
use crate::solver;
use crate::spaces::DofMap;

/// Full stiffness matrix `A_W` over the velocity bubbles.
pub fn assemble_bubble_stiffness(mesh: &Mesh, dofmap: &DofMap, rule: &QuadratureRule) -> Result<SparseMatrix> {
    let locals = element_bubbles(mesh, dofmap, rule)?;
    let n = dofmap.n_bubble_velocity_dofs();
    let mut t = Vec::new();
    for (e, loc) in locals.iter().enumerate() {
        let nodes = &dofmap.bubble_nodes[e];
        for (m, a) in nodes.iter().enumerate() {
            let Some(a) = a else { continue };
            for (k, b) in nodes.iter().enumerate() {
                let Some(b) = b else { continue };
                for c in 0..2 {
                    t.push((2 * a + c, 2 * b + c, loc.k[m][k]));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FirstProblemSolution {
    pub coefficients: ErrorCoefficients,
    pub multiplier: f64,
    /// `sqrt(x_u^T A_W x_u + |e_p|^2)`, the V-norm of the bubble error.
    pub v_norm: f64,
}

/// The undiagonalized error problem over the whole bubble space:
///
/// ```text
/// [ A_W  B   0 ] [x_u]   [ F_v]
/// [ B^T  0   m ] [x_p] = [-F_p]
/// [ 0    m^T 0 ] [mu ]   [ 0  ]
/// ```
///
/// with `m_T = (b_T, 1)` fixing the mean of the pressure error.
pub fn solve_first_problem(a_w: &SparseMatrix, m: &ErrorMatrices, r: &ResidualVectors) -> Result<FirstProblemSolution> {
    let nv = a_w.nrows();
    let np = m.b.ncols();
    if m.b.nrows() != nv {
        return Err(Error::SizeMismatch { expected: nv, got: m.b.nrows() });
    }
    let n = nv + np + 1;
    let mut t: Vec<_> = a_w.triplets().collect();
    for (i, k, v) in m.b.triplets() {
        t.push((i, nv + k, v));
        t.push((nv + k, i, v));
    }
    for (k, &mk) in m.bubble_mean.iter().enumerate() {
        t.push((nv + k, n - 1, mk));
        t.push((n - 1, nv + k, mk));
    }
    let matrix = SparseMatrix::from_triplets(n, n, &t)?;
    let mut rhs = r.f_v.clone();
    rhs.extend(r.f_p.iter().map(|v| -v));
    rhs.push(0.0);
    let x = solver::factor(&matrix)?.solve(&rhs)?;
    let x_u = x[..nv].to_vec();
    let x_p = x[nv..nv + np].to_vec();
    let au = a_w.mul_vec(&x_u)?;
    let energy: f64 = x_u.iter().zip(&au).map(|(a, b)| a * b).sum();
    let pressure: f64 = x_p.iter().zip(&m.bubble_mass).map(|(a, w)| a * a * w).sum();
    Ok(FirstProblemSolution {
        coefficients: ErrorCoefficients { x_u, x_p },
        multiplier: x[n - 1],
        v_norm: (energy + pressure).sqrt(),
    })
}

const PROBE_MAX_DOFS: usize = 4000;

/// Discrete inf-sup constant of the bubble pair: `mu_h^2` is the smallest
/// eigenvalue of `B^T A_W^-1 B` relative to the pressure-bubble mass matrix.
/// With `include_edge_modes = false` only the element modes carry velocity.
pub fn discrete_inf_sup_probe(mesh: &Mesh, dofmap: &DofMap, rule: &QuadratureRule, include_edge_modes: bool) -> Result<f64> {
    let a_w = assemble_bubble_stiffness(mesh, dofmap, rule)?;
    let mats = super::assemble_error_matrices(mesh, dofmap, rule)?;
    let first_element_dof = 4 * dofmap.n_interior_edges;
    let keep: Vec<usize> = (0..a_w.nrows())
        .filter(|&i| include_edge_modes || i >= first_element_dof)
        .collect();
    if keep.len() > PROBE_MAX_DOFS {
        return Err(Error::Config(format!(
            "inf-sup probe limited to {PROBE_MAX_DOFS} velocity dofs, mesh has {}",
            keep.len()
        )));
    }
    let mut pos = vec![usize::MAX; a_w.nrows()];
    for (k, &i) in keep.iter().enumerate() {
        pos[i] = k;
    }
    let nk = keep.len();
    let np = mats.b.ncols();
    let mut a = DMatrix::<f64>::zeros(nk, nk);
    for (i, j, v) in a_w.triplets() {
        if pos[i] != usize::MAX && pos[j] != usize::MAX {
            a[(pos[i], pos[j])] = v;
        }
    }
    let mut b = DMatrix::<f64>::zeros(nk, np);
    for (i, j, v) in mats.b.triplets() {
        if pos[i] != usize::MAX {
            b[(pos[i], j)] = v / mats.bubble_mass[j].sqrt();
        }
    }
    let chol = a.cholesky().ok_or(Error::NumericallySingular(0))?;
    let ainv_b = chol.solve(&b);
    let s = b.transpose() * ainv_b;
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(min.max(0.0).sqrt())
}

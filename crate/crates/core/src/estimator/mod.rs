//! Hierarchical bubble-space error estimator.
//!
//! The residual of a Taylor-Hood solution `(u_h, p_h)` is tested against the
//! bubble bases `phi_j` (velocity) and `psi_j = b_T` (pressure):
//!
//! ```text
//! F_v,j = (f, phi_j) - (grad u_h, grad phi_j) + (p_h, div phi_j)
//! F_p,j = -(psi_j, div u_h)
//! ```
//!
//! The error problem over the bubble space is reduced by replacing the
//! stiffness with its diagonal `D_v` (second problem) and the Schur complement
//! `B^T D_v^-1 B` with `c_s D_p`, `D_p = diag(B^T D_v^-1 B)` (third problem).
//! The third problem then needs two diagonal solves and two mat-vecs.

mod validation;

pub use validation::{assemble_bubble_stiffness, discrete_inf_sup_probe, solve_first_problem, FirstProblemSolution};

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::assembly::SparseMatrix;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::quadrature::QuadratureRule;
use crate::solver;
use crate::spaces::{bubble_pressure_mode, local_bubble_modes, p1_basis, p2_basis, DofMap, Tabulation, N_BUBBLE_MODES};

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualVectors {
    pub f_v: Vec<f64>,
    pub f_p: Vec<f64>,
    /// `|div u_h|^2_{0,T}` per element.
    pub div_sq: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMatrices {
    /// Diagonal of the bubble stiffness, length `N_v`.
    pub d_v: Vec<f64>,
    /// `B_lj = -(psi_j, div phi_l)`, `N_v x N_p`.
    pub b: SparseMatrix,
    /// `diag(B^T D_v^-1 B)`, length `N_p`.
    pub d_p: Vec<f64>,
    /// Largest number of pressure bubbles on one element.
    pub c_s: usize,
    /// `|phi_m|^2_{1,T}` for each element and local mode (signs do not matter).
    pub mode_seminorms: Vec<[f64; N_BUBBLE_MODES]>,
    /// `(b_T, b_T)` per element.
    pub bubble_mass: Vec<f64>,
    /// `(b_T, 1)` per element.
    pub bubble_mean: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCoefficients {
    pub x_u: Vec<f64>,
    pub x_p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalEstimates {
    pub eta_p: Vec<f64>,
    pub eta_v: Vec<f64>,
    pub eta_d: Vec<f64>,
    pub eta_total: Vec<f64>,
}

impl LocalEstimates {
    pub fn len(&self) -> usize {
        self.eta_total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta_total.is_empty()
    }

    /// `element_id,eta_p,eta_v,eta_d,eta_total`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("element_id,eta_p,eta_v,eta_d,eta_total\n");
        for t in 0..self.len() {
            writeln!(
                s,
                "{t},{:e},{:e},{:e},{:e}",
                self.eta_p[t], self.eta_v[t], self.eta_d[t], self.eta_total[t]
            )
            .unwrap();
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalEstimate {
    pub eta_g: f64,
    /// `|x|_D^2 = x_u^T D_v x_u + sum_T x_p,T^2 (b_T, b_T)`.
    pub d_norm_sq: f64,
    /// `|div u_h|^2`.
    pub div_sq: f64,
}

impl GlobalEstimate {
    /// `|eta_G^2 - (|x|_D^2 + |div u_h|^2)| / eta_G^2`
    pub fn identity_defect(&self) -> f64 {
        let e2 = self.eta_g * self.eta_g;
        if e2 == 0.0 {
            return (self.d_norm_sq + self.div_sq).abs();
        }
        (e2 - self.d_norm_sq - self.div_sq).abs() / e2
    }
}

struct Tables {
    modes: Tabulation,
    bubble: Tabulation,
    p2: Tabulation,
    p1: Tabulation,
}

impl Tables {
    fn new(rule: &QuadratureRule) -> Self {
        let modes: Vec<_> = local_bubble_modes().into_iter().map(|m| m.poly).collect();
        Self {
            modes: Tabulation::new(&modes, rule),
            bubble: Tabulation::new(&[bubble_pressure_mode()], rule),
            p2: Tabulation::new(&p2_basis(), rule),
            p1: Tabulation::new(&p1_basis(), rule),
        }
    }
}

pub(crate) struct ElementBubble {
    /// Signed local stiffness of the nine modes.
    pub k: [[f64; N_BUBBLE_MODES]; N_BUBBLE_MODES],
    /// Signed `-(b_T, d_c phi_m)`.
    pub b: [[f64; 2]; N_BUBBLE_MODES],
    pub mass: f64,
    pub mean: f64,
}

fn element_bubble(mesh: &Mesh, dofmap: &DofMap, t: usize, tab: &Tables, rule: &QuadratureRule) -> Result<ElementBubble> {
    let g = mesh.geometry(t)?;
    let s = dofmap.bubble_signs[t];
    let mut k = [[0.0; N_BUBBLE_MODES]; N_BUBBLE_MODES];
    let mut b = [[0.0; 2]; N_BUBBLE_MODES];
    let (mut mass, mut mean) = (0.0, 0.0);
    for (q, w) in rule.weights.iter().enumerate() {
        let w = w * g.area;
        let grads: [[f64; 2]; N_BUBBLE_MODES] = std::array::from_fn(|m| g.gradient(tab.modes.d_bary(m, q)));
        let bt = tab.bubble.value(0, q);
        mass += w * bt * bt;
        mean += w * bt;
        for m in 0..N_BUBBLE_MODES {
            for n in m..N_BUBBLE_MODES {
                k[m][n] += w * (grads[m][0] * grads[n][0] + grads[m][1] * grads[n][1]);
            }
            b[m][0] -= w * bt * grads[m][0];
            b[m][1] -= w * bt * grads[m][1];
        }
    }
    for m in 0..N_BUBBLE_MODES {
        for n in m..N_BUBBLE_MODES {
            k[m][n] *= s[m] * s[n];
            k[n][m] = k[m][n];
        }
        b[m][0] *= s[m];
        b[m][1] *= s[m];
    }
    Ok(ElementBubble { k, b, mass, mean })
}

pub(crate) fn element_bubbles(mesh: &Mesh, dofmap: &DofMap, rule: &QuadratureRule) -> Result<Vec<ElementBubble>> {
    let tab = Tables::new(rule);
    (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| element_bubble(mesh, dofmap, t, &tab, rule))
        .collect()
}

/// `D_v`, `B`, `D_p`, `c_s` and the per-element quantities needed by the
/// local estimators.
pub fn assemble_error_matrices(mesh: &Mesh, dofmap: &DofMap, rule: &QuadratureRule) -> Result<ErrorMatrices> {
    let locals = element_bubbles(mesh, dofmap, rule)?;
    let nv = dofmap.n_bubble_velocity_dofs();
    let np = dofmap.n_bubble_pressure_dofs();
    let mut d_v = vec![0.0; nv];
    let mut tb = Vec::with_capacity(locals.len() * 2 * N_BUBBLE_MODES);
    let mut mode_seminorms = Vec::with_capacity(locals.len());
    let mut bubble_mass = Vec::with_capacity(locals.len());
    let mut bubble_mean = Vec::with_capacity(locals.len());
    let mut pressure_per_element = vec![0usize; locals.len()];
    for (t, loc) in locals.iter().enumerate() {
        for (m, node) in dofmap.bubble_nodes[t].iter().enumerate() {
            if let Some(n) = node {
                for c in 0..2 {
                    d_v[2 * n + c] += loc.k[m][m];
                    tb.push((2 * n + c, t, loc.b[m][c]));
                }
            }
        }
        pressure_per_element[t] += 1;
        mode_seminorms.push(std::array::from_fn(|m| loc.k[m][m]));
        bubble_mass.push(loc.mass);
        bubble_mean.push(loc.mean);
    }
    if let Some(dof) = d_v.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDiagonal { kind: "velocity bubble", dof });
    }
    let b = SparseMatrix::from_triplets(nv, np, &tb)?;
    let mut d_p = vec![0.0; np];
    for (l, j, v) in b.triplets() {
        d_p[j] += v * v / d_v[l];
    }
    Ok(ErrorMatrices {
        d_v,
        b,
        d_p,
        c_s: pressure_per_element.into_iter().max().unwrap_or(0),
        mode_seminorms,
        bubble_mass,
        bubble_mean,
    })
}

/// Residuals of `(u_h, p_h)` against the bubble bases. `u` holds the
/// Taylor-Hood velocity coefficients (`2 N_u`), `p` the pressure (`N_q`).
pub fn assemble_error_residuals<F>(
    mesh: &Mesh,
    dofmap: &DofMap,
    u: &[f64],
    p: &[f64],
    f: F,
    rule: &QuadratureRule,
) -> Result<ResidualVectors>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    if u.len() != dofmap.n_velocity_dofs() {
        return Err(Error::SizeMismatch {
            expected: dofmap.n_velocity_dofs(),
            got: u.len(),
        });
    }
    if p.len() != dofmap.n_pressure_dofs() {
        return Err(Error::SizeMismatch {
            expected: dofmap.n_pressure_dofs(),
            got: p.len(),
        });
    }
    let tab = Tables::new(rule);
    let locals = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t)?;
            let vn = dofmap.velocity_nodes[t];
            let pn = dofmap.pressure_nodes[t];
            let s = dofmap.bubble_signs[t];
            let mut fv = [[0.0; 2]; N_BUBBLE_MODES];
            let (mut fp, mut div_sq) = (0.0, 0.0);
            for (q, (x, w)) in rule.iter().enumerate() {
                let w = w * g.area;
                let mut gu = [[0.0; 2]; 2];
                for (i, &node) in vn.iter().enumerate() {
                    let gi = g.gradient(tab.p2.d_bary(i, q));
                    for c in 0..2 {
                        gu[c][0] += u[2 * node + c] * gi[0];
                        gu[c][1] += u[2 * node + c] * gi[1];
                    }
                }
                let ph: f64 = (0..3).map(|k| p[pn[k]] * tab.p1.value(k, q)).sum();
                let div = gu[0][0] + gu[1][1];
                let fx = f(g.to_physical(*x));
                div_sq += w * div * div;
                fp -= w * tab.bubble.value(0, q) * div;
                for (m, fvm) in fv.iter_mut().enumerate() {
                    let phi = tab.modes.value(m, q);
                    let gphi = g.gradient(tab.modes.d_bary(m, q));
                    for c in 0..2 {
                        fvm[c] += w * (fx[c] * phi - gu[c][0] * gphi[0] - gu[c][1] * gphi[1] + ph * gphi[c]);
                    }
                }
            }
            for m in 0..N_BUBBLE_MODES {
                fv[m][0] *= s[m];
                fv[m][1] *= s[m];
            }
            Ok((fv, fp, div_sq))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut f_v = vec![0.0; dofmap.n_bubble_velocity_dofs()];
    let mut f_p = Vec::with_capacity(locals.len());
    let mut div_sq = Vec::with_capacity(locals.len());
    for (t, (fv, fp, dsq)) in locals.into_iter().enumerate() {
        for (m, node) in dofmap.bubble_nodes[t].iter().enumerate() {
            if let Some(n) = node {
                f_v[2 * n] += fv[m][0];
                f_v[2 * n + 1] += fv[m][1];
            }
        }
        f_p.push(fp);
        div_sq.push(dsq);
    }
    Ok(ResidualVectors { f_v, f_p, div_sq })
}

fn check_sizes(m: &ErrorMatrices, r: &ResidualVectors) -> Result<()> {
    if r.f_v.len() != m.d_v.len() {
        return Err(Error::SizeMismatch {
            expected: m.d_v.len(),
            got: r.f_v.len(),
        });
    }
    if r.f_p.len() != m.d_p.len() {
        return Err(Error::SizeMismatch {
            expected: m.d_p.len(),
            got: r.f_p.len(),
        });
    }
    Ok(())
}

/// `x_u = D_v^-1 (F_v - B x_p)`
fn back_substitute(m: &ErrorMatrices, r: &ResidualVectors, x_p: &[f64]) -> Result<Vec<f64>> {
    let bx = m.b.mul_vec(x_p)?;
    Ok(r.f_v.iter().zip(&bx).zip(&m.d_v).map(|((f, b), d)| (f - b) / d).collect())
}

/// `F_p + B^T D_v^-1 F_v`
fn schur_rhs(m: &ErrorMatrices, r: &ResidualVectors) -> Result<Vec<f64>> {
    let scaled: Vec<f64> = r.f_v.iter().zip(&m.d_v).map(|(f, d)| f / d).collect();
    let bt = m.b.tr_mul_vec(&scaled)?;
    Ok(r.f_p.iter().zip(&bt).map(|(a, b)| a + b).collect())
}

/// Closed-form solution of the diagonalized problem:
/// `x_p,j = (F_p,j + sum_l B_lj F_v,l / D_v,ll) / (c_s D_p,jj)`, then
/// `x_u = D_v^-1 (F_v - B x_p)`.
pub fn solve_third_problem(m: &ErrorMatrices, r: &ResidualVectors) -> Result<ErrorCoefficients> {
    check_sizes(m, r)?;
    if let Some(dof) = m.d_v.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDiagonal { kind: "velocity bubble", dof });
    }
    if let Some(dof) = m.d_p.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDiagonal { kind: "pressure bubble", dof });
    }
    let cs = m.c_s as f64;
    let x_p: Vec<f64> = schur_rhs(m, r)?.iter().zip(&m.d_p).map(|(g, d)| g / (cs * d)).collect();
    let x_u = back_substitute(m, r, &x_p)?;
    Ok(ErrorCoefficients { x_u, x_p })
}

/// `S = B^T D_v^-1 B` (symmetric positive semidefinite).
pub fn schur_matrix(m: &ErrorMatrices) -> Result<SparseMatrix> {
    let mut t = Vec::new();
    for l in 0..m.b.nrows() {
        let (cols, vals) = m.b.row(l);
        for (&j, &bj) in cols.iter().zip(vals) {
            for (&k, &bk) in cols.iter().zip(vals) {
                t.push((j, k, bj * bk / m.d_v[l]));
            }
        }
    }
    SparseMatrix::from_triplets(m.b.ncols(), m.b.ncols(), &t)
}

/// Stiffness replaced by its diagonal, full Schur complement:
/// `B^T D_v^-1 B x_p = F_p + B^T D_v^-1 F_v`, then back substitution.
pub fn solve_second_problem(m: &ErrorMatrices, r: &ResidualVectors) -> Result<ErrorCoefficients> {
    check_sizes(m, r)?;
    if let Some(dof) = m.d_v.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDiagonal { kind: "velocity bubble", dof });
    }
    let s = schur_matrix(m)?;
    let x_p = solver::factor(&s)?.solve(&schur_rhs(m, r)?)?;
    let x_u = back_substitute(m, r, &x_p)?;
    Ok(ErrorCoefficients { x_u, x_p })
}

/// Per-element `eta_p = |x_p,T| |b_T|_0`, `eta_v^2 = sum_j x_j^2 |phi_j|^2_{1,T}`
/// over the modes supported on `T`, `eta_d = |div u_h|_{0,T}`.
pub fn local_estimators(m: &ErrorMatrices, x: &ErrorCoefficients, dofmap: &DofMap, r: &ResidualVectors) -> LocalEstimates {
    let nt = dofmap.n_triangles;
    let mut est = LocalEstimates {
        eta_p: Vec::with_capacity(nt),
        eta_v: Vec::with_capacity(nt),
        eta_d: Vec::with_capacity(nt),
        eta_total: Vec::with_capacity(nt),
    };
    for t in 0..nt {
        let ep = x.x_p[t].abs() * m.bubble_mass[t].sqrt();
        let mut ev2 = 0.0;
        for (mode, node) in dofmap.bubble_nodes[t].iter().enumerate() {
            if let Some(n) = node {
                let c = x.x_u[2 * n].powi(2) + x.x_u[2 * n + 1].powi(2);
                ev2 += c * m.mode_seminorms[t][mode];
            }
        }
        let ed2 = r.div_sq[t];
        est.eta_p.push(ep);
        est.eta_v.push(ev2.sqrt());
        est.eta_d.push(ed2.sqrt());
        est.eta_total.push((ep * ep + ev2 + ed2).sqrt());
    }
    est
}

/// `eta_G = sqrt(sum_T eta_T^2)`; the breakdown is recomputed from the
/// coefficients for cross-checking.
pub fn global_estimator(locals: &LocalEstimates, m: &ErrorMatrices, x: &ErrorCoefficients, r: &ResidualVectors) -> GlobalEstimate {
    let eta_g = locals.eta_total.iter().map(|e| e * e).sum::<f64>().sqrt();
    let du: f64 = x.x_u.iter().zip(&m.d_v).map(|(a, d)| a * a * d).sum();
    let dp: f64 = x.x_p.iter().zip(&m.bubble_mass).map(|(a, w)| a * a * w).sum();
    GlobalEstimate {
        eta_g,
        d_norm_sq: du + dp,
        div_sq: r.div_sq.iter().sum(),
    }
}

/// Everything the adaptive loop needs from one estimate.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub matrices: ErrorMatrices,
    pub residuals: ResidualVectors,
    pub coefficients: ErrorCoefficients,
    pub locals: LocalEstimates,
    pub global: GlobalEstimate,
}

pub fn estimate<F>(mesh: &Mesh, dofmap: &DofMap, u: &[f64], p: &[f64], f: F, rule: &QuadratureRule) -> Result<Estimate>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    let matrices = assemble_error_matrices(mesh, dofmap, rule)?;
    let residuals = assemble_error_residuals(mesh, dofmap, u, p, f, rule)?;
    let coefficients = solve_third_problem(&matrices, &residuals)?;
    let locals = local_estimators(&matrices, &coefficients, dofmap, &residuals);
    let global = global_estimator(&locals, &matrices, &coefficients, &residuals);
    Ok(Estimate {
        matrices,
        residuals,
        coefficients,
        locals,
        global,
    })
}

/// `osc(f, T)^2 = h_T^2 |f - P_1 f|^2_{0,T}` with `P_1` the elementwise L2
/// projection onto linear vector fields. Returns the global value and the
/// per-element values.
pub fn oscillation<F>(f: F, mesh: &Mesh, rule: &QuadratureRule) -> Result<(f64, Vec<f64>)>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    let per: Vec<f64> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t)?;
            let vals: Vec<[f64; 2]> = rule.points.iter().map(|x| f(g.to_physical(*x))).collect();
            // moments (f_c, l_k)
            let mut mom = [[0.0; 3]; 2];
            for ((x, w), fx) in rule.iter().zip(&vals) {
                for c in 0..2 {
                    for k in 0..3 {
                        mom[c][k] += w * g.area * fx[c] * x[k];
                    }
                }
            }
            // P1 mass matrix |T|/12 (I + J); inverse 12/|T| (I - J/4)
            let mut coef = [[0.0; 3]; 2];
            for c in 0..2 {
                let s: f64 = mom[c].iter().sum();
                for k in 0..3 {
                    coef[c][k] = 12.0 / g.area * (mom[c][k] - 0.25 * s);
                }
            }
            let mut err = 0.0;
            for ((x, w), fx) in rule.iter().zip(&vals) {
                for c in 0..2 {
                    let proj: f64 = (0..3).map(|k| coef[c][k] * x[k]).sum();
                    err += w * g.area * (fx[c] - proj).powi(2);
                }
            }
            let h = mesh.diameter(t);
            Ok((h * h * err).sqrt())
        })
        .collect::<Result<_>>()?;
    let total = per.iter().map(|o| o * o).sum::<f64>().sqrt();
    Ok((total, per))
}

/// `kappa = eta_G / |(u - u_h, p - p_h)|_V`
pub fn effectivity(eta_g: f64, true_error: f64) -> Result<f64> {
    if true_error == 0.0 {
        return Err(Error::ZeroTrueError);
    }
    Ok(eta_g / true_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use crate::mesh::Triangle;
    use crate::quadrature::{rule, ASSEMBLY_DEGREE};
    use crate::spaces::build_dof_maps;

    fn reference() -> Mesh {
        Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![Triangle::new([0, 1, 2])],
            vec![],
            &BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn single_element_quantities() {
        let mesh = reference();
        let d = build_dof_maps(&mesh);
        let m = assemble_error_matrices(&mesh, &d, &rule(ASSEMBLY_DEGREE).unwrap()).unwrap();
        assert_eq!(m.c_s, 1);
        // (b_T, 1) = |T|/60, (b_T, b_T) = 2|T| 8/8!
        assert!((m.bubble_mean[0] - 0.5 / 60.0).abs() < 1e-16);
        assert!((m.bubble_mass[0] - 8.0 / 40320.0).abs() < 1e-17);
        // |b_T|_1^2 for b = (1 - x - y) x y, integrated symbolically: 1/90
        assert!((m.d_v[0] - 1.0 / 90.0).abs() < 1e-16);
        assert!(m.d_v.iter().all(|&v| v > 0.0));
        assert_eq!(m.d_v.len(), 6);
        assert!(m.d_p[0] > 0.0);
    }

    #[test]
    fn zero_residuals_give_zero_estimate() {
        let mesh = Mesh::unit_square(2).unwrap();
        let d = build_dof_maps(&mesh);
        let r = rule(ASSEMBLY_DEGREE).unwrap();
        let e = estimate(&mesh, &d, &vec![0.0; d.n_velocity_dofs()], &vec![0.0; d.n_pressure_dofs()], |_| [0.0; 2], &r).unwrap();
        assert_eq!(e.global.eta_g, 0.0);
        assert!(e.coefficients.x_u.iter().all(|&v| v == 0.0));
        assert!(e.locals.eta_total.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn positive_divergence_gives_negative_fp() {
        let mesh = reference();
        let d = build_dof_maps(&mesh);
        // u = (x, 0): div = 1
        let mut u = vec![0.0; d.n_velocity_dofs()];
        let pts = crate::assembly::velocity_node_points(&mesh);
        for (n, p) in pts.iter().enumerate() {
            u[2 * n] = p[0];
        }
        let r = assemble_error_residuals(&mesh, &d, &u, &[0.0; 3], |_| [0.0; 2], &rule(ASSEMBLY_DEGREE).unwrap()).unwrap();
        assert!((r.f_p[0] + 0.5 / 60.0).abs() < 1e-15);
        assert!((r.div_sq[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn csv_header() {
        let l = LocalEstimates {
            eta_p: vec![1.0],
            eta_v: vec![0.0],
            eta_d: vec![0.0],
            eta_total: vec![1.0],
        };
        assert!(l.to_csv().starts_with("element_id,eta_p,eta_v,eta_d,eta_total\n0,1e0,"));
    }

    #[test]
    fn oscillation_of_linear_load_vanishes() {
        let mesh = Mesh::unit_square(3).unwrap();
        let r = rule(ASSEMBLY_DEGREE).unwrap();
        let (o, _) = oscillation(|x| [2.0 * x[0] - x[1], 3.0], &mesh, &r).unwrap();
        assert!(o < 1e-13);
        assert_eq!(oscillation(|_| [0.0; 2], &mesh, &r).unwrap().0, 0.0);
    }

    #[test]
    fn effectivity_cases() {
        assert_eq!(effectivity(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(effectivity(4.0, 2.0).unwrap(), 2.0 * effectivity(2.0, 2.0).unwrap());
        assert!(matches!(effectivity(1.0, 0.0), Err(Error::ZeroTrueError)));
    }
}

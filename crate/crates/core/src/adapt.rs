//! SOLVE, ESTIMATE, MARK, REFINE.

use std::fmt::Write as _;
use std::time::Instant;

use crate::assembly::{apply_dirichlet, assemble_rhs, assemble_taylor_hood, attach_mean_zero, boundary_values};
use crate::error::{Error, Result};
use crate::estimator::{
    assemble_bubble_stiffness, estimate, solve_first_problem, solve_second_problem, Estimate,
};
use crate::mesh::{Mesh, Point};
use crate::quadrature::{rule, ASSEMBLY_DEGREE, ERROR_DEGREE};
use crate::solver::{self, RESIDUAL_TOL};
use crate::spaces::{build_dof_maps, DofMap};

pub trait ExactSolution: Sync {
    fn velocity(&self, x: Point) -> [f64; 2];
    /// `[[du1/dx, du1/dy], [du2/dx, du2/dy]]`
    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2];
    fn pressure(&self, x: Point) -> f64;
}

pub trait StokesProblem: Sync {
    fn body_force(&self, _x: Point) -> [f64; 2] {
        [0.0, 0.0]
    }

    /// Dirichlet value at a boundary node; `tags` are the sorted tags of the
    /// boundary edges meeting there.
    fn boundary_value(&self, x: Point, tags: &[u32]) -> [f64; 2];

    fn exact(&self) -> Option<&dyn ExactSolution> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorProblem {
    First,
    Second,
    Third,
}

impl std::str::FromStr for ErrorProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Self::First),
            "second" => Ok(Self::Second),
            "third" => Ok(Self::Third),
            _ => Err(Error::Config(format!("unknown error problem `{s}` (first|second|third)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopConfig {
    pub theta: f64,
    pub eps: f64,
    pub max_iterations: usize,
    /// Stop once the Taylor-Hood dof count reaches this value.
    pub max_dofs: Option<usize>,
    pub quad_degree: usize,
    pub error_quad_degree: usize,
    /// The third problem always drives marking; `First` and `Second`
    /// additionally evaluate that problem on meshes with at most
    /// `validation_max_elements` elements.
    pub error_problem: ErrorProblem,
    pub validation_max_elements: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            theta: 0.7,
            eps: 1e-8,
            max_iterations: 10,
            max_dofs: None,
            quad_degree: ASSEMBLY_DEGREE,
            error_quad_degree: ERROR_DEGREE,
            error_problem: ErrorProblem::Third,
            validation_max_elements: 2000,
        }
    }
}

impl LoopConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Config(format!("theta must lie in (0, 1), got {}", self.theta)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        rule(self.quad_degree)?;
        rule(self.error_quad_degree)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    pub solve: f64,
    pub estimate: f64,
    pub mark: f64,
    pub refine: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub n_triangles: usize,
    /// Taylor-Hood velocity plus pressure dofs.
    pub dofs: usize,
    pub bubble_dofs: usize,
    pub eta_g: f64,
    pub error: Option<f64>,
    pub kappa: Option<f64>,
    pub marked: usize,
    /// `|eta_G^2 - (|x|_D^2 + |div u_h|^2)| / eta_G^2`
    pub identity_defect: f64,
    /// Relative residual of the Taylor-Hood solve.
    pub solve_residual: f64,
    /// `(p_h, 1)`
    pub pressure_mean: f64,
    /// `(div u_h, 1)`
    pub divergence_integral: f64,
    /// Estimate from the first or second problem when requested.
    pub validation_eta: Option<f64>,
    pub timings: PhaseTimings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSolution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub multiplier: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub size: usize,
    pub nnz: usize,
    /// `|M x - b| / (|M|_max |x| + |b|)`
    pub relative_residual: f64,
}

/// Assembles and solves the Taylor-Hood system on `mesh`.
pub fn solve_stokes<P: StokesProblem + ?Sized>(
    mesh: &Mesh,
    dofmap: &DofMap,
    problem: &P,
    quad_degree: usize,
) -> Result<(DiscreteSolution, SolveStats)> {
    let r = rule(quad_degree)?;
    let mut system = assemble_taylor_hood(mesh, dofmap, &r)?;
    system.rhs_v = assemble_rhs(|x| problem.body_force(x), mesh, dofmap, &r)?;
    let g = boundary_values(mesh, dofmap, |x, tags| problem.boundary_value(x, tags));
    let system = apply_dirichlet(system, &g)?;
    let aug = attach_mean_zero(&system)?;
    let f = solver::factor(&aug.matrix)?;
    let x = f.solve(&aug.rhs)?;
    let res = f.residual(&x, &aug.rhs);
    let scale = aug.matrix.max_abs() * norm(&x) + norm(&aug.rhs);
    let stats = SolveStats {
        size: aug.matrix.nrows(),
        nnz: aug.matrix.nnz(),
        relative_residual: if scale > 0.0 { res / scale } else { 0.0 },
    };
    debug_assert!(stats.relative_residual <= RESIDUAL_TOL);
    let (velocity, pressure, multiplier) = aug.split(&x);
    Ok((
        DiscreteSolution {
            velocity,
            pressure,
            multiplier,
        },
        stats,
    ))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Minimal set carrying at least `theta` of the total: sort by decreasing
/// `eta_sq` (ties by smaller id) and take the shortest qualifying prefix.
/// Returns the ids in marking order; empty if all estimates vanish.
pub fn dorfler_mark(eta_sq: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Config(format!("theta must lie in (0, 1), got {theta}")));
    }
    if let Some(i) = eta_sq.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Config(format!("estimate {i} is negative or not finite")));
    }
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&a, &b| eta_sq[b].total_cmp(&eta_sq[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&i| eta_sq[i]).sum();
    if total == 0.0 {
        return Ok(vec![]);
    }
    let target = theta * total;
    let mut acc = 0.0;
    for (k, &i) in order.iter().enumerate() {
        acc += eta_sq[i];
        if acc >= target {
            order.truncate(k + 1);
            return Ok(order);
        }
    }
    Ok(order)
}

/// State handed to the observer once per iteration, after marking and
/// before refinement.
pub struct IterationState<'a> {
    pub iteration: usize,
    pub mesh: &'a Mesh,
    pub dofmap: &'a DofMap,
    pub solution: &'a DiscreteSolution,
    pub estimate: &'a Estimate,
    pub marked: &'a [usize],
    pub record: &'a IterationRecord,
}

#[derive(Clone, Debug)]
pub struct AdaptiveRun {
    pub records: Vec<IterationRecord>,
    pub mesh: Mesh,
    pub solution: DiscreteSolution,
}

pub fn adaptive_loop<P: StokesProblem + ?Sized>(mesh: Mesh, problem: &P, config: &LoopConfig) -> Result<AdaptiveRun> {
    adaptive_loop_with(mesh, problem, config, |_| Ok(()))
}

/// Velocity and pressure errors of a discrete solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    /// `|grad (u - u_h)|`
    pub velocity: f64,
    /// `|p - p_h|` after matching the means.
    pub pressure: f64,
}

impl ErrorNorms {
    /// `|(u - u_h, p - p_h)|_V`
    pub fn v_norm(&self) -> f64 {
        self.velocity.hypot(self.pressure)
    }
}

/// Elementwise quadrature of the V-norm error. The exact pressure is shifted
/// to the mean of the discrete one in the same quadrature.
pub fn error_norms(
    mesh: &Mesh,
    dofmap: &DofMap,
    solution: &DiscreteSolution,
    exact: &dyn ExactSolution,
    degree: usize,
) -> Result<ErrorNorms> {
    use crate::spaces::{p1_basis, p2_basis, Tabulation};
    use rayon::prelude::*;

    let r = rule(degree)?;
    let p2 = Tabulation::new(&p2_basis(), &r);
    let p1 = Tabulation::new(&p1_basis(), &r);
    let u = &solution.velocity;
    let p = &solution.pressure;
    // per element: |grad e_u|^2 and weighted p - p_h at the quadrature points
    let parts: Vec<(f64, Vec<(f64, f64)>)> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t)?;
            let vn = dofmap.velocity_nodes[t];
            let pn = dofmap.pressure_nodes[t];
            let mut e2 = 0.0;
            let mut dp = Vec::with_capacity(r.len());
            for (q, (xq, w)) in r.iter().enumerate() {
                let w = w * g.area;
                let x = g.to_physical(*xq);
                let mut gu = [[0.0; 2]; 2];
                for (i, &node) in vn.iter().enumerate() {
                    let gi = g.gradient(p2.d_bary(i, q));
                    for c in 0..2 {
                        gu[c][0] += u[2 * node + c] * gi[0];
                        gu[c][1] += u[2 * node + c] * gi[1];
                    }
                }
                let ge = exact.velocity_gradient(x);
                for c in 0..2 {
                    for d in 0..2 {
                        e2 += w * (ge[c][d] - gu[c][d]).powi(2);
                    }
                }
                let ph: f64 = (0..3).map(|k| p[pn[k]] * p1.value(k, q)).sum();
                dp.push((w, exact.pressure(x) - ph));
            }
            Ok((e2, dp))
        })
        .collect::<Result<_>>()?;
    let velocity = parts.iter().map(|(e, _)| e).sum::<f64>().sqrt();
    // two passes: subtracting the mean first avoids cancellation
    let shift = parts.iter().flat_map(|(_, d)| d).map(|(w, d)| w * d).sum::<f64>() / mesh.total_area();
    let press: f64 = parts.iter().flat_map(|(_, d)| d).map(|(w, d)| w * (d - shift).powi(2)).sum();
    Ok(ErrorNorms {
        velocity,
        pressure: press.sqrt(),
    })
}

/// `(div u_h, 1)`, exact since the divergence is linear on each element.
pub fn divergence_integral(mesh: &Mesh, dofmap: &DofMap, u: &[f64]) -> Result<f64> {
    use crate::spaces::p2_basis;
    let basis = p2_basis();
    let c = [1.0 / 3.0; 3];
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let g = mesh.geometry(t)?;
        let mut div = 0.0;
        for (i, &node) in dofmap.velocity_nodes[t].iter().enumerate() {
            let gi = g.gradient(basis[i].bary_gradient(c));
            div += u[2 * node] * gi[0] + u[2 * node + 1] * gi[1];
        }
        total += g.area * div;
    }
    Ok(total)
}

fn validation_eta(
    mesh: &Mesh,
    dofmap: &DofMap,
    est: &Estimate,
    config: &LoopConfig,
) -> Result<Option<f64>> {
    if config.error_problem == ErrorProblem::Third || mesh.n_triangles() > config.validation_max_elements {
        return Ok(None);
    }
    let div_sq = est.global.div_sq;
    let m = &est.matrices;
    let r = &est.residuals;
    let sq = match config.error_problem {
        ErrorProblem::Second => {
            let x = solve_second_problem(m, r)?;
            let du: f64 = x.x_u.iter().zip(&m.d_v).map(|(a, d)| a * a * d).sum();
            let dp: f64 = x.x_p.iter().zip(&m.bubble_mass).map(|(a, w)| a * a * w).sum();
            du + dp
        }
        _ => {
            let a_w = assemble_bubble_stiffness(mesh, dofmap, &rule(config.quad_degree)?)?;
            solve_first_problem(&a_w, m, r)?.v_norm.powi(2)
        }
    };
    Ok(Some((sq + div_sq).sqrt()))
}

/// The adaptive loop. Stops when `eta_G <= eps`, after `max_iterations`
/// refinements, or once `max_dofs` is reached. `observer` sees every
/// iteration before its refinement.
pub fn adaptive_loop_with<P, O>(mut mesh: Mesh, problem: &P, config: &LoopConfig, mut observer: O) -> Result<AdaptiveRun>
where
    P: StokesProblem + ?Sized,
    O: FnMut(&IterationState<'_>) -> Result<()>,
{
    config.validate()?;
    let est_rule = rule(config.quad_degree)?;
    let mut records = Vec::new();
    let mut iteration = 0;
    loop {
        let ctx = |e: Error| Error::Iteration {
            iteration,
            source: Box::new(e),
        };
        let dofmap = build_dof_maps(&mesh);

        let t0 = Instant::now();
        let (solution, stats) = solve_stokes(&mesh, &dofmap, problem, config.quad_degree).map_err(ctx)?;
        let t_solve = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let est = estimate(
            &mesh,
            &dofmap,
            &solution.velocity,
            &solution.pressure,
            |x| problem.body_force(x),
            &est_rule,
        )
        .map_err(ctx)?;
        let t_estimate = t0.elapsed().as_secs_f64();

        let eta_g = est.global.eta_g;
        let error = match problem.exact() {
            Some(exact) => Some(
                error_norms(&mesh, &dofmap, &solution, exact, config.error_quad_degree)
                    .map_err(ctx)?
                    .v_norm(),
            ),
            None => None,
        };
        let kappa = error.filter(|&e| e > 0.0).map(|e| eta_g / e);
        let validation = validation_eta(&mesh, &dofmap, &est, config).map_err(ctx)?;
        let pressure_mean: f64 = {
            let r = rule(2)?;
            let mut m = 0.0;
            for (t, pn) in dofmap.pressure_nodes.iter().enumerate() {
                let area = mesh.area(t);
                m += area * r.iter().map(|(x, w)| w * (0..3).map(|k| solution.pressure[pn[k]] * x[k]).sum::<f64>()).sum::<f64>();
            }
            m
        };

        let done = eta_g <= config.eps
            || iteration >= config.max_iterations
            || config.max_dofs.is_some_and(|d| dofmap.n_taylor_hood_dofs() >= d);

        let t0 = Instant::now();
        let eta_sq: Vec<f64> = est.locals.eta_total.iter().map(|e| e * e).collect();
        let marked = if done { vec![] } else { dorfler_mark(&eta_sq, config.theta).map_err(ctx)? };
        let t_mark = t0.elapsed().as_secs_f64();

        let mut record = IterationRecord {
            iteration,
            n_triangles: mesh.n_triangles(),
            dofs: dofmap.n_taylor_hood_dofs(),
            bubble_dofs: dofmap.n_bubble_dofs(),
            eta_g,
            error,
            kappa,
            marked: marked.len(),
            identity_defect: est.global.identity_defect(),
            solve_residual: stats.relative_residual,
            pressure_mean,
            divergence_integral: divergence_integral(&mesh, &dofmap, &solution.velocity)?,
            validation_eta: validation,
            timings: PhaseTimings {
                solve: t_solve,
                estimate: t_estimate,
                mark: t_mark,
                refine: 0.0,
            },
        };
        log::info!(
            "m={iteration} nt={} dof={} eta={eta_g:.4e} err={:?} marked={}",
            record.n_triangles,
            record.dofs,
            record.error,
            record.marked
        );
        observer(&IterationState {
            iteration,
            mesh: &mesh,
            dofmap: &dofmap,
            solution: &solution,
            estimate: &est,
            marked: &marked,
            record: &record,
        })?;

        if done || marked.is_empty() {
            records.push(record);
            return Ok(AdaptiveRun {
                records,
                mesh,
                solution,
            });
        }

        let t0 = Instant::now();
        mesh = mesh.refine(&marked).map_err(ctx)?;
        record.timings.refine = t0.elapsed().as_secs_f64();
        records.push(record);
        iteration += 1;
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// `m,nt,dof,eta_g,error,kappa,marked,t_solve,t_estimate,t_mark,t_refine`
pub fn records_to_csv(records: &[IterationRecord], timings: bool) -> String {
    let mut s = String::from("m,nt,dof,eta_g,error,kappa,marked,t_solve,t_estimate,t_mark,t_refine\n");
    for r in records {
        let t = if timings {
            format!(
                "{:.6},{:.6},{:.6},{:.6}",
                r.timings.solve, r.timings.estimate, r.timings.mark, r.timings.refine
            )
        } else {
            ",,,".to_string()
        };
        writeln!(
            s,
            "{},{},{},{:e},{},{},{},{t}",
            r.iteration,
            r.n_triangles,
            r.dofs,
            r.eta_g,
            opt(r.error),
            opt(r.kappa),
            r.marked
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dorfler_examples() {
        assert_eq!(dorfler_mark(&[4.0, 3.0, 2.0, 1.0], 0.5).unwrap(), vec![0, 1]);
        assert_eq!(dorfler_mark(&[1.0, 4.0, 2.0, 3.0], 0.5).unwrap(), vec![1, 3]);
        assert_eq!(dorfler_mark(&[1.0; 5], 0.999).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(dorfler_mark(&[0.3], 0.1).unwrap(), vec![0]);
        assert_eq!(dorfler_mark(&[2.0, 2.0, 1.0], 0.3).unwrap(), vec![0]);
        assert!(dorfler_mark(&[0.0, 0.0], 0.5).unwrap().is_empty());
        assert!(dorfler_mark(&[1.0], 1.0).is_err());
        assert!(dorfler_mark(&[-1.0], 0.5).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(LoopConfig::default().validate().is_ok());
        let bad = LoopConfig { theta: 1.5, ..LoopConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = LoopConfig { eps: 0.0, ..LoopConfig::default() };
        assert!(bad.validate().is_err());
        assert_eq!("second".parse::<ErrorProblem>().unwrap(), ErrorProblem::Second);
        assert!("fourth".parse::<ErrorProblem>().is_err());
    }

    #[test]
    fn csv_without_exact_solution_has_empty_fields() {
        let r = IterationRecord {
            iteration: 0,
            n_triangles: 2,
            dofs: 22,
            bubble_dofs: 18,
            eta_g: 0.5,
            error: None,
            kappa: None,
            marked: 1,
            identity_defect: 0.0,
            solve_residual: 0.0,
            pressure_mean: 0.0,
            divergence_integral: 0.0,
            validation_eta: None,
            timings: PhaseTimings::default(),
        };
        let csv = records_to_csv(&[r], false);
        assert_eq!(csv.lines().nth(1).unwrap(), "0,2,22,5e-1,,,1,,,,");
    }
}

//! The L-shape corner singularity and the lid-driven cavity.

use std::f64::consts::PI;
use std::fmt::Write as _;

pub use crate::adapt::{error_norms, ErrorNorms};
use crate::adapt::{
    adaptive_loop_with, divergence_integral, solve_stokes, AdaptiveRun, ExactSolution, IterationRecord,
    IterationState, LoopConfig, PhaseTimings, StokesProblem,
};
use crate::error::Result;
use crate::estimator::estimate;
use crate::mesh::{Mesh, Point};
use crate::quadrature::rule;
use crate::spaces::build_dof_maps;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularExponent {
    pub lambda: f64,
    pub omega: f64,
}

impl SingularExponent {
    /// `sin(lambda omega) + lambda sin(omega)`
    pub fn residual(&self) -> f64 {
        (self.lambda * self.omega).sin() + self.lambda * self.omega.sin()
    }
}

/// Smallest positive root of `sin(l w) + l sin(w) = 0` for `w = 3 pi / 2`,
/// by bisection on `(0.4, 0.9)`.
pub fn solve_lambda() -> SingularExponent {
    let omega = 1.5 * PI;
    let f = |l: f64| (l * omega).sin() + l * omega.sin();
    let (mut a, mut b) = (0.4, 0.9);
    let fa = f(a);
    while b - a > 1e-15 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    let lambda = if f(a).abs() < f(b).abs() { a } else { b };
    SingularExponent { lambda, omega }
}

/// The corner-singular Stokes solution on the L-shape
/// `(-1,1)^2 \ [0,1) x (-1,0]`, polar angle in `[0, 3 pi / 2]` measured
/// from the positive x-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LShapeSolution {
    pub lambda: f64,
    pub omega: f64,
    c: f64,
}

impl Default for LShapeSolution {
    fn default() -> Self {
        Self::new(solve_lambda())
    }
}

impl LShapeSolution {
    pub fn new(e: SingularExponent) -> Self {
        Self {
            lambda: e.lambda,
            omega: e.omega,
            c: (e.lambda * e.omega).cos(),
        }
    }

    /// `(r, phi)` with `phi` in `[0, 2 pi)`.
    pub fn polar(x: Point) -> (f64, f64) {
        let r = x[0].hypot(x[1]);
        let mut phi = x[1].atan2(x[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        (r, phi)
    }

    /// `[Psi, Psi', Psi'', Psi''']`
    pub fn psi(&self, phi: f64) -> [f64; 4] {
        let (l, c) = (self.lambda, self.c);
        let (a, b) = (1.0 + l, 1.0 - l);
        let (sa, ca) = (a * phi).sin_cos();
        let (sb, cb) = (b * phi).sin_cos();
        [
            sa * c / a - ca - sb * c / b + cb,
            c * ca + a * sa - c * cb - b * sb,
            -c * a * sa + a * a * ca + c * b * sb - b * b * cb,
            -c * a * a * ca - a * a * a * sa + c * b * b * cb + b * b * b * sb,
        ]
    }

    /// Angular factors `g1, g2` of `u = r^lambda (g1, g2)` and their
    /// derivatives.
    fn angular(&self, phi: f64) -> ([f64; 2], [f64; 2]) {
        let a = 1.0 + self.lambda;
        let [p0, p1, p2, _] = self.psi(phi);
        let (s, c) = phi.sin_cos();
        let g1 = a * s * p0 + c * p1;
        let g2 = s * p1 - a * c * p0;
        let dg1 = a * c * p0 + a * s * p1 - s * p1 + c * p2;
        let dg2 = c * p1 + s * p2 + a * s * p0 - a * c * p1;
        ([g1, g2], [dg1, dg2])
    }
}

impl ExactSolution for LShapeSolution {
    fn velocity(&self, x: Point) -> [f64; 2] {
        let (r, phi) = Self::polar(x);
        let (g, _) = self.angular(phi);
        let rl = r.powf(self.lambda);
        [rl * g[0], rl * g[1]]
    }

    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2] {
        let (r, phi) = Self::polar(x);
        let (g, dg) = self.angular(phi);
        let (s, c) = phi.sin_cos();
        let rl1 = r.powf(self.lambda - 1.0);
        std::array::from_fn(|k| {
            // d/dr = lambda r^(l-1) g, (1/r) d/dphi = r^(l-1) g'
            let dr = self.lambda * rl1 * g[k];
            let dphi = rl1 * dg[k];
            [c * dr - s * dphi, s * dr + c * dphi]
        })
    }

    fn pressure(&self, x: Point) -> f64 {
        let (r, phi) = Self::polar(x);
        let l = self.lambda;
        let p = self.psi(phi);
        -r.powf(l - 1.0) * ((1.0 + l).powi(2) * p[1] + p[3]) / (1.0 - l)
    }
}

/// Zero load, exact velocity as Dirichlet data.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Example1 {
    pub exact: LShapeSolution,
}

impl StokesProblem for Example1 {
    fn boundary_value(&self, x: Point, _tags: &[u32]) -> [f64; 2] {
        self.exact.velocity(x)
    }

    fn exact(&self) -> Option<&dyn ExactSolution> {
        Some(&self.exact)
    }
}

/// Lid-driven cavity on the unit square: `u = (1, 0)` on the open top edge,
/// zero elsewhere, including the two top corners.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cavity;

impl StokesProblem for Cavity {
    fn boundary_value(&self, x: Point, _tags: &[u32]) -> [f64; 2] {
        let tol = 1e-12;
        if (x[1] - 1.0).abs() < tol && x[0] > tol && x[0] < 1.0 - tol {
            [1.0, 0.0]
        } else {
            [0.0, 0.0]
        }
    }
}

/// `log(e_i / e_{i+1}) / log(n_{i+1} / n_i)`
pub fn order(n0: usize, e0: f64, n1: usize, e1: f64) -> f64 {
    (e0 / e1).ln() / (n1 as f64 / n0 as f64).ln()
}

/// Least-squares slope of `-log e` against `log n`.
pub fn fitted_order(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dofs: usize,
    pub error: Option<f64>,
    pub error_order: Option<f64>,
    pub eta_g: f64,
    pub eta_order: Option<f64>,
    pub kappa: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn from_records(records: &[IterationRecord]) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| &records[j]);
            let error_order = prev.and_then(|p| Some(order(p.dofs, p.error?, r.dofs, r.error?)));
            let eta_order = prev.map(|p| order(p.dofs, p.eta_g, r.dofs, r.eta_g));
            rows.push(ConvergenceRow {
                dofs: r.dofs,
                error: r.error,
                error_order,
                eta_g: r.eta_g,
                eta_order,
                kappa: r.kappa,
            });
        }
        Self { rows }
    }

    /// `dof,error,error_order,eta_g,eta_order,kappa`
    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        let mut s = String::from("dof,error,error_order,eta_g,eta_order,kappa\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{:.6e},{},{}",
                r.dofs,
                f(r.error),
                f(r.error_order),
                r.eta_g,
                f(r.eta_order),
                f(r.kappa)
            )
            .unwrap();
        }
        s
    }
}

/// Initial Example 1 mesh: the 12-triangle L-shape refined once (259
/// Taylor-Hood dofs).
pub fn example1_initial_mesh() -> Result<Mesh> {
    Mesh::l_shape()?.refine_uniform()
}

/// Initial cavity mesh: 8 x 8 squares split along diagonals mirrored about
/// `x = 1/2`, so both lid corners see the same local mesh.
pub fn example2_initial_mesh() -> Result<Mesh> {
    Mesh::unit_square_mirrored(8)
}

pub fn run_example1<O>(config: &LoopConfig, observer: O) -> Result<AdaptiveRun>
where
    O: FnMut(&IterationState<'_>) -> Result<()>,
{
    adaptive_loop_with(example1_initial_mesh()?, &Example1::default(), config, observer)
}

pub fn run_example2<O>(config: &LoopConfig, observer: O) -> Result<AdaptiveRun>
where
    O: FnMut(&IterationState<'_>) -> Result<()>,
{
    adaptive_loop_with(example2_initial_mesh()?, &Cavity, config, observer)
}

/// Solve, estimate and measure on `levels + 1` uniformly refined meshes.
pub fn run_uniform<P: StokesProblem + ?Sized>(
    mut mesh: Mesh,
    problem: &P,
    levels: usize,
    config: &LoopConfig,
) -> Result<Vec<IterationRecord>> {
    let est_rule = rule(config.quad_degree)?;
    let mut records = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        let dofmap = build_dof_maps(&mesh);
        let (solution, stats) = solve_stokes(&mesh, &dofmap, problem, config.quad_degree)?;
        let est = estimate(
            &mesh,
            &dofmap,
            &solution.velocity,
            &solution.pressure,
            |x| problem.body_force(x),
            &est_rule,
        )?;
        let error = match problem.exact() {
            Some(exact) => Some(error_norms(&mesh, &dofmap, &solution, exact, config.error_quad_degree)?.v_norm()),
            None => None,
        };
        records.push(IterationRecord {
            iteration: level,
            n_triangles: mesh.n_triangles(),
            dofs: dofmap.n_taylor_hood_dofs(),
            bubble_dofs: dofmap.n_bubble_dofs(),
            eta_g: est.global.eta_g,
            error,
            kappa: error.map(|e| est.global.eta_g / e),
            marked: if level < levels { mesh.n_triangles() } else { 0 },
            identity_defect: est.global.identity_defect(),
            solve_residual: stats.relative_residual,
            pressure_mean: 0.0,
            divergence_integral: divergence_integral(&mesh, &dofmap, &solution.velocity)?,
            validation_eta: None,
            timings: PhaseTimings::default(),
        });
        if level < levels {
            mesh = mesh.refine_uniform()?;
        }
    }
    Ok(records)
}

/// Nodal pressure field as text: header `np nt`, then `p x y value` per
/// vertex and `t i j k` per triangle.
pub fn pressure_to_text(mesh: &Mesh, pressure: &[f64]) -> String {
    let mut s = String::new();
    writeln!(s, "{} {}", mesh.n_vertices(), mesh.n_triangles()).unwrap();
    for (v, p) in mesh.vertices().iter().zip(pressure) {
        writeln!(s, "p {} {} {}", v[0], v[1], p).unwrap();
    }
    for t in mesh.triangles() {
        let [a, b, c] = t.vertices;
        writeln!(s, "t {a} {b} {c}").unwrap();
    }
    s
}

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stokes_afem::adapt::{solve_stokes, DiscreteSolution, ExactSolution, StokesProblem};
use stokes_afem::assembly::SparseMatrix;
use stokes_afem::mesh::{Mesh, Point};
use stokes_afem::spaces::{build_dof_maps, DofMap};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.triplets() {
        d[(i, j)] += v;
    }
    d
}

pub fn dense_solve(m: DMatrix<f64>, rhs: &[f64]) -> Vec<f64> {
    let b = DVector::from_column_slice(rhs);
    m.lu().solve(&b).expect("oracle matrix is singular").as_slice().to_vec()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Unit square with interior vertices moved by up to `amount` of the mesh
/// width.
pub fn perturbed_square(n: usize, amount: f64, seed: u64) -> Mesh {
    let base = Mesh::unit_square(n).unwrap();
    let mut r = rng(seed);
    let h = 1.0 / n as f64;
    let verts: Vec<Point> = base
        .vertices()
        .iter()
        .map(|&[x, y]| {
            let inner = x > 1e-12 && x < 1.0 - 1e-12 && y > 1e-12 && y < 1.0 - 1e-12;
            if inner {
                [x + amount * h * r.random_range(-1.0..1.0), y + amount * h * r.random_range(-1.0..1.0)]
            } else {
                [x, y]
            }
        })
        .collect();
    let tags = base.boundary_tags();
    Mesh::new(verts, base.triangles().to_vec(), Vec::new(), &tags).unwrap()
}

/// Meshes with at most 50 triangles.
pub fn small_meshes() -> Vec<(String, Mesh)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push((format!("square{n}"), Mesh::unit_square(n).unwrap()));
    }
    out.push(("perturbed3".into(), perturbed_square(3, 0.25, 7)));
    out.push(("perturbed4".into(), perturbed_square(4, 0.3, 11)));
    let l = Mesh::l_shape().unwrap();
    out.push(("lshape".into(), l.clone()));
    let local = l.refine(&[0, 5]).unwrap();
    out.push(("lshape_local".into(), local.clone()));
    let local2 = local.refine(&[1]).unwrap();
    if local2.n_triangles() <= 50 {
        out.push(("lshape_local2".into(), local2));
    }
    let sq = Mesh::unit_square(2).unwrap().refine(&[3]).unwrap();
    out.push(("square2_local".into(), sq));
    for (name, m) in &out {
        assert!(m.n_triangles() <= 50, "{name} has {} triangles", m.n_triangles());
    }
    out
}

pub fn random_fields(dofmap: &DofMap, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let u = (0..dofmap.n_velocity_dofs()).map(|_| r.random_range(-1.0..1.0)).collect();
    let p = (0..dofmap.n_pressure_dofs()).map(|_| r.random_range(-1.0..1.0)).collect();
    (u, p)
}

pub fn random_load(seed: u64) -> impl Fn(Point) -> [f64; 2] + Sync {
    let mut r = rng(seed);
    let c: [f64; 6] = std::array::from_fn(|_| r.random_range(-2.0..2.0));
    move |[x, y]: Point| [c[0] + c[1] * x * y + c[2] * (3.0 * y).sin(), c[3] + c[4] * x * x + c[5] * (2.0 * x).cos()]
}

/// `u = (x^2, -2xy)`, `p = x - y`; divergence free, representable in P2 x P1,
/// with `f = -lap u + grad p = (-1, -1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct QuadraticFlow {
    pub p_shift: f64,
}

impl ExactSolution for QuadraticFlow {
    fn velocity(&self, [x, y]: Point) -> [f64; 2] {
        [x * x, -2.0 * x * y]
    }
    fn velocity_gradient(&self, [x, y]: Point) -> [[f64; 2]; 2] {
        [[2.0 * x, 0.0], [-2.0 * y, -2.0 * x]]
    }
    fn pressure(&self, [x, y]: Point) -> f64 {
        x - y + self.p_shift
    }
}

impl StokesProblem for QuadraticFlow {
    fn body_force(&self, _x: Point) -> [f64; 2] {
        [-1.0, -1.0]
    }
    fn boundary_value(&self, x: Point, _tags: &[u32]) -> [f64; 2] {
        self.velocity(x)
    }
    fn exact(&self) -> Option<&dyn ExactSolution> {
        Some(self)
    }
}

pub fn solve(mesh: &Mesh, problem: &dyn StokesProblem) -> (DofMap, DiscreteSolution) {
    let dofmap = build_dof_maps(mesh);
    let (sol, _) = solve_stokes(mesh, &dofmap, problem, 8).unwrap();
    (dofmap, sol)
}

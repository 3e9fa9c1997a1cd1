//! Conforming triangle meshes with red-green refinement.
//!
//! A [`Mesh`] is immutable: [`Mesh::refine`] returns a new mesh. Triangles are
//! stored counter-clockwise, edges are kept in a deterministic order (sorted by
//! smaller then larger vertex id) and boundary edges carry an integer tag so
//! that piecewise boundary data can be attached to them.

mod geometry;
mod io;
mod refine;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub use geometry::TriangleGeometry;

pub type Point = [f64; 2];

/// Tag given to boundary edges that were not tagged explicitly.
pub const DEFAULT_BOUNDARY_TAG: u32 = 1;

/// Monitored lower bound on triangle angles, in degrees.
pub const MIN_ANGLE_FLOOR_DEG: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefinementState {
    Unrefined,
    RedChild,
    GreenChild,
}

impl RefinementState {
    pub fn code(self) -> u32 {
        match self {
            RefinementState::Unrefined => 0,
            RefinementState::RedChild => 1,
            RefinementState::GreenChild => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(RefinementState::Unrefined),
            1 => Some(RefinementState::RedChild),
            2 => Some(RefinementState::GreenChild),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    /// Vertex ids, counter-clockwise.
    pub vertices: [usize; 3],
    pub state: RefinementState,
    /// Index into [`Mesh::ancestors`]. For green children the ancestor is
    /// stored rotated so that its split edge is `(v0, v1)`.
    pub parent: Option<usize>,
}

impl Triangle {
    pub fn new(vertices: [usize; 3]) -> Self {
        Self {
            vertices,
            state: RefinementState::Unrefined,
            parent: None,
        }
    }

    /// Local edge `k` joins local vertices `k` and `k + 1 (mod 3)`.
    pub fn local_edge(&self, k: usize) -> (usize, usize) {
        (self.vertices[k], self.vertices[(k + 1) % 3])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Sorted vertex pair.
    pub vertices: [usize; 2],
    pub triangles: (usize, Option<usize>),
    /// `Some` exactly for boundary edges.
    pub boundary_tag: Option<u32>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles.1.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeTable {
    pub edges: Vec<Edge>,
    /// Global edge id of each local edge, per triangle.
    pub triangle_edges: Vec<[usize; 3]>,
    lookup: HashMap<(usize, usize), usize>,
}

impl EdgeTable {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn find(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&sorted(a, b)).copied()
    }

    pub fn n_boundary(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }
}

pub(crate) fn sorted(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds the edge table of a triangle list.
///
/// Boundary tags are looked up in `tags` by sorted vertex pair; untagged
/// boundary edges get [`DEFAULT_BOUNDARY_TAG`].
pub fn build_edges(
    triangles: &[Triangle],
    tags: &BTreeMap<(usize, usize), u32>,
) -> Result<EdgeTable> {
    let mut adjacency: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = tri.local_edge(k);
            adjacency.entry(sorted(a, b)).or_default().push(t);
        }
    }
    let mut edges = Vec::with_capacity(adjacency.len());
    let mut lookup = HashMap::with_capacity(adjacency.len());
    for ((a, b), tris) in adjacency {
        let triangles = match tris.as_slice() {
            [t0] => (*t0, None),
            [t0, t1] => (*t0, Some(*t1)),
            _ => return Err(Error::NonManifoldEdge(a, b)),
        };
        let boundary_tag = triangles
            .1
            .is_none()
            .then(|| tags.get(&(a, b)).copied().unwrap_or(DEFAULT_BOUNDARY_TAG));
        lookup.insert((a, b), edges.len());
        edges.push(Edge {
            vertices: [a, b],
            triangles,
            boundary_tag,
        });
    }
    let triangle_edges = triangles
        .iter()
        .map(|tri| {
            let mut ids = [0; 3];
            for (k, id) in ids.iter_mut().enumerate() {
                let (a, b) = tri.local_edge(k);
                *id = lookup[&sorted(a, b)];
            }
            ids
        })
        .collect();
    Ok(EdgeTable {
        edges,
        triangle_edges,
        lookup,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    ancestors: Vec<[usize; 3]>,
    edges: EdgeTable,
}

impl Mesh {
    /// Validates and assembles a mesh. Triangles must be counter-clockwise
    /// with positive area.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        ancestors: Vec<[usize; 3]>,
        boundary_tags: &BTreeMap<(usize, usize), u32>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        if let Some(i) = vertices
            .iter()
            .position(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
        }
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.vertices;
            if a >= nv || b >= nv || c >= nv {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            if a == b || b == c || a == c {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has repeated vertices"
                )));
            }
            if let Some(p) = tri.parent {
                if p >= ancestors.len() {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references a missing ancestor"
                    )));
                }
            }
            let area = signed_area(&[vertices[a], vertices[b], vertices[c]]);
            if area <= 0.0 {
                return Err(Error::DegenerateTriangle(t, area));
            }
        }
        let edges = build_edges(&triangles, boundary_tags)?;
        Ok(Self {
            vertices,
            triangles,
            ancestors,
            edges,
        })
    }

    /// `n x n` squares over the unit square, each split along its
    /// lower-left to upper-right diagonal. Boundary tags: bottom 1, right 2,
    /// top 3, left 4.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::square_grid(n, |_, _| false)
    }

    /// Like [`Mesh::unit_square`], but squares in the right half use the
    /// other diagonal, so the mesh is symmetric about `x = 1/2` for even `n`.
    pub fn unit_square_mirrored(n: usize) -> Result<Self> {
        Self::square_grid(n, |i, n| 2 * i >= n)
    }

    fn square_grid(n: usize, anti_diagonal: impl Fn(usize, usize) -> bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh("need at least one subdivision".into()));
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let h = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                let coord = |k: usize| if k == n { 1.0 } else { k as f64 * h };
                vertices.push([coord(i), coord(j)]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                if anti_diagonal(i, n) {
                    triangles.push(Triangle::new([v00, v10, v01]));
                    triangles.push(Triangle::new([v10, v11, v01]));
                } else {
                    triangles.push(Triangle::new([v00, v10, v11]));
                    triangles.push(Triangle::new([v00, v11, v01]));
                }
            }
        }
        let mut tags = BTreeMap::new();
        for k in 0..n {
            tags.insert(sorted(id(k, 0), id(k + 1, 0)), 1);
            tags.insert(sorted(id(n, k), id(n, k + 1)), 2);
            tags.insert(sorted(id(k, n), id(k + 1, n)), 3);
            tags.insert(sorted(id(0, k), id(0, k + 1)), 4);
        }
        Self::new(vertices, triangles, Vec::new(), &tags)
    }

    /// The L-shaped domain `(-1,1)^2 \ [0,1) x (-1,0]` as three unit squares,
    /// each cut into four triangles through its centre (12 triangles).
    ///
    /// Boundary segments are tagged counter-clockwise starting from the
    /// segment `(0,0)-(1,0)`: 1 .. 6.
    pub fn l_shape() -> Result<Self> {
        let vertices: Vec<Point> = vec![
            [-1.0, -1.0],
            [0.0, -1.0],
            [-1.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
            [-1.0, 1.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [-0.5, -0.5],
            [-0.5, 0.5],
            [0.5, 0.5],
        ];
        // Each square as (centre, counter-clockwise corners).
        let squares = [(8, [0, 1, 3, 2]), (9, [2, 3, 6, 5]), (10, [3, 4, 7, 6])];
        let mut triangles = Vec::with_capacity(12);
        for (c, corners) in squares {
            for k in 0..4 {
                triangles.push(Triangle::new([c, corners[k], corners[(k + 1) % 4]]));
            }
        }
        let segment_tag = |p: Point, q: Point| -> u32 {
            let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            if m[1] == 0.0 && m[0] > 0.0 {
                1
            } else if m[0] == 1.0 {
                2
            } else if m[1] == 1.0 {
                3
            } else if m[0] == -1.0 {
                4
            } else if m[1] == -1.0 {
                5
            } else {
                6
            }
        };
        let probe = build_edges(&triangles, &BTreeMap::new())?;
        let tags = probe
            .edges
            .iter()
            .filter(|e| e.is_boundary())
            .map(|e| {
                let [a, b] = e.vertices;
                ((a, b), segment_tag(vertices[a], vertices[b]))
            })
            .collect();
        Self::new(vertices, triangles, Vec::new(), &tags)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn ancestors(&self) -> &[[usize; 3]] {
        &self.ancestors
    }

    pub fn edges(&self) -> &EdgeTable {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t].vertices;
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn geometry(&self, t: usize) -> Result<TriangleGeometry> {
        TriangleGeometry::new(self.triangle_points(t)).ok_or_else(|| {
            Error::DegenerateTriangle(t, signed_area(&self.triangle_points(t)))
        })
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.triangle_points(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let p = self.triangle_points(t);
        [
            (p[0][0] + p[1][0] + p[2][0]) / 3.0,
            (p[0][1] + p[1][1] + p[2][1]) / 3.0,
        ]
    }

    /// Longest edge length of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        (0..3)
            .map(|k| dist(p[k], p[(k + 1) % 3]))
            .fold(0.0, f64::max)
    }

    /// Boundary flag per vertex.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.n_vertices()];
        for e in self.edges.edges.iter().filter(|e| e.is_boundary()) {
            flags[e.vertices[0]] = true;
            flags[e.vertices[1]] = true;
        }
        flags
    }

    pub fn boundary_tags(&self) -> BTreeMap<(usize, usize), u32> {
        self.edges
            .edges
            .iter()
            .filter_map(|e| e.boundary_tag.map(|tag| ((e.vertices[0], e.vertices[1]), tag)))
            .collect()
    }

    /// `#V - #E + #T`; equals 1 for a simply connected domain.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    /// Max over triangles of `h_T / rho_T` (longest edge over inradius).
    pub fn shape_regularity(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in 0..self.n_triangles() {
            let p = self.triangle_points(t);
            let area = signed_area(&p);
            if area <= 0.0 {
                return Err(Error::DegenerateTriangle(t, area));
            }
            let lengths = [dist(p[0], p[1]), dist(p[1], p[2]), dist(p[2], p[0])];
            let semi = 0.5 * lengths.iter().sum::<f64>();
            let h = lengths.iter().cloned().fold(0.0, f64::max);
            worst = worst.max(h * semi / area);
        }
        Ok(worst)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| min_angle(&self.triangle_points(t)))
            .fold(180.0, f64::min)
    }

    /// Hanging vertices: vertices sitting exactly at the midpoint of an edge
    /// that has only one adjacent triangle. Red-green refinement only ever
    /// creates midpoints, so this detects every possible non-conformity.
    pub fn hanging_vertices(&self) -> Vec<usize> {
        let index: HashMap<(u64, u64), usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, p)| ((p[0].to_bits(), p[1].to_bits()), i))
            .collect();
        let mut hanging = Vec::new();
        for e in self.edges.edges.iter().filter(|e| e.is_boundary()) {
            let m = midpoint(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]);
            if let Some(&v) = index.get(&(m[0].to_bits(), m[1].to_bits())) {
                hanging.push(v);
            }
        }
        hanging
    }

    pub fn is_conforming(&self) -> bool {
        self.hanging_vertices().is_empty()
    }

    pub fn refine(&self, marks: &[usize]) -> Result<Mesh> {
        refine::refine(self, marks)
    }

    pub fn refine_uniform(&self) -> Result<Mesh> {
        let all: Vec<usize> = (0..self.n_triangles()).collect();
        self.refine(&all)
    }
}

pub(crate) fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

/// Edge midpoint by coordinate averaging.
pub(crate) fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn min_angle(p: &[Point; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let o = p[k];
            let u = [p[(k + 1) % 3][0] - o[0], p[(k + 1) % 3][1] - o[1]];
            let v = [p[(k + 2) % 3][0] - o[0], p[(k + 2) % 3][1] - o[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            cross.abs().atan2(dot).to_degrees()
        })
        .fold(180.0, f64::min)
}

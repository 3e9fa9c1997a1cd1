//! Local polynomial bases and global numbering.
//!
//! * Taylor-Hood: P2 velocity (3 vertex + 3 edge-midpoint functions per
//!   component) and P1 pressure.
//! * Auxiliary bubble space: per component nine quartic velocity modes per
//!   element and one cubic pressure bubble. For an edge `{i, j}` the modes are
//!   `l_i l_j (l_i - l_j)` and `l_i^2 l_j^2`; the element modes are
//!   `b_T = l_0 l_1 l_2`, `b_T l_0` and `b_T l_1`. They span a complement of
//!   the quadratic edge bubbles inside the quartic edge/element bubbles, so the
//!   auxiliary space meets the Taylor-Hood space only in zero.
//!
//! Local edge `k` joins local vertices `k` and `k + 1 (mod 3)`.

mod dofs;
mod poly;

pub use dofs::{build_dof_maps, DofMap};
pub use poly::BaryPoly;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

pub const N_P2: usize = 6;
pub const N_P1: usize = 3;
pub const N_BUBBLE_MODES: usize = 9;

/// P2 Lagrange basis: vertex functions `l_i (2 l_i - 1)`, then edge functions
/// `4 l_k l_{k+1}`.
pub fn p2_basis() -> Vec<BaryPoly> {
    let mut basis = Vec::with_capacity(N_P2);
    for i in 0..3 {
        let mut sq = [0; 3];
        sq[i] = 2;
        let mut lin = [0; 3];
        lin[i] = 1;
        basis.push(BaryPoly::from_terms(&[(2.0, sq), (-1.0, lin)]));
    }
    for k in 0..3 {
        let mut e = [0; 3];
        e[k] = 1;
        e[(k + 1) % 3] = 1;
        basis.push(BaryPoly::monomial(4.0, e));
    }
    basis
}

pub fn p1_basis() -> Vec<BaryPoly> {
    (0..3).map(BaryPoly::lambda).collect()
}

/// Value and reference-coordinate gradient of P2 function `index` at a
/// barycentric point. On the reference triangle `(0,0), (1,0), (0,1)`:
/// `l_0 = 1 - x - y`, `l_1 = x`, `l_2 = y`.
pub fn p2_eval(index: usize, bary: [f64; 3]) -> Result<(f64, [f64; 2])> {
    if index >= N_P2 {
        return Err(Error::BasisIndex(index, N_P2));
    }
    let phi = &p2_basis()[index];
    let d = phi.bary_gradient(bary);
    Ok((phi.eval(bary), [d[1] - d[0], d[2] - d[0]]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    /// `l_i l_j (l_i - l_j)` on local edge `edge`, `i` the globally smaller vertex.
    EdgeCubic { edge: usize },
    /// `l_i^2 l_j^2` on local edge `edge`.
    EdgeQuartic { edge: usize },
    /// `b_T`, `b_T l_0`, `b_T l_1` for index 0, 1, 2.
    Element(usize),
}

impl ModeKind {
    pub fn edge(self) -> Option<usize> {
        match self {
            ModeKind::EdgeCubic { edge } | ModeKind::EdgeQuartic { edge } => Some(edge),
            ModeKind::Element(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BubbleMode {
    pub kind: ModeKind,
    pub poly: BaryPoly,
}

/// Mode order: `[cubic e0, quartic e0, cubic e1, quartic e1, cubic e2,
/// quartic e2, b_T, b_T l_0, b_T l_1]`.
pub fn mode_kinds() -> [ModeKind; N_BUBBLE_MODES] {
    [
        ModeKind::EdgeCubic { edge: 0 },
        ModeKind::EdgeQuartic { edge: 0 },
        ModeKind::EdgeCubic { edge: 1 },
        ModeKind::EdgeQuartic { edge: 1 },
        ModeKind::EdgeCubic { edge: 2 },
        ModeKind::EdgeQuartic { edge: 2 },
        ModeKind::Element(0),
        ModeKind::Element(1),
        ModeKind::Element(2),
    ]
}

/// Velocity bubble modes (one scalar component) in local orientation: the
/// cubic edge modes use `l_k l_{k+1} (l_k - l_{k+1})`.
pub fn local_bubble_modes() -> Vec<BubbleMode> {
    modes_oriented(|_| true)
}

/// Velocity bubble modes of an element with the given global vertex ids. The
/// sign of each cubic edge mode follows the global vertex order, so the two
/// elements sharing an edge produce the same trace.
pub fn bubble_velocity_modes(global_vertices: [usize; 3]) -> Vec<BubbleMode> {
    modes_oriented(|k| global_vertices[k] < global_vertices[(k + 1) % 3])
}

/// `forward(k)` selects `l_k l_{k+1} (l_k - l_{k+1})` over its negative.
fn modes_oriented(forward: impl Fn(usize) -> bool) -> Vec<BubbleMode> {
    mode_kinds()
        .into_iter()
        .map(|kind| {
            let poly = match kind {
                ModeKind::EdgeCubic { edge } => {
                    let (i, j) = (edge, (edge + 1) % 3);
                    let (i, j) = if forward(edge) { (i, j) } else { (j, i) };
                    let mut a = [0; 3];
                    a[i] = 2;
                    a[j] = 1;
                    let mut b = [0; 3];
                    b[i] = 1;
                    b[j] = 2;
                    BaryPoly::from_terms(&[(1.0, a), (-1.0, b)])
                }
                ModeKind::EdgeQuartic { edge } => {
                    let mut e = [0; 3];
                    e[edge] = 2;
                    e[(edge + 1) % 3] = 2;
                    BaryPoly::monomial(1.0, e)
                }
                ModeKind::Element(k) => {
                    let mut e = [1; 3];
                    if k > 0 {
                        e[k - 1] += 1;
                    }
                    BaryPoly::monomial(1.0, e)
                }
            };
            BubbleMode { kind, poly }
        })
        .collect()
}

/// Sign of the cubic mode on local edge `edge` relative to the local
/// orientation returned by [`local_bubble_modes`].
pub fn cubic_edge_sign(global_vertices: [usize; 3], edge: usize) -> f64 {
    if global_vertices[edge] < global_vertices[(edge + 1) % 3] {
        1.0
    } else {
        -1.0
    }
}

/// The pressure bubble `b_T = l_0 l_1 l_2`.
pub fn bubble_pressure_mode() -> BaryPoly {
    BaryPoly::monomial(1.0, [1, 1, 1])
}

/// Values and barycentric derivatives of a set of polynomials at the points
/// of a quadrature rule. These do not depend on the element, so one table
/// serves a whole mesh.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_functions: usize,
    pub n_points: usize,
    values: Vec<f64>,
    d_bary: Vec<[f64; 3]>,
}

impl Tabulation {
    pub fn new(polys: &[BaryPoly], rule: &QuadratureRule) -> Self {
        let n_points = rule.len();
        let mut values = Vec::with_capacity(polys.len() * n_points);
        let mut d_bary = Vec::with_capacity(polys.len() * n_points);
        for p in polys {
            for q in &rule.points {
                values.push(p.eval(*q));
                d_bary.push(p.bary_gradient(*q));
            }
        }
        Self {
            n_functions: polys.len(),
            n_points,
            values,
            d_bary,
        }
    }

    #[inline]
    pub fn value(&self, f: usize, q: usize) -> f64 {
        self.values[f * self.n_points + q]
    }

    #[inline]
    pub fn d_bary(&self, f: usize, q: usize) -> [f64; 3] {
        self.d_bary[f * self.n_points + q]
    }
}

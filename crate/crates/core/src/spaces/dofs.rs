use crate::mesh::Mesh;

use super::{cubic_edge_sign, mode_kinds, ModeKind, N_BUBBLE_MODES};

/// Global numbering of the Taylor-Hood and bubble degrees of freedom.
///
/// Velocity nodes are the vertices followed by the edges (edge `e` is node
/// `n_vertices + e`); velocity dof of node `n`, component `c` is `2 n + c`.
/// Pressure dofs are the vertices.
///
/// Bubble velocity "nodes" are numbered interior edges first (two modes
/// each: cubic, quartic), then elements (three modes each); the dof of bubble
/// node `n`, component `c` is again `2 n + c`. Boundary edges carry no
/// bubble modes. There is one pressure bubble per element.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_triangles: usize,
    pub n_interior_edges: usize,
    /// Dirichlet flag per Taylor-Hood velocity dof.
    pub dirichlet: Vec<bool>,
    /// Per element: velocity node ids of the six P2 functions.
    pub velocity_nodes: Vec<[usize; 6]>,
    /// Per element: pressure dof ids of the three P1 functions.
    pub pressure_nodes: Vec<[usize; 3]>,
    /// Interior index of each edge, `None` on the boundary.
    pub interior_edge: Vec<Option<usize>>,
    /// Per element and mode: bubble velocity node, `None` for modes on
    /// boundary edges.
    pub bubble_nodes: Vec<[Option<usize>; N_BUBBLE_MODES]>,
    /// Per element and mode: orientation sign applied to the local mode.
    pub bubble_signs: Vec<[f64; N_BUBBLE_MODES]>,
}

impl DofMap {
    pub fn n_velocity_nodes(&self) -> usize {
        self.n_vertices + self.n_edges
    }

    pub fn n_velocity_dofs(&self) -> usize {
        2 * self.n_velocity_nodes()
    }

    pub fn n_pressure_dofs(&self) -> usize {
        self.n_vertices
    }

    /// Velocity plus pressure dofs of the Taylor-Hood pair.
    pub fn n_taylor_hood_dofs(&self) -> usize {
        self.n_velocity_dofs() + self.n_pressure_dofs()
    }

    pub fn n_bubble_velocity_nodes(&self) -> usize {
        2 * self.n_interior_edges + 3 * self.n_triangles
    }

    /// `N_v = 2 (3 #T + 2 #interior edges)`.
    pub fn n_bubble_velocity_dofs(&self) -> usize {
        2 * self.n_bubble_velocity_nodes()
    }

    /// `N_p = #T`.
    pub fn n_bubble_pressure_dofs(&self) -> usize {
        self.n_triangles
    }

    pub fn n_bubble_dofs(&self) -> usize {
        self.n_bubble_velocity_dofs() + self.n_bubble_pressure_dofs()
    }
}

pub fn build_dof_maps(mesh: &Mesh) -> DofMap {
    let nv = mesh.n_vertices();
    let edges = mesh.edges();
    let ne = edges.len();
    let nt = mesh.n_triangles();

    let mut dirichlet = vec![false; 2 * (nv + ne)];
    let mut interior_edge = vec![None; ne];
    let mut n_interior = 0;
    for (e, edge) in edges.edges.iter().enumerate() {
        if edge.is_boundary() {
            for node in [edge.vertices[0], edge.vertices[1], nv + e] {
                dirichlet[2 * node] = true;
                dirichlet[2 * node + 1] = true;
            }
        } else {
            interior_edge[e] = Some(n_interior);
            n_interior += 1;
        }
    }

    let kinds = mode_kinds();
    let mut velocity_nodes = Vec::with_capacity(nt);
    let mut pressure_nodes = Vec::with_capacity(nt);
    let mut bubble_nodes = Vec::with_capacity(nt);
    let mut bubble_signs = Vec::with_capacity(nt);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let te = edges.triangle_edges[t];
        let v = tri.vertices;
        velocity_nodes.push([v[0], v[1], v[2], nv + te[0], nv + te[1], nv + te[2]]);
        pressure_nodes.push(v);
        let mut nodes = [None; N_BUBBLE_MODES];
        let mut signs = [1.0; N_BUBBLE_MODES];
        for (m, kind) in kinds.iter().enumerate() {
            nodes[m] = match *kind {
                ModeKind::EdgeCubic { edge } => {
                    signs[m] = cubic_edge_sign(v, edge);
                    interior_edge[te[edge]].map(|ie| 2 * ie)
                }
                ModeKind::EdgeQuartic { edge } => interior_edge[te[edge]].map(|ie| 2 * ie + 1),
                ModeKind::Element(k) => Some(2 * n_interior + 3 * t + k),
            };
        }
        bubble_nodes.push(nodes);
        bubble_signs.push(signs);
    }

    DofMap {
        n_vertices: nv,
        n_edges: ne,
        n_triangles: nt,
        n_interior_edges: n_interior,
        dirichlet,
        velocity_nodes,
        pressure_nodes,
        interior_edge,
        bubble_nodes,
        bubble_signs,
    }
}

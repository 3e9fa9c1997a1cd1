mod common;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use stokes_afem::mesh::Mesh;
use stokes_afem::quadrature::rule;
use stokes_afem::spaces::{
    bubble_pressure_mode, bubble_velocity_modes, build_dof_maps, local_bubble_modes, mode_kinds, p2_basis, BaryPoly, ModeKind,
    N_BUBBLE_MODES,
};

use common::*;

fn random_bary(r: &mut impl Rng) -> [f64; 3] {
    let a: f64 = r.random();
    let b: f64 = r.random::<f64>() * (1.0 - a);
    [a, b, 1.0 - a - b]
}

#[test]
fn quadratic_edge_bubble_identity() {
    // l1^2 l2 + l1 l2^2 + l0 l1 l2 = l1 l2 (l0 + l1 + l2)
    let lhs = BaryPoly::monomial(1.0, [0, 2, 1])
        .add(&BaryPoly::monomial(1.0, [0, 1, 2]))
        .add(&bubble_pressure_mode());
    let rhs = BaryPoly::monomial(1.0, [0, 1, 1]);
    let mut r = rng(1);
    for _ in 0..200 {
        let l = random_bary(&mut r);
        assert!((lhs.eval(l) - rhs.eval(l)).abs() < 1e-15);
    }
}

/// Least-squares residual of `target` against `span(polys)` in the L2 inner
/// product of the reference triangle, relative to `|target|`.
fn distance_to_span(target: &BaryPoly, polys: &[BaryPoly]) -> f64 {
    let q = rule(10).unwrap();
    let n = polys.len();
    let mut g = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    let mut tt = 0.0;
    for (l, w) in q.iter() {
        let v: Vec<f64> = polys.iter().map(|p| p.eval(*l)).collect();
        let t = target.eval(*l);
        tt += w * t * t;
        for i in 0..n {
            rhs[i] += w * v[i] * t;
            for j in 0..n {
                g[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    let c = g.clone().svd(true, true).solve(&rhs, 1e-12).unwrap();
    // |t - P t|^2 = |t|^2 - c^T rhs
    ((tt - c.dot(&rhs)).max(0.0) / tt).sqrt()
}

fn monomial_list() -> Vec<BaryPoly> {
    [
        [1, 1, 1],
        [0, 2, 1],
        [0, 1, 2],
        [2, 0, 1],
        [1, 0, 2],
        [2, 1, 0],
        [1, 2, 0],
        [0, 2, 2],
        [2, 0, 2],
        [2, 2, 0],
        [2, 1, 1],
        [1, 2, 1],
        [1, 2, 1],
    ]
    .iter()
    .map(|&e| BaryPoly::monomial(1.0, e))
    .collect()
}

#[test]
fn monomial_list_contains_quadratic_edge_bubbles_but_ours_does_not() {
    let ours: Vec<BaryPoly> = local_bubble_modes().into_iter().map(|m| m.poly).collect();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let mut e = [0; 3];
        e[i] = 1;
        e[j] = 1;
        let edge_bubble = BaryPoly::monomial(1.0, e);
        assert!(distance_to_span(&edge_bubble, &monomial_list()) < 1e-7);
        assert!(distance_to_span(&edge_bubble, &ours) > 1e-2);
    }
    // no P2 function lies in the span of our modes
    for phi in p2_basis() {
        assert!(distance_to_span(&phi, &ours) > 1e-2);
    }
}

#[test]
fn edge_modes_vanish_on_other_edges_and_element_modes_on_boundary() {
    let modes = local_bubble_modes();
    for s in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
        for k in 0..3 {
            let mut l = [0.0; 3];
            l[k] = s;
            l[(k + 1) % 3] = 1.0 - s;
            for m in &modes {
                let on_own_edge = m.kind.edge() == Some(k);
                if !on_own_edge {
                    assert!(m.poly.eval(l).abs() < 1e-15, "{:?} on edge {k}", m.kind);
                }
            }
        }
    }
    assert_eq!(modes.iter().filter(|m| matches!(m.kind, ModeKind::Element(_))).count(), 3);
}

/// Global bubble functions agree from both sides of every interior edge.
#[test]
fn bubble_traces_are_continuous() {
    for (name, mesh) in small_meshes().into_iter().chain([("lshape2".to_string(), Mesh::l_shape().unwrap().refine_uniform().unwrap())]) {
        let dm = build_dof_maps(&mesh);
        let modes = local_bubble_modes();
        let kinds = mode_kinds();
        let edges = mesh.edges();
        for (e, edge) in edges.edges.iter().enumerate() {
            if edge.is_boundary() {
                continue;
            }
            let (ta, tb) = (edge.triangles.0, edge.triangles.1.unwrap());
            for s in [0.13, 0.5, 0.71] {
                let p = {
                    let [a, b] = edge.vertices.map(|v| mesh.vertices()[v]);
                    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
                };
                let value = |t: usize, node: usize| -> f64 {
                    let tri = mesh.triangles()[t].vertices;
                    let k = edges.triangle_edges[t].iter().position(|&x| x == e).unwrap();
                    // barycentric coordinates of p on local edge k
                    let a = mesh.vertices()[tri[k]];
                    let b = mesh.vertices()[tri[(k + 1) % 3]];
                    let lam = ((p[0] - b[0]).hypot(p[1] - b[1])) / ((a[0] - b[0]).hypot(a[1] - b[1]));
                    let mut l = [0.0; 3];
                    l[k] = lam;
                    l[(k + 1) % 3] = 1.0 - lam;
                    (0..N_BUBBLE_MODES)
                        .filter(|&m| dm.bubble_nodes[t][m] == Some(node))
                        .map(|m| dm.bubble_signs[t][m] * modes[m].poly.eval(l))
                        .sum()
                };
                let ie = dm.interior_edge[e].unwrap();
                for node in [2 * ie, 2 * ie + 1] {
                    let (va, vb) = (value(ta, node), value(tb, node));
                    assert!((va - vb).abs() < 1e-14, "{name}: edge {e} node {node}: {va} vs {vb}");
                    assert!(va.abs() > 1e-4 || (s - 0.5).abs() < 1e-12, "{name}: trace vanishes");
                }
            }
        }
        assert!(kinds.len() == N_BUBBLE_MODES);
    }
}

#[test]
fn signed_local_modes_equal_global_orientation() {
    let modes = local_bubble_modes();
    for gv in [[0, 1, 2], [2, 1, 0], [5, 3, 9], [7, 8, 1]] {
        let oriented = bubble_velocity_modes(gv);
        let dm_sign = |m: usize| match modes[m].kind {
            ModeKind::EdgeCubic { edge } => stokes_afem::spaces::cubic_edge_sign(gv, edge),
            _ => 1.0,
        };
        let mut r = rng(5);
        for _ in 0..20 {
            let l = random_bary(&mut r);
            for m in 0..N_BUBBLE_MODES {
                assert!((oriented[m].poly.eval(l) - dm_sign(m) * modes[m].poly.eval(l)).abs() < 1e-15);
            }
        }
    }
}

/// Taylor-Hood P2 traces agree across interior edges on a refined mesh.
#[test]
fn p2_field_is_continuous() {
    let mesh = Mesh::l_shape().unwrap().refine(&[0, 3, 4]).unwrap().refine(&[1, 2]).unwrap();
    let dm = build_dof_maps(&mesh);
    let (u, _) = random_fields(&dm, 3);
    let basis = p2_basis();
    let edges = mesh.edges();
    for (e, edge) in edges.edges.iter().enumerate() {
        let Some(tb) = edge.triangles.1 else { continue };
        let ta = edge.triangles.0;
        let at = |t: usize, s: f64| -> f64 {
            let tri = mesh.triangles()[t].vertices;
            let k = edges.triangle_edges[t].iter().position(|&x| x == e).unwrap();
            let mut l = [0.0; 3];
            // s measured from edge.vertices[0]
            let first = tri[k] == edge.vertices[0];
            l[k] = if first { 1.0 - s } else { s };
            l[(k + 1) % 3] = 1.0 - l[k];
            (0..6).map(|i| u[2 * dm.velocity_nodes[t][i]] * basis[i].eval(l)).sum()
        };
        for s in [0.2, 0.5, 0.8] {
            assert!((at(ta, s) - at(tb, s)).abs() < 1e-13);
        }
    }
}

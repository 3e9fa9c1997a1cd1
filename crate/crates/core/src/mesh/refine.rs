//! Red-green refinement with green removal.
//!
//! Marked triangles are split into four similar children (red). Closure:
//! a triangle with two or more split edges is also red-refined, a triangle
//! with exactly one split edge is bisected towards the midpoint (green).
//! Green children are never refined again: whenever one of them would need
//! refinement, the green pair is merged back into its parent, which is then
//! red-refined.

use std::collections::{BTreeMap, HashMap};

use super::{midpoint, sorted, Mesh, Point, RefinementState, Triangle};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct WorkTri {
    vertices: [usize; 3],
    state: RefinementState,
    /// Parent vertices; for green children rotated so the split edge is (v0, v1).
    parent: Option<[usize; 3]>,
}

struct GreenPair {
    children: Vec<usize>,
    midpoint: usize,
}

struct Work {
    vertices: Vec<Point>,
    tris: Vec<Option<WorkTri>>,
    midpoints: HashMap<(usize, usize), usize>,
    tags: BTreeMap<(usize, usize), u32>,
    green_pairs: HashMap<[usize; 3], GreenPair>,
}

impl Work {
    fn from_mesh(mesh: &Mesh) -> Self {
        let tris: Vec<Option<WorkTri>> = mesh
            .triangles()
            .iter()
            .map(|t| {
                Some(WorkTri {
                    vertices: t.vertices,
                    state: t.state,
                    parent: t.parent.map(|p| mesh.ancestors()[p]),
                })
            })
            .collect();
        let mut green_pairs: HashMap<[usize; 3], GreenPair> = HashMap::new();
        for (id, t) in tris.iter().enumerate() {
            let t = t.as_ref().expect("fresh work list");
            if t.state != RefinementState::GreenChild {
                continue;
            }
            let Some(parent) = t.parent else { continue };
            let Some(&m) = t.vertices.iter().find(|v| !parent.contains(v)) else {
                continue;
            };
            green_pairs
                .entry(parent)
                .or_insert_with(|| GreenPair {
                    children: Vec::new(),
                    midpoint: m,
                })
                .children
                .push(id);
        }
        green_pairs.retain(|_, pair| pair.children.len() == 2);
        Self {
            vertices: mesh.vertices().to_vec(),
            tris,
            midpoints: HashMap::new(),
            tags: mesh.boundary_tags(),
            green_pairs,
        }
    }

    fn split_edge(&mut self, a: usize, b: usize) -> usize {
        let key = sorted(a, b);
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let m = self.vertices.len();
        self.vertices
            .push(midpoint(self.vertices[key.0], self.vertices[key.1]));
        self.midpoints.insert(key, m);
        if let Some(&tag) = self.tags.get(&key) {
            self.tags.insert(sorted(key.0, m), tag);
            self.tags.insert(sorted(m, key.1), tag);
        }
        m
    }

    fn push(&mut self, tri: WorkTri) -> usize {
        self.tris.push(Some(tri));
        self.tris.len() - 1
    }

    fn red(&mut self, id: usize) {
        let Some(tri) = self.tris[id].take() else {
            return;
        };
        let [a, b, c] = tri.vertices;
        let ab = self.split_edge(a, b);
        let bc = self.split_edge(b, c);
        let ca = self.split_edge(c, a);
        for vertices in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
            self.push(WorkTri {
                vertices,
                state: RefinementState::RedChild,
                parent: Some(tri.vertices),
            });
        }
    }

    /// Bisects `id` across its local edge `k`, whose midpoint must exist.
    fn green(&mut self, id: usize, k: usize) {
        let Some(tri) = self.tris[id].take() else {
            return;
        };
        let v = tri.vertices;
        let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
        let m = self.midpoints[&sorted(a, b)];
        for vertices in [[a, m, c], [m, b, c]] {
            self.push(WorkTri {
                vertices,
                state: RefinementState::GreenChild,
                parent: Some([a, b, c]),
            });
        }
    }

    /// Merges the green pair containing `id` back into its parent and
    /// returns the parent's new id, or `None` if `id` is not a restorable
    /// green child.
    fn restore_parent(&mut self, id: usize) -> Option<usize> {
        let tri = self.tris[id].as_ref()?;
        if tri.state != RefinementState::GreenChild {
            return None;
        }
        let parent = tri.parent?;
        let pair = self.green_pairs.remove(&parent)?;
        for c in pair.children {
            self.tris[c] = None;
        }
        self.midpoints
            .insert(sorted(parent[0], parent[1]), pair.midpoint);
        Some(self.push(WorkTri {
            vertices: parent,
            state: RefinementState::Unrefined,
            parent: None,
        }))
    }

    fn hanging_edges(&self, tri: &WorkTri) -> Vec<usize> {
        (0..3)
            .filter(|&k| {
                let (a, b) = (tri.vertices[k], tri.vertices[(k + 1) % 3]);
                self.midpoints.contains_key(&sorted(a, b))
            })
            .collect()
    }

    /// A hanging edge whose halves are split as well cannot be closed by a
    /// single bisection.
    fn doubly_split(&self, tri: &WorkTri, k: usize) -> bool {
        let (a, b) = (tri.vertices[k], tri.vertices[(k + 1) % 3]);
        let m = self.midpoints[&sorted(a, b)];
        self.midpoints.contains_key(&sorted(a, m)) || self.midpoints.contains_key(&sorted(m, b))
    }

    fn red_or_restore(&mut self, id: usize) {
        match self.restore_parent(id) {
            Some(parent) => self.red(parent),
            None => self.red(id),
        }
    }
}

pub(super) fn refine(mesh: &Mesh, marks: &[usize]) -> Result<Mesh> {
    let nt = mesh.n_triangles();
    if nt == 0 {
        return Err(Error::EmptyMesh);
    }
    if let Some(&bad) = marks.iter().find(|&&t| t >= nt) {
        return Err(Error::InvalidTriangleId(bad, nt));
    }
    if marks.is_empty() {
        return Ok(mesh.clone());
    }
    let mut work = Work::from_mesh(mesh);
    let mut sorted_marks = marks.to_vec();
    sorted_marks.sort_unstable();
    sorted_marks.dedup();
    for t in sorted_marks {
        work.red_or_restore(t);
    }

    // Closure sweeps until no leaf needs red refinement.
    loop {
        let mut changed = false;
        let mut id = 0;
        while id < work.tris.len() {
            if let Some(tri) = work.tris[id].clone() {
                let hanging = work.hanging_edges(&tri);
                if !hanging.is_empty() {
                    let restorable = tri.state == RefinementState::GreenChild
                        && tri.parent.is_some_and(|p| work.green_pairs.contains_key(&p));
                    if restorable
                        || hanging.len() >= 2
                        || work.doubly_split(&tri, hanging[0])
                    {
                        work.red_or_restore(id);
                        changed = true;
                    }
                }
            }
            id += 1;
        }
        if !changed {
            break;
        }
    }

    for id in 0..work.tris.len() {
        if let Some(tri) = work.tris[id].clone() {
            let hanging = work.hanging_edges(&tri);
            debug_assert!(hanging.len() <= 1);
            if let Some(&k) = hanging.first() {
                work.green(id, k);
            }
        }
    }

    finish(work)
}

fn finish(work: Work) -> Result<Mesh> {
    let mut ancestors: Vec<[usize; 3]> = Vec::new();
    let mut ancestor_ids: HashMap<[usize; 3], usize> = HashMap::new();
    let mut triangles = Vec::new();
    for tri in work.tris.into_iter().flatten() {
        let parent = tri.parent.map(|p| {
            *ancestor_ids.entry(p).or_insert_with(|| {
                ancestors.push(p);
                ancestors.len() - 1
            })
        });
        triangles.push(Triangle {
            vertices: tri.vertices,
            state: tri.state,
            parent,
        });
    }
    Mesh::new(work.vertices, triangles, ancestors, &work.tags)
}

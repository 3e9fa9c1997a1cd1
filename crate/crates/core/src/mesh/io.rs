//! Plain-text mesh format and legacy VTK export.
//!
//! ```text
//! nv nt ne
//! v x y          (nv lines)
//! t i j k tag    (nt lines, tag = refinement state: 0 unrefined, 1 red, 2 green)
//! e i j tag      (ne lines, tag = boundary tag, 0 for interior edges)
//! ```
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so parse followed by export reproduces a file byte for byte. Refinement
//! ancestry is not stored; green children read back from a file cannot be
//! merged with their sibling again.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use super::{Mesh, RefinementState, Triangle};
use crate::error::{Error, Result};

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n_vertices(), self.n_triangles(), self.n_edges());
        for p in self.vertices() {
            let _ = writeln!(out, "v {} {}", p[0], p[1]);
        }
        for t in self.triangles() {
            let [i, j, k] = t.vertices;
            let _ = writeln!(out, "t {i} {j} {k} {}", t.state.code());
        }
        for e in &self.edges().edges {
            let _ = writeln!(
                out,
                "e {} {} {}",
                e.vertices[0],
                e.vertices[1],
                e.boundary_tag.unwrap_or(0)
            );
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let counts = parse_fields::<usize>(header, hline, 3)?;
        let (nv, nt, ne) = (counts[0], counts[1], counts[2]);

        let mut vertices = Vec::with_capacity(nv);
        let mut triangles = Vec::with_capacity(nt);
        let mut tags = BTreeMap::new();
        let mut n_edges = 0;
        for (line, l) in lines {
            let (kind, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            match kind {
                "v" => {
                    let xy = parse_fields::<f64>(rest, line, 2)?;
                    vertices.push([xy[0], xy[1]]);
                }
                "t" => {
                    let f = parse_fields::<usize>(rest, line, 4)?;
                    let state = RefinementState::from_code(f[3] as u32).ok_or(Error::Parse {
                        line,
                        msg: format!("unknown refinement state {}", f[3]),
                    })?;
                    triangles.push(Triangle {
                        vertices: [f[0], f[1], f[2]],
                        state,
                        parent: None,
                    });
                }
                "e" => {
                    let f = parse_fields::<usize>(rest, line, 3)?;
                    if f[2] > 0 {
                        tags.insert(super::sorted(f[0], f[1]), f[2] as u32);
                    }
                    n_edges += 1;
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown record type '{other}'"),
                    })
                }
            }
        }
        if vertices.len() != nv || triangles.len() != nt || n_edges != ne {
            return Err(Error::Parse {
                line: hline,
                msg: format!(
                    "header announces {nv} {nt} {ne}, file has {} {} {}",
                    vertices.len(),
                    triangles.len(),
                    n_edges
                ),
            });
        }
        let mesh = Mesh::new(vertices, triangles, Vec::new(), &tags)?;
        if mesh.n_edges() != ne {
            return Err(Error::Parse {
                line: hline,
                msg: format!("edge list has {ne} entries, triangles define {}", mesh.n_edges()),
            });
        }
        Ok(mesh)
    }

    /// Legacy VTK (ASCII, unstructured grid) with optional point data.
    pub fn to_vtk(&self, point_data: &[(&str, &[f64])]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vtk DataFile Version 3.0");
        let _ = writeln!(out, "stokes-afem mesh");
        let _ = writeln!(out, "ASCII");
        let _ = writeln!(out, "DATASET UNSTRUCTURED_GRID");
        let _ = writeln!(out, "POINTS {} double", self.n_vertices());
        for p in self.vertices() {
            let _ = writeln!(out, "{} {} 0", p[0], p[1]);
        }
        let _ = writeln!(out, "CELLS {} {}", self.n_triangles(), 4 * self.n_triangles());
        for t in self.triangles() {
            let [i, j, k] = t.vertices;
            let _ = writeln!(out, "3 {i} {j} {k}");
        }
        let _ = writeln!(out, "CELL_TYPES {}", self.n_triangles());
        for _ in self.triangles() {
            let _ = writeln!(out, "5");
        }
        if !point_data.is_empty() {
            let _ = writeln!(out, "POINT_DATA {}", self.n_vertices());
            for (name, values) in point_data {
                let _ = writeln!(out, "SCALARS {name} double 1");
                let _ = writeln!(out, "LOOKUP_TABLE default");
                for v in values.iter() {
                    let _ = writeln!(out, "{v}");
                }
            }
        }
        out
    }
}

fn parse_fields<T: std::str::FromStr>(s: &str, line: usize, n: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = s.split_whitespace().collect();
    if fields.len() != n {
        return Err(Error::Parse {
            line,
            msg: format!("expected {n} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>().map_err(|_| Error::Parse {
                line,
                msg: format!("cannot parse '{f}'"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let m = Mesh::l_shape().unwrap().refine_uniform().unwrap();
        let m = m.refine(&[0, 5, 17]).unwrap();
        let text = m.to_text();
        let parsed = Mesh::parse_text(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed.vertices(), m.vertices());
        assert_eq!(parsed.boundary_tags(), m.boundary_tags());
    }

    #[test]
    fn malformed_line_is_reported() {
        let text = "3 1 3\nv 0 0\nv 1 0\nv 0 x\nt 0 1 2 0\ne 0 1 1\ne 0 2 1\ne 1 2 1\n";
        match Mesh::parse_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let text = "3 1 3\nv 0 0\nv 1 0\nv 0 1\nq 0 1 2 0\n";
        assert!(matches!(Mesh::parse_text(text), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn count_mismatch_is_reported() {
        let text = "3 1 2\nv 0 0\nv 1 0\nv 0 1\nt 0 1 2 0\ne 0 1 1\ne 0 2 1\n";
        assert!(matches!(Mesh::parse_text(text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn vtk_has_expected_sections() {
        let m = Mesh::unit_square(2).unwrap();
        let p: Vec<f64> = (0..m.n_vertices()).map(|i| i as f64).collect();
        let vtk = m.to_vtk(&[("pressure", &p)]);
        assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(vtk.contains("POINTS 9 double"));
        assert!(vtk.contains("CELLS 8 32"));
        assert!(vtk.contains("SCALARS pressure double 1"));
    }
}

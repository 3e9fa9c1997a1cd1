//! `key = value` run files.
//!
//! ```text
//! # comment
//! theta = 0.7
//! max_iter = 7
//! boundary = tags        # example1 | cavity | tags
//! bc.3 = 1 0             # velocity on edges tagged 3
//! ```

use std::collections::BTreeMap;

use stokes_afem::adapt::{ErrorProblem, LoopConfig, StokesProblem};
use stokes_afem::bench::{Cavity, Example1};
use stokes_afem::mesh::Point;

use crate::CliError;

const REQUIRED: [&str; 3] = ["theta", "max_iter", "boundary"];

#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    Example1,
    Cavity,
    /// Constant velocity per boundary tag; unlisted tags are no-slip.
    Tags(BTreeMap<u32, [f64; 2]>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFile {
    pub loop_config: LoopConfig,
    pub boundary: Boundary,
}

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Usage(format!("config line {line}: {}", msg.into()))
}

fn value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| parse_err(line, format!("invalid value `{v}` for `{key}`")))
}

pub fn parse_run_file(text: &str) -> Result<RunFile, CliError> {
    let mut cfg = LoopConfig::default();
    let mut seen = Vec::new();
    let mut kind = None;
    let mut bc = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (key, v) = l
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{l}`")))?;
        if seen.iter().any(|(k, _)| k == key) {
            return Err(parse_err(line, format!("duplicate key `{key}`")));
        }
        seen.push((key.to_string(), line));
        match key {
            "theta" => cfg.theta = value(line, key, v)?,
            "eps" => cfg.eps = value(line, key, v)?,
            "max_iter" => cfg.max_iterations = value(line, key, v)?,
            "max_dofs" => cfg.max_dofs = Some(value(line, key, v)?),
            "quad_degree" => cfg.quad_degree = value(line, key, v)?,
            "error_quad_degree" => cfg.error_quad_degree = value(line, key, v)?,
            "error_problem" => {
                cfg.error_problem = v.parse::<ErrorProblem>().map_err(|e| parse_err(line, e.to_string()))?
            }
            "boundary" => {
                kind = Some(match v {
                    "example1" | "cavity" | "tags" => (v.to_string(), line),
                    _ => return Err(parse_err(line, format!("unknown boundary `{v}` (example1|cavity|tags)"))),
                })
            }
            _ if key.starts_with("bc.") => {
                let tag: u32 = value(line, key, &key[3..])?;
                let parts: Vec<&str> = v.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(parse_err(line, format!("`{key}` needs two components")));
                }
                bc.insert(tag, [value(line, key, parts[0])?, value(line, key, parts[1])?]);
            }
            _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
        }
    }
    if let Some(missing) = REQUIRED.iter().find(|k| !seen.iter().any(|(s, _)| s == *k)) {
        return Err(CliError::Usage(format!("config is missing required key `{missing}`")));
    }
    let (kind, kind_line) = kind.expect("required key checked");
    let boundary = match kind.as_str() {
        "example1" => Boundary::Example1,
        "cavity" => Boundary::Cavity,
        _ => Boundary::Tags(bc),
    };
    if !matches!(boundary, Boundary::Tags(_)) {
        if let Some((k, l)) = seen.iter().find(|(k, _)| k.starts_with("bc.")) {
            return Err(parse_err(*l, format!("`{k}` requires `boundary = tags` (line {kind_line})")));
        }
    }
    Ok(RunFile {
        loop_config: cfg,
        boundary,
    })
}

/// Piecewise constant boundary data by tag. Where edges with different
/// values meet, the node gets zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedBoundary(pub BTreeMap<u32, [f64; 2]>);

impl StokesProblem for TaggedBoundary {
    fn boundary_value(&self, _x: Point, tags: &[u32]) -> [f64; 2] {
        let mut vals = tags.iter().map(|t| self.0.get(t).copied().unwrap_or([0.0, 0.0]));
        let Some(first) = vals.next() else { return [0.0, 0.0] };
        if vals.all(|v| v == first) {
            first
        } else {
            [0.0, 0.0]
        }
    }
}

impl Boundary {
    pub fn problem(&self) -> Box<dyn StokesProblem> {
        match self {
            Boundary::Example1 => Box::new(Example1::default()),
            Boundary::Cavity => Box::new(Cavity),
            Boundary::Tags(bc) => Box::new(TaggedBoundary(bc.clone())),
        }
    }
}

//! Adaptive Taylor-Hood finite elements for the 2D Stokes problem.
//!
//! The discrete solution on a P2/P1 mesh is checked against an auxiliary
//! space of hierarchical bubble functions: the residual of the discrete
//! solution is tested against quartic edge/element velocity bubbles and a
//! cubic pressure bubble, and the resulting error problem is reduced to two
//! diagonal solves. The per-element contributions drive Dörfler marking and
//! red-green refinement.
//!
//! ```
//! use stokes_afem::{adapt::{adaptive_loop, LoopConfig}, bench::Cavity, mesh::Mesh};
//!
//! let mesh = Mesh::unit_square(4).unwrap();
//! let config = LoopConfig { max_iterations: 2, ..LoopConfig::default() };
//! let run = adaptive_loop(mesh, &Cavity, &config).unwrap();
//! assert_eq!(run.records.len(), 3);
//! assert!(run.records[2].dofs > run.records[0].dofs);
//! ```

pub mod adapt;
pub mod assembly;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/quadrature_and_bases.md")]
    mod quadrature_and_bases {}
    #[doc = include_str!("../../../book/src/saddle_point.md")]
    mod saddle_point {}
    #[doc = include_str!("../../../book/src/estimator.md")]
    mod estimator {}
    #[doc = include_str!("../../../book/src/adaptive_loop.md")]
    mod adaptive_loop {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

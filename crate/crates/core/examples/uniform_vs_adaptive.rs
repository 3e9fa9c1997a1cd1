//! Error versus dof for uniform and adaptive refinement on the L-shape.
//!
//! `cargo run --release --example uniform_vs_adaptive`

use stokes_afem::adapt::LoopConfig;
use stokes_afem::bench::{example1_initial_mesh, fitted_order, run_example1, run_uniform, Example1};

fn main() -> stokes_afem::Result<()> {
    let config = LoopConfig {
        max_iterations: 12,
        ..LoopConfig::default()
    };
    let uniform = run_uniform(example1_initial_mesh()?, &Example1::default(), 3, &config)?;
    println!("uniform");
    for r in &uniform {
        println!("{:>8} {:.4e} {:.4e}", r.dofs, r.error.unwrap(), r.eta_g);
    }
    let pts: Vec<_> = uniform.iter().map(|r| (r.dofs, r.error.unwrap())).collect();
    println!("order {:.3}", fitted_order(&pts[pts.len() - 3..]));

    let adaptive = run_example1(&config, |_| Ok(()))?.records;
    println!("adaptive");
    for r in &adaptive {
        println!("{:>8} {:.4e} {:.4e}", r.dofs, r.error.unwrap(), r.eta_g);
    }
    let pts: Vec<_> = adaptive.iter().map(|r| (r.dofs, r.error.unwrap())).collect();
    println!("order {:.3}", fitted_order(&pts[pts.len() - 3..]));
    Ok(())
}

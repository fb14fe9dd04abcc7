//! The Riemann-Liouville model: plain Dirichlet data versus the weighted
//! conditions that its kernel demands, and the weak-form solve.
//!
//! ```bash
//! cargo run --release --example rl_singular_bc
//! ```

use fracspec::solver::solve_rl_weak;
use fracspec::{
    solve, BoundaryCondition, FractionalModelParams, Model, OracleConfig, RhsSpec, SolveOptions,
    WellPosedness,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = FractionalModelParams::new(1.5, 0.5)?;
    let rhs = RhsSpec::Constant(1.0);
    let opts = SolveOptions::with_n(16);

    let cases = [
        BoundaryCondition::Dirichlet { a: 0.0, b: 0.0 },
        BoundaryCondition::Dirichlet { a: 1.0, b: 0.0 },
        BoundaryCondition::RlWeightedDirichlet { a: 1.0, b: 0.5 },
        BoundaryCondition::RlMixed { a: 0.3, b: 0.5 },
    ];
    for bc in cases {
        print!("{:<22} {:?}: ", bc.name(), bc.values());
        match solve(&p, Model::Rl, &bc, &rhs, &opts) {
            Ok((sol, report)) => {
                assert_eq!(report.status, WellPosedness::WellPosed);
                let terms: Vec<String> = sol
                    .singular_terms()
                    .iter()
                    .map(|t| format!("{:?} {:.6}", t.kind, t.amplitude))
                    .collect();
                println!("solved; singular terms [{}]", terms.join(", "));
                println!(
                    "    u(0.01) = {:.6}, u(0.5) = {:.6}, u(0.99) = {:.6}, flux(0) = {:.6}",
                    sol.evaluate(0.01)?,
                    sol.evaluate(0.5)?,
                    sol.evaluate(0.99)?,
                    sol.evaluate_flux(0.0)?
                );
            }
            Err(e) => println!("{e}"),
        }
    }

    let weak = solve_rl_weak(
        &p,
        &RhsSpec::callable(|x: f64| x.cos()),
        12,
        &OracleConfig::default(),
    )?;
    println!("\nweak-form coefficients for f = cos x:");
    for (i, c) in weak.iter().enumerate() {
        println!("  {i:>2} {c:>14.6e}");
    }
    Ok(())
}

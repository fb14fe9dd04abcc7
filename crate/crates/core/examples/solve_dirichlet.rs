//! RLC Dirichlet and mixed problems with a smooth right-hand side, checked
//! by applying the operator to the computed solution.
//!
//! ```bash
//! cargo run --release --example solve_dirichlet
//! ```

use fracspec::diagnostics::{interior_points, residual_certificate};
use fracspec::{
    solve, BoundaryCondition, FractionalModelParams, Model, OracleConfig, RhsSpec, SolveOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = FractionalModelParams::new(1.6, 0.4)?;
    let f = |x: f64| (2.0 * x).exp();
    let rhs = RhsSpec::callable(f);

    let bc = BoundaryCondition::Dirichlet { a: 1.0, b: -0.5 };
    let (sol, report) = solve(&p, Model::Rlc, &bc, &rhs, &SolveOptions::with_n(32))?;
    println!("{}: {}", report.status.name(), report.rule);
    println!(
        "u(0) = {:.12}, u(1) = {:.12}",
        sol.evaluate(0.0)?,
        sol.evaluate(1.0)?
    );
    println!("coefficient tail ratio {:.2e}", sol.tail_ratio());
    println!("{:>6} {:>16} {:>16}", "x", "u", "flux");
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        println!(
            "{x:>6.2} {:>16.10} {:>16.10}",
            sol.evaluate(x)?,
            sol.evaluate_flux(x)?
        );
    }
    let res = residual_certificate(&sol, &f, &interior_points(9), &OracleConfig::default())?;
    println!("max |L u - f| on 9 interior points: {res:.2e}");

    // flux prescribed on the left
    let bc = BoundaryCondition::MixedFluxDirichlet { a: 0.25, b: 0.0 };
    let (sol, _) = solve(&p, Model::Rlc, &bc, &rhs, &SolveOptions::with_n(32))?;
    println!(
        "\nmixed: flux(0) = {:.12}, u(1) = {:.12}",
        sol.evaluate_flux(0.0)?,
        sol.evaluate(1.0)?
    );

    // r = 1 leaves the mixed problem ill posed
    let p1 = FractionalModelParams::new(1.6, 1.0)?;
    match solve(&p1, Model::Rlc, &bc, &rhs, &SolveOptions::with_n(32)) {
        Ok(_) => println!("r = 1: unexpectedly solved"),
        Err(e) => println!("r = 1: {e}"),
    }
    Ok(())
}

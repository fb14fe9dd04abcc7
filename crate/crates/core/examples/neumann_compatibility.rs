//! Pure flux data: the compatibility condition, the free additive direction
//! and the mean-zero gauge.
//!
//! ```bash
//! cargo run --release --example neumann_compatibility
//! ```

use fracspec::solver::GaugePin;
use fracspec::{
    solve, BoundaryCondition, Error, FractionalModelParams, Model, RhsSpec, SolveOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = FractionalModelParams::new(1.4, 0.6)?;
    let rhs = RhsSpec::callable(|x: f64| 1.0 + x * x);
    let integral = 1.0 + 1.0 / 3.0;

    // the flux jump must equal the integral of f
    let a = 0.2;
    let bc = BoundaryCondition::Neumann { a, b: a + integral };
    for model in [Model::Rlc, Model::Rl] {
        let opts = SolveOptions {
            n: 24,
            pin: GaugePin::MeanZero,
            ..Default::default()
        };
        let (sol, report) = solve(&p, model, &bc, &rhs, &opts)?;
        println!("{} {}: {}", model.name(), report.status.name(), report.rule);
        println!(
            "  flux(0) = {:.12}, flux(1) = {:.12}, compat residual {:.2e}, free {:?}",
            sol.evaluate_flux(0.0)?,
            sol.evaluate_flux(1.0)?,
            sol.compatibility_residual().unwrap_or(0.0),
            sol.free_direction()
        );
        let shifted = sol.shifted_along_free(0.5)?;
        println!(
            "  shifting the free amplitude by 0.5 moves u(0.5) from {:.8} to {:.8}, flux(0.5) stays {:.8}",
            sol.evaluate(0.5)?,
            shifted.evaluate(0.5)?,
            shifted.evaluate_flux(0.5)?
        );
    }

    let bad = BoundaryCondition::Neumann {
        a,
        b: a + integral + 1e-3,
    };
    match solve(&p, Model::Rlc, &bad, &rhs, &SolveOptions::with_n(24)) {
        Err(Error::Compatibility {
            residual,
            tolerance,
        }) => {
            println!("perturbed data rejected: residual {residual:.2e} > {tolerance:.2e}")
        }
        other => println!("unexpected: {other:?}"),
    }

    let one_sided = FractionalModelParams::new(1.4, 0.0)?;
    if let Err(e) = solve(&one_sided, Model::Rlc, &bc, &rhs, &SolveOptions::with_n(24)) {
        println!("r = 0: {e}");
    }
    Ok(())
}

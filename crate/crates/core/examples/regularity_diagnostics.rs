//! Coefficient decay, the derivative shift bound and the flux series for
//! data of different smoothness.
//!
//! ```bash
//! cargo run --release --example regularity_diagnostics
//! ```

use fracspec::diagnostics::{
    decay_rate, flux_series_blocks, shift_check, shift_factor, shift_factor_closed,
};
use fracspec::{solve, BoundaryCondition, FractionalModelParams, Model, RhsSpec, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = FractionalModelParams::new(1.5, 0.5)?;
    let n = 64;
    let data: [(&str, RhsSpec); 4] = [
        ("x(1-x)", RhsSpec::Polynomial(vec![0.0, 1.0, -1.0])),
        (
            "runge",
            RhsSpec::callable(|x: f64| 1.0 / (1.0 + 25.0 * (2.0 * x - 1.0).powi(2))),
        ),
        ("|x-1/2|", RhsSpec::callable(|x: f64| (x - 0.5).abs())),
        ("x^-0.2", RhsSpec::callable(|x: f64| x.powf(-0.2))),
    ];

    println!(
        "{:<9} {:>10} {:>10} {:>10} {:>12}",
        "f", "rate 1/4", "rate 1/2", "tail", "shift ratio"
    );
    for (name, rhs) in &data {
        let (sol, _) = solve(
            &p,
            Model::Rlc,
            &BoundaryCondition::Dirichlet { a: 0.0, b: 0.0 },
            rhs,
            &SolveOptions::with_n(n),
        )?;
        let c = sol.coeffs();
        let rate = |lo, hi| {
            decay_rate(c, lo, hi)
                .map(|d| format!("{:.3}", d.rate))
                .unwrap_or_else(|_| "-".into())
        };
        let shift = shift_check(&p, rhs, 1, n, None)?;
        println!(
            "{name:<9} {:>10} {:>10} {:>10.2e} {:>12}",
            rate(n / 4, n / 2),
            rate(n / 2, n),
            sol.tail_ratio(),
            shift
                .ratio
                .map(|q| format!("{q:.3e}"))
                .unwrap_or_else(|| "-".into())
        );
    }

    println!("\nshift factors for j = 2: norm-based vs closed form");
    for i in [0usize, 1, 5, 20, 100] {
        println!(
            "  i = {i:>3}: {:.12} {:.12}",
            shift_factor(&p, i, 2)?,
            shift_factor_closed(&p, i, 2)
        );
    }

    let (sol, _) = solve(
        &p,
        Model::Rlc,
        &BoundaryCondition::Dirichlet { a: 0.0, b: 0.0 },
        &data[0].1,
        &SolveOptions::with_n(n),
    )?;
    let blocks = flux_series_blocks(&p, sol.coeffs());
    let shown: Vec<String> = blocks.iter().map(|b| format!("{b:.6e}")).collect();
    println!(
        "\ndyadic partial sums of the flux series: {}",
        shown.join(", ")
    );
    Ok(())
}

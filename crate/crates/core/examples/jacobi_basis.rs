//! Shifted Jacobi polynomials on [0, 1]: values, endpoint formulas, norms and
//! a quadrature check of orthogonality.
//!
//! ```bash
//! cargo run --example jacobi_basis
//! ```

use fracspec::{gauss_jacobi_rule, JacobiBasis, JacobiSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let basis = JacobiBasis::new(0.75, -0.25)?;
    println!("family (a, b) = ({}, {})", basis.a(), basis.b());

    println!(
        "{:>3} {:>14} {:>14} {:>14} {:>14}",
        "n", "G_n(0.3)", "G_n(0)", "G_n(1)", "||G_n||^2"
    );
    for n in 0..6 {
        println!(
            "{n:>3} {:>14.8} {:>14.8} {:>14.8} {:>14.8}",
            basis.eval(n, 0.3)?,
            basis.value_at_zero(n),
            basis.value_at_one(n),
            basis.norm_sq(n)
        );
    }

    // Gram matrix under the family's own weight
    let rule = gauss_jacobi_rule(basis, 12)?;
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let g = rule.integrate(|x| basis.eval(i, x).unwrap() * basis.eval(j, x).unwrap())?;
            let want = if i == j { basis.norm_sq(i) } else { 0.0 };
            worst = worst.max((g - want).abs());
        }
    }
    println!("max Gram deviation for n < 6: {worst:.2e}");

    let series = JacobiSeries::new(basis, vec![1.0, -0.5, 0.25, 0.125]);
    let d = series.derivative(1);
    println!(
        "series at 0.6: {:.12} (Clenshaw) vs {:.12} (direct); derivative {:.12}",
        series.eval(0.6),
        series.eval_naive(0.6),
        d.eval(0.6)
    );
    Ok(())
}

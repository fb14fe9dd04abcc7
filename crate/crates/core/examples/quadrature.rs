//! Gauss-Jacobi rules for singular endpoint weights.
//!
//! ```bash
//! cargo run --example quadrature
//! ```

use fracspec::special::beta;
use fracspec::{cached_rule, gauss_jacobi_rule, JacobiBasis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // weight (1-x)^a x^b with both exponents negative
    let basis = JacobiBasis::new(-0.4, -0.7)?;
    let exact = beta(basis.b() + 1.0, basis.a() + 1.0);
    for order in [1, 2, 4, 8, 16, 32] {
        let rule = gauss_jacobi_rule(basis, order)?;
        let mass = rule.integrate(|_| 1.0)?;
        let m3 = rule.integrate(|x| x.powi(3))?;
        let m3_exact = beta(basis.b() + 4.0, basis.a() + 1.0);
        println!(
            "order {order:>2}: mass err {:.2e}, x^3 moment err {:.2e}",
            (mass - exact).abs(),
            (m3 - m3_exact).abs()
        );
    }

    let rule = gauss_jacobi_rule(basis, 5)?;
    println!("\n5-point nodes and weights");
    for (x, w) in rule.iter() {
        println!("  {x:.15}  {w:.15}");
    }

    // non-polynomial integrand: slow algebraic convergence is expected
    for order in [8, 32, 128] {
        let r = cached_rule(basis, order)?;
        println!(
            "order {order:>3}: int w(x) cos(3x) = {:.15}",
            r.integrate(|x| (3.0 * x).cos())?
        );
    }
    Ok(())
}

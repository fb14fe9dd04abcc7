//! The index relation between `(alpha, r)` and `beta`, and the ladder
//! constants that diagonalise the operators.
//!
//! ```bash
//! cargo run --example condition_a_ladders
//! ```

use fracspec::special::gamma_ratio;
use fracspec::FractionalModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>5} {:>5} {:>12} {:>12} {:>10}",
        "alpha", "r", "beta", "c**", "residual"
    );
    for alpha in [1.2, 1.5, 1.8] {
        for r in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let p = FractionalModelParams::new(alpha, r)?;
            println!(
                "{alpha:>5} {r:>5} {:>12.9} {:>12.9} {:>10.2e}",
                p.beta(),
                p.c_star_star(),
                p.relation_residual()
            );
        }
    }

    let p = FractionalModelParams::new(1.5, 0.5)?;
    let a = p.alpha();
    println!(
        "\nalpha = 1.5, r = 0.5: sigma_0 = {:.10}, mu_-1 = {:.10}",
        p.sigma(0),
        p.mu_minus_one()
    );
    println!(
        "{:>3} {:>14} {:>14} {:>14} {:>14} {:>9} {:>9}",
        "n", "lambda", "mu", "sigma", "kappa", "lam/mu", "kap/sig"
    );
    for n in 0..=10 {
        let fnn = n as f64;
        let (l, m, s, k) = (p.lambda(n), p.mu(n), p.sigma(n), p.kappa(n));
        // lambda_n = -mu_n (n + alpha),  kappa_n = -sigma_n Gamma(n+alpha+1)/Gamma(n+alpha-1)
        let r1 = (l + m * (fnn + a)).abs() / l.abs();
        let r2 = (k + s * gamma_ratio(fnn + a + 1.0, fnn + a - 1.0)).abs() / k.abs();
        println!("{n:>3} {l:>14.8} {m:>14.8} {s:>14.8} {k:>14.8} {r1:>9.1e} {r2:>9.1e}");
    }

    // lambda grows like n^alpha
    for n in [10usize, 100, 1000, 10000] {
        println!(
            "lambda_{n} / n^alpha = {:.8}",
            p.lambda(n) / (n as f64).powf(a)
        );
    }
    Ok(())
}

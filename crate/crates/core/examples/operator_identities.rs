//! Closed-form images of basis elements checked against the quadrature
//! oracle, first pointwise and then with the full grid certification.
//!
//! ```bash
//! cargo run --release --example operator_identities
//! ```

use fracspec::operators::{apply_i_r, apply_operator, lambda_image, sigma_image};
use fracspec::verify::{run_identity_suite, Identity, VerifyConfig};
use fracspec::{FractionalModelParams, Model, OracleConfig, OracleFunction, WeightedPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = FractionalModelParams::new(1.7, 0.3)?;
    let cfg = OracleConfig::default();

    let n = 3;
    let g = WeightedPoly::basis_element(p.kernel_family(), n);
    let u = OracleFunction::single(WeightedPoly::basis_element(p.solution_family(), n));
    println!(
        "{:>5} {:>16} {:>16} {:>16} {:>16}",
        "x", "I_r oracle", "sigma image", "RLC oracle", "lambda image"
    );
    for x in [0.1, 0.35, 0.5, 0.85] {
        println!(
            "{x:>5} {:>16.12} {:>16.12} {:>16.12} {:>16.12}",
            apply_i_r(&p, &g, x, &cfg)?,
            sigma_image(&p, n, x),
            apply_operator(&p, Model::Rlc, &u, x, &cfg)?,
            lambda_image(&p, n, x)
        );
    }

    let suite = VerifyConfig {
        n_max: 4,
        ..Default::default()
    };
    let rows = run_identity_suite(&suite)?;
    println!("\n{} rows", rows.len());
    for id in Identity::ALL {
        let worst = rows
            .iter()
            .filter(|r| r.identity == id)
            .map(|r| r.max_error)
            .fold(0.0f64, f64::max);
        let ok = rows.iter().filter(|r| r.identity == id).all(|r| r.pass);
        println!(
            "{:<26} worst {:>9.2e}  tol {:.0e}  {}",
            id.name(),
            worst,
            id.tolerance(),
            if ok { "ok" } else { "FAIL" }
        );
    }

    // a perturbed c** must be caught
    let faulty = VerifyConfig {
        n_max: 2,
        alphas: vec![1.5],
        rs: vec![0.5],
        c_star_fault: Some(1e-3),
        ..Default::default()
    };
    let failed = run_identity_suite(&faulty)?
        .iter()
        .filter(|r| !r.pass)
        .count();
    println!("with c** offset 1e-3: {failed} failing rows");
    Ok(())
}

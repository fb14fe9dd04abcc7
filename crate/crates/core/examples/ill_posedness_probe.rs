//! Partial sums of the flux-constant series for the one-sided (`r = 1`) model
//! driven by the alternating log-series right-hand side.
//!
//! ```bash
//! cargo run --release --example ill_posedness_probe
//! ```

use fracspec::diagnostics::{ill_posedness_probe, ProbeVariant};
use fracspec::params::FractionalModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FractionalModelParams::new(1.5, 1.0)?;
    println!("alpha = {}, beta = {}", params.alpha(), params.beta());

    for variant in [ProbeVariant::AsPrinted, ProbeVariant::NormConvergent] {
        let rep = ill_posedness_probe(&params, variant);
        println!("\nvariant {}", variant.name());
        println!("{:>9}  {:>14}  {:>14}", "N", "S_N", "norm sum");
        for ((n, s), q) in rep
            .truncations
            .iter()
            .zip(&rep.partial_sums)
            .zip(&rep.norm_sums)
        {
            println!("{n:>9}  {s:>14.6}  {q:>14.6}");
        }
        println!(
            "fit S_N ~ {:.4} + {:.4} ln ln N; norm tail beyond 2^16 = {:.3e} of total",
            rep.fit_intercept, rep.fit_slope, rep.norm_tail_fraction
        );
        println!(
            "monotone growth: {}, Cauchy test accepted: {}",
            rep.monotone_growth, rep.cauchy_converged
        );
    }
    Ok(())
}

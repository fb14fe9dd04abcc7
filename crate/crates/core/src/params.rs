//! Model parameters: the fractional order `alpha`, the left/right weighting `r`,
//! the endpoint exponent `beta` tied to `r`, and the constant `c**`.

use crate::error::{Error, Result};
use crate::jacobi::JacobiBasis;
use crate::special::{gamma, gamma_ratio_offset, sin_pi};

const BISECTION_CAP: usize = 200;
const RESIDUAL_TOL: f64 = 1e-12;
/// `r` this close to 0 or 1 snaps `beta` to the exact endpoint.
pub const ENDPOINT_SNAP: f64 = 1e-12;

/// Validated `(alpha, r, beta, c**)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalModelParams {
    alpha: f64,
    r: f64,
    beta: f64,
    c_star_star: f64,
}

/// The index-dependent eigenvalue families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// `lambda_i = -c** Gamma(i+1+alpha) / Gamma(i+1)`
    Lambda,
    /// `mu_n = c** Gamma(n+alpha) / Gamma(n+1)`, and `mu_{-1} = -c** Gamma(alpha)`
    Mu,
    /// `sigma_n = -c** Gamma(n+alpha-1) / Gamma(n+1)`
    Sigma,
    /// `kappa_n = c** Gamma(n+alpha+1) / Gamma(n+1)`
    Kappa,
}

impl FractionalModelParams {
    /// Resolve `beta` and `c**` from `(alpha, r)`.
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        let beta = solve_beta(alpha, r)?;
        let c_star_star = c_star(alpha, beta)?;
        Ok(Self {
            alpha,
            r,
            beta,
            c_star_star,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c_star_star(&self) -> f64 {
        self.c_star_star
    }

    /// Order `2 - alpha` of the fractional integrals.
    pub fn sigma_order(&self) -> f64 {
        2.0 - self.alpha
    }

    /// A copy whose `c**` is shifted by `delta` (fault injection for the verifier).
    pub fn with_c_star_offset(&self, delta: f64) -> Self {
        Self {
            c_star_star: self.c_star_star + delta,
            ..*self
        }
    }

    /// Mirror `(r, beta) -> (1 - r, alpha - beta)`; `c**` is unchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            r: 1.0 - self.r,
            beta: self.alpha - self.beta,
            ..*self
        }
    }

    fn family(&self, a: f64, b: f64) -> JacobiBasis {
        JacobiBasis::new(a, b).expect("exponents stay above -1 for alpha in (1, 2)")
    }

    /// `(alpha - beta, beta)`: the weight of the regular solution series.
    pub fn solution_family(&self) -> JacobiBasis {
        self.family(self.alpha - self.beta, self.beta)
    }

    /// `(beta, alpha - beta)`: right-hand-side projections and `lambda` images.
    pub fn rhs_family(&self) -> JacobiBasis {
        self.family(self.beta, self.alpha - self.beta)
    }

    /// `(alpha - beta - 1, beta - 1)`: the kernel weight and the singular basis.
    pub fn kernel_family(&self) -> JacobiBasis {
        self.family(self.alpha - self.beta - 1.0, self.beta - 1.0)
    }

    /// `(beta - 1, alpha - beta - 1)`: images under `I_r` and the flux.
    pub fn flux_family(&self) -> JacobiBasis {
        self.family(self.beta - 1.0, self.alpha - self.beta - 1.0)
    }

    /// `(beta + 1, alpha - beta + 1)`: images of the singular basis under the RL operator.
    pub fn weak_rhs_family(&self) -> JacobiBasis {
        self.family(self.beta + 1.0, self.alpha - self.beta + 1.0)
    }

    /// `B(beta, alpha - beta)`, the total mass of the kernel weight.
    pub fn kernel_mass(&self) -> f64 {
        crate::special::beta(self.beta, self.alpha - self.beta)
    }

    /// Residual of the `r`-`beta` relation.
    pub fn relation_residual(&self) -> f64 {
        (r_of_beta(self.alpha, self.beta) - self.r).abs()
    }

    pub fn ladder(&self, kind: Ladder, n: i64) -> Result<f64> {
        if n < -1 || (n == -1 && kind != Ladder::Mu) {
            return Err(Error::Domain(format!(
                "ladder index {n} out of range for {kind:?}"
            )));
        }
        if n == -1 {
            return Ok(self.mu_minus_one());
        }
        let n = n as usize;
        Ok(match kind {
            Ladder::Lambda => self.lambda(n),
            Ladder::Mu => self.mu(n),
            Ladder::Sigma => self.sigma(n),
            Ladder::Kappa => self.kappa(n),
        })
    }

    pub fn lambda(&self, i: usize) -> f64 {
        let f = i as f64 + 1.0;
        -self.c_star_star * gamma_ratio_offset(f, self.alpha)
    }

    pub fn mu(&self, n: usize) -> f64 {
        let f = n as f64 + 1.0;
        self.c_star_star * gamma_ratio_offset(f, self.alpha - 1.0)
    }

    pub fn mu_minus_one(&self) -> f64 {
        -self.c_star_star * gamma(self.alpha)
    }

    pub fn sigma(&self, n: usize) -> f64 {
        let f = n as f64 + 1.0;
        -self.c_star_star * gamma_ratio_offset(f, self.alpha - 2.0)
    }

    pub fn kappa(&self, n: usize) -> f64 {
        let f = n as f64 + 1.0;
        self.c_star_star * gamma_ratio_offset(f, self.alpha)
    }
}

fn r_of_beta(alpha: f64, beta: f64) -> f64 {
    let sb = sin_pi(beta);
    sb / (sin_pi(alpha - beta) + sb)
}

fn check_alpha_r(alpha: f64, r: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Parameter(format!(
            "alpha = {alpha} must lie in (1, 2)"
        )));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Parameter(format!("r = {r} must lie in [0, 1]")));
    }
    Ok(())
}

/// The unique `beta` in `[alpha - 1, 1]` with
/// `r = sin(pi beta) / (sin(pi (alpha - beta)) + sin(pi beta))`, by bisection.
pub fn solve_beta(alpha: f64, r: f64) -> Result<f64> {
    check_alpha_r(alpha, r)?;
    if r <= ENDPOINT_SNAP {
        return Ok(1.0);
    }
    if r >= 1.0 - ENDPOINT_SNAP {
        return Ok(alpha - 1.0);
    }
    // r(beta) decreases from 1 at beta = alpha - 1 to 0 at beta = 1
    let mut lo = alpha - 1.0;
    let mut hi = 1.0;
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if r_of_beta(alpha, mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    let residual = (r_of_beta(alpha, beta) - r).abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::Parameter(format!(
            "beta bisection stalled with residual {residual:e}"
        )));
    }
    Ok(beta)
}

/// `c** = sin(pi alpha) / (sin(pi (alpha - beta)) + sin(pi beta))`.
pub fn c_star(alpha: f64, beta: f64) -> Result<f64> {
    let denom = sin_pi(alpha - beta) + sin_pi(beta);
    if !(denom.abs() >= 1e-14) {
        return Err(Error::Parameter(format!(
            "degenerate c** denominator {denom:e} at alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(sin_pi(alpha) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn beta_endpoints_and_midpoint() {
        assert_eq!(solve_beta(1.5, 1.0).unwrap(), 0.5);
        assert_eq!(solve_beta(1.5, 0.0).unwrap(), 1.0);
        assert_relative_eq!(solve_beta(1.5, 0.5).unwrap(), 0.75, max_relative = 1e-14);
        assert_eq!(solve_beta(1.3, 1.0 - 1e-13).unwrap(), 1.3 - 1.0);
    }

    #[test]
    fn c_star_values() {
        assert_relative_eq!(
            c_star(1.5, 0.75).unwrap(),
            -std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-14
        );
        assert_eq!(c_star(1.5, 0.5).unwrap(), -1.0);
        for i in 1..99 {
            let alpha = 1.0 + i as f64 / 100.0;
            for j in 0..=10 {
                let p = FractionalModelParams::new(alpha, j as f64 / 10.0).unwrap();
                assert!(p.c_star_star() < 0.0);
            }
        }
    }

    #[test]
    fn ladder_values_at_symmetric_point() {
        let p = FractionalModelParams::new(1.5, 0.5).unwrap();
        // c** = -1/sqrt(2): lambda_0 = Gamma(2.5)/sqrt(2), sigma_0 = Gamma(0.5)/sqrt(2),
        // mu_{-1} = Gamma(1.5)/sqrt(2)
        let h = (std::f64::consts::PI / 2.0).sqrt();
        assert_relative_eq!(p.lambda(0), 0.75 * h, max_relative = 1e-14);
        assert_relative_eq!(p.sigma(0), h, max_relative = 1e-14);
        assert_relative_eq!(p.mu_minus_one(), 0.5 * h, max_relative = 1e-14);
        assert!((p.lambda(0) - 0.9399857).abs() < 2e-7);
        assert_eq!(p.ladder(Ladder::Mu, -1).unwrap(), p.mu_minus_one());
        assert!(p.ladder(Ladder::Sigma, -1).is_err());
        assert!(p.ladder(Ladder::Mu, -2).is_err());
    }

    #[test]
    fn cross_ladder_identities() {
        for &(alpha, r) in &[(1.2, 0.3), (1.5, 0.5), (1.8, 0.9), (1.05, 0.0), (1.95, 1.0)] {
            let p = FractionalModelParams::new(alpha, r).unwrap();
            for n in 0..=100usize {
                let nf = n as f64;
                let k = p.kappa(n);
                let k_from_sigma = -p.sigma(n) * (nf + alpha) * (nf + alpha - 1.0);
                assert_relative_eq!(k, k_from_sigma, max_relative = 1e-13);
                let l = p.lambda(n);
                assert_relative_eq!(l, -p.mu(n) * (nf + alpha), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(FractionalModelParams::new(1.0, 0.5).is_err());
        assert!(FractionalModelParams::new(2.0, 0.5).is_err());
        assert!(FractionalModelParams::new(1.5, -0.1).is_err());
        assert!(FractionalModelParams::new(1.5, 1.1).is_err());
        assert!(FractionalModelParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn beta_strictly_decreasing_in_r() {
        for &alpha in &[1.1, 1.5, 1.9] {
            let betas: Vec<f64> = (0..=50)
                .map(|i| solve_beta(alpha, i as f64 / 50.0).unwrap())
                .collect();
            assert!(betas.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn mirror_swaps_r_and_beta() {
        let p = FractionalModelParams::new(1.4, 0.3).unwrap();
        let m = p.mirrored();
        let direct = FractionalModelParams::new(1.4, 0.7).unwrap();
        assert_relative_eq!(m.beta(), direct.beta(), max_relative = 1e-12);
        assert_relative_eq!(m.c_star_star(), direct.c_star_star(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn beta_round_trip(alpha in 1.001f64..1.999, r in 0.0f64..=1.0) {
            let p = FractionalModelParams::new(alpha, r).unwrap();
            prop_assert!(p.relation_residual() <= 1e-12);
            prop_assert!(p.beta() >= alpha - 1.0 && p.beta() <= 1.0);
            let c = sin_pi(alpha) / (sin_pi(alpha - p.beta()) + sin_pi(p.beta()));
            prop_assert!((p.c_star_star() - c).abs() <= 1e-14 * c.abs());
        }
    }
}

//! Grid certification of the operator identities against the quadrature oracle.
//!
//! Every row compares a closed form (ladder constant times a Jacobi polynomial,
//! or the monomial expansion of `I_r` applied to a weighted monomial) with the
//! oracle at interior points and records the worst absolute difference.

use rayon::prelude::*;

use crate::error::Result;
use crate::operators::{
    apply_flux, apply_i_r, apply_operator, kappa_image, lambda_image, monomial_expansion_coeffs,
    monomial_expansion_mirror_coeffs, mu_image, sigma_image, Model, OracleConfig, OracleFunction,
    WeightedPoly,
};
use crate::params::FractionalModelParams;

pub const EIGEN_POINTS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const MONOMIAL_POINTS: [f64; 7] = [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9];
/// Quadrature-only identities.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Identities that go through a finite-difference derivative.
pub const FD_TOL: f64 = 1e-5;
/// Highest degree of the monomial expansion rows.
pub const MONOMIAL_MAX_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `I_r` of the kernel weight is the constant `sigma_0`.
    Sigma0Constancy,
    /// `I_r rho^{(alpha-beta-1, beta-1)} G_n = sigma_n G_n^{(beta-1, alpha-beta-1)}`.
    Sigma,
    /// RLC flux of the regular basis element (pure quadrature).
    MuFluxRlc,
    /// RL flux of the regular basis element (finite difference).
    MuFluxRl,
    /// RLC operator on the regular basis element.
    LambdaRlc,
    /// RL operator on the regular basis element.
    LambdaRl,
    /// RL operator on the singular basis element.
    KappaRl,
    /// Monomial expansion of `I_r` on `rho x^n`.
    MonomialExpansion,
    /// The same expansion with `(r, beta) -> (1 - r, alpha - beta)`.
    MonomialExpansionMirror,
}

impl Identity {
    pub const ALL: [Identity; 9] = [
        Identity::Sigma0Constancy,
        Identity::Sigma,
        Identity::MuFluxRlc,
        Identity::MuFluxRl,
        Identity::LambdaRlc,
        Identity::LambdaRl,
        Identity::KappaRl,
        Identity::MonomialExpansion,
        Identity::MonomialExpansionMirror,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::Sigma0Constancy => "sigma0_constancy",
            Identity::Sigma => "sigma_ladder",
            Identity::MuFluxRlc => "mu_flux_rlc",
            Identity::MuFluxRl => "mu_flux_rl",
            Identity::LambdaRlc => "lambda_rlc",
            Identity::LambdaRl => "lambda_rl",
            Identity::KappaRl => "kappa_rl",
            Identity::MonomialExpansion => "monomial_expansion",
            Identity::MonomialExpansionMirror => "monomial_expansion_mirror",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Identity::MuFluxRl | Identity::LambdaRlc | Identity::LambdaRl | Identity::KappaRl => {
                FD_TOL
            }
            _ => QUADRATURE_TOL,
        }
    }

    fn degrees(&self, n_max: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            Identity::Sigma0Constancy => 0..=0,
            Identity::MonomialExpansion | Identity::MonomialExpansionMirror => {
                0..=n_max.min(MONOMIAL_MAX_DEGREE)
            }
            _ => 0..=n_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub identity: Identity,
    pub alpha: f64,
    pub r: f64,
    pub n: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub alphas: Vec<f64>,
    pub rs: Vec<f64>,
    pub n_max: usize,
    /// Added to `c**` on the closed-form side only.
    pub c_star_fault: Option<f64>,
    pub max_quad_order: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            alphas: vec![1.2, 1.5, 1.8],
            rs: vec![0.0, 0.3, 0.5, 0.7, 1.0],
            n_max: 8,
            c_star_fault: None,
            max_quad_order: OracleConfig::default().max_order,
        }
    }
}

/// All rows for one `(alpha, r)` pair, in [`Identity::ALL`] order then by `n`.
pub fn verify_point(alpha: f64, r: f64, cfg: &VerifyConfig) -> Result<Vec<IdentityRow>> {
    let oracle = FractionalModelParams::new(alpha, r)?;
    let closed = match cfg.c_star_fault {
        Some(d) => oracle.with_c_star_offset(d),
        None => oracle,
    };
    let quad = OracleConfig::default().with_max_order(cfg.max_quad_order);
    let fd = OracleConfig::finite_difference().with_max_order(cfg.max_quad_order);
    let mut rows = Vec::new();
    for identity in Identity::ALL {
        for n in identity.degrees(cfg.n_max) {
            let err = identity_error(identity, &oracle, &closed, n, &quad, &fd)?;
            let tol = identity.tolerance();
            rows.push(IdentityRow {
                identity,
                alpha,
                r,
                n,
                max_error: err,
                tolerance: tol,
                pass: err <= tol,
            });
        }
    }
    Ok(rows)
}

fn identity_error(
    identity: Identity,
    p: &FractionalModelParams,
    closed: &FractionalModelParams,
    n: usize,
    quad: &OracleConfig,
    fd: &OracleConfig,
) -> Result<f64> {
    let max_over = |pts: &[f64], f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        pts.iter().try_fold(0.0f64, |m, &x| Ok(m.max(f(x)?)))
    };
    match identity {
        Identity::Sigma0Constancy | Identity::Sigma => {
            let g = WeightedPoly::basis_element(p.kernel_family(), n);
            max_over(&EIGEN_POINTS, &|x| {
                Ok((apply_i_r(p, &g, x, quad)? - sigma_image(closed, n, x)).abs())
            })
        }
        Identity::MuFluxRlc | Identity::MuFluxRl => {
            let (model, cfg) = if identity == Identity::MuFluxRlc {
                (Model::Rlc, quad)
            } else {
                (Model::Rl, fd)
            };
            let u = OracleFunction::single(WeightedPoly::basis_element(p.solution_family(), n));
            max_over(&EIGEN_POINTS, &|x| {
                Ok((apply_flux(p, model, &u, x, cfg)? + mu_image(closed, n, x)).abs())
            })
        }
        Identity::LambdaRlc | Identity::LambdaRl => {
            let model = if identity == Identity::LambdaRlc {
                Model::Rlc
            } else {
                Model::Rl
            };
            let u = OracleFunction::single(WeightedPoly::basis_element(p.solution_family(), n));
            max_over(&EIGEN_POINTS, &|x| {
                Ok((apply_operator(p, model, &u, x, fd)? - lambda_image(closed, n, x)).abs())
            })
        }
        Identity::KappaRl => {
            let u = OracleFunction::single(WeightedPoly::basis_element(p.kernel_family(), n));
            max_over(&EIGEN_POINTS, &|x| {
                Ok((apply_operator(p, Model::Rl, &u, x, fd)? - kappa_image(closed, n, x)).abs())
            })
        }
        Identity::MonomialExpansion => {
            let k = p.kernel_family();
            let g = WeightedPoly::monomial(k.a(), k.b(), n)?;
            let c = monomial_expansion_coeffs(closed, n);
            max_over(&MONOMIAL_POINTS, &|x| {
                Ok((apply_i_r(p, &g, x, quad)? - horner(&c, x)).abs())
            })
        }
        Identity::MonomialExpansionMirror => {
            let m = p.mirrored();
            let k = m.kernel_family();
            let g = WeightedPoly::monomial(k.a(), k.b(), n)?;
            let c = monomial_expansion_mirror_coeffs(closed, n);
            max_over(&MONOMIAL_POINTS, &|x| {
                Ok((apply_i_r(&m, &g, x, quad)? - horner(&c, x)).abs())
            })
        }
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Rows for every grid point, in grid order.
pub fn run_identity_suite(cfg: &VerifyConfig) -> Result<Vec<IdentityRow>> {
    let grid: Vec<(f64, f64)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| cfg.rs.iter().map(move |&r| (a, r)))
        .collect();
    let per_point: Vec<Result<Vec<IdentityRow>>> = grid
        .par_iter()
        .map(|&(a, r)| verify_point(a, r, cfg))
        .collect();
    let mut rows = Vec::new();
    for chunk in per_point {
        rows.extend(chunk?);
    }
    Ok(rows)
}

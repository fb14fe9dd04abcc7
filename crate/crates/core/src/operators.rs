//! Fractional integrals, fluxes and the RLC/RL operators evaluated by quadrature.
//!
//! Inputs are weighted polynomials `g(x) = (1 - x)^a x^b p(x)`. The left integral
//! is rewritten with `s = x t`,
//!
//! ```text
//! D^{-s} g(x) = x^{s+b} / Gamma(s) * int_0^1 (1-t)^{s-1} t^b [(1 - x t)^a p(x t)] dt,
//! ```
//!
//! and the right one with `s = x + (1 - x) t`,
//!
//! ```text
//! D^{-s*} g(x) = (1-x)^{s+a} / Gamma(s) * int_0^1 (1-t)^a t^{s-1} [s^b p(s)] dt,
//! ```
//!
//! so both the kernel singularity and the endpoint singularity of `g` sit in the
//! weight of a Gauss-Jacobi rule and the bracket is smooth. Derivatives in `x`
//! are taken either under the integral sign ([`DiffMode::Analytic`]) or by
//! central differences ([`DiffMode::FiniteDifference`]).
//!
//! Nothing here uses the eigenvalue ladders; the module exists to check them.

use crate::error::{Error, Result};
use crate::jacobi::{JacobiBasis, JacobiSeries};
use crate::params::FractionalModelParams;
use crate::quadrature::{cached_rule, QuadratureRule};
use crate::special::{gamma, gamma_ratio, rgamma};

/// Relative step of the first central difference.
pub const FD_FIRST_STEP: f64 = 1e-5;
/// Relative step of the five-point second difference.
pub const FD_SECOND_STEP: f64 = 3e-3;
/// Finite differences refuse points closer than this to an endpoint.
pub const FD_ENDPOINT_GUARD: f64 = 1e-4;

/// Which of the two model operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// `-D I_r D u`; flux `-I_r D u`.
    Rlc,
    /// `-D^2 I_r u`; flux `-D I_r u`.
    Rl,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Rlc => "rlc",
            Model::Rl => "rl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    /// Differentiate under the integral sign.
    Analytic,
    /// Central differences of quadrature values.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// First rule size; doubled until two successive rules agree.
    pub initial_order: usize,
    /// Largest rule tried before giving up with [`Error::Accuracy`].
    pub max_order: usize,
    /// Agreement threshold, relative to `1 + sum |w_k f(t_k)|`.
    pub tolerance: f64,
    pub diff_mode: DiffMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            initial_order: 64,
            max_order: 1024,
            tolerance: 1e-11,
            diff_mode: DiffMode::Analytic,
        }
    }
}

impl OracleConfig {
    pub fn finite_difference() -> Self {
        Self {
            diff_mode: DiffMode::FiniteDifference,
            ..Self::default()
        }
    }

    pub fn with_max_order(self, max_order: usize) -> Self {
        Self { max_order, ..self }
    }
}

/// A Jacobi series with its first three derivative series precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFactor {
    series: JacobiSeries,
    derivs: [JacobiSeries; 3],
}

impl JacobiFactor {
    pub fn new(series: JacobiSeries) -> Self {
        let derivs = [
            series.derivative(1),
            series.derivative(2),
            series.derivative(3),
        ];
        Self { series, derivs }
    }

    pub fn series(&self) -> &JacobiSeries {
        &self.series
    }
}

/// The smooth factor `p` of a weighted polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum PolyFactor {
    Jacobi(JacobiFactor),
    /// Monomial coefficients, lowest degree first.
    Power(Vec<f64>),
    /// The bracket left after differentiating `(1-x)^a x^b p(x)` and pulling out
    /// `(1-x)^{a-1} x^{b-1}` (an exponent that is exactly zero is not lowered).
    Differentiated {
        a: f64,
        b: f64,
        inner: Box<PolyFactor>,
    },
}

impl PolyFactor {
    pub fn jacobi(series: JacobiSeries) -> Self {
        PolyFactor::Jacobi(JacobiFactor::new(series))
    }

    pub fn constant(c: f64) -> Self {
        PolyFactor::Power(vec![c])
    }

    /// `[p, p', p'', p''']` at `s`. A differentiated factor only supplies two
    /// derivatives; its last entry is NaN.
    pub fn jet(&self, s: f64) -> [f64; 4] {
        match self {
            PolyFactor::Jacobi(f) => [
                f.series.eval(s),
                f.derivs[0].eval(s),
                f.derivs[1].eval(s),
                f.derivs[2].eval(s),
            ],
            PolyFactor::Power(c) => {
                let mut d = [0.0; 4];
                for &ck in c.iter().rev() {
                    d[3] = d[3] * s + d[2];
                    d[2] = d[2] * s + d[1];
                    d[1] = d[1] * s + d[0];
                    d[0] = d[0] * s + ck;
                }
                [d[0], d[1], 2.0 * d[2], 6.0 * d[3]]
            }
            PolyFactor::Differentiated { a, b, inner } => {
                let [p, p1, p2, p3] = inner.jet(s);
                let (a, b) = (*a, *b);
                match (a != 0.0, b != 0.0) {
                    (true, true) => {
                        let ab = a + b;
                        [
                            b * p - ab * s * p + s * (1.0 - s) * p1,
                            b * p1 - ab * (p + s * p1) + (1.0 - 2.0 * s) * p1 + s * (1.0 - s) * p2,
                            b * p2 - ab * (2.0 * p1 + s * p2) - 2.0 * p1
                                + 2.0 * (1.0 - 2.0 * s) * p2
                                + s * (1.0 - s) * p3,
                            f64::NAN,
                        ]
                    }
                    (false, true) => [
                        b * p + s * p1,
                        (b + 1.0) * p1 + s * p2,
                        (b + 2.0) * p2 + s * p3,
                        f64::NAN,
                    ],
                    (true, false) => [
                        -a * p + (1.0 - s) * p1,
                        -(a + 1.0) * p1 + (1.0 - s) * p2,
                        -(a + 2.0) * p2 + (1.0 - s) * p3,
                        f64::NAN,
                    ],
                    (false, false) => [p1, p2, p3, f64::NAN],
                }
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            PolyFactor::Jacobi(f) => f.series.eval(s),
            _ => self.jet(s)[0],
        }
    }
}

/// `g(x) = (1 - x)^a x^b p(x)` with `a, b > -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoly {
    a: f64,
    b: f64,
    poly: PolyFactor,
}

impl WeightedPoly {
    pub fn new(a: f64, b: f64, poly: PolyFactor) -> Result<Self> {
        // reuse the exponent check of the Jacobi families
        JacobiBasis::new(a, b)?;
        Ok(Self { a, b, poly })
    }

    /// `amplitude (1 - x)^a x^b`.
    pub fn power(a: f64, b: f64, amplitude: f64) -> Result<Self> {
        Self::new(a, b, PolyFactor::constant(amplitude))
    }

    /// `(1 - x)^a x^{b + n}`.
    pub fn monomial(a: f64, b: f64, n: usize) -> Result<Self> {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::new(a, b, PolyFactor::Power(c))
    }

    /// `(1 - x)^a x^b G_n^{(a,b)}(x)` for the family `basis = (a, b)`.
    pub fn basis_element(basis: JacobiBasis, n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::weighted_series(JacobiSeries::new(basis, c))
    }

    /// `(1 - x)^a x^b sum_n d_n G_n^{(a,b)}(x)`, weighted by the series' own family.
    pub fn weighted_series(series: JacobiSeries) -> Self {
        let basis = series.basis();
        Self {
            a: basis.a(),
            b: basis.b(),
            poly: PolyFactor::jacobi(series),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn poly(&self) -> &PolyFactor {
        &self.poly
    }

    pub fn eval(&self, x: f64) -> f64 {
        weight(self.a, self.b, x) * self.poly.eval(x)
    }

    /// `d/dx g` as another weighted polynomial.
    pub fn derivative(&self) -> Result<Self> {
        let lower = |e: f64| if e != 0.0 { e - 1.0 } else { e };
        Self::new(
            lower(self.a),
            lower(self.b),
            PolyFactor::Differentiated {
                a: self.a,
                b: self.b,
                inner: Box::new(self.poly.clone()),
            },
        )
        .map_err(|_| {
            Error::Domain(format!(
                "derivative of (1-x)^{} x^{} is not integrable",
                self.a, self.b
            ))
        })
    }
}

fn weight(a: f64, b: f64, x: f64) -> f64 {
    let wa = if a == 0.0 { 1.0 } else { (1.0 - x).powf(a) };
    let wb = if b == 0.0 { 1.0 } else { x.powf(b) };
    wa * wb
}

/// `[v, v', v'']` of `z^e` composed with `z = c0 + c1 s`, all evaluated at `s`.
fn power_jet(e: f64, z: f64, dz: f64) -> [f64; 3] {
    if e == 0.0 {
        return [1.0, 0.0, 0.0];
    }
    let v = z.powf(e);
    [v, e * dz * v / z, e * (e - 1.0) * dz * dz * v / (z * z)]
}

fn product_jet(w: [f64; 3], p: [f64; 4]) -> [f64; 3] {
    [
        w[0] * p[0],
        w[0] * p[1] + w[1] * p[0],
        w[0] * p[2] + 2.0 * w[1] * p[1] + w[2] * p[0],
    ]
}

/// Quadrature sums `F_m` (m <= order) with their absolute counterparts.
type Sums = ([f64; 3], [f64; 3]);

fn settle<F>(basis: JacobiBasis, cfg: &OracleConfig, mut sums: F) -> Result<[f64; 3]>
where
    F: FnMut(&QuadratureRule) -> Result<Sums>,
{
    let max = cfg.max_order.max(2);
    let mut n = cfg.initial_order.min(max / 2).max(1);
    let (mut prev, _) = sums(&*cached_rule(basis, n)?)?;
    let mut worst = f64::INFINITY;
    while 2 * n <= max {
        n *= 2;
        let (cur, abs) = sums(&*cached_rule(basis, n)?)?;
        worst = 0.0;
        let mut ok = true;
        for k in 0..3 {
            let d = (cur[k] - prev[k]).abs();
            worst = worst.max(d);
            if !(d <= cfg.tolerance * (1.0 + abs[k])) {
                ok = false;
            }
        }
        if ok {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Accuracy {
        order: n,
        difference: worst,
    })
}

fn accumulate(acc: &mut Sums, w: f64, terms: [f64; 3], order: usize) -> Result<()> {
    for k in 0..=order {
        let v = w * terms[k];
        if !v.is_finite() {
            return Err(Error::Domain("non-finite fractional integrand".into()));
        }
        acc.0[k] += v;
        acc.1[k] += v.abs();
    }
    Ok(())
}

fn check_inputs(sigma: f64, x: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!(
            "integral order {sigma} outside (0, 1)"
        )));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is not interior")));
    }
    Ok(())
}

/// `[L, L', L'']` of the left integral; entries above `order` are zero.
fn left_jet(
    sigma: f64,
    g: &WeightedPoly,
    x: f64,
    order: usize,
    cfg: &OracleConfig,
) -> Result<[f64; 3]> {
    check_inputs(sigma, x)?;
    let basis = JacobiBasis::new(sigma - 1.0, g.b)?;
    let f = settle(basis, cfg, |rule| {
        let mut acc: Sums = ([0.0; 3], [0.0; 3]);
        for (t, w) in rule.iter() {
            let s = x * t;
            // h(s) = (1 - s)^a p(s), differentiated in s
            let h = product_jet(power_jet(g.a, 1.0 - s, -1.0), g.poly.jet(s));
            accumulate(&mut acc, w, [h[0], t * h[1], t * t * h[2]], order)?;
        }
        Ok(acc)
    })?;
    let e = sigma + g.b;
    let xe = x.powf(e);
    let scale = rgamma(sigma);
    let mut out = [xe * f[0] * scale, 0.0, 0.0];
    if order >= 1 {
        out[1] = (e * xe / x * f[0] + xe * f[1]) * scale;
    }
    if order >= 2 {
        out[2] =
            (e * (e - 1.0) * xe / (x * x) * f[0] + 2.0 * e * xe / x * f[1] + xe * f[2]) * scale;
    }
    Ok(out)
}

/// `[R, R', R'']` of the right integral.
fn right_jet(
    sigma: f64,
    g: &WeightedPoly,
    x: f64,
    order: usize,
    cfg: &OracleConfig,
) -> Result<[f64; 3]> {
    check_inputs(sigma, x)?;
    let basis = JacobiBasis::new(g.a, sigma - 1.0)?;
    let f = settle(basis, cfg, |rule| {
        let mut acc: Sums = ([0.0; 3], [0.0; 3]);
        for (t, w) in rule.iter() {
            let s = x + (1.0 - x) * t;
            let q = product_jet(power_jet(g.b, s, 1.0), g.poly.jet(s));
            let c = 1.0 - t;
            accumulate(&mut acc, w, [q[0], c * q[1], c * c * q[2]], order)?;
        }
        Ok(acc)
    })?;
    let e = sigma + g.a;
    let u = 1.0 - x;
    let ue = u.powf(e);
    let scale = rgamma(sigma);
    let mut out = [ue * f[0] * scale, 0.0, 0.0];
    if order >= 1 {
        out[1] = (-e * ue / u * f[0] + ue * f[1]) * scale;
    }
    if order >= 2 {
        out[2] =
            (e * (e - 1.0) * ue / (u * u) * f[0] - 2.0 * e * ue / u * f[1] + ue * f[2]) * scale;
    }
    Ok(out)
}

/// `D^{-sigma} g (x)`.
pub fn left_frac_integral(sigma: f64, g: &WeightedPoly, x: f64, cfg: &OracleConfig) -> Result<f64> {
    Ok(left_jet(sigma, g, x, 0, cfg)?[0])
}

/// `D^{-sigma*} g (x)`.
pub fn right_frac_integral(
    sigma: f64,
    g: &WeightedPoly,
    x: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    Ok(right_jet(sigma, g, x, 0, cfg)?[0])
}

/// `[I, I', I'']` of `I_r^{2-alpha} g` at `x`, analytic derivatives up to `order`.
pub fn i_r_jet(
    params: &FractionalModelParams,
    g: &WeightedPoly,
    x: f64,
    order: usize,
    cfg: &OracleConfig,
) -> Result<[f64; 3]> {
    let sigma = params.sigma_order();
    let r = params.r();
    let mut out = [0.0; 3];
    if r != 0.0 {
        let l = left_jet(sigma, g, x, order, cfg)?;
        for k in 0..3 {
            out[k] += r * l[k];
        }
    }
    if r != 1.0 {
        let rt = right_jet(sigma, g, x, order, cfg)?;
        for k in 0..3 {
            out[k] += (1.0 - r) * rt[k];
        }
    }
    Ok(out)
}

/// `I_r^{2-alpha} g (x) = r D^{-(2-alpha)} g + (1 - r) D^{-(2-alpha)*} g`.
pub fn apply_i_r(
    params: &FractionalModelParams,
    g: &WeightedPoly,
    x: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    Ok(i_r_jet(params, g, x, 0, cfg)?[0])
}

/// A function the oracle can push through the operators: a sum of weighted
/// polynomials plus amplitudes of the two RLC kernel functions
/// `k0(x) = int_x^1 rho` and `k1(x) = int_0^x rho`, `rho = (1-x)^{alpha-beta-1} x^{beta-1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleFunction {
    pub terms: Vec<WeightedPoly>,
    pub k0: f64,
    pub k1: f64,
}

impl OracleFunction {
    pub fn new(terms: Vec<WeightedPoly>) -> Self {
        Self {
            terms,
            k0: 0.0,
            k1: 0.0,
        }
    }

    pub fn single(term: WeightedPoly) -> Self {
        Self::new(vec![term])
    }

    pub fn with_kernels(mut self, k0: f64, k1: f64) -> Self {
        self.k0 = k0;
        self.k1 = k1;
        self
    }

    /// The pieces of `Du`, with the kernel functions contributing `(k1 - k0) rho`.
    pub fn derivative_terms(&self, params: &FractionalModelParams) -> Result<Vec<WeightedPoly>> {
        let mut out = self
            .terms
            .iter()
            .map(WeightedPoly::derivative)
            .collect::<Result<Vec<_>>>()?;
        let amp = self.k1 - self.k0;
        if amp != 0.0 {
            let k = params.kernel_family();
            out.push(WeightedPoly::power(k.a(), k.b(), amp)?);
        }
        Ok(out)
    }

    fn rl_terms(&self) -> Result<&[WeightedPoly]> {
        if self.k0 != 0.0 || self.k1 != 0.0 {
            return Err(Error::Domain(
                "kernel functions k0, k1 are not weighted polynomials; the RL oracle cannot take them".into(),
            ));
        }
        Ok(&self.terms)
    }
}

fn sum_jets(
    params: &FractionalModelParams,
    terms: &[WeightedPoly],
    x: f64,
    order: usize,
    cfg: &OracleConfig,
) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for g in terms {
        let j = i_r_jet(params, g, x, order, cfg)?;
        for k in 0..3 {
            out[k] += j[k];
        }
    }
    Ok(out)
}

fn fd_guard(x: f64) -> Result<()> {
    if !(FD_ENDPOINT_GUARD..=1.0 - FD_ENDPOINT_GUARD).contains(&x) {
        return Err(Error::Domain(format!(
            "x = {x} is too close to an endpoint for finite differences"
        )));
    }
    Ok(())
}

/// `k`-th derivative (1 or 2) of `x -> I_r(terms)(x)` in the configured mode.
fn derivative_of_i_r(
    params: &FractionalModelParams,
    terms: &[WeightedPoly],
    x: f64,
    k: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    match cfg.diff_mode {
        DiffMode::Analytic => Ok(sum_jets(params, terms, x, k, cfg)?[k]),
        DiffMode::FiniteDifference => {
            fd_guard(x)?;
            let m = x.min(1.0 - x);
            let v = |y: f64| sum_jets(params, terms, y, 0, cfg).map(|j| j[0]);
            if k == 1 {
                let h = FD_FIRST_STEP * m;
                Ok((v(x + h)? - v(x - h)?) / (2.0 * h))
            } else {
                // fourth-order five-point stencil
                let h = FD_SECOND_STEP * m;
                let outer = v(x + 2.0 * h)? + v(x - 2.0 * h)?;
                let inner = v(x + h)? + v(x - h)?;
                Ok((16.0 * inner - outer - 30.0 * v(x)?) / (12.0 * h * h))
            }
        }
    }
}

/// Flux of `u`: `-I_r D u` (RLC) or `-D I_r u` (RL).
pub fn apply_flux(
    params: &FractionalModelParams,
    model: Model,
    u: &OracleFunction,
    x: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    match model {
        Model::Rlc => {
            let du = u.derivative_terms(params)?;
            Ok(-sum_jets(params, &du, x, 0, cfg)?[0])
        }
        Model::Rl => Ok(-derivative_of_i_r(params, u.rl_terms()?, x, 1, cfg)?),
    }
}

/// `-D I_r D u` (RLC) or `-D^2 I_r u` (RL).
pub fn apply_operator(
    params: &FractionalModelParams,
    model: Model,
    u: &OracleFunction,
    x: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    match model {
        Model::Rlc => {
            let du = u.derivative_terms(params)?;
            Ok(-derivative_of_i_r(params, &du, x, 1, cfg)?)
        }
        Model::Rl => Ok(-derivative_of_i_r(params, u.rl_terms()?, x, 2, cfg)?),
    }
}

/// `sigma_n G_n^{(beta-1, alpha-beta-1)}(x)`: `I_r` of the singular basis element `n`.
pub fn sigma_image(params: &FractionalModelParams, n: usize, x: f64) -> f64 {
    params.sigma(n) * params.flux_family().eval_unchecked(n, x)
}

/// `mu_n G_{n+1}^{(beta-1, alpha-beta-1)}(x)`: `D I_r` of the regular basis element `n`.
pub fn mu_image(params: &FractionalModelParams, n: usize, x: f64) -> f64 {
    params.mu(n) * params.flux_family().eval_unchecked(n + 1, x)
}

/// `lambda_n G_n^{(beta, alpha-beta)}(x)`: either operator on the regular basis element `n`.
pub fn lambda_image(params: &FractionalModelParams, n: usize, x: f64) -> f64 {
    params.lambda(n) * params.rhs_family().eval_unchecked(n, x)
}

/// `kappa_n G_{n-2}^{(beta+1, alpha-beta+1)}(x)`: the RL operator on the singular
/// basis element `n`; zero for `n < 2`.
pub fn kappa_image(params: &FractionalModelParams, n: usize, x: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    params.kappa(n) * params.weak_rhs_family().eval_unchecked(n - 2, x)
}

fn expansion_coeffs(params: &FractionalModelParams, e: f64, n: usize) -> Vec<f64> {
    let alpha = params.alpha();
    let nf = n as f64;
    let lead = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 } * params.c_star_star();
    (0..=n)
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            // Gamma(e) / Gamma(e - n + k) vanishes when the denominator hits a pole
            let pole_ratio = gamma_ratio(e, e - nf + kf);
            lead * sign * pole_ratio * gamma_ratio(alpha - 1.0 + kf, kf + 1.0)
                / gamma(nf + 1.0 - kf)
        })
        .collect()
}

/// Monomial coefficients `a_{n,k}` with
/// `I_r (1-x)^{alpha-beta-1} x^{beta-1} x^n = sum_k a_{n,k} x^k`.
pub fn monomial_expansion_coeffs(params: &FractionalModelParams, n: usize) -> Vec<f64> {
    expansion_coeffs(params, params.alpha() - params.beta(), n)
}

/// The mirrored coefficients `b_{n,k}` with
/// `I_{1-r} (1-x)^{beta-1} x^{alpha-beta-1} x^n = sum_k b_{n,k} x^k`.
pub fn monomial_expansion_mirror_coeffs(params: &FractionalModelParams, n: usize) -> Vec<f64> {
    expansion_coeffs(params, params.beta(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

    fn params(alpha: f64, r: f64) -> FractionalModelParams {
        FractionalModelParams::new(alpha, r).unwrap()
    }

    fn horner(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
    }

    #[test]
    fn integral_of_one() {
        let cfg = OracleConfig::default();
        let one = WeightedPoly::power(0.0, 0.0, 1.0).unwrap();
        for &sigma in &[0.2, 0.5, 0.9] {
            for &x in &GRID {
                let want = x.powf(sigma) / gamma(sigma + 1.0);
                assert_relative_eq!(
                    left_frac_integral(sigma, &one, x, &cfg).unwrap(),
                    want,
                    max_relative = 1e-13
                );
                let want = (1.0 - x).powf(sigma) / gamma(sigma + 1.0);
                assert_relative_eq!(
                    right_frac_integral(sigma, &one, x, &cfg).unwrap(),
                    want,
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn power_law_beta_identity() {
        let cfg = OracleConfig::default();
        for &(sigma, b) in &[(0.5, 0.5), (0.3, -0.4), (0.8, 1.7)] {
            let g = WeightedPoly::power(0.0, b, 1.0).unwrap();
            for &x in &GRID {
                let want = gamma_ratio(b + 1.0, b + 1.0 + sigma) * x.powf(b + sigma);
                assert_relative_eq!(
                    left_frac_integral(sigma, &g, x, &cfg).unwrap(),
                    want,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn reflection() {
        let cfg = OracleConfig::default();
        let g = WeightedPoly::new(0.3, -0.6, PolyFactor::Power(vec![1.0, -2.0, 0.5])).unwrap();
        // g(1 - s) = s^{0.3} (1-s)^{-0.6} p(1 - s)
        let p_ref = [1.0 - 2.0 + 0.5, 2.0 - 1.0, 0.5];
        let g_ref = WeightedPoly::new(-0.6, 0.3, PolyFactor::Power(p_ref.to_vec())).unwrap();
        for &x in &GRID {
            let rv = right_frac_integral(0.4, &g, x, &cfg).unwrap();
            let lv = left_frac_integral(0.4, &g_ref, 1.0 - x, &cfg).unwrap();
            assert_relative_eq!(rv, lv, max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_weight_maps_to_sigma_zero() {
        let cfg = OracleConfig::default();
        for &(alpha, r) in &[(1.2, 0.0), (1.5, 0.5), (1.8, 0.7), (1.3, 1.0)] {
            let p = params(alpha, r);
            let k = p.kernel_family();
            let g = WeightedPoly::power(k.a(), k.b(), 1.0).unwrap();
            let vals: Vec<f64> = GRID
                .iter()
                .map(|&x| apply_i_r(&p, &g, x, &cfg).unwrap())
                .collect();
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread <= 1e-10, "alpha={alpha} r={r} spread={spread}");
            assert_relative_eq!(vals[4], p.sigma(0), max_relative = 1e-10);
        }
    }

    #[test]
    fn sigma_ladder_on_singular_basis() {
        let cfg = OracleConfig::default();
        for &(alpha, r) in &[(1.2, 0.3), (1.5, 0.5), (1.8, 1.0), (1.5, 0.0)] {
            let p = params(alpha, r);
            for n in 0..=10 {
                let g = WeightedPoly::basis_element(p.kernel_family(), n);
                for &x in &GRID {
                    let v = apply_i_r(&p, &g, x, &cfg).unwrap();
                    let want = sigma_image(&p, n, x);
                    assert!(
                        (v - want).abs() <= 1e-9,
                        "alpha={alpha} r={r} n={n} x={x}: {v} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn flux_ladders_both_models_and_modes() {
        for &(alpha, r) in &[(1.2, 0.0), (1.5, 0.5), (1.8, 0.7), (1.5, 1.0)] {
            let p = params(alpha, r);
            for n in 0..=8 {
                let u = OracleFunction::single(WeightedPoly::basis_element(p.solution_family(), n));
                for &x in &[0.15, 0.5, 0.85] {
                    let want = -mu_image(&p, n, x);
                    let rlc = apply_flux(&p, Model::Rlc, &u, x, &OracleConfig::default()).unwrap();
                    assert!(
                        (rlc - want).abs() <= 1e-9,
                        "rlc n={n} x={x}: {rlc} vs {want}"
                    );
                    let rl = apply_flux(&p, Model::Rl, &u, x, &OracleConfig::default()).unwrap();
                    assert!((rl - want).abs() <= 1e-9, "rl n={n} x={x}: {rl} vs {want}");
                    let fd = apply_flux(&p, Model::Rl, &u, x, &OracleConfig::finite_difference())
                        .unwrap();
                    assert!((fd - want).abs() <= 1e-6, "fd n={n} x={x}: {fd} vs {want}");
                }
            }
        }
    }

    #[test]
    fn operators_on_regular_basis_give_lambda() {
        let p = params(1.4, 0.3);
        for n in 0..=8 {
            let u = OracleFunction::single(WeightedPoly::basis_element(p.solution_family(), n));
            for &x in &[0.2, 0.5, 0.8] {
                let want = lambda_image(&p, n, x);
                for model in [Model::Rlc, Model::Rl] {
                    let v = apply_operator(&p, model, &u, x, &OracleConfig::default()).unwrap();
                    assert!(
                        (v - want).abs() <= 1e-8 * (1.0 + want.abs()),
                        "{model:?} n={n} x={x}: {v} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn rl_operator_on_singular_basis_gives_kappa() {
        let p = params(1.5, 0.5);
        for n in 0..=8 {
            let u = OracleFunction::single(WeightedPoly::basis_element(p.kernel_family(), n));
            for &x in &[0.2, 0.35, 0.8] {
                let want = kappa_image(&p, n, x);
                let an = apply_operator(&p, Model::Rl, &u, x, &OracleConfig::default()).unwrap();
                assert!(
                    (an - want).abs() <= 1e-8 * (1.0 + want.abs()),
                    "n={n} x={x}: {an} vs {want}"
                );
                let fd = apply_operator(&p, Model::Rl, &u, x, &OracleConfig::finite_difference())
                    .unwrap();
                assert!(
                    (fd - want).abs() <= 1e-5 * (1.0 + want.abs()),
                    "fd n={n} x={x}: {fd} vs {want}"
                );
            }
        }
    }

    #[test]
    fn x_times_kernel_weight_has_constant_d_i_r() {
        let cfg = OracleConfig::default();
        let p = params(1.6, 0.4);
        let k = p.kernel_family();
        let u = OracleFunction::single(WeightedPoly::power(k.a(), k.b() + 1.0, 1.0).unwrap());
        for &x in &GRID {
            let flux = apply_flux(&p, Model::Rl, &u, x, &cfg).unwrap();
            assert_relative_eq!(-flux, p.mu_minus_one(), max_relative = 1e-10);
        }
    }

    #[test]
    fn constants_and_kernels_in_rlc() {
        let cfg = OracleConfig::default();
        let p = params(1.5, 0.3);
        let c = OracleFunction::single(WeightedPoly::power(0.0, 0.0, 3.0).unwrap());
        assert_eq!(apply_flux(&p, Model::Rlc, &c, 0.4, &cfg).unwrap(), 0.0);
        let k0 = OracleFunction::default().with_kernels(1.0, 0.0);
        let k1 = OracleFunction::default().with_kernels(0.0, 1.0);
        for &x in &GRID {
            assert_relative_eq!(
                apply_flux(&p, Model::Rlc, &k0, x, &cfg).unwrap(),
                p.sigma(0),
                max_relative = 1e-10
            );
            assert_relative_eq!(
                apply_flux(&p, Model::Rlc, &k1, x, &cfg).unwrap(),
                -p.sigma(0),
                max_relative = 1e-10
            );
            assert!(apply_operator(&p, Model::Rlc, &k0, x, &cfg).unwrap().abs() < 1e-9);
        }
        assert!(apply_flux(&p, Model::Rl, &k0, 0.5, &cfg).is_err());
    }

    #[test]
    fn symmetric_case_preserves_symmetry() {
        let cfg = OracleConfig::default();
        let p = params(1.5, 0.5);
        // x(1-x) (1 + x(1-x)) is symmetric about 1/2
        let g = WeightedPoly::new(1.0, 1.0, PolyFactor::Power(vec![1.0, 1.0, -1.0])).unwrap();
        for &x in &[0.1, 0.25, 0.4] {
            let l = apply_i_r(&p, &g, x, &cfg).unwrap();
            let rr = apply_i_r(&p, &g, 1.0 - x, &cfg).unwrap();
            assert!((l - rr).abs() <= 1e-12);
        }
    }

    #[test]
    fn monomial_expansion_against_quadrature() {
        let cfg = OracleConfig::default();
        for &(alpha, r) in &[(1.2, 0.0), (1.5, 0.5), (1.8, 0.3), (1.5, 1.0)] {
            let p = params(alpha, r);
            let k = p.kernel_family();
            for n in 0..=5 {
                let coeffs = monomial_expansion_coeffs(&p, n);
                let g = WeightedPoly::monomial(k.a(), k.b(), n).unwrap();
                for &x in &[0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9] {
                    let q = apply_i_r(&p, &g, x, &cfg).unwrap();
                    let c = horner(&coeffs, x);
                    assert!(
                        (q - c).abs() <= 1e-9,
                        "alpha={alpha} r={r} n={n} x={x}: {q} vs {c}"
                    );
                }
            }
            assert_relative_eq!(
                monomial_expansion_coeffs(&p, 0)[0],
                p.sigma(0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn mirrored_coefficients_match_swap() {
        let p = params(1.7, 0.2);
        let m = p.mirrored();
        for n in 0..=5 {
            let b = monomial_expansion_mirror_coeffs(&p, n);
            let a = monomial_expansion_coeffs(&m, n);
            for (x, y) in a.iter().zip(&b) {
                assert_relative_eq!(x, y, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn rule_doubling_settles_and_cap_errors() {
        let p = params(1.5, 0.5);
        let g = WeightedPoly::basis_element(p.kernel_family(), 10);
        let coarse = apply_i_r(
            &p,
            &g,
            0.3,
            &OracleConfig {
                initial_order: 16,
                ..Default::default()
            },
        )
        .unwrap();
        let fine = apply_i_r(
            &p,
            &g,
            0.3,
            &OracleConfig {
                initial_order: 256,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((coarse - fine).abs() < 1e-10);
        let capped = OracleConfig {
            initial_order: 2,
            max_order: 4,
            ..Default::default()
        };
        assert!(matches!(
            apply_i_r(&p, &g, 0.3, &capped),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn finite_difference_guard() {
        let p = params(1.5, 0.5);
        let u = OracleFunction::single(WeightedPoly::basis_element(p.solution_family(), 1));
        let cfg = OracleConfig::finite_difference();
        assert!(apply_flux(&p, Model::Rl, &u, 5e-5, &cfg).is_err());
        assert!(apply_operator(&p, Model::Rl, &u, 1.0 - 5e-5, &cfg).is_err());
    }

    #[test]
    fn power_jet_derivatives() {
        let f = PolyFactor::Power(vec![1.0, -1.0, 2.0, 0.5]);
        let j = f.jet(0.3);
        assert_relative_eq!(j[0], 1.0 - 0.3 + 2.0 * 0.09 + 0.5 * 0.027);
        assert_relative_eq!(j[1], -1.0 + 4.0 * 0.3 + 1.5 * 0.09);
        assert_relative_eq!(j[2], 4.0 + 3.0 * 0.3);
        assert_relative_eq!(j[3], 3.0);
    }

    #[test]
    fn differentiated_factor_matches_fd() {
        let base = JacobiBasis::new(0.4, 0.7).unwrap();
        let g = WeightedPoly::weighted_series(JacobiSeries::new(base, vec![0.3, -1.0, 0.5, 0.25]));
        let dg = g.derivative().unwrap();
        assert_relative_eq!(dg.a(), -0.6);
        assert_relative_eq!(dg.b(), -0.3);
        for &x in &[0.2, 0.5, 0.7] {
            let h = 1e-6;
            let fd = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
            assert_relative_eq!(dg.eval(x), fd, max_relative = 1e-7);
            // the jet of the bracket against differences of the bracket itself
            let q = |s: f64| dg.poly().eval(s);
            let jet = dg.poly().jet(x);
            assert_relative_eq!(
                jet[1],
                (q(x + h) - q(x - h)) / (2.0 * h),
                max_relative = 1e-6
            );
            let h2 = 1e-4;
            assert_relative_eq!(
                jet[2],
                (q(x + h2) - 2.0 * q(x) + q(x - h2)) / (h2 * h2),
                max_relative = 1e-5
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn i_r_is_linear(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, x in 0.05f64..0.95, r in 0.0f64..=1.0) {
            let cfg = OracleConfig::default();
            let p = params(1.45, r);
            let fam = p.kernel_family();
            let g1 = WeightedPoly::basis_element(fam, 2);
            let g2 = WeightedPoly::basis_element(fam, 5);
            let mut coeffs = vec![0.0; 6];
            coeffs[2] = c1;
            coeffs[5] = c2;
            let comb = WeightedPoly::weighted_series(JacobiSeries::new(fam, coeffs));
            let lhs = apply_i_r(&p, &comb, x, &cfg).unwrap();
            let rhs = c1 * apply_i_r(&p, &g1, x, &cfg).unwrap() + c2 * apply_i_r(&p, &g2, x, &cfg).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}

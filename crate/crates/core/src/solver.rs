//! Closed-form spectral solution of the RLC and RL boundary value problems.
//!
//! The right-hand side is expanded in `G_i^{(beta, alpha-beta)}`; the regular
//! part of the solution is `u = rho^{(alpha-beta, beta)} sum c_i G_i^{(alpha-beta, beta)}`
//! with `c_i = f_i / (lambda_i |||G_i|||^2)`. Boundary data are met by adding
//! kernel elements of the operator:
//!
//! * RLC: constants and `k0(x) = int_x^1 rho`, `k1(x) = int_0^x rho` with
//!   `rho = (1-x)^{alpha-beta-1} x^{beta-1}`;
//! * RL: the singular powers `(1-x)^{alpha-beta-1} x^beta`, `(1-x)^{alpha-beta} x^{beta-1}`
//!   and their sum direction `rho` itself.
//!
//! Flux-type conditions fix a kernel amplitude through the series
//! `sum mu_i c_i G_{i+1}^{(beta-1, alpha-beta-1)}(0)`, which is where the
//! one-sided cases `r = 0, 1` lose well-posedness.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jacobi::{JacobiBasis, JacobiSeries};
use crate::operators::{apply_operator, Model, OracleConfig, OracleFunction, WeightedPoly};
use crate::params::FractionalModelParams;
use crate::quadrature::cached_rule;
use crate::special::beta as beta_fn;

/// Gauss-Legendre order used for `int_0^1 f` of pointwise right-hand sides.
const INTEGRAL_ORDER: usize = 128;
/// Nodes of the fixed rules behind `k0` and `k1`.
const KERNEL_ORDER: usize = 64;
/// Terms allowed to the lazily summed flux-constant series.
pub const SERIES_MAX_TERMS: usize = 1_000_000;
/// Tail bound at which the lazy flux-constant series stops.
pub const SERIES_TAIL_TOL: f64 = 1e-12;
/// Residual allowed when checking the weak RL coefficients.
pub const WEAK_RESIDUAL_TOL: f64 = 1e-5;
/// Points at which the weak RL solve is checked.
pub const WEAK_CHECK_POINTS: [f64; 3] = [0.2, 0.5, 0.8];

/// A real function usable as a right-hand side.
pub type RhsFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The right-hand side `f`.
#[derive(Clone)]
pub enum RhsSpec {
    Callable(RhsFn),
    /// Projection coefficients `f_i` in `G_i^{(beta, alpha-beta)}`.
    JacobiCoeffs(Vec<f64>),
    Constant(f64),
    /// `x^p`.
    Monomial(u32),
    /// Power-basis coefficients, lowest degree first.
    Polynomial(Vec<f64>),
    /// `f_i = (-1)^i / ln i` for `i >= 2`, zero below.
    LogSeries,
}

impl fmt::Debug for RhsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsSpec::Callable(_) => write!(f, "Callable(..)"),
            RhsSpec::JacobiCoeffs(c) => f.debug_tuple("JacobiCoeffs").field(c).finish(),
            RhsSpec::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            RhsSpec::Monomial(p) => f.debug_tuple("Monomial").field(p).finish(),
            RhsSpec::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            RhsSpec::LogSeries => write!(f, "LogSeries"),
        }
    }
}

impl RhsSpec {
    pub fn callable<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        RhsSpec::Callable(Arc::new(f))
    }

    /// Pointwise evaluator, when `f` is given as a function rather than by coefficients.
    pub fn pointwise(&self) -> Option<RhsFn> {
        match self {
            RhsSpec::Callable(f) => Some(Arc::clone(f)),
            RhsSpec::Constant(c) => {
                let c = *c;
                Some(Arc::new(move |_| c))
            }
            RhsSpec::Monomial(p) => {
                let p = *p as i32;
                Some(Arc::new(move |x: f64| x.powi(p)))
            }
            RhsSpec::Polynomial(c) => {
                let c = c.clone();
                Some(Arc::new(move |x| {
                    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
                }))
            }
            RhsSpec::JacobiCoeffs(_) | RhsSpec::LogSeries => None,
        }
    }
}

/// `f_i = (-1)^i / ln i` (zero for `i < 2`).
pub fn log_series_coeff(i: usize) -> f64 {
    if i < 2 {
        return 0.0;
    }
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / (i as f64).ln()
}

/// Projection coefficients `f_0..f_N` of the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRhs {
    params: FractionalModelParams,
    coeffs: Vec<f64>,
}

impl SpectralRhs {
    pub fn new(params: FractionalModelParams, coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain(format!(
                "rhs coefficient f_{i} is not finite"
            )));
        }
        Ok(Self { params, coeffs })
    }

    pub fn params(&self) -> &FractionalModelParams {
        &self.params
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// The truncated expansion `f_N(x) = sum f_i / |||G_i|||^2 G_i(x)`.
    pub fn series(&self) -> JacobiSeries {
        let fam = self.params.rhs_family();
        let scaled = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, f)| f / fam.norm_sq(i))
            .collect();
        JacobiSeries::new(fam, scaled)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.series().eval(x)
    }
}

/// `f_i = int_0^1 rho^{(beta, alpha-beta)} f G_i^{(beta, alpha-beta)}` for `i <= n`,
/// using a rule of `order >= n + 10` nodes.
pub fn project_rhs(
    params: &FractionalModelParams,
    rhs: &RhsSpec,
    n: usize,
    order: Option<usize>,
) -> Result<SpectralRhs> {
    let coeffs = match rhs {
        RhsSpec::JacobiCoeffs(c) => {
            let mut v = c.clone();
            v.resize(n + 1, 0.0);
            v
        }
        RhsSpec::LogSeries => (0..=n).map(log_series_coeff).collect(),
        _ => {
            let f = rhs.pointwise().expect("pointwise variant");
            let m = order.unwrap_or(64).max(n + 10);
            project_fn(params.rhs_family(), &*f, n, m)?
        }
    };
    SpectralRhs::new(*params, coeffs)
}

/// `int rho^{(a,b)} f G_i^{(a,b)}`, `i <= n`, with an `m`-point rule.
pub(crate) fn project_fn(
    fam: JacobiBasis,
    f: &dyn Fn(f64) -> f64,
    n: usize,
    m: usize,
) -> Result<Vec<f64>> {
    let rule = cached_rule(fam, m)?;
    let mut out = vec![0.0; n + 1];
    for (k, (x, w)) in rule.iter().enumerate() {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFiniteIntegrand { index: k, node: x });
        }
        for (o, g) in out.iter_mut().zip(fam.column_unchecked(n, x)) {
            *o += w * fx * g;
        }
    }
    Ok(out)
}

/// `c_i = f_i / (lambda_i |||G_i^{(beta, alpha-beta)}|||^2)`.
pub fn solve_regular(rhs: &SpectralRhs) -> Vec<f64> {
    let p = rhs.params();
    let fam = p.rhs_family();
    rhs.coeffs
        .iter()
        .enumerate()
        .map(|(i, f)| f / (p.lambda(i) * fam.norm_sq(i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFunction {
    /// `k0(x) = int_x^1 rho`
    K0,
    /// `k1(x) = int_0^x rho`
    K1,
}

/// `k0` or `k1` at `x` in `[0, 1]`, with `k0 + k1 = B(beta, alpha - beta)`.
///
/// On `[0, 1/2]` `k1` is computed directly (`s = x t` puts `s^{beta-1}` into the
/// weight) and `k0` by complement; on `(1/2, 1]` the roles swap.
pub fn kernel_k(params: &FractionalModelParams, which: KernelFunction, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} lies outside [0, 1]")));
    }
    let (a, b) = (params.alpha() - params.beta() - 1.0, params.beta() - 1.0);
    let total = params.kernel_mass();
    let (direct, is_k1) = if x <= 0.5 {
        let rule = cached_rule(JacobiBasis::new(0.0, b)?, KERNEL_ORDER)?;
        let v = x.powf(b + 1.0) * rule.integrate(|t| (1.0 - x * t).powf(a))?;
        (v, true)
    } else {
        let rule = cached_rule(JacobiBasis::new(a, 0.0)?, KERNEL_ORDER)?;
        let v = (1.0 - x).powf(a + 1.0) * rule.integrate(|t| (x + (1.0 - x) * t).powf(b))?;
        (v, false)
    };
    Ok(match (which, is_k1) {
        (KernelFunction::K1, true) | (KernelFunction::K0, false) => direct,
        _ => total - direct,
    })
}

/// Boundary conditions. `a` is the datum at `x = 0`, `b` at `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// `u(0) = a`, `u(1) = b`.
    Dirichlet { a: f64, b: f64 },
    /// Flux `F u(0) = a`, `u(1) = b`.
    MixedFluxDirichlet { a: f64, b: f64 },
    /// `F u(0) = a`, `F u(1) = b`.
    Neumann { a: f64, b: f64 },
    /// RL only: `u ~ a x^{beta-1}` at 0 and `u ~ b (1-x)^{alpha-beta-1}` at 1.
    RlWeightedDirichlet { a: f64, b: f64 },
    /// RL only: `F u(0) = a` and `u ~ b (1-x)^{alpha-beta-1}` at 1.
    RlMixed { a: f64, b: f64 },
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet { .. } => "dirichlet",
            BoundaryCondition::MixedFluxDirichlet { .. } => "mixed",
            BoundaryCondition::Neumann { .. } => "neumann",
            BoundaryCondition::RlWeightedDirichlet { .. } => "rl_weighted_dirichlet",
            BoundaryCondition::RlMixed { .. } => "rl_mixed",
        }
    }

    pub fn values(&self) -> (f64, f64) {
        match *self {
            BoundaryCondition::Dirichlet { a, b }
            | BoundaryCondition::MixedFluxDirichlet { a, b }
            | BoundaryCondition::Neumann { a, b }
            | BoundaryCondition::RlWeightedDirichlet { a, b }
            | BoundaryCondition::RlMixed { a, b } => (a, b),
        }
    }

    /// The same family with zero data.
    pub fn homogeneous(&self) -> Self {
        match self {
            BoundaryCondition::Dirichlet { .. } => BoundaryCondition::Dirichlet { a: 0.0, b: 0.0 },
            BoundaryCondition::MixedFluxDirichlet { .. } => {
                BoundaryCondition::MixedFluxDirichlet { a: 0.0, b: 0.0 }
            }
            BoundaryCondition::Neumann { .. } => BoundaryCondition::Neumann { a: 0.0, b: 0.0 },
            BoundaryCondition::RlWeightedDirichlet { .. } => {
                BoundaryCondition::RlWeightedDirichlet { a: 0.0, b: 0.0 }
            }
            BoundaryCondition::RlMixed { .. } => BoundaryCondition::RlMixed { a: 0.0, b: 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WellPosedness {
    WellPosed,
    WellPosedUpToConstant,
    IllPosed,
    RequiresSingularBC,
}

impl WellPosedness {
    pub fn name(&self) -> &'static str {
        match self {
            WellPosedness::WellPosed => "WellPosed",
            WellPosedness::WellPosedUpToConstant => "WellPosedUpToConstant",
            WellPosedness::IllPosed => "IllPosed",
            WellPosedness::RequiresSingularBC => "RequiresSingularBC",
        }
    }

    pub fn is_solvable(&self) -> bool {
        matches!(
            self,
            WellPosedness::WellPosed | WellPosedness::WellPosedUpToConstant
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellPosednessReport {
    pub status: WellPosedness,
    pub rule: String,
}

impl WellPosednessReport {
    fn new(status: WellPosedness, rule: &str) -> Self {
        Self {
            status,
            rule: rule.to_string(),
        }
    }
}

const RULE_RLC_DIRICHLET: &str =
    "RLC Dirichlet: well posed for 0 <= r <= 1; C1 = A/k0(0), C2 = B/k1(1) fix the kernel part";
const RULE_MIXED_OK: &str =
    "flux at x = 0 with value at x = 1: well posed for 0 <= r < 1, the flux-constant series converges";
const RULE_MIXED_R1: &str =
    "flux at x = 0 with value at x = 1 is not well posed for r = 1 (beta = alpha - 1): the flux-constant series can diverge for f in the weighted L2 space";
const RULE_NEUMANN_OK: &str =
    "Neumann: well posed for 0 < r < 1 given B - A = int f; the solution is only determined up to an additive kernel element";
const RULE_NEUMANN_R0: &str = "Neumann is not well posed for r = 0 (beta = 1)";
const RULE_NEUMANN_R1: &str = "Neumann is not well posed for r = 1 (beta = alpha - 1)";
const RULE_RL_HOMOGENEOUS: &str =
    "RL Dirichlet with A = B = 0 coincides with the homogeneous RLC problem: well posed";
const RULE_RL_PLAIN: &str =
    "RL Dirichlet with plain values requires A = B = 0: the kernel elements behave like x^(beta-1) and (1-x)^(alpha-beta-1), so finite nonzero data cannot be met; prescribe the singular behaviour instead";
const RULE_RL_WEIGHTED: &str =
    "RL with prescribed singular endpoint behaviour A x^(beta-1), B (1-x)^(alpha-beta-1): well posed for 0 <= r <= 1";
const RULE_RL_MIXED_PLAIN: &str =
    "RL flux at x = 0 with a plain value at x = 1 requires B = 0; prescribe B (1-x)^(alpha-beta-1) instead";

/// Status of `(model, bc, r)` per the classification table.
pub fn classify(
    model: Model,
    bc: &BoundaryCondition,
    params: &FractionalModelParams,
) -> Result<WellPosednessReport> {
    use BoundaryCondition as Bc;
    use WellPosedness::*;
    let r = params.r();
    let one_sided_right = r == 1.0;
    let one_sided_left = r == 0.0;
    let mixed = |r1: bool| {
        if r1 {
            WellPosednessReport::new(IllPosed, RULE_MIXED_R1)
        } else {
            WellPosednessReport::new(WellPosed, RULE_MIXED_OK)
        }
    };
    let neumann = || {
        if one_sided_left {
            WellPosednessReport::new(IllPosed, RULE_NEUMANN_R0)
        } else if one_sided_right {
            WellPosednessReport::new(IllPosed, RULE_NEUMANN_R1)
        } else {
            WellPosednessReport::new(WellPosedUpToConstant, RULE_NEUMANN_OK)
        }
    };
    Ok(match (model, bc) {
        (Model::Rlc, Bc::Dirichlet { .. }) => {
            WellPosednessReport::new(WellPosed, RULE_RLC_DIRICHLET)
        }
        (Model::Rlc, Bc::MixedFluxDirichlet { .. }) => mixed(one_sided_right),
        (Model::Rlc, Bc::Neumann { .. }) | (Model::Rl, Bc::Neumann { .. }) => neumann(),
        (Model::Rlc, other) => {
            return Err(Error::IncompatibleBoundary {
                family: other.name().into(),
                model: model.name().into(),
            })
        }
        (Model::Rl, Bc::Dirichlet { a, b }) => {
            if *a == 0.0 && *b == 0.0 {
                WellPosednessReport::new(WellPosed, RULE_RL_HOMOGENEOUS)
            } else {
                WellPosednessReport::new(RequiresSingularBC, RULE_RL_PLAIN)
            }
        }
        (Model::Rl, Bc::RlWeightedDirichlet { .. }) => {
            WellPosednessReport::new(WellPosed, RULE_RL_WEIGHTED)
        }
        (Model::Rl, Bc::MixedFluxDirichlet { b, .. }) if *b != 0.0 => {
            WellPosednessReport::new(RequiresSingularBC, RULE_RL_MIXED_PLAIN)
        }
        (Model::Rl, Bc::MixedFluxDirichlet { .. }) | (Model::Rl, Bc::RlMixed { .. }) => {
            mixed(one_sided_right)
        }
    })
}

/// How the free kernel amplitude of a Neumann solution is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GaugePin {
    /// Free amplitude set to zero.
    #[default]
    Zero,
    /// Free amplitude chosen so that `int_0^1 u = 0`.
    MeanZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Truncation degree `N`.
    pub n: usize,
    /// Projection rule size; at least `N + 10` is always used.
    pub quadrature_order: Option<usize>,
    pub pin: GaugePin,
    /// Tolerance factor in `tol_compat = factor (1 + |A| + |B| + int |f|)`.
    pub compat_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            n: 64,
            quadrature_order: None,
            pin: GaugePin::Zero,
            compat_factor: 1e-10,
        }
    }
}

impl SolveOptions {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }
}

/// The RL kernel directions that appear as explicit singular terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    /// `(1-x)^{alpha-beta-1} x^beta`, unbounded at 1 when `r < 1`.
    AtOne,
    /// `(1-x)^{alpha-beta} x^{beta-1}`, unbounded at 0 when `r > 0`.
    AtZero,
    /// `(1-x)^{alpha-beta-1} x^{beta-1}`, the RL flux-free direction.
    KernelWeight,
}

impl SingularKind {
    pub fn exponents(&self, p: &FractionalModelParams) -> (f64, f64) {
        let (s, b) = (p.alpha() - p.beta(), p.beta());
        match self {
            SingularKind::AtOne => (s - 1.0, b),
            SingularKind::AtZero => (s, b - 1.0),
            SingularKind::KernelWeight => (s - 1.0, b - 1.0),
        }
    }

    /// RL flux `-D I_r` of the unit term; constant in `x`.
    pub fn rl_flux(&self, p: &FractionalModelParams) -> f64 {
        match self {
            SingularKind::AtOne => -p.mu_minus_one(),
            SingularKind::AtZero => p.mu_minus_one(),
            SingularKind::KernelWeight => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularTerm {
    pub amplitude: f64,
    pub kind: SingularKind,
}

/// Which amplitude a Neumann solution leaves free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeDirection {
    /// The additive constant (RLC).
    Constant,
    /// The `KernelWeight` singular term (RL).
    KernelWeight,
}

/// A solved problem, kept in decomposed form.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    model: Model,
    params: FractionalModelParams,
    bc: BoundaryCondition,
    rhs: SpectralRhs,
    coeffs: Vec<f64>,
    singular_terms: Vec<SingularTerm>,
    k0: f64,
    k1: f64,
    constant: f64,
    free: Option<FreeDirection>,
    rhs_integral: f64,
    compatibility_residual: Option<f64>,
    series: JacobiSeries,
    flux_series: JacobiSeries,
}

impl SpectralSolution {
    fn new(
        model: Model,
        params: FractionalModelParams,
        bc: BoundaryCondition,
        rhs: SpectralRhs,
        rhs_integral: f64,
    ) -> Self {
        let coeffs = solve_regular(&rhs);
        let series = JacobiSeries::new(params.solution_family(), coeffs.clone());
        let mut flux = vec![0.0; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            flux[i + 1] = -params.mu(i) * c;
        }
        let flux_series = JacobiSeries::new(params.flux_family(), flux);
        Self {
            model,
            params,
            bc,
            rhs,
            coeffs,
            singular_terms: Vec::new(),
            k0: 0.0,
            k1: 0.0,
            constant: 0.0,
            free: None,
            rhs_integral,
            compatibility_residual: None,
            series,
            flux_series,
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn params(&self) -> &FractionalModelParams {
        &self.params
    }

    pub fn bc(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn rhs(&self) -> &SpectralRhs {
        &self.rhs
    }

    /// Regular coefficients `c_0..c_N`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn singular_terms(&self) -> &[SingularTerm] {
        &self.singular_terms
    }

    /// Amplitudes of `k0` and `k1`.
    pub fn kernel_amplitudes(&self) -> (f64, f64) {
        (self.k0, self.k1)
    }

    pub fn additive_constant(&self) -> f64 {
        self.constant
    }

    pub fn free_direction(&self) -> Option<FreeDirection> {
        self.free
    }

    /// `int_0^1 f` as used by the compatibility check.
    pub fn rhs_integral(&self) -> f64 {
        self.rhs_integral
    }

    pub fn compatibility_residual(&self) -> Option<f64> {
        self.compatibility_residual
    }

    /// `|c_N| / max |c_i|`; zero for an all-zero series.
    pub fn tail_ratio(&self) -> f64 {
        tail_ratio(&self.coeffs)
    }

    /// `u(x)`. At an endpoint where an active term is unbounded the result is
    /// a signed infinity.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} lies outside [0, 1]")));
        }
        let p = &self.params;
        let mut blowup = 0.0;
        let mut v = self.constant;
        for t in &self.singular_terms {
            let (ea, eb) = t.kind.exponents(p);
            let unbounded = (x == 0.0 && eb < 0.0) || (x == 1.0 && ea < 0.0);
            if unbounded {
                blowup += t.amplitude;
            } else {
                v += t.amplitude * power_weight(ea, eb, x);
            }
        }
        if blowup != 0.0 {
            return Ok(blowup.signum() * f64::INFINITY);
        }
        let (sa, sb) = (p.alpha() - p.beta(), p.beta());
        v += power_weight(sa, sb, x) * self.series.eval(x);
        if self.k0 != 0.0 {
            v += self.k0 * kernel_k(p, KernelFunction::K0, x)?;
        }
        if self.k1 != 0.0 {
            v += self.k1 * kernel_k(p, KernelFunction::K1, x)?;
        }
        Ok(v)
    }

    /// Model flux at `x` in `[0, 1]`, from the closed forms.
    pub fn evaluate_flux(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} lies outside [0, 1]")));
        }
        let p = &self.params;
        let mut v = self.flux_series.eval(x);
        match self.model {
            Model::Rlc => v += p.sigma(0) * (self.k0 - self.k1),
            Model::Rl => {
                for t in &self.singular_terms {
                    v += t.amplitude * t.kind.rl_flux(p);
                }
            }
        }
        Ok(v)
    }

    /// The same function in the form the quadrature oracle accepts.
    pub fn to_oracle_function(&self) -> Result<OracleFunction> {
        let p = &self.params;
        let mut terms = vec![WeightedPoly::weighted_series(self.series.clone())];
        for t in &self.singular_terms {
            let (ea, eb) = t.kind.exponents(p);
            terms.push(WeightedPoly::power(ea, eb, t.amplitude)?);
        }
        if self.constant != 0.0 {
            terms.push(WeightedPoly::power(0.0, 0.0, self.constant)?);
        }
        Ok(OracleFunction::new(terms).with_kernels(self.k0, self.k1))
    }

    /// A copy with `delta` added along the free direction.
    pub fn shifted_along_free(&self, delta: f64) -> Result<Self> {
        let mut out = self.clone();
        match self.free {
            Some(FreeDirection::Constant) => out.constant += delta,
            Some(FreeDirection::KernelWeight) => {
                let t = out
                    .singular_terms
                    .iter_mut()
                    .find(|t| t.kind == SingularKind::KernelWeight)
                    .expect("RL Neumann solutions carry the kernel-weight term");
                t.amplitude += delta;
            }
            None => return Err(Error::Domain("solution has no free direction".into())),
        }
        Ok(out)
    }
}

fn power_weight(a: f64, b: f64, x: f64) -> f64 {
    let wa = if a == 0.0 { 1.0 } else { (1.0 - x).powf(a) };
    let wb = if b == 0.0 { 1.0 } else { x.powf(b) };
    wa * wb
}

pub fn tail_ratio(coeffs: &[f64]) -> f64 {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    match coeffs.last() {
        Some(last) if max > 0.0 => last.abs() / max,
        _ => 0.0,
    }
}

/// `(int_0^1 f, int_0^1 |f|)`.
pub fn rhs_integrals(rhs: &RhsSpec, spectral: &SpectralRhs) -> Result<(f64, f64)> {
    let f: RhsFn = match rhs.pointwise() {
        Some(f) => f,
        None => {
            let s = spectral.series();
            Arc::new(move |x| s.eval(x))
        }
    };
    let order = INTEGRAL_ORDER.max(spectral.degree() + 10);
    let rule = cached_rule(JacobiBasis::new(0.0, 0.0)?, order)?;
    let v = rule.integrate(|x| f(x))?;
    let a = rule.integrate(|x| f(x).abs())?;
    Ok((v, a))
}

/// Closed form used to turn the flux series into a kernel amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxConstantForm {
    /// `C1 = (A + S) / sigma_0` (amplitude of `k0`).
    Rlc,
    /// `C1 = -(A + S) / mu_{-1}` (amplitude of `(1-x)^{alpha-beta-1} x^beta`).
    Rl,
}

fn flux_constant_from_sum(
    p: &FractionalModelParams,
    s: f64,
    a: f64,
    form: FluxConstantForm,
) -> f64 {
    match form {
        FluxConstantForm::Rlc => (a + s) / p.sigma(0),
        FluxConstantForm::Rl => -(a + s) / p.mu_minus_one(),
    }
}

/// `mu_i c_i G_{i+1}^{(beta-1, alpha-beta-1)}(0)`.
pub fn flux_series_term(p: &FractionalModelParams, i: usize, c: f64) -> f64 {
    p.mu(i) * c * p.flux_family().value_at_zero(i + 1)
}

/// The kernel amplitude fixed by a flux condition `F u(0) = a`, for finitely many `c_i`.
pub fn flux_constant_series(
    p: &FractionalModelParams,
    coeffs: &[f64],
    a: f64,
    form: FluxConstantForm,
) -> Result<f64> {
    if p.r() == 1.0 {
        return Err(Error::IllPosed {
            rule: RULE_MIXED_R1.into(),
        });
    }
    let s: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| flux_series_term(p, i, c))
        .sum();
    Ok(flux_constant_from_sum(p, s, a, form))
}

/// As [`flux_constant_series`] for an unending coefficient sequence `c(i)`.
///
/// Terms are summed in dyadic blocks; when successive block sums shrink by a
/// ratio `q < 1` the remaining tail is bounded by `|last block| q / (1 - q)`.
/// Summation stops once that bound drops below [`SERIES_TAIL_TOL`], and fails
/// with [`Error::SeriesDivergence`] if `max_terms` terms do not get there.
pub fn flux_constant_series_lazy<F: Fn(usize) -> f64>(
    p: &FractionalModelParams,
    c: F,
    a: f64,
    form: FluxConstantForm,
    max_terms: usize,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut prev_block: Option<f64> = None;
    let mut start = 0usize;
    let mut len = 8usize;
    let mut last = 0.0;
    while start < max_terms {
        let end = (start + len).min(max_terms);
        let block: f64 = (start..end).map(|i| flux_series_term(p, i, c(i))).sum();
        sum += block;
        last = block;
        if let Some(pb) = prev_block {
            if block == 0.0 && pb == 0.0 {
                return Ok(flux_constant_from_sum(p, sum, a, form));
            }
            let q = (block / pb).abs();
            if q < 1.0 && block.abs() * q / (1.0 - q) < SERIES_TAIL_TOL {
                return Ok(flux_constant_from_sum(p, sum, a, form));
            }
        }
        prev_block = Some(block);
        start = end;
        len *= 2;
    }
    Err(Error::SeriesDivergence {
        terms: max_terms,
        increment: last,
    })
}

/// Solve `model u = f` under `bc`.
pub fn solve(
    params: &FractionalModelParams,
    model: Model,
    bc: &BoundaryCondition,
    rhs: &RhsSpec,
    opts: &SolveOptions,
) -> Result<(SpectralSolution, WellPosednessReport)> {
    use BoundaryCondition as Bc;
    let report = classify(model, bc, params)?;
    if !report.status.is_solvable() {
        return Err(Error::IllPosed { rule: report.rule });
    }
    let p = params;
    let spectral = project_rhs(p, rhs, opts.n, opts.quadrature_order)?;
    let (integral, abs_integral) = rhs_integrals(rhs, &spectral)?;
    let mut sol = SpectralSolution::new(model, *p, *bc, spectral, integral);
    let (a, b) = bc.values();
    let mass = p.kernel_mass();
    let u_mean = sol.coeffs.first().copied().unwrap_or(0.0)
        * beta_fn(p.alpha() - p.beta() + 1.0, p.beta() + 1.0);

    match (model, *bc) {
        (Model::Rlc, Bc::Dirichlet { .. }) => {
            sol.k0 = a / mass;
            sol.k1 = b / mass;
        }
        (Model::Rlc, Bc::MixedFluxDirichlet { .. }) => {
            sol.k0 = flux_constant_series(p, &sol.coeffs, a, FluxConstantForm::Rlc)?;
            sol.constant = b;
        }
        (Model::Rlc, Bc::Neumann { .. }) => {
            sol.compatibility_residual =
                Some(check_compatibility(a, b, integral, abs_integral, opts)?);
            sol.k0 = flux_constant_series(p, &sol.coeffs, a, FluxConstantForm::Rlc)?;
            sol.free = Some(FreeDirection::Constant);
            if opts.pin == GaugePin::MeanZero {
                // int k0 = B(beta + 1, alpha - beta)
                let k0_mean = beta_fn(p.beta() + 1.0, p.alpha() - p.beta());
                sol.constant = -(u_mean + sol.k0 * k0_mean);
            }
        }
        (Model::Rl, Bc::Dirichlet { .. }) => {}
        (Model::Rl, Bc::RlWeightedDirichlet { .. }) => {
            sol.singular_terms = vec![
                SingularTerm {
                    amplitude: a,
                    kind: SingularKind::AtZero,
                },
                SingularTerm {
                    amplitude: b,
                    kind: SingularKind::AtOne,
                },
            ];
        }
        (Model::Rl, Bc::MixedFluxDirichlet { .. }) | (Model::Rl, Bc::RlMixed { .. }) => {
            let c1 = flux_constant_series(p, &sol.coeffs, a, FluxConstantForm::Rl)?;
            let c3 = if matches!(bc, Bc::RlMixed { .. }) {
                b - c1
            } else {
                -c1
            };
            sol.singular_terms = vec![
                SingularTerm {
                    amplitude: c1,
                    kind: SingularKind::AtOne,
                },
                SingularTerm {
                    amplitude: c3,
                    kind: SingularKind::KernelWeight,
                },
            ];
        }
        (Model::Rl, Bc::Neumann { .. }) => {
            sol.compatibility_residual =
                Some(check_compatibility(a, b, integral, abs_integral, opts)?);
            let c1 = flux_constant_series(p, &sol.coeffs, a, FluxConstantForm::Rl)?;
            let c3 = match opts.pin {
                GaugePin::Zero => 0.0,
                GaugePin::MeanZero => {
                    let at_one_mean = beta_fn(p.beta() + 1.0, p.alpha() - p.beta());
                    -(u_mean + c1 * at_one_mean) / mass
                }
            };
            sol.singular_terms = vec![
                SingularTerm {
                    amplitude: c1,
                    kind: SingularKind::AtOne,
                },
                SingularTerm {
                    amplitude: c3,
                    kind: SingularKind::KernelWeight,
                },
            ];
            sol.free = Some(FreeDirection::KernelWeight);
        }
        (Model::Rlc, other) => {
            return Err(Error::IncompatibleBoundary {
                family: other.name().into(),
                model: model.name().into(),
            })
        }
    }
    Ok((sol, report))
}

fn check_compatibility(
    a: f64,
    b: f64,
    integral: f64,
    abs_integral: f64,
    opts: &SolveOptions,
) -> Result<f64> {
    let residual = (b - a - integral).abs();
    let tolerance = opts.compat_factor * (1.0 + a.abs() + b.abs() + abs_integral);
    if residual > tolerance {
        return Err(Error::Compatibility {
            residual,
            tolerance,
        });
    }
    Ok(residual)
}

/// Coefficients `w_0..w_N` (with `w_0 = w_1 = 0`) of
/// `w = rho^{(alpha-beta-1, beta-1)} sum_{i>=2} w_i G_i^{(alpha-beta-1, beta-1)}`
/// solving the RL equation, from
/// `w_i = <f, G_{i-2}^{(beta+1, alpha-beta+1)}> / (kappa_i |||G_{i-2}|||^2)`.
///
/// The pairing of basis index `i` with right-hand-side mode `i - 2` follows the
/// operator identity for the RL operator. The result is checked by pushing `w`
/// through the quadrature oracle and comparing with the projected `f`.
pub fn solve_rl_weak(
    params: &FractionalModelParams,
    rhs: &RhsSpec,
    n: usize,
    cfg: &OracleConfig,
) -> Result<Vec<f64>> {
    let p = params;
    let fam = p.weak_rhs_family();
    let modes = n.saturating_sub(1);
    let proj: Vec<f64> = match rhs {
        RhsSpec::JacobiCoeffs(_) | RhsSpec::LogSeries => {
            // coefficient data live in the (beta, alpha-beta) expansion; evaluate it
            let s = project_rhs(p, rhs, n, None)?.series();
            if modes == 0 {
                Vec::new()
            } else {
                project_fn(fam, &|x| s.eval(x), modes - 1, (n + 10).max(64))?
            }
        }
        _ => {
            let f = rhs.pointwise().expect("pointwise variant");
            if modes == 0 {
                Vec::new()
            } else {
                project_fn(fam, &*f, modes - 1, (n + 10).max(64))?
            }
        }
    };
    let mut w = vec![0.0; n + 1];
    for (m, pm) in proj.iter().enumerate() {
        let i = m + 2;
        w[i] = pm / (p.kappa(i) * fam.norm_sq(m));
    }
    if w.iter().any(|c| *c != 0.0) {
        let target = JacobiSeries::new(
            fam,
            proj.iter()
                .enumerate()
                .map(|(m, pm)| pm / fam.norm_sq(m))
                .collect(),
        );
        let u = OracleFunction::single(WeightedPoly::weighted_series(JacobiSeries::new(
            p.kernel_family(),
            w.clone(),
        )));
        for &x in &WEAK_CHECK_POINTS {
            let lhs = apply_operator(p, Model::Rl, &u, x, cfg)?;
            let want = target.eval(x);
            let residual = (lhs - want).abs();
            if residual > WEAK_RESIDUAL_TOL * (1.0 + want.abs()) {
                return Err(Error::IndexConvention { residual, x });
            }
        }
    }
    Ok(w)
}

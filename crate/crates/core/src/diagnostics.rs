//! Regularity and well-posedness diagnostics built on coefficient sequences.

use crate::error::{Error, Result};
use crate::jacobi::JacobiBasis;
use crate::operators::{apply_operator, OracleConfig};
use crate::params::FractionalModelParams;
use crate::solver::{
    flux_constant_series_lazy, flux_series_term, project_rhs, solve_regular, tail_ratio,
    FluxConstantForm, RhsSpec, SpectralSolution,
};
use crate::special::gamma_ratio;

/// Fewest nonzero entries accepted by [`decay_rate`].
pub const MIN_FIT_POINTS: usize = 8;
/// Truncations whose tail ratio exceeds this are not trusted by [`shift_check`].
pub const INCONCLUSIVE_TAIL_RATIO: f64 = 0.1;
/// Indices scanned for the supremum of the shift factor.
pub const SHIFT_SUP_RANGE: usize = 4096;
/// Largest probe truncation is `2^PROBE_MAX_LOG2`.
pub const PROBE_MAX_LOG2: u32 = 20;
pub const PROBE_MIN_LOG2: u32 = 4;
/// Index beyond which the probe measures the norm tail.
pub const PROBE_TAIL_LOG2: u32 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `p` in `|c_i| ~ i^{-p}`.
    pub rate: f64,
    pub fit_range: (usize, usize),
    /// RMS deviation of `ln |c_i|` from the fitted line.
    pub residual: f64,
    pub points: usize,
    pub tail_ratio: f64,
}

/// Least-squares slope of `ln |c_i|` against `ln i` over the nonzero entries in
/// `i_min..=i_max` (index 0 is skipped).
pub fn decay_rate(coeffs: &[f64], i_min: usize, i_max: usize) -> Result<DecayReport> {
    if i_min > i_max || i_max >= coeffs.len() {
        return Err(Error::Domain(format!(
            "fit range [{i_min}, {i_max}] outside 0..{}",
            coeffs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = (i_min.max(1)..=i_max)
        .filter(|&i| coeffs[i] != 0.0)
        .map(|i| ((i as f64).ln(), coeffs[i].abs().ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::UndefinedRate(format!(
            "{} nonzero coefficients in [{i_min}, {i_max}], need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let (intercept, slope) = least_squares(&pts);
    let rms = (pts
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    Ok(DecayReport {
        rate: -slope,
        fit_range: (i_min, i_max),
        residual: rms,
        points: pts.len(),
        tail_ratio: tail_ratio(coeffs),
    })
}

/// `(intercept, slope)` of the least-squares line through `pts`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Factor bounding the `j`-th derivative tail of the solution by the
/// `(j-1)`-th derivative tail of the data at index `i`, from the norms directly.
pub fn shift_factor(params: &FractionalModelParams, i: usize, j: usize) -> Result<f64> {
    let (a, s, b) = (
        params.alpha(),
        params.alpha() - params.beta(),
        params.beta(),
    );
    let jf = j as f64;
    let num = JacobiBasis::new(s + jf, b + jf)?.norm_sq(i);
    let den = JacobiBasis::new(b + jf - 1.0, s + jf - 1.0)?.norm_sq(i + 1);
    let lam = params.lambda(i + j);
    Ok((i as f64 + 2.0 * jf + a).powi(2) / (lam * lam) * num / den)
}

/// [`shift_factor`] with the norm ratio reduced to `(i + 1) / (i + alpha + 2j)`.
pub fn shift_factor_closed(params: &FractionalModelParams, i: usize, j: usize) -> f64 {
    let a = params.alpha();
    let (fi, jf) = (i as f64, j as f64);
    let lam = params.lambda(i + j);
    (fi + 2.0 * jf + a).powi(2) / (lam * lam) * (fi + 1.0) / (fi + a + 2.0 * jf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub j: usize,
    /// Inclusive range of the tail index `i`; coefficients `i + j` enter.
    pub window: (usize, usize),
    /// Weighted tail of `D^j (u / rho)`.
    pub solution_tail: f64,
    /// Weighted tail of `D^{j-1} f`.
    pub rhs_tail: f64,
    /// `solution_tail / rhs_tail`, absent when both vanish.
    pub ratio: Option<f64>,
    /// Supremum of [`shift_factor`] over `0..=max(window.1, SHIFT_SUP_RANGE)`.
    pub bound: f64,
    pub bounded: bool,
    /// The truncation had not decayed, so the tails say little.
    pub inconclusive: bool,
}

/// Compare the weighted derivative tails of solution and data on `window`
/// (default `[N/2, N - j]`).
pub fn shift_check(
    params: &FractionalModelParams,
    rhs: &RhsSpec,
    j: usize,
    n: usize,
    window: Option<(usize, usize)>,
) -> Result<ShiftReport> {
    if j == 0 {
        return Err(Error::Parameter(
            "derivative order j must be at least 1".into(),
        ));
    }
    if n < j {
        return Err(Error::Parameter(format!("N = {n} is below j = {j}")));
    }
    let (lo, hi) = window.unwrap_or((n / 2, n - j));
    if lo > hi || hi + j > n {
        return Err(Error::Domain(format!(
            "window [{lo}, {hi}] does not fit N = {n}, j = {j}"
        )));
    }
    let spectral = project_rhs(params, rhs, n, None)?;
    let f = spectral.coeffs();
    let c = solve_regular(&spectral);
    let a = params.alpha();
    let (s, b) = (a - params.beta(), params.beta());
    let jf = j as f64;
    let sol_fam = JacobiBasis::new(s + jf, b + jf)?;
    let rhs_fam = params.rhs_family();
    let der_fam = JacobiBasis::new(b + jf - 1.0, s + jf - 1.0)?;

    let mut solution_tail = 0.0;
    let mut rhs_tail = 0.0;
    for i in lo..=hi {
        let fi = i as f64;
        let gu = gamma_ratio(fi + 2.0 * jf + a + 1.0, fi + jf + a + 1.0);
        solution_tail += c[i + j].powi(2) * gu * gu * sol_fam.norm_sq(i);
        let gf = gamma_ratio(fi + 2.0 * jf + a, fi + jf + a + 1.0);
        rhs_tail += (f[i + j] / rhs_fam.norm_sq(i + j)).powi(2) * gf * gf * der_fam.norm_sq(i + 1);
    }
    let mut bound = 0.0f64;
    for i in 0..=hi.max(SHIFT_SUP_RANGE) {
        bound = bound.max(shift_factor(params, i, j)?);
    }
    let ratio = if rhs_tail > 0.0 {
        Some(solution_tail / rhs_tail)
    } else if solution_tail == 0.0 {
        None
    } else {
        Some(f64::INFINITY)
    };
    let bounded = ratio.is_none_or(|q| q <= bound * (1.0 + 1e-12));
    Ok(ShiftReport {
        j,
        window: (lo, hi),
        solution_tail,
        rhs_tail,
        ratio,
        bound,
        bounded,
        inconclusive: tail_ratio(&c) > INCONCLUSIVE_TAIL_RATIO,
    })
}

/// Largest `|model u - f|` over `points`, all strictly inside `(0, 1)`.
pub fn residual_certificate(
    sol: &SpectralSolution,
    f: &dyn Fn(f64) -> f64,
    points: &[f64],
    cfg: &OracleConfig,
) -> Result<f64> {
    if let Some(x) = points.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::Domain(format!(
            "certificate point {x} is not interior"
        )));
    }
    let u = sol.to_oracle_function()?;
    let mut worst = 0.0f64;
    for &x in points {
        let v = apply_operator(sol.params(), sol.model(), &u, x, cfg)?;
        worst = worst.max((v - f(x)).abs());
    }
    Ok(worst)
}

/// `k` equispaced interior points `i / (k + 1)`.
pub fn interior_points(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / (k + 1) as f64).collect()
}

/// Dyadic block sums of the flux-constant series for `coeffs`: entry `k` sums
/// the terms with index in `[2^k, 2^{k+1})`.
pub fn flux_series_blocks(params: &FractionalModelParams, coeffs: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = 1usize;
    while start < coeffs.len() {
        let end = (2 * start).min(coeffs.len());
        out.push(
            (start..end)
                .map(|i| flux_series_term(params, i, coeffs[i]))
                .sum(),
        );
        start *= 2;
    }
    out
}

/// Coefficient sequence fed to the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVariant {
    /// `f_i = (-1)^i / ln i`.
    AsPrinted,
    /// `f_i = (-1)^i / (i ln i)`.
    NormConvergent,
}

impl ProbeVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeVariant::AsPrinted => "as_printed",
            ProbeVariant::NormConvergent => "norm_convergent",
        }
    }

    pub fn coeff(&self, i: usize) -> f64 {
        if i < 2 {
            return 0.0;
        }
        let base = crate::solver::log_series_coeff(i);
        match self {
            ProbeVariant::AsPrinted => base,
            ProbeVariant::NormConvergent => base / i as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub variant: ProbeVariant,
    pub alpha: f64,
    pub beta: f64,
    /// Truncations `2^4, ..., 2^max`.
    pub truncations: Vec<usize>,
    /// Flux-constant partial sums `S_N`.
    pub partial_sums: Vec<f64>,
    /// `sum_{i <= N} f_i^2 / |||G_i|||^2`.
    pub norm_sums: Vec<f64>,
    /// Fit `S_N ~ intercept + slope ln ln N`.
    pub fit_intercept: f64,
    pub fit_slope: f64,
    /// `(norm_sum(last) - norm_sum(2^16)) / norm_sum(last)`.
    pub norm_tail_fraction: f64,
    /// `|S_{2N}| > |S_N|` at every step.
    pub monotone_growth: bool,
    /// Whether the lazy Cauchy test accepted the series within the largest truncation.
    pub cauchy_converged: bool,
}

/// Sum the flux-constant series and the data norm for the log-series right-hand side.
pub fn ill_posedness_probe(params: &FractionalModelParams, variant: ProbeVariant) -> ProbeReport {
    ill_posedness_probe_to(params, variant, PROBE_MAX_LOG2)
}

pub fn ill_posedness_probe_to(
    params: &FractionalModelParams,
    variant: ProbeVariant,
    max_log2: u32,
) -> ProbeReport {
    let p = params;
    let fam = p.rhs_family();
    let coeff = |i: usize| variant.coeff(i) / (p.lambda(i) * fam.norm_sq(i));
    let n_max = 1usize << max_log2;
    let mut truncations = Vec::new();
    let mut partial_sums = Vec::new();
    let mut norm_sums = Vec::new();
    let (mut s, mut norm) = (0.0, 0.0);
    let mut next = 1usize << PROBE_MIN_LOG2;
    let mut tail_anchor = None;
    for i in 0..=n_max {
        let f = variant.coeff(i);
        s += flux_series_term(p, i, coeff(i));
        norm += f * f / fam.norm_sq(i);
        if i == 1usize << PROBE_TAIL_LOG2 {
            tail_anchor = Some(norm);
        }
        if i == next {
            truncations.push(i);
            partial_sums.push(s);
            norm_sums.push(norm);
            next *= 2;
        }
    }
    let pts: Vec<(f64, f64)> = truncations
        .iter()
        .zip(&partial_sums)
        .map(|(&n, &v)| ((n as f64).ln().ln(), v))
        .collect();
    let (fit_intercept, fit_slope) = least_squares(&pts);
    let total = *norm_sums.last().unwrap_or(&0.0);
    let norm_tail_fraction = match tail_anchor {
        Some(at) if total > 0.0 => (total - at) / total,
        _ => f64::NAN,
    };
    let monotone_growth = partial_sums.windows(2).all(|w| w[1].abs() > w[0].abs());
    let cauchy_converged =
        flux_constant_series_lazy(p, coeff, 0.0, FluxConstantForm::Rlc, n_max + 1).is_ok();
    ProbeReport {
        variant,
        alpha: p.alpha(),
        beta: p.beta(),
        truncations,
        partial_sums,
        norm_sums,
        fit_intercept,
        fit_slope,
        norm_tail_fraction,
        monotone_growth,
        cauchy_converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Model;
    use crate::solver::{solve, BoundaryCondition, SolveOptions};
    use approx::assert_relative_eq;

    fn params(alpha: f64, r: f64) -> FractionalModelParams {
        FractionalModelParams::new(alpha, r).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let c: Vec<f64> = (0..64)
            .map(|i| if i == 0 { 1.0 } else { (i as f64).powi(-3) })
            .collect();
        let rep = decay_rate(&c, 4, 63).unwrap();
        assert!((rep.rate - 3.0).abs() < 1e-3);
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn single_mode_has_no_rate() {
        let mut c = vec![0.0; 32];
        c[5] = 1.0;
        assert!(matches!(
            decay_rate(&c, 1, 31),
            Err(Error::UndefinedRate(_))
        ));
        assert!(matches!(
            decay_rate(&[0.0; 32], 1, 31),
            Err(Error::UndefinedRate(_))
        ));
        assert!(decay_rate(&c, 1, 40).is_err());
    }

    #[test]
    fn data_and_solution_rates_agree() {
        let p = params(1.5, 0.5);
        let f = RhsSpec::callable(|x: f64| (x - 0.37).abs().powf(1.5));
        let s = project_rhs(&p, &f, 64, Some(400)).unwrap();
        let c = solve_regular(&s);
        let scaled: Vec<f64> = (0..=64).map(|i| s.coeffs()[i] / p.lambda(i)).collect();
        let rc = decay_rate(&c, 16, 64).unwrap();
        let rf = decay_rate(&scaled, 16, 64).unwrap();
        let fam = p.rhs_family();
        // c_i and f_i / lambda_i differ by the norms, which vary like 1/i
        let norm_rate = -decay_rate(
            &(0..=64).map(|i| fam.norm_sq(i)).collect::<Vec<_>>(),
            16,
            64,
        )
        .unwrap()
        .rate;
        assert!(
            (rc.rate - rf.rate - norm_rate).abs() < 0.05,
            "{} {} {norm_rate}",
            rc.rate,
            rf.rate
        );
    }

    #[test]
    fn analytic_data_decay_accelerates() {
        let p = params(1.5, 0.5);
        let f = RhsSpec::callable(|x: f64| 1.0 / (1.0 + 16.0 * (x - 0.5).powi(2)));
        let c = solve_regular(&project_rhs(&p, &f, 48, Some(200)).unwrap());
        let even: Vec<f64> = c
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { *v } else { 0.0 })
            .collect();
        let early = decay_rate(&even, 4, 24).unwrap();
        let late = decay_rate(&even, 12, 40).unwrap();
        assert!(late.rate > early.rate);
    }

    #[test]
    fn shift_factor_forms_agree() {
        let p = params(1.5, 0.5);
        let direct = shift_factor(&p, 20, 1).unwrap();
        assert_relative_eq!(direct, shift_factor_closed(&p, 20, 1), max_relative = 1e-12);
        for &(alpha, r) in &[(1.2, 0.0), (1.8, 1.0), (1.35, 0.7)] {
            let p = params(alpha, r);
            for j in 1..=3 {
                for i in [0usize, 3, 50, 400] {
                    assert_relative_eq!(
                        shift_factor(&p, i, j).unwrap(),
                        shift_factor_closed(&p, i, j),
                        max_relative = 1e-11
                    );
                }
            }
        }
        // decays like i^{-2(alpha-1)}
        assert!(shift_factor(&p, 4000, 1).unwrap() < shift_factor(&p, 40, 1).unwrap());
    }

    #[test]
    fn shift_check_single_mode() {
        let p = params(1.5, 0.5);
        let fam = p.rhs_family();
        let l2 = p.lambda(2);
        let f = RhsSpec::callable(move |x| l2 * fam.eval(2, x).unwrap());
        let rep = shift_check(&p, &f, 1, 32, Some((2, 31))).unwrap();
        assert!(rep.solution_tail < 1e-24 && rep.rhs_tail < 1e-24);
        assert!(rep.bounded);
    }

    #[test]
    fn shift_check_rough_data() {
        let p = params(1.5, 0.5);
        let f = RhsSpec::callable(|x: f64| (x - 0.3).abs().sqrt());
        for (w, j) in [((16, 31), 1), ((32, 63), 1), ((16, 30), 2)] {
            let rep = shift_check(&p, &f, j, 64, Some(w)).unwrap();
            assert!(rep.bounded, "{rep:?}");
            assert!(rep.ratio.unwrap() > 0.0);
            assert!(!rep.inconclusive);
        }
        assert!(shift_check(&p, &f, 0, 64, None).is_err());
        assert!(shift_check(&p, &f, 1, 64, Some((10, 64))).is_err());
    }

    #[test]
    fn certificate_points_must_be_interior() {
        let p = params(1.5, 0.5);
        let (sol, _) = solve(
            &p,
            Model::Rlc,
            &BoundaryCondition::Dirichlet { a: 0.0, b: 0.0 },
            &RhsSpec::Constant(0.0),
            &SolveOptions::with_n(4),
        )
        .unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(
            residual_certificate(&sol, &|_| 0.0, &interior_points(5), &cfg).unwrap(),
            0.0
        );
        assert!(residual_certificate(&sol, &|_| 0.0, &[0.0, 0.5], &cfg).is_err());
    }

    #[test]
    fn certificate_for_manufactured_mode() {
        let p = params(1.4, 0.3);
        let fam = p.rhs_family();
        let l3 = p.lambda(3);
        let f = move |x: f64| l3 * fam.eval(3, x).unwrap();
        let (sol, _) = solve(
            &p,
            Model::Rl,
            &BoundaryCondition::Dirichlet { a: 0.0, b: 0.0 },
            &RhsSpec::callable(f),
            &SolveOptions::with_n(6),
        )
        .unwrap();
        let res = residual_certificate(
            &sol,
            &f,
            &interior_points(9),
            &OracleConfig::finite_difference(),
        )
        .unwrap();
        assert!(res <= 1e-5, "{res}");
    }

    #[test]
    fn flux_blocks_decay_for_smooth_data() {
        let p = params(1.5, 0.4);
        let f = RhsSpec::callable(|x: f64| (2.0 * x).cos());
        let c = solve_regular(&project_rhs(&p, &f, 64, None).unwrap());
        let blocks = flux_series_blocks(&p, &c);
        let rate = -1.0 + 2.0 * (p.alpha() - p.beta() - 1.0);
        // smooth data decay at least as fast as the worst-case rate
        let first = blocks[1].abs();
        for (k, b) in blocks.iter().enumerate().skip(2) {
            let predicted = first * 2f64.powf(rate * (k - 1) as f64) * 2f64.powi((k - 1) as i32);
            assert!(b.abs() <= 4.0 * predicted, "block {k}: {b} vs {predicted}");
        }
    }

    #[test]
    fn probe_small_run() {
        let p = params(1.5, 1.0);
        let rep = ill_posedness_probe_to(&p, ProbeVariant::NormConvergent, 12);
        assert_eq!(
            rep.truncations,
            (4..=12).map(|k| 1usize << k).collect::<Vec<_>>()
        );
        assert!(rep.monotone_growth);
        assert!(rep.fit_slope > 0.0);
        assert!(rep.norm_tail_fraction.is_nan());
        // terms are (-1)^i f_i / ((i + alpha) |||G_i|||^2)
        let fam = p.rhs_family();
        let s16: f64 = (2..=16)
            .map(|i| {
                let f = ProbeVariant::NormConvergent.coeff(i);
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * f / ((i as f64 + 1.5) * fam.norm_sq(i))
            })
            .sum();
        assert_relative_eq!(rep.partial_sums[0], s16, max_relative = 1e-12);
    }
}

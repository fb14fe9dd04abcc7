//! Shifted Jacobi polynomials `G_n^{(a,b)}(x) = P_n^{(a,b)}(2x - 1)` on `[0, 1]`.
//!
//! They are orthogonal under the weight `(1 - x)^a x^b`. Values come from the
//! three-term recurrence in the unshifted variable `y = 2x - 1`.

use crate::error::{Error, Result};
use crate::special::{gamma, gamma_ratio};

/// Smallest admissible exponent is `-1 + EXPONENT_MARGIN`.
pub const EXPONENT_MARGIN: f64 = 1e-8;

/// A weight-exponent pair `(a, b)` naming the family `G_n^{(a,b)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiBasis {
    a: f64,
    b: f64,
}

impl JacobiBasis {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let lo = -1.0 + EXPONENT_MARGIN;
        if !(a.is_finite() && b.is_finite()) || a < lo || b < lo {
            return Err(Error::Domain(format!(
                "Jacobi exponents must exceed -1 (got a = {a}, b = {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The mirrored family `(b, a)`.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }

    /// `(a + k, b + k)`, the family reached by `k` differentiations.
    pub fn raised(&self, k: usize) -> Self {
        Self {
            a: self.a + k as f64,
            b: self.b + k as f64,
        }
    }

    /// Recurrence coefficients for `P_n = (A_n + B_n y) P_{n-1} - C_n P_{n-2}`, n >= 1.
    #[inline]
    fn recurrence(&self, n: usize) -> (f64, f64, f64) {
        let (a, b) = (self.a, self.b);
        if n == 1 {
            return (0.5 * (a - b), 0.5 * (a + b + 2.0), 0.0);
        }
        let nf = n as f64;
        let s = 2.0 * nf + a + b;
        let denom = 2.0 * nf * (nf + a + b) * (s - 2.0);
        let big_a = (s - 1.0) * (a * a - b * b) / denom;
        let big_b = (s - 1.0) * s * (s - 2.0) / denom;
        let big_c = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s / denom;
        (big_a, big_b, big_c)
    }

    /// `G_n(x)`.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.eval_unchecked(n, x))
    }

    pub(crate) fn eval_unchecked(&self, n: usize, x: f64) -> f64 {
        let y = 2.0 * x - 1.0;
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 1..=n {
            let (ca, cb, cc) = self.recurrence(k);
            let next = (ca + cb * y) * cur - cc * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `[G_0(x), ..., G_{n_max}(x)]` in a single pass.
    pub fn eval_column(&self, n_max: usize, x: f64) -> Result<Vec<f64>> {
        check_unit(x)?;
        Ok(self.column_unchecked(n_max, x))
    }

    pub(crate) fn column_unchecked(&self, n_max: usize, x: f64) -> Vec<f64> {
        let y = 2.0 * x - 1.0;
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(1.0);
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 1..=n_max {
            let (ca, cb, cc) = self.recurrence(k);
            let next = (ca + cb * y) * cur - cc * prev;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// `|||G_j|||^2 = int_0^1 (1-x)^a x^b G_j(x)^2 dx`.
    pub fn norm_sq(&self, j: usize) -> f64 {
        // fixed argument order so that (a, b) and (b, a) give identical bits
        let (lo, hi) = if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        };
        let jf = j as f64;
        let s = lo + hi;
        gamma_ratio(jf + lo + 1.0, jf + 1.0) * gamma_ratio(jf + hi + 1.0, jf + s + 1.0)
            / (2.0 * jf + s + 1.0)
    }

    /// `G_j(0) = (-1)^j Gamma(j + b + 1) / (j! Gamma(b + 1))`.
    pub fn value_at_zero(&self, j: usize) -> f64 {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * gamma_ratio(j as f64 + self.b + 1.0, j as f64 + 1.0) / gamma(self.b + 1.0)
    }

    /// `G_j(1)`, from the reflection `P_n^{(a,b)}(-y) = (-1)^n P_n^{(b,a)}(y)`.
    pub fn value_at_one(&self, j: usize) -> f64 {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * self.swapped().value_at_zero(j)
    }

    /// Scale factor in `d^k/dx^k G_n^{(a,b)} = factor * G_{n-k}^{(a+k,b+k)}`.
    pub fn derivative_factor(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return 0.0;
        }
        if k == 0 {
            return 1.0;
        }
        let base = n as f64 + self.a + self.b + 1.0;
        gamma_ratio(base + k as f64, base)
    }

    /// `d^k/dx^k G_n(x)`; zero when `k > n`.
    pub fn deriv(&self, n: usize, k: usize, x: f64) -> Result<f64> {
        check_unit(x)?;
        if k > n {
            return Ok(0.0);
        }
        Ok(self.derivative_factor(n, k) * self.raised(k).eval_unchecked(n - k, x))
    }
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} lies outside [0, 1]")));
    }
    Ok(())
}

/// A finite series `sum_n d_n G_n^{(a,b)}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSeries {
    basis: JacobiBasis,
    coeffs: Vec<f64>,
}

impl JacobiSeries {
    pub fn new(basis: JacobiBasis, coeffs: Vec<f64>) -> Self {
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> JacobiBasis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Backward (Clenshaw) summation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        if n == 0 {
            return 0.0;
        }
        let y = 2.0 * x - 1.0;
        // P_{k+1} = (A_{k+1} + B_{k+1} y) P_k - C_{k+1} P_{k-1}
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (0..n).rev() {
            let (ca, cb, _) = self.basis.recurrence(k + 1);
            let c_next = self.basis.recurrence(k + 2).2;
            let bk = self.coeffs[k] + (ca + cb * y) * b1 - c_next * b2;
            b2 = b1;
            b1 = bk;
        }
        b1
    }

    /// Forward summation against the recurrence; kept as an independent check on `eval`.
    pub fn eval_naive(&self, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let col = self.basis.column_unchecked(self.coeffs.len() - 1, x);
        col.iter().zip(&self.coeffs).map(|(g, c)| g * c).sum()
    }

    /// The `k`-th derivative as a series in `(a + k, b + k)`.
    pub fn derivative(&self, k: usize) -> JacobiSeries {
        let coeffs = if self.coeffs.len() > k {
            (0..self.coeffs.len() - k)
                .map(|m| self.coeffs[m + k] * self.basis.derivative_factor(m + k, k))
                .collect()
        } else {
            Vec::new()
        };
        JacobiSeries::new(self.basis.raised(k), coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::binomial;
    use approx::assert_relative_eq;

    /// Explicit coefficient sum `sum_m p_{n,m} (y-1)^{n-m} (y+1)^m`.
    fn explicit_sum(a: f64, b: f64, n: usize, x: f64) -> f64 {
        let y = 2.0 * x - 1.0;
        let scale = 0.5f64.powi(n as i32);
        (0..=n)
            .map(|m| {
                scale
                    * binomial(n as f64 + a, m)
                    * binomial(n as f64 + b, n - m)
                    * (y - 1.0).powi((n - m) as i32)
                    * (y + 1.0).powi(m as i32)
            })
            .sum()
    }

    #[test]
    fn degree_zero_is_one() {
        let g = JacobiBasis::new(0.5, 0.5).unwrap();
        assert_eq!(g.eval(0, 0.3).unwrap(), 1.0);
        assert_eq!(g.eval_column(0, 0.5).unwrap(), vec![1.0]);
    }

    #[test]
    fn degree_one_at_zero() {
        for &(a, b) in &[(0.3, -0.4), (1.0, 0.25), (-0.5, 0.9)] {
            let g = JacobiBasis::new(a, b).unwrap();
            assert_relative_eq!(g.eval(1, 0.0).unwrap(), -(b + 1.0), max_relative = 1e-15);
        }
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        let g = JacobiBasis::new(0.5, 0.25).unwrap();
        let v = g.eval(4, 0.7).unwrap();
        assert_relative_eq!(v, explicit_sum(0.5, 0.25, 4, 0.7), max_relative = 1e-13);

        for &(a, b) in &[
            (0.5, 0.25),
            (-0.7, 0.3),
            (0.0, 0.0),
            (-0.5, -0.5),
            (1.0, -0.9),
        ] {
            let g = JacobiBasis::new(a, b).unwrap();
            for n in 0..=6 {
                for i in 0..=10 {
                    let x = i as f64 / 10.0;
                    let want = explicit_sum(a, b, n, x);
                    let got = g.eval(n, x).unwrap();
                    assert!(
                        (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "a={a} b={b} n={n} x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn shifted_legendre_column_at_midpoint() {
        let g = JacobiBasis::new(0.0, 0.0).unwrap();
        let col = g.eval_column(2, 0.5).unwrap();
        assert_eq!(col.len(), 3);
        assert_relative_eq!(col[0], explicit_sum(0.0, 0.0, 0, 0.5));
        assert_relative_eq!(col[1], 0.0, epsilon = 1e-16);
        assert_relative_eq!(col[2], -0.5, max_relative = 1e-15);
    }

    #[test]
    fn column_matches_pointwise() {
        let g = JacobiBasis::new(0.37, -0.61).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let col = g.eval_column(10, x).unwrap();
            for (n, v) in col.iter().enumerate() {
                assert_eq!(*v, g.eval(n, x).unwrap());
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(JacobiBasis::new(-1.0, 0.0).is_err());
        assert!(JacobiBasis::new(0.0, -1.5).is_err());
        assert!(JacobiBasis::new(-1.0 + 2e-8, 0.0).is_ok());
        let g = JacobiBasis::new(0.0, 0.0).unwrap();
        assert!(g.eval(2, 1.01).is_err());
        assert!(g.eval(2, -0.01).is_err());
        assert!(g.eval(2, f64::NAN).is_err());
    }

    #[test]
    fn norm_values_and_symmetry() {
        let g = JacobiBasis::new(0.0, 0.0).unwrap();
        assert_relative_eq!(g.norm_sq(0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(g.norm_sq(3), 1.0 / 7.0, max_relative = 1e-14);
        for &(a, b) in &[(0.3, 0.8), (-0.4, 0.9), (0.5, -0.5)] {
            let g = JacobiBasis::new(a, b).unwrap();
            for j in 0..50 {
                assert_eq!(g.norm_sq(j), g.swapped().norm_sq(j));
            }
        }
    }

    #[test]
    fn endpoint_values_match_recurrence() {
        for &(a, b) in &[(0.3, 0.8), (-0.4, 0.9), (0.5, -0.5), (1.2, 0.1)] {
            let g = JacobiBasis::new(a, b).unwrap();
            for j in 0..30 {
                let z = g.value_at_zero(j);
                let o = g.value_at_one(j);
                assert_relative_eq!(g.eval(j, 0.0).unwrap(), z, max_relative = 1e-12);
                assert_relative_eq!(g.eval(j, 1.0).unwrap(), o, max_relative = 1e-12);
            }
        }
        let g = JacobiBasis::new(0.4, 0.7).unwrap();
        assert_eq!(g.value_at_zero(0), 1.0);
        assert_relative_eq!(g.value_at_zero(1), -1.7, max_relative = 1e-15);
        assert_relative_eq!(g.value_at_zero(2), 1.7 * 2.7 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn derivative_against_finite_differences() {
        let g = JacobiBasis::new(0.35, -0.45).unwrap();
        let x = 0.4;
        let h = 1e-5;
        for n in 0..=8 {
            let fd = (g.eval(n, x + h).unwrap() - g.eval(n, x - h).unwrap()) / (2.0 * h);
            let d = g.deriv(n, 1, x).unwrap();
            assert!(
                (fd - d).abs() <= 1e-6 * d.abs().max(1.0),
                "n={n}: {fd} vs {d}"
            );
            assert_eq!(g.deriv(n, 0, x).unwrap(), g.eval(n, x).unwrap());
        }
        assert_eq!(g.deriv(2, 3, x).unwrap(), 0.0);
    }

    #[test]
    fn second_derivative_factor_for_singular_family() {
        // (a, b) = (beta - 1, alpha - beta - 1): factor is Gamma(n+alpha+1)/Gamma(n+alpha-1)
        let (alpha, beta) = (1.5, 0.75);
        let g = JacobiBasis::new(beta - 1.0, alpha - beta - 1.0).unwrap();
        for n in 2..12 {
            let nf = n as f64;
            assert_relative_eq!(
                g.derivative_factor(n, 2),
                (nf + alpha) * (nf + alpha - 1.0),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn weighted_derivative_identity() {
        // d^k/dx^k [rho^{(a+k,b+k)} G_{n-k}^{(a+k,b+k)}] = (-1)^k n!/(n-k)! rho^{(a,b)} G_n^{(a,b)}
        let (a, b) = (0.3, -0.35);
        let g = JacobiBasis::new(a, b).unwrap();
        for k in 1..=2usize {
            let gk = g.raised(k);
            let ak = a + k as f64;
            let bk = b + k as f64;
            let lhs_fn =
                |n: usize, x: f64| (1.0 - x).powf(ak) * x.powf(bk) * gk.eval(n - k, x).unwrap();
            for n in k..=6 {
                for &x in &[0.2, 0.45, 0.7] {
                    let h = 1e-4;
                    let fd = if k == 1 {
                        (lhs_fn(n, x + h) - lhs_fn(n, x - h)) / (2.0 * h)
                    } else {
                        (lhs_fn(n, x + h) - 2.0 * lhs_fn(n, x) + lhs_fn(n, x - h)) / (h * h)
                    };
                    let falling: f64 = ((n - k + 1)..=n).map(|v| v as f64).product();
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let rhs =
                        sign * falling * (1.0 - x).powf(a) * x.powf(b) * g.eval(n, x).unwrap();
                    assert!(
                        (fd - rhs).abs() <= 1e-6 * rhs.abs().max(1.0),
                        "k={k} n={n} x={x}: {fd} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn clenshaw_matches_naive_and_derivative_series() {
        let g = JacobiBasis::new(0.25, 0.6).unwrap();
        let coeffs: Vec<f64> = (0..20)
            .map(|i| ((i * 7 % 5) as f64 - 2.0) / (i + 1) as f64)
            .collect();
        let s = JacobiSeries::new(g, coeffs.clone());
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert_relative_eq!(
                s.eval(x),
                s.eval_naive(x),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
        let ds = s.derivative(1);
        let x = 0.33;
        let direct: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * g.deriv(n, 1, x).unwrap())
            .sum();
        assert_relative_eq!(ds.eval(x), direct, max_relative = 1e-12);
        assert!(s.derivative(25).coeffs().is_empty());
        assert_eq!(JacobiSeries::new(g, vec![]).eval(0.3), 0.0);
    }
}

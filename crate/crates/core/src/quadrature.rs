//! Gauss-Jacobi rules on `[0, 1]` for the weight `(1 - x)^a x^b`.
//!
//! Nodes and weights come from the symmetric tridiagonal Jacobi matrix
//! (Golub-Welsch): nodes are its eigenvalues, weights are the total mass times
//! the squared first components of the normalised eigenvectors. Only the first
//! row of the eigenvector matrix is carried through the implicit QL sweeps.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::jacobi::JacobiBasis;
use crate::special::beta;

const MAX_SWEEPS: usize = 50;

/// Nodes and weights for `int_0^1 (1-x)^a x^b g(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    basis: JacobiBasis,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn basis(&self) -> JacobiBasis {
        self.basis
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `sum_k w_k f(x_k)`. The weight function is part of the rule, not of `f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (index, (x, w)) in self.iter().enumerate() {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { index, node: x });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Build the `order`-point Gauss-Jacobi rule for `basis`.
pub fn gauss_jacobi_rule(basis: JacobiBasis, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Domain("quadrature order must be at least 1".into()));
    }
    let (a, b) = (basis.a(), basis.b());

    // Jacobi matrix of the monic recurrence on [-1, 1], mapped to [0, 1].
    let mut diag = vec![0.0; order];
    let mut off = vec![0.0; order];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let alpha_k = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        *d = 0.5 * (alpha_k + 1.0);
    }
    for k in 1..order {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let beta_sq = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        // off[k] couples rows k-1 and k; halved by the map y -> (y + 1) / 2
        off[k - 1] = 0.5 * beta_sq.sqrt();
    }

    let mut first_row = vec![0.0; order];
    first_row[0] = 1.0;
    implicit_ql(&mut diag, &mut off, &mut first_row).map_err(|_| Error::QuadratureConvergence {
        a,
        b,
        order,
    })?;

    let mass = beta(a + 1.0, b + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first_row)
        .map(|(x, v)| (x, mass * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        basis,
        nodes,
        weights,
    })
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. `off[i]` couples
/// `i` and `i + 1`. On return `diag` holds the eigenvalues and `z` the first
/// components of the corresponding eigenvectors.
fn implicit_ql(diag: &mut [f64], off: &mut [f64], z: &mut [f64]) -> std::result::Result<(), ()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(());
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

type RuleKey = (i64, i64, usize);

fn rule_key(basis: JacobiBasis, order: usize) -> RuleKey {
    (
        (basis.a() * 1e12).round() as i64,
        (basis.b() * 1e12).round() as i64,
        order,
    )
}

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Process-wide rule cache keyed by `(a, b)` rounded to 1e-12 and the order.
/// Readers share the lock; construction happens under the write lock.
pub fn cached_rule(basis: JacobiBasis, order: usize) -> Result<Arc<QuadratureRule>> {
    let key = rule_key(basis, order);
    if let Some(rule) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let mut guard = rule_cache().write().expect("rule cache poisoned");
    if let Some(rule) = guard.get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi_rule(basis, order)?);
    guard.insert(key, Arc::clone(&rule));
    Ok(rule)
}

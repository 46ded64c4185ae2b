//! Gauss quadrature rules from the Golub–Welsch eigenvalue method.

use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes are eigenvalues of the Jacobi matrix with diagonal `a` and
/// off-diagonal `b`; weights are `μ₀` times squared first eigenvector components.
fn golub_welsch(a: &[f64], b: &[f64], mu0: f64) -> Result<GaussRule> {
    let n = a.len();
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = a[i];
        if i + 1 < n {
            jacobi[(i, i + 1)] = b[i];
            jacobi[(i + 1, i)] = b[i];
        }
    }
    let eig = jacobi
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or(Error::Decomposition)?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// `∫_{−1}^{1} f(x) dx`.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    let a = vec![0.0; n];
    let b: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let mut rule = golub_welsch(&a, &b, 2.0)?;
    // exact symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
    Ok(rule)
}

/// `∫_0^∞ x^α e^{−x} f(x) dx` (generalized Gauss–Laguerre, `α > −1`).
pub fn gauss_laguerre(n: usize, alpha: f64) -> Result<GaussRule> {
    if alpha <= -1.0 {
        return Err(Error::InvalidGrid(format!("Laguerre parameter {alpha} must exceed -1")));
    }
    let a: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0 + alpha).collect();
    let b: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            (k * (k + alpha)).sqrt()
        })
        .collect();
    golub_welsch(&a, &b, gamma(alpha + 1.0))
}

type RuleKey = (u8, usize, u64);

/// Memoized rules; the eigenproblem for 256 nodes is not free.
pub fn cached(kind: RuleKind, n: usize) -> Result<Arc<GaussRule>> {
    static CACHE: OnceLock<Mutex<Vec<(RuleKey, Arc<GaussRule>)>>> = OnceLock::new();
    let key = match kind {
        RuleKind::Legendre => (0, n, 0),
        RuleKind::Laguerre(alpha) => (1, n, alpha.to_bits()),
    };
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    if let Some((_, rule)) = cache.lock().unwrap().iter().find(|(k, _)| *k == key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(match kind {
        RuleKind::Legendre => gauss_legendre(n)?,
        RuleKind::Laguerre(alpha) => gauss_laguerre(n, alpha)?,
    });
    cache.lock().unwrap().push((key, rule.clone()));
    Ok(rule)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleKind {
    Legendre,
    Laguerre(f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_and_smooth_functions() {
        let rule = gauss_legendre(128).unwrap();
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        assert_relative_eq!(rule.integrate(|x| x.powi(10)), 2.0 / 11.0, epsilon = 1e-13);
        assert_relative_eq!(rule.integrate(f64::exp), 1f64.exp() - (-1f64).exp(), epsilon = 1e-13);
        let small = gauss_legendre(5).unwrap();
        assert_relative_eq!(small.integrate(|x| x.powi(8)), 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn laguerre_moments() {
        let rule = gauss_laguerre(256, 0.0).unwrap();
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // ∫ e^{−x} e^{−sx} dx = 1/(1+s)
        for s in [0.1, 1.0, 4.0] {
            assert_relative_eq!(rule.integrate(|x| (-s * x).exp()), 1.0 / (1.0 + s), epsilon = 1e-12);
        }
        let half = gauss_laguerre(64, 0.5).unwrap();
        assert_relative_eq!(half.integrate(|x| x), gamma(2.5), max_relative = 1e-12);
    }

    #[test]
    fn cache_returns_same_rule() {
        let a = cached(RuleKind::Laguerre(0.5), 32).unwrap();
        let b = cached(RuleKind::Laguerre(0.5), 32).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, gauss_laguerre(32, 0.5).unwrap());
    }
}

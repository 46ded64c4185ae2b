//! Singular transforms: the triangular projection, Fourier multipliers with
//! cocycle-lifted symbols, a Mihlin-condition certifier, directional Riesz
//! transforms, imaginary powers `L^{iu}` and Stein's multipliers `M_a`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::forms::GradientForms;
use crate::groups::{synthesize, Cocycle, FiniteGroup, LengthFunction};
use crate::opcore::{hermitian_calculus, schatten_norm, OperatorElement, SchattenExponent, C64, ONE, ZERO};
use crate::quadrature::{cached, RuleKind};
use crate::sampling::{unit_vector, Seeded};
use crate::semigroup::{MarkovSemigroup, KERNEL_TOL};

// ---------------------------------------------------------------------------
// Triangular transform

fn sgn(i: usize, j: usize) -> f64 {
    match i.cmp(&j) {
        std::cmp::Ordering::Greater => 1.0,
        std::cmp::Ordering::Less => -1.0,
        std::cmp::Ordering::Equal => 0.0,
    }
}

/// `(a_ij) ↦ (sgn(i − j) a_ij)` with `sgn(0) = 0`.
pub fn triangular(a: &OperatorElement) -> OperatorElement {
    let n = a.dim();
    let m = a.matrix();
    a.like(DMatrix::from_fn(n, n, |i, j| m[(i, j)] * sgn(i, j)))
}

/// `a_ij = 1/(i − j)` off the diagonal, zero on it.
pub fn hilbert_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / (i as f64 - j as f64) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KpRow {
    pub n: usize,
    pub norm: f64,
    pub transformed_norm: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KpTable {
    pub rows: Vec<KpRow>,
    /// Fit of the ratio against `ln n` over `n ≥ 16`.
    pub fit: Option<LinearFit>,
}

/// Operator norms of `A_n` and `T(A_n)`. `A_n` is antisymmetric, so its norm
/// is `λ_max(AᵀA)^{1/2}`; `T(A_n) = (1/|i−j|)` is symmetric.
pub fn kp_row(n: usize) -> KpRow {
    let a = hilbert_matrix(n);
    let gram = a.transpose() * &a;
    let norm = gram
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt();
    let t = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * sgn(i, j));
    let transformed_norm = t.symmetric_eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max);
    KpRow {
        n,
        norm,
        transformed_norm,
        ratio: if norm > 0.0 { transformed_norm / norm } else { 0.0 },
    }
}

pub fn kp_growth_experiment(n_list: &[usize]) -> KpTable {
    let mut rows: Vec<KpRow> = n_list.par_iter().map(|&n| kp_row(n)).collect();
    rows.sort_by_key(|r| r.n);
    let tail: Vec<&KpRow> = rows.iter().filter(|r| r.n >= 16).collect();
    let x: Vec<f64> = tail.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = tail.iter().map(|r| r.ratio).collect();
    KpTable {
        fit: linear_fit(&x, &y),
        rows,
    }
}

/// Checks that `s` is the Schur semigroup `e_ij ↦ e^{−t|i−j|} e_ij`.
fn check_poisson_schur(s: &MarkovSemigroup) -> Result<()> {
    let rates = s
        .effective_rates()
        .ok_or_else(|| Error::InvalidSemigroup("isometry audit needs a Schur semigroup".into()))?;
    let n = rates.nrows();
    for i in 0..n {
        for j in 0..n {
            if (rates[(i, j)] - (i as f64 - j as f64).abs()).abs() > 1e-12 * (1.0 + n as f64) {
                return Err(Error::InvalidSemigroup("isometry audit needs rates |i - j|".into()));
            }
        }
    }
    Ok(())
}

/// Worst entry of `(S_t|A|² − |S_tA|²) − (S_t|T(A)|² − |S_tT(A)|²)` over the grid.
pub fn bmo_isometry_audit(a: &OperatorElement, s: &MarkovSemigroup, t_grid: &[f64]) -> Result<f64> {
    check_poisson_schur(s)?;
    let ta = triangular(a);
    let mut worst = 0.0f64;
    for &t in t_grid {
        let left = &s.apply(t, &a.abs_squared())? - &s.apply(t, a)?.abs_squared();
        let right = &s.apply(t, &ta.abs_squared())? - &s.apply(t, &ta)?.abs_squared();
        worst = worst.max((&left - &right).max_abs_entry());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Fourier multipliers

pub type LiftedFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;
pub type SpectralFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum MultiplierSymbol {
    /// One value per group element.
    Tabulated(Vec<C64>),
    /// `m(g) = m̃(b(g))` for a cocycle `b`.
    Lifted { symbol: LiftedFn, cocycle: Cocycle },
    /// `m(g) = φ(ψ(g))`.
    Spectral(SpectralFn),
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tabulated(v) => f.debug_tuple("Tabulated").field(v).finish(),
            Self::Lifted { cocycle, .. } => f.debug_struct("Lifted").field("dim", &cocycle.dim()).finish(),
            Self::Spectral(_) => f.write_str("Spectral"),
        }
    }
}

impl MultiplierSymbol {
    pub fn lifted(symbol: impl Fn(&[f64]) -> C64 + Send + Sync + 'static, cocycle: Cocycle) -> Self {
        Self::Lifted {
            symbol: Arc::new(symbol),
            cocycle,
        }
    }

    pub fn spectral(phi: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self::Spectral(Arc::new(phi))
    }

    /// `m(g)` for every element.
    pub fn values(&self, group: &FiniteGroup, psi: &LengthFunction) -> Result<Vec<C64>> {
        let n = group.order();
        let values: Vec<C64> = match self {
            Self::Tabulated(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: v.len() });
                }
                v.clone()
            }
            Self::Lifted { symbol, cocycle } => {
                if cocycle.group().order() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: cocycle.group().order(),
                    });
                }
                (0..n).map(|g| symbol(cocycle.b(g).as_slice())).collect()
            }
            Self::Spectral(phi) => psi.values().iter().map(|&v| phi(v)).collect(),
        };
        if let Some(g) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::UnevaluableSymbol(format!("non-finite value at element {g}")));
        }
        Ok(values)
    }
}

/// `T_m: Σ f̂(g)λ(g) ↦ Σ m(g)f̂(g)λ(g)`.
pub fn fourier_multiplier(symbol: &MultiplierSymbol, f: &OperatorElement, group: &FiniteGroup, psi: &LengthFunction) -> Result<OperatorElement> {
    let m = symbol.values(group, psi)?;
    let c = crate::groups::fourier_coefficients(f, group)?;
    let scaled: Vec<C64> = c.iter().zip(&m).map(|(a, b)| a * b).collect();
    Ok(synthesize(&scaled, group))
}

// ---------------------------------------------------------------------------
// Mihlin certification

/// Relative finite-difference steps; Richardson extrapolation combines them.
pub const MIHLIN_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Successive extrapolants differing by more than this fraction signal a non-smooth symbol.
pub const MIHLIN_DIVERGENCE: f64 = 0.1;

/// A decade shell at either end of the radial range whose worst ratio exceeds
/// its neighbour's by more than this factor means the bound cannot hold with
/// any constant as `|ξ| → 0` or `|ξ| → ∞`.
pub const MIHLIN_GROWTH: f64 = 1.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MihlinReport {
    pub feasible: bool,
    /// Smallest `C` with `|∂^βm̃(ξ)| ≤ C·min{|ξ|^{−|β|+ε}, |ξ|^{−|β|−ε}}` on the samples.
    pub best_constant: f64,
    pub max_order: usize,
    /// Offending multi-index and point when derivative estimation diverged.
    pub divergence: Option<(Vec<usize>, Vec<f64>)>,
    /// Multi-index and end (`"small"`/`"large"`) where the ratio grows.
    pub growth: Option<(Vec<usize>, String)>,
    /// The symbol depends on `|ξ|` only, up to round-off, on the samples.
    pub radial: bool,
}

fn multi_indices(d: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; d]];
    let mut frontier = vec![vec![0; d]];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for beta in &frontier {
            // nondecreasing last-touched coordinate avoids duplicates
            let start = beta.iter().rposition(|&b| b > 0).unwrap_or(0);
            for j in start..d {
                let mut b = beta.clone();
                b[j] += 1;
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Centered `|β|`-th mixed difference quotient at `x` with step `h`.
fn mixed_difference(m: &dyn Fn(&[f64]) -> C64, x: &[f64], beta: &[usize], h: f64) -> C64 {
    // stencil per coordinate: offsets (k/2 − i)h with weights (−1)^i C(k, i)
    let mut stencil: Vec<(Vec<f64>, f64)> = vec![(x.to_vec(), 1.0)];
    for (j, &k) in beta.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(stencil.len() * (k + 1));
        for (point, weight) in &stencil {
            for i in 0..=k {
                let mut p = point.clone();
                p[j] += (k as f64 / 2.0 - i as f64) * h;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                next.push((p, weight * sign * binomial(k, i)));
            }
        }
        stencil = next;
    }
    let order: usize = beta.iter().sum();
    let mut acc = ZERO;
    for (p, w) in &stencil {
        acc += m(p) * *w;
    }
    acc / h.powi(order as i32)
}

/// Richardson-extrapolated derivative estimate and whether it is trustworthy.
fn derivative(m: &dyn Fn(&[f64]) -> C64, x: &[f64], beta: &[usize], r: f64, floor: f64) -> (C64, bool) {
    let order: usize = beta.iter().sum();
    if order == 0 {
        return (m(x), true);
    }
    let d: Vec<C64> = MIHLIN_STEPS
        .iter()
        .map(|&h| mixed_difference(m, x, beta, h * r))
        .collect();
    let r1 = (d[1] * 4.0 - d[0]) / 3.0;
    let r2 = (d[2] * 4.0 - d[1]) / 3.0;
    let spread = (r1 - r2).norm();
    let size = r1.norm().max(r2.norm());
    (r2, spread <= MIHLIN_DIVERGENCE * size + floor)
}

/// Tests the ε-modified Mihlin condition of order `⌊d/2⌋ + 1` (capped) on the samples.
pub fn mihlin_certify(
    m: &(dyn Fn(&[f64]) -> C64 + Sync),
    sample_points: &[Vec<f64>],
    epsilon: f64,
    order_cap: usize,
) -> Result<MihlinReport> {
    let d = sample_points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::InvalidGrid("no sample points".into()))?;
    if sample_points.iter().any(|p| p.len() != d || p.iter().all(|&v| v == 0.0)) {
        return Err(Error::InvalidGrid("sample points must be nonzero and of equal dimension".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidGrid("epsilon must be positive".into()));
    }
    let max_order = (d / 2 + 1).min(order_cap);
    let betas = multi_indices(d, max_order);
    let radii: Vec<f64> = sample_points.iter().map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let values: Vec<C64> = sample_points.iter().map(|p| m(p)).collect();
    let peak = values.iter().map(|z| z.norm()).fold(0.0, f64::max);

    // ratio |∂^βm̃(ξ)| / min{r^{−|β|+ε}, r^{−|β|−ε}} per (β, sample)
    type Row = (Vec<f64>, Option<(usize, usize)>);
    let rows: Vec<Row> = betas
        .par_iter()
        .enumerate()
        .map(|(bi, beta)| {
            let order: usize = beta.iter().sum();
            let mut ratios = Vec::with_capacity(sample_points.len());
            let mut diverged = None;
            for (si, x) in sample_points.iter().enumerate() {
                let r = radii[si];
                let floor = 1e-5 * peak.max(1e-300) / r.powi(order as i32);
                let (est, ok) = derivative(m, x, beta, r, floor);
                if !ok && diverged.is_none() {
                    diverged = Some((bi, si));
                }
                let bound = (r.powf(-(order as f64) + epsilon)).min(r.powf(-(order as f64) - epsilon));
                ratios.push(est.norm() / bound);
            }
            (ratios, diverged)
        })
        .collect();

    let mut best_constant = 0.0f64;
    let mut divergence = None;
    let mut growth = None;
    for (bi, (ratios, diverged)) in rows.iter().enumerate() {
        best_constant = ratios.iter().copied().fold(best_constant, f64::max);
        if divergence.is_none() {
            if let Some((b, s)) = diverged {
                divergence = Some((betas[*b].clone(), sample_points[*s].clone()));
            }
        }
        if growth.is_none() {
            if let Some(end) = edge_growth(&radii, ratios) {
                growth = Some((betas[bi].clone(), end.to_string()));
            }
        }
    }
    Ok(MihlinReport {
        feasible: divergence.is_none() && growth.is_none() && best_constant.is_finite(),
        best_constant,
        max_order,
        divergence,
        growth,
        radial: is_radial(&radii, &values),
    })
}

/// Decade shells of the radii; growth at an end shell relative to its
/// neighbour means no constant works in the limit.
fn edge_growth(radii: &[f64], ratios: &[f64]) -> Option<&'static str> {
    let mut shells: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for (&r, &q) in radii.iter().zip(ratios) {
        let key = r.log10().floor() as i64;
        let e = shells.entry(key).or_insert(0.0);
        *e = e.max(q);
    }
    // the r → 0 limit only speaks through shells below 1, r → ∞ through shells above
    let below: Vec<f64> = shells.range(..0).map(|(_, &v)| v).collect();
    let above: Vec<f64> = shells.range(0..).map(|(_, &v)| v).collect();
    if below.len() >= 2 && below[0] > MIHLIN_GROWTH * below[1] {
        return Some("small");
    }
    let k = above.len();
    if k >= 2 && above[k - 1] > MIHLIN_GROWTH * above[k - 2] {
        return Some("large");
    }
    None
}

fn is_radial(radii: &[f64], values: &[C64]) -> bool {
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    order.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        (radii[a] - radii[b]).abs() > 1e-12 * radii[b] || (values[a] - values[b]).norm() <= 1e-10 * scale
    })
}

/// Radii `10^{lo}..10^{hi}` (`per_decade` each) times `directions` fixed unit
/// vectors; the same directions at every radius keep homogeneous symbols'
/// shell maxima exactly comparable.
pub fn mihlin_sample_points(d: usize, lo: i32, hi: i32, per_decade: usize, directions: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = Seeded::new(seed).stream(0);
    let dirs: Vec<Vec<f64>> = (0..directions).map(|_| unit_vector(d, &mut rng)).collect();
    let count = (hi - lo) as usize * per_decade;
    let mut out = Vec::with_capacity(count * directions);
    for k in 0..count {
        let r = 10f64.powf(lo as f64 + (k as f64 + 0.5) / per_decade as f64);
        for u in &dirs {
            out.push(u.iter().map(|v| v * r).collect());
        }
    }
    out
}

/// `1` for `r ≤ 2`, `0` for `r ≥ 3`, smooth in between.
pub fn smooth_cutoff(r: f64) -> f64 {
    fn bump(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    let s = r - 2.0;
    let up = bump(1.0 - s);
    up / (up + bump(s))
}

/// `m̃(ζ) = ‖ζ‖^{2γ}` times [`smooth_cutoff`].
pub fn truncated_power(gamma: f64) -> impl Fn(&[f64]) -> C64 + Send + Sync + Clone {
    move |z: &[f64]| {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        C64::new(r.powf(2.0 * gamma) * smooth_cutoff(r), 0.0)
    }
}

/// `m̃(ζ) = ‖ζ‖^{iu}`.
pub fn imaginary_power_symbol(u: f64) -> impl Fn(&[f64]) -> C64 + Send + Sync + Clone {
    move |z: &[f64]| {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        C64::from_polar(1.0, u * r.ln())
    }
}

// ---------------------------------------------------------------------------
// Donut helix

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HelixTable {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `ξ_k = k/N`.
    pub xi: Vec<f64>,
    /// `b(ξ_k) ∈ ℝ⁴`.
    pub orbit: Vec<[f64; 4]>,
    /// `m(k) = ‖b(ξ_k)‖^{2γ}`.
    pub symbol: Vec<f64>,
}

pub fn helix_point(alpha: f64, beta: f64, xi: f64) -> [f64; 4] {
    let (a, b) = (2.0 * PI * alpha * xi, 2.0 * PI * beta * xi);
    [a.cos() - 1.0, a.sin(), b.cos() - 1.0, b.sin()]
}

/// `|‖b(ξ)‖² − 4sin²(παξ) − 4sin²(πβξ)|`.
pub fn helix_identity_defect(alpha: f64, beta: f64, xi: f64) -> f64 {
    let b = helix_point(alpha, beta, xi);
    let lhs: f64 = b.iter().map(|v| v * v).sum();
    let rhs = 4.0 * (PI * alpha * xi).sin().powi(2) + 4.0 * (PI * beta * xi).sin().powi(2);
    (lhs - rhs).abs()
}

pub fn helix_multiplier(alpha: f64, beta: f64, gamma: f64, n: usize) -> HelixTable {
    let xi: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let orbit: Vec<[f64; 4]> = xi.iter().map(|&x| helix_point(alpha, beta, x)).collect();
    let symbol = orbit
        .iter()
        .map(|b| b.iter().map(|v| v * v).sum::<f64>().powf(gamma))
        .collect();
    HelixTable {
        alpha,
        beta,
        gamma,
        xi,
        orbit,
        symbol,
    }
}

impl HelixTable {
    pub fn as_symbol(&self) -> MultiplierSymbol {
        MultiplierSymbol::Tabulated(self.symbol.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Smallest shift `p < N` with `b(ξ_{k+p}) = b(ξ_k)` for all valid `k`.
    pub fn period(&self, tol: f64) -> Option<usize> {
        let n = self.orbit.len();
        (1..n).find(|&p| {
            (0..n - p).all(|k| {
                self.orbit[k]
                    .iter()
                    .zip(&self.orbit[k + p])
                    .all(|(a, b)| (a - b).abs() <= tol)
            })
        })
    }
}

// ---------------------------------------------------------------------------
// Riesz transforms

/// `m(g) = −i⟨b(g), η⟩/√ψ(g)`, zero where `ψ(g)` vanishes.
pub fn riesz_symbol(eta: &[f64], cocycle: &Cocycle) -> Result<Vec<C64>> {
    if eta.len() != cocycle.dim() {
        return Err(Error::DimensionMismatch {
            expected: cocycle.dim(),
            got: eta.len(),
        });
    }
    let eta = DVector::from_column_slice(eta);
    let psi = cocycle.length();
    let top = psi.values().iter().copied().fold(0.0, f64::max);
    let cutoff = KERNEL_TOL * top.max(1.0);
    Ok((0..cocycle.group().order())
        .map(|g| {
            let v = psi.get(g);
            if v <= cutoff {
                ZERO
            } else {
                C64::new(0.0, -cocycle.b(g).dot(&eta) / v.sqrt())
            }
        })
        .collect())
}

/// `R_η f`.
pub fn riesz_transform(eta: &[f64], cocycle: &Cocycle, f: &OperatorElement) -> Result<OperatorElement> {
    let group = cocycle.group();
    let m = riesz_symbol(eta, cocycle)?;
    let c = crate::groups::fourier_coefficients(f, group)?;
    let scaled: Vec<C64> = c.iter().zip(&m).map(|(a, b)| a * b).collect();
    Ok(synthesize(&scaled, group))
}

/// `max_g |m(g⁻¹) − conj m(g)|`: zero exactly when `(R_ηf)* = R_η(f*)` for all `f`.
pub fn riesz_adjoint_defect(eta: &[f64], cocycle: &Cocycle) -> Result<f64> {
    let m = riesz_symbol(eta, cocycle)?;
    let g = cocycle.group();
    Ok((0..g.order())
        .map(|x| (m[g.inv(x)] - m[x].conj()).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioBand {
    pub p: f64,
    pub min: f64,
    pub max: f64,
}

/// `‖Γ(f,f)^{1/2}‖_p / ‖L^{1/2}f‖_p` over random kernel-free `f`.
pub fn riesz_bakry_audit(s: &MarkovSemigroup, p_list: &[f64], sample_count: usize, seed: u64) -> Result<Vec<RatioBand>> {
    let forms = GradientForms::new(s);
    let streams = Seeded::new(seed);
    let exponents: Vec<SchattenExponent> = p_list.iter().map(|&p| SchattenExponent::new(p)).collect::<Result<_>>()?;
    let ratios: Vec<Vec<f64>> = (0..sample_count)
        .into_par_iter()
        .map(|k| {
            let f = s.project_out_kernel(&s.random_element(&mut streams.stream(k as u64)))?;
            riesz_ratios(&forms, &f, &exponents)
        })
        .collect::<Result<_>>()?;
    Ok(p_list
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (min, max) = ratios
                .iter()
                .map(|r| r[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            RatioBand { p, min, max }
        })
        .collect())
}

/// The ratio for one `f` and each exponent.
pub fn riesz_ratios(forms: &GradientForms<'_>, f: &OperatorElement, exponents: &[SchattenExponent]) -> Result<Vec<f64>> {
    let s = forms.semigroup();
    let gamma = forms.gamma(f, f)?.hermitian_part();
    let root = hermitian_calculus(&gamma, |x| x.max(0.0).sqrt())?;
    let half = s.spectral_multiplier(f, |v| C64::new(v.max(0.0).sqrt(), 0.0))?;
    Ok(exponents
        .iter()
        .map(|&p| {
            let den = schatten_norm(&half, p);
            if den == 0.0 {
                1.0
            } else {
                schatten_norm(&root, p) / den
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Imaginary powers and Stein multipliers

/// `L^{iu}`: multiplies each eigencomponent by `φ^{iu}`, annihilating the kernel.
pub fn imaginary_power(u: f64, s: &MarkovSemigroup, f: &OperatorElement) -> Result<OperatorElement> {
    let cutoff = KERNEL_TOL * s.spectral_radius().max(1.0);
    s.spectral_multiplier(f, |v| if v <= cutoff { ZERO } else { C64::from_polar(1.0, u * v.ln()) })
}

/// `max{p, 1/(p−1)}·u^{−|1/2−1/p|}·e^{|πu/2 − πu/p|}`.
pub fn impower_profile(p: f64, u: f64) -> f64 {
    let d = (0.5 - 1.0 / p).abs();
    p.max(1.0 / (p - 1.0)) * u.powf(-d) * (PI * u * d).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImpowerRow {
    pub p: f64,
    pub u: f64,
    /// `max_f ‖L^{iu}f‖_p / ‖f‖_p` over the samples.
    pub lower_bound: f64,
    pub profile: f64,
}

/// Monte Carlo lower bounds for `‖L^{iu}‖_{p→p}`.
pub fn impower_lower_bounds(s: &MarkovSemigroup, p_list: &[f64], u_list: &[f64], sample_count: usize, seed: u64) -> Result<Vec<ImpowerRow>> {
    let streams = Seeded::new(seed);
    let samples: Vec<OperatorElement> = (0..sample_count)
        .into_par_iter()
        .map(|k| s.project_out_kernel(&s.random_element(&mut streams.stream(k as u64))))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &u in u_list {
        let images: Vec<OperatorElement> = samples
            .par_iter()
            .map(|f| imaginary_power(u, s, f))
            .collect::<Result<_>>()?;
        for &p in p_list {
            let e = SchattenExponent::new(p)?;
            let lower_bound = samples
                .par_iter()
                .zip(images.par_iter())
                .map(|(f, g)| schatten_norm(g, e) / schatten_norm(f, e))
                .reduce(|| 0.0, f64::max);
            rows.push(ImpowerRow {
                p,
                u,
                lower_bound,
                profile: impower_profile(p, u),
            });
        }
    }
    Ok(rows)
}

/// Spectral value of `M_a` at Poisson eigenvalue `σ`: `−σ∫₀^∞ a(t)e^{−tσ}dt = −Σ wᵢ a(xᵢ/σ)`.
pub fn stein_ma_value(a: &dyn Fn(f64) -> f64, sigma: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Ok(0.0);
    }
    let fine = cached(RuleKind::Laguerre(0.0), 256)?;
    let coarse = cached(RuleKind::Laguerre(0.0), 128)?;
    let v = -fine.integrate(|x| a(x / sigma));
    let check = -coarse.integrate(|x| a(x / sigma));
    if !v.is_finite() || (v - check).abs() > 1e-6 * (1.0 + v.abs()) {
        return Err(Error::Divergent(format!("M_a quadrature unstable at eigenvalue {sigma:.3e}")));
    }
    Ok(v)
}

/// `M_a = ∫₀^∞ a(t) ∂_tP_t dt` for the Poisson semigroup `P_t = e^{−t√L}` of `s`.
pub fn stein_ma(a: &dyn Fn(f64) -> f64, s: &MarkovSemigroup, f: &OperatorElement) -> Result<OperatorElement> {
    let symbols: Vec<f64> = match s.species() {
        crate::semigroup::Species::Schur { .. } => s.effective_rates().unwrap().iter().copied().collect(),
        crate::semigroup::Species::Group { .. } => s.effective_length().unwrap(),
    };
    // precompute per distinct eigenvalue so failures surface as errors
    let mut table: Vec<(f64, f64)> = Vec::new();
    for v in symbols {
        if !table.iter().any(|(x, _)| *x == v) {
            table.push((v, stein_ma_value(a, v.max(0.0).sqrt())?));
        }
    }
    s.spectral_multiplier(f, |v| {
        let value = table.iter().find(|(x, _)| *x == v).map(|(_, m)| *m).unwrap_or(0.0);
        C64::new(value, 0.0)
    })
}

/// The identity operator as a tabulated symbol on a group.
pub fn unit_symbol(order: usize) -> MultiplierSymbol {
    MultiplierSymbol::Tabulated(vec![ONE; order])
}

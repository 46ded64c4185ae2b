//! Weighted spectral decompositions ("Markov metrics") on the discrete circle.
//!
//! The carrier is `C(ℤ_N)` with normalized counting measure, identified with
//! the group algebra of `ℤ_N` by the Fourier transform. The semigroup acts by
//! convolution with its density `d_t(x) = Σ_k e^{−tψ(k)} e^{2πikx/N}`, and a
//! decomposition is a family of centred discrete balls `q(k, t)` with weights
//! `β(k, t)`. Everything here is a finite sum, so all constants are exact.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{synthesize, FiniteGroup, LengthFunction};
use crate::opcore::{OperatorElement, C64, ZERO};
use crate::quadrature::{cached, RuleKind};
use crate::sampling::{normal, Seeded};
use crate::semigroup::{log_grid, MarkovSemigroup};

/// Densities below this (absolute) count as negative.
pub const DENSITY_TOL: f64 = 1e-12;

/// Floor for annulus weights, relative to `max d_t`, keeping every `β` positive.
pub const BETA_FLOOR: f64 = 1e-15;

/// `α(k) = 4k` doubles the heat-ball radius `√(4kt)`.
pub const DEFAULT_ALPHA_FACTOR: usize = 4;

/// 40 log-spaced times covering balls from single points to the whole circle.
pub fn standard_t_grid() -> Vec<f64> {
    log_grid(1e-3, 1e1, 40)
}

/// Circular distance to `0` on `ℤ_N`.
fn dist(x: usize, n: usize) -> usize {
    x.min(n - x)
}

/// A convolution-type Markov semigroup on `ℤ_N` given by a length function on the dual.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleModel {
    length: LengthFunction,
}

impl CircleModel {
    /// `ψ(k) = (N/π)² sin²(πk/N)`: the second difference Laplacian of a circle
    /// of length `2π` sampled at spacing `2π/N`, so `ψ(k) ≈ k²` for `k ≪ N`.
    pub fn heat(n: usize) -> Result<Self> {
        let scale = (n as f64 / PI).powi(2);
        Self::new((0..n).map(|k| scale * (PI * k as f64 / n as f64).sin().powi(2)).collect())
    }

    pub fn new(psi: Vec<f64>) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::InvalidGroup("the circle model needs N >= 2".into()));
        }
        let group = Arc::new(FiniteGroup::cyclic(psi.len()));
        Ok(Self {
            length: LengthFunction::new(group, psi)?,
        })
    }

    pub fn n(&self) -> usize {
        self.length.values().len()
    }

    pub fn length(&self) -> &LengthFunction {
        &self.length
    }

    /// The same semigroup on the group algebra of `ℤ_N`.
    pub fn semigroup(&self) -> MarkovSemigroup {
        MarkovSemigroup::group(self.length.clone())
    }

    /// `d_t(x)` for `x = 0..N`.
    pub fn density(&self, t: f64) -> Vec<f64> {
        let n = self.n();
        let weights: Vec<f64> = self.length.values().iter().map(|&v| (-t * v).exp()).collect();
        (0..n)
            .map(|x| {
                (0..n)
                    .map(|k| weights[k] * (2.0 * PI * ((k * x) % n) as f64 / n as f64).cos())
                    .sum()
            })
            .collect()
    }

    /// `d_t` as a function of distance `0..=⌊N/2⌋`.
    fn radial_density(&self, t: f64) -> Vec<f64> {
        let d = self.density(t);
        let n = self.n();
        (0..=n / 2).map(|r| d[r].max(d[(n - r) % n])).collect()
    }

    /// `S_tf(x) = τ_y(d_t(x − y)f(y))`.
    pub fn apply(&self, t: f64, f: &[C64]) -> Result<Vec<C64>> {
        convolve(&self.density(t), f, 1.0 / self.n() as f64)
    }

    /// The group-algebra element whose spectrum is the function `f`.
    pub fn to_group_element(&self, f: &[C64]) -> Result<OperatorElement> {
        let n = self.n();
        check_len(f, n)?;
        let coefficients: Vec<C64> = (0..n)
            .map(|k| {
                f.iter()
                    .enumerate()
                    .map(|(x, v)| v * C64::from_polar(1.0, -2.0 * PI * ((k * x) % n) as f64 / n as f64))
                    .sum::<C64>()
                    / n as f64
            })
            .collect();
        Ok(synthesize(&coefficients, self.length.group()))
    }
}

fn check_len(f: &[C64], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    Ok(())
}

/// `scale · Σ_y k(x − y) f(y)`.
fn convolve<K: Copy + Into<C64>>(kernel: &[K], f: &[C64], scale: f64) -> Result<Vec<C64>> {
    let n = kernel.len();
    check_len(f, n)?;
    Ok((0..n)
        .map(|x| {
            let mut acc = ZERO;
            for (y, v) in f.iter().enumerate() {
                acc += kernel[(x + n - y) % n].into() * v;
            }
            acc * scale
        })
        .collect())
}

fn sup_norm(f: &[C64]) -> f64 {
    f.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `sup_t ‖S_t|f − S_tf|²‖^{1/2}`; functions commute, so this is also the two-sided value.
pub fn bmo_s(f: &[C64], model: &CircleModel, t_grid: &[f64]) -> Result<f64> {
    check_len(f, model.n())?;
    let worst = t_grid
        .par_iter()
        .map(|&t| {
            let d = model.density(t);
            let scale = 1.0 / model.n() as f64;
            let st = convolve(&d, f, scale)?;
            let gap: Vec<C64> = f.iter().zip(&st).map(|(a, b)| C64::new((a - b).norm_sqr(), 0.0)).collect();
            let osc = convolve(&d, &gap, scale)?;
            Ok(osc.iter().map(|z| z.re).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max).max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BetaRule {
    /// `β(k, t) = sup` of `d_t` on the `k`-th annulus, so `c_d = 1`.
    AnnulusSup,
    /// The Euclidean heat prescription `e^{−k}/(4πt)^{1/2}`, rescaled to the
    /// normalized measure on a circle of length `2π`.
    EuclideanHeat,
}

/// Centred balls `q(k, t)` (stored as radii) and weights `β(k, t)` over a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSpectralDecomposition {
    model: CircleModel,
    t_grid: Vec<f64>,
    /// `radii[i][k − 1]` for `k = 1..=k_max(i)`; the last radius covers the circle.
    radii: Vec<Vec<usize>>,
    beta: Vec<Vec<f64>>,
    alpha_factor: usize,
}

impl WeightedSpectralDecomposition {
    /// Validates monotone radii ending at the full circle and positive weights.
    pub fn new(model: CircleModel, t_grid: Vec<f64>, radii: Vec<Vec<usize>>, beta: Vec<Vec<f64>>, alpha_factor: usize) -> Result<Self> {
        let full = model.n() / 2;
        if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidGrid("times must be positive and finite".into()));
        }
        if radii.len() != t_grid.len() || beta.len() != t_grid.len() {
            return Err(Error::InvalidDecomposition("one radius and weight list per time".into()));
        }
        if alpha_factor < 2 {
            return Err(Error::InvalidDecomposition("α(k) = ak needs a >= 2 to be strictly increasing and expanding".into()));
        }
        for (r, b) in radii.iter().zip(&beta) {
            if r.is_empty() || r.len() != b.len() {
                return Err(Error::InvalidDecomposition("radius and weight lists must match and be nonempty".into()));
            }
            if r.windows(2).any(|w| w[1] < w[0]) || *r.last().unwrap() != full || r.iter().any(|&v| v > full) {
                return Err(Error::InvalidDecomposition(format!("radii must increase up to the full radius {full}")));
            }
            if b.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidDecomposition("weights must be positive".into()));
            }
        }
        Ok(Self {
            model,
            t_grid,
            radii,
            beta,
            alpha_factor,
        })
    }

    /// Balls of radius `⌈√(4kt)·N/(2π)⌉` grid points, i.e. `B_{√(4kt)}(0)` on
    /// the circle of length `2π`, with `k_max` the first full ball.
    pub fn heat_balls(model: CircleModel, t_grid: Vec<f64>, rule: BetaRule) -> Result<Self> {
        let n = model.n();
        let full = n / 2;
        let mut all_radii = Vec::with_capacity(t_grid.len());
        let mut all_beta = Vec::with_capacity(t_grid.len());
        for &t in &t_grid {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidGrid("times must be positive and finite".into()));
            }
            let mut radii = Vec::new();
            for k in 1.. {
                let r = ((4.0 * k as f64 * t).sqrt() * n as f64 / (2.0 * PI)).ceil();
                let r = if r >= full as f64 { full } else { r as usize };
                radii.push(r);
                if r == full {
                    break;
                }
            }
            let beta = match rule {
                BetaRule::AnnulusSup => annulus_sup(&model.radial_density(t), &radii),
                BetaRule::EuclideanHeat => (1..=radii.len())
                    .map(|k| (2.0 * PI * (-(k as f64)).exp() / (4.0 * PI * t).sqrt()).max(f64::MIN_POSITIVE))
                    .collect(),
            };
            all_radii.push(radii);
            all_beta.push(beta);
        }
        Self::new(model, t_grid, all_radii, all_beta, DEFAULT_ALPHA_FACTOR)
    }

    /// `q(1, t)` = the whole circle with `β = max d_t`.
    pub fn single_projection(model: CircleModel, t_grid: Vec<f64>) -> Result<Self> {
        let full = model.n() / 2;
        let beta = t_grid
            .iter()
            .map(|&t| vec![model.density(t).into_iter().fold(f64::MIN, f64::max)])
            .collect();
        let radii = vec![vec![full]; t_grid.len()];
        Self::new(model, t_grid, radii, beta, DEFAULT_ALPHA_FACTOR)
    }

    pub fn model(&self) -> &CircleModel {
        &self.model
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn k_max(&self, ti: usize) -> usize {
        self.radii[ti].len()
    }

    pub fn alpha(&self, k: usize) -> usize {
        self.alpha_factor * k
    }

    /// Radius of `q(k, t_i)`; `k = 0` is the empty projection (`None`), `k > k_max` the full one.
    pub fn radius(&self, ti: usize, k: usize) -> Option<usize> {
        match k {
            0 => None,
            k => Some(*self.radii[ti].get(k - 1).unwrap_or(&(self.model.n() / 2))),
        }
    }

    /// `q(k, t_i)` as a 0/1 diagonal.
    pub fn projection(&self, ti: usize, k: usize) -> Vec<bool> {
        let n = self.model.n();
        match self.radius(ti, k) {
            None => vec![false; n],
            Some(r) => (0..n).map(|x| dist(x, n) <= r).collect(),
        }
    }

    /// `τ(q(k, t_i))` with the normalized counting measure.
    pub fn tau(&self, ti: usize, k: usize) -> f64 {
        let n = self.model.n();
        self.radius(ti, k).map_or(0.0, |r| ball_size(r, n) as f64 / n as f64)
    }

    pub fn beta(&self, ti: usize, k: usize) -> f64 {
        self.beta[ti][k - 1]
    }

    /// `w_{k,t} = (Σ_{j≤k} √(τ(q_{j+1,t})/τ(q_{j,t})))²`.
    pub fn w(&self, ti: usize, k: usize) -> f64 {
        (1..=k)
            .map(|j| (self.tau(ti, j + 1) / self.tau(ti, j)).sqrt())
            .sum::<f64>()
            .powi(2)
    }

    fn distinct_radii(&self) -> BTreeSet<usize> {
        self.radii.iter().flatten().copied().collect()
    }
}

fn ball_size(r: usize, n: usize) -> usize {
    (2 * r + 1).min(n)
}

/// Sup of the radial density over `r_{k−1} < |x| ≤ r_k`, floored so that
/// empty annuli still carry a positive weight.
fn annulus_sup(radial: &[f64], radii: &[usize]) -> Vec<f64> {
    let floor = BETA_FLOOR * radial.iter().copied().fold(0.0, f64::max);
    let mut prev: Option<usize> = None;
    radii
        .iter()
        .map(|&r| {
            let lo = prev.map_or(0, |p| p + 1);
            prev = Some(r);
            radial
                .get(lo..=r)
                .map_or(f64::NEG_INFINITY, |s| s.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .max(floor)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecompositionConstants {
    pub c_s: f64,
    pub c_d: f64,
    pub c_w: f64,
    pub c_alpha: f64,
}

impl DecompositionConstants {
    pub fn finite(&self) -> bool {
        [self.c_s, self.c_d, self.c_w, self.c_alpha].iter().all(|v| v.is_finite())
    }

    /// `2√2·√(c_d(c_s + c_w))`.
    pub fn lemma_constant(&self) -> f64 {
        2.0 * 2f64.sqrt() * (self.c_d * (self.c_s + self.c_w)).sqrt()
    }
}

/// Smallest constants for summability, domination, weight and doubling over the grid.
pub fn audit_decomposition(d: &WeightedSpectralDecomposition) -> Result<DecompositionConstants> {
    let n = d.model.n();
    let per_t: Vec<DecompositionConstants> = (0..d.t_grid.len())
        .into_par_iter()
        .map(|ti| {
            let t = d.t_grid[ti];
            let density = d.model.density(t);
            let low = density.iter().copied().fold(f64::INFINITY, f64::min);
            if low < -DENSITY_TOL {
                return Err(Error::InvalidSemigroup(format!("density at t = {t:.3e} reaches {low:.3e}")));
            }
            let k_max = d.k_max(ti);
            let mut c_s = 0.0;
            let mut c_w = 0.0;
            let mut c_alpha = 1.0f64;
            let mut w_sum = 0.0;
            for k in 1..=k_max {
                let beta = d.beta(ti, k);
                c_s += beta * d.tau(ti, k);
                w_sum += (d.tau(ti, k + 1) / d.tau(ti, k)).sqrt();
                c_w += beta * w_sum * w_sum * (d.tau(ti, k) - d.tau(ti, k - 1));
                c_alpha = c_alpha.max(d.tau(ti, d.alpha(k)) / d.tau(ti, k));
            }
            // each point lies in exactly one annulus; densities within the
            // tolerance of zero are rounding noise and dominate nothing
            let mut c_d = 0.0f64;
            let mut k = 1;
            let mut by_distance: Vec<usize> = (0..n).collect();
            by_distance.sort_by_key(|&x| dist(x, n));
            for x in by_distance {
                while dist(x, n) > d.radius(ti, k).unwrap() {
                    k += 1;
                }
                if density[x] > DENSITY_TOL {
                    c_d = c_d.max(density[x] / d.beta(ti, k));
                }
            }
            Ok(DecompositionConstants { c_s, c_d, c_w, c_alpha })
        })
        .collect::<Result<_>>()?;
    Ok(per_t.iter().fold(
        DecompositionConstants {
            c_s: 0.0,
            c_d: 0.0,
            c_w: 0.0,
            c_alpha: 1.0,
        },
        |acc, c| DecompositionConstants {
            c_s: acc.c_s.max(c.c_s),
            c_d: acc.c_d.max(c.c_d),
            c_w: acc.c_w.max(c.c_w),
            c_alpha: acc.c_alpha.max(c.c_alpha),
        },
    ))
}

/// `Q f(x)`: the mean of `f` over `x + B_r`.
pub fn ball_mean(f: &[C64], r: usize) -> Vec<C64> {
    let n = f.len();
    let size = ball_size(r, n);
    if size == n {
        let mean = f.iter().sum::<C64>() / n as f64;
        return vec![mean; n];
    }
    (0..n)
        .map(|x| {
            let mut acc = f[x];
            for j in 1..=r {
                acc += f[(x + j) % n] + f[(x + n - j) % n];
            }
            acc / size as f64
        })
        .collect()
}

/// `max_x (Q|f|² − |Qf|²)` for balls of radius `r`; nonnegative up to round-off.
fn ball_oscillation(f: &[C64], r: usize) -> f64 {
    let squares: Vec<C64> = f.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
    let q2 = ball_mean(&squares, r);
    let q = ball_mean(f, r);
    q2.iter().zip(&q).map(|(a, b)| a.re - b.norm_sqr()).fold(f64::NEG_INFINITY, f64::max)
}

/// `‖f‖_{BMO(𝒬)} = sup_{k,t} ‖(Q_{k,t}|f|² − |Q_{k,t}f|²)^{1/2}‖_∞`.
pub fn metric_bmo(f: &[C64], d: &WeightedSpectralDecomposition) -> Result<f64> {
    check_len(f, d.model.n())?;
    let radii: Vec<usize> = d.distinct_radii().into_iter().collect();
    let worst = radii
        .par_iter()
        .map(|&r| ball_oscillation(f, r))
        .reduce(|| 0.0, f64::max);
    Ok(worst.max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaAudit {
    /// `‖f‖_{BMO(𝒮)}` over the decomposition's grid.
    pub lhs: f64,
    pub bmo_q: f64,
    pub constant: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl LemmaAudit {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-12 * (1.0 + rhs.abs())
}

pub fn lemma_audit(f: &[C64], d: &WeightedSpectralDecomposition, constants: &DecompositionConstants) -> Result<LemmaAudit> {
    let lhs = bmo_s(f, &d.model, &d.t_grid)?;
    let bmo_q = metric_bmo(f, d)?;
    let constant = constants.lemma_constant();
    let rhs = constant * bmo_q;
    Ok(LemmaAudit {
        lhs,
        bmo_q,
        constant,
        rhs,
        passed: leq(lhs, rhs),
    })
}

/// A convolution operator `Tf(x) = Σ_y k(x − y) f(y)` on `ℤ_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionKernel {
    values: Vec<C64>,
}

impl ConvolutionKernel {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidDecomposition("kernel values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn identity(n: usize) -> Self {
        let mut values = vec![ZERO; n];
        values[0] = C64::new(1.0, 0.0);
        Self { values }
    }

    /// `k(x) = cot(πx/N)/N`, `k(0) = 0`.
    pub fn conjugate(n: usize) -> Self {
        let values = (0..n)
            .map(|x| {
                if x == 0 {
                    ZERO
                } else {
                    C64::new(1.0 / ((PI * x as f64 / n as f64).tan() * n as f64), 0.0)
                }
            })
            .collect();
        Self { values }
    }

    /// Independent `±1` values: no smoothness at all.
    pub fn random_signs(n: usize, seed: u64) -> Self {
        let mut rng = Seeded::new(seed).stream(0);
        let values = (0..n)
            .map(|_| C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0))
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn apply(&self, f: &[C64]) -> Result<Vec<C64>> {
        convolve(&self.values, f, 1.0)
    }

    /// `k̂(m) = Σ_x k(x) e^{−2πimx/N}`.
    pub fn symbol(&self) -> Vec<C64> {
        let n = self.values.len();
        (0..n)
            .map(|m| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(x, v)| v * C64::from_polar(1.0, -2.0 * PI * ((m * x) % n) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    /// `‖T‖_{2→2} = max |k̂|`.
    pub fn l2_norm(&self) -> f64 {
        self.symbol().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Best power-iteration estimate of `‖T‖_{2→2}` from random starts.
    pub fn power_iteration_norm(&self, starts: usize, iterations: usize, seed: u64) -> Result<f64> {
        let n = self.values.len();
        let streams = Seeded::new(seed);
        let adjoint = ConvolutionKernel {
            values: (0..n).map(|x| self.values[(n - x) % n].conj()).collect(),
        };
        let estimates = (0..starts)
            .into_par_iter()
            .map(|s| {
                let mut rng = streams.stream(s as u64);
                let mut v: Vec<C64> = (0..n).map(|_| C64::new(normal(&mut rng), normal(&mut rng))).collect();
                let mut estimate = 0.0;
                for _ in 0..iterations {
                    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        return Ok(0.0);
                    }
                    v.iter_mut().for_each(|z| *z /= norm);
                    let tv = self.apply(&v)?;
                    estimate = tv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    v = adjoint.apply(&tv)?;
                }
                Ok(estimate)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(estimates.into_iter().fold(0.0, f64::max))
    }

    /// `c_h = sup_{k,t} sup_{x₁,x₂ ∈ q(k,t)} Σ_{y ∉ q(α(k),t)} |k(x₁−y) − k(x₂−y)|`.
    pub fn hormander_constant(&self, d: &WeightedSpectralDecomposition) -> Result<f64> {
        let n = d.model.n();
        if self.values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.values.len() });
        }
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for ti in 0..d.t_grid.len() {
            for k in 1..=d.k_max(ti) {
                let inner = d.radius(ti, k).unwrap();
                let outer = d.radius(ti, d.alpha(k)).unwrap();
                if ball_size(outer, n) < n {
                    pairs.insert((inner, outer));
                }
            }
        }
        // inner radius → worst sum for each distinct pair
        let worst: BTreeMap<(usize, usize), f64> = pairs
            .into_par_iter()
            .map(|(r, big)| ((r, big), self.smoothness_sum(r, big)))
            .collect();
        Ok(worst.values().copied().fold(0.0, f64::max))
    }

    fn smoothness_sum(&self, r: usize, big: usize) -> f64 {
        let n = self.values.len();
        let ball: Vec<usize> = (0..n).filter(|&x| dist(x, n) <= r).collect();
        let outside: Vec<usize> = (0..n).filter(|&y| dist(y, n) > big).collect();
        let mut worst = 0.0f64;
        for (i, &x1) in ball.iter().enumerate() {
            for &x2 in &ball[i + 1..] {
                let s: f64 = outside
                    .iter()
                    .map(|&y| (self.values[(x1 + n - y) % n] - self.values[(x2 + n - y) % n]).norm())
                    .sum();
                worst = worst.max(s);
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CzRow {
    pub sup_norm: f64,
    pub bmo_q: f64,
    pub q_bound: f64,
    pub bmo_s: f64,
    pub s_bound: f64,
}

impl CzRow {
    pub fn passed(&self) -> bool {
        leq(self.bmo_q, self.q_bound) && leq(self.bmo_s, self.s_bound)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CzReport {
    pub c22: f64,
    pub c_h: f64,
    pub constants: DecompositionConstants,
    /// `2c₂₂√c_α + c_h`.
    pub factor: f64,
    pub rows: Vec<CzRow>,
}

impl CzReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CzRow::passed)
    }
}

/// Computes `c₂₂`, `c_h`, `c_α` and checks both `L_∞ → BMO` bounds on every sample.
pub fn cz_smoothness_and_extrapolation(kernel: &ConvolutionKernel, d: &WeightedSpectralDecomposition, samples: &[Vec<C64>]) -> Result<CzReport> {
    let constants = audit_decomposition(d)?;
    let c22 = kernel.l2_norm();
    let c_h = kernel.hormander_constant(d)?;
    let factor = 2.0 * c22 * constants.c_alpha.sqrt() + c_h;
    let lemma = constants.lemma_constant();
    let rows = samples
        .par_iter()
        .map(|f| {
            let tf = kernel.apply(f)?;
            let sup = sup_norm(f);
            Ok(CzRow {
                sup_norm: sup,
                bmo_q: metric_bmo(&tf, d)?,
                q_bound: factor * sup,
                bmo_s: bmo_s(&tf, &d.model, &d.t_grid)?,
                s_bound: lemma * factor * sup,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CzReport {
        c22,
        c_h,
        constants,
        factor,
        rows,
    })
}

/// Real Gaussian samples, one stream per index.
pub fn random_functions(n: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let streams = Seeded::new(seed);
    (0..count)
        .map(|k| {
            let mut rng = streams.stream(k as u64);
            (0..n).map(|_| C64::new(normal(&mut rng), 0.0)).collect()
        })
        .collect()
}

/// Mean of `f` over the continuum interval `[x − ρ, x + ρ]` read on the
/// lattice: interior points weigh 1, the two cut points the fractional part.
fn fractional_ball_mean(f: &[f64], x: usize, rho: f64) -> f64 {
    let n = f.len();
    if 2.0 * rho + 1.0 >= n as f64 {
        return f.iter().sum::<f64>() / n as f64;
    }
    let whole = rho.floor() as usize;
    let frac = rho - whole as f64;
    let mut acc = f[x];
    for j in 1..=whole {
        acc += f[(x + j) % n] + f[(x + n - j) % n];
    }
    acc += frac * (f[(x + whole + 1) % n] + f[(x + n - whole - 1) % n]);
    acc / (1.0 + 2.0 * rho)
}

/// Worst relative sup-norm error between `S_tf` and the heat-kernel average of
/// ball means `Γ(3/2)^{−1}∫₀^∞ e^{−u}u^{1/2} mean_{B_{√(4ut)}}f du` on the
/// `ℤ_N` heat model, for smooth trigonometric `f`.
pub fn heat_mean_value_check(n: usize, t_grid: &[f64]) -> Result<f64> {
    let model = CircleModel::heat(n)?;
    let rule = cached(RuleKind::Laguerre(0.5), 128)?;
    let mass: f64 = rule.weights.iter().sum();
    let omega = 2.0 * PI / n as f64;
    let tests: Vec<Vec<f64>> = vec![
        (0..n).map(|x| (omega * x as f64).cos()).collect(),
        (0..n).map(|x| (omega * x as f64).cos() + 0.5 * (3.0 * omega * x as f64).sin()).collect(),
    ];
    let mut worst = 0.0f64;
    for &t in t_grid {
        for f in &tests {
            let fc: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
            let lhs: Vec<f64> = model.apply(t, &fc)?.iter().map(|z| z.re).collect();
            let rhs: Vec<f64> = (0..n)
                .map(|x| {
                    rule.nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&u, &w)| w * fractional_ball_mean(f, x, (4.0 * u * t).sqrt() * n as f64 / (2.0 * PI)))
                        .sum::<f64>()
                        / mass
                })
                .collect();
            let scale = lhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
    }
    Ok(worst)
}

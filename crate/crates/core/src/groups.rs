//! Finite groups, length functions and cocycles.
//!
//! A cocycle is an orthogonal representation `α: G → O(ℝ^d)` together with
//! `b: G → ℝ^d` satisfying `b(gh) = α_g b(h) + b(g)`. Every cocycle yields
//! the conditionally negative length `ψ(g) = ‖b(g)‖²`; conversely a
//! conditionally negative `ψ` is factored back into a cocycle through the
//! Gromov kernel `½(ψ(g) + ψ(h) − ψ(g⁻¹h))`.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::opcore::{schatten_norm, CMatrix, OperatorElement, SchattenExponent, C64, ONE, ZERO};

/// Default cap on group order (`|S_6| = 720`); kernel problems are `|G|×|G|`.
pub const DEFAULT_GROUP_CAP: usize = 720;

/// Tolerance used by the cocycle-law and orthogonality checks.
pub const COCYCLE_TOL: f64 = 1e-9;

/// Default tolerance for the conditional-negativity and Schoenberg verdicts.
pub const CN_TOL: f64 = 1e-9;

/// Relative eigenvalue cutoff used when factoring the Gromov kernel.
pub const RANK_CUTOFF: f64 = 1e-10;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish()
    }
}

impl FiniteGroup {
    /// Builds a group from its multiplication table, `table[g][h] = gh`.
    pub fn from_cayley(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        let mut cayley = Vec::with_capacity(order * order);
        for (g, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "row {g} has {} entries, expected {order}",
                    row.len()
                )));
            }
            cayley.extend_from_slice(row);
        }
        if let Some(&bad) = cayley.iter().find(|&&x| x >= order) {
            return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
        }
        // Latin square
        for g in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for h in 0..order {
                let r = cayley[g * order + h];
                let c = cayley[h * order + g];
                if seen_row[r] || seen_col[c] {
                    return Err(Error::InvalidGroup("table is not a Latin square".into()));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| cayley[e * order + g] == g && cayley[g * order + e] == g))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        let mut inverse = vec![0; order];
        for g in 0..order {
            let h = (0..order)
                .find(|&h| cayley[g * order + h] == identity)
                .expect("Latin square row contains the identity");
            if cayley[h * order + g] != identity {
                return Err(Error::InvalidGroup(format!("element {g} has no two-sided inverse")));
            }
            inverse[g] = h;
        }
        let group = Self {
            order,
            cayley,
            identity,
            inverse,
        };
        if order <= 200 && !group.is_associative() {
            return Err(Error::InvalidGroup("multiplication is not associative".into()));
        }
        Ok(group)
    }

    fn is_associative(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }

    /// `ℤ_n` with elements `0..n` and addition mod `n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs n >= 1");
        let cayley = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inverse = (0..n).map(|k| (n - k) % n).collect();
        Self {
            order: n,
            cayley,
            identity: 0,
            inverse,
        }
    }

    /// `S_n` in lexicographic order of the permutations, with `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> (Self, Vec<Vec<usize>>) {
        let perms = permutations(n);
        let index: HashMap<&[usize], usize> =
            perms.iter().enumerate().map(|(k, p)| (p.as_slice(), k)).collect();
        let order = perms.len();
        let mut cayley = Vec::with_capacity(order * order);
        for s in &perms {
            for t in &perms {
                let st: Vec<usize> = t.iter().map(|&i| s[i]).collect();
                cayley.push(index[st.as_slice()]);
            }
        }
        let identity = 0; // lexicographically first permutation is the identity
        let inverse = perms
            .iter()
            .map(|s| {
                let mut inv = vec![0; n];
                for (i, &si) in s.iter().enumerate() {
                    inv[si] = i;
                }
                index[inv.as_slice()]
            })
            .collect();
        (
            Self {
                order,
                cayley,
                identity,
                inverse,
            },
            perms,
        )
    }

    /// `G × H` with `(g, h) ↦ g·|H| + h`, matching the Kronecker ordering.
    pub fn direct_product(&self, other: &Self) -> Self {
        let (n1, n2) = (self.order, other.order);
        let order = n1 * n2;
        let mut cayley = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                let g = self.mul(a / n2, b / n2);
                let h = other.mul(a % n2, b % n2);
                cayley.push(g * n2 + h);
            }
        }
        let inverse = (0..order)
            .map(|a| self.inv(a / n2) * n2 + other.inv(a % n2))
            .collect();
        Self {
            order,
            cayley,
            identity: self.identity * n2 + other.identity,
            inverse,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.cayley[g * self.order + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.order > cap {
            Err(Error::GroupTooLarge {
                order: self.order,
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// Parses the plain-text Cayley format: first line the order, then one
    /// row per element with space-separated indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let order: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing order line".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad order: {e}")))?;
        let mut table = Vec::with_capacity(order);
        for (k, line) in lines.enumerate() {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("row {k}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        if table.len() != order {
            return Err(Error::Parse(format!(
                "expected {order} rows, found {}",
                table.len()
            )));
        }
        Self::from_cayley(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.order);
        for g in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|h| self.mul(g, h).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Word length with respect to a generating set (closed under inverses
    /// internally). Elements not reachable get `None`.
    pub fn word_length(&self, generators: &[usize]) -> Vec<Option<usize>> {
        let mut gens: Vec<usize> = generators.to_vec();
        gens.extend(generators.iter().map(|&g| self.inv(g)));
        gens.sort_unstable();
        gens.dedup();
        let mut dist = vec![None; self.order];
        dist[self.identity] = Some(0);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            let d = dist[g].expect("queued elements have a distance");
            for &s in &gens {
                let h = self.mul(g, s);
                if dist[h].is_none() {
                    dist[h] = Some(d + 1);
                    queue.push_back(h);
                }
            }
        }
        dist
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    // next lexicographic permutation
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
    out
}

/// A symmetric nonnegative function vanishing at the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthFunction {
    group: Arc<FiniteGroup>,
    values: Vec<f64>,
}

impl LengthFunction {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<f64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                got: values.len(),
            });
        }
        let scale = 1.0 + values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let tol = 1e-12 * scale;
        if values.iter().any(|v| !v.is_finite() || *v < -tol) {
            return Err(Error::InvalidLength("values must be finite and nonnegative".into()));
        }
        if values[group.identity()].abs() > tol {
            return Err(Error::InvalidLength("must vanish at the identity".into()));
        }
        for g in 0..group.order() {
            if (values[g] - values[group.inv(g)]).abs() > tol {
                return Err(Error::InvalidLength(format!("not symmetric at element {g}")));
            }
        }
        let mut values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        values[group.identity()] = 0.0;
        Ok(Self { group, values })
    }

    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self {
            group,
            values: vec![0.0; n],
        }
    }

    /// `ψ(g) = 1` for `g ≠ e`.
    pub fn discrete(group: Arc<FiniteGroup>) -> Self {
        let mut values = vec![1.0; group.order()];
        values[group.identity()] = 0.0;
        Self { group, values }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, g: usize) -> f64 {
        self.values[g]
    }

    /// `ψ₁ ⊕ ψ₂ ` on `G₁ × G₂`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let group = Arc::new(self.group.direct_product(&other.group));
        let n2 = other.group.order();
        let values = (0..group.order())
            .map(|a| self.values[a / n2] + other.values[a % n2])
            .collect();
        Self { group, values }
    }

    /// `ψ + δ·(1_{g₀} + 1_{g₀⁻¹})`, used to push a length out of the CN cone.
    pub fn perturbed(&self, g0: usize, delta: f64) -> Result<Self> {
        let mut values = self.values.clone();
        let gi = self.group.inv(g0);
        values[g0] += delta;
        if gi != g0 {
            values[gi] += delta;
        }
        Self::new(self.group.clone(), values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.group.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Kernel `(g, h) ↦ φ(ψ(g⁻¹h))`.
    pub fn kernel(&self, phi: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let g = &self.group;
        DMatrix::from_fn(g.order(), g.order(), |a, b| phi(self.values[g.mul(g.inv(a), b)]))
    }

    /// Gromov kernel `½(ψ(g) + ψ(h) − ψ(g⁻¹h))`.
    pub fn gromov_kernel(&self) -> DMatrix<f64> {
        let g = &self.group;
        DMatrix::from_fn(g.order(), g.order(), |a, b| {
            0.5 * (self.values[a] + self.values[b] - self.values[g.mul(g.inv(a), b)])
        })
    }
}

/// Affine representation `(α, b)` on `ℝ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    dim: usize,
    b: Vec<DVector<f64>>,
    alpha: Vec<DMatrix<f64>>,
}

impl Cocycle {
    pub fn new(group: Arc<FiniteGroup>, b: Vec<DVector<f64>>, alpha: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = group.order();
        if b.len() != n || alpha.len() != n {
            return Err(Error::InvalidCocycle(format!(
                "need {n} vectors and matrices, got {} and {}",
                b.len(),
                alpha.len()
            )));
        }
        let dim = b.first().map_or(0, |v| v.len());
        if b.iter().any(|v| v.len() != dim) || alpha.iter().any(|a| a.shape() != (dim, dim)) {
            return Err(Error::InvalidCocycle("inconsistent dimensions".into()));
        }
        let cocycle = Self {
            group,
            dim,
            b,
            alpha,
        };
        cocycle.validate()?;
        Ok(cocycle)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        let scale = 1.0 + self.b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if self.b[g.identity()].norm() > COCYCLE_TOL * scale {
            return Err(Error::InvalidCocycle("b(e) must vanish".into()));
        }
        let eye = DMatrix::<f64>::identity(self.dim, self.dim);
        for (k, a) in self.alpha.iter().enumerate() {
            let defect = (a.transpose() * a - &eye).amax();
            if defect > COCYCLE_TOL {
                return Err(Error::InvalidCocycle(format!(
                    "alpha[{k}] is not orthogonal (defect {defect:.3e})"
                )));
            }
        }
        let defect = self.law_defect();
        if defect > COCYCLE_TOL * scale {
            return Err(Error::InvalidCocycle(format!(
                "cocycle law fails (defect {defect:.3e})"
            )));
        }
        Ok(())
    }

    /// `max_{g,h} ‖b(gh) − α_g b(h) − b(g)‖`.
    pub fn law_defect(&self) -> f64 {
        let g = &self.group;
        let mut worst = 0.0f64;
        for a in 0..g.order() {
            for c in 0..g.order() {
                let lhs = &self.b[g.mul(a, c)];
                let rhs = &self.alpha[a] * &self.b[c] + &self.b[a];
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn b(&self, g: usize) -> &DVector<f64> {
        &self.b[g]
    }

    pub fn alpha(&self, g: usize) -> &DMatrix<f64> {
        &self.alpha[g]
    }

    /// `ψ(g) = ‖b(g)‖²`.
    pub fn length(&self) -> LengthFunction {
        let values = self.b.iter().map(|v| v.norm_squared()).collect();
        LengthFunction::new(self.group.clone(), values).expect("cocycle lengths are valid lengths")
    }

    /// Whether `b` is injective (distinct vectors for distinct elements).
    pub fn is_injective(&self, tol: f64) -> bool {
        let n = self.group.order();
        (0..n).all(|a| (a + 1..n).all(|c| (&self.b[a] - &self.b[c]).norm() > tol))
    }
}

/// `λ(g)δ_h = δ_{gh}` as a `|G|×|G|` permutation matrix with `τ = tr/|G|`.
pub fn left_regular(g: usize, group: &FiniteGroup) -> OperatorElement {
    let n = group.order();
    let mut m = CMatrix::zeros(n, n);
    for h in 0..n {
        m[(group.mul(g, h), h)] = ONE;
    }
    OperatorElement::new(m, 1.0 / n as f64).expect("valid permutation matrix")
}

/// `Σ_g f̂(g) λ(g)`; entry `(x, y)` equals `f̂(x y⁻¹)`.
pub fn synthesize(coefficients: &[C64], group: &FiniteGroup) -> OperatorElement {
    let n = group.order();
    assert_eq!(coefficients.len(), n, "one coefficient per group element");
    let m = CMatrix::from_fn(n, n, |x, y| coefficients[group.mul(x, group.inv(y))]);
    OperatorElement::new(m, 1.0 / n as f64).expect("valid group algebra element")
}

/// Raw projection `f̂(g) = τ_G(f λ(g⁻¹)) = |G|⁻¹ Σ_h f_{gh,h}` without a membership check.
pub fn project_coefficients(f: &OperatorElement, group: &FiniteGroup) -> Vec<C64> {
    let n = group.order();
    let m = f.matrix();
    (0..n)
        .map(|g| {
            let mut acc = ZERO;
            for h in 0..n {
                acc += m[(group.mul(g, h), h)];
            }
            acc / n as f64
        })
        .collect()
}

/// Fourier coefficients of a group-algebra element. Elements outside the
/// span of `{λ(g)}` are rejected when the reconstruction defect exceeds
/// `1e−9·(1+‖f‖∞)`.
pub fn fourier_coefficients(f: &OperatorElement, group: &FiniteGroup) -> Result<Vec<C64>> {
    if f.dim() != group.order() {
        return Err(Error::DimensionMismatch {
            expected: group.order(),
            got: f.dim(),
        });
    }
    let coefficients = project_coefficients(f, group);
    let defect = membership_defect(f, &coefficients, group);
    if defect.is_some() {
        let rebuilt = synthesize(&coefficients, group);
        let exact = schatten_norm(&(f - &rebuilt), SchattenExponent::Infinity);
        if exact > 1e-9 * (1.0 + f.norm_inf()) {
            return Err(Error::OutsideGroupAlgebra { defect: exact });
        }
    }
    Ok(coefficients)
}

/// Cheap Frobenius test; `None` means certainly inside the algebra.
pub(crate) fn membership_defect(f: &OperatorElement, coefficients: &[C64], group: &FiniteGroup) -> Option<f64> {
    let n = group.order();
    let m = f.matrix();
    let mut sq = 0.0;
    for x in 0..n {
        for y in 0..n {
            sq += (m[(x, y)] - coefficients[group.mul(x, group.inv(y))]).norm_sqr();
        }
    }
    let fro = sq.sqrt();
    let lower_norm = f.frobenius() / (n as f64).sqrt();
    if fro <= 1e-9 * (1.0 + lower_norm) {
        None
    } else {
        Some(fro)
    }
}

/// Verdict and certificate of conditional negativity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnCertificate {
    pub conditionally_negative: bool,
    /// Largest eigenvalue of `K = (ψ(g⁻¹h))` compressed to the sum-zero subspace.
    pub max_eigenvalue: f64,
}

pub fn conditionally_negative(psi: &LengthFunction) -> CnCertificate {
    conditionally_negative_with_tol(psi, CN_TOL)
}

pub fn conditionally_negative_with_tol(psi: &LengthFunction, tol: f64) -> CnCertificate {
    let n = psi.group().order();
    let k = psi.kernel(|v| v);
    let proj = DMatrix::<f64>::identity(n, n) - DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
    let compressed = &proj * k * &proj;
    let compressed = (&compressed + compressed.transpose()) * 0.5;
    let top = compressed
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 + psi.values().iter().copied().fold(0.0, f64::max);
    CnCertificate {
        conditionally_negative: top <= tol * scale,
        max_eigenvalue: top,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchoenbergReport {
    pub markovian: bool,
    /// Smallest eigenvalue of `(e^{−tψ(g⁻¹h)})` over the grid.
    pub worst_min_eigenvalue: f64,
    pub worst_t: f64,
}

/// Whether `(e^{−tψ(g⁻¹h)})_{g,h}` is PSD for every `t` in the grid.
pub fn schoenberg_check(psi: &LengthFunction, t_grid: &[f64]) -> SchoenbergReport {
    schoenberg_check_with_tol(psi, t_grid, CN_TOL)
}

pub fn schoenberg_check_with_tol(psi: &LengthFunction, t_grid: &[f64], tol: f64) -> SchoenbergReport {
    assert!(!t_grid.is_empty(), "t grid must be nonempty");
    let mut worst = (f64::INFINITY, t_grid[0]);
    for &t in t_grid {
        let kernel = psi.kernel(|v| (-t * v).exp());
        let low = kernel
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if low < worst.0 {
            worst = (low, t);
        }
    }
    SchoenbergReport {
        markovian: worst.0 >= -tol,
        worst_min_eigenvalue: worst.0,
        worst_t: worst.1,
    }
}

/// Smallest `δ` such that `ψ + δ(1_{g₀} + 1_{g₀⁻¹})` leaves the CN cone,
/// located by bisection on the eigenvalue certificate. `None` when no
/// violation appears up to `max_delta`.
pub fn cn_breaking_perturbation(psi: &LengthFunction, g0: usize, max_delta: f64, resolution: f64) -> Option<f64> {
    let fails = |d: f64| !conditionally_negative(&psi.perturbed(g0, d).expect("valid")).conditionally_negative;
    if fails(0.0) {
        return Some(0.0);
    }
    let mut hi = 1e-3_f64.max(resolution);
    while !fails(hi) {
        hi *= 2.0;
        if hi > max_delta {
            return None;
        }
    }
    let mut lo = 0.0;
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Factors a conditionally negative length into a cocycle.
pub fn cocycle_from_length(psi: &LengthFunction) -> Result<Cocycle> {
    let group = psi.group().clone();
    let n = group.order();
    let kernel = psi.gromov_kernel();
    let eig = kernel.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let low = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = 1.0 + psi.values().iter().copied().fold(0.0, f64::max);
    if low < -CN_TOL * scale * n as f64 {
        return Err(Error::NotConditionallyNegative { certificate: -low });
    }
    let keep: Vec<usize> = (0..n)
        .filter(|&k| top > 0.0 && eig.eigenvalues[k] > RANK_CUTOFF * top)
        .collect();
    let rank = keep.len();
    // B = diag(√λ) V_rᵀ; column g is b(g)
    let factor = DMatrix::from_fn(rank, n, |r, g| {
        let k = keep[r];
        eig.eigenvalues[k].sqrt() * eig.eigenvectors[(g, k)]
    });
    let b: Vec<DVector<f64>> = (0..n).map(|g| factor.column(g).into_owned()).collect();
    let mut alpha = Vec::with_capacity(n);
    for g in 0..n {
        // orthogonal Procrustes: Q minimizing ‖Q X − Y‖, X = [b(h)], Y = [b(gh) − b(g)]
        let y = DMatrix::from_fn(rank, n, |r, h| b[group.mul(g, h)][r] - b[g][r]);
        let q = if rank == 0 {
            DMatrix::zeros(0, 0)
        } else {
            let cross = &y * factor.transpose();
            let svd = cross.svd(true, true);
            let u = svd.u.ok_or(Error::Decomposition)?;
            let v_t = svd.v_t.ok_or(Error::Decomposition)?;
            u * v_t
        };
        alpha.push(q);
    }
    Cocycle::new(group, b, alpha)
}

/// Named builders for the models used throughout the crate.
#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinGroup {
    /// `ℤ_n` with `b(k) = (cos 2πk/n − 1, sin 2πk/n)` and rotations.
    CyclicPlanar { n: usize },
    /// `S_n` acting on `ℝⁿ` by permuting coordinates, `b(σ) = σx₀ − x₀`.
    SymmetricPermutation { n: usize, basepoint: Vec<f64> },
    /// `ℤ_n` with `ψ(k) = min(k, n − k)`; no cocycle attached.
    WordLengthCyclic { n: usize },
}

#[derive(Clone, Debug)]
pub struct GroupModel {
    pub group: Arc<FiniteGroup>,
    pub length: LengthFunction,
    pub cocycle: Option<Cocycle>,
}

impl BuiltinGroup {
    /// Parses `cyclic_planar:12`, `word_length_cyclic:8`,
    /// `symmetric_permutation:3` or `symmetric_permutation:3:1,2,3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let parse_n = |s: Option<&&str>| -> Result<usize> {
            s.ok_or_else(|| Error::Parse(format!("missing size in {spec:?}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("{spec:?}: {e}")))
        };
        match parts[0] {
            "cyclic_planar" => Ok(Self::CyclicPlanar { n: parse_n(parts.get(1))? }),
            "word_length_cyclic" => Ok(Self::WordLengthCyclic { n: parse_n(parts.get(1))? }),
            "symmetric_permutation" => {
                let n = parse_n(parts.get(1))?;
                let basepoint = match parts.get(2) {
                    Some(list) => list
                        .split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{spec:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?,
                    None => (1..=n).map(|k| k as f64).collect(),
                };
                Ok(Self::SymmetricPermutation { n, basepoint })
            }
            other => Err(Error::Parse(format!("unknown group builder {other:?}"))),
        }
    }

    pub fn build(&self, cap: usize) -> Result<GroupModel> {
        match self {
            Self::CyclicPlanar { n } => {
                let group = Arc::new(FiniteGroup::cyclic(*n));
                group.check_cap(cap)?;
                let theta = |k: usize| 2.0 * PI * k as f64 / *n as f64;
                let b = (0..*n)
                    .map(|k| DVector::from_vec(vec![theta(k).cos() - 1.0, theta(k).sin()]))
                    .collect();
                let alpha = (0..*n)
                    .map(|k| {
                        let (c, s) = (theta(k).cos(), theta(k).sin());
                        DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
                    })
                    .collect();
                let cocycle = Cocycle::new(group.clone(), b, alpha)?;
                Ok(GroupModel {
                    length: cocycle.length(),
                    group,
                    cocycle: Some(cocycle),
                })
            }
            Self::SymmetricPermutation { n, basepoint } => {
                if basepoint.len() != *n {
                    return Err(Error::InvalidCocycle(format!(
                        "basepoint has {} coordinates, expected {n}",
                        basepoint.len()
                    )));
                }
                let order: usize = (1..=*n).product();
                if order > cap {
                    return Err(Error::GroupTooLarge { order, cap });
                }
                let (group, perms) = FiniteGroup::symmetric(*n);
                let group = Arc::new(group);
                let x0 = DVector::from_column_slice(basepoint);
                let alpha: Vec<DMatrix<f64>> = perms
                    .iter()
                    .map(|s| {
                        let mut p = DMatrix::zeros(*n, *n);
                        for (i, &si) in s.iter().enumerate() {
                            p[(si, i)] = 1.0;
                        }
                        p
                    })
                    .collect();
                let b = alpha.iter().map(|p| p * &x0 - &x0).collect();
                let cocycle = Cocycle::new(group.clone(), b, alpha)?;
                Ok(GroupModel {
                    length: cocycle.length(),
                    group,
                    cocycle: Some(cocycle),
                })
            }
            Self::WordLengthCyclic { n } => {
                let group = Arc::new(FiniteGroup::cyclic(*n));
                group.check_cap(cap)?;
                let values = (0..*n).map(|k| k.min(n - k) as f64).collect();
                Ok(GroupModel {
                    length: LengthFunction::new(group.clone(), values)?,
                    group,
                    cocycle: None,
                })
            }
        }
    }
}

pub fn builtin_cocycles(builder: &BuiltinGroup) -> Result<GroupModel> {
    builder.build(DEFAULT_GROUP_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian_coefficients, Seeded};
    use approx::assert_relative_eq;

    fn planar(n: usize) -> GroupModel {
        builtin_cocycles(&BuiltinGroup::CyclicPlanar { n }).unwrap()
    }

    fn log_grid() -> Vec<f64> {
        (0..40).map(|k| 1e-3 * 10f64.powf(5.0 * k as f64 / 39.0)).collect()
    }

    #[test]
    fn cayley_validation() {
        assert!(FiniteGroup::from_cayley(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_cayley(vec![]).is_err());
        let z3 = FiniteGroup::cyclic(3);
        let parsed = FiniteGroup::parse(&z3.to_text()).unwrap();
        assert_eq!(parsed, z3);
        assert!(FiniteGroup::parse("2\n0 1\n").is_err());
        // Latin square but not associative: commutative loop of order 5
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_cayley(loop5).is_err());
    }

    #[test]
    fn symmetric_group_structure() {
        let (s3, perms) = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(perms[s3.identity()], vec![0, 1, 2]);
        for g in 0..6 {
            assert_eq!(s3.mul(g, s3.inv(g)), s3.identity());
        }
        let reparsed = FiniteGroup::from_cayley(
            (0..6).map(|g| (0..6).map(|h| s3.mul(g, h)).collect()).collect(),
        )
        .unwrap();
        assert_eq!(reparsed, s3);
    }

    #[test]
    fn left_regular_examples() {
        let z3 = FiniteGroup::cyclic(3);
        let id = left_regular(0, &z3);
        assert_eq!(id.matrix(), &CMatrix::identity(3, 3));
        let shift = left_regular(1, &z3);
        assert_eq!(shift.trace(), ZERO);
        let (s4, _) = FiniteGroup::symmetric(4);
        for g in 1..s4.order() {
            assert_eq!(left_regular(g, &s4).trace(), ZERO);
        }
        for g in 0..s4.order() {
            for h in 0..s4.order() {
                let prod = &left_regular(g, &s4) * &left_regular(h, &s4);
                assert_eq!(prod, left_regular(s4.mul(g, h), &s4));
            }
            assert_eq!(left_regular(g, &s4).adjoint(), left_regular(s4.inv(g), &s4));
        }
    }

    #[test]
    fn fourier_examples() {
        let (s3, _) = FiniteGroup::symmetric(3);
        for g0 in 0..6 {
            let c = fourier_coefficients(&left_regular(g0, &s3), &s3).unwrap();
            for (g, z) in c.iter().enumerate() {
                assert_eq!(*z, if g == g0 { ONE } else { ZERO });
            }
        }
        let c = fourier_coefficients(&OperatorElement::identity(6, 1.0 / 6.0), &s3).unwrap();
        assert_eq!(c[s3.identity()], ONE);

        let mut rng = Seeded::new(1).stream(0);
        let coeffs = gaussian_coefficients(6, &mut rng);
        let back = fourier_coefficients(&synthesize(&coeffs, &s3), &s3).unwrap();
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-10);
        }
        let outside = OperatorElement::matrix_unit(6, 0, 1, 1.0 / 6.0);
        assert!(matches!(
            fourier_coefficients(&outside, &s3),
            Err(Error::OutsideGroupAlgebra { .. })
        ));
    }

    #[test]
    fn cn_examples() {
        let z5 = Arc::new(FiniteGroup::cyclic(5));
        assert!(conditionally_negative(&LengthFunction::zero(z5.clone())).conditionally_negative);
        assert!(conditionally_negative(&LengthFunction::discrete(z5.clone())).conditionally_negative);
        for n in 2..10 {
            let m = planar(n);
            for k in 0..n {
                let expected = 4.0 * (PI * k as f64 / n as f64).sin().powi(2);
                assert_relative_eq!(m.length.get(k), expected, epsilon = 1e-12);
            }
            assert!(conditionally_negative(&m.length).conditionally_negative);
        }
    }

    #[test]
    fn schoenberg_agrees_with_cn_including_perturbations() {
        let grid = log_grid();
        let m = planar(6);
        assert!(schoenberg_check(&LengthFunction::zero(m.group.clone()), &grid).markovian);
        assert!(schoenberg_check(&m.length, &grid).markovian);
        let delta = cn_breaking_perturbation(&m.length, 1, 1e3, 1e-6).expect("threshold exists");
        for factor in [0.5, 0.9, 1.1, 2.0] {
            let p = m.length.perturbed(1, delta * factor).unwrap();
            let cn = conditionally_negative(&p).conditionally_negative;
            let sch = schoenberg_check(&p, &grid).markovian;
            assert_eq!(cn, factor < 1.0, "factor {factor}");
            assert_eq!(cn, sch, "factor {factor}");
        }
    }

    #[test]
    fn builtin_examples() {
        let m = planar(4);
        assert_relative_eq!(m.length.get(1), 2.0, epsilon = 1e-12);
        for n in 2..16 {
            assert!(planar(n).cocycle.unwrap().is_injective(1e-9));
        }
        let s3 = builtin_cocycles(&BuiltinGroup::SymmetricPermutation {
            n: 3,
            basepoint: vec![1.0, 2.0, 3.0],
        })
        .unwrap();
        // transposition (1 2) swaps the first two coordinates: lexicographic index 2 is [1,0,2]
        assert_relative_eq!(s3.length.get(2), 2.0, epsilon = 1e-12);
        let w = builtin_cocycles(&BuiltinGroup::WordLengthCyclic { n: 8 }).unwrap();
        assert_eq!(w.length.values(), &[0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0]);
        assert!(w.cocycle.is_none());
        assert!(matches!(
            BuiltinGroup::SymmetricPermutation { n: 7, basepoint: vec![0.0; 7] }.build(DEFAULT_GROUP_CAP),
            Err(Error::GroupTooLarge { order: 5040, .. })
        ));
        assert_eq!(
            BuiltinGroup::parse("symmetric_permutation:3").unwrap(),
            BuiltinGroup::SymmetricPermutation { n: 3, basepoint: vec![1.0, 2.0, 3.0] }
        );
    }

    #[test]
    fn cocycle_round_trips() {
        let z = LengthFunction::zero(Arc::new(FiniteGroup::cyclic(4)));
        let c = cocycle_from_length(&z).unwrap();
        assert_eq!(c.dim(), 0);

        for n in [3, 5, 8, 12] {
            let m = planar(n);
            let c = cocycle_from_length(&m.length).unwrap();
            assert_eq!(c.dim(), 2);
            for (a, b) in c.length().values().iter().zip(m.length.values()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        let s3 = builtin_cocycles(&BuiltinGroup::SymmetricPermutation {
            n: 3,
            basepoint: vec![1.0, 2.0, 3.0],
        })
        .unwrap();
        let c = cocycle_from_length(&s3.length).unwrap();
        assert!(c.dim() <= 3);
        for (a, b) in c.length().values().iter().zip(s3.length.values()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn cocycle_from_non_cn_fails() {
        let m = planar(6);
        let delta = cn_breaking_perturbation(&m.length, 1, 1e3, 1e-6).unwrap();
        let bad = m.length.perturbed(1, 2.0 * delta).unwrap();
        assert!(matches!(
            cocycle_from_length(&bad),
            Err(Error::NotConditionallyNegative { .. })
        ));
    }

    #[test]
    fn cocycle_invariants() {
        let s4 = builtin_cocycles(&BuiltinGroup::SymmetricPermutation {
            n: 4,
            basepoint: vec![0.3, -1.0, 2.0, 0.5],
        })
        .unwrap();
        let c = s4.cocycle.unwrap();
        let psi = c.length();
        let g = c.group();
        let gromov = psi.gromov_kernel();
        for a in 0..g.order() {
            assert_relative_eq!(psi.get(a), psi.get(g.inv(a)), epsilon = 1e-12);
            for h in 0..g.order() {
                assert!((c.b(a).dot(c.b(h)) - gromov[(a, h)]).abs() < 1e-9);
            }
        }
        assert_eq!(psi.get(g.identity()), 0.0);
    }

    #[test]
    fn word_length_bfs() {
        let z8 = FiniteGroup::cyclic(8);
        let w: Vec<usize> = z8.word_length(&[1]).into_iter().map(Option::unwrap).collect();
        assert_eq!(w, vec![0, 1, 2, 3, 4, 3, 2, 1]);
    }
}

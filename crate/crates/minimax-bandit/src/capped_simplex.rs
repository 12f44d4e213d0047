//! Geometry of the constraint sets.
//!
//! Three polytopes appear throughout the crate: the probability simplex, the
//! capped simplex (every coordinate bounded by a common cap, vertices are
//! uniform distributions over k-subsets), and its heterogeneous-cap
//! generalization. This module provides membership types, KL projection onto
//! a capped simplex (sort-based water filling for the saturation threshold),
//! the project-and-mix step used by the semi-bandit player, linear
//! maximization oracles, and desk-scale vertex enumeration for the
//! heterogeneous-cap polytope.
//!
//! All functions are pure; nothing here holds state.

use crate::error::{Error, Result};

/// Absolute tolerance for simplex and cap feasibility checks.
pub const SIMPLEX_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A probability vector: nonnegative entries summing to one within
/// [`SIMPLEX_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty probability vector".into()));
        }
        if values.iter().any(|x| !x.is_finite() || *x < -SIMPLEX_TOL) {
            return Err(Error::Infeasible(
                "probability vector has negative or non-finite entries".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Infeasible(format!(
                "probability vector sums to {sum}, not 1"
            )));
        }
        Ok(Self(values))
    }

    /// Normalize a nonnegative weight vector with positive total mass.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty weight vector".into()));
        }
        if weights.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Infeasible(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Infeasible("weights must have positive total mass".into()));
        }
        Ok(Self(weights.iter().map(|w| w / sum).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for ProbVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A probability vector constrained by a per-coordinate upper bound, together
/// with the set of coordinates sitting at the cap.
#[derive(Debug, Clone, PartialEq)]
pub struct CappedDistribution {
    values: ProbVector,
    cap: f64,
    /// Indices at the cap, sorted ascending.
    saturated: Vec<usize>,
}

impl CappedDistribution {
    pub fn values(&self) -> &ProbVector {
        &self.values
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn saturated(&self) -> &[usize] {
        &self.saturated
    }

    pub fn into_values(self) -> ProbVector {
        self.values
    }
}

impl std::ops::Deref for CappedDistribution {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Heterogeneous per-coordinate caps `alpha` with `k * alpha_i` a positive
/// integer no larger than `k` for every coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCaps {
    alpha: Vec<f64>,
    k: usize,
    /// Caps expressed in units of 1/k; each lies in 1..=k.
    units: Vec<u64>,
}

impl AlphaCaps {
    pub fn new(alpha: Vec<f64>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if alpha.is_empty() {
            return Err(Error::InvalidArgument("empty cap vector".into()));
        }
        let mut units = Vec::with_capacity(alpha.len());
        for (i, &a) in alpha.iter().enumerate() {
            if !a.is_finite() || !(0.0..=1.0 + SIMPLEX_TOL).contains(&a) {
                return Err(Error::InvalidArgument(format!(
                    "cap alpha[{i}]={a} outside [0, 1]"
                )));
            }
            let scaled = a * k as f64;
            let rounded = scaled.round();
            if (scaled - rounded).abs() > SIMPLEX_TOL {
                return Err(Error::InvalidArgument(format!(
                    "k*alpha[{i}]={scaled} is not an integer"
                )));
            }
            let u = rounded as u64;
            if u < 1 || u > k as u64 {
                return Err(Error::InvalidArgument(format!(
                    "k*alpha[{i}]={u} outside 1..=k"
                )));
            }
            units.push(u);
        }
        let total: u64 = units.iter().sum();
        if total < k as u64 {
            return Err(Error::Infeasible(
                "caps sum to less than one; the polytope is empty".into(),
            ));
        }
        Ok(Self { alpha, k, units })
    }

    /// The homogeneous caps alpha_i = 1/k, for which the polytope is the
    /// plain capped simplex.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; n], k)
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    fn cap_units(&self) -> &[u64] {
        &self.units
    }
}

/// An extreme point of one of the constraint polytopes, stored sparsely.
///
/// Entries are (index, value) pairs sorted by index with strictly positive
/// values summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    n: usize,
    entries: Vec<(usize, f64)>,
}

impl Vertex {
    pub fn new(n: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_unstable_by_key(|e| e.0);
        let mut sum = 0.0;
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument("duplicate vertex index".into()));
            }
        }
        for &(i, v) in &entries {
            if i >= n {
                return Err(Error::InvalidArgument(format!("vertex index {i} out of range")));
            }
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument("vertex values must be positive".into()));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Infeasible(format!("vertex sums to {sum}, not 1")));
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn dot(&self, losses: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * losses[i]).sum()
    }
}

// ---------------------------------------------------------------------------
// Cap parameter and saturation threshold
// ---------------------------------------------------------------------------

/// The pre-mix cap `(1/k - gamma/n) / (1 - gamma)`.
///
/// Capping at this value and then mixing with the uniform distribution at
/// rate `gamma` lands saturated coordinates exactly at 1/k, so the mixed
/// vector stays inside the capped simplex. Note the pre-mix cap is >= 1/k.
pub fn kappa(k: usize, gamma: f64, n: usize) -> Result<f64> {
    if k == 0 || n == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if !gamma.is_finite() || !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "gamma={gamma} outside [0, 1)"
        )));
    }
    Ok((1.0 / k as f64 - gamma / n as f64) / (1.0 - gamma))
}

fn validate_kappa(kappa: f64, n: usize) -> Result<()> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::InvalidArgument(format!("kappa={kappa} must be positive")));
    }
    if kappa * n as f64 < 1.0 - SIMPLEX_TOL {
        return Err(Error::Infeasible(format!(
            "kappa*n = {} < 1: the capped simplex is empty",
            kappa * n as f64
        )));
    }
    Ok(())
}

/// Saturation analysis behind the KL projection: returns `(alpha, J)` where
/// `J = {i : v_i >= alpha}` and `alpha` solves
/// `alpha / (|J|*alpha + sum_{i not in J} v_i) = kappa`.
///
/// Scan over saturation counts m on the descending sort: alpha_m =
/// kappa * S_m / (1 - kappa*m) with S_m the tail mass; stop at the first m
/// whose next value no longer exceeds alpha_m.
fn saturation_split(v: &[f64], kappa: f64) -> Result<(f64, Vec<usize>)> {
    let n = v.len();
    validate_kappa(kappa, n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));

    // tail[m] = sum of the n-m smallest values
    let mut tail = vec![0.0; n + 1];
    for m in (0..n).rev() {
        tail[m] = tail[m + 1] + v[order[m]];
    }

    let mut m = 0usize;
    loop {
        let denom = 1.0 - kappa * m as f64;
        if denom <= SIMPLEX_TOL || tail[m] <= 0.0 {
            return Err(Error::Infeasible(
                "saturation scan degenerated; input mass is too concentrated".into(),
            ));
        }
        let alpha = kappa * tail[m] / denom;
        if m == n || v[order[m]] <= alpha {
            let mut saturated: Vec<usize> =
                (0..n).filter(|&i| v[i] >= alpha).collect();
            saturated.sort_unstable();
            return Ok((alpha, saturated));
        }
        m += 1;
    }
}

/// The saturation threshold `alpha` for projecting `v` onto the simplex
/// capped at `kappa`, satisfying
/// `alpha / (sum_{v_i >= alpha} alpha + sum_{v_i < alpha} v_i) = kappa`.
pub fn find_alpha(v: &ProbVector, kappa: f64) -> Result<f64> {
    saturation_split(v, kappa).map(|(alpha, _)| alpha)
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

/// KL projection of a strictly positive probability vector onto the simplex
/// capped at `kappa`.
///
/// Saturated coordinates sit exactly at the cap; the rest are a common
/// positive multiple of the input (the KKT stationarity structure), which
/// the water-filling threshold realizes as `kappa/alpha`.
pub fn kl_project_capped(v: &ProbVector, kappa: f64) -> Result<CappedDistribution> {
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::Infeasible(
            "KL projection requires strictly positive entries".into(),
        ));
    }
    let (alpha, saturated) = saturation_split(v, kappa)?;
    let ratio = kappa / alpha;
    let mut out = vec![0.0; v.len()];
    for i in 0..v.len() {
        out[i] = ratio * v[i];
    }
    for &i in &saturated {
        out[i] = kappa;
    }
    Ok(CappedDistribution {
        values: ProbVector::new(out)?,
        cap: kappa,
        saturated,
    })
}

/// Project strictly positive weights onto the capped simplex and mix with the
/// uniform distribution in one step.
///
/// Output coordinates: exactly `1/k` on the saturated set, otherwise
/// `(1-gamma) * (kappa/alpha) * v_i + gamma/n`, which keeps every entry at
/// least `gamma/n` and the whole vector inside the capped simplex. Invariant
/// under positive rescaling of the weights.
pub fn mix_project(weights: &[f64], k: usize, gamma: f64) -> Result<CappedDistribution> {
    if weights.iter().any(|&x| !x.is_finite() || x <= 0.0) {
        return Err(Error::Infeasible(
            "projection weights must be finite and strictly positive".into(),
        ));
    }
    let n = weights.len();
    let kap = kappa(k, gamma, n)?;
    let v = ProbVector::normalized(weights)?;
    let (alpha, saturated) = saturation_split(&v, kap)?;
    let cap = 1.0 / k as f64;
    let scale = (1.0 - gamma) * kap / alpha;
    let floor = gamma / n as f64;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = scale * v[i] + floor;
    }
    for &i in &saturated {
        out[i] = cap;
    }
    Ok(CappedDistribution {
        values: ProbVector::new(out)?,
        cap,
        saturated,
    })
}

// ---------------------------------------------------------------------------
// Linear maximization oracles
// ---------------------------------------------------------------------------

/// Maximize `<losses, p>` over the capped simplex: the mean of the k largest
/// entries, attained at the vertex uniform on those indices. Ties broken by
/// lowest index.
pub fn linear_max_kset(losses: &[f64], k: usize) -> Result<(f64, Vertex)> {
    let n = losses.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if losses.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("losses must be finite".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| losses[b].total_cmp(&losses[a]).then(a.cmp(&b)));
    let weight = 1.0 / k as f64;
    let mut value = 0.0;
    let mut entries = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        value += losses[i];
        entries.push((i, weight));
    }
    Ok((value * weight, Vertex::new(n, entries)?))
}

/// Maximize `<losses, p>` over the heterogeneous-cap polytope by greedy fill:
/// spend cap mass on indices in decreasing loss order until the unit budget
/// is exhausted. The result is an extreme point (at most one coordinate
/// strictly between zero and its cap).
pub fn linear_max_alphaset(losses: &[f64], caps: &AlphaCaps) -> Result<(f64, Vertex)> {
    let n = losses.len();
    if caps.len() != n {
        return Err(Error::InvalidArgument(format!(
            "losses ({n}) and caps ({}) disagree on dimension",
            caps.len()
        )));
    }
    if losses.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("losses must be finite".into()));
    }
    let k = caps.k();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| losses[b].total_cmp(&losses[a]).then(a.cmp(&b)));
    let mut remaining = k as u64;
    let mut entries = Vec::new();
    let mut value = 0.0;
    for &i in &order {
        if remaining == 0 {
            break;
        }
        let take = caps.cap_units()[i].min(remaining);
        let p = take as f64 / k as f64;
        entries.push((i, p));
        value += p * losses[i];
        remaining -= take;
    }
    debug_assert_eq!(remaining, 0, "caps guarantee total capacity >= k");
    Ok((value, Vertex::new(n, entries)?))
}

/// Enumerate the extreme points of the heterogeneous-cap polytope.
///
/// Every extreme point is a set of cap-saturated coordinates plus at most
/// one coordinate strictly inside its cap, whose value the sum constraint
/// forces. Desk-scale only: rejects n > 12.
pub fn enumerate_vertices_alphaset(caps: &AlphaCaps) -> Result<Vec<Vertex>> {
    let n = caps.len();
    if n > 12 {
        return Err(Error::InvalidArgument(format!(
            "vertex enumeration is limited to n <= 12, got n={n}"
        )));
    }
    let k = caps.k() as u64;
    let units = caps.cap_units();
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u32..(1u32 << n) {
        let mut total = 0u64;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                total += units[i];
            }
        }
        if total > k {
            continue;
        }
        let base: Vec<u64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { units[i] } else { 0 })
            .collect();
        if total == k {
            seen.insert(base);
        } else {
            let rem = k - total;
            for i in 0..n {
                // remainder strictly inside (0, alpha_i)
                if mask >> i & 1 == 0 && rem < units[i] {
                    let mut u = base.clone();
                    u[i] = rem;
                    seen.insert(u);
                }
            }
        }
    }
    let kf = caps.k() as f64;
    seen.into_iter()
        .map(|u| {
            let entries: Vec<(usize, f64)> = u
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0)
                .map(|(i, &m)| (i, m as f64 / kf))
                .collect();
            Vertex::new(n, entries)
        })
        .collect()
}

/// The multiset representation of a heterogeneous-cap vertex: each support
/// index paired with its integer multiplicity `k * p_i`. Injective across
/// distinct vertices; multiplicities sum to k.
pub fn vertex_multiset(p: &Vertex, k: usize) -> Result<Vec<(usize, u64)>> {
    let mut out = Vec::with_capacity(p.support_size());
    let mut total = 0u64;
    for &(i, v) in p.entries() {
        let scaled = v * k as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidArgument(format!(
                "k*p[{i}]={scaled} is not an integer; not a vertex"
            )));
        }
        let m = rounded as u64;
        if m == 0 {
            return Err(Error::InvalidArgument(format!(
                "support index {i} carries zero multiplicity"
            )));
        }
        out.push((i, m));
        total += m;
    }
    if total != k as u64 {
        return Err(Error::Infeasible(format!(
            "multiplicities sum to {total}, expected k={k}"
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

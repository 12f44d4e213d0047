//! Randomized action selection for the bandit players.
//!
//! `dep_round` turns a point of the capped simplex into a random k-subset
//! whose inclusion marginals are exactly `k * p_i`, by pairwise rounding
//! steps that each make at least one coordinate integral. `categorical` is
//! the plain inverse-CDF draw used on the simplex.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::capped_simplex::{CappedDistribution, ProbVector, SIMPLEX_TOL};
use crate::error::{Error, Result};

/// Coordinates within this distance of 0 or 1 are snapped before the
/// pairwise-rounding loop, so floating-point residue cannot stall it.
const SNAP_TOL: f64 = 1e-12;

/// Seeded, splittable random stream. Identical seeds give bitwise-identical
/// draw sequences; distinct run indices give independent streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for a run index, without touching this stream's
    /// position.
    pub fn for_run(seed: u64, run: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run);
        Self { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Bernoulli draw with success probability `p`.
    pub fn flip(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// A set of exactly k distinct indices, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    indices: Vec<usize>,
}

impl ActionSet {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("action set has duplicate indices".into()));
        }
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidArgument("action set index out of range".into()));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// The vertex of the capped simplex this set corresponds to, as a dense
    /// vector with 1/k on the chosen indices.
    pub fn to_vertex_dense(&self, n: usize) -> Vec<f64> {
        let w = 1.0 / self.indices.len() as f64;
        let mut out = vec![0.0; n];
        for &i in &self.indices {
            out[i] = w;
        }
        out
    }
}

impl<'a> IntoIterator for &'a ActionSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

/// Sample k distinct indices with marginal inclusion probabilities exactly
/// `k * p_i`.
///
/// Each pairwise step is a martingale on the two lowest-indexed fractional
/// coordinates and drives at least one of them to 0 or 1, so the loop runs
/// at most n times. Deterministic pair selection keeps runs reproducible.
pub fn dep_round(k: usize, p: &CappedDistribution, rng: &mut RngStream) -> Result<ActionSet> {
    let n = p.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if (p.cap() - 1.0 / k as f64).abs() > SIMPLEX_TOL {
        return Err(Error::Infeasible(format!(
            "distribution cap {} does not match 1/k = {}",
            p.cap(),
            1.0 / k as f64
        )));
    }
    let mut q: Vec<f64> = p.iter().map(|&x| x * k as f64).collect();
    for (i, x) in q.iter_mut().enumerate() {
        if *x < -SIMPLEX_TOL * k as f64 || *x > 1.0 + SIMPLEX_TOL * k as f64 {
            return Err(Error::Infeasible(format!(
                "k*p[{i}]={x} outside [0, 1]; input not in the capped simplex"
            )));
        }
        if *x <= SNAP_TOL {
            *x = 0.0;
        } else if *x >= 1.0 - SNAP_TOL {
            *x = 1.0;
        }
    }

    // ascending queue of still-fractional coordinates
    let mut frac: std::collections::VecDeque<usize> =
        (0..n).filter(|&i| q[i] > 0.0 && q[i] < 1.0).collect();

    while frac.len() >= 2 {
        let i = frac[0];
        let j = frac[1];
        let up = (1.0 - q[i]).min(q[j]);
        let down = q[i].min(1.0 - q[j]);
        if rng.flip(down / (up + down)) {
            q[i] += up;
            q[j] -= up;
        } else {
            q[i] -= down;
            q[j] += down;
        }
        for &idx in &[i, j] {
            if q[idx] <= SNAP_TOL {
                q[idx] = 0.0;
            } else if q[idx] >= 1.0 - SNAP_TOL {
                q[idx] = 1.0;
            }
        }
        frac.retain(|&idx| q[idx] > 0.0 && q[idx] < 1.0);
    }
    // a single leftover fractional entry can only be roundoff: the total
    // mass k forces it to an integer
    if let Some(&i) = frac.front() {
        q[i] = q[i].round();
    }

    let chosen: Vec<usize> = (0..n).filter(|&i| q[i] == 1.0).collect();
    if chosen.len() != k {
        return Err(Error::Infeasible(format!(
            "rounding produced {} indices, expected {k}; input mass sums to {}",
            chosen.len(),
            p.iter().sum::<f64>() * k as f64
        )));
    }
    ActionSet::new(chosen, n)
}

/// Inverse-CDF draw from a probability vector: returns i with probability
/// `p_i`.
pub fn categorical(p: &ProbVector, rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

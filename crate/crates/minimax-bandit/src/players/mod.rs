//! The maximizing player over the constraint set, behind one interface the
//! game engine consumes: a semi-bandit on the capped simplex, a bandit on
//! the plain simplex, full-information follow-the-regularized-leader, and a
//! non-learning uniform baseline.

mod bounds;
mod exp3ix;
mod exp4mp;
mod ftrl;
mod uniform;

pub use bounds::{theorem_bound_rhs, BoundKind};
pub use exp3ix::{Exp3Ix, Exp3IxConfig};
pub use exp4mp::{Exp4Mp, Exp4MpConfig};
pub use ftrl::{FtrlCapped, FtrlConfig};
pub use uniform::UniformBaseline;

use crate::error::{Error, Result};
use crate::sampling::{ActionSet, RngStream};

/// Weights are rescaled by their maximum once it crosses this threshold;
/// projection and sampling are scale-invariant, so behavior is unchanged.
pub(crate) const WEIGHT_RENORM_THRESHOLD: f64 = 1e100;

/// Post-rescale floor keeping weights strictly positive. Only reachable when
/// the weight ratio spans ~300 decades, where the floored coordinate's
/// sampling mass is already indistinguishable from zero.
pub(crate) const WEIGHT_FLOOR: f64 = 1e-300;

pub(crate) fn renormalize_weights(weights: &mut [f64]) {
    let max = weights.iter().cloned().fold(0.0, f64::max);
    if max > WEIGHT_RENORM_THRESHOLD {
        for w in weights.iter_mut() {
            *w = (*w / max).max(WEIGHT_FLOOR);
        }
    }
}

pub(crate) fn validate_unit_losses(losses: &[f64]) -> Result<()> {
    for &l in losses {
        if !l.is_finite() || !(0.0..=1.0).contains(&l) {
            return Err(Error::InvalidArgument(format!(
                "loss {l} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

/// How much of the loss vector a player observes each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoMode {
    /// Observes one loss per round.
    Bandit,
    /// Observes the losses of its k chosen indices.
    SemiBandit { batch: usize },
    /// Observes the full loss vector.
    Full,
}

impl InfoMode {
    /// Data points the w-player must evaluate per round for this player.
    pub fn data_cost(&self, n: usize) -> u64 {
        match self {
            InfoMode::Bandit => 1,
            InfoMode::SemiBandit { batch } => *batch as u64,
            InfoMode::Full => n as u64,
        }
    }
}

/// The action component of a proposal.
#[derive(Debug, Clone, PartialEq)]
pub enum MaxAction {
    /// One simplex vertex (a single data point).
    Index(usize),
    /// A capped-simplex vertex: uniform over k distinct indices.
    Subset(ActionSet),
    /// Full information: the proposed distribution is itself the action.
    Distribution,
}

/// One round's output of the maximizing player.
#[derive(Debug, Clone)]
pub struct Proposal {
    /// The sampling distribution p_t, dense.
    pub distribution: Vec<f64>,
    /// Indices saturated at the cap (the estimator mask), ascending.
    pub saturated: Vec<usize>,
    pub action: MaxAction,
}

impl Proposal {
    /// The action as a dense point of the constraint set.
    pub fn action_dense(&self) -> Vec<f64> {
        match &self.action {
            MaxAction::Index(i) => {
                let mut v = vec![0.0; self.distribution.len()];
                v[*i] = 1.0;
                v
            }
            MaxAction::Subset(s) => s.to_vertex_dense(self.distribution.len()),
            MaxAction::Distribution => self.distribution.clone(),
        }
    }

    /// Indices whose losses the player (and the w-player) needs this round.
    pub fn observed_indices(&self, n: usize) -> Vec<usize> {
        match &self.action {
            MaxAction::Index(i) => vec![*i],
            MaxAction::Subset(s) => s.indices().to_vec(),
            MaxAction::Distribution => (0..n).collect(),
        }
    }

    /// Realized gain of the action against a full loss vector.
    pub fn gain(&self, losses: &[f64]) -> f64 {
        match &self.action {
            MaxAction::Index(i) => losses[*i],
            MaxAction::Subset(s) => {
                let k = s.len() as f64;
                s.indices().iter().map(|&i| losses[i]).sum::<f64>() / k
            }
            MaxAction::Distribution => self
                .distribution
                .iter()
                .zip(losses)
                .map(|(p, l)| p * l)
                .sum(),
        }
    }
}

/// Loss feedback matching the player's information mode. Losses align with
/// `observed_indices` of the proposal being answered.
#[derive(Debug, Clone)]
pub struct Feedback<'a> {
    pub indices: &'a [usize],
    pub losses: &'a [f64],
}

/// Interface between the game engine and the maximizing player.
pub trait MaxPlayer {
    fn info_mode(&self) -> InfoMode;
    fn dim(&self) -> usize;
    fn propose(&mut self, rng: &mut RngStream) -> Result<Proposal>;
    fn update(&mut self, feedback: &Feedback) -> Result<()>;
}

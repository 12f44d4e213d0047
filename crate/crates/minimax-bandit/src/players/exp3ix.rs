//! Bandit player on the plain simplex: exponential weights with an
//! implicit-exploration gain estimator.
//!
//! The player maximizes, so the update is in gain form: the sampled index
//! has its weight multiplied by exp(eta * loss / (p_i + gamma)). The gamma
//! in the denominator biases the estimate downward
//! (E[estimate] = loss * p / (p + gamma)) and bounds its variance.

use crate::capped_simplex::ProbVector;
use crate::error::{Error, Result};
use crate::sampling::{categorical, RngStream};

use super::{
    renormalize_weights, validate_unit_losses, Feedback, InfoMode, MaxAction, MaxPlayer, Proposal,
};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Exp3IxConfig {
    pub n: usize,
    pub rounds: u64,
    pub eta: f64,
    pub gamma: f64,
}

impl Exp3IxConfig {
    /// `eta = 2 gamma = sqrt(2 log(n) / (n T))`.
    pub fn from_theorem(n: usize, rounds: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need n >= 2".into()));
        }
        if rounds == 0 {
            return Err(Error::InvalidArgument("need a positive round budget".into()));
        }
        let eta = (2.0 * (n as f64).ln() / (n as f64 * rounds as f64)).sqrt();
        Ok(Self {
            n,
            rounds,
            eta,
            gamma: eta / 2.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("empty index set".into()));
        }
        if !(self.eta > 0.0) || !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument("eta and gamma must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Exp3Ix {
    cfg: Exp3IxConfig,
    weights: Vec<f64>,
    round: u64,
    gain_estimates: Vec<f64>,
    last: Option<(Vec<f64>, usize)>,
}

impl Exp3Ix {
    pub fn new(cfg: Exp3IxConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            weights: vec![1.0; cfg.n],
            round: 0,
            gain_estimates: vec![0.0; cfg.n],
            cfg,
            last: None,
        })
    }

    pub fn config(&self) -> &Exp3IxConfig {
        &self.cfg
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn round(&self) -> u64 {
        self.round
    }
}

impl MaxPlayer for Exp3Ix {
    fn info_mode(&self) -> InfoMode {
        InfoMode::Bandit
    }

    fn dim(&self) -> usize {
        self.cfg.n
    }

    fn propose(&mut self, rng: &mut RngStream) -> Result<Proposal> {
        let p = ProbVector::normalized(&self.weights)?;
        let chosen = categorical(&p, rng);
        let distribution = p.into_vec();
        self.last = Some((distribution.clone(), chosen));
        Ok(Proposal {
            distribution,
            saturated: Vec::new(),
            action: MaxAction::Index(chosen),
        })
    }

    fn update(&mut self, feedback: &Feedback) -> Result<()> {
        let (distribution, chosen) = self
            .last
            .take()
            .ok_or_else(|| Error::InvalidArgument("update before propose".into()))?;
        if feedback.indices != [chosen] || feedback.losses.len() != 1 {
            return Err(Error::InvalidArgument(
                "bandit feedback must carry exactly the sampled index".into(),
            ));
        }
        validate_unit_losses(feedback.losses)?;
        let estimate = feedback.losses[0] / (distribution[chosen] + self.cfg.gamma);
        self.weights[chosen] *= (self.cfg.eta * estimate).exp();
        self.gain_estimates[chosen] += estimate;
        renormalize_weights(&mut self.weights);
        self.round += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_rate_matches_hand_value() {
        let cfg = Exp3IxConfig::from_theorem(100, 10_000).unwrap();
        assert!((cfg.eta - 3.0349e-3).abs() < 1e-6);
        assert!((cfg.gamma - cfg.eta / 2.0).abs() < 1e-18);
    }

    #[test]
    fn uniform_weights_give_uniform_distribution() {
        let mut player = Exp3Ix::new(Exp3IxConfig::from_theorem(8, 100).unwrap()).unwrap();
        let mut rng = RngStream::new(0);
        let proposal = player.propose(&mut rng).unwrap();
        for &p in &proposal.distribution {
            assert!((p - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_loss_leaves_weights_unchanged() {
        let mut player = Exp3Ix::new(Exp3IxConfig::from_theorem(5, 100).unwrap()).unwrap();
        let mut rng = RngStream::new(2);
        let proposal = player.propose(&mut rng).unwrap();
        let idx = proposal.observed_indices(5);
        let before = player.weights.clone();
        player
            .update(&Feedback {
                indices: &idx,
                losses: &[0.0],
            })
            .unwrap();
        assert_eq!(player.weights, before);
    }

    #[test]
    fn positive_loss_raises_only_the_sampled_weight() {
        let mut player = Exp3Ix::new(Exp3IxConfig::from_theorem(5, 100).unwrap()).unwrap();
        let mut rng = RngStream::new(7);
        let proposal = player.propose(&mut rng).unwrap();
        let idx = proposal.observed_indices(5);
        let i = idx[0];
        let before = player.weights.clone();
        player
            .update(&Feedback {
                indices: &idx,
                losses: &[0.8],
            })
            .unwrap();
        for j in 0..5 {
            if j == i {
                assert!(player.weights[j] > before[j]);
            } else {
                assert_eq!(player.weights[j], before[j]);
            }
        }
    }
}

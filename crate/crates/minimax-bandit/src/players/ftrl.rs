//! Full-information follow-the-regularized-leader on the capped simplex
//! with the entropic regularizer: each round plays the KL projection of the
//! softmax of the accumulated gain vector, guaranteeing regret at most
//! `2 sqrt(T log(n/k))` with the matching step size.

use crate::capped_simplex::{kl_project_capped, ProbVector};
use crate::error::{Error, Result};
use crate::sampling::RngStream;

use super::{validate_unit_losses, Feedback, InfoMode, MaxAction, MaxPlayer, Proposal};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FtrlConfig {
    pub n: usize,
    pub k: usize,
    pub rounds: u64,
    pub eta: f64,
}

impl FtrlConfig {
    /// `eta = sqrt(log(n/k) / T)`.
    pub fn from_theorem(n: usize, k: usize, rounds: u64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k <= n, got k={k}, n={n}"
            )));
        }
        if rounds == 0 {
            return Err(Error::InvalidArgument("need a positive round budget".into()));
        }
        let ratio = (n as f64 / k as f64).ln();
        // k = n collapses the set to a single point; any step size works
        let eta = if ratio > 0.0 {
            (ratio / rounds as f64).sqrt()
        } else {
            1.0
        };
        Ok(Self { n, k, rounds, eta })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidArgument("k out of range".into()));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidArgument("eta must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FtrlCapped {
    cfg: FtrlConfig,
    /// Cumulative gain vector.
    gains: Vec<f64>,
    round: u64,
}

impl FtrlCapped {
    pub fn new(cfg: FtrlConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            gains: vec![0.0; cfg.n],
            round: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &FtrlConfig {
        &self.cfg
    }

    pub fn cumulative_gains(&self) -> &[f64] {
        &self.gains
    }

    /// The leader distribution: KL projection onto the capped simplex of the
    /// softmax of eta times the cumulative gains.
    pub fn current_distribution(&self) -> Result<ProbVector> {
        let max = self.gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = self
            .gains
            .iter()
            .map(|g| (self.cfg.eta * (g - max)).exp())
            .collect();
        let v = ProbVector::normalized(&weights)?;
        let projected = kl_project_capped(&v, 1.0 / self.cfg.k as f64)?;
        Ok(projected.into_values())
    }
}

impl MaxPlayer for FtrlCapped {
    fn info_mode(&self) -> InfoMode {
        InfoMode::Full
    }

    fn dim(&self) -> usize {
        self.cfg.n
    }

    fn propose(&mut self, _rng: &mut RngStream) -> Result<Proposal> {
        let p = self.current_distribution()?;
        Ok(Proposal {
            distribution: p.into_vec(),
            saturated: Vec::new(),
            action: MaxAction::Distribution,
        })
    }

    fn update(&mut self, feedback: &Feedback) -> Result<()> {
        if feedback.indices.len() != self.cfg.n || feedback.losses.len() != self.cfg.n {
            return Err(Error::InvalidArgument(
                "full-information player expects the whole loss vector".into(),
            ));
        }
        validate_unit_losses(feedback.losses)?;
        for (g, &l) in self.gains.iter_mut().zip(feedback.losses) {
            *g += l;
        }
        self.round += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gains_play_uniform() {
        let player = FtrlCapped::new(FtrlConfig::from_theorem(6, 2, 100).unwrap()).unwrap();
        let p = player.current_distribution().unwrap();
        for &x in p.iter() {
            assert!((x - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_gain_is_capped_with_uniform_remainder() {
        let mut player = FtrlCapped::new(FtrlConfig {
            n: 4,
            k: 2,
            rounds: 100,
            eta: 1.0,
        })
        .unwrap();
        player.gains = vec![10.0, 0.0, 0.0, 0.0];
        let p = player.current_distribution().unwrap();
        assert!((p[0] - 0.5).abs() < 1e-9);
        for i in 1..4 {
            assert!((p[i] - 1.0 / 6.0).abs() < 1e-9, "p[{i}] = {}", p[i]);
        }
    }

    #[test]
    fn step_size_formula() {
        let cfg = FtrlConfig::from_theorem(569, 20, 17_575).unwrap();
        assert!((cfg.eta - 1.38e-2).abs() < 1e-4, "eta {}", cfg.eta);
    }

    #[test]
    fn realized_regret_respects_deterministic_bound_on_random_losses() {
        let (n, k, t) = (30usize, 3usize, 2000u64);
        let cfg = FtrlConfig::from_theorem(n, k, t).unwrap();
        let mut player = FtrlCapped::new(cfg).unwrap();
        let mut rng = RngStream::new(42);
        let idx: Vec<usize> = (0..n).collect();
        let mut cumulative = vec![0.0; n];
        let mut realized = 0.0;
        for _ in 0..t {
            let p = player.current_distribution().unwrap();
            let losses: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            realized += p.iter().zip(&losses).map(|(a, b)| a * b).sum::<f64>();
            for (c, &l) in cumulative.iter_mut().zip(&losses) {
                *c += l;
            }
            player
                .update(&Feedback {
                    indices: &idx,
                    losses: &losses,
                })
                .unwrap();
        }
        let (best, _) = crate::capped_simplex::linear_max_kset(&cumulative, k).unwrap();
        let regret = best - realized;
        let bound = 2.0 * (t as f64 * (n as f64 / k as f64).ln()).sqrt();
        assert!(regret <= bound, "regret {regret} vs bound {bound}");
    }
}

//! Non-learning baseline: plays the uniform distribution (the center of the
//! capped simplex) every round and ignores feedback.

use crate::error::{Error, Result};
use crate::sampling::RngStream;

use super::{Feedback, InfoMode, MaxAction, MaxPlayer, Proposal};

#[derive(Debug, Clone)]
pub struct UniformBaseline {
    n: usize,
}

impl UniformBaseline {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("empty index set".into()));
        }
        Ok(Self { n })
    }
}

impl MaxPlayer for UniformBaseline {
    fn info_mode(&self) -> InfoMode {
        InfoMode::Full
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn propose(&mut self, _rng: &mut RngStream) -> Result<Proposal> {
        Ok(Proposal {
            distribution: vec![1.0 / self.n as f64; self.n],
            saturated: Vec::new(),
            action: MaxAction::Distribution,
        })
    }

    fn update(&mut self, feedback: &Feedback) -> Result<()> {
        if feedback.losses.len() != self.n {
            return Err(Error::InvalidArgument(
                "full-information player expects the whole loss vector".into(),
            ));
        }
        Ok(())
    }
}

//! Solve the convex-linear min-max learning problem
//! `min_w max_{p in K} <L(w), p>` over capped simplexes by playing an online
//! gradient learner against a combinatorial semi-bandit (or full-information
//! follow-the-regularized-leader), with dual-gap certificates at the
//! averaged iterates and closed-form theorem bounds for empirical checks.

pub mod capped_simplex;
pub mod error;
pub mod game;
pub mod harness;
pub mod learner;
pub mod players;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};

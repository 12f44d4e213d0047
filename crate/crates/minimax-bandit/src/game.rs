//! The repeated game: alternate the maximizing player and the minimizing
//! learner, maintain averaged iterates, account data points and realized
//! gain, and certify convergence through the dual gap at the averages.

use std::time::Instant;

use crate::capped_simplex::linear_max_kset;
use crate::error::{Error, Result};
use crate::learner::{
    eval_losses, eval_losses_all, grad_weighted_loss, offline_min, ogd_update, Dataset,
    ModelParams, OfflineConfig, TaskKind, Targets,
};
use crate::players::{
    Exp3Ix, Exp3IxConfig, Exp4Mp, Exp4MpConfig, Feedback, FtrlCapped, FtrlConfig, MaxAction,
    MaxPlayer, Proposal, UniformBaseline,
};
use crate::sampling::RngStream;

/// Regret accounting evaluates all n losses every round; refuse instances
/// where that bookkeeping would dominate the run.
const REGRET_ACCOUNTING_CELL_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MethodKind {
    OlExp4Mp,
    OlFtrl,
    OlExp3Ix,
    UniformBaseline,
}

impl MethodKind {
    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::OlExp4Mp => "ol-exp4mp",
            MethodKind::OlFtrl => "ol-ftrl",
            MethodKind::OlExp3Ix => "ol-exp3ix",
            MethodKind::UniformBaseline => "uniform-baseline",
        }
    }

    /// Data points the w-player evaluates per round.
    pub fn data_cost_per_round(&self, n: usize, k: usize) -> u64 {
        match self {
            MethodKind::OlExp4Mp => k as u64,
            MethodKind::OlExp3Ix => 1,
            MethodKind::OlFtrl | MethodKind::UniformBaseline => n as u64,
        }
    }
}

impl std::str::FromStr for MethodKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ol-exp4mp" | "exp4mp" => Ok(MethodKind::OlExp4Mp),
            "ol-ftrl" | "ftrl" => Ok(MethodKind::OlFtrl),
            "ol-exp3ix" | "exp3ix" => Ok(MethodKind::OlExp3Ix),
            "uniform-baseline" | "uniform" => Ok(MethodKind::UniformBaseline),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// Exactly one of a data-point budget or a round budget; the other is
/// derived from the player's per-round cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Budget {
    DataPoints(u64),
    Rounds(u64),
}

impl Budget {
    pub fn rounds(&self, cost_per_round: u64) -> Result<u64> {
        let t = match self {
            Budget::Rounds(t) => *t,
            Budget::DataPoints(n) => {
                (*n as f64 / cost_per_round as f64).round() as u64
            }
        };
        if t == 0 {
            return Err(Error::InvalidArgument(
                "budget does not cover a single round".into(),
            ));
        }
        Ok(t)
    }
}

/// Optional replacements for the theorem-derived player parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParamOverrides {
    pub eta_p: Option<f64>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub eta_w: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub method: MethodKind,
    pub k: usize,
    pub budget: Budget,
    pub delta: f64,
    pub ball_radius: f64,
    pub seed: u64,
    /// Number of log-spaced checkpoints; `None` means ten per decade.
    pub checkpoints: Option<usize>,
    pub overrides: ParamOverrides,
    pub offline: OfflineConfig,
    /// Record per-round full loss vectors for exact regret accounting
    /// (small instances only).
    pub track_regret: bool,
}

impl GameConfig {
    pub fn new(method: MethodKind, k: usize, budget: Budget, delta: f64, seed: u64) -> Self {
        Self {
            method,
            k,
            budget,
            delta,
            ball_radius: 1.0,
            seed,
            checkpoints: None,
            overrides: ParamOverrides::default(),
            offline: OfflineConfig::default(),
            track_regret: false,
        }
    }
}

/// Log-spaced checkpoint rounds over 1..=t, deduplicated, ending at t.
pub fn checkpoint_rounds(t: u64, count: Option<usize>) -> Vec<u64> {
    let decades = (t as f64).log10().max(0.0);
    let count = count.unwrap_or_else(|| (decades * 10.0).ceil() as usize + 1).max(2);
    let mut rounds: Vec<u64> = (0..count)
        .map(|j| {
            let frac = j as f64 / (count - 1) as f64;
            (10f64.powf(frac * decades)).round().clamp(1.0, t as f64) as u64
        })
        .collect();
    rounds.push(t);
    rounds.sort_unstable();
    rounds.dedup();
    rounds
}

/// One evaluation of the dual gap and the task metric at the averages.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Checkpoint {
    pub round: u64,
    pub data_points: u64,
    /// Gap at (w_avg, action average): the certified quantity.
    pub dual_gap: f64,
    /// Gap at (w_avg, distribution average): lower-variance companion.
    pub dual_gap_dist: f64,
    pub max_side: f64,
    pub min_side: f64,
    pub min_converged: bool,
    /// Error bar on the min side (and therefore on the gap).
    pub gap_tolerance: f64,
    /// Accuracy for classification, mean of the k largest squared errors
    /// for regression, both at the averaged parameters.
    pub task_metric: f64,
    pub cumulative_gain: f64,
    pub w_avg: Vec<f64>,
    pub p_avg: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegretReport {
    /// Best fixed action in hindsight minus realized gain, in action units
    /// (inner products with vertices).
    pub p_regret: f64,
    /// The same in summed-loss units (k times the action-unit value), the
    /// scale of the semi-bandit regret bound.
    pub p_regret_sum: f64,
    pub w_regret: f64,
    pub best_hindsight_gain: f64,
    pub realized_gain: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GameTrace {
    pub method: MethodKind,
    pub n: usize,
    pub k: usize,
    pub rounds: u64,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    /// Last iterate, recorded for inspection; nothing is asserted about it.
    pub final_w: Vec<f64>,
    pub regret: Option<RegretReport>,
}

/// The result of a run: the deterministic trace plus wall-clock timings
/// (one per checkpoint), kept outside the trace so reproducibility claims
/// stay exact.
#[derive(Debug, Clone)]
pub struct GameRun {
    pub trace: GameTrace,
    pub checkpoint_elapsed_ms: Vec<u64>,
}

fn build_player(
    cfg: &GameConfig,
    n: usize,
    rounds: u64,
) -> Result<Box<dyn MaxPlayer>> {
    match cfg.method {
        MethodKind::OlExp4Mp => {
            let mut pc = Exp4MpConfig::from_theorem(n, cfg.k, rounds, cfg.delta)?;
            if let Some(g) = cfg.overrides.gamma {
                pc.gamma = g;
            }
            if let Some(e) = cfg.overrides.eta_p {
                pc.eta = e;
            }
            if let Some(c) = cfg.overrides.c {
                pc.c = c;
            }
            Ok(Box::new(Exp4Mp::new(pc)?))
        }
        MethodKind::OlExp3Ix => {
            if cfg.k != 1 {
                return Err(Error::InvalidArgument(
                    "the simplex bandit plays single indices; set k = 1".into(),
                ));
            }
            let mut pc = Exp3IxConfig::from_theorem(n, rounds)?;
            if let Some(e) = cfg.overrides.eta_p {
                pc.eta = e;
            }
            if let Some(g) = cfg.overrides.gamma {
                pc.gamma = g;
            }
            Ok(Box::new(Exp3Ix::new(pc)?))
        }
        MethodKind::OlFtrl => {
            let mut pc = FtrlConfig::from_theorem(n, cfg.k, rounds)?;
            if let Some(e) = cfg.overrides.eta_p {
                pc.eta = e;
            }
            Ok(Box::new(FtrlCapped::new(pc)?))
        }
        MethodKind::UniformBaseline => Ok(Box::new(UniformBaseline::new(n)?)),
    }
}

fn task_metric(params: &ModelParams, data: &Dataset, k: usize) -> Result<f64> {
    match data.targets() {
        Targets::Classes { labels, .. } => {
            let mut correct = 0usize;
            for i in 0..data.len() {
                let logits = params.raw_outputs(data.row(i));
                let pred = logits
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                    .map(|(c, _)| c)
                    .unwrap_or(0);
                if pred == labels[i] {
                    correct += 1;
                }
            }
            Ok(correct as f64 / data.len() as f64)
        }
        Targets::Regression(_) => {
            let losses = eval_losses_all(params, data);
            let (top_k_mean, _) = linear_max_kset(&losses, k)?;
            Ok(top_k_mean)
        }
    }
}

/// The dual gap at explicit points: exact linear maximization on one side,
/// the projected-gradient solver on the other. Returns
/// `(gap, max_side, min_side, converged)`.
pub fn dual_gap(
    w_bar: &ModelParams,
    p_prime: &[f64],
    data: &Dataset,
    k: usize,
    offline: OfflineConfig,
    warm: Option<&ModelParams>,
) -> Result<(f64, f64, f64, bool)> {
    let losses = eval_losses_all(w_bar, data);
    let (max_side, _) = linear_max_kset(&losses, k)?;
    let sol = offline_min(data, p_prime, w_bar.ball_radius(), offline, warm)?;
    Ok((max_side - sol.value, max_side, sol.value, sol.converged))
}

/// Run the full game and certify it.
pub fn run_game(cfg: &GameConfig, data: &Dataset) -> Result<GameRun> {
    let started = Instant::now();
    let n = data.len();
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::InvalidArgument(format!(
            "k={} out of range for n={n}",
            cfg.k
        )));
    }
    if !(0.0 < cfg.delta && cfg.delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta={} outside (0,1)",
            cfg.delta
        )));
    }
    let cost = cfg.method.data_cost_per_round(n, cfg.k);
    let rounds = cfg.budget.rounds(cost)?;
    if cfg.track_regret && n as u64 * rounds > REGRET_ACCOUNTING_CELL_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "regret accounting disabled for n*T = {} > {REGRET_ACCOUNTING_CELL_LIMIT}",
            n as u64 * rounds
        )));
    }

    let mut player = build_player(cfg, n, rounds)?;
    let mut rng = RngStream::for_run(cfg.seed, 0);
    let mut w = ModelParams::for_dataset(data, cfg.ball_radius)?;
    let eta_w = cfg
        .overrides
        .eta_w
        .unwrap_or_else(|| cfg.ball_radius.max(f64::MIN_POSITIVE) * (2.0 / rounds as f64).sqrt());

    let schedule = checkpoint_rounds(rounds, cfg.checkpoints);
    let mut next_checkpoint = 0usize;

    // running means, updated incrementally each round
    let mut w_avg = vec![0.0; w.dim()];
    let mut a_avg = vec![0.0; n];
    let mut p_avg = vec![0.0; n];
    let mut cumulative_gain = 0.0;
    let mut cumulative_losses = vec![0.0; n]; // only filled under track_regret

    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut elapsed = Vec::with_capacity(schedule.len());
    let mut warm_a: Option<ModelParams> = None;
    let mut warm_p: Option<ModelParams> = None;

    for t in 1..=rounds {
        let proposal = player.propose(&mut rng).map_err(|e| e.at_round(t))?;
        let observed = proposal.observed_indices(n);
        let losses = eval_losses(&w, data, &observed);
        let gain = realized_gain(&proposal, &observed, &losses);
        cumulative_gain += gain;

        if cfg.track_regret {
            if observed.len() == n {
                for (c, &l) in cumulative_losses.iter_mut().zip(&losses) {
                    *c += l;
                }
            } else {
                for (i, l) in eval_losses_all(&w, data).into_iter().enumerate() {
                    cumulative_losses[i] += l;
                }
            }
        }

        // averages include this round's iterates before anyone moves
        let inv_t = 1.0 / t as f64;
        for (avg, &x) in w_avg.iter_mut().zip(w.values()) {
            *avg += (x - *avg) * inv_t;
        }
        let action = proposal.action_dense();
        for i in 0..n {
            a_avg[i] += (action[i] - a_avg[i]) * inv_t;
            p_avg[i] += (proposal.distribution[i] - p_avg[i]) * inv_t;
        }

        player
            .update(&Feedback {
                indices: &observed,
                losses: &losses,
            })
            .map_err(|e| e.at_round(t))?;

        let grad_weights = gradient_weights(&proposal, &observed);
        let grad = grad_weighted_loss(&w, data, &observed, &grad_weights)
            .map_err(|e| e.at_round(t))?;
        ogd_update(&mut w, &grad, eta_w).map_err(|e| e.at_round(t))?;

        if next_checkpoint < schedule.len() && schedule[next_checkpoint] == t {
            next_checkpoint += 1;
            let w_bar = w.with_values(w_avg.clone())?;
            let losses_bar = eval_losses_all(&w_bar, data);
            let (max_side, _) = linear_max_kset(&losses_bar, cfg.k)?;
            let sol_a = offline_min(data, &a_avg, cfg.ball_radius, cfg.offline, warm_a.as_ref())?;
            let sol_p = offline_min(data, &p_avg, cfg.ball_radius, cfg.offline, warm_p.as_ref())?;
            let gap_tolerance = 2.0 * cfg.ball_radius * cfg.offline.tol;
            checkpoints.push(Checkpoint {
                round: t,
                data_points: t * cost,
                dual_gap: max_side - sol_a.value,
                dual_gap_dist: max_side - sol_p.value,
                max_side,
                min_side: sol_a.value,
                min_converged: sol_a.converged && sol_p.converged,
                gap_tolerance,
                task_metric: task_metric(&w_bar, data, cfg.k)?,
                cumulative_gain,
                w_avg: w_avg.clone(),
                p_avg: p_avg.clone(),
            });
            warm_a = Some(sol_a.params);
            warm_p = Some(sol_p.params);
            elapsed.push(started.elapsed().as_millis() as u64);
        }
    }

    let regret = if cfg.track_regret {
        let (best, _) = linear_max_kset(&cumulative_losses, cfg.k)?;
        let p_regret = best - cumulative_gain;
        let tight = OfflineConfig {
            budget: cfg.offline.budget.max(50_000),
            tol: cfg.offline.tol.min(1e-9),
        };
        let sol = offline_min(data, &a_avg, cfg.ball_radius, tight, warm_a.as_ref())?;
        Some(RegretReport {
            p_regret,
            p_regret_sum: p_regret * cfg.k as f64,
            w_regret: cumulative_gain - rounds as f64 * sol.value,
            best_hindsight_gain: best,
            realized_gain: cumulative_gain,
        })
    } else {
        None
    };

    Ok(GameRun {
        trace: GameTrace {
            method: cfg.method,
            n,
            k: cfg.k,
            rounds,
            seed: cfg.seed,
            checkpoints,
            final_w: w.values().to_vec(),
            regret,
        },
        checkpoint_elapsed_ms: elapsed,
    })
}

fn realized_gain(proposal: &Proposal, observed: &[usize], losses: &[f64]) -> f64 {
    match &proposal.action {
        MaxAction::Index(_) => losses[0],
        MaxAction::Subset(_) => losses.iter().sum::<f64>() / losses.len() as f64,
        MaxAction::Distribution => observed
            .iter()
            .zip(losses)
            .map(|(&i, &l)| proposal.distribution[i] * l)
            .sum(),
    }
}

/// Weights the w-player uses for its minibatch gradient: the action itself.
fn gradient_weights(proposal: &Proposal, observed: &[usize]) -> Vec<f64> {
    match &proposal.action {
        MaxAction::Index(_) | MaxAction::Subset(_) => {
            vec![1.0 / observed.len() as f64; observed.len()]
        }
        MaxAction::Distribution => observed.iter().map(|&i| proposal.distribution[i]).collect(),
    }
}

impl ModelParams {
    /// Same shape and ball, different coefficients (used to materialize the
    /// averaged iterate, which stays in the ball by convexity).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.dim() {
            return Err(Error::InvalidArgument("parameter dimension mismatch".into()));
        }
        let mut out = self.clone();
        out.set_values(values);
        Ok(out)
    }
}

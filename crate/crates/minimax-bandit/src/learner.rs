//! The minimizing player: linear regression (squared error) and softmax
//! logistic regression (cross-entropy), both with losses clipped to [0, 1],
//! online gradient descent over an L2 ball, and the full-batch projected
//! solver used by the dual-gap evaluator.

use crate::capped_simplex::SIMPLEX_TOL;
use crate::error::{Error, Result};

/// Losses are clipped at this ceiling so the bandit sees bounded feedback.
pub const LOSS_CEILING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TaskKind {
    Regression,
    Classification,
}

impl std::str::FromStr for TaskKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "regression" | "mse" => Ok(TaskKind::Regression),
            "classification" | "cel" => Ok(TaskKind::Classification),
            other => Err(Error::InvalidArgument(format!("unknown task kind '{other}'"))),
        }
    }
}

/// Training data with features in [0, 1] and, for regression, targets in
/// [0, 1].
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<f64>, // row-major, n * d
    n: usize,
    d: usize,
    targets: Targets,
}

#[derive(Debug, Clone)]
pub enum Targets {
    Regression(Vec<f64>),
    Classes { labels: Vec<usize>, count: usize },
}

impl Dataset {
    pub fn new(features: Vec<f64>, n: usize, d: usize, targets: Targets) -> Result<Self> {
        if features.len() != n * d || n == 0 || d == 0 {
            return Err(Error::Dataset(format!(
                "feature buffer of {} does not match n={n} x d={d}",
                features.len()
            )));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::Dataset("features contain non-finite values".into()));
        }
        match &targets {
            Targets::Regression(y) => {
                if y.len() != n {
                    return Err(Error::Dataset("target length mismatch".into()));
                }
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Dataset("targets contain non-finite values".into()));
                }
            }
            Targets::Classes { labels, count } => {
                if labels.len() != n {
                    return Err(Error::Dataset("label length mismatch".into()));
                }
                if *count < 2 {
                    return Err(Error::Dataset("need at least two classes".into()));
                }
                if labels.iter().any(|&c| c >= *count) {
                    return Err(Error::Dataset("class label out of range".into()));
                }
            }
        }
        Ok(Self { features, n, d, targets })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn task(&self) -> TaskKind {
        match self.targets {
            Targets::Regression(_) => TaskKind::Regression,
            Targets::Classes { .. } => TaskKind::Classification,
        }
    }

    pub fn classes(&self) -> usize {
        match &self.targets {
            Targets::Regression(_) => 1,
            Targets::Classes { count, .. } => *count,
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }
}

/// Model parameters constrained to an L2 ball of radius `ball_radius` on the
/// flattened vector (weights and biases together).
///
/// Layout: regression `[theta_0..theta_{d-1}, bias]`; classification
/// `[Theta row-major (classes x d), bias_0..bias_{C-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    values: Vec<f64>,
    d: usize,
    classes: usize, // 1 for regression
    ball_radius: f64,
}

impl ModelParams {
    pub fn zeros(task: TaskKind, d: usize, classes: usize, ball_radius: f64) -> Result<Self> {
        if !ball_radius.is_finite() || ball_radius < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ball radius {ball_radius} must be nonnegative"
            )));
        }
        let classes = match task {
            TaskKind::Regression => 1,
            TaskKind::Classification => {
                if classes < 2 {
                    return Err(Error::InvalidArgument("need at least two classes".into()));
                }
                classes
            }
        };
        Ok(Self {
            values: vec![0.0; classes * d + classes],
            d,
            classes,
            ball_radius,
        })
    }

    pub fn for_dataset(data: &Dataset, ball_radius: f64) -> Result<Self> {
        Self::zeros(data.task(), data.dim(), data.classes(), ball_radius)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn set_values(&mut self, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.values.len());
        self.values = values;
    }

    fn weight(&self, class: usize, feature: usize) -> f64 {
        self.values[class * self.d + feature]
    }

    fn bias(&self, class: usize) -> f64 {
        self.values[self.classes * self.d + class]
    }

    /// Raw linear outputs for one data row (a single value for regression,
    /// one logit per class otherwise).
    pub fn raw_outputs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.classes);
        for c in 0..self.classes {
            let mut z = self.bias(c);
            for (j, &xj) in x.iter().enumerate() {
                z += self.weight(c, j) * xj;
            }
            out.push(z);
        }
        out
    }

    /// Project back onto the ball by rescaling when the norm exceeds the
    /// radius.
    fn project_ball(&mut self) {
        let norm = self.norm();
        if norm > self.ball_radius {
            if self.ball_radius == 0.0 {
                self.values.iter_mut().for_each(|x| *x = 0.0);
            } else {
                let scale = self.ball_radius / norm;
                self.values.iter_mut().for_each(|x| *x *= scale);
            }
        }
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Unclipped loss of one data point.
fn raw_loss(params: &ModelParams, data: &Dataset, i: usize) -> f64 {
    let x = data.row(i);
    match data.targets() {
        Targets::Regression(y) => {
            let f = params.raw_outputs(x)[0];
            let r = f - y[i];
            r * r
        }
        Targets::Classes { labels, .. } => {
            let logits = params.raw_outputs(x);
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let log_sum: f64 = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln() + max;
            log_sum - logits[labels[i]]
        }
    }
}

/// Clipped per-point loss, always in [0, 1].
pub fn eval_loss(params: &ModelParams, data: &Dataset, i: usize) -> f64 {
    raw_loss(params, data, i).min(LOSS_CEILING)
}

/// Clipped losses at a set of indices.
pub fn eval_losses(params: &ModelParams, data: &Dataset, indices: &[usize]) -> Vec<f64> {
    indices.iter().map(|&i| eval_loss(params, data, i)).collect()
}

/// Clipped losses at every data point.
pub fn eval_losses_all(params: &ModelParams, data: &Dataset) -> Vec<f64> {
    (0..data.len()).map(|i| eval_loss(params, data, i)).collect()
}

/// Gradient of `sum_i weights_i * loss_i(params)` in the flattened layout.
///
/// Points where the clip binds (raw loss at or above the ceiling)
/// contribute a zero subgradient.
pub fn grad_weighted_loss(
    params: &ModelParams,
    data: &Dataset,
    indices: &[usize],
    weights: &[f64],
) -> Result<Vec<f64>> {
    if indices.len() != weights.len() {
        return Err(Error::InvalidArgument(
            "indices and weights must align".into(),
        ));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    let mut grad = vec![0.0; params.dim()];
    let d = data.dim();
    for (&i, &w) in indices.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        if raw_loss(params, data, i) >= LOSS_CEILING {
            continue;
        }
        let x = data.row(i);
        match data.targets() {
            Targets::Regression(y) => {
                let f = params.raw_outputs(x)[0];
                let g = w * 2.0 * (f - y[i]);
                for j in 0..d {
                    grad[j] += g * x[j];
                }
                grad[d] += g;
            }
            Targets::Classes { labels, .. } => {
                let probs = softmax(&params.raw_outputs(x));
                let classes = probs.len();
                for (c, &pc) in probs.iter().enumerate() {
                    let residual = pc - if labels[i] == c { 1.0 } else { 0.0 };
                    let g = w * residual;
                    for j in 0..d {
                        grad[c * d + j] += g * x[j];
                    }
                    grad[classes * d + c] += g;
                }
            }
        }
    }
    Ok(grad)
}

/// One projected gradient step: move against the gradient, then rescale back
/// onto the ball if needed.
pub fn ogd_update(params: &mut ModelParams, gradient: &[f64], eta: f64) -> Result<()> {
    if gradient.len() != params.dim() {
        return Err(Error::InvalidArgument("gradient dimension mismatch".into()));
    }
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidArgument(format!("step size {eta} must be positive")));
    }
    for (p, g) in params.values.iter_mut().zip(gradient) {
        *p -= eta * g;
    }
    params.project_ball();
    Ok(())
}

/// Configuration of the full-batch solver behind the dual gap's min side.
#[derive(Debug, Clone, Copy)]
pub struct OfflineConfig {
    pub budget: usize,
    /// Stop when the gradient-mapping norm drops below this.
    pub tol: f64,
}

impl Default for OfflineConfig {
    fn default() -> Self {
        Self {
            budget: 100_000,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OfflineSolution {
    pub params: ModelParams,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn weighted_objective(params: &ModelParams, data: &Dataset, p_bar: &[f64]) -> f64 {
    (0..data.len())
        .map(|i| p_bar[i] * eval_loss(params, data, i))
        .sum()
}

/// Largest eigenvalue of `sum_i w_i x~_i x~_i^T` (features with a trailing
/// 1 for the bias) by power iteration; this bounds the smoothness of the
/// weighted objective up to the loss-specific curvature factor.
fn weighted_gram_lambda_max(data: &Dataset, p_bar: &[f64]) -> f64 {
    let d = data.dim() + 1;
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut lambda = 0.0;
    for _ in 0..40 {
        let mut mv = vec![0.0; d];
        for i in 0..data.len() {
            let w = p_bar[i];
            if w == 0.0 {
                continue;
            }
            let x = data.row(i);
            let mut dot = v[d - 1];
            for j in 0..x.len() {
                dot += x[j] * v[j];
            }
            let wd = w * dot;
            for j in 0..x.len() {
                mv[j] += wd * x[j];
            }
            mv[d - 1] += wd;
        }
        let norm = mv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-300 {
            return 0.0;
        }
        lambda = norm;
        for (a, b) in v.iter_mut().zip(&mv) {
            *a = b / norm;
        }
    }
    lambda
}

/// Minimize the weighted clipped loss over the ball by projected gradient
/// descent with a 1/L step, L from power iteration.
///
/// On budget exhaustion the achieved value is still returned (it upper
/// bounds the true minimum) with `converged = false`.
pub fn offline_min(
    data: &Dataset,
    p_bar: &[f64],
    ball_radius: f64,
    cfg: OfflineConfig,
    warm_start: Option<&ModelParams>,
) -> Result<OfflineSolution> {
    if p_bar.len() != data.len() {
        return Err(Error::InvalidArgument(
            "weight vector does not match dataset size".into(),
        ));
    }
    let total: f64 = p_bar.iter().sum();
    if p_bar.iter().any(|&w| !w.is_finite() || w < -SIMPLEX_TOL) || (total - 1.0).abs() > 1e-6 {
        return Err(Error::Infeasible("p_bar must be a probability vector".into()));
    }
    let mut params = match warm_start {
        Some(w) => {
            let mut w = w.clone();
            w.ball_radius = ball_radius;
            w.project_ball();
            w
        }
        None => ModelParams::for_dataset(data, ball_radius)?,
    };
    if ball_radius == 0.0 {
        let value = weighted_objective(&params, data, p_bar);
        return Ok(OfflineSolution {
            params,
            value,
            converged: true,
            iterations: 0,
        });
    }

    let lambda = weighted_gram_lambda_max(data, p_bar);
    let curvature = match data.task() {
        TaskKind::Regression => 2.0,
        TaskKind::Classification => 0.5,
    };
    let lipschitz = (curvature * lambda).max(1e-12);
    let step = 1.0 / lipschitz;

    let all: Vec<usize> = (0..data.len()).collect();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..cfg.budget {
        iterations = it + 1;
        let grad = grad_weighted_loss(&params, data, &all, p_bar)?;
        let mut next = params.clone();
        for (p, g) in next.values.iter_mut().zip(&grad) {
            *p -= step * g;
        }
        next.project_ball();
        let gm: f64 = params
            .values
            .iter()
            .zip(&next.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / step;
        params = next;
        if gm <= cfg.tol {
            converged = true;
            break;
        }
    }
    let value = weighted_objective(&params, data, p_bar);
    Ok(OfflineSolution {
        params,
        value,
        converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RngStream;
    use proptest::prelude::*;

    fn toy_regression() -> Dataset {
        // y = 0 everywhere: zero parameters fit exactly
        Dataset::new(vec![0.2, 0.8, 0.5, 0.1, 0.9, 0.4], 3, 2, Targets::Regression(vec![0.0; 3]))
            .unwrap()
    }

    fn random_dataset(task: TaskKind, n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = RngStream::new(seed);
        let features: Vec<f64> = (0..n * d).map(|_| rng.uniform()).collect();
        let targets = match task {
            TaskKind::Regression => Targets::Regression((0..n).map(|_| rng.uniform()).collect()),
            TaskKind::Classification => Targets::Classes {
                labels: (0..n).map(|_| (rng.uniform() * 3.0) as usize).collect(),
                count: 3,
            },
        };
        Dataset::new(features, n, d, targets).unwrap()
    }

    fn random_params(data: &Dataset, b: f64, seed: u64) -> ModelParams {
        let mut params = ModelParams::for_dataset(data, b).unwrap();
        let mut rng = RngStream::new(seed);
        for v in params.values.iter_mut() {
            *v = rng.uniform() * 2.0 - 1.0;
        }
        params.project_ball();
        params
    }

    #[test]
    fn zero_params_zero_targets_give_zero_loss() {
        let data = toy_regression();
        let params = ModelParams::for_dataset(&data, 1.0).unwrap();
        for l in eval_losses_all(&params, &data) {
            assert_eq!(l, 0.0);
        }
    }

    #[test]
    fn mse_arithmetic() {
        // f(x) = 0.3 via bias, y = 0.8 -> (0.5)^2
        let data =
            Dataset::new(vec![0.0], 1, 1, Targets::Regression(vec![0.8])).unwrap();
        let mut params = ModelParams::for_dataset(&data, 1.0).unwrap();
        params.values[1] = 0.3;
        assert!((eval_loss(&params, &data, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn large_cross_entropy_is_clipped() {
        let data = Dataset::new(
            vec![1.0],
            1,
            1,
            Targets::Classes { labels: vec![0], count: 2 },
        )
        .unwrap();
        let mut params = ModelParams::for_dataset(&data, 10.0).unwrap();
        // logit strongly favors the wrong class
        params.values[1] = 5.0; // Theta[1][0]
        let raw = raw_loss(&params, &data, 0);
        assert!(raw > 1.0);
        assert_eq!(eval_loss(&params, &data, 0), 1.0);
    }

    #[test]
    fn gradient_single_point_arithmetic() {
        // regression, x = (1, 0), f = 0.5 via bias, y = 0 -> d/dtheta = (1, 0), d/db = 1
        let data =
            Dataset::new(vec![1.0, 0.0], 1, 2, Targets::Regression(vec![0.0])).unwrap();
        let mut params = ModelParams::for_dataset(&data, 1.0).unwrap();
        params.values[2] = 0.5;
        let grad = grad_weighted_loss(&params, &data, &[0], &[1.0]).unwrap();
        assert!((grad[0] - 1.0).abs() < 1e-15);
        assert_eq!(grad[1], 0.0);
        assert!((grad[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weights_give_zero_gradient() {
        let data = random_dataset(TaskKind::Classification, 10, 4, 3);
        let params = random_params(&data, 1.0, 4);
        let idx: Vec<usize> = (0..10).collect();
        let grad = grad_weighted_loss(&params, &data, &idx, &vec![0.0; 10]).unwrap();
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    fn finite_difference_check(task: TaskKind, seed: u64) {
        let data = random_dataset(task, 12, 3, seed);
        // small radius keeps losses below the clip for most probes
        let params = random_params(&data, 0.6, seed ^ 0xABCD);
        let idx: Vec<usize> = (0..data.len()).collect();
        let weights: Vec<f64> = vec![1.0 / data.len() as f64; data.len()];
        // skip probes where any point is clipped; the subgradient is 0 there
        if idx.iter().any(|&i| raw_loss(&params, &data, i) >= LOSS_CEILING) {
            return;
        }
        let grad = grad_weighted_loss(&params, &data, &idx, &weights).unwrap();
        let h = 1e-6;
        let obj = |p: &ModelParams| -> f64 {
            idx.iter().map(|&i| weights[i] * raw_loss(p, &data, i)).sum()
        };
        for j in 0..params.dim() {
            let mut plus = params.clone();
            plus.values[j] += h;
            let mut minus = params.clone();
            minus.values[j] -= h;
            let fd = (obj(&plus) - obj(&minus)) / (2.0 * h);
            let denom = grad[j].abs().max(1e-3);
            assert!(
                (grad[j] - fd).abs() / denom < 1e-5,
                "coord {j}: analytic {} vs fd {fd}",
                grad[j]
            );
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..20 {
            finite_difference_check(TaskKind::Regression, seed);
            finite_difference_check(TaskKind::Classification, 1000 + seed);
        }
    }

    #[test]
    fn ogd_arithmetic_and_projection() {
        let data = toy_regression();
        let mut p = ModelParams::for_dataset(&data, 1.0).unwrap();
        // zero gradient leaves params unchanged
        let before = p.values.clone();
        ogd_update(&mut p, &vec![0.0; p.dim()], 0.5).unwrap();
        assert_eq!(p.values, before);

        // plain step: w = (0,0,0), g = (1,0,0), eta = 0.5 -> (-0.5, 0, 0)
        ogd_update(&mut p, &[1.0, 0.0, 0.0], 0.5).unwrap();
        assert!((p.values[0] + 0.5).abs() < 1e-15);

        // step past the boundary projects back onto the sphere
        let mut q = ModelParams::for_dataset(&data, 1.0).unwrap();
        q.values[0] = 0.9;
        ogd_update(&mut q, &[-1.0, 0.0, 0.0], 0.5).unwrap();
        assert!((q.values[0] - 1.0).abs() < 1e-15);
        assert!((q.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn offline_min_degenerate_ball_returns_loss_at_zero() {
        let data = random_dataset(TaskKind::Regression, 8, 2, 11);
        let p_bar = vec![1.0 / 8.0; 8];
        let zero = ModelParams::for_dataset(&data, 0.0).unwrap();
        let expect: f64 = (0..8).map(|i| p_bar[i] * eval_loss(&zero, &data, i)).sum();
        let sol = offline_min(&data, &p_bar, 0.0, OfflineConfig::default(), None).unwrap();
        assert!(sol.converged);
        assert!((sol.value - expect).abs() < 1e-15);
    }

    #[test]
    fn offline_min_reaches_zero_on_separable_instance() {
        // targets generated by a model inside the ball: minimum is zero
        let data = Dataset::new(
            vec![0.1, 0.5, 0.9, 0.3, 0.7, 0.2],
            3,
            2,
            Targets::Regression(vec![
                0.3 * 0.1 + 0.2 * 0.5,
                0.3 * 0.9 + 0.2 * 0.3,
                0.3 * 0.7 + 0.2 * 0.2,
            ]),
        )
        .unwrap();
        let p_bar = vec![1.0 / 3.0; 3];
        let sol =
            offline_min(&data, &p_bar, 1.0, OfflineConfig { budget: 50_000, tol: 1e-10 }, None)
                .unwrap();
        assert!(sol.value < 1e-12, "value {}", sol.value);
    }

    #[test]
    fn offline_min_agrees_with_long_budget_reference() {
        let data = random_dataset(TaskKind::Regression, 50, 3, 21);
        let mut rng = RngStream::new(77);
        let raw: Vec<f64> = (0..50).map(|_| rng.uniform() + 0.01).collect();
        let sum: f64 = raw.iter().sum();
        let p_bar: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        let quick = offline_min(
            &data,
            &p_bar,
            1.0,
            OfflineConfig { budget: 20_000, tol: 1e-9 },
            None,
        )
        .unwrap();
        let reference = offline_min(
            &data,
            &p_bar,
            1.0,
            OfflineConfig { budget: 1_000_000, tol: 1e-12 },
            None,
        )
        .unwrap();
        assert!((quick.value - reference.value).abs() < 1e-4);
    }

    #[test]
    fn offline_descent_is_monotone() {
        let data = random_dataset(TaskKind::Classification, 30, 4, 5);
        let p_bar = vec![1.0 / 30.0; 30];
        let all: Vec<usize> = (0..30).collect();
        let lambda = weighted_gram_lambda_max(&data, &p_bar);
        let step = 1.0 / (0.5 * lambda).max(1e-12);
        let mut params = ModelParams::for_dataset(&data, 1.0).unwrap();
        let mut last = weighted_objective(&params, &data, &p_bar);
        for _ in 0..200 {
            let grad = grad_weighted_loss(&params, &data, &all, &p_bar).unwrap();
            for (p, g) in params.values.iter_mut().zip(&grad) {
                *p -= step * g;
            }
            params.project_ball();
            let now = weighted_objective(&params, &data, &p_bar);
            assert!(now <= last + 1e-12, "{now} > {last}");
            last = now;
        }
    }

    #[test]
    fn ogd_regret_stays_below_the_ball_bound() {
        // fixed sequence of linear losses <g_t, w> in a 2-ball
        let b = 2.0;
        let t_rounds = 2000usize;
        let dim = 4usize;
        let mut rng = RngStream::new(13);
        let grads: Vec<Vec<f64>> = (0..t_rounds)
            .map(|_| (0..dim).map(|_| rng.uniform() * 2.0 - 1.0).collect())
            .collect();
        let lipschitz = grads
            .iter()
            .map(|g| g.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let eta = b / (lipschitz * (2.0 * t_rounds as f64).sqrt());
        let mut w = vec![0.0; dim];
        let mut realized = 0.0;
        let mut total = vec![0.0; dim];
        for g in &grads {
            realized += w.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
            for j in 0..dim {
                total[j] += g[j];
                w[j] -= eta * g[j];
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > b {
                w.iter_mut().for_each(|x| *x *= b / norm);
            }
        }
        let best = -b * total.iter().map(|x| x * x).sum::<f64>().sqrt();
        let regret = realized - best;
        assert!(regret <= b * lipschitz * (2.0 * t_rounds as f64).sqrt());
    }

    proptest! {
        #[test]
        fn losses_are_always_in_unit_interval(
            seed in any::<u64>(),
            scale in 0.1f64..50.0,
            classify in any::<bool>(),
        ) {
            let task = if classify { TaskKind::Classification } else { TaskKind::Regression };
            let data = random_dataset(task, 6, 3, seed);
            let mut params = random_params(&data, scale, seed ^ 99);
            params.project_ball();
            for l in eval_losses_all(&params, &data) {
                prop_assert!((0.0..=1.0).contains(&l));
            }
        }

        #[test]
        fn ball_feasibility_after_any_update_sequence(
            seed in any::<u64>(),
            steps in 1usize..40,
            eta in 1e-4f64..2.0,
            b in 0.0f64..3.0,
        ) {
            let data = random_dataset(TaskKind::Regression, 8, 3, seed);
            let mut params = ModelParams::for_dataset(&data, b).unwrap();
            let idx: Vec<usize> = (0..8).collect();
            let w = vec![1.0 / 8.0; 8];
            for _ in 0..steps {
                let grad = grad_weighted_loss(&params, &data, &idx, &w).unwrap();
                ogd_update(&mut params, &grad, eta).unwrap();
                prop_assert!(params.norm() <= b + 1e-9);
            }
        }
    }
}

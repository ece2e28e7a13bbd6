//! Online decision rules. Every rule is a pure function of the model and the
//! current queue state; ties go to the lowest index in enumeration order.
//!
//! Constraint terms use the queue increment `ŷ_l - c_l T̂`, so every rule is
//! consistent with the update `Q_l ← max[Q_l + y_l - c_l T, 0]`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lfp::{self, LfpError};
use crate::model::{ActionMeans, AttributeModel, AttributeSpec, EventSpec, TaskAction, TaskModel};
use crate::queues::QueueBank;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid controller config: {0}")]
    Config(String),
    #[error("queue bank has {got} queues, expected {expected}")]
    QueueCount { expected: usize, got: usize },
    #[error("event {0} has no admissible actions")]
    EmptyActions(usize),
    #[error("frame size is not constant across actions")]
    VariableFrame,
    #[error("noise is unbounded; no finite drift bound exists")]
    UnboundedNoise,
    #[error("bisection tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("non-finite decision input: {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Lfp(#[from] LfpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest class, then lowest mode, then smaller idle time.
    #[default]
    LowestIndex,
}

fn default_v() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    #[serde(default = "default_v")]
    pub v: f64,
    #[serde(default)]
    pub tie_break: TieBreak,
    /// Accept the first action within `C` of the exact minimum.
    #[serde(default)]
    pub additive_slack: f64,
    /// Flow-control weights `w_n`; empty means all ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_target: Option<f64>,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self::with_v(1.0)
    }
}

impl ControllerConfig {
    pub fn with_v(v: f64) -> Self {
        Self {
            v,
            tie_break: TieBreak::LowestIndex,
            additive_slack: 0.0,
            weights: Vec::new(),
            power_budget: None,
            rate_target: None,
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        if !(self.v.is_finite() && self.v >= 0.0) {
            return Err(ControlError::Config(format!(
                "V must be finite and non-negative, got {}",
                self.v
            )));
        }
        if !(self.additive_slack.is_finite() && self.additive_slack >= 0.0) {
            return Err(ControlError::Config(format!(
                "additive slack must be finite and non-negative, got {}",
                self.additive_slack
            )));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(ControlError::Config("weights must be positive".into()));
        }
        if let Some(p) = self.power_budget {
            if !(p.is_finite() && p > 0.0) {
                return Err(ControlError::Config(format!("power budget must be positive, got {p}")));
            }
        }
        if let Some(r) = self.rate_target {
            if !(r.is_finite() && r > 0.0) {
                return Err(ControlError::Config(format!("rate target must be positive, got {r}")));
            }
        }
        Ok(())
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.weights.get(n).copied().unwrap_or(1.0)
    }
}

/// Index of the first value within `slack` of the minimum.
fn pick(values: &[f64], slack: f64) -> Option<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if slack == 0.0 {
        return values.iter().position(|&v| v == min);
    }
    values.iter().position(|&v| v <= min + slack)
}

fn check_queues(bank: &QueueBank, expected: usize) -> Result<(), ControlError> {
    if bank.len() != expected {
        return Err(ControlError::QueueCount {
            expected,
            got: bank.len(),
        });
    }
    Ok(())
}

/// `0` when `V ê(c,m) - Q_c <= 0`, else `I_max`.
pub fn idle_choice(model: &TaskModel, class: usize, mode: usize, q_c: f64, cfg: &ControllerConfig) -> f64 {
    if cfg.v * model.mean_energy(class, mode) - q_c <= 0.0 {
        0.0
    } else {
        model.idle_max()
    }
}

/// Minimizes `(V ê(c,m) - Q_c) / (D̂(c,m) + idle(c,m))` over classes and modes.
pub fn task_schedule_decision(
    model: &TaskModel,
    bank: &QueueBank,
    cfg: &ControllerConfig,
) -> Result<TaskAction, ControlError> {
    check_queues(bank, model.num_classes())?;
    let modes = model.num_modes();
    let mut values = Vec::with_capacity(model.num_classes() * modes);
    let mut actions = Vec::with_capacity(values.capacity());
    for c in 1..=model.num_classes() {
        let q = bank.value(c - 1);
        for m in 1..=modes {
            let idle = idle_choice(model, c, m, q, cfg);
            values.push((cfg.v * model.mean_energy(c, m) - q) / (model.mean_duration(c, m) + idle));
            actions.push(TaskAction::new(c, m, idle));
        }
    }
    let i = pick(&values, cfg.additive_slack).ok_or(ControlError::NonFinite("task values"))?;
    Ok(actions[i])
}

fn constraint_term(attr: &AttributeModel, bank: &QueueBank, a: &ActionMeans) -> f64 {
    attr.bounds()
        .iter()
        .enumerate()
        .map(|(l, c)| bank.value(l) * (a.attributes[l + 1] - c * a.frame))
        .sum()
}

fn attribute_choice(
    attr: &AttributeModel,
    omega: usize,
    bank: &QueueBank,
    cfg: &ControllerConfig,
    value: impl Fn(&ActionMeans) -> f64,
) -> Result<usize, ControlError> {
    check_queues(bank, attr.num_constraints())?;
    let actions = attr.actions(omega);
    if actions.is_empty() {
        return Err(ControlError::EmptyActions(omega));
    }
    let values: Vec<f64> = actions.iter().map(value).collect();
    pick(&values, cfg.additive_slack).ok_or(ControlError::NonFinite("action values"))
}

/// Minimizes `[V ŷ_0 + Σ Q_l (ŷ_l - c_l T̂)] / T̂` over `A(ω)`.
pub fn general_ratio_decision(
    attr: &AttributeModel,
    omega: usize,
    bank: &QueueBank,
    cfg: &ControllerConfig,
) -> Result<usize, ControlError> {
    attribute_choice(attr, omega, bank, cfg, |a| {
        (cfg.v * a.attributes[0] + constraint_term(attr, bank, a)) / a.frame
    })
}

/// Admit everything from class `n` iff `Q_n <= V w_n`.
pub fn flow_control_decision(bank: &QueueBank, cfg: &ControllerConfig) -> Vec<f64> {
    (0..bank.len())
        .map(|n| {
            if bank.value(n) <= cfg.v * cfg.weight(n) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Minimizes `[Z ê(c,m,I) - Q_c] / (D̂(c,m) + I)` over `c ∈ {0..N}`, modes and
/// `I ∈ {0, I_max}`, with `Q_0 = 0`. Class 0 is only offered when the model
/// has a null class.
pub fn flow_task_decision(
    model: &TaskModel,
    bank: &QueueBank,
    z: f64,
    cfg: &ControllerConfig,
) -> Result<TaskAction, ControlError> {
    check_queues(bank, model.num_classes())?;
    if !z.is_finite() {
        return Err(ControlError::NonFinite("Z"));
    }
    let first = if model.has_null_class() { 0 } else { 1 };
    let mut values = Vec::new();
    let mut actions = Vec::new();
    for c in first..=model.num_classes() {
        let q = if c == 0 { 0.0 } else { bank.value(c - 1) };
        for m in 1..=model.num_modes() {
            for idle in model.idle_options() {
                let e = model.mean_frame_energy(c, m, idle);
                values.push((z * e - q) / (model.mean_duration(c, m) + idle));
                actions.push(TaskAction::new(c, m, idle));
            }
        }
    }
    let i = pick(&values, cfg.additive_slack).ok_or(ControlError::NonFinite("flow values"))?;
    Ok(actions[i])
}

/// Running ratio `θ = Σ y_0 / Σ T`, optionally over the last `W` frames.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThetaTracker {
    num: f64,
    den: f64,
    window: Option<usize>,
    recent: VecDeque<(f64, f64)>,
}

impl ThetaTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn windowed(window: usize) -> Self {
        Self {
            window: Some(window.max(1)),
            ..Self::default()
        }
    }

    pub fn window(&self) -> Option<usize> {
        self.window
    }

    pub fn theta(&self) -> f64 {
        if self.den > 0.0 {
            self.num / self.den
        } else {
            0.0
        }
    }

    pub fn numerator(&self) -> f64 {
        self.num
    }

    pub fn denominator(&self) -> f64 {
        self.den
    }

    pub fn update(&mut self, y0: f64, frame: f64) {
        self.num += y0;
        self.den += frame;
        if let Some(w) = self.window {
            self.recent.push_back((y0, frame));
            if self.recent.len() > w {
                self.recent.pop_front();
                // recompute to keep windowed sums free of cancellation drift
                self.num = self.recent.iter().map(|p| p.0).sum();
                self.den = self.recent.iter().map(|p| p.1).sum();
            }
        }
    }
}

/// Minimizes `V (ŷ_0 - θ T̂) + Σ Q_l (ŷ_l - c_l T̂)` over `A(ω)`.
pub fn algorithm2_decision(
    attr: &AttributeModel,
    omega: usize,
    bank: &QueueBank,
    theta: &ThetaTracker,
    cfg: &ControllerConfig,
) -> Result<usize, ControlError> {
    let th = theta.theta();
    if !th.is_finite() {
        return Err(ControlError::NonFinite("theta"));
    }
    attribute_choice(attr, omega, bank, cfg, |a| {
        cfg.v * (a.attributes[0] - th * a.frame) + constraint_term(attr, bank, a)
    })
}

/// Minimizes `V ŷ_0 + Σ Q_l (ŷ_l - c_l T̂)`; requires a constant frame size.
pub fn fixed_frame_decision(
    attr: &AttributeModel,
    omega: usize,
    bank: &QueueBank,
    cfg: &ControllerConfig,
) -> Result<usize, ControlError> {
    if attr.constant_frame().is_none() {
        return Err(ControlError::VariableFrame);
    }
    attribute_choice(attr, omega, bank, cfg, |a| {
        cfg.v * a.attributes[0] + constraint_term(attr, bank, a)
    })
}

/// One action per event, minimizing the ratio of expectations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioPolicy {
    pub actions: Vec<usize>,
    /// Ratio of expectations attained by `actions`.
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

const BISECTION_MAX_ITER: usize = 200;

/// Per-frame numerator `V ŷ_0 + Σ Q_l (ŷ_l - c_l T̂)` of one action.
pub fn frame_numerator(attr: &AttributeModel, bank: &QueueBank, cfg: &ControllerConfig, a: &ActionMeans) -> f64 {
    cfg.v * a.attributes[0] + constraint_term(attr, bank, a)
}

/// Expected numerator over expected frame for a deterministic policy.
pub fn policy_ratio(attr: &AttributeModel, bank: &QueueBank, cfg: &ControllerConfig, actions: &[usize]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (w, &a) in actions.iter().enumerate() {
        let p = attr.event(w).probability;
        let means = attr.action(w, a);
        num += p * frame_numerator(attr, bank, cfg, means);
        den += p * means.frame;
    }
    num / den
}

/// Bisection on `h`: `F(h) = Σ_ω p(ω) min_α [num(ω,α) - h T̂(ω,α)]` is
/// decreasing and crosses zero at the optimal ratio. The returned policy is the
/// per-event minimizer at the upper end of the final bracket.
pub fn algorithm1_policy(
    attr: &AttributeModel,
    bank: &QueueBank,
    cfg: &ControllerConfig,
    tol: f64,
) -> Result<RatioPolicy, ControlError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ControlError::Tolerance(tol));
    }
    check_queues(bank, attr.num_constraints())?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut tables = Vec::with_capacity(attr.num_events());
    for w in 0..attr.num_events() {
        let actions = attr.actions(w);
        if actions.is_empty() {
            return Err(ControlError::EmptyActions(w));
        }
        let row: Vec<(f64, f64)> = actions
            .iter()
            .map(|a| (frame_numerator(attr, bank, cfg, a), a.frame))
            .collect();
        for &(n, t) in &row {
            let r = n / t;
            if !r.is_finite() {
                return Err(ControlError::NonFinite("action ratio"));
            }
            lo = lo.min(r);
            hi = hi.max(r);
        }
        tables.push(row);
    }
    let minimizers = |h: f64| -> (Vec<usize>, f64) {
        let mut f = 0.0;
        let choice = tables
            .iter()
            .enumerate()
            .map(|(w, row)| {
                let vals: Vec<f64> = row.iter().map(|(n, t)| n - h * t).collect();
                let i = pick(&vals, 0.0).unwrap_or(0);
                f += attr.event(w).probability * vals[i];
                i
            })
            .collect();
        (choice, f)
    };
    let mut iterations = 0;
    while hi - lo > tol && iterations < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let (_, f) = minimizers(mid);
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let (actions, _) = minimizers(hi);
    let ratio = policy_ratio(attr, bank, cfg, &actions);
    Ok(RatioPolicy {
        actions,
        ratio,
        lower: lo,
        upper: hi,
        iterations,
    })
}

/// Unit-frame form: `T̂' = 1`, `ŷ'_0 = ŷ_0`, `ŷ'_l = ŷ_l - c_l T̂`, `c' = 0`.
pub fn unit_frame_transform(attr: &AttributeModel) -> AttributeModel {
    let bounds = attr.bounds();
    let events = attr
        .events()
        .iter()
        .map(|e| EventSpec {
            label: e.label.clone(),
            probability: e.probability,
            actions: e
                .actions
                .iter()
                .map(|a| {
                    let mut attributes = a.attributes.clone();
                    for (l, c) in bounds.iter().enumerate() {
                        attributes[l + 1] -= c * a.frame;
                    }
                    ActionMeans {
                        label: a.label.clone(),
                        frame: 1.0,
                        attributes,
                    }
                })
                .collect(),
        })
        .collect();
    AttributeModel::new(AttributeSpec {
        events,
        bounds: vec![0.0; bounds.len()],
    })
    .expect("transform preserves validity")
}

/// Conservative drift constant `B = ½ Σ_n max(λ_n (D_max + I_max), 1)²`.
pub fn compute_drift_bound(model: &TaskModel, rates: &[f64]) -> Result<f64, ControlError> {
    let d_max = model.max_duration().ok_or(ControlError::UnboundedNoise)?;
    let t_max = d_max + model.idle_max();
    Ok(0.5 * rates.iter().map(|l| (l * t_max).max(1.0).powi(2)).sum::<f64>())
}

/// Exact worst case `max_(c,m,I) ½ Σ_n (λ_n (D̂+I) - 1_n)²` for deterministic models.
pub fn tight_drift_bound(model: &TaskModel, rates: &[f64]) -> Result<f64, ControlError> {
    if !model.is_deterministic() {
        return Err(ControlError::UnboundedNoise);
    }
    let mut worst: f64 = 0.0;
    for c in 1..=model.num_classes() {
        for m in 1..=model.num_modes() {
            for idle in model.idle_options() {
                let t = model.mean_duration(c, m) + idle;
                let v = 0.5
                    * rates
                        .iter()
                        .enumerate()
                        .map(|(k, l)| {
                            let served = if k + 1 == c { 1.0 } else { 0.0 };
                            (l * t - served).powi(2)
                        })
                        .sum::<f64>();
                worst = worst.max(v);
            }
        }
    }
    Ok(worst)
}

/// `½ Σ_l max_(ω,α) (ŷ_l - c_l T̂)²` for models whose outcomes equal their means.
pub fn attribute_drift_bound(attr: &AttributeModel) -> f64 {
    let bounds = attr.bounds();
    0.5 * (0..bounds.len())
        .map(|l| {
            attr.events()
                .iter()
                .flat_map(|e| e.actions.iter())
                .map(|a| (a.attributes[l + 1] - bounds[l] * a.frame).powi(2))
                .fold(0.0, f64::max)
        })
        .sum::<f64>()
}

/// `max_(c,m,I) |power_opt (D̂ + I) - ê(c,m,I)|`.
pub fn beta_constant(model: &TaskModel, power_opt: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 1..=model.num_classes() {
        for m in 1..=model.num_modes() {
            for idle in model.idle_options() {
                let t = model.mean_duration(c, m) + idle;
                worst = worst.max((power_opt * t - model.mean_frame_energy(c, m, idle)).abs());
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisConstants {
    pub b: f64,
    pub beta: f64,
    pub power_opt: f64,
    pub duration_min: f64,
}

impl AnalysisConstants {
    pub fn for_task_model(model: &TaskModel, rates: &[f64]) -> Result<Self, ControlError> {
        let power_opt = lfp::stationary_policy_optimum(model, rates)?.power_opt;
        Ok(Self {
            b: compute_drift_bound(model, rates)?,
            beta: beta_constant(model, power_opt),
            power_opt,
            duration_min: model.duration_min(),
        })
    }

    /// `power_opt + B / (V D_min)`.
    pub fn power_bound(&self, v: f64) -> f64 {
        self.power_opt + self.b / (v * self.duration_min)
    }

    /// `sqrt(2 (B + V β) / K)`.
    pub fn gap_tolerance(&self, v: f64, frames: u64) -> f64 {
        (2.0 * (self.b + v * self.beta) / frames as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_task_model, NoiseTable, NullClassSpec, TaskSpec};
    use crate::queues::QueueBank;
    use proptest::prelude::*;

    fn one_class(rate: f64) -> TaskModel {
        build_task_model(&TaskSpec {
            mean_energy: vec![vec![1.0, 3.0]],
            mean_duration: vec![vec![7.0, 4.0]],
            idle_max: 10.0,
            duration_min: None,
            rates: vec![rate],
            modes: vec![],
            noise: NoiseTable::default(),
            null_class: None,
            idle_power: 0.0,
        })
        .unwrap()
    }

    fn ten_class(null: bool) -> TaskModel {
        build_task_model(&TaskSpec {
            mean_energy: (1..=10).map(|i| vec![i as f64, 2.0 * i as f64]).collect(),
            mean_duration: (1..=10).map(|i| vec![5.0 * i as f64, 3.0 * i as f64]).collect(),
            idle_max: 10.0,
            duration_min: None,
            rates: (1..=10).map(|i| 0.8 / (30.0 * i as f64)).collect(),
            modes: vec![],
            noise: NoiseTable::default(),
            null_class: null.then(NullClassSpec::default),
            idle_power: 0.0,
        })
        .unwrap()
    }

    fn two_actions(a: (f64, f64), b: (f64, f64)) -> AttributeModel {
        AttributeModel::new(AttributeSpec {
            events: vec![EventSpec {
                label: String::new(),
                probability: 1.0,
                actions: vec![
                    ActionMeans {
                        label: "a".into(),
                        frame: a.1,
                        attributes: vec![a.0],
                    },
                    ActionMeans {
                        label: "b".into(),
                        frame: b.1,
                        attributes: vec![b.0],
                    },
                ],
            }],
            bounds: vec![],
        })
        .unwrap()
    }

    #[test]
    fn idle_examples() {
        let m = one_class(0.2);
        let cfg = ControllerConfig::with_v(1.0);
        assert_eq!(idle_choice(&m, 1, 1, 0.0, &cfg), 10.0);
        assert_eq!(idle_choice(&m, 1, 1, 1.0, &cfg), 0.0);
        assert_eq!(idle_choice(&m, 1, 2, 0.0, &ControllerConfig::with_v(0.0)), 0.0);
    }

    #[test]
    fn task_schedule_examples() {
        let m = one_class(0.2);
        let cfg = ControllerConfig::with_v(1.0);
        let a = task_schedule_decision(&m, &QueueBank::zeros(1), &cfg).unwrap();
        assert_eq!(a, TaskAction::new(1, 1, 10.0));
        let a = task_schedule_decision(&m, &QueueBank::from_values(&[100.0]).unwrap(), &cfg).unwrap();
        assert_eq!(a, TaskAction::new(1, 2, 0.0));
        assert!(task_schedule_decision(&m, &QueueBank::zeros(2), &cfg).is_err());
    }

    #[test]
    fn flow_control_examples() {
        let cfg = ControllerConfig::with_v(100.0);
        let bank = QueueBank::from_values(&[50.0, 161.0, 100.0]).unwrap();
        assert_eq!(flow_control_decision(&bank, &cfg), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn flow_task_prefers_null_when_idle() {
        let m = ten_class(true);
        let cfg = ControllerConfig::with_v(1.0);
        let a = flow_task_decision(&m, &QueueBank::zeros(10), 2.0, &cfg).unwrap();
        assert_eq!(a.class, 0);
        let mut q = vec![0.0; 10];
        q[9] = 5.0;
        let a = flow_task_decision(&m, &QueueBank::from_values(&q).unwrap(), 0.0, &cfg).unwrap();
        assert_eq!(a.class, 10);
    }

    #[test]
    fn flow_task_matches_enumeration() {
        let m = ten_class(false);
        let q: Vec<f64> = (1..=10).map(|n| n as f64).collect();
        let bank = QueueBank::from_values(&q).unwrap();
        let a = flow_task_decision(&m, &bank, 1.0, &ControllerConfig::with_v(1.0)).unwrap();
        let mut best = (f64::INFINITY, TaskAction::new(0, 0, 0.0));
        for c in 1..=10 {
            for mode in 1..=2 {
                for idle in [0.0, 10.0] {
                    let v = (m.mean_energy(c, mode) - q[c - 1]) / (m.mean_duration(c, mode) + idle);
                    if v < best.0 {
                        best = (v, TaskAction::new(c, mode, idle));
                    }
                }
            }
        }
        assert_eq!(a, best.1);
    }

    #[test]
    fn general_rule_ties_go_first() {
        let attr = two_actions((1.0, 1.0), (2.0, 2.0));
        let a = general_ratio_decision(&attr, 0, &QueueBank::zeros(0), &ControllerConfig::with_v(1.0)).unwrap();
        assert_eq!(a, 0);
    }

    #[test]
    fn algorithm2_flips_at_indifference_point() {
        // θ* = (3 - 1)/(4 - 1) = 2/3
        let attr = two_actions((1.0, 1.0), (3.0, 4.0));
        let cfg = ControllerConfig::with_v(1.0);
        let bank = QueueBank::zeros(0);
        let mut below = ThetaTracker::new();
        below.update(0.6, 1.0);
        let mut above = ThetaTracker::new();
        above.update(0.7, 1.0);
        assert_eq!(algorithm2_decision(&attr, 0, &bank, &below, &cfg).unwrap(), 0);
        assert_eq!(algorithm2_decision(&attr, 0, &bank, &above, &cfg).unwrap(), 1);
        assert_eq!(
            algorithm2_decision(&attr, 0, &bank, &ThetaTracker::new(), &cfg).unwrap(),
            0
        );
    }

    #[test]
    fn fixed_frame_rejects_variable_frames() {
        let attr = two_actions((1.0, 1.0), (3.0, 4.0));
        let r = fixed_frame_decision(&attr, 0, &QueueBank::zeros(0), &ControllerConfig::default());
        assert_eq!(r, Err(ControlError::VariableFrame));
    }

    #[test]
    fn algorithm1_degenerate_cases() {
        let attr = AttributeModel::new(AttributeSpec {
            events: vec![EventSpec {
                label: String::new(),
                probability: 1.0,
                actions: vec![ActionMeans {
                    label: String::new(),
                    frame: 4.0,
                    attributes: vec![2.0, 1.0],
                }],
            }],
            bounds: vec![0.0],
        })
        .unwrap();
        let bank = QueueBank::from_values(&[3.0]).unwrap();
        let p = algorithm1_policy(&attr, &bank, &ControllerConfig::with_v(2.0), 1e-9).unwrap();
        assert_eq!(p.ratio, (2.0 * 2.0 + 3.0) / 4.0);
        assert!(algorithm1_policy(&attr, &bank, &ControllerConfig::default(), 0.0).is_err());

        let attr = two_actions((1.0, 1.0), (3.0, 4.0));
        let p = algorithm1_policy(&attr, &QueueBank::zeros(0), &ControllerConfig::default(), 1e-9).unwrap();
        assert!((p.ratio - 0.75).abs() < 1e-12);
    }

    #[test]
    fn theta_window() {
        let mut t = ThetaTracker::windowed(2);
        assert_eq!(t.theta(), 0.0);
        t.update(10.0, 1.0);
        t.update(1.0, 1.0);
        t.update(1.0, 1.0);
        assert_eq!(t.theta(), 1.0);
    }

    #[test]
    fn transform_is_idempotent_and_fixes_zero_bounds() {
        let attr = AttributeModel::new(AttributeSpec {
            events: vec![EventSpec {
                label: String::new(),
                probability: 1.0,
                actions: vec![
                    ActionMeans {
                        label: String::new(),
                        frame: 3.0,
                        attributes: vec![1.0, 3.0 - 5.0, 2.0],
                    },
                    ActionMeans {
                        label: String::new(),
                        frame: 6.0,
                        attributes: vec![4.0, 6.0 - 5.0, 1.0],
                    },
                ],
            }],
            bounds: vec![0.0, 0.5],
        })
        .unwrap();
        let once = unit_frame_transform(&attr);
        assert_eq!(once.action(0, 0).attributes, vec![1.0, -2.0, 0.5]);
        assert_eq!(once.action(0, 1).attributes, vec![4.0, 1.0, -2.0]);
        assert!(once.bounds().iter().all(|&c| c == 0.0));
        assert_eq!(unit_frame_transform(&once), once);
    }

    #[test]
    fn drift_bound_examples() {
        assert!((compute_drift_bound(&one_class(0.2), &[0.2]).unwrap() - 5.78).abs() < 1e-12);
        let m = ten_class(false);
        assert_eq!(compute_drift_bound(&m, &[0.0; 10]).unwrap(), 5.0);
        let single = build_task_model(&TaskSpec {
            mean_energy: vec![vec![1.0]],
            mean_duration: vec![vec![2.0]],
            idle_max: 0.0,
            duration_min: None,
            rates: vec![0.25],
            modes: vec![],
            noise: NoiseTable::default(),
            null_class: None,
            idle_power: 0.0,
        })
        .unwrap();
        assert_eq!(tight_drift_bound(&single, &[0.25]).unwrap(), 0.5 * 0.25);
    }

    #[test]
    fn analysis_constants_one_class() {
        let m = one_class(0.2);
        let k = AnalysisConstants::for_task_model(&m, &[0.2]).unwrap();
        assert!((k.power_opt - 7.0 / 15.0).abs() < 1e-9);
        assert_eq!(k.duration_min, 4.0);
        // |7/15 * 17 - 1| dominates
        assert!((k.beta - (7.0 / 15.0 * 17.0 - 1.0)).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn cross_path_equivalence(q in prop::collection::vec(0.0f64..200.0, 10), v in 0.0f64..10.0) {
            let m = ten_class(false);
            let attr = m.to_attribute_model();
            let bank = QueueBank::from_values(&q).unwrap();
            let cfg = ControllerConfig::with_v(v);
            let direct = task_schedule_decision(&m, &bank, &cfg).unwrap();
            let general = general_ratio_decision(&attr, 0, &bank, &cfg).unwrap();
            prop_assert_eq!(direct, m.action_from_index(general));
        }
    }
}

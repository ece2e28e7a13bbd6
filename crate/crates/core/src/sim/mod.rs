//! Frame-driven simulation engine and run summaries.
//!
//! A run executes `K` frames: observe the queues (and the random event, when
//! there is one), decide, sample the outcome, update the queues and the
//! running ratio, and record.

pub mod metrics;
pub mod scenarios;

pub use metrics::{moving_average, moving_ratio, time_average_ratio, MovingRatio};
pub use scenarios::{builtin_scenario, builtin_scenarios, scenario_names};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controllers::{
    algorithm1_policy, algorithm2_decision, fixed_frame_decision, flow_control_decision, flow_task_decision,
    general_ratio_decision, task_schedule_decision, ControlError, ControllerConfig, ThetaTracker,
};
use crate::lfp::{solve_box_lfp, ConstrainedLfpInstance, LfpError};
use crate::model::{
    frame_slots, sample_arrivals_with_rates, sample_outcome, seeded_rng, AttributeModel, ModelError, SimRng, TaskModel,
};
use crate::queues::{Increment, QueueBank, QueueError, VirtualQueue};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error(transparent)]
    Lfp(#[from] LfpError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("{0}")]
    Metric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    TaskScheduler,
    FlowControl,
    Algorithm1,
    Algorithm2,
    FixedFrame,
    OnlineLfp,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::TaskScheduler => "task_scheduler",
            ControllerKind::FlowControl => "flow_control",
            ControllerKind::Algorithm1 => "algorithm1",
            ControllerKind::Algorithm2 => "algorithm2",
            ControllerKind::FixedFrame => "fixed_frame",
            ControllerKind::OnlineLfp => "online_lfp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioModel {
    Task(TaskModel),
    Attribute(AttributeModel),
    Lfp(ConstrainedLfpInstance),
}

/// From `start_frame` on, class rates are the base rates times `multiplier`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateChange {
    pub start_frame: u64,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub model: ScenarioModel,
    pub controller: ControllerKind,
    pub config: ControllerConfig,
    pub horizon: u64,
    pub seed: u64,
    pub rate_schedule: Vec<RateChange>,
    pub moving_window: u64,
    pub theta_window: Option<usize>,
    pub bisection_tol: f64,
    pub record_history: bool,
}

pub const DEFAULT_HORIZON: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_WINDOW: u64 = 1000;

impl Scenario {
    pub fn new(name: impl Into<String>, model: ScenarioModel, controller: ControllerKind) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            model,
            controller,
            config: ControllerConfig::default(),
            horizon: DEFAULT_HORIZON,
            seed: DEFAULT_SEED,
            rate_schedule: Vec::new(),
            moving_window: DEFAULT_WINDOW,
            theta_window: None,
            bisection_tol: 1e-9,
            record_history: false,
        }
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = d.into();
        self
    }

    pub fn with_config(mut self, config: ControllerConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.config.v = v;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_window(mut self, window: u64) -> Self {
        self.moving_window = window;
        self
    }

    /// Sets the horizon; a rate schedule is stretched to keep its phase
    /// boundaries at the same fractions of the run.
    pub fn with_horizon(mut self, horizon: u64) -> Self {
        if self.horizon > 0 && horizon != self.horizon {
            let old = self.horizon as u128;
            for change in &mut self.rate_schedule {
                change.start_frame = ((change.start_frame as u128 * horizon as u128 + old / 2) / old) as u64;
            }
        }
        self.horizon = horizon;
        self
    }

    pub fn with_rate_schedule(mut self, schedule: Vec<RateChange>) -> Self {
        self.rate_schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.horizon == 0 {
            return Err(SimError::Scenario("horizon must be at least 1".into()));
        }
        if self.moving_window == 0 {
            return Err(SimError::Scenario("moving window must be at least 1".into()));
        }
        self.config.validate()?;
        if self
            .rate_schedule
            .windows(2)
            .any(|w| w[0].start_frame >= w[1].start_frame)
        {
            return Err(SimError::Scenario(
                "rate schedule frames must be strictly increasing".into(),
            ));
        }
        if self
            .rate_schedule
            .iter()
            .any(|c| !(c.multiplier.is_finite() && c.multiplier >= 0.0))
        {
            return Err(SimError::Scenario(
                "rate multipliers must be finite and non-negative".into(),
            ));
        }
        use ControllerKind::*;
        match (&self.model, self.controller) {
            (ScenarioModel::Task(_), TaskScheduler) => {}
            (ScenarioModel::Task(m), FlowControl) => {
                if self.config.power_budget.is_none() {
                    return Err(SimError::Scenario("flow control needs a power budget".into()));
                }
                if !self.config.weights.is_empty() && self.config.weights.len() != m.num_classes() {
                    return Err(SimError::Scenario("one weight per class is required".into()));
                }
            }
            (ScenarioModel::Attribute(_), Algorithm1 | Algorithm2 | FixedFrame) => {}
            (ScenarioModel::Lfp(inst), OnlineLfp) => inst.validate()?,
            (_, kind) => {
                return Err(SimError::Scenario(format!(
                    "controller {} does not match the scenario model",
                    kind.name()
                )))
            }
        }
        if !self.rate_schedule.is_empty() && !matches!(self.model, ScenarioModel::Task(_)) {
            return Err(SimError::Scenario("rate schedules apply to task models only".into()));
        }
        if self.controller == ControllerKind::FixedFrame {
            if let ScenarioModel::Attribute(a) = &self.model {
                if a.constant_frame().is_none() {
                    return Err(ControlError::VariableFrame.into());
                }
            }
        }
        Ok(())
    }

    /// Labels of every queue the run maintains, in summary order.
    pub fn queue_labels(&self) -> Vec<String> {
        match &self.model {
            ScenarioModel::Task(m) => {
                let mut v: Vec<String> = (1..=m.num_classes()).map(|n| format!("Q_{n}")).collect();
                if self.controller == ControllerKind::FlowControl {
                    v.push("Z".into());
                }
                v
            }
            ScenarioModel::Attribute(a) => (1..=a.num_constraints()).map(|l| format!("Q_{l}")).collect(),
            ScenarioModel::Lfp(i) => (1..=i.num_constraints()).map(|l| format!("Q_{l}")).collect(),
        }
    }
}

/// One recorded frame. For attribute models `class` is the event index and
/// `mode` the action index; `penalty` is `y_0` (energy for task models).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameTrace {
    pub k: u64,
    pub class: usize,
    pub mode: usize,
    pub idle: f64,
    pub busy: f64,
    pub penalty: f64,
    pub frame: f64,
    pub admitted: Vec<u64>,
    pub arrivals: Vec<u64>,
    /// Queue values after this frame's update.
    pub queues: Vec<f64>,
    pub z: Option<f64>,
    pub theta: f64,
    pub running_power: f64,
    pub running_rates: Vec<f64>,
    pub ma_admission_rate: f64,
    pub ma_queue: f64,
}

/// Keeps every `stride`-th frame (and the last one).
#[derive(Debug, Clone)]
pub struct TraceRecorder {
    stride: u64,
    last: u64,
    rows: Vec<FrameTrace>,
}

pub const TRACE_FULL_LIMIT: u64 = 10_000;

impl TraceRecorder {
    pub fn with_stride(stride: u64, horizon: u64) -> Self {
        Self {
            stride: stride.max(1),
            last: horizon.saturating_sub(1),
            rows: Vec::new(),
        }
    }

    /// Every frame up to 10^4 frames, otherwise about 10^4 evenly spaced rows.
    pub fn for_horizon(horizon: u64) -> Self {
        Self::with_stride(horizon.div_ceil(TRACE_FULL_LIMIT).max(1), horizon)
    }

    pub fn observe(&mut self, f: &FrameTrace) {
        if f.k.is_multiple_of(self.stride) || f.k == self.last {
            self.rows.push(f.clone());
        }
    }

    pub fn rows(&self) -> &[FrameTrace] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<FrameTrace> {
        self.rows
    }
}

/// Aggregate statistics of a run. For attribute and LFP models the energy
/// fields hold `y_0` and `time_average_power` is `Σ y_0 / Σ T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub controller: ControllerKind,
    pub v: f64,
    pub seed: u64,
    pub frames: u64,
    pub moving_window: u64,
    pub mean_energy: f64,
    pub mean_busy: f64,
    pub mean_idle: f64,
    pub mean_frame: f64,
    pub time_average_power: f64,
    pub served_fractions: Vec<f64>,
    pub processing_rates: Vec<f64>,
    pub mode_fractions: Vec<f64>,
    pub admitted_means: Vec<f64>,
    pub admission_rate: f64,
    pub arrival_rate: f64,
    pub attribute_means: Vec<f64>,
    pub attribute_ratios: Vec<f64>,
    pub lfp_x_mean: Vec<f64>,
    pub queue_labels: Vec<String>,
    pub final_queues: Vec<f64>,
    pub max_queues: Vec<f64>,
    pub constraint_gaps: Vec<f64>,
    pub mean_increments: Vec<f64>,
    pub phase_starts: Vec<u64>,
    pub phase_powers: Vec<f64>,
    pub phase_admission_rates: Vec<f64>,
    pub phase_arrival_rates: Vec<f64>,
    pub phase_max_queues: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
struct Phase {
    start: u64,
    energy: f64,
    time: f64,
    admitted: f64,
    arrivals: f64,
    max_queue: f64,
}

struct Tally {
    k: u64,
    energy: f64,
    busy: f64,
    idle: f64,
    time: f64,
    served: Vec<f64>,
    modes: Vec<u64>,
    admitted: Vec<f64>,
    arrivals: Vec<f64>,
    attrs: Vec<f64>,
    x: Vec<f64>,
    cx: Vec<f64>,
    max_queues: Vec<f64>,
    phases: Vec<Phase>,
    ma_admission: MovingRatio,
    ma_queue: MovingRatio,
}

/// Per-frame inputs to the tally.
struct Step<'a> {
    class: usize,
    mode: usize,
    idle: f64,
    busy: f64,
    penalty: f64,
    frame: f64,
    served_class: usize,
    attrs: &'a [f64],
    admitted: &'a [u64],
    arrivals: &'a [u64],
    x: &'a [f64],
    cx: &'a [f64],
}

impl Tally {
    fn new(s: &Scenario, classes: usize, modes: usize, attrs: usize, xs: usize, queues: &[f64]) -> Self {
        let window = s.moving_window as usize;
        Self {
            k: 0,
            energy: 0.0,
            busy: 0.0,
            idle: 0.0,
            time: 0.0,
            served: vec![0.0; classes],
            modes: vec![0; modes],
            admitted: vec![0.0; classes],
            arrivals: vec![0.0; classes],
            attrs: vec![0.0; attrs],
            x: vec![0.0; xs],
            cx: vec![0.0; attrs],
            max_queues: queues.to_vec(),
            phases: vec![Phase {
                max_queue: queues.iter().copied().fold(0.0, f64::max),
                ..Phase::default()
            }],
            ma_admission: MovingRatio::new(window),
            ma_queue: MovingRatio::new(window),
        }
    }

    fn start_phase(&mut self, k: u64, queues: &[f64]) {
        if k == 0 {
            return;
        }
        self.phases.push(Phase {
            start: k,
            max_queue: queues.iter().copied().fold(0.0, f64::max),
            ..Phase::default()
        });
    }

    fn record(
        &mut self,
        step: Step<'_>,
        queues: &[f64],
        z: Option<f64>,
        theta: f64,
        observer: &mut Option<&mut dyn FnMut(&FrameTrace)>,
    ) {
        let k = self.k;
        self.k += 1;
        self.energy += step.penalty;
        self.busy += step.busy;
        self.idle += step.idle;
        self.time += step.frame;
        if step.served_class > 0 {
            self.served[step.served_class - 1] += 1.0;
        }
        if step.mode > 0 && step.mode <= self.modes.len() {
            self.modes[step.mode - 1] += 1;
        }
        let mut admitted = 0.0;
        let mut arrivals = 0.0;
        for (n, (&a, &r)) in step.admitted.iter().zip(step.arrivals).enumerate() {
            self.admitted[n] += a as f64;
            self.arrivals[n] += r as f64;
            admitted += a as f64;
            arrivals += r as f64;
        }
        for (s, y) in self.attrs.iter_mut().zip(step.attrs) {
            *s += y;
        }
        for (s, x) in self.x.iter_mut().zip(step.x) {
            *s += x;
        }
        for (s, c) in self.cx.iter_mut().zip(step.cx) {
            *s += c;
        }
        let mut qmax: f64 = 0.0;
        let mut qsum = 0.0;
        for (m, &q) in self.max_queues.iter_mut().zip(queues.iter().chain(z.iter())) {
            *m = m.max(q);
            qmax = qmax.max(q);
            qsum += q;
        }
        let phase = self.phases.last_mut().expect("phase");
        phase.energy += step.penalty;
        phase.time += step.frame;
        phase.admitted += admitted;
        phase.arrivals += arrivals;
        phase.max_queue = phase.max_queue.max(qmax);
        let ma_admission = self.ma_admission.push(admitted, step.frame);
        let nq = queues.len() + usize::from(z.is_some());
        let ma_queue = self.ma_queue.push(if nq > 0 { qsum / nq as f64 } else { 0.0 }, 1.0);

        if let Some(obs) = observer.as_mut() {
            let running_rates = if !self.x.is_empty() {
                self.cx.iter().map(|c| c / self.k as f64).collect()
            } else if !self.attrs.is_empty() {
                self.attrs.iter().map(|y| y / self.time).collect()
            } else {
                self.served.iter().map(|s| s / self.time).collect()
            };
            obs(&FrameTrace {
                k,
                class: step.class,
                mode: step.mode,
                idle: step.idle,
                busy: step.busy,
                penalty: step.penalty,
                frame: step.frame,
                admitted: step.admitted.to_vec(),
                arrivals: step.arrivals.to_vec(),
                queues: queues.to_vec(),
                z,
                theta,
                running_power: self.energy / self.time,
                running_rates,
                ma_admission_rate: ma_admission,
                ma_queue,
            });
        }
    }

    fn summarize(self, s: &Scenario, queues: Vec<&VirtualQueue>) -> Result<RunSummary, SimError> {
        let k = self.k as f64;
        let frames = self.k;
        let mut constraint_gaps = Vec::with_capacity(queues.len());
        let mut mean_increments = Vec::with_capacity(queues.len());
        for q in &queues {
            constraint_gaps.push(crate::queues::constraint_gap(q, frames, q.initial())?);
            mean_increments.push(q.net_increment() / k);
        }
        let total_admitted = self.admitted.iter().fold(0.0, |a, b| a + b);
        let total_arrivals = self.arrivals.iter().fold(0.0, |a, b| a + b);
        let lfp_x_mean = self.x.iter().map(|x| x / k).collect();
        let attribute_means = if self.x.is_empty() {
            self.attrs.iter().map(|y| y / k).collect()
        } else {
            self.cx.iter().map(|c| c / k).collect()
        };
        Ok(RunSummary {
            scenario: s.name.clone(),
            controller: s.controller,
            v: s.config.v,
            seed: s.seed,
            frames,
            moving_window: s.moving_window,
            mean_energy: self.energy / k,
            mean_busy: self.busy / k,
            mean_idle: self.idle / k,
            mean_frame: self.time / k,
            time_average_power: self.energy / self.time,
            served_fractions: self.served.iter().map(|v| v / k).collect(),
            processing_rates: self.served.iter().map(|v| v / self.time).collect(),
            mode_fractions: self.modes.iter().map(|&v| v as f64 / k).collect(),
            admitted_means: self.admitted.iter().map(|v| v / k).collect(),
            admission_rate: total_admitted / self.time,
            arrival_rate: total_arrivals / self.time,
            attribute_means,
            attribute_ratios: self.attrs.iter().map(|y| y / self.time).collect(),
            lfp_x_mean,
            queue_labels: s.queue_labels(),
            final_queues: queues.iter().map(|q| q.value()).collect(),
            max_queues: self.max_queues,
            constraint_gaps,
            mean_increments,
            phase_starts: self.phases.iter().map(|p| p.start).collect(),
            phase_powers: self.phases.iter().map(|p| p.energy / p.time).collect(),
            phase_admission_rates: self.phases.iter().map(|p| p.admitted / p.time).collect(),
            phase_arrival_rates: self.phases.iter().map(|p| p.arrivals / p.time).collect(),
            phase_max_queues: self.phases.iter().map(|p| p.max_queue).collect(),
        })
    }
}

fn new_bank(n: usize, history: bool) -> QueueBank {
    let bank = QueueBank::zeros(n);
    if history {
        bank.with_history()
    } else {
        bank
    }
}

struct RateState<'a> {
    base: &'a [f64],
    schedule: &'a [RateChange],
    next: usize,
    rates: Vec<f64>,
}

impl<'a> RateState<'a> {
    fn new(base: &'a [f64], schedule: &'a [RateChange]) -> Self {
        Self {
            base,
            schedule,
            next: 0,
            rates: base.to_vec(),
        }
    }

    /// Applies any change starting at `k`; returns true on a change.
    fn advance(&mut self, k: u64) -> bool {
        let mut changed = false;
        while self.next < self.schedule.len() && self.schedule[self.next].start_frame <= k {
            let m = self.schedule[self.next].multiplier;
            self.rates = self.base.iter().map(|r| r * m).collect();
            self.next += 1;
            changed = true;
        }
        changed
    }
}

pub fn run_scenario(s: &Scenario) -> Result<RunSummary, SimError> {
    run_inner(s, None)
}

/// Runs `s`, calling `observer` after every frame.
pub fn run_scenario_observed(s: &Scenario, observer: &mut dyn FnMut(&FrameTrace)) -> Result<RunSummary, SimError> {
    run_inner(s, Some(observer))
}

/// Runs `s` and returns the summary with a strided trace.
pub fn run_with_trace(s: &Scenario) -> Result<(RunSummary, Vec<FrameTrace>), SimError> {
    let mut rec = TraceRecorder::for_horizon(s.horizon);
    let summary = run_scenario_observed(s, &mut |f| rec.observe(f))?;
    Ok((summary, rec.into_rows()))
}

fn run_inner(s: &Scenario, mut observer: Option<&mut dyn FnMut(&FrameTrace)>) -> Result<RunSummary, SimError> {
    s.validate()?;
    let mut rng = seeded_rng(s.seed);
    match (&s.model, s.controller) {
        (ScenarioModel::Task(m), ControllerKind::TaskScheduler) => run_task(s, m, &mut rng, &mut observer),
        (ScenarioModel::Task(m), ControllerKind::FlowControl) => run_flow(s, m, &mut rng, &mut observer),
        (ScenarioModel::Attribute(a), _) => run_attribute(s, a, &mut rng, &mut observer),
        (ScenarioModel::Lfp(i), _) => run_lfp(s, i, &mut observer),
        _ => unreachable!("validated"),
    }
}

type Observer<'a> = Option<&'a mut dyn FnMut(&FrameTrace)>;

fn run_task(
    s: &Scenario,
    model: &TaskModel,
    rng: &mut SimRng,
    observer: &mut Observer<'_>,
) -> Result<RunSummary, SimError> {
    let n = model.num_classes();
    let mut bank = new_bank(n, s.record_history);
    let mut rates = RateState::new(model.rates(), &s.rate_schedule);
    let mut tally = Tally::new(s, n, model.num_modes(), 0, 0, &bank.values());
    let mut incs = vec![
        Increment {
            arrival: 0.0,
            service: 0.0
        };
        n
    ];
    let mut qv = vec![0.0; n];
    for k in 0..s.horizon {
        if rates.advance(k) {
            tally.start_phase(k, &bank.values());
        }
        let action = task_schedule_decision(model, &bank, &s.config)?;
        let o = sample_outcome(model, action, rng);
        for (i, inc) in incs.iter_mut().enumerate() {
            *inc = Increment {
                arrival: rates.rates[i] * o.frame_total,
                service: o.indicator(i + 1),
            };
        }
        bank.step(&incs)?;
        for (i, q) in qv.iter_mut().enumerate() {
            *q = bank.value(i);
        }
        let step = Step {
            class: o.class,
            mode: o.mode,
            idle: o.idle,
            busy: o.busy,
            penalty: o.energy,
            frame: o.frame_total,
            served_class: o.class,
            attrs: &[],
            admitted: &[],
            arrivals: &[],
            x: &[],
            cx: &[],
        };
        tally.record(step, &qv, None, 0.0, observer);
    }
    tally.summarize(s, bank.queues().iter().collect())
}

fn run_flow(
    s: &Scenario,
    model: &TaskModel,
    rng: &mut SimRng,
    observer: &mut Observer<'_>,
) -> Result<RunSummary, SimError> {
    let n = model.num_classes();
    let p_av = s.config.power_budget.expect("validated");
    let mut bank = new_bank(n, s.record_history);
    let mut z = VirtualQueue::new("Z");
    if s.record_history {
        z = z.with_history();
    }
    let mut rates = RateState::new(model.rates(), &s.rate_schedule);
    let mut all = bank.values();
    all.push(0.0);
    let mut tally = Tally::new(s, n, model.num_modes(), 0, 0, &all);
    let mut incs = vec![
        Increment {
            arrival: 0.0,
            service: 0.0
        };
        n
    ];
    let mut qv = vec![0.0; n];
    for k in 0..s.horizon {
        if rates.advance(k) {
            let mut all = bank.values();
            all.push(z.value());
            tally.start_phase(k, &all);
        }
        let gamma = flow_control_decision(&bank, &s.config);
        let action = flow_task_decision(model, &bank, z.value(), &s.config)?;
        let mut o = sample_outcome(model, action, rng);
        let arrivals = sample_arrivals_with_rates(&rates.rates, frame_slots(o.frame_total), &gamma, rng)?;
        for (i, inc) in incs.iter_mut().enumerate() {
            *inc = Increment {
                arrival: arrivals.admitted[i] as f64,
                service: o.indicator(i + 1),
            };
        }
        bank.step(&incs)?;
        z.update(o.energy, p_av * o.frame_total)?;
        for (i, q) in qv.iter_mut().enumerate() {
            *q = bank.value(i);
        }
        o.admitted.clone_from(&arrivals.admitted);
        let step = Step {
            class: o.class,
            mode: o.mode,
            idle: o.idle,
            busy: o.busy,
            penalty: o.energy,
            frame: o.frame_total,
            served_class: o.class,
            attrs: &[],
            admitted: &arrivals.admitted,
            arrivals: &arrivals.raw,
            x: &[],
            cx: &[],
        };
        tally.record(step, &qv, Some(z.value()), 0.0, observer);
    }
    let mut queues: Vec<&VirtualQueue> = bank.queues().iter().collect();
    queues.push(&z);
    tally.summarize(s, queues)
}

fn run_attribute(
    s: &Scenario,
    attr: &AttributeModel,
    rng: &mut SimRng,
    observer: &mut Observer<'_>,
) -> Result<RunSummary, SimError> {
    let l = attr.num_constraints();
    let modes = attr.events().iter().map(|e| e.actions.len()).max().unwrap_or(0);
    let mut bank = new_bank(l, s.record_history);
    let mut theta = match s.theta_window {
        Some(w) => ThetaTracker::windowed(w),
        None => ThetaTracker::new(),
    };
    let mut tally = Tally::new(s, 0, modes, l, 0, &bank.values());
    let mut incs = vec![
        Increment {
            arrival: 0.0,
            service: 0.0
        };
        l
    ];
    let mut qv = vec![0.0; l];
    for _ in 0..s.horizon {
        let omega = attr.sample_event(rng);
        let th = theta.theta();
        let alpha = match s.controller {
            ControllerKind::Algorithm1 => algorithm1_policy(attr, &bank, &s.config, s.bisection_tol)?.actions[omega],
            ControllerKind::Algorithm2 => algorithm2_decision(attr, omega, &bank, &theta, &s.config)?,
            ControllerKind::FixedFrame => fixed_frame_decision(attr, omega, &bank, &s.config)?,
            _ => general_ratio_decision(attr, omega, &bank, &s.config)?,
        };
        let means = attr.action(omega, alpha);
        for (i, inc) in incs.iter_mut().enumerate() {
            *inc = Increment {
                arrival: means.attributes[i + 1],
                service: attr.bounds()[i] * means.frame,
            };
        }
        bank.step(&incs)?;
        theta.update(means.attributes[0], means.frame);
        for (i, q) in qv.iter_mut().enumerate() {
            *q = bank.value(i);
        }
        let step = Step {
            class: omega,
            mode: alpha + 1,
            idle: 0.0,
            busy: means.frame,
            penalty: means.attributes[0],
            frame: means.frame,
            served_class: 0,
            attrs: &means.attributes[1..],
            admitted: &[],
            arrivals: &[],
            x: &[],
            cx: &[],
        };
        tally.record(step, &qv, None, th, observer);
    }
    tally.summarize(s, bank.queues().iter().collect())
}

fn run_lfp(s: &Scenario, inst: &ConstrainedLfpInstance, observer: &mut Observer<'_>) -> Result<RunSummary, SimError> {
    let l = inst.num_constraints();
    let mut bank = new_bank(l, s.record_history);
    let mut tally = Tally::new(s, 0, 0, l, inst.dim(), &bank.values());
    let mut incs = vec![
        Increment {
            arrival: 0.0,
            service: 0.0
        };
        l
    ];
    let mut qv = vec![0.0; l];
    let mut cx = vec![0.0; l];
    for _ in 0..s.horizon {
        let frame_box = inst.frame_box(s.config.v, &bank.values());
        let sol = solve_box_lfp(&frame_box)?;
        let x = &sol.x;
        for (i, row) in inst.constraints.iter().enumerate() {
            cx[i] = row.iter().zip(x).map(|(c, x)| c * x).sum();
            incs[i] = Increment {
                arrival: cx[i],
                service: inst.bounds[i],
            };
        }
        bank.step(&incs)?;
        for (i, q) in qv.iter_mut().enumerate() {
            *q = bank.value(i);
        }
        let t = inst.denominator(x);
        let step = Step {
            class: 0,
            mode: 0,
            idle: 0.0,
            busy: t,
            penalty: inst.numerator(x),
            frame: t,
            served_class: 0,
            attrs: &[],
            admitted: &[],
            arrivals: &[],
            x,
            cx: &cx,
        };
        tally.record(step, &qv, None, 0.0, observer);
    }
    tally.summarize(s, bank.queues().iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_run_equals_its_frame() {
        let spec = crate::model::TaskSpec {
            mean_energy: vec![vec![2.0]],
            mean_duration: vec![vec![3.0]],
            idle_max: 0.0,
            duration_min: None,
            rates: vec![0.1],
            modes: vec![],
            noise: Default::default(),
            null_class: None,
            idle_power: 0.0,
        };
        let model = crate::model::build_task_model(&spec).unwrap();
        let s = Scenario::new("single", ScenarioModel::Task(model), ControllerKind::TaskScheduler).with_horizon(1);
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.frames, 1);
        assert_eq!(r.mean_energy, 2.0);
        assert_eq!(r.mean_frame, 3.0);
        assert_eq!(r.time_average_power, 2.0 / 3.0);
        assert_eq!(r.mode_fractions, vec![1.0]);
    }

    #[test]
    fn horizon_rescales_schedule() {
        let s = builtin_scenario("rate_switch").unwrap().with_horizon(300);
        let starts: Vec<u64> = s.rate_schedule.iter().map(|c| c.start_frame).collect();
        assert_eq!(starts, vec![0, 100, 200]);
    }

    #[test]
    fn mismatched_controller_rejected() {
        let mut s = builtin_scenario("one_class").unwrap();
        s.controller = ControllerKind::Algorithm2;
        assert!(matches!(s.validate(), Err(SimError::Scenario(_))));
    }

    #[test]
    fn trace_stride() {
        let s = builtin_scenario("one_class").unwrap().with_horizon(100);
        let (_, rows) = run_with_trace(&s).unwrap();
        assert_eq!(rows.len(), 100);
        let s = s.with_horizon(25_000);
        let (_, rows) = run_with_trace(&s).unwrap();
        assert!(rows.len() <= 10_001 && rows.last().unwrap().k == 24_999);
    }
}

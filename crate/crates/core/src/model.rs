//! System descriptions: task classes and processing modes, general attribute
//! models driven by random events, and the outcome samplers that turn a
//! decision into a realized frame.
//!
//! Classes are numbered `1..=N`; class `0` is the optional null choice used by
//! flow-control systems. Modes are numbered `1..=|M|`.

use rand::{Rng as _, SeedableRng};
use rand_distr::{Binomial, Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Portable, seedable generator used for every run. One stream per run.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model has no classes")]
    NoClasses,
    #[error("mode set is empty")]
    EmptyModes,
    #[error("{table} table is not {rows}x{cols}")]
    Shape {
        table: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("mean duration for class {class}, mode {mode} must be positive, got {value}")]
    NonPositiveDuration { class: usize, mode: usize, value: f64 },
    #[error("mean energy for class {class}, mode {mode} must be finite and non-negative, got {value}")]
    BadEnergy { class: usize, mode: usize, value: f64 },
    #[error("mean duration {value} for class {class}, mode {mode} is below the minimum duration {min}")]
    BelowMinimumDuration {
        class: usize,
        mode: usize,
        value: f64,
        min: f64,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("admission probability times arrival rate exceeds one for class {class}: {value}")]
    ArrivalProbability { class: usize, value: f64 },
    #[error("event probabilities sum to {0}, expected 1")]
    Probabilities(f64),
    #[error("event {event}, action {action}: {reason}")]
    Action {
        event: usize,
        action: usize,
        reason: String,
    },
}

/// Distribution of the realized busy duration and energy around their means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    /// Outcomes equal the means.
    #[default]
    Deterministic,
    /// Symmetric uniform noise of half-width `width`. The half-width is shrunk
    /// per entry so that `D >= D_min` and `e >= 0`, which keeps the mean exact.
    Uniform { width: f64 },
    /// `D = D_min + Exp`, `e = Exp`, each with the configured mean. Unbounded.
    ExponentialShifted,
}

impl Noise {
    fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Noise::Uniform { width } if !(width.is_finite() && width >= 0.0) => Err(ModelError::Parameter {
                name: "noise.width",
                reason: format!("must be finite and non-negative, got {width}"),
            }),
            _ => Ok(()),
        }
    }

    fn duration_half_width(&self, mean: f64, floor: f64) -> f64 {
        match *self {
            Noise::Uniform { width } => width.min(mean - floor).max(0.0),
            _ => 0.0,
        }
    }

    fn energy_half_width(&self, mean: f64) -> f64 {
        match *self {
            Noise::Uniform { width } => width.min(mean).max(0.0),
            _ => 0.0,
        }
    }

    fn sample_duration(&self, mean: f64, floor: f64, rng: &mut SimRng) -> f64 {
        match *self {
            Noise::Deterministic => mean,
            Noise::Uniform { .. } => {
                let h = self.duration_half_width(mean, floor);
                if h > 0.0 {
                    mean + rng.random_range(-h..=h)
                } else {
                    mean
                }
            }
            Noise::ExponentialShifted => {
                let excess = mean - floor;
                if excess > 0.0 {
                    floor + Exp::new(1.0 / excess).expect("positive rate").sample(rng)
                } else {
                    mean
                }
            }
        }
    }

    fn sample_energy(&self, mean: f64, rng: &mut SimRng) -> f64 {
        match *self {
            Noise::Deterministic => mean,
            Noise::Uniform { .. } => {
                let h = self.energy_half_width(mean);
                if h > 0.0 {
                    mean + rng.random_range(-h..=h)
                } else {
                    mean
                }
            }
            Noise::ExponentialShifted => {
                if mean > 0.0 {
                    Exp::new(1.0 / mean).expect("positive rate").sample(rng)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Noise configuration: one spec for every entry, or a full class x mode table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseTable {
    Uniform(Noise),
    PerEntry(Vec<Vec<Noise>>),
}

impl Default for NoiseTable {
    fn default() -> Self {
        NoiseTable::Uniform(Noise::Deterministic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NullClassSpec {
    /// Busy duration of a null frame; defaults to the minimum duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default)]
    pub energy: f64,
}

/// Scenario description from which a [`TaskModel`] is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    /// `mean_energy[c-1][m-1]`.
    pub mean_energy: Vec<Vec<f64>>,
    /// `mean_duration[c-1][m-1]`.
    pub mean_duration: Vec<Vec<f64>>,
    pub idle_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_min: Option<f64>,
    /// Per-class rates (tasks per unit time). Empty means all zero.
    #[serde(default)]
    pub rates: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<String>,
    #[serde(default)]
    pub noise: NoiseTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null_class: Option<NullClassSpec>,
    /// Power drawn while idle; idle energy is `idle_power * I`.
    #[serde(default)]
    pub idle_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullClass {
    pub duration: f64,
    pub energy: f64,
}

/// Classes, modes, mean energy/duration tables and outcome noise.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskModel {
    modes: Vec<String>,
    mean_energy: Vec<Vec<f64>>,
    mean_duration: Vec<Vec<f64>>,
    idle_max: f64,
    duration_min: f64,
    rates: Vec<f64>,
    noise: Vec<Vec<Noise>>,
    null_class: Option<NullClass>,
    idle_power: f64,
}

/// One frame decision `(c, m, I)`; `class == 0` is the null choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskAction {
    pub class: usize,
    pub mode: usize,
    pub idle: f64,
}

impl TaskAction {
    pub fn new(class: usize, mode: usize, idle: f64) -> Self {
        Self { class, mode, idle }
    }
}

fn check_table(table: &'static str, rows: &[Vec<f64>], n: usize, m: usize) -> Result<(), ModelError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        return Err(ModelError::Shape {
            table,
            rows: n,
            cols: m,
        });
    }
    Ok(())
}

fn finite_nonneg(name: &'static str, x: f64) -> Result<(), ModelError> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::Parameter {
            name,
            reason: format!("must be finite and non-negative, got {x}"),
        })
    }
}

pub fn build_task_model(spec: &TaskSpec) -> Result<TaskModel, ModelError> {
    let n = spec.mean_energy.len();
    if n == 0 {
        return Err(ModelError::NoClasses);
    }
    let m = spec.mean_energy[0].len();
    if m == 0 {
        return Err(ModelError::EmptyModes);
    }
    check_table("mean_energy", &spec.mean_energy, n, m)?;
    check_table("mean_duration", &spec.mean_duration, n, m)?;
    for c in 0..n {
        for k in 0..m {
            let e = spec.mean_energy[c][k];
            if !(e.is_finite() && e >= 0.0) {
                return Err(ModelError::BadEnergy {
                    class: c + 1,
                    mode: k + 1,
                    value: e,
                });
            }
            let d = spec.mean_duration[c][k];
            if !(d.is_finite() && d > 0.0) {
                return Err(ModelError::NonPositiveDuration {
                    class: c + 1,
                    mode: k + 1,
                    value: d,
                });
            }
        }
    }
    finite_nonneg("idle_max", spec.idle_max)?;
    finite_nonneg("idle_power", spec.idle_power)?;

    let table_min = spec
        .mean_duration
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let duration_min = match spec.duration_min {
        Some(d) => {
            if !(d.is_finite() && d > 0.0) {
                return Err(ModelError::Parameter {
                    name: "duration_min",
                    reason: format!("must be positive, got {d}"),
                });
            }
            for c in 0..n {
                for k in 0..m {
                    let value = spec.mean_duration[c][k];
                    if value < d {
                        return Err(ModelError::BelowMinimumDuration {
                            class: c + 1,
                            mode: k + 1,
                            value,
                            min: d,
                        });
                    }
                }
            }
            d
        }
        None => table_min,
    };

    let rates = if spec.rates.is_empty() {
        vec![0.0; n]
    } else if spec.rates.len() == n {
        for &r in &spec.rates {
            finite_nonneg("rates", r)?;
        }
        spec.rates.clone()
    } else {
        return Err(ModelError::Parameter {
            name: "rates",
            reason: format!("expected {n} entries, got {}", spec.rates.len()),
        });
    };

    let modes = if spec.modes.is_empty() {
        (1..=m).map(|i| format!("m{i}")).collect()
    } else if spec.modes.len() == m {
        spec.modes.clone()
    } else {
        return Err(ModelError::Parameter {
            name: "modes",
            reason: format!("expected {m} labels, got {}", spec.modes.len()),
        });
    };

    let noise = match &spec.noise {
        NoiseTable::Uniform(noise) => {
            noise.validate()?;
            vec![vec![*noise; m]; n]
        }
        NoiseTable::PerEntry(table) => {
            if table.len() != n || table.iter().any(|r| r.len() != m) {
                return Err(ModelError::Shape {
                    table: "noise",
                    rows: n,
                    cols: m,
                });
            }
            for noise in table.iter().flatten() {
                noise.validate()?;
            }
            table.clone()
        }
    };

    let null_class = match &spec.null_class {
        None => None,
        Some(nc) => {
            let duration = nc.duration.unwrap_or(duration_min);
            if !(duration.is_finite() && duration >= duration_min) {
                return Err(ModelError::Parameter {
                    name: "null_class.duration",
                    reason: format!("must be at least the minimum duration {duration_min}, got {duration}"),
                });
            }
            finite_nonneg("null_class.energy", nc.energy)?;
            Some(NullClass {
                duration,
                energy: nc.energy,
            })
        }
    };

    Ok(TaskModel {
        modes,
        mean_energy: spec.mean_energy.clone(),
        mean_duration: spec.mean_duration.clone(),
        idle_max: spec.idle_max,
        duration_min,
        rates,
        noise,
        null_class,
        idle_power: spec.idle_power,
    })
}

impl TaskModel {
    pub fn num_classes(&self) -> usize {
        self.mean_energy.len()
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_labels(&self) -> &[String] {
        &self.modes
    }

    pub fn idle_max(&self) -> f64 {
        self.idle_max
    }

    pub fn duration_min(&self) -> f64 {
        self.duration_min
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn idle_power(&self) -> f64 {
        self.idle_power
    }

    pub fn null_class(&self) -> Option<NullClass> {
        self.null_class
    }

    pub fn has_null_class(&self) -> bool {
        self.null_class.is_some()
    }

    /// Returns a copy with different per-class rates.
    pub fn with_rates(&self, rates: Vec<f64>) -> Result<Self, ModelError> {
        if rates.len() != self.num_classes() {
            return Err(ModelError::Parameter {
                name: "rates",
                reason: format!("expected {} entries, got {}", self.num_classes(), rates.len()),
            });
        }
        for &r in &rates {
            finite_nonneg("rates", r)?;
        }
        Ok(Self { rates, ..self.clone() })
    }

    /// Busy-period energy mean `ê(c, m)`; class 0 is the null class.
    pub fn mean_energy(&self, class: usize, mode: usize) -> f64 {
        if class == 0 {
            self.null_class.map_or(0.0, |n| n.energy)
        } else {
            self.mean_energy[class - 1][mode - 1]
        }
    }

    /// Frame energy mean including idle energy, `ê(c, m, I)`.
    pub fn mean_frame_energy(&self, class: usize, mode: usize, idle: f64) -> f64 {
        self.mean_energy(class, mode) + self.idle_power * idle
    }

    /// Busy-period duration mean `D̂(c, m)`; class 0 is the null class.
    pub fn mean_duration(&self, class: usize, mode: usize) -> f64 {
        if class == 0 {
            self.null_class.map_or(self.duration_min, |n| n.duration)
        } else {
            self.mean_duration[class - 1][mode - 1]
        }
    }

    pub fn noise(&self, class: usize, mode: usize) -> Noise {
        if class == 0 {
            Noise::Deterministic
        } else {
            self.noise[class - 1][mode - 1]
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.noise.iter().flatten().all(|n| *n == Noise::Deterministic)
    }

    /// Largest busy duration any decision can produce, or `None` when the
    /// noise is unbounded.
    pub fn max_duration(&self) -> Option<f64> {
        let mut worst = self.null_class.map_or(0.0, |n| n.duration);
        for c in 1..=self.num_classes() {
            for m in 1..=self.num_modes() {
                let mean = self.mean_duration(c, m);
                let noise = self.noise(c, m);
                let upper = match noise {
                    Noise::ExponentialShifted if mean > self.duration_min => return None,
                    _ => mean + noise.duration_half_width(mean, self.duration_min),
                };
                worst = worst.max(upper);
            }
        }
        Some(worst)
    }

    /// Largest frame energy any decision can produce, or `None` when unbounded.
    pub fn max_energy(&self) -> Option<f64> {
        let mut worst = self.null_class.map_or(0.0, |n| n.energy);
        for c in 1..=self.num_classes() {
            for m in 1..=self.num_modes() {
                let mean = self.mean_energy(c, m);
                let noise = self.noise(c, m);
                let upper = match noise {
                    Noise::ExponentialShifted if mean > 0.0 => return None,
                    _ => mean + noise.energy_half_width(mean),
                };
                worst = worst.max(upper);
            }
        }
        Some(worst + self.idle_power * self.idle_max)
    }

    /// The two idle choices the ratio rules ever use.
    pub fn idle_options(&self) -> [f64; 2] {
        [0.0, self.idle_max]
    }

    /// Maps this model onto a general attribute model with a single
    /// deterministic event: `y_0 = e`, `y_n = λ_n T - 1_n` with bound 0.
    /// Actions enumerate `(c, m, I)` with `I ∈ {0, I_max}` in lexicographic order;
    /// see [`TaskModel::action_index`].
    pub fn to_attribute_model(&self) -> AttributeModel {
        let n = self.num_classes();
        let mut actions = Vec::with_capacity(n * self.num_modes() * 2);
        for c in 1..=n {
            for m in 1..=self.num_modes() {
                for idle in self.idle_options() {
                    let frame = self.mean_duration(c, m) + idle;
                    let mut attributes = Vec::with_capacity(n + 1);
                    attributes.push(self.mean_frame_energy(c, m, idle));
                    for k in 1..=n {
                        let served = if k == c { 1.0 } else { 0.0 };
                        attributes.push(self.rates[k - 1] * frame - served);
                    }
                    actions.push(ActionMeans {
                        label: format!("c={c},m={m},I={idle}"),
                        frame,
                        attributes,
                    });
                }
            }
        }
        AttributeModel {
            events: vec![EventSpec {
                label: "deterministic".into(),
                probability: 1.0,
                actions,
            }],
            bounds: vec![0.0; n],
        }
    }

    /// Index of `(c, m, I)` in [`TaskModel::to_attribute_model`].
    pub fn action_index(&self, action: &TaskAction) -> usize {
        let idle_slot = usize::from(action.idle != 0.0);
        ((action.class - 1) * self.num_modes() + (action.mode - 1)) * 2 + idle_slot
    }

    /// Inverse of [`TaskModel::action_index`].
    pub fn action_from_index(&self, index: usize) -> TaskAction {
        let idle = self.idle_options()[index % 2];
        let cm = index / 2;
        TaskAction::new(cm / self.num_modes() + 1, cm % self.num_modes() + 1, idle)
    }
}

/// Realized frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameOutcome {
    pub class: usize,
    pub mode: usize,
    pub idle: f64,
    pub busy: f64,
    pub energy: f64,
    pub frame_total: f64,
    /// Admitted arrivals per class; filled by flow-control runs.
    pub admitted: Vec<u64>,
}

impl FrameOutcome {
    /// Service indicator `1_n[k]` for class `n >= 1`.
    pub fn indicator(&self, n: usize) -> f64 {
        if self.class == n && n != 0 {
            1.0
        } else {
            0.0
        }
    }
}

pub fn sample_outcome(model: &TaskModel, action: TaskAction, rng: &mut SimRng) -> FrameOutcome {
    let TaskAction { class, mode, idle } = action;
    let noise = model.noise(class, mode);
    let busy = noise.sample_duration(model.mean_duration(class, mode), model.duration_min, rng);
    let energy = noise.sample_energy(model.mean_energy(class, mode), rng) + model.idle_power * idle;
    FrameOutcome {
        class,
        mode,
        idle,
        busy,
        energy,
        frame_total: busy + idle,
        admitted: Vec::new(),
    }
}

/// Integer number of slots used for Bernoulli-per-slot arrivals.
pub fn frame_slots(frame: f64) -> u64 {
    (frame.round() as u64).max(1)
}

/// Raw and admitted arrivals of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrivals {
    pub raw: Vec<u64>,
    pub admitted: Vec<u64>,
}

/// Samples raw arrivals `Binomial(slots, λ_n)` and thins them with admission
/// probability `γ_n`, so admitted counts are `Binomial(slots, λ_n γ_n)`.
pub fn sample_arrivals_with_rates(
    rates: &[f64],
    slots: u64,
    gamma: &[f64],
    rng: &mut SimRng,
) -> Result<Arrivals, ModelError> {
    if gamma.len() != rates.len() {
        return Err(ModelError::Parameter {
            name: "gamma",
            reason: format!("expected {} entries, got {}", rates.len(), gamma.len()),
        });
    }
    if slots == 0 {
        return Err(ModelError::Parameter {
            name: "slots",
            reason: "frame must span at least one slot".into(),
        });
    }
    let mut raw = Vec::with_capacity(rates.len());
    let mut admitted = Vec::with_capacity(rates.len());
    for (n, (&rate, &g)) in rates.iter().zip(gamma).enumerate() {
        if !(0.0..=1.0).contains(&g) {
            return Err(ModelError::Parameter {
                name: "gamma",
                reason: format!("admission probability must lie in [0, 1], got {g}"),
            });
        }
        if rate * g > 1.0 || rate > 1.0 {
            return Err(ModelError::ArrivalProbability {
                class: n + 1,
                value: rate * g,
            });
        }
        let r = if rate > 0.0 {
            Binomial::new(slots, rate).expect("valid binomial").sample(rng)
        } else {
            0
        };
        let a = if g >= 1.0 {
            r
        } else if g <= 0.0 || r == 0 {
            0
        } else {
            Binomial::new(r, g).expect("valid binomial").sample(rng)
        };
        raw.push(r);
        admitted.push(a);
    }
    Ok(Arrivals { raw, admitted })
}

/// Admitted arrivals per class over a frame of `slots` slots.
pub fn sample_arrivals(model: &TaskModel, slots: u64, gamma: &[f64], rng: &mut SimRng) -> Result<Vec<u64>, ModelError> {
    sample_arrivals_with_rates(&model.rates, slots, gamma, rng).map(|a| a.admitted)
}

/// Expected frame length and attributes `(ŷ_0, ..., ŷ_L)` of one action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionMeans {
    #[serde(default)]
    pub label: String,
    pub frame: f64,
    pub attributes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    #[serde(default)]
    pub label: String,
    pub probability: f64,
    pub actions: Vec<ActionMeans>,
}

/// Serializable description of an [`AttributeModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub events: Vec<EventSpec>,
    /// Time-average bounds `c_1..c_L`.
    #[serde(default)]
    pub bounds: Vec<f64>,
}

/// General frame system: i.i.d. events `ω`, per-event finite action lists,
/// and expectation tables `T̂(ω, α)`, `ŷ_l(ω, α)`. Realized outcomes equal
/// the tabulated means.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeModel {
    events: Vec<EventSpec>,
    bounds: Vec<f64>,
}

impl AttributeModel {
    pub fn new(spec: AttributeSpec) -> Result<Self, ModelError> {
        let AttributeSpec { events, bounds } = spec;
        if events.is_empty() {
            return Err(ModelError::Parameter {
                name: "events",
                reason: "at least one event is required".into(),
            });
        }
        let total: f64 = events.iter().map(|e| e.probability).sum();
        if events
            .iter()
            .any(|e| !(e.probability.is_finite() && e.probability >= 0.0))
            || (total - 1.0).abs() > 1e-12
        {
            return Err(ModelError::Probabilities(total));
        }
        for &b in &bounds {
            if !b.is_finite() {
                return Err(ModelError::Parameter {
                    name: "bounds",
                    reason: format!("must be finite, got {b}"),
                });
            }
        }
        let width = bounds.len() + 1;
        for (w, event) in events.iter().enumerate() {
            for (a, action) in event.actions.iter().enumerate() {
                if !(action.frame.is_finite() && action.frame > 0.0) {
                    return Err(ModelError::Action {
                        event: w,
                        action: a,
                        reason: format!("expected frame must be positive, got {}", action.frame),
                    });
                }
                if action.attributes.len() != width {
                    return Err(ModelError::Action {
                        event: w,
                        action: a,
                        reason: format!("expected {width} attributes, got {}", action.attributes.len()),
                    });
                }
                if action.attributes.iter().any(|y| !y.is_finite()) {
                    return Err(ModelError::Action {
                        event: w,
                        action: a,
                        reason: "attributes must be finite".into(),
                    });
                }
            }
        }
        Ok(Self { events, bounds })
    }

    pub fn to_spec(&self) -> AttributeSpec {
        AttributeSpec {
            events: self.events.clone(),
            bounds: self.bounds.clone(),
        }
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    /// Number of constraints `L`.
    pub fn num_constraints(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn events(&self) -> &[EventSpec] {
        &self.events
    }

    pub fn event(&self, omega: usize) -> &EventSpec {
        &self.events[omega]
    }

    pub fn actions(&self, omega: usize) -> &[ActionMeans] {
        &self.events[omega].actions
    }

    pub fn action(&self, omega: usize, alpha: usize) -> &ActionMeans {
        &self.events[omega].actions[alpha]
    }

    /// Smallest expected frame over all `(ω, α)`.
    pub fn frame_min(&self) -> f64 {
        self.events
            .iter()
            .flat_map(|e| e.actions.iter().map(|a| a.frame))
            .fold(f64::INFINITY, f64::min)
    }

    /// The common frame size when `T̂` is the same for every `(ω, α)`.
    pub fn constant_frame(&self) -> Option<f64> {
        let mut frames = self.events.iter().flat_map(|e| e.actions.iter().map(|a| a.frame));
        let first = frames.next()?;
        frames
            .all(|t| (t - first).abs() <= 1e-12 * first.abs().max(1.0))
            .then_some(first)
    }

    pub fn sample_event(&self, rng: &mut SimRng) -> usize {
        if self.events.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, e) in self.events.iter().enumerate() {
            acc += e.probability;
            if u < acc {
                return i;
            }
        }
        // rounding left a sliver above the last cumulative sum
        self.events
            .iter()
            .rposition(|e| e.probability > 0.0)
            .unwrap_or(self.events.len() - 1)
    }
}

//! Virtual queues, the `max[Q + arrival - service, 0]` update, and Lyapunov
//! diagnostics.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueueError {
    #[error("queue `{label}`: non-finite update (arrival {arrival}, service {service})")]
    NonFinite { label: String, arrival: f64, service: f64 },
    #[error("initial queue value must be finite and non-negative, got {0}")]
    BadInitial(f64),
    #[error("constraint gap needs at least one frame")]
    NoFrames,
    #[error("expected {expected} increments, got {got}")]
    Arity { expected: usize, got: usize },
}

/// One `(arrival, service)` pair applied to a queue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    pub arrival: f64,
    pub service: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirtualQueue {
    label: String,
    value: f64,
    initial: f64,
    net_increment: f64,
    history: Option<Vec<Increment>>,
}

impl VirtualQueue {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value: 0.0,
            initial: 0.0,
            net_increment: 0.0,
            history: None,
        }
    }

    pub fn with_initial(label: impl Into<String>, initial: f64) -> Result<Self, QueueError> {
        if !(initial.is_finite() && initial >= 0.0) {
            return Err(QueueError::BadInitial(initial));
        }
        Ok(Self {
            value: initial,
            initial,
            ..Self::new(label)
        })
    }

    /// Keeps every increment for replay.
    pub fn with_history(mut self) -> Self {
        self.history = Some(Vec::new());
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn history(&self) -> Option<&[Increment]> {
        self.history.as_deref()
    }

    /// Running sum of `arrival - service` over all updates.
    pub fn net_increment(&self) -> f64 {
        self.net_increment
    }

    pub fn update(&mut self, arrival: f64, service: f64) -> Result<f64, QueueError> {
        if !(arrival.is_finite() && service.is_finite()) {
            return Err(QueueError::NonFinite {
                label: self.label.clone(),
                arrival,
                service,
            });
        }
        self.value = (self.value + arrival - service).max(0.0);
        self.net_increment += arrival - service;
        if let Some(h) = &mut self.history {
            h.push(Increment { arrival, service });
        }
        Ok(self.value)
    }
}

/// Functional form of [`VirtualQueue::update`].
pub fn queue_update(q: &VirtualQueue, arrival: f64, service: f64) -> Result<VirtualQueue, QueueError> {
    let mut next = q.clone();
    next.update(arrival, service)?;
    Ok(next)
}

/// `(Q[K] - Q[0]) / K`, an upper bound on the running constraint violation.
pub fn constraint_gap(q: &VirtualQueue, frames: u64, initial: f64) -> Result<f64, QueueError> {
    if frames == 0 {
        return Err(QueueError::NoFrames);
    }
    Ok((q.value - initial) / frames as f64)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueueBank {
    queues: Vec<VirtualQueue>,
    frames: u64,
}

impl QueueBank {
    pub fn new(queues: Vec<VirtualQueue>) -> Self {
        Self { queues, frames: 0 }
    }

    pub fn with_labels<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self::new(labels.into_iter().map(VirtualQueue::new).collect())
    }

    /// Bank of `n` zero queues labelled `Q_1..Q_n`.
    pub fn zeros(n: usize) -> Self {
        Self::with_labels((1..=n).map(|i| format!("Q_{i}")))
    }

    /// Bank holding the given values as initial backlogs.
    pub fn from_values(values: &[f64]) -> Result<Self, QueueError> {
        let queues = values
            .iter()
            .enumerate()
            .map(|(i, &v)| VirtualQueue::with_initial(format!("Q_{}", i + 1), v))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(queues))
    }

    pub fn with_history(self) -> Self {
        Self {
            queues: self.queues.into_iter().map(VirtualQueue::with_history).collect(),
            ..self
        }
    }

    pub fn len(&self) -> usize {
        self.queues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queues.is_empty()
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }

    pub fn queues(&self) -> &[VirtualQueue] {
        &self.queues
    }

    pub fn get(&self, i: usize) -> &VirtualQueue {
        &self.queues[i]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.queues[i].value
    }

    pub fn values(&self) -> Vec<f64> {
        self.queues.iter().map(|q| q.value).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.queues.iter().map(|q| q.label.clone()).collect()
    }

    /// Applies one frame of increments, in queue order, and advances `K`.
    /// Returns the drift `L[k+1] - L[k]`.
    pub fn step(&mut self, increments: &[Increment]) -> Result<f64, QueueError> {
        if increments.len() != self.queues.len() {
            return Err(QueueError::Arity {
                expected: self.queues.len(),
                got: increments.len(),
            });
        }
        let before = lyapunov(self);
        for (q, inc) in self.queues.iter_mut().zip(increments) {
            q.update(inc.arrival, inc.service)?;
        }
        self.frames += 1;
        Ok(lyapunov(self) - before)
    }

    pub fn constraint_gaps(&self) -> Result<Vec<f64>, QueueError> {
        self.queues
            .iter()
            .map(|q| constraint_gap(q, self.frames, q.initial))
            .collect()
    }

    /// `(1/K) Σ (arrival - service)` per queue.
    pub fn mean_increments(&self) -> Result<Vec<f64>, QueueError> {
        if self.frames == 0 {
            return Err(QueueError::NoFrames);
        }
        let k = self.frames as f64;
        Ok(self.queues.iter().map(|q| q.net_increment / k).collect())
    }
}

/// `L = ½ Σ Q²`.
pub fn lyapunov(bank: &QueueBank) -> f64 {
    0.5 * bank.queues.iter().map(|q| q.value * q.value).sum::<f64>()
}

/// Euclidean norm of the queue vector.
pub fn norm(bank: &QueueBank) -> f64 {
    bank.queues.iter().map(|q| q.value * q.value).sum::<f64>().sqrt()
}

//! Trace CSV and summary TOML writers.
//!
//! Trace columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `k` | frame index |
//! | `c`, `m` | class (event for attribute models) and mode (action + 1) |
//! | `I`, `D`, `e`, `T` | idle time, busy time, penalty, frame length |
//! | `Q_1..Q_N` | virtual queues after the frame |
//! | `Z` | energy queue, empty when the controller has none |
//! | `theta` | running ratio estimate |
//! | `running_power` | time-average penalty so far |
//! | `running_rate_1..N` | time-average per-class processing rate so far |
//! | `ma_admission_rate`, `ma_queue` | trailing-window averages |

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::sim::{FrameTrace, RunSummary, Scenario};

use super::config::Emit;

/// Formats `x` with at most 9 significant digits.
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub fn trace_header(queue_count: usize, rate_count: usize) -> Vec<String> {
    let mut h: Vec<String> = ["k", "c", "m", "I", "D", "e", "T"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=queue_count).map(|n| format!("Q_{n}")));
    h.push("Z".into());
    h.extend(["theta", "running_power"].iter().map(|s| s.to_string()));
    h.extend((1..=rate_count).map(|n| format!("running_rate_{n}")));
    h.extend(["ma_admission_rate", "ma_queue"].iter().map(|s| s.to_string()));
    h
}

/// Writes trace rows as CSV; column counts are taken from the first row.
pub fn write_trace<W: Write>(out: W, rows: &[FrameTrace]) -> Result<(), csv::Error> {
    let queue_count = rows.first().map_or(0, |r| r.queues.len());
    let rate_count = rows.first().map_or(0, |r| r.running_rates.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(queue_count, rate_count))?;
    for r in rows {
        let mut rec = vec![r.k.to_string(), r.class.to_string(), r.mode.to_string()];
        rec.extend([r.idle, r.busy, r.penalty, r.frame].map(fmt_sig9));
        rec.extend(r.queues.iter().map(|&q| fmt_sig9(q)));
        rec.push(r.z.map(fmt_sig9).unwrap_or_default());
        rec.push(fmt_sig9(r.theta));
        rec.push(fmt_sig9(r.running_power));
        rec.extend(r.running_rates.iter().map(|&x| fmt_sig9(x)));
        rec.push(fmt_sig9(r.ma_admission_rate));
        rec.push(fmt_sig9(r.ma_queue));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Resolved run settings stored next to the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub description: String,
    pub emit: Emit,
    pub jobs: usize,
    pub bisection_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_window: Option<usize>,
    pub rate_multipliers: Vec<f64>,
}

/// One flat summary record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    #[serde(flatten)]
    pub settings: RunSettings,
    #[serde(flatten)]
    pub summary: RunSummary,
}

impl SummaryRecord {
    pub fn new(scenario: &Scenario, emit: Emit, jobs: usize, summary: RunSummary) -> Self {
        Self {
            settings: RunSettings {
                description: scenario.description.clone(),
                emit,
                jobs,
                bisection_tol: scenario.bisection_tol,
                theta_window: scenario.theta_window,
                rate_multipliers: scenario.rate_schedule.iter().map(|r| r.multiplier).collect(),
            },
            summary,
        }
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Run directory name, e.g. `one_class_V0.3`.
pub fn run_dir_name(scenario: &str, v: f64) -> String {
    format!("{scenario}_V{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(123456789.4), "123456789");
        assert_eq!(fmt_sig9(2.5), "2.5");
        assert_eq!(fmt_sig9(-7.0 / 15.0), "-0.466666667");
    }

    #[test]
    fn header_layout() {
        let h = trace_header(2, 2);
        assert_eq!(
            h.join(","),
            "k,c,m,I,D,e,T,Q_1,Q_2,Z,theta,running_power,running_rate_1,running_rate_2,ma_admission_rate,ma_queue"
        );
    }
}

//! Admission control plus scheduling: admitted rate and backlog as `V` grows,
//! with the average power held at the budget.
//!
//! ```text
//! cargo run --release --example flow_control
//! ```

use renewal_control::sim::{builtin_scenario, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("flow_control_ten_class").expect("built-in");
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "V", "admitted", "offered", "power", "max Q"
    );
    for v in [1.0, 10.0, 50.0, 100.0, 150.0] {
        let r = run_scenario(&base.clone().with_v(v).with_horizon(200_000))?;
        let n = r
            .queue_labels
            .iter()
            .position(|l| l == "Z")
            .unwrap_or(r.max_queues.len());
        let max_q = r.max_queues[..n].iter().copied().fold(0.0, f64::max);
        println!(
            "{v:>6} {:>10.6} {:>10.6} {:>10.6} {max_q:>10.1}",
            r.admission_rate, r.arrival_rate, r.time_average_power
        );
    }
    Ok(())
}

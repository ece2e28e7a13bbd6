//! Arrival rates double for the middle third of the run. Prints per-phase
//! admission, offered load and peak backlog, then a coarse moving-average trace.
//!
//! ```text
//! cargo run --release --example rate_switch
//! ```

use renewal_control::sim::{builtin_scenario, run_scenario_observed};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = builtin_scenario("rate_switch").expect("built-in").with_horizon(300_000);
    let mut samples = Vec::new();
    let r = run_scenario_observed(&s, &mut |f| {
        if f.k % 25_000 == 0 {
            samples.push((f.k, f.ma_admission_rate, f.ma_queue));
        }
    })?;
    for (i, start) in r.phase_starts.iter().enumerate() {
        println!(
            "phase from {start:>7}: admitted {:.4}  offered {:.4}  power {:.4}  max Q {:.0}",
            r.phase_admission_rates[i], r.phase_arrival_rates[i], r.phase_powers[i], r.phase_max_queues[i]
        );
    }
    println!("{:>8} {:>12} {:>10}", "k", "ma admit", "ma queue");
    for (k, a, q) in samples {
        println!("{k:>8} {a:>12.4} {q:>10.2}");
    }
    Ok(())
}

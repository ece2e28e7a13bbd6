//! One task class with two processing modes: compares the simulated power of
//! the ratio controller at several `V` values against the LFP oracle.
//!
//! ```text
//! cargo run --release --example one_class
//! ```

use renewal_control::lfp::{best_deterministic_policy, stationary_policy_optimum};
use renewal_control::sim::{builtin_scenario, run_scenario, ScenarioModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("one_class").expect("built-in");
    let ScenarioModel::Task(model) = &base.model else {
        unreachable!()
    };
    let oracle = stationary_policy_optimum(model, model.rates())?;
    println!(
        "oracle power {:.6}  p* = {:?}  I* = {}",
        oracle.power_opt, oracle.probabilities[0], oracle.idle
    );
    if let Some((action, value)) = best_deterministic_policy(model, model.rates()) {
        println!("best single-action policy {action:?} -> {value:.6}");
    }

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "V", "power", "mode1", "rate", "idle"
    );
    for v in [0.0, 0.05, 0.3, 1.0, 3.0] {
        let r = run_scenario(&base.clone().with_v(v))?;
        println!(
            "{:>6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            v, r.time_average_power, r.mode_fractions[0], r.processing_rates[0], r.mean_idle
        );
    }
    Ok(())
}

//! Accept-or-outsource decisions with energy bought at random prices.
//!
//! ```text
//! cargo run --release --example energy_price
//! ```

use renewal_control::sim::{builtin_scenario, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("energy_price").expect("built-in");
    println!("{:>6} {:>10} {:>12} {:>10}", "V", "cost", "work gap", "max Q");
    for v in [1.0, 10.0, 100.0] {
        let r = run_scenario(&base.clone().with_v(v).with_horizon(200_000))?;
        println!(
            "{v:>6} {:>10.5} {:>12.2e} {:>10.1}",
            r.time_average_power, r.constraint_gaps[0], r.max_queues[0]
        );
    }
    Ok(())
}

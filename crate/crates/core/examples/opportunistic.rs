//! Unit-slot opportunistic scheduling: average power needed to keep up with
//! random arrivals over a random channel.
//!
//! ```text
//! cargo run --release --example opportunistic
//! ```

use renewal_control::sim::{builtin_scenario, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("opportunistic").expect("built-in");
    println!("{:>6} {:>10} {:>12} {:>10}", "V", "power", "backlog gap", "max Q");
    for v in [1.0, 10.0, 100.0] {
        let r = run_scenario(&base.clone().with_v(v).with_horizon(200_000))?;
        println!(
            "{v:>6} {:>10.5} {:>12.2e} {:>10.1}",
            r.time_average_power, r.constraint_gaps[0], r.max_queues[0]
        );
    }
    Ok(())
}

//! Random events with per-event action sets: the bisection rule at zero
//! queues, then the online ratio rule on the computation/transmission device.
//!
//! ```text
//! cargo run --release --example random_events
//! ```

use renewal_control::controllers::{algorithm1_policy, ControllerConfig};
use renewal_control::queues::QueueBank;
use renewal_control::sim::{builtin_scenario, run_scenario, ScenarioModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("smart_device").expect("built-in");
    let ScenarioModel::Attribute(attr) = &base.model else {
        unreachable!()
    };
    let bank = QueueBank::zeros(attr.num_constraints());
    let p = algorithm1_policy(attr, &bank, &ControllerConfig::with_v(1.0), 1e-12)?;
    println!(
        "unconstrained best quality ratio {:.6} with actions {:?}",
        p.ratio, p.actions
    );

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}",
        "V", "-quality", "frame", "gap_rate", "gap_power"
    );
    for v in [1.0, 10.0, 50.0] {
        let r = run_scenario(&base.clone().with_v(v).with_horizon(200_000))?;
        println!(
            "{v:>5} {:>10.5} {:>10.5} {:>10.2e} {:>10.2e}",
            r.time_average_power, r.mean_frame, r.constraint_gaps[0], r.constraint_gaps[1]
        );
    }
    Ok(())
}

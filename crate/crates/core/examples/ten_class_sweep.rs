//! Ten task classes: time-average power versus `V` against the stationary
//! optimum and the `B/(V D_min)` bound, with per-class rate gaps.
//!
//! ```text
//! cargo run --release --example ten_class_sweep
//! ```

use rayon::prelude::*;
use renewal_control::controllers::AnalysisConstants;
use renewal_control::sim::{builtin_scenario, run_scenario, ScenarioModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("ten_class").expect("built-in");
    let ScenarioModel::Task(model) = &base.model else {
        unreachable!()
    };
    let c = AnalysisConstants::for_task_model(model, model.rates())?;
    println!("power_opt {:.6}  B {:.1}  beta {:.3}", c.power_opt, c.b, c.beta);

    let vs = [0.0, 0.05, 0.3, 1.0, 3.0, 10.0];
    let runs: Vec<_> = vs.par_iter().map(|&v| run_scenario(&base.clone().with_v(v))).collect();
    println!("{:>6} {:>10} {:>10} {:>12}", "V", "power", "bound", "max gap");
    for (v, r) in vs.iter().zip(runs) {
        let r = r?;
        let gap = r.constraint_gaps.iter().copied().fold(0.0, f64::max);
        let bound = if *v > 0.0 {
            format!("{:.6}", c.power_bound(*v))
        } else {
            "-".into()
        };
        println!("{v:>6} {:>10.6} {bound:>10} {gap:>12.3e}", r.time_average_power);
    }
    Ok(())
}

//! Solving a constrained linear fractional program by running the ratio rule
//! online and averaging the chosen vertices.
//!
//! ```text
//! cargo run --release --example online_lfp
//! ```

use renewal_control::lfp::charnes_cooper_solve;
use renewal_control::sim::{builtin_scenario, run_scenario, ScenarioModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = builtin_scenario("online_lfp").expect("built-in");
    let ScenarioModel::Lfp(inst) = &base.model else {
        unreachable!()
    };
    let exact = charnes_cooper_solve(inst)?;
    println!("exact optimum {:.7} at {:?}", exact.value, exact.x);
    for v in [10.0, 100.0, 1000.0] {
        let r = run_scenario(&base.clone().with_v(v))?;
        let viol = inst.violations(&r.lfp_x_mean).into_iter().fold(0.0, f64::max);
        println!(
            "V {v:>6}: value {:.7}  x {:?}  max violation {viol:.2e}",
            inst.evaluate(&r.lfp_x_mean),
            r.lfp_x_mean.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}

//! Linear fractional programs: box greedy rule against brute force, and
//! Charnes–Cooper against Dinkelbach on a constrained instance.
//!
//! ```text
//! cargo run --example lfp_oracle
//! ```

use renewal_control::lfp::{
    brute_force_box_lfp, charnes_cooper_solve, dinkelbach_solve, solve_box_lfp, BoxLfpInstance,
};
use renewal_control::sim::scenarios::online_lfp_instance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = BoxLfpInstance::new(vec![3.0, -1.0, 2.0, -4.0, 0.5], vec![2.0, 1.0, 0.5, 3.0, 1.0])?;
    let greedy = solve_box_lfp(&inst)?;
    let brute = brute_force_box_lfp(&inst, 20)?;
    println!("box: greedy x = {:?} value {:.6}", greedy.x, greedy.value);
    println!("box: brute  x = {:?} value {:.6}", brute.x, brute.value);

    let c = online_lfp_instance();
    let cc = charnes_cooper_solve(&c)?;
    let dk = dinkelbach_solve(&c, 1e-12)?;
    println!("constrained: Charnes-Cooper x = {:?} value {:.9}", cc.x, cc.value);
    println!("constrained: Dinkelbach     x = {:?} value {:.9}", dk.x, dk.value);
    Ok(())
}

//! Local Lyapunov exponents of the chaotic parameter scheme, both in
//! phase space (the logistic orbit itself) and on the cost landscape
//! (through the full circuit). Both converge to the ergodic value
//! c ln 2 as depth grows, which is what makes the trainable region
//! shrink exponentially.

use qacoa::chaos::{gle, phase_space_lle};
use qacoa::diagnostics::cost_landscape_lle;
use qacoa::sat::{random_instance, CostDiagonal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    let c = 100;
    println!("ergodic exponent c ln 2 = {:.4} at c = {c}", gle(c));

    // phase space: deep orbits at random seeds all land near c ln 2
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("\nphase-space exponents at p = 50:");
    for _ in 0..5 {
        let theta: f64 = rng.random();
        let lle = phase_space_lle(theta, 50, c)?;
        println!("  theta = {theta:.6}  lambda = {:.4}  (dev {:+.2}%)", lle, (lle / gle(c) - 1.0) * 100.0);
    }

    // cost landscape: the same exponent shows up in the gradient of F
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = random_instance(6, 3, 4.2, &mut rng)?;
    let diag = CostDiagonal::build(&inst)?;
    let report = cost_landscape_lle(&diag, c, [rng.random(), rng.random()], 8)?;
    println!("\ncost-landscape exponents, N = {}, theta = [{:.4}, {:.4}]:", inst.n_vars, report.theta[0], report.theta[1]);
    println!("{:>3} {:>12} {:>12} {:>12} {:>12}", "p", "cost g1", "cost g2", "phase g1", "phase g2");
    for (k, &p) in report.depths.iter().enumerate() {
        println!(
            "{:>3} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            p, report.cost_lle[k][0], report.cost_lle[k][1], report.phase_lle[k][0], report.phase_lle[k][1]
        );
    }
    println!("target: {:.4}", report.gle);
    Ok(())
}

//! Distribution of |F(theta') - F(theta)| under random sign flips of
//! every parameter. For the standard scheme small steps make small
//! differentials; for a deep chaotic scheme the same step size already
//! decorrelates the landscape, so the differential CDF barely depends
//! on the step scale.

use qacoa::diagnostics::differential_cdf;
use qacoa::sat::{random_instance, CostDiagonal};
use qacoa::schemes::SchemeSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let inst = random_instance(6, 3, 4.2, &mut rng)?;
    let diag = CostDiagonal::build(&inst)?;
    let p = 6;
    let grid: Vec<f64> = (0..=12).map(|i| i as f64 * 0.5).collect();

    println!("instance: N={}, M={}", inst.n_vars, inst.m());
    for scale in [0.001, 0.01, 0.1] {
        println!("\nperturbation scale {scale}:");
        println!("{:<28} {}", "scheme", "Phi(Delta) at Delta = 0.5, 1, 2, 4");
        let std_theta: Vec<f64> = (0..2 * p).map(|i| 0.3 + 0.02 * i as f64).collect();
        let std_cdf = differential_cdf(
            &SchemeSpec::Standard { p },
            &std_theta,
            &diag,
            scale,
            &grid,
            400,
            21,
        )?;
        let cha_cdf = differential_cdf(
            &SchemeSpec::PureChaotic { p, c: 100 },
            &[0.31, 0.67],
            &diag,
            scale,
            &grid,
            400,
            21,
        )?;
        for (label, cdf) in [("standard", std_cdf), ("pure-chaotic c=100", cha_cdf)] {
            let at = |d: f64| cdf.phi[grid.iter().position(|&g| g == d).unwrap()];
            println!(
                "{:<28} {:.3}  {:.3}  {:.3}  {:.3}",
                label,
                at(0.5),
                at(1.0),
                at(2.0),
                at(4.0)
            );
        }
    }
    Ok(())
}

//! How fast the two-parameter cost landscape oscillates as the map
//! speed grows. The mixing metric is the mean absolute F difference
//! between neighboring grid points, normalized by the spectral range;
//! chaotic schedules at large c fold the landscape until neighboring
//! points decorrelate.

use qacoa::diagnostics::mixing_metric;
use qacoa::sat::{random_instance, CostDiagonal};
use qacoa::schemes::SchemeSpec;
use qacoa::simulator::landscape_scan;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inst = random_instance(6, 3, 4.2, &mut rng)?;
    let diag = CostDiagonal::build(&inst)?;
    println!("instance: N={}, M={}, spectrum [{}, {}]", inst.n_vars, inst.m(), diag.c_min, diag.c_max);

    println!("\n{:>3} {:>4} {:>10}", "p", "c", "mixing");
    for p in [1usize, 2, 4] {
        for c in [1u64, 5, 20, 100] {
            let spec = SchemeSpec::PureChaotic { p, c };
            let scan = landscape_scan(&spec, &diag, 48)?;
            println!("{:>3} {:>4} {:>10.5}", p, c, mixing_metric(&scan, &diag)?);
        }
    }

    // coarse picture of one slice: F(theta1, 0.4) along theta1
    let spec = SchemeSpec::PureChaotic { p: 4, c: 100 };
    let scan = landscape_scan(&spec, &diag, 48)?;
    let row = scan.grid.iter().position(|&t| (t - 0.4).abs() < 0.02).unwrap();
    println!("\nF along theta1 at theta2 ~ 0.4 (p=4, c=100):");
    for (i, &f) in scan.values.iter().map(|r| &r[row]).enumerate() {
        if i % 4 == 0 {
            let bars = ((f - diag.c_min as f64) / (diag.c_max - diag.c_min) as f64 * 40.0) as usize;
            println!("theta1={:>5.2} {:>7.3} {}", scan.grid[i], f, "#".repeat(bars));
        }
    }
    Ok(())
}

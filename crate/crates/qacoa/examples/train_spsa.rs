//! Train one instance with SPSA under a standard schedule and a pure
//! chaotic schedule at the same depth, printing the approximation
//! ratio as the optimization proceeds. The chaotic schedule optimizes
//! two parameters regardless of depth; the standard one optimizes 2p.

use qacoa::sat::{random_instance, CostDiagonal};
use qacoa::schemes::SchemeSpec;
use qacoa::spsa::{optimize, SpsaConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = random_instance(5, 3, 4.2, &mut rng)?;
    let diag = CostDiagonal::build(&inst)?;
    let p = 4;
    let cfg = SpsaConfig::new(1000, 99);

    for spec in [
        SchemeSpec::Standard { p },
        SchemeSpec::PureChaotic { p, c: 100 },
    ] {
        let trace = optimize(&spec, &diag, &cfg)?;
        println!(
            "\n{} (p={}, {} parameters, {} evaluations)",
            spec.label(),
            p,
            spec.n_theta(),
            trace.n_evaluations
        );
        println!("{:>6} {:>9} {:>7} {:>9}", "j", "F", "AR", "h/N");
        for j in [1usize, 50, 150, 400, 1000] {
            let rec = trace.record_at(j).expect("within j_max");
            println!(
                "{:>6} {:>9.4} {:>7.4} {:>9.4}",
                j, rec.f, rec.ar, rec.misassignment
            );
        }
        println!(
            "best: F={:.4} AR={:.4} at theta={:?}",
            trace.best_f,
            trace.best_ar,
            trace
                .best_theta
                .iter()
                .map(|t| (t * 1e3).round() / 1e3)
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}

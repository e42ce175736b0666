//! Draw random MAX 3-SAT instances at the hard density and inspect
//! their energy spectra: clause counts, optimum energies, and the
//! number of optimal assignments.

use qacoa::sat::{random_instance, CostDiagonal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("{:>4} {:>3} {:>3} {:>6} {:>6} {:>6} {:>9}", "inst", "N", "M", "c_min", "c_max", "#opt", "hash");
    for i in 0..6 {
        let inst = random_instance(8, 3, 4.2, &mut rng)?;
        let diag = CostDiagonal::build(&inst)?;
        println!(
            "{:>4} {:>3} {:>3} {:>6} {:>6} {:>6} {:>9}",
            i,
            inst.n_vars,
            inst.m(),
            diag.c_min,
            diag.c_max,
            diag.solutions.len(),
            &inst.content_hash()[..8]
        );
    }

    // the same instance in DIMACS CNF, ready for any SAT tool
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inst = random_instance(5, 3, 4.2, &mut rng)?;
    println!("\n{}", inst.to_dimacs());
    Ok(())
}

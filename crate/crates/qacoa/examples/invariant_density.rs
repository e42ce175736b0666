//! The logistic map at r = 4 is ergodic with the arcsine invariant
//! density 1 / (pi sqrt(z(1-z))). One long orbit visits the unit
//! interval with exactly that histogram, which is why orbit averages
//! match integrals against the density.

use qacoa::chaos::{arcsine_cdf, arcsine_pdf, invariant_density_check, iterate, logistic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    // histogram of one orbit against the arcsine pdf
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut x: f64 = rng.random();
    for _ in 0..1000 {
        x = logistic(x);
    }
    let bins = 20;
    let mut counts = vec![0usize; bins];
    let n = 200_000;
    for _ in 0..n {
        x = logistic(x);
        counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    println!("{:>10} {:>9} {:>9}", "bin", "orbit", "arcsine");
    for (b, &count) in counts.iter().enumerate() {
        let lo = b as f64 / bins as f64;
        let hi = lo + 1.0 / bins as f64;
        let empirical = count as f64 / n as f64 * bins as f64;
        let exact = (arcsine_cdf(hi) - arcsine_cdf(lo)) * bins as f64;
        println!("[{:.2},{:.2}) {:>9.4} {:>9.4}", lo, hi, empirical, exact);
    }
    println!("pdf at 1/2: {:.6} (2/pi = {:.6})", arcsine_pdf(0.5), 2.0 / std::f64::consts::PI);

    // formal KS check over a million iterates
    let check = invariant_density_check(1_000_000, 1000, 77)?;
    println!(
        "\nKS distance over {} iterates: {:.5}",
        check.n_samples, check.ks_statistic
    );

    // the ergodic average of ln|l'(x)| / something simpler: ln|4(1-2x)|
    // equals ln 2, the Lyapunov exponent of the map
    let mut x = iterate(0.377001, 500)?;
    let mut acc = 0.0;
    let steps = 500_000;
    for _ in 0..steps {
        acc += (4.0 * (1.0 - 2.0 * x)).abs().ln();
        x = logistic(x);
    }
    println!(
        "orbit average of ln|4(1-2x)| = {:.5} (ln 2 = {:.5})",
        acc / steps as f64,
        std::f64::consts::LN_2
    );
    Ok(())
}

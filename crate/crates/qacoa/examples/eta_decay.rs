//! The linearizability window eta bounds how far theta can move while
//! the linearized orbit response stays accurate. Its median over
//! uniform seeds decays like exp(-c ln 2 (p - 1)): every extra layer
//! halves the window c times over.

use qacoa::diagnostics::eta_sweep;

fn main() -> qacoa::Result<()> {
    for c in [1u64, 10] {
        let depths: Vec<usize> = (2..=8).collect();
        let sweep = eta_sweep(c, &depths, 20_000, 7)?;
        println!("c = {c}:");
        println!("{:>3} {:>12} {:>12} {:>12}", "p", "eta median", "q1", "q3");
        for (k, &p) in sweep.depths.iter().enumerate() {
            println!(
                "{:>3} {:>12.3e} {:>12.3e} {:>12.3e}",
                p, sweep.median[k], sweep.q1[k], sweep.q3[k]
            );
        }
        println!(
            "ln-median slope {:.4} vs ergodic prediction {:.4}\n",
            sweep.slope, sweep.expected_slope
        );
    }
    Ok(())
}

//! The four parameterizations and how they unfold into per-layer
//! angles. Hybrids interpolate between the standard scheme (every
//! layer free) and the pure chaotic scheme (two seeds drive all
//! layers): the delayed hybrid optimizes the first p_t layers and
//! lets the map continue the schedule, the iterated hybrid re-seeds
//! the map every T layers.

use qacoa::schemes::{angles, SchemeSpec};

fn show(spec: &SchemeSpec, theta: &[f64]) -> qacoa::Result<()> {
    let sched = angles(spec, theta)?;
    println!("\n{} | {} free parameters", spec.label(), spec.n_theta());
    print!("  f:");
    for v in &sched.f {
        print!(" {v:.4}");
    }
    print!("\n  g:");
    for v in &sched.g {
        print!(" {v:.4}");
    }
    println!();
    Ok(())
}

fn main() -> qacoa::Result<()> {
    let p = 8;
    let c = 2;

    show(&SchemeSpec::Standard { p }, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85])?;
    show(&SchemeSpec::PureChaotic { p, c }, &[0.3, 0.6])?;
    // note 0.5 would be a poor last direct angle: its orbit collapses
    // to the fixed point at 0 after two steps
    show(&SchemeSpec::DelayedHybrid { p, p_t: 3, c }, &[0.1, 0.2, 0.3, 0.4, 0.45, 0.6])?;
    show(&SchemeSpec::IteratedHybrid { p, t: 4, c }, &[0.3, 0.6, 0.4, 0.7])?;

    // reduction sanity: T = 1 re-seeds every layer, which is exactly
    // the standard scheme
    let theta: Vec<f64> = (0..16).map(|i| (i as f64 + 1.0) / 20.0).collect();
    let std_sched = angles(&SchemeSpec::Standard { p }, &theta)?;
    let it_sched = angles(&SchemeSpec::IteratedHybrid { p, t: 1, c: 7 }, &theta)?;
    println!(
        "\niterated-hybrid(T=1) == standard, bit for bit: {}",
        std_sched == it_sched
    );

    let pc_sched = angles(&SchemeSpec::PureChaotic { p, c }, &[0.3, 0.6])?;
    let dh_sched = angles(&SchemeSpec::DelayedHybrid { p, p_t: 1, c }, &[0.3, 0.6])?;
    println!(
        "delayed-hybrid(p_t=1) == pure-chaotic, bit for bit: {}",
        pc_sched == dh_sched
    );
    Ok(())
}

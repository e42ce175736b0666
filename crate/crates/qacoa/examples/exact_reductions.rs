//! Structural identities that hold bit for bit, useful as quick sanity
//! anchors: the uniform state sees M 2^-K violated clauses on average,
//! schedule reductions collapse schemes into each other exactly, and
//! matched seeds make reduced schemes produce identical SPSA runs.

use qacoa::sat::{random_instance, CostDiagonal};
use qacoa::schemes::SchemeSpec;
use qacoa::simulator::evaluate;
use qacoa::spsa::{optimize, SpsaConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qacoa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let inst = random_instance(7, 3, 4.0, &mut rng)?;
    let diag = CostDiagonal::build(&inst)?;

    // zero angles leave the uniform superposition untouched, and each
    // K-clause is violated by exactly 2^(N-K) of the 2^N assignments
    let spec = SchemeSpec::Standard { p: 3 };
    let f0 = evaluate(&spec, &vec![0.0; spec.n_theta()], &diag)?.f_value;
    let exact = inst.m() as f64 / (1u64 << inst.k) as f64;
    println!("uniform-state F = {f0}, M 2^-K = {exact}, diff = {:e}", (f0 - exact).abs());

    // a pure chaotic scheme at p = 1 never iterates the map
    let cfg = SpsaConfig::new(200, 5);
    let t_std = optimize(&SchemeSpec::Standard { p: 1 }, &diag, &cfg)?;
    let t_cha = optimize(&SchemeSpec::PureChaotic { p: 1, c: 50 }, &diag, &cfg)?;
    println!(
        "standard p=1 vs pure-chaotic p=1, same seed: best_f {} == {} is {}",
        t_std.best_f,
        t_cha.best_f,
        t_std.best_f == t_cha.best_f
    );

    // a delayed hybrid whose transition depth covers every layer is
    // the standard scheme
    let t_std4 = optimize(&SchemeSpec::Standard { p: 4 }, &diag, &cfg)?;
    let t_dh4 = optimize(
        &SchemeSpec::DelayedHybrid { p: 4, p_t: 4, c: 9 },
        &diag,
        &cfg,
    )?;
    println!(
        "standard p=4 vs delayed-hybrid(p_t=4), same seed: traces identical is {}",
        t_std4.to_json()? == t_dh4.to_json()?
    );
    Ok(())
}

//! Scaled-down map-speed comparison: pure chaotic schedules at
//! c in {1, 5, 100} against the standard parameterization on hard
//! 3-SAT instances at shallow depth. Larger map speeds tend to win
//! among the chaotic runs, and at p=4 the best of them are
//! competitive with the standard schedule.
//!
//! Takes around a minute; this is the library-level route to what
//! `qacoa run --preset fig2-small` does on a larger grid.

use qacoa::runner::{run, InstanceSource, RunConfig, SchemeKind, SpsaSettings};

fn main() -> qacoa::Result<()> {
    let cfg = RunConfig {
        seed: 7,
        source: InstanceSource::Generate {
            n_vars: 5,
            k: 3,
            alpha: 4.2,
            count: 3,
            seed: None,
        },
        schemes: vec![SchemeKind::Standard, SchemeKind::PureChaotic],
        p: vec![4],
        c: vec![1, 5, 100],
        restarts: 10,
        checkpoints: Some(vec![50, 150, 400, 1000]),
        parallelism: None,
        attach_lle: false,
        spsa: SpsaSettings {
            j_max: 1000,
            ..SpsaSettings::default()
        },
    };
    let out = run(&cfg)?;
    println!(
        "{} cells, {} failed, config {}",
        out.records.len(),
        out.n_failed,
        out.config_hash
    );
    println!(
        "\n{:<14} {:>4} {:>6} {:>8} {:>8} {:>8}",
        "scheme", "c", "j", "AR med", "AR q1", "AR q3"
    );
    for row in &out.aggregate {
        if row.j == 1000 || row.j == 150 {
            println!(
                "{:<14} {:>4} {:>6} {:>8.4} {:>8.4} {:>8.4}",
                row.scheme, row.c, row.j, row.ar_median, row.ar_q1, row.ar_q3
            );
        }
    }
    Ok(())
}

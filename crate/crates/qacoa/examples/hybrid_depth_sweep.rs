//! Delayed-hybrid schedules against standard and pure chaotic ones at
//! a depth where the chaotic scheme alone has stopped training well.
//! The hybrid keeps a trainable prefix of p_t free layer pairs and
//! lets the map drive the rest.
//!
//! Runs a small sweep; expect roughly a minute.

use qacoa::runner::{run, InstanceSource, RunConfig, SchemeKind, SpsaSettings};

fn main() -> qacoa::Result<()> {
    let cfg = RunConfig {
        seed: 19,
        source: InstanceSource::Generate {
            n_vars: 5,
            k: 3,
            alpha: 4.2,
            count: 3,
            seed: None,
        },
        schemes: vec![
            SchemeKind::Standard,
            SchemeKind::PureChaotic,
            SchemeKind::DelayedHybrid { transition: 2 },
            SchemeKind::DelayedHybrid { transition: 6 },
            SchemeKind::IteratedHybrid { block: 6 },
        ],
        p: vec![12],
        c: vec![100],
        restarts: 6,
        checkpoints: Some(vec![150, 1000]),
        parallelism: None,
        attach_lle: false,
        spsa: SpsaSettings {
            j_max: 1000,
            ..SpsaSettings::default()
        },
    };
    let out = run(&cfg)?;
    println!("{} cells, {} failed", out.records.len(), out.n_failed);
    println!(
        "\n{:<24} {:>6} {:>8} {:>8}",
        "scheme", "j", "AR med", "AR mean"
    );
    for row in &out.aggregate {
        println!(
            "{:<24} {:>6} {:>8.4} {:>8.4}",
            row.scheme, row.j, row.ar_median, row.ar_mean
        );
    }
    println!("\nfree parameters per scheme at p = 12:");
    for kind in &cfg.schemes {
        let spec = kind.spec(12, 100);
        println!("  {:<24} {}", spec.kind_label(), spec.n_theta());
    }
    Ok(())
}

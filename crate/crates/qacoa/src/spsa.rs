//! Simultaneous perturbation stochastic approximation over the unit box.
//!
//! Gains follow the standard two-sequence schedule
//!   a_j = a / (A + j + 1)^0.602,   c_j = c0 / (j + 1)^0.101,
//! with A = j_max / 100 and c0 = 0.1. The step scale a is calibrated
//! from one extra two-point probe at the start point: a = dtheta_min *
//! (A + 1)^0.602 / g, where g is the geometric mean of the nonzero
//! components of that first gradient estimate, so early iterations move
//! each parameter by about dtheta_min.
//!
//! Every iteration spends exactly three objective calls: two probes for
//! the gradient estimate and one clean evaluation at the current theta,
//! recorded in the trace. Probe points and updates are clipped into
//! [0,1]^n before evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;

use crate::chaos::gle;
use crate::sat::CostDiagonal;
use crate::schemes::SchemeSpec;
use crate::simulator::evaluate;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SpsaConfig {
    pub j_max: usize,
    pub seed: u64,
    /// Step scale; calibrated from the initial gradient probe when None.
    pub a: Option<f64>,
    /// Perturbation scale before decay.
    pub c0: f64,
    /// Stability offset; defaults to j_max / 100 when None.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    /// Target size of early parameter moves, used by calibration.
    pub delta_theta_min: f64,
    /// Shrinks c0 by exp(-gle(c) (p-1)) for pure chaotic schemes so the
    /// probe step matches the exponentially contracted trainable window.
    /// Floored at 1e-12. Off by default.
    pub ergodic_gain_rescale: bool,
}

impl SpsaConfig {
    pub fn new(j_max: usize, seed: u64) -> Self {
        SpsaConfig {
            j_max,
            seed,
            a: None,
            c0: 0.1,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
            delta_theta_min: 0.01,
            ergodic_gain_rescale: false,
        }
    }
}

/// One objective evaluation: the minimized value plus the two tracked
/// quality metrics. Non-circuit objectives may report zeros for those.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalPoint {
    pub f: f64,
    pub ar: f64,
    pub misassignment: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub j: usize,
    /// Parameters before this iteration's update.
    pub theta: Vec<f64>,
    /// Clean (probe-free) objective value at theta.
    pub f: f64,
    pub ar: f64,
    pub misassignment: f64,
    pub a_j: f64,
    pub c_j: f64,
    /// Rademacher perturbation signs used by this iteration's probes.
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpsaTrace {
    pub records: Vec<IterationRecord>,
    /// Minimizer over the clean evaluations.
    pub best_theta: Vec<f64>,
    pub best_f: f64,
    pub best_ar: f64,
    pub best_misassignment: f64,
    /// Total objective calls, including the calibration probe.
    pub n_evaluations: usize,
    /// Step scale actually used (calibrated or supplied).
    pub a_used: f64,
    /// Perturbation scale actually used (after any ergodic rescale).
    pub c0_used: f64,
}

impl SpsaTrace {
    /// Record for iteration j (1-based).
    pub fn record_at(&self, j: usize) -> Option<&IterationRecord> {
        self.records.get(j.checked_sub(1)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Per-iteration summary without theta and signs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,f,ar,misassignment,a_j,c_j\n");
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.j, r.f, r.ar, r.misassignment, r.a_j, r.c_j
            )
            .unwrap();
        }
        out
    }
}

struct Counting<F> {
    inner: F,
    n: usize,
}

impl<F: FnMut(&[f64]) -> Result<EvalPoint>> Counting<F> {
    fn call(&mut self, theta: &[f64], iteration: usize) -> Result<EvalPoint> {
        self.n += 1;
        (self.inner)(theta).map_err(|e| Error::ObjectiveFailure {
            iteration,
            source: Box::new(e),
        })
    }
}

fn clip(theta: &mut [f64]) {
    for t in theta.iter_mut() {
        *t = t.clamp(0.0, 1.0);
    }
}

/// Optimizes the circuit objective F(theta) for one scheme on one
/// instance. See [`optimize_objective`] for the generic driver.
pub fn optimize(spec: &SchemeSpec, diag: &CostDiagonal, cfg: &SpsaConfig) -> Result<SpsaTrace> {
    spec.validate()?;
    let mut rescale = 1.0;
    if cfg.ergodic_gain_rescale {
        if let SchemeSpec::PureChaotic { p, c } = *spec {
            rescale = (-(gle(c)) * (p as f64 - 1.0)).exp();
        }
    }
    let objective = |theta: &[f64]| -> Result<EvalPoint> {
        let r = evaluate(spec, theta, diag)?;
        Ok(EvalPoint {
            f: r.f_value,
            ar: r.ar,
            misassignment: r.misassignment,
        })
    };
    optimize_objective(objective, spec.n_theta(), cfg, rescale)
}

/// SPSA over an arbitrary objective on [0,1]^n_theta. `c0_rescale`
/// multiplies c0 (1.0 leaves it untouched); values below 1 are floored
/// so the perturbation never collapses to zero.
pub fn optimize_objective<F>(
    objective: F,
    n_theta: usize,
    cfg: &SpsaConfig,
    c0_rescale: f64,
) -> Result<SpsaTrace>
where
    F: FnMut(&[f64]) -> Result<EvalPoint>,
{
    if n_theta == 0 {
        return Err(Error::InvalidDimension("objective has no parameters".into()));
    }
    if cfg.j_max == 0 {
        return Err(Error::InvalidArgument("SPSA needs j_max >= 1".into()));
    }
    if !(cfg.c0 > 0.0) || !(cfg.delta_theta_min > 0.0) {
        return Err(Error::InvalidArgument(
            "SPSA gains c0 and delta_theta_min must be positive".into(),
        ));
    }
    let c0_used = if c0_rescale < 1.0 {
        (cfg.c0 * c0_rescale).max(1e-12)
    } else {
        cfg.c0
    };
    let big_a = cfg.big_a.unwrap_or(cfg.j_max as f64 / 100.0);
    let c_at = |j: usize| c0_used / ((j + 1) as f64).powf(cfg.gamma);

    let mut obj = Counting {
        inner: objective,
        n: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta: Vec<f64> = (0..n_theta).map(|_| rng.random()).collect();

    let draw_signs = |rng: &mut ChaCha8Rng| -> Vec<i8> {
        (0..n_theta)
            .map(|_| if rng.random::<bool>() { 1i8 } else { -1i8 })
            .collect()
    };
    let probe = |obj: &mut Counting<F>,
                 theta: &[f64],
                 signs: &[i8],
                 c_j: f64,
                 iteration: usize|
     -> Result<Vec<f64>> {
        let mut plus = theta.to_vec();
        let mut minus = theta.to_vec();
        for i in 0..theta.len() {
            plus[i] += c_j * signs[i] as f64;
            minus[i] -= c_j * signs[i] as f64;
        }
        clip(&mut plus);
        clip(&mut minus);
        let fp = obj.call(&plus, iteration)?.f;
        let fm = obj.call(&minus, iteration)?.f;
        Ok(signs
            .iter()
            .map(|&s| (fp - fm) / (2.0 * c_j * s as f64))
            .collect())
    };

    let a_used = match cfg.a {
        Some(a) => a,
        None => {
            // Calibration: one extra two-point probe at the start point.
            let signs = draw_signs(&mut rng);
            let ghat = probe(&mut obj, &theta, &signs, c_at(1), 0)?;
            let nonzero: Vec<f64> = ghat.iter().filter(|g| **g != 0.0).map(|g| g.abs()).collect();
            if nonzero.is_empty() {
                return Err(Error::CalibrationZeroGradient);
            }
            let log_mean = nonzero.iter().map(|g| g.ln()).sum::<f64>() / nonzero.len() as f64;
            cfg.delta_theta_min * (big_a + 1.0).powf(cfg.alpha) / log_mean.exp()
        }
    };

    let mut records = Vec::with_capacity(cfg.j_max);
    let mut best: Option<usize> = None;
    for j in 1..=cfg.j_max {
        let a_j = a_used / (big_a + j as f64 + 1.0).powf(cfg.alpha);
        let c_j = c_at(j);
        let clean = obj.call(&theta, j)?;
        let signs = draw_signs(&mut rng);
        let ghat = probe(&mut obj, &theta, &signs, c_j, j)?;
        records.push(IterationRecord {
            j,
            theta: theta.clone(),
            f: clean.f,
            ar: clean.ar,
            misassignment: clean.misassignment,
            a_j,
            c_j,
            signs,
        });
        if best.map_or(true, |b| clean.f < records[b].f) {
            best = Some(records.len() - 1);
        }
        for i in 0..n_theta {
            theta[i] -= a_j * ghat[i];
        }
        clip(&mut theta);
    }
    let best = &records[best.expect("j_max >= 1")];
    Ok(SpsaTrace {
        best_theta: best.theta.clone(),
        best_f: best.f,
        best_ar: best.ar,
        best_misassignment: best.misassignment,
        n_evaluations: obj.n,
        a_used,
        c0_used,
        records,
    })
}

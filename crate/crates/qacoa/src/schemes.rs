//! Parameterization schemes: from a free vector theta in [0,1]^n to the
//! per-layer angle schedule (f_m, g_m), m = 1..p.
//!
//! All angles are kept normalized to the unit interval; the simulator
//! owns the 2*pi and pi factors. The chaotic schemes thread theta
//! components through the logistic map at speed c, so a depth-p circuit
//! can be driven by as few as two numbers:
//!
//! - standard: (f_m, g_m) = (theta_{2m-1}, theta_{2m}), 2p parameters.
//! - pure chaotic: (l^(c(m-1))(theta_1), l^(c(m-1))(theta_2)).
//! - delayed hybrid: standard up to layer p_t, then the chaotic tail
//!   seeded from the last free pair.
//! - iterated hybrid: blocks of T layers, each block a fresh chaotic
//!   burst from its own seed pair.
//!
//! Degenerate settings collapse between schemes bit for bit: T = 1
//! reproduces standard, p_t >= p reproduces standard, and the first
//! block of an iterated hybrid is the pure chaotic scheme.

use serde::{Deserialize, Serialize};

use crate::chaos::{logistic, OrbitDeriver};
use crate::{Error, Result};

/// A concrete scheme at fixed depth. `c` is the map speed (iterations
/// of the logistic map consumed per layer step).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum SchemeSpec {
    Standard { p: usize },
    PureChaotic { p: usize, c: u64 },
    DelayedHybrid { p: usize, c: u64, p_t: usize },
    IteratedHybrid { p: usize, c: u64, t: usize },
}

impl SchemeSpec {
    pub fn depth(&self) -> usize {
        match *self {
            SchemeSpec::Standard { p }
            | SchemeSpec::PureChaotic { p, .. }
            | SchemeSpec::DelayedHybrid { p, .. }
            | SchemeSpec::IteratedHybrid { p, .. } => p,
        }
    }

    /// Map speed; 0 for the standard scheme, which never runs the map.
    pub fn map_speed(&self) -> u64 {
        match *self {
            SchemeSpec::Standard { .. } => 0,
            SchemeSpec::PureChaotic { c, .. }
            | SchemeSpec::DelayedHybrid { c, .. }
            | SchemeSpec::IteratedHybrid { c, .. } => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth() == 0 {
            return Err(Error::InvalidDimension("scheme depth p must be >= 1".into()));
        }
        match *self {
            SchemeSpec::Standard { .. } => Ok(()),
            SchemeSpec::PureChaotic { c, .. } => {
                if c == 0 {
                    return Err(Error::InvalidArgument("map speed c must be >= 1".into()));
                }
                Ok(())
            }
            SchemeSpec::DelayedHybrid { c, p_t, .. } => {
                if c == 0 {
                    return Err(Error::InvalidArgument("map speed c must be >= 1".into()));
                }
                if p_t == 0 {
                    return Err(Error::InvalidArgument(
                        "transition depth p_t must be >= 1".into(),
                    ));
                }
                Ok(())
            }
            SchemeSpec::IteratedHybrid { c, t, .. } => {
                if c == 0 {
                    return Err(Error::InvalidArgument("map speed c must be >= 1".into()));
                }
                if t == 0 {
                    return Err(Error::InvalidArgument("block length T must be >= 1".into()));
                }
                Ok(())
            }
        }
    }

    /// Length of the free parameter vector. Components are interleaved
    /// as [gamma_1, beta_1, gamma_2, beta_2, ...].
    pub fn n_theta(&self) -> usize {
        match *self {
            SchemeSpec::Standard { p } => 2 * p,
            SchemeSpec::PureChaotic { .. } => 2,
            SchemeSpec::DelayedHybrid { p, p_t, .. } => 2 * p_t.min(p),
            SchemeSpec::IteratedHybrid { p, t, .. } => 2 * ((p - 1) / t + 1),
        }
    }

    /// Stable text label used in CSV tables and run records.
    pub fn label(&self) -> String {
        match *self {
            SchemeSpec::Standard { .. } => "standard".into(),
            SchemeSpec::PureChaotic { c, .. } => format!("pure-chaotic(c={c})"),
            SchemeSpec::DelayedHybrid { c, p_t, .. } => format!("delayed-hybrid(c={c},pt={p_t})"),
            SchemeSpec::IteratedHybrid { c, t, .. } => format!("iterated-hybrid(c={c},T={t})"),
        }
    }

    /// Label without the map speed, for tables that carry c in its own
    /// column.
    pub fn kind_label(&self) -> String {
        match *self {
            SchemeSpec::Standard { .. } => "standard".into(),
            SchemeSpec::PureChaotic { .. } => "pure-chaotic".into(),
            SchemeSpec::DelayedHybrid { p_t, .. } => format!("delayed-hybrid(pt={p_t})"),
            SchemeSpec::IteratedHybrid { t, .. } => format!("iterated-hybrid(T={t})"),
        }
    }
}

/// Per-layer normalized angles: layer m applies cost angle f[m-1] and
/// mixer angle g[m-1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSchedule {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl AngleSchedule {
    pub fn depth(&self) -> usize {
        self.f.len()
    }
}

fn check_theta(spec: &SchemeSpec, theta: &[f64]) -> Result<()> {
    spec.validate()?;
    let want = spec.n_theta();
    if theta.len() != want {
        return Err(Error::InvalidDimension(format!(
            "scheme {} at depth {} takes {} parameters, got {}",
            spec.label(),
            spec.depth(),
            want,
            theta.len()
        )));
    }
    for (j, &t) in theta.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "theta[{j}] = {t} outside the unit box"
            )));
        }
    }
    Ok(())
}

/// Unrolls theta into the full angle schedule.
pub fn angles(spec: &SchemeSpec, theta: &[f64]) -> Result<AngleSchedule> {
    check_theta(spec, theta)?;
    let p = spec.depth();
    let mut f = Vec::with_capacity(p);
    let mut g = Vec::with_capacity(p);
    match *spec {
        SchemeSpec::Standard { .. } => {
            for m in 0..p {
                f.push(theta[2 * m]);
                g.push(theta[2 * m + 1]);
            }
        }
        SchemeSpec::PureChaotic { c, .. } => {
            let (mut x, mut y) = (theta[0], theta[1]);
            for m in 0..p {
                if m > 0 {
                    for _ in 0..c {
                        x = logistic(x);
                        y = logistic(y);
                    }
                }
                f.push(x);
                g.push(y);
            }
        }
        SchemeSpec::DelayedHybrid { c, p_t, .. } => {
            let free = p_t.min(p);
            for m in 0..free {
                f.push(theta[2 * m]);
                g.push(theta[2 * m + 1]);
            }
            let (mut x, mut y) = (theta[2 * (free - 1)], theta[2 * (free - 1) + 1]);
            for _ in free..p {
                for _ in 0..c {
                    x = logistic(x);
                    y = logistic(y);
                }
                f.push(x);
                g.push(y);
            }
        }
        SchemeSpec::IteratedHybrid { c, t, .. } => {
            let mut m = 0;
            let mut block = 0;
            while m < p {
                let (mut x, mut y) = (theta[2 * block], theta[2 * block + 1]);
                for e in 0..t.min(p - m) {
                    if e > 0 {
                        for _ in 0..c {
                            x = logistic(x);
                            y = logistic(y);
                        }
                    }
                    f.push(x);
                    g.push(y);
                }
                m += t;
                block += 1;
            }
        }
    }
    Ok(AngleSchedule { f, g })
}

/// Jacobian of the schedule map: entry (m, j) is the derivative of a
/// layer angle with respect to theta_j. Entries are plain f64 chain
/// products and saturate to +/-inf once c(m-1) grows past a few hundred
/// factors; the diagnostics module re-derives them in log space instead
/// of going through this type.
#[derive(Debug, Clone)]
pub struct AngleJacobian {
    pub p: usize,
    pub n_theta: usize,
    /// 2p rows of length n_theta, interleaved (f_1, g_1, f_2, g_2, ...).
    pub rows: Vec<Vec<f64>>,
}

impl AngleJacobian {
    /// d f_m / d theta_j, with the layer index m starting at 1.
    pub fn df(&self, m: usize, j: usize) -> f64 {
        self.rows[2 * (m - 1)][j]
    }

    /// d g_m / d theta_j, with the layer index m starting at 1.
    pub fn dg(&self, m: usize, j: usize) -> f64 {
        self.rows[2 * (m - 1) + 1][j]
    }

    /// Chain rule: pulls per-layer angle gradients back to theta space.
    pub fn pull_back(&self, grad_f: &[f64], grad_g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_theta];
        for m in 1..=self.p {
            for j in 0..self.n_theta {
                out[j] += self.df(m, j) * grad_f[m - 1] + self.dg(m, j) * grad_g[m - 1];
            }
        }
        out
    }
}

/// Derivative products h along one seed's orbit: entry e is
/// d/dtheta l^(c e)(theta) for e = 0..count-1, as plain f64.
fn seed_derivatives(theta: f64, c: u64, count: usize) -> Result<Vec<f64>> {
    let mut od = OrbitDeriver::new(theta)?;
    let mut out = Vec::with_capacity(count);
    for e in 0..count {
        if e > 0 {
            od.advance(c as usize);
        }
        out.push(od.h().to_f64());
    }
    Ok(out)
}

pub fn angle_jacobian(spec: &SchemeSpec, theta: &[f64]) -> Result<AngleJacobian> {
    check_theta(spec, theta)?;
    let p = spec.depth();
    let n_theta = spec.n_theta();
    let mut rows = vec![vec![0.0; n_theta]; 2 * p];
    match *spec {
        SchemeSpec::Standard { .. } => {
            for m in 0..p {
                rows[2 * m][2 * m] = 1.0;
                rows[2 * m + 1][2 * m + 1] = 1.0;
            }
        }
        SchemeSpec::PureChaotic { c, .. } => {
            let hx = seed_derivatives(theta[0], c, p)?;
            let hy = seed_derivatives(theta[1], c, p)?;
            for m in 0..p {
                rows[2 * m][0] = hx[m];
                rows[2 * m + 1][1] = hy[m];
            }
        }
        SchemeSpec::DelayedHybrid { c, p_t, .. } => {
            let free = p_t.min(p);
            for m in 0..free {
                rows[2 * m][2 * m] = 1.0;
                rows[2 * m + 1][2 * m + 1] = 1.0;
            }
            if p > free {
                let hx = seed_derivatives(theta[2 * (free - 1)], c, p - free + 1)?;
                let hy = seed_derivatives(theta[2 * (free - 1) + 1], c, p - free + 1)?;
                for m in free..p {
                    rows[2 * m][2 * (free - 1)] = hx[m - free + 1];
                    rows[2 * m + 1][2 * (free - 1) + 1] = hy[m - free + 1];
                }
            }
        }
        SchemeSpec::IteratedHybrid { c, t, .. } => {
            let mut m = 0;
            let mut block = 0;
            while m < p {
                let len = t.min(p - m);
                let hx = seed_derivatives(theta[2 * block], c, len)?;
                let hy = seed_derivatives(theta[2 * block + 1], c, len)?;
                for e in 0..len {
                    rows[2 * (m + e)][2 * block] = hx[e];
                    rows[2 * (m + e) + 1][2 * block + 1] = hy[e];
                }
                m += t;
                block += 1;
            }
        }
    }
    Ok(AngleJacobian { p, n_theta, rows })
}

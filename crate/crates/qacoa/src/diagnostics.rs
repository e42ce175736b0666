//! Trainability diagnostics: Lyapunov spectra of the cost landscape,
//! linearizability windows, control-noise moments, and differential
//! statistics, plus the small statistical toolbox they report through.
//!
//! The central object is the cost-landscape local Lyapunov exponent of
//! a pure chaotic scheme at depth p and speed c,
//!
//!   lambda_i = (1/(p-1)) ln( |dF^(p)/dtheta_i| / |dF^(1)/dtheta_i| ),
//!
//! whose numerator expands through the chain rule into
//! sum_m h_{m,c}(theta_i) dF/dangle_{m,i}. The h products overflow f64
//! long before the depths of interest, so the sum runs in signed log
//! space; the per-layer angle gradients themselves are tame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaos::{gle, nonlinear_remainder, LogSigned, OrbitDeriver};
use crate::sat::CostDiagonal;
use crate::schemes::{angles, SchemeSpec};
use crate::simulator::{evaluate, layer_angle_gradient, LandscapeScan};
use crate::{Error, Result};

/// Perturbation used for control-noise moments unless overridden; small
/// enough that theta + delta would be absorbed in f64, which the split
/// recurrence in [`crate::chaos::nonlinear_remainder`] is built to survive.
pub const NOISE_DELTA: f64 = 1e-18;

// ---------------------------------------------------------------------------
// statistics helpers
// ---------------------------------------------------------------------------

/// Linear-interpolation quantile (the common "type 7" rule) over an
/// ascending slice.
pub fn quantile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InvalidArgument("quantile of empty sample".into()));
    }
    let q = q.clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares y = slope x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "linear fit needs two equally long samples of size >= 2".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("linear fit over constant x".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        // ties share the average rank
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        da += (x - ma) * (x - ma);
        db += (y - mb) * (y - mb);
    }
    num / (da * db).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpearmanTest {
    pub rho: f64,
    /// One-sided exact permutation p-value for a decreasing trend.
    pub p_value: f64,
}

/// Spearman rank correlation with an exact permutation p-value against
/// the one-sided alternative "y decreases with x". Exhaustive over all
/// n! pairings, so n is capped at 8.
pub fn spearman_decreasing(x: &[f64], y: &[f64]) -> Result<SpearmanTest> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(Error::InvalidArgument(
            "trend test needs matched samples of size >= 3".into(),
        ));
    }
    if n > 8 {
        return Err(Error::InvalidArgument(
            "exact permutation test is capped at n = 8".into(),
        ));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let rho = pearson(&rx, &ry);
    // Heap's algorithm over the y ranks.
    let mut perm = ry.clone();
    let mut counters = vec![0usize; n];
    let mut at_most = 0usize;
    let mut total = 1usize;
    let tol = 1e-12;
    if pearson(&rx, &perm) <= rho + tol {
        at_most += 1;
    }
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            total += 1;
            if pearson(&rx, &perm) <= rho + tol {
                at_most += 1;
            }
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(SpearmanTest {
        rho,
        p_value: at_most as f64 / total as f64,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("KS test needs nonempty samples".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite values"));
    sb.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite values"));
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        if sa[i] <= sb[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / sa.len() as f64;
        let fb = j as f64 / sb.len() as f64;
        d = d.max((fa - fb).abs());
    }
    Ok(d)
}

/// Rejection threshold for the two-sample KS statistic at the 5% level:
/// 1.358 sqrt((n + m) / (n m)).
pub fn ks_threshold_5pct(n: usize, m: usize) -> f64 {
    1.358 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

// ---------------------------------------------------------------------------
// cost-landscape Lyapunov spectrum
// ---------------------------------------------------------------------------

/// Lyapunov exponents of one pure chaotic scheme at theta, for every
/// depth 2..=p_max, alongside the phase-space exponents of the driving
/// orbit and the ergodic target c ln 2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LleReport {
    pub c: u64,
    pub theta: [f64; 2],
    /// Depths p = 2..=p_max, aligned with the per-depth vectors.
    pub depths: Vec<usize>,
    /// Cost-landscape exponent per theta component. +inf marks a
    /// vanishing depth-1 denominator, -inf a vanishing numerator.
    pub cost_lle: Vec<[f64; 2]>,
    /// Phase-space exponent of the driving orbit per component.
    pub phase_lle: Vec<[f64; 2]>,
    pub gle: f64,
    /// Slope factors within 1e-12 of zero seen along each orbit.
    pub near_singular: [usize; 2],
}

/// Computes the cost-landscape spectrum. The depth-1 gradient at the
/// same theta is the denominator for every depth.
pub fn cost_landscape_lle(
    diag: &CostDiagonal,
    c: u64,
    theta: [f64; 2],
    p_max: usize,
) -> Result<LleReport> {
    if p_max < 2 {
        return Err(Error::InvalidArgument(
            "cost-landscape spectrum needs p_max >= 2".into(),
        ));
    }
    let base = angles(&SchemeSpec::PureChaotic { p: 1, c }, &theta)?;
    let (g1f, g1g) = layer_angle_gradient(&base, diag)?;
    let denom = [g1f[0].abs(), g1g[0].abs()];

    // h_{m,c}(theta_i) for m = 1..p_max, in log space.
    let mut h = [Vec::with_capacity(p_max), Vec::with_capacity(p_max)];
    for i in 0..2 {
        let mut od = OrbitDeriver::new(theta[i])?;
        h[i].push(od.h());
        for _ in 1..p_max {
            od.advance(c as usize);
            h[i].push(od.h());
        }
    }
    let near_singular = {
        let count = |t: f64| -> Result<usize> {
            let mut od = OrbitDeriver::new(t)?;
            od.advance(c as usize * (p_max - 1));
            Ok(od.near_singular_count())
        };
        [count(theta[0])?, count(theta[1])?]
    };

    let mut depths = Vec::new();
    let mut cost_lle = Vec::new();
    let mut phase_lle = Vec::new();
    for p in 2..=p_max {
        let sched = angles(&SchemeSpec::PureChaotic { p, c }, &theta)?;
        let (gf, gg) = layer_angle_gradient(&sched, diag)?;
        let mut row = [0.0f64; 2];
        let mut phase_row = [0.0f64; 2];
        for i in 0..2 {
            let grads = if i == 0 { &gf } else { &gg };
            let mut num = LogSigned::ZERO;
            for m in 0..p {
                num = num.add(h[i][m].mul(LogSigned::from_f64(grads[m])));
            }
            row[i] = if denom[i] == 0.0 {
                f64::INFINITY
            } else if num.is_zero() {
                f64::NEG_INFINITY
            } else {
                (num.ln_abs - denom[i].ln()) / (p - 1) as f64
            };
            phase_row[i] = if h[i][p - 1].is_zero() {
                f64::NEG_INFINITY
            } else {
                h[i][p - 1].ln_abs / (p - 1) as f64
            };
        }
        depths.push(p);
        cost_lle.push(row);
        phase_lle.push(phase_row);
    }
    Ok(LleReport {
        c,
        theta,
        depths,
        cost_lle,
        phase_lle,
        gle: gle(c),
        near_singular,
    })
}

/// Spectrum reports at uniformly drawn theta pairs.
pub fn cost_landscape_lle_samples(
    diag: &CostDiagonal,
    c: u64,
    p_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<LleReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let theta = [rng.random(), rng.random()];
        out.push(cost_landscape_lle(diag, c, theta, p_max)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// eta linearizability sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct EtaSweep {
    pub c: u64,
    pub depths: Vec<usize>,
    pub n_samples: usize,
    /// Median and quartiles of eta per depth, over finite samples.
    pub median: Vec<f64>,
    pub q1: Vec<f64>,
    pub q3: Vec<f64>,
    /// Samples with an exactly vanishing denominator (eta = +inf).
    pub n_infinite: Vec<usize>,
    /// ln(median eta) per depth, the series the decay fit runs on.
    pub ln_median: Vec<f64>,
    /// Least-squares slope of ln median vs p; the ergodic prediction
    /// is -c ln 2.
    pub slope: f64,
    pub expected_slope: f64,
}

/// Medians of the linearizability bound eta_{p,c} = |2 h / dh| over
/// uniform theta, for each requested depth.
pub fn eta_sweep(c: u64, depths: &[usize], n_samples: usize, seed: u64) -> Result<EtaSweep> {
    if depths.is_empty() || n_samples == 0 {
        return Err(Error::InvalidArgument(
            "eta sweep needs at least one depth and one sample".into(),
        ));
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) || depths[0] < 1 {
        return Err(Error::InvalidArgument(
            "depths must be strictly increasing and >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ln_eta: Vec<Vec<f64>> = vec![Vec::with_capacity(n_samples); depths.len()];
    let mut n_infinite = vec![0usize; depths.len()];
    for _ in 0..n_samples {
        let theta: f64 = rng.random();
        let mut od = OrbitDeriver::new(theta)?;
        let mut done = 0usize;
        for (k, &p) in depths.iter().enumerate() {
            let target = c as usize * (p - 1);
            od.advance(target - done);
            done = target;
            if od.dh().is_zero() {
                n_infinite[k] += 1;
            } else if od.h().is_zero() {
                ln_eta[k].push(f64::NEG_INFINITY);
            } else {
                ln_eta[k].push(2.0f64.ln() + od.h().ln_abs - od.dh().ln_abs);
            }
        }
    }
    let mut median = Vec::new();
    let mut q1 = Vec::new();
    let mut q3 = Vec::new();
    let mut ln_median = Vec::new();
    for series in ln_eta.iter_mut() {
        if series.is_empty() {
            // every sample was infinite; p = 1 always lands here
            ln_median.push(f64::INFINITY);
            median.push(f64::INFINITY);
            q1.push(f64::INFINITY);
            q3.push(f64::INFINITY);
            continue;
        }
        series.sort_unstable_by(|a, b| a.partial_cmp(b).expect("no NaN in ln eta"));
        let med = quantile(series, 0.5)?;
        ln_median.push(med);
        median.push(med.exp());
        q1.push(quantile(series, 0.25)?.exp());
        q3.push(quantile(series, 0.75)?.exp());
    }
    // Depth 1 has no curvature and sits at +inf; keep it out of the fit.
    let fit_points: Vec<(f64, f64)> = depths
        .iter()
        .zip(&ln_median)
        .filter(|(_, m)| m.is_finite())
        .map(|(&p, &m)| (p as f64, m))
        .collect();
    let (slope, _) = if fit_points.len() >= 2 {
        let xs: Vec<f64> = fit_points.iter().map(|&(x, _)| x).collect();
        let ys: Vec<f64> = fit_points.iter().map(|&(_, y)| y).collect();
        let fit = linear_fit(&xs, &ys)?;
        (fit.slope, fit.intercept)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(EtaSweep {
        c,
        depths: depths.to_vec(),
        n_samples,
        median,
        q1,
        q3,
        n_infinite,
        ln_median,
        slope,
        expected_slope: -gle(c),
    })
}

// ---------------------------------------------------------------------------
// control-noise moments
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct NoiseMoment {
    pub c: u64,
    pub delta: f64,
    pub depths: Vec<usize>,
    pub n_samples: usize,
    /// zeta_{p,p}(theta)_{ii} samples per depth, per component i.
    pub samples: Vec<[Vec<f64>; 2]>,
    /// Mean and standard deviation of zeta per depth, per component.
    pub mean: Vec<[f64; 2]>,
    pub std: Vec<[f64; 2]>,
    /// Mean zeta / delta^2, the normalized moment the growth fit uses.
    pub mean_normalized: Vec<[f64; 2]>,
    /// True where every sample vanished; at depth 1 this is exact, at
    /// larger depths it flags a delta too small to resolve at all.
    pub all_zero: Vec<bool>,
}

/// Diagonal second moment of the control-noise term under the exact
/// two-point perturbation distribution delta_theta_i in {+delta, -delta}:
///   zeta_{p,p}(theta)_{ii} = (xi(+delta)^2 + xi(-delta)^2) / 2,
/// with xi the nonlinear remainder after c(p-1) map steps.
pub fn control_noise_moment(
    c: u64,
    depths: &[usize],
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<NoiseMoment> {
    if depths.is_empty() || n_samples == 0 {
        return Err(Error::InvalidArgument(
            "noise sweep needs at least one depth and one sample".into(),
        ));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "perturbation delta = {delta} must be positive and finite"
        )));
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) || depths[0] < 1 {
        return Err(Error::InvalidArgument(
            "depths must be strictly increasing and >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<[Vec<f64>; 2]> =
        (0..depths.len()).map(|_| [Vec::new(), Vec::new()]).collect();
    for _ in 0..n_samples {
        for i in 0..2 {
            let theta: f64 = rng.random();
            for (k, &p) in depths.iter().enumerate() {
                let n = c as usize * (p - 1);
                let plus = nonlinear_remainder(theta, delta, n)?;
                let minus = nonlinear_remainder(theta, -delta, n)?;
                samples[k][i].push((plus * plus + minus * minus) / 2.0);
            }
        }
    }
    let mut mean = Vec::new();
    let mut std = Vec::new();
    let mut mean_normalized = Vec::new();
    let mut all_zero = Vec::new();
    for per_depth in &samples {
        let (m0, s0) = mean_std(&per_depth[0]);
        let (m1, s1) = mean_std(&per_depth[1]);
        mean.push([m0, m1]);
        std.push([s0, s1]);
        mean_normalized.push([m0 / (delta * delta), m1 / (delta * delta)]);
        all_zero.push(
            per_depth[0].iter().all(|&z| z == 0.0) && per_depth[1].iter().all(|&z| z == 0.0),
        );
    }
    Ok(NoiseMoment {
        c,
        delta,
        depths: depths.to_vec(),
        n_samples,
        samples,
        mean,
        std,
        mean_normalized,
        all_zero,
    })
}

// ---------------------------------------------------------------------------
// differential CDF and landscape mixing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DifferentialCdf {
    pub scale: f64,
    pub n_perturbations: usize,
    /// |F(theta') - F(theta)| per perturbation, ascending.
    pub delta_f: Vec<f64>,
    pub deltas: Vec<f64>,
    /// phi[k] = fraction of delta_f at most deltas[k].
    pub phi: Vec<f64>,
}

/// Empirical CDF of the cost differential under random sign
/// perturbations theta' = clip(theta + scale * s), s in {+-1}^n.
pub fn differential_cdf(
    spec: &SchemeSpec,
    theta: &[f64],
    diag: &CostDiagonal,
    scale: f64,
    delta_grid: &[f64],
    n_perturbations: usize,
    seed: u64,
) -> Result<DifferentialCdf> {
    if n_perturbations == 0 {
        return Err(Error::InvalidArgument("need at least one perturbation".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "perturbation scale {scale} must be positive"
        )));
    }
    let base = evaluate(spec, theta, diag)?.f_value;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta_f = Vec::with_capacity(n_perturbations);
    for _ in 0..n_perturbations {
        let perturbed: Vec<f64> = theta
            .iter()
            .map(|&t| {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                (t + scale * s).clamp(0.0, 1.0)
            })
            .collect();
        delta_f.push((evaluate(spec, &perturbed, diag)?.f_value - base).abs());
    }
    delta_f.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite differentials"));
    let phi = delta_grid
        .iter()
        .map(|&d| {
            let count = delta_f.partition_point(|&x| x <= d);
            count as f64 / n_perturbations as f64
        })
        .collect();
    Ok(DifferentialCdf {
        scale,
        n_perturbations,
        delta_f,
        deltas: delta_grid.to_vec(),
        phi,
    })
}

/// Landscape mixing metric: mean absolute difference of F between
/// grid-adjacent theta_2 values, normalized by the spectral range.
/// Larger values mean faster oscillation of the landscape.
pub fn mixing_metric(scan: &LandscapeScan, diag: &CostDiagonal) -> Result<f64> {
    if diag.c_max == diag.c_min {
        return Err(Error::UndefinedMetric { value: diag.c_max });
    }
    let n = scan.grid.len();
    if n < 2 {
        return Err(Error::InvalidArgument("mixing metric needs a grid of >= 2".into()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in &scan.values {
        for j in 0..n - 1 {
            sum += (row[j + 1] - row[j]).abs();
            count += 1;
        }
    }
    Ok(sum / count as f64 / (diag.c_max - diag.c_min) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{random_instance, CostDiagonal};
    use crate::simulator::landscape_scan;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_for(seed: u64, n: usize, k: usize, alpha: f64) -> CostDiagonal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(n, k, alpha, &mut rng).unwrap();
        CostDiagonal::build(&inst).unwrap()
    }

    #[test]
    fn quantile_interpolates_linearly() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&xs, 1.0).unwrap(), 4.0);
        assert_eq!(quantile(&xs, 0.5).unwrap(), 2.5);
        assert_eq!(quantile(&xs, 0.25).unwrap(), 1.75);
        assert!(quantile(&[], 0.5).is_err());
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|&v| -2.5 * v + 7.0).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(fit.slope, -2.5, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 7.0, max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn spearman_detects_monotone_trends() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let down = [9.0, 7.0, 5.5, 2.0, 1.0];
        let t = spearman_decreasing(&x, &down).unwrap();
        assert_relative_eq!(t.rho, -1.0, max_relative = 1e-12);
        assert_relative_eq!(t.p_value, 1.0 / 120.0, max_relative = 1e-12);

        let up = [1.0, 2.0, 3.0, 4.0, 5.0];
        let t = spearman_decreasing(&x, &up).unwrap();
        assert_relative_eq!(t.rho, 1.0, max_relative = 1e-12);
        assert!(t.p_value > 0.9);

        assert!(spearman_decreasing(&x[..2], &down[..2]).is_err());
        let big = vec![0.0; 9];
        assert!(spearman_decreasing(&big, &big).is_err());
    }

    #[test]
    fn ks_statistic_and_threshold() {
        let a: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let b: Vec<f64> = (0..100).map(|i| i as f64 / 100.0 + 0.5).collect();
        let d = two_sample_ks(&a, &b).unwrap();
        assert!(d > 0.45, "shifted samples should separate, d = {d}");
        let same = two_sample_ks(&a, &a).unwrap();
        assert!(same < 0.011, "identical samples, d = {same}");
        assert_relative_eq!(
            ks_threshold_5pct(100, 100),
            1.358 * (200.0f64 / 10_000.0).sqrt(),
            max_relative = 1e-12
        );
    }

    /// At small products the log-space chain rule must agree with a
    /// direct finite difference of F through the scheme.
    #[test]
    fn cost_lle_matches_finite_difference_route() {
        let diag = diag_for(3, 5, 3, 4.2);
        let c = 1;
        let theta = [0.31, 0.57];
        let p = 3;
        let report = cost_landscape_lle(&diag, c, theta, p).unwrap();
        let fd = 1e-6;
        let spec = SchemeSpec::PureChaotic { p, c };
        let base1 = SchemeSpec::PureChaotic { p: 1, c };
        for i in 0..2 {
            let mut plus = theta;
            let mut minus = theta;
            plus[i] += fd;
            minus[i] -= fd;
            let num = (evaluate(&spec, &plus, &diag).unwrap().f_value
                - evaluate(&spec, &minus, &diag).unwrap().f_value)
                / (2.0 * fd);
            let den = (evaluate(&base1, &plus, &diag).unwrap().f_value
                - evaluate(&base1, &minus, &diag).unwrap().f_value)
                / (2.0 * fd);
            let expect = (num.abs() / den.abs()).ln() / (p - 1) as f64;
            let got = report.cost_lle[report.depths.iter().position(|&d| d == p).unwrap()][i];
            assert!(
                (got - expect).abs() < 1e-3,
                "component {i}: {got} vs fd {expect}"
            );
        }
    }

    #[test]
    fn cost_lle_report_is_well_formed_at_large_speed() {
        let diag = diag_for(5, 5, 3, 4.2);
        let report = cost_landscape_lle(&diag, 100, [0.3711, 0.6189], 6).unwrap();
        assert_eq!(report.depths, vec![2, 3, 4, 5, 6]);
        assert_relative_eq!(report.gle, 100.0 * std::f64::consts::LN_2);
        for row in &report.cost_lle {
            for &v in row {
                assert!(v.is_finite(), "spectrum should be finite here: {v}");
            }
        }
        // At c = 100 the exponent is already near the ergodic value.
        let last = report.cost_lle.last().unwrap();
        for &v in last {
            assert!((v - report.gle).abs() < 0.2 * report.gle, "lle {v}");
        }
    }

    #[test]
    fn eta_sweep_median_matches_closed_form_at_depth_two() {
        // c = 1, p = 2: eta = |1 - 2 theta|, whose median over U(0,1)
        // is 1/2.
        let sweep = eta_sweep(1, &[2], 20_000, 11).unwrap();
        assert!((sweep.median[0] - 0.5).abs() < 0.02, "median {}", sweep.median[0]);
        assert_eq!(sweep.n_infinite[0], 0);
    }

    #[test]
    fn eta_sweep_decays_at_the_ergodic_rate() {
        let depths = [2, 3, 4, 5, 6];
        let sweep = eta_sweep(3, &depths, 4000, 17).unwrap();
        assert_relative_eq!(sweep.expected_slope, -3.0 * std::f64::consts::LN_2);
        assert!(
            (sweep.slope - sweep.expected_slope).abs() < 0.15 * sweep.expected_slope.abs(),
            "slope {} vs {}",
            sweep.slope,
            sweep.expected_slope
        );
        assert!(eta_sweep(1, &[3, 2], 10, 0).is_err(), "unsorted depths");
    }

    #[test]
    fn noise_moment_exact_values_at_low_depth() {
        let delta = 1e-6;
        let nm = control_noise_moment(1, &[1, 2], delta, 50, 23).unwrap();
        // p = 1: no map steps, xi = 0 exactly.
        assert_eq!(nm.mean[0], [0.0, 0.0]);
        assert!(nm.all_zero[0]);
        // p = 2: xi = -r delta^2 independent of theta, so zeta is the
        // same exact constant for every sample.
        let quad = 4.0 * delta * delta;
        for i in 0..2 {
            for &z in &nm.samples[1][i] {
                assert_eq!(z, quad * quad);
            }
            assert_relative_eq!(nm.mean[1][i], quad * quad, max_relative = 1e-14);
            assert!(nm.std[1][i] < quad * quad * 1e-12);
        }
        assert!(!nm.all_zero[1]);
    }

    #[test]
    fn noise_moment_grows_with_depth_at_tiny_delta() {
        let nm = control_noise_moment(1, &[2, 4, 6, 8], NOISE_DELTA, 400, 31).unwrap();
        for k in 1..nm.depths.len() {
            assert!(
                nm.mean_normalized[k][0] > nm.mean_normalized[k - 1][0],
                "mean zeta should grow: {:?}",
                nm.mean_normalized
            );
        }
        // Components are statistically interchangeable.
        let d = two_sample_ks(&nm.samples[2][0], &nm.samples[2][1]).unwrap();
        assert!(d < ks_threshold_5pct(400, 400), "ks {d}");
    }

    #[test]
    fn differential_cdf_is_a_cdf() {
        let diag = diag_for(7, 5, 3, 4.2);
        let spec = SchemeSpec::PureChaotic { p: 4, c: 2 };
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let cdf = differential_cdf(&spec, &[0.3, 0.6], &diag, 0.05, &grid, 300, 41).unwrap();
        assert_eq!(cdf.phi.len(), grid.len());
        for w in cdf.phi.windows(2) {
            assert!(w[1] >= w[0], "phi must be nondecreasing");
        }
        assert_eq!(*cdf.phi.last().unwrap(), 1.0, "grid covers the range");
        let again = differential_cdf(&spec, &[0.3, 0.6], &diag, 0.05, &grid, 300, 41).unwrap();
        assert_eq!(cdf.delta_f, again.delta_f, "seeded determinism");
    }

    #[test]
    fn mixing_metric_increases_with_chaotic_depth() {
        let diag = diag_for(9, 6, 3, 1.0);
        let shallow = landscape_scan(&SchemeSpec::PureChaotic { p: 1, c: 100 }, &diag, 17).unwrap();
        let deep = landscape_scan(&SchemeSpec::PureChaotic { p: 3, c: 100 }, &diag, 17).unwrap();
        let m_shallow = mixing_metric(&shallow, &diag).unwrap();
        let m_deep = mixing_metric(&deep, &diag).unwrap();
        assert!(
            m_deep > m_shallow,
            "deep {m_deep} should exceed shallow {m_shallow}"
        );
    }
}

//! The r = 4 logistic map and the derivative machinery built on it.
//!
//! Everything chaotic in this crate flows through l(x) = 4x(1-x) on the
//! unit interval. A schedule at map speed c reads off every c-th iterate,
//! so layer m uses l^(c(m-1))(theta) and its theta-derivative is the
//! product
//!
//!   h_{m,c}(theta) = prod_{i=1..c(m-1)} 4 (1 - 2 l^(i-1)(theta)).
//!
//! Those products reach 2^700 and beyond at the depths and speeds we
//! sweep, far outside f64 range, so the workhorse here is a log-domain
//! signed representation with stable recurrences for the product, its
//! theta-derivative, and the nonlinear remainder of a perturbed orbit.
//! Plain f64 routes are kept alongside as oracles; they overflow once
//! c(m-1) passes roughly 500 factors and are documented as such.

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Result, LOGISTIC_R};

/// Factors with |1 - 2x| below this are flagged as near-singular in
/// orbit records; they sit within float noise of a zero derivative.
pub const NEAR_SINGULAR_TOL: f64 = 1e-12;

/// One application of the fully chaotic logistic map. The unit interval
/// maps exactly into itself in f64 arithmetic.
#[inline]
pub fn logistic(x: f64) -> f64 {
    LOGISTIC_R * x * (1.0 - x)
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::MapDomain { x });
    }
    Ok(())
}

fn check_speed(c: u64) -> Result<()> {
    if c == 0 {
        return Err(Error::InvalidArgument("map speed c must be >= 1".into()));
    }
    Ok(())
}

/// l^n(x0).
pub fn iterate(x0: f64, n: usize) -> Result<f64> {
    check_unit(x0)?;
    let mut x = x0;
    for _ in 0..n {
        x = logistic(x);
    }
    Ok(x)
}

/// Signed magnitude in log space: `sign * exp(ln_abs)`. Sign 0 is the
/// exact zero (ln_abs = -inf). Used wherever derivative products exceed
/// f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSigned {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub const ONE: LogSigned = LogSigned { sign: 1, ln_abs: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            LogSigned::ZERO
        } else {
            LogSigned {
                sign: if v > 0.0 { 1 } else { -1 },
                ln_abs: v.abs().ln(),
            }
        }
    }

    /// Back to f64, saturating to +/-inf outside range.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn mul(self, other: LogSigned) -> LogSigned {
        if self.sign == 0 || other.sign == 0 {
            return LogSigned::ZERO;
        }
        LogSigned {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn square(self) -> LogSigned {
        if self.sign == 0 {
            return LogSigned::ZERO;
        }
        LogSigned {
            sign: 1,
            ln_abs: 2.0 * self.ln_abs,
        }
    }

    /// Signed log-sum-exp of two terms.
    pub fn add(self, other: LogSigned) -> LogSigned {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (hi, lo) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let t = (lo.ln_abs - hi.ln_abs).exp();
        if hi.sign == lo.sign {
            LogSigned {
                sign: hi.sign,
                ln_abs: hi.ln_abs + t.ln_1p(),
            }
        } else if t >= 1.0 {
            // equal magnitudes, opposite signs: exact cancellation
            LogSigned::ZERO
        } else {
            LogSigned {
                sign: hi.sign,
                ln_abs: hi.ln_abs + (-t).ln_1p(),
            }
        }
    }
}

/// Walks an orbit while accumulating the derivative product and its
/// theta-derivative in log space. After n steps:
///   value = l^n(theta), h = d/dtheta l^n, dh = d^2/dtheta^2 l^n,
/// via the joint recurrence (D_0 = 1, S_0 = 0)
///   S_{n+1} = r (1 - 2 y_n) S_n - 2 r D_n^2,
///   D_{n+1} = r (1 - 2 y_n) D_n,
///   y_{n+1} = l(y_n).
#[derive(Debug, Clone)]
pub struct OrbitDeriver {
    y: f64,
    d: LogSigned,
    s: LogSigned,
    steps: usize,
    near_singular: usize,
}

impl OrbitDeriver {
    pub fn new(theta: f64) -> Result<Self> {
        check_unit(theta)?;
        Ok(OrbitDeriver {
            y: theta,
            d: LogSigned::ONE,
            s: LogSigned::ZERO,
            steps: 0,
            near_singular: 0,
        })
    }

    pub fn step(&mut self) {
        let slope = LOGISTIC_R * (1.0 - 2.0 * self.y);
        if (1.0 - 2.0 * self.y).abs() < NEAR_SINGULAR_TOL {
            self.near_singular += 1;
        }
        let slope_ls = LogSigned::from_f64(slope);
        let quad = LogSigned {
            sign: -1,
            ln_abs: (2.0 * LOGISTIC_R).ln(),
        }
        .mul(self.d.square());
        self.s = slope_ls.mul(self.s).add(quad);
        self.d = slope_ls.mul(self.d);
        self.y = logistic(self.y);
        self.steps += 1;
    }

    pub fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.step();
        }
    }

    /// Current iterate l^steps(theta).
    pub fn value(&self) -> f64 {
        self.y
    }

    /// Derivative product in log space.
    pub fn h(&self) -> LogSigned {
        self.d
    }

    /// Theta-derivative of the product in log space.
    pub fn dh(&self) -> LogSigned {
        self.s
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn near_singular_count(&self) -> usize {
        self.near_singular
    }
}

/// h_{m,c}(theta) as a plain f64. Overflows to +/-inf once c(m-1)
/// exceeds roughly 500 factors; use [`OrbitDeriver`] beyond that.
pub fn h_derivative(theta: f64, m: usize, c: u64) -> Result<f64> {
    check_speed(c)?;
    if m == 0 {
        return Err(Error::InvalidArgument("layer index m starts at 1".into()));
    }
    let mut od = OrbitDeriver::new(theta)?;
    od.advance(c as usize * (m - 1));
    Ok(od.h().to_f64())
}

/// d/dtheta h_{m,c}(theta), same overflow caveat as [`h_derivative`].
pub fn h_second_derivative(theta: f64, m: usize, c: u64) -> Result<f64> {
    check_speed(c)?;
    if m == 0 {
        return Err(Error::InvalidArgument("layer index m starts at 1".into()));
    }
    let mut od = OrbitDeriver::new(theta)?;
    od.advance(c as usize * (m - 1));
    Ok(od.dh().to_f64())
}

/// Finite-p Lyapunov exponent of the schedule in phase space:
///   (1/(p-1)) sum_{i=1..c(p-1)} ln |4 (1 - 2 l^(i-1)(theta))|.
/// Returns -inf when a factor vanishes exactly; ergodicity drives the
/// value to [`gle`] as p grows.
pub fn phase_space_lle(theta: f64, p: usize, c: u64) -> Result<f64> {
    check_unit(theta)?;
    check_speed(c)?;
    if p < 2 {
        return Err(Error::InvalidArgument(
            "phase-space exponent needs depth p >= 2".into(),
        ));
    }
    let mut sum = 0.0;
    let mut x = theta;
    for _ in 0..c as usize * (p - 1) {
        let factor = LOGISTIC_R * (1.0 - 2.0 * x);
        if factor == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        sum += factor.abs().ln();
        x = logistic(x);
    }
    Ok(sum / (p - 1) as f64)
}

/// Ergodic-limit Lyapunov exponent of a speed-c schedule: c ln 2.
pub fn gle(c: u64) -> f64 {
    c as f64 * LN_2
}

/// Trainability window bound eta_{p,c} = |2 h_{p,c} / (d/dtheta h_{p,c})|.
/// +inf at p = 1 (constant h has no curvature) and whenever the
/// denominator vanishes exactly.
pub fn eta_bound(theta: f64, p: usize, c: u64) -> Result<f64> {
    check_speed(c)?;
    if p == 0 {
        return Err(Error::InvalidArgument("depth p starts at 1".into()));
    }
    let mut od = OrbitDeriver::new(theta)?;
    od.advance(c as usize * (p - 1));
    let h = od.h();
    let dh = od.dh();
    if dh.is_zero() {
        return Ok(f64::INFINITY);
    }
    if h.is_zero() {
        return Ok(0.0);
    }
    Ok((2.0f64.ln() + h.ln_abs - dh.ln_abs).exp())
}

/// Nonlinear remainder of a perturbed orbit after n steps:
///   xi_n = l^n(theta + delta) - l^n(theta) - delta * h(theta),
/// propagated exactly through the split recurrence (e_0 = delta, xi_0 = 0)
///   e_{k+1}  = r (1 - 2 y_k) e_k - r e_k^2,
///   xi_{k+1} = r (1 - 2 y_k) xi_k - r e_k^2,
/// which never forms theta + delta and so survives delta down to 1e-18,
/// where naive differencing would be absorbed entirely.
pub fn nonlinear_remainder(theta: f64, delta: f64, n: usize) -> Result<f64> {
    check_unit(theta)?;
    if !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "perturbation delta = {delta} must be finite"
        )));
    }
    let mut y = theta;
    let mut e = delta;
    let mut xi = 0.0;
    for _ in 0..n {
        let slope = LOGISTIC_R * (1.0 - 2.0 * y);
        let quad = LOGISTIC_R * e * e;
        xi = slope * xi - quad;
        e = slope * e - quad;
        y = logistic(y);
    }
    Ok(xi)
}

/// Per-layer view of one schedule orbit: the angle fed to each layer,
/// the derivative product h_{m,c}, and the running finite-p exponent.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub theta0: f64,
    pub c: u64,
    /// iterates[m-1] = l^(c(m-1))(theta0), the layer-m angle.
    pub iterates: Vec<f64>,
    /// h[m-1] = h_{m,c}(theta0); h[0] = 1 always. Saturates to +/-inf
    /// once the product leaves f64 range.
    pub h: Vec<f64>,
    /// lle[m-1] = phase-space exponent at depth m; NaN at m = 1 where
    /// the exponent is undefined.
    pub lle: Vec<f64>,
    /// Factors that came within [`NEAR_SINGULAR_TOL`] of a zero slope.
    pub near_singular: usize,
}

pub fn orbit_record(theta0: f64, p: usize, c: u64) -> Result<OrbitRecord> {
    check_unit(theta0)?;
    check_speed(c)?;
    if p == 0 {
        return Err(Error::InvalidArgument("depth p starts at 1".into()));
    }
    let mut od = OrbitDeriver::new(theta0)?;
    let mut iterates = Vec::with_capacity(p);
    let mut h = Vec::with_capacity(p);
    let mut lle = Vec::with_capacity(p);
    for m in 1..=p {
        if m > 1 {
            od.advance(c as usize);
        }
        iterates.push(od.value());
        h.push(od.h().to_f64());
        lle.push(if m == 1 {
            f64::NAN
        } else if od.h().is_zero() {
            f64::NEG_INFINITY
        } else {
            od.h().ln_abs / (m - 1) as f64
        });
    }
    Ok(OrbitRecord {
        theta0,
        c,
        iterates,
        h,
        lle,
        near_singular: od.near_singular_count(),
    })
}

/// Invariant density of the r = 4 map: 1 / (pi sqrt(z(1-z))).
pub fn arcsine_pdf(z: f64) -> f64 {
    1.0 / (PI * (z * (1.0 - z)).sqrt())
}

/// Its CDF, (2/pi) asin(sqrt(z)).
pub fn arcsine_cdf(z: f64) -> f64 {
    (2.0 / PI) * z.sqrt().asin()
}

/// Maps u ~ U[0,1] to an arcsine-distributed sample sin^2(pi u / 2).
pub fn arcsine_sample(u: f64) -> f64 {
    let s = (PI * u / 2.0).sin();
    s * s
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityCheck {
    pub x0: f64,
    pub n_samples: usize,
    pub burn_in: usize,
    /// Kolmogorov-Smirnov distance between the empirical orbit CDF and
    /// the arcsine law.
    pub ks_statistic: f64,
}

/// Drives one long orbit and compares its empirical distribution to the
/// arcsine law. The starting point is drawn from `seed`, rejecting the
/// measure-zero degenerate points.
pub fn invariant_density_check(n_samples: usize, burn_in: usize, seed: u64) -> Result<DensityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: f64 = rng.random();
    invariant_density_check_from(x0, n_samples, burn_in)
}

/// Same check from an explicit starting point. Orbits that collapse
/// onto the exact fixed points (0, 3/4, and anything mapping there,
/// like 1/2 -> 1 -> 0) are rejected rather than silently scored.
pub fn invariant_density_check_from(x0: f64, n_samples: usize, burn_in: usize) -> Result<DensityCheck> {
    check_unit(x0)?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need n_samples >= 1".into()));
    }
    let mut x = x0;
    let mut samples = Vec::with_capacity(n_samples);
    for step in 0..burn_in + n_samples {
        if x == 0.0 || x == 0.75 {
            return Err(Error::DegenerateOrbit { x0, step });
        }
        if step >= burn_in {
            samples.push(x);
        }
        x = logistic(x);
    }
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).expect("orbit values are finite"));
    let n = samples.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &z) in samples.iter().enumerate() {
        let cdf = arcsine_cdf(z);
        ks = ks.max(cdf - i as f64 / n).max((i + 1) as f64 / n - cdf);
    }
    Ok(DensityCheck {
        x0,
        n_samples,
        burn_in,
        ks_statistic: ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_orbits_at_representable_points() {
        // 1/2 -> 1 -> 0 -> 0 and 1/4 -> 3/4 -> 3/4, exact in binary floats.
        assert_eq!(iterate(0.5, 1).unwrap(), 1.0);
        assert_eq!(iterate(0.5, 2).unwrap(), 0.0);
        assert_eq!(iterate(0.5, 9).unwrap(), 0.0);
        assert_eq!(iterate(0.25, 1).unwrap(), 0.75);
        assert_eq!(iterate(0.25, 7).unwrap(), 0.75);
        assert_eq!(iterate(0.0, 3).unwrap(), 0.0);
        assert_eq!(iterate(1.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn iterate_rejects_out_of_domain() {
        assert!(matches!(iterate(-0.1, 1), Err(Error::MapDomain { .. })));
        assert!(matches!(iterate(1.5, 1), Err(Error::MapDomain { .. })));
    }

    /// The map is conjugate to angle doubling: starting from
    /// sin^2(pi t / 2), the n-th iterate is sin^2(2^n pi t / 2). Float
    /// error doubles per step, so only short horizons are comparable.
    #[test]
    fn conjugacy_to_angle_doubling() {
        for t in [0.1, 0.2, 0.37] {
            let x0 = arcsine_sample(t);
            for n in 0..=22 {
                let expect = {
                    let angle = 2f64.powi(n as i32) * PI * t / 2.0;
                    let s = angle.sin();
                    s * s
                };
                let got = iterate(x0, n).unwrap();
                assert!(
                    (got - expect).abs() < 1e-6,
                    "t={t} n={n}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn derivative_product_base_cases() {
        // Empty product at m = 1.
        assert_eq!(h_derivative(0.3, 1, 7).unwrap(), 1.0);
        // Single factor at m = 2, c = 1: 4 (1 - 2 theta).
        for theta in [0.1, 0.3, 0.62] {
            assert_relative_eq!(
                h_derivative(theta, 2, 1).unwrap(),
                4.0 * (1.0 - 2.0 * theta),
                max_relative = 1e-12
            );
        }
        // Its theta-derivative is the constant -2r = -8.
        for theta in [0.05, 0.5, 0.92] {
            assert_relative_eq!(h_second_derivative(theta, 2, 1).unwrap(), -8.0, max_relative = 1e-12);
        }
    }

    /// Central finite differences of the iterate confirm h, and of h
    /// confirm its derivative, on horizons where f64 stays accurate.
    #[test]
    fn derivatives_match_finite_differences() {
        let fd = 1e-7;
        for theta in [0.137, 0.318, 0.469] {
            for n in [1usize, 3, 6] {
                let m = n + 1;
                let plus = iterate(theta + fd, n).unwrap();
                let minus = iterate(theta - fd, n).unwrap();
                let fd_h = (plus - minus) / (2.0 * fd);
                let h = h_derivative(theta, m, 1).unwrap();
                assert_relative_eq!(h, fd_h, max_relative = 1e-4);

                let hp = h_derivative(theta + fd, m, 1).unwrap();
                let hm = h_derivative(theta - fd, m, 1).unwrap();
                let fd_dh = (hp - hm) / (2.0 * fd);
                let dh = h_second_derivative(theta, m, 1).unwrap();
                assert_relative_eq!(dh, fd_dh, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn log_route_handles_depths_that_overflow_plain_f64() {
        // c(p-1) = 1900 factors: |h| ~ 2^1900, far past f64.
        let mut od = OrbitDeriver::new(0.3711).unwrap();
        od.advance(1900);
        assert!(od.h().ln_abs.is_finite());
        assert!(od.h().to_f64().is_infinite());
        // The exponent per layer stays near the ergodic value.
        let lle = od.h().ln_abs / 19.0;
        assert!((lle - gle(100)).abs() < 0.15 * gle(100), "lle = {lle}");
    }

    #[test]
    fn phase_space_lle_is_log_of_derivative_product() {
        for (theta, p, c) in [(0.21, 4, 1), (0.377, 3, 5), (0.569, 6, 2)] {
            let lle = phase_space_lle(theta, p, c).unwrap();
            let h = h_derivative(theta, p, c).unwrap();
            assert_relative_eq!(lle, h.abs().ln() / (p - 1) as f64, max_relative = 1e-9);
        }
    }

    #[test]
    fn phase_space_lle_sentinel_on_exact_zero_factor() {
        // theta = 1/2 kills the first factor outright.
        assert_eq!(phase_space_lle(0.5, 3, 1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn phase_space_lle_sign_change_near_half() {
        // Just below 1/2 the first factor is tiny and drags the early
        // exponent negative; ergodic growth then turns it positive.
        let theta = 0.5 - 1e-3;
        let early = phase_space_lle(theta, 2, 2).unwrap();
        let late = phase_space_lle(theta, 30, 2).unwrap();
        assert!(early < 0.0, "early exponent {early} should be negative");
        assert!(late > 0.0, "late exponent {late} should be positive");
        assert!((phase_space_lle(theta, 200, 2).unwrap() - gle(2)).abs() < 0.3);
    }

    #[test]
    fn gle_is_c_ln2() {
        assert_relative_eq!(gle(1), LN_2);
        assert_relative_eq!(gle(100), 100.0 * LN_2);
    }

    #[test]
    fn eta_bound_closed_form_at_depth_two() {
        // p = 2, c = 1: |2 * 4(1 - 2 theta) / (-8)| = |1 - 2 theta|.
        for theta in [0.12, 0.4, 0.77] {
            assert_relative_eq!(
                eta_bound(theta, 2, 1).unwrap(),
                (1.0 - 2.0 * theta).abs(),
                max_relative = 1e-12
            );
        }
        assert_eq!(eta_bound(0.3, 1, 5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn nonlinear_remainder_base_and_moderate_delta() {
        // No iterations: remainder is exactly zero.
        assert_eq!(nonlinear_remainder(0.42, 1e-18, 0).unwrap(), 0.0);
        // At deltas fat enough for naive differencing, both routes agree.
        let (theta, delta) = (0.3142, 1e-6);
        for n in [1usize, 2, 4, 8] {
            let direct = iterate(theta + delta, n).unwrap() - iterate(theta, n).unwrap()
                - delta * h_derivative(theta, n + 1, 1).unwrap();
            let split = nonlinear_remainder(theta, delta, n).unwrap();
            assert!(
                (direct - split).abs() < 1e-10,
                "n={n}: direct {direct} vs split {split}"
            );
        }
    }

    #[test]
    fn nonlinear_remainder_survives_tiny_delta() {
        // delta = 1e-18 is absorbed by theta + delta in f64; the split
        // recurrence still produces the leading-order remainder
        // xi_1 = -r delta^2 exactly.
        let delta = 1e-18;
        let xi = nonlinear_remainder(0.3, delta, 1).unwrap();
        assert_relative_eq!(xi, -LOGISTIC_R * delta * delta, max_relative = 1e-12);
        assert!(iterate(0.3 + delta, 1).unwrap() == iterate(0.3, 1).unwrap());
    }

    #[test]
    fn orbit_record_layout() {
        let rec = orbit_record(0.2, 5, 3).unwrap();
        assert_eq!(rec.iterates.len(), 5);
        assert_eq!(rec.h[0], 1.0);
        assert!(rec.lle[0].is_nan());
        assert_eq!(rec.iterates[0], 0.2);
        assert_relative_eq!(rec.iterates[1], iterate(0.2, 3).unwrap());
        assert_relative_eq!(rec.h[1], h_derivative(0.2, 2, 3).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(rec.lle[4], phase_space_lle(0.2, 5, 3).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn arcsine_density_shape() {
        assert_relative_eq!(arcsine_pdf(0.5), 2.0 / PI, max_relative = 1e-12);
        assert_eq!(arcsine_cdf(0.0), 0.0);
        assert_relative_eq!(arcsine_cdf(1.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(arcsine_cdf(0.5), 0.5, max_relative = 1e-12);
    }

    /// Ergodic average of ln |4 (1 - 2x)| under the arcsine law is ln 2;
    /// a Monte Carlo estimate must sit within 3 standard errors.
    #[test]
    fn ergodic_average_of_log_slope_is_ln2() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let u: f64 = rng.random();
            let x = arcsine_sample(u);
            let v = (4.0 * (1.0 - 2.0 * x)).abs().ln();
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - LN_2).abs() <= 3.0 * se,
            "mean {mean} vs ln2 {LN_2}, se {se}"
        );
    }

    #[test]
    fn density_check_passes_on_generic_orbit_and_rejects_degenerate() {
        let check = invariant_density_check(100_000, 1_000, 7).unwrap();
        assert!(check.ks_statistic < 0.01, "ks = {}", check.ks_statistic);
        assert!(matches!(
            invariant_density_check_from(0.0, 100, 10),
            Err(Error::DegenerateOrbit { .. })
        ));
        assert!(matches!(
            invariant_density_check_from(0.75, 100, 10),
            Err(Error::DegenerateOrbit { .. })
        ));
        // 1/2 falls onto the absorbing endpoint after two steps.
        assert!(matches!(
            invariant_density_check_from(0.5, 100, 10),
            Err(Error::DegenerateOrbit { .. })
        ));
    }

    proptest! {
        /// The unit interval is exactly preserved in f64 arithmetic.
        #[test]
        fn map_preserves_unit_interval(x in 0.0f64..=1.0) {
            let y = logistic(x);
            prop_assert!((0.0..=1.0).contains(&y));
        }

        /// Log-domain products agree with the plain route while the
        /// latter is still in range.
        #[test]
        fn log_route_matches_plain_product(theta in 0.001f64..0.999, n in 0usize..40) {
            let mut plain = 1.0f64;
            let mut x = theta;
            for _ in 0..n {
                plain *= LOGISTIC_R * (1.0 - 2.0 * x);
                x = logistic(x);
            }
            let mut od = OrbitDeriver::new(theta).unwrap();
            od.advance(n);
            let log_route = od.h().to_f64();
            if plain == 0.0 {
                prop_assert!(log_route == 0.0);
            } else {
                prop_assert!(((log_route - plain) / plain).abs() < 1e-9);
            }
        }

        /// The split remainder recurrence reproduces direct differencing
        /// at a delta fat enough to survive float subtraction.
        #[test]
        fn remainder_recurrence_matches_direct(theta in 0.01f64..0.99, n in 0usize..10) {
            let delta = 1e-5;
            let direct = iterate(theta + delta, n).unwrap() - iterate(theta, n).unwrap()
                - delta * h_derivative(theta, n + 1, 1).unwrap();
            let split = nonlinear_remainder(theta, delta, n).unwrap();
            prop_assert!((direct - split).abs() < 1e-9, "direct {direct} split {split}");
        }
    }
}

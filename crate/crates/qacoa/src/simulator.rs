//! Dense statevector simulation of the layered circuit.
//!
//! One layer applies the cost phase exp(-i 2 pi f H_C) followed by the
//! mixer exp(-i pi g H_M) with H_M = sum_i sigma^x_i, starting from the
//! uniform superposition. Angles are normalized: the 2 pi and pi factors
//! live here and nowhere else, so f has period 1 (integer cost spectrum)
//! and g has period 2; inputs outside those ranges are reduced.
//!
//! Gradients with respect to the per-layer angles come from a reverse
//! (adjoint) sweep costing one extra backward pass, O(p 2^N) like the
//! forward evaluation, rather than 2p re-evaluations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::sat::CostDiagonal;
use crate::schemes::{angles, AngleSchedule, SchemeSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// |+>^N, the uniform superposition over all 2^n basis states.
pub fn initial_state(n_qubits: usize) -> StateVector {
    let dim = 1usize << n_qubits;
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    StateVector {
        amps: vec![amp; dim],
    }
}

/// Diagonal cost phase exp(-i 2 pi f E_x) per basis state. The integer
/// spectrum makes f periodic with period exactly 1.
pub fn apply_cost(state: &mut StateVector, diag: &CostDiagonal, f: f64) {
    let f = f.rem_euclid(1.0);
    // One table entry per distinct energy beats 2^N trig calls.
    let phases: Vec<Complex64> = (0..=diag.c_max)
        .map(|e| Complex64::from_polar(1.0, -2.0 * PI * f * e as f64))
        .collect();
    for (a, &e) in state.amps.iter_mut().zip(&diag.energies) {
        *a *= phases[e as usize];
    }
}

/// Product of single-qubit rotations exp(-i pi g sigma^x), period 2 in g.
pub fn apply_mixer(state: &mut StateVector, g: f64) {
    let g = g.rem_euclid(2.0);
    let (sin, cos) = (PI * g).sin_cos();
    let n = state.n_qubits();
    for q in 0..n {
        let bit = 1usize << q;
        for x in 0..state.dim() {
            if x & bit == 0 {
                let y = x | bit;
                let a = state.amps[x];
                let b = state.amps[y];
                state.amps[x] = Complex64::new(
                    cos * a.re + sin * b.im,
                    cos * a.im - sin * b.re,
                );
                state.amps[y] = Complex64::new(
                    cos * b.re + sin * a.im,
                    cos * b.im - sin * a.re,
                );
            }
        }
    }
}

/// Runs the full layered circuit from |+>^N.
pub fn run_schedule(schedule: &AngleSchedule, diag: &CostDiagonal) -> StateVector {
    let mut state = initial_state(diag.n_vars());
    for m in 0..schedule.depth() {
        apply_cost(&mut state, diag, schedule.f[m]);
        apply_mixer(&mut state, schedule.g[m]);
    }
    state
}

/// <psi| H_C |psi> over the precomputed diagonal.
pub fn expectation(state: &StateVector, diag: &CostDiagonal) -> f64 {
    state
        .amps
        .iter()
        .zip(&diag.energies)
        .map(|(a, &e)| a.norm_sqr() * e as f64)
        .sum()
}

/// Expected Hamming distance to the nearest optimal assignment, per
/// variable: sum_u |<u|psi>|^2 d(u) / N.
pub fn misassignment_rate(state: &StateVector, diag: &CostDiagonal) -> f64 {
    let dist = diag.distances_to_solution();
    let h: f64 = state
        .amps
        .iter()
        .zip(dist)
        .map(|(a, &d)| a.norm_sqr() * d as f64)
        .sum();
    h / diag.n_vars() as f64
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalResult {
    /// F = <psi| H_C |psi>, the quantity the optimizer minimizes.
    pub f_value: f64,
    /// Approximation ratio (c_max - F) / (c_max - c_min); 1 at the
    /// optimum, 0 at the worst assignment.
    pub ar: f64,
    /// Misassignment rate of the final state.
    pub misassignment: f64,
}

/// Evaluates the circuit defined by a schedule. Errors on a flat
/// landscape (c_max = c_min), where the ratio is undefined.
pub fn evaluate_schedule(schedule: &AngleSchedule, diag: &CostDiagonal) -> Result<EvalResult> {
    if diag.c_max == diag.c_min {
        return Err(Error::UndefinedMetric { value: diag.c_max });
    }
    let state = run_schedule(schedule, diag);
    let f_value = expectation(&state, diag);
    let ar = (diag.c_max as f64 - f_value) / (diag.c_max as f64 - diag.c_min as f64);
    let misassignment = misassignment_rate(&state, diag);
    Ok(EvalResult {
        f_value,
        ar,
        misassignment,
    })
}

/// Unrolls theta through the scheme and evaluates.
pub fn evaluate(spec: &SchemeSpec, theta: &[f64], diag: &CostDiagonal) -> Result<EvalResult> {
    let schedule = angles(spec, theta)?;
    evaluate_schedule(&schedule, diag)
}

/// Gradient of F with respect to every layer angle, via one reverse
/// sweep: returns (dF/df_m, dF/dg_m) for m = 1..p.
pub fn layer_angle_gradient(
    schedule: &AngleSchedule,
    diag: &CostDiagonal,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = schedule.depth();
    let mut ket = run_schedule(schedule, diag);
    // bra starts as H_C |psi>; both vectors are then unwound in step.
    let mut bra = ket.clone();
    for (a, &e) in bra.amps.iter_mut().zip(&diag.energies) {
        *a *= e as f64;
    }
    let mut grad_f = vec![0.0; p];
    let mut grad_g = vec![0.0; p];
    let n = ket.n_qubits();
    for m in (0..p).rev() {
        // dF/dg_m = 2 Re <bra| (-i pi) H_M |ket> = 2 pi Im <bra| H_M |ket>.
        let mut s = Complex64::new(0.0, 0.0);
        for q in 0..n {
            let bit = 1usize << q;
            for x in 0..ket.dim() {
                s += bra.amps[x].conj() * ket.amps[x ^ bit];
            }
        }
        grad_g[m] = 2.0 * PI * s.im;
        apply_mixer(&mut ket, -schedule.g[m]);
        apply_mixer(&mut bra, -schedule.g[m]);
        // dF/df_m = 2 Re <bra| (-i 2 pi H_C) |ket> = 4 pi Im sum E_x conj(bra) ket.
        let mut t = Complex64::new(0.0, 0.0);
        for (x, &e) in diag.energies.iter().enumerate() {
            t += bra.amps[x].conj() * ket.amps[x] * e as f64;
        }
        grad_f[m] = 4.0 * PI * t.im;
        apply_cost(&mut ket, diag, -schedule.f[m]);
        apply_cost(&mut bra, diag, -schedule.f[m]);
    }
    Ok((grad_f, grad_g))
}

/// F over a square (theta_1, theta_2) grid for a two-parameter scheme.
#[derive(Debug, Clone, Serialize)]
pub struct LandscapeScan {
    pub spec: SchemeSpec,
    /// Shared axis, uniform over [0,1] including both endpoints.
    pub grid: Vec<f64>,
    /// values[i][j] = F at theta_1 = grid[i], theta_2 = grid[j].
    pub values: Vec<Vec<f64>>,
}

pub fn landscape_scan(
    spec: &SchemeSpec,
    diag: &CostDiagonal,
    grid_points: usize,
) -> Result<LandscapeScan> {
    spec.validate()?;
    if spec.n_theta() != 2 {
        return Err(Error::InvalidArgument(format!(
            "landscape scans need a two-parameter scheme, {} has {}",
            spec.label(),
            spec.n_theta()
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument(
            "landscape grid needs at least 2 points per axis".into(),
        ));
    }
    let grid: Vec<f64> = (0..grid_points)
        .map(|k| k as f64 / (grid_points - 1) as f64)
        .collect();
    let values: Result<Vec<Vec<f64>>> = grid
        .par_iter()
        .map(|&t1| {
            grid.iter()
                .map(|&t2| Ok(evaluate(spec, &[t1, t2], diag)?.f_value))
                .collect()
        })
        .collect();
    Ok(LandscapeScan {
        spec: *spec,
        grid,
        values: values?,
    })
}

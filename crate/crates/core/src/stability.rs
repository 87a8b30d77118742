//! Orbital-stability experiments around the ground state.
//!
//! A run perturbs the ground state by `eps` times a perturbation of unit
//! W-norm, evolves it, and records the distance to the phase orbit of the
//! reference state at regular sampling times.

use std::f64::consts::PI;
use std::thread;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evolution::{propagate, PropagateOptions};
use crate::graph::{build_grid, complex_pairing, l2_norm, GraphState, GridSpec};
use crate::orlicz::w_norm;
use crate::sampling::random_state;
use crate::stationary::{gamma_star, stationary_state, StationaryParams};
use crate::variational::{minimize_action, Init, MinimizeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L2,
    W,
}

/// `inf_theta ||u - e^{i theta} reference||` in the chosen norm.
pub fn phase_distance(u: &GraphState, reference: &GraphState, norm: Norm) -> Result<f64> {
    u.same_grid(reference)?;
    let theta = best_phase(u, reference)?;
    let dist = |t: f64| -> Result<f64> {
        let d = u.combine(Complex64::new(1.0, 0.0), reference, -Complex64::from_polar(1.0, t))?;
        Ok(match norm {
            Norm::L2 => l2_norm(&d),
            Norm::W => w_norm(&d),
        })
    };
    match norm {
        Norm::L2 => dist(theta),
        Norm::W => golden_section(dist, theta - PI, theta + PI, 1e-10),
    }
}

/// The phase minimizing the `L^2` distance, `arg <u, reference>`.
pub fn best_phase(u: &GraphState, reference: &GraphState) -> Result<f64> {
    let p = complex_pairing(u, reference)?;
    Ok(if p.norm() == 0.0 { 0.0 } else { p.arg() })
}

fn golden_section<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    // Start from the midpoint side so the L^2-optimal phase is probed early.
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = fc.min(fd).min(f(0.5 * (a + b))?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
        best = best.min(fc).min(fd);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    /// The same bump on every edge.
    Symmetric,
    /// Mass moved from one edge to another, vanishing at the vertex.
    Antisymmetric,
    /// A seeded random smooth complex state.
    Random,
}

impl std::str::FromStr for PerturbationKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Self::Symmetric),
            "antisymmetric" => Ok(Self::Antisymmetric),
            "random" => Ok(Self::Random),
            other => Err(invalid(format!(
                "unknown perturbation kind {other:?} (expected symmetric, antisymmetric or random)"
            ))),
        }
    }
}

/// Perturbation of the given kind scaled to unit W-norm.
pub fn perturbation(grid: GridSpec, kind: PerturbationKind, seed: u64) -> Result<GraphState> {
    let raw = match kind {
        PerturbationKind::Symmetric => {
            GraphState::symmetric(grid, |x| Complex64::new((-(x - 1.0).powi(2)).exp(), 0.0))?
        }
        PerturbationKind::Antisymmetric => GraphState::from_profile(grid, |i, x| {
            let s = match i {
                0 => 1.0,
                1 => -1.0,
                _ => 0.0,
            };
            Complex64::new(s * x * (-0.5 * x * x).exp(), 0.0)
        })?,
        PerturbationKind::Random => random_state(grid, seed)?,
    };
    let n = w_norm(&raw);
    Ok(raw.scaled_real(1.0 / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Minimizer of the discrete action, the exact standing wave of the scheme.
    DiscreteGroundState,
    /// The closed-form profile sampled on the grid.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    /// Spacing of the sampling times.
    pub sample_every: f64,
    pub seed: u64,
    pub reference: Reference,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            length: 20.0,
            points: 2000,
            dt: 1e-3,
            sample_every: 0.25,
            seed: 0,
            reference: Reference::DiscreteGroundState,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilitySample {
    pub t: f64,
    pub dist_l2: f64,
    pub dist_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub epsilon: f64,
    pub horizon: f64,
    /// Largest sampled W-distance to the orbit.
    pub sup_dist: f64,
    /// `sup_dist / epsilon` (zero when `epsilon = 0`).
    pub ratio: f64,
    pub sup_dist_l2: f64,
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
    pub samples: Vec<StabilitySample>,
}

/// Reference state for the stability harness.
pub fn reference_state(
    edges: usize,
    gamma: f64,
    omega: f64,
    grid: GridSpec,
    reference: Reference,
) -> Result<GraphState> {
    let params = StationaryParams::new(edges, gamma, omega, 0)?;
    let sampled = stationary_state(&params, grid)?;
    match reference {
        Reference::Sampled => Ok(sampled),
        Reference::DiscreteGroundState => {
            let opts = MinimizeOptions::new(grid.length(), grid.points());
            Ok(minimize_action(edges, gamma, omega, Init::FromState(sampled), &opts)?.state)
        }
    }
}

/// Runs one stability experiment against a precomputed reference.
pub fn stability_run_with_reference(
    reference: &GraphState,
    gamma: f64,
    epsilon: f64,
    horizon: f64,
    kind: PerturbationKind,
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    if !(epsilon >= 0.0) {
        return Err(invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let grid = *reference.grid();
    let p = perturbation(grid, kind, opts.seed)?;
    let u0 = reference.combine(Complex64::new(1.0, 0.0), &p, Complex64::new(epsilon, 0.0))?;
    if u0.is_zero() {
        return Err(invalid("perturbed initial state vanishes"));
    }
    let stride = ((opts.sample_every / opts.dt).round() as usize).max(1);
    let traj = propagate(&u0, gamma, &PropagateOptions::new(opts.dt, horizon).with_stride(stride))?;

    let samples = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, u)| {
            Ok(StabilitySample {
                t,
                dist_l2: phase_distance(u, reference, Norm::L2)?,
                dist_w: phase_distance(u, reference, Norm::W)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_dist = samples.iter().map(|s| s.dist_w).fold(0.0, f64::max);
    let sup_dist_l2 = samples.iter().map(|s| s.dist_l2).fold(0.0, f64::max);
    Ok(StabilityReport {
        epsilon,
        horizon,
        sup_dist,
        ratio: if epsilon > 0.0 { sup_dist / epsilon } else { 0.0 },
        sup_dist_l2,
        max_mass_drift: traj.max_mass_drift(),
        max_energy_drift: traj.max_energy_drift(),
        samples,
    })
}

pub fn stability_run(
    edges: usize,
    gamma: f64,
    omega: f64,
    epsilon: f64,
    horizon: f64,
    kind: PerturbationKind,
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    let reference = checked_reference(edges, gamma, omega, opts)?;
    stability_run_with_reference(&reference, gamma, epsilon, horizon, kind, opts)
}

fn checked_reference(edges: usize, gamma: f64, omega: f64, opts: &StabilityOptions) -> Result<GraphState> {
    let threshold = gamma_star(edges)?;
    if !(gamma > threshold) {
        return Err(invalid(format!(
            "stability runs need gamma > gamma*({edges}) = {threshold:.6}, got {gamma}"
        )));
    }
    let grid = build_grid(edges, opts.length, opts.points)?;
    reference_state(edges, gamma, omega, grid, opts.reference)
}

/// Runs several amplitudes against one shared reference, in parallel.
pub fn stability_sweep(
    edges: usize,
    gamma: f64,
    omega: f64,
    epsilons: &[f64],
    horizon: f64,
    kind: PerturbationKind,
    opts: &StabilityOptions,
) -> Result<Vec<StabilityReport>> {
    let reference = checked_reference(edges, gamma, omega, opts)?;
    thread::scope(|s| {
        let handles: Vec<_> = epsilons
            .iter()
            .map(|&eps| {
                let r = &reference;
                s.spawn(move || stability_run_with_reference(r, gamma, eps, horizon, kind, opts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("stability worker panicked"))
            .collect()
    })
}

//! Ground states as minimizers of the action on the Nehari manifold
//! `{u != 0 : I_{omega,gamma}(u) = 0}`.
//!
//! The minimizer runs a projected gradient descent. Each step preconditions
//! the gradient of `S_{omega,gamma}` with `-Delta_0 + c(x)`, where
//! `c = max(1, -Log|u|^2 - omega)` tracks the confining part of the Hessian,
//! then maps the trial point back to the manifold by the multiplicative Nehari
//! projection and backtracks until the Armijo condition holds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{l2_norm, weighted, DiscreteOperator, GraphState, GridSpec};
use crate::orlicz::{action, mass, nehari};
use crate::sampling::{random_asymmetric, random_symmetric};
use crate::stability::{phase_distance, Norm};
use crate::stationary::{action_closed_form, d_values, stationary_state, StationaryParams};

const LOG_FLOOR: f64 = 1e-14;

/// Returns `lambda u` with `lambda = exp(I(u) / (2 |u|^2))`, which lies on the
/// Nehari manifold because `I(c u) = c^2 I(u) - c^2 Log(c^2) |u|^2`.
pub fn nehari_project(u: &GraphState, omega: f64, gamma: f64) -> Result<GraphState> {
    let m = mass(u);
    if m == 0.0 {
        return Err(Error::ZeroState);
    }
    let lambda = (nehari(u, omega, gamma) / (2.0 * m)).exp();
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::NonFinite(format!("Nehari scaling factor {lambda}")));
    }
    Ok(u.scaled_real(lambda))
}

/// `u_lambda(x) = lambda^{1/2} u(lambda x)`, resampled on the same grid by
/// linear interpolation (zero beyond the truncation point).
pub fn scale_transform(u: &GraphState, lambda: f64) -> Result<GraphState> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("scaling factor must be positive, got {lambda}")));
    }
    let g = *u.grid();
    let h = g.spacing();
    let m = g.points();
    let amp = lambda.sqrt();
    let sample = |edge: &[Complex64], x: f64| -> Complex64 {
        let node = |k: usize| if k == 0 { u.vertex() } else { edge[k - 1] };
        let pos = x / h;
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 {
            let k = nearest as usize;
            return if k > m { Complex64::new(0.0, 0.0) } else { node(k) };
        }
        let k = pos.floor() as usize;
        if k >= m {
            return Complex64::new(0.0, 0.0);
        }
        let frac = pos - k as f64;
        node(k) * (1.0 - frac) + edge[k] * frac
    };
    let edges: Vec<&[Complex64]> = u.edges().collect();
    let mut out = GraphState::zeros(g);
    out.set_vertex(u.vertex() * amp);
    for (i, edge) in edges.iter().enumerate() {
        let dst = out.edge_interior_mut(i);
        for (j, z) in dst.iter_mut().enumerate() {
            *z = sample(edge, lambda * g.position(j)) * amp;
        }
    }
    Ok(out)
}

/// Gradient of `S_{omega,gamma}` in the real `L^2` pairing:
/// `-Delta_gamma u + omega u - u Log|u|^2`, with the logarithm clamped below.
pub fn action_gradient(u: &GraphState, omega: f64, gamma: f64) -> Result<GraphState> {
    let ku = DiscreteOperator::new(*u.grid(), gamma).apply(u)?;
    let rest = u.map(|z| z * (omega - clamped_log(z.norm())));
    ku.add(&rest)
}

fn clamped_log(s: f64) -> f64 {
    let s = s.max(LOG_FLOOR);
    (s * s).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Positive Gaussian centred at the vertex.
    VertexGaussian,
    RandomSymmetric(u64),
    /// A single bump on one random edge.
    RandomAsymmetric(u64),
    FromState(GraphState),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub length: f64,
    pub points: usize,
    /// Stop when consecutive iterates differ by less than this (phase-aligned `L^2`).
    pub tol: f64,
    pub max_iter: usize,
}

impl MinimizeOptions {
    pub fn new(length: f64, points: usize) -> Self {
        Self {
            length,
            points,
            tol: 1e-10,
            max_iter: 50_000,
        }
    }
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self::new(20.0, 2000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub state: GraphState,
    pub iterations: usize,
    pub converged: bool,
    pub final_nehari: f64,
    pub final_action: f64,
    /// Phase-aligned `L^2` distance to the sampled closed-form ground state
    /// (absent when `gamma < 0`).
    pub dist_mod_phase_to_phi0: Option<f64>,
    /// Largest per-edge mass centroid `int x |u_i|^2 / |u|^2`.
    pub centroid: f64,
    pub escaped: bool,
}

/// `max_i int_0^L x |u_i|^2 dx / |u|^2`.
pub fn mass_centroid(u: &GraphState) -> f64 {
    let g = u.grid();
    let total = mass(u);
    if total == 0.0 {
        return 0.0;
    }
    let h = g.spacing();
    u.edges()
        .map(|e| {
            e[..g.points() - 1]
                .iter()
                .enumerate()
                .map(|(j, z)| g.position(j) * z.norm_sqr())
                .sum::<f64>()
                * h
        })
        .fold(0.0, f64::max)
        / total
}

/// Solves `(W c + W K_0) x = r` where `c` is a positive pointwise weight.
fn precondition(rhs: &GraphState, c: &GraphState) -> GraphState {
    let g = *rhs.grid();
    let h = g.spacing();
    let n = g.points() - 1;
    let off = -1.0 / h;
    let mut out = GraphState::zeros(g);
    let mut ys = Vec::with_capacity(g.edges());
    let mut sum_y0 = Complex64::new(0.0, 0.0);
    let mut sum_z0 = 0.0;
    let mut zs = Vec::with_capacity(g.edges());
    for i in 0..g.edges() {
        let ci = c.edge(i);
        let r = rhs.edge(i);
        let mut pivots = Vec::with_capacity(n);
        pivots.push(h * ci[0].re + 2.0 / h);
        for j in 1..n {
            let d = h * ci[j].re + 2.0 / h;
            pivots.push(d - off * off / pivots[j - 1]);
        }
        let solve = |b: &dyn Fn(usize) -> Complex64| -> Vec<Complex64> {
            let mut y: Vec<Complex64> = Vec::with_capacity(n);
            y.push(b(0));
            for j in 1..n {
                let l = off / pivots[j - 1];
                let prev = y[j - 1];
                y.push(b(j) - prev * l);
            }
            y[n - 1] /= pivots[n - 1];
            for j in (0..n - 1).rev() {
                let next = y[j + 1];
                y[j] = (y[j] - next * off) / pivots[j];
            }
            y
        };
        let y = solve(&|j| r[j]);
        let z = solve(&|j| {
            if j == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        sum_y0 += y[0];
        sum_z0 += z[0].re;
        ys.push(y);
        zs.push(z);
    }
    let coupling = 1.0 / h;
    let vertex_diag = c.vertex().re * g.vertex_weight() + g.edges() as f64 / h;
    let schur = vertex_diag - coupling * coupling * sum_z0;
    let v = (rhs.vertex() + sum_y0 * coupling) / schur;
    out.set_vertex(v);
    for (i, (y, z)) in ys.into_iter().zip(zs).enumerate() {
        let dst = out.edge_interior_mut(i);
        for j in 0..n {
            dst[j] = y[j] + z[j] * (coupling * v);
        }
    }
    out
}

fn weights(u: &GraphState, omega: f64) -> GraphState {
    let c = |z: Complex64| Complex64::new((-clamped_log(z.norm()) - omega).max(1.0), 0.0);
    u.map(c)
}

fn initial_state(init: Init, grid: GridSpec) -> Result<GraphState> {
    match init {
        Init::VertexGaussian => GraphState::symmetric(grid, |x| Complex64::new((-0.5 * x * x).exp(), 0.0)),
        Init::RandomSymmetric(seed) => random_symmetric(grid, seed),
        Init::RandomAsymmetric(seed) => random_asymmetric(grid, seed),
        Init::FromState(u) => {
            if *u.grid() != grid {
                return Err(Error::GridMismatch);
            }
            Ok(u)
        }
    }
}

/// Minimizes `S_{omega,gamma}` over the Nehari manifold on `N` edges.
pub fn minimize_action(
    edges: usize,
    gamma: f64,
    omega: f64,
    init: Init,
    opts: &MinimizeOptions,
) -> Result<MinimizeReport> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let grid = GridSpec::new(edges, opts.length, opts.points)?;
    let start = initial_state(init, grid)?;
    start.check_finite()?;
    if start.is_zero() {
        return Err(Error::ZeroState);
    }
    let mut u = nehari_project(&start, omega, gamma)?;
    let mut s = action(&u, omega, gamma);
    let mut iterations = 0;
    let mut converged = false;
    let mut rising = 0usize;

    while iterations < opts.max_iter {
        let grad = action_gradient(&u, omega, gamma)?;
        let dir = precondition(&weighted(&grad), &weights(&u, omega));
        let slope = crate::graph::inner_product(&weighted(&grad), &dir)?.max(0.0);
        let slack = 4.0 * f64::EPSILON * s.abs().max(1.0);

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = nehari_project(
                &u.combine(Complex64::new(1.0, 0.0), &dir, Complex64::new(-t, 0.0))?,
                omega,
                gamma,
            )?;
            let st = action(&trial, omega, gamma);
            if st.is_finite() && st <= s - 1e-4 * t * slope + slack {
                accepted = Some((trial, st));
                break;
            }
            t *= 0.5;
        }
        let (next, s_next) = match accepted {
            Some(x) => x,
            None => {
                let trial = nehari_project(
                    &u.combine(Complex64::new(1.0, 0.0), &dir, Complex64::new(-t, 0.0))?,
                    omega,
                    gamma,
                )?;
                let st = action(&trial, omega, gamma);
                (trial, st)
            }
        };
        if s_next > s {
            rising += 1;
            if rising >= 100 {
                return Err(Error::Divergence(rising));
            }
        } else {
            rising = 0;
        }
        let change = phase_distance(&next, &u, Norm::L2)?;
        if change < opts.tol {
            converged = true;
            break;
        }
        u = next;
        s = s_next;
        iterations += 1;
    }

    let final_nehari = nehari(&u, omega, gamma);
    let dist = if gamma >= 0.0 {
        let phi0 = stationary_state(&StationaryParams::new(edges, gamma, omega, 0)?, grid)?;
        Some(phase_distance(&u, &phi0, Norm::L2)?)
    } else {
        None
    };
    let centroid = mass_centroid(&u);
    Ok(MinimizeReport {
        final_action: s,
        final_nehari,
        dist_mod_phase_to_phi0: dist,
        centroid,
        escaped: centroid > grid.length() / 2.0,
        iterations,
        converged,
        state: u,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub gamma: f64,
    pub action_phi0: f64,
    pub d_kirchhoff: f64,
    /// `S(phi^0) - d_0(omega)`; negative below the Kirchhoff level.
    pub difference: f64,
}

/// Compares `S(phi^0_{omega,gamma})` with `d_0(omega)` for every `gamma`.
pub fn threshold_scan(edges: usize, omega: f64, gammas: &[f64]) -> Result<Vec<ThresholdRow>> {
    let d0 = d_values(omega).kirchhoff;
    gammas
        .iter()
        .map(|&gamma| {
            let s = action_closed_form(&StationaryParams::new(edges, gamma, omega, 0)?);
            Ok(ThresholdRow {
                gamma,
                action_phi0: s,
                d_kirchhoff: d0,
                difference: s - d0,
            })
        })
        .collect()
}

/// First pair of consecutive rows where `S(phi^0) - d_0` changes sign.
pub fn threshold_bracket(rows: &[ThresholdRow]) -> Option<(f64, f64)> {
    rows.windows(2)
        .find(|w| (w[0].difference >= 0.0) != (w[1].difference >= 0.0))
        .map(|w| (w[0].gamma, w[1].gamma))
}

/// `gamma_min + k (gamma_max - gamma_min) / steps` for `k = 0..=steps`.
pub fn gamma_grid(gamma_min: f64, gamma_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(gamma_max > gamma_min) {
        return Err(invalid("need gamma_max > gamma_min and at least one step"));
    }
    Ok((0..=steps)
        .map(|k| gamma_min + (gamma_max - gamma_min) * k as f64 / steps as f64)
        .collect())
}

/// `L^2` distance helper used by reports.
pub fn l2_distance(u: &GraphState, v: &GraphState) -> Result<f64> {
    Ok(l2_norm(&u.sub(v)?))
}

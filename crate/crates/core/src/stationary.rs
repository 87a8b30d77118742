//! Closed-form stationary states, residual checks of the stationary problem,
//! action values, the existence threshold `gamma*(N)`, and the reference
//! infima on the line, the half-line and the Kirchhoff star.
//!
//! For `gamma > 0` the positive stationary states are indexed by the number
//! `kappa` of edges carrying a bump, `kappa = 0..=(N-1)/2`. That is
//! `(N-1)/2 + 1` states counting the symmetric one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{EdgeProfile, GraphState, GridSpec};
use crate::special::{erf, erfc, erfinv};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryParams {
    edges: usize,
    gamma: f64,
    omega: f64,
    kappa: usize,
}

impl StationaryParams {
    pub fn new(edges: usize, gamma: f64, omega: f64, kappa: usize) -> Result<Self> {
        if edges < 2 {
            return Err(invalid(format!("need at least 2 edges, got {edges}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(invalid(format!("gamma must be nonnegative, got {gamma}")));
        }
        if !omega.is_finite() {
            return Err(invalid("omega must be finite"));
        }
        let max_kappa = (edges - 1) / 2;
        if kappa > max_kappa {
            return Err(invalid(format!(
                "kappa must lie in 0..={max_kappa} for N = {edges}, got {kappa}"
            )));
        }
        if gamma == 0.0 && kappa > 0 {
            return Err(invalid("with gamma = 0 only the symmetric state (kappa = 0) exists"));
        }
        Ok(Self {
            edges,
            gamma,
            omega,
            kappa,
        })
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Bump offset `h_kappa = gamma / (N - 2 kappa)`.
    pub fn h_kappa(&self) -> f64 {
        self.gamma / (self.edges - 2 * self.kappa) as f64
    }

    /// Value of the state at the vertex.
    pub fn vertex_value(&self) -> f64 {
        let h = self.h_kappa();
        ((self.omega + 1.0) / 2.0).exp() * (-0.5 * h * h).exp()
    }

    /// Profile of edge `i`: bumps on the first `kappa` edges, tails on the rest.
    pub fn profile(&self, edge: usize, x: f64) -> f64 {
        let h = self.h_kappa();
        let shift = if edge < self.kappa { -h } else { h };
        ((self.omega + 1.0) / 2.0).exp() * (-0.5 * (x + shift).powi(2)).exp()
    }
}

/// Samples the stationary state selected by `params` on `grid`.
pub fn stationary_state(params: &StationaryParams, grid: GridSpec) -> Result<GraphState> {
    if grid.edges() != params.edges {
        return Err(invalid(format!(
            "grid has {} edges but parameters ask for {}",
            grid.edges(),
            params.edges
        )));
    }
    GraphState::from_profile(grid, |i, x| Complex64::new(params.profile(i, x), 0.0))
}

/// The line soliton `e^{(omega+1)/2} e^{-x^2/2}`.
pub fn soliton(omega: f64, x: f64) -> f64 {
    ((omega + 1.0) / 2.0).exp() * (-0.5 * x * x).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Max modulus of the discrete stationary equation over interior samples.
    pub interior: f64,
    /// `|sum_i u_i'(0) + gamma u(0)|` with second-order one-sided derivatives.
    pub jump: f64,
}

/// Residuals of `-u'' + omega u - u Log|u|^2 = 0` on each edge and of the
/// vertex flux condition. Samples with `|u| < 1e-14` are skipped.
pub fn stationary_residual(u: &GraphState, omega: f64, gamma: f64) -> Residual {
    stationary_residual_with(u, omega, gamma, JumpStencil::SecondOrder)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpStencil {
    FirstOrder,
    SecondOrder,
}

pub fn stationary_residual_with(u: &GraphState, omega: f64, gamma: f64, stencil: JumpStencil) -> Residual {
    const FLOOR: f64 = 1e-14;
    let g = u.grid();
    let h = g.spacing();
    let m = g.points();
    let mut interior = 0.0_f64;
    let mut flux = Complex64::new(0.0, 0.0);
    for edge in u.edges() {
        for j in 0..m - 1 {
            let z = edge[j];
            let s = z.norm();
            if s < FLOOR {
                continue;
            }
            let left = if j == 0 { u.vertex() } else { edge[j - 1] };
            let right = edge[j + 1];
            let lap = (left - z * 2.0 + right) / (h * h);
            let r = -lap + z * omega - z * (s * s).ln();
            interior = interior.max(r.norm());
        }
        flux += match stencil {
            JumpStencil::FirstOrder => (edge[0] - u.vertex()) / h,
            JumpStencil::SecondOrder => (u.vertex() * -3.0 + edge[0] * 4.0 - edge[1]) / (2.0 * h),
        };
    }
    Residual {
        interior,
        jump: (flux + u.vertex() * gamma).norm(),
    }
}

/// Max over interior samples of `|u'|^2 - (omega+1) |u|^2 + |u|^2 Log |u|^2`,
/// the first integral of the stationary equation on a half-line.
pub fn first_integral_residual(profile: &EdgeProfile, omega: f64) -> f64 {
    let h = profile.spacing();
    let v = profile.values();
    let mut worst = 0.0_f64;
    for j in 1..v.len() - 1 {
        let d = (v[j + 1] - v[j - 1]) / (2.0 * h);
        let s2 = v[j] * v[j];
        let ent = if s2 == 0.0 { 0.0 } else { s2 * s2.ln() };
        worst = worst.max((d * d - (omega + 1.0) * s2 + ent).abs());
    }
    worst
}

/// `f_gamma(x) = x erf(gamma / x)`.
pub fn f_gamma(gamma: f64, x: f64) -> f64 {
    x * erf(gamma / x)
}

/// `S(phi^kappa) = sqrt(pi)/4 e^{omega+1} (N - f_gamma(N - 2 kappa))`.
pub fn action_closed_form(params: &StationaryParams) -> f64 {
    let n = params.edges as f64;
    let x = (params.edges - 2 * params.kappa) as f64;
    // N - x erf(gamma/x) = 2 kappa + x erfc(gamma/x), which avoids cancellation.
    let bracket = (n - x) + x * erfc(params.gamma / x);
    PI.sqrt() / 4.0 * (params.omega + 1.0).exp() * bracket
}

/// Existence threshold `gamma*(N) = N erfinv(1 - 2/N)`.
pub fn gamma_star(edges: usize) -> Result<f64> {
    if edges < 2 {
        return Err(invalid(format!("gamma* needs N >= 2, got {edges}")));
    }
    let n = edges as f64;
    Ok(n * erfinv(1.0 - 2.0 / n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DValues {
    pub line: f64,
    pub halfline: f64,
    pub kirchhoff: f64,
}

/// Infima of the action on the Nehari manifold: on the line, on the
/// half-line, and on the Kirchhoff star graph.
pub fn d_values(omega: f64) -> DValues {
    let line = (omega + 1.0).exp() * PI.sqrt() / 2.0;
    let halfline = line / 2.0;
    DValues {
        line,
        halfline,
        kirchhoff: 2.0 * halfline,
    }
}

/// Half-line profile `erf(x) phi_omega(x - n)` sampled on `[0, L]`.
pub fn escaping_sequence(n: usize, omega: f64, spacing: f64, length: f64) -> Result<EdgeProfile> {
    if n < 1 {
        return Err(invalid("escaping sequence index starts at 1"));
    }
    if length <= n as f64 + 6.0 {
        return Err(invalid(format!(
            "bump centred at {n} does not fit in [0, {length}] (need L > n + 6)"
        )));
    }
    if !(spacing > 0.0) {
        return Err(invalid("spacing must be positive"));
    }
    let len = (length / spacing).round() as usize + 1;
    let c = n as f64;
    Ok(EdgeProfile::from_fn(spacing, len, |x| erf(x) * soliton(omega, x - c)))
}

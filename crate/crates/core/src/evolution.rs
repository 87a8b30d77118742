//! Time evolution of the regularized equation
//! `i u_t + Delta_gamma u + g_m(u) = 0`.
//!
//! The nonlinearity is clamped outside the band `1/m <= |z| <= m`:
//! `g_m(z) = z theta_m(|z|)` with `theta_m = beta_m - alpha_m`, where
//! `alpha(r) = A(r)/r^2`, `beta(r) = B(r)/r^2`, `alpha_m` freezes `alpha`
//! below `1/m` and `beta_m` freezes `beta` above `m`. Inside the band
//! `theta_m(r) = Log r^2`.
//!
//! Since `theta_m` is real the pointwise flow of `g_m` is a phase rotation,
//! which the Strang splitting integrates exactly. The linear part is advanced
//! by Crank-Nicolson.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{integrate, l2_norm, weighted, DiscreteOperator, GraphState, StarSolver};
use crate::orlicz::{mass, quadratic_form, KNOT, KNOT_SQ};

fn alpha(r: f64) -> f64 {
    if r <= KNOT {
        -(r * r).ln()
    } else {
        3.0 + 4.0 * KNOT / r - KNOT_SQ / (r * r)
    }
}

fn beta(r: f64) -> f64 {
    if r <= KNOT {
        0.0
    } else {
        (r * r).ln() + alpha(r)
    }
}

/// `theta_m(r)`, so that `g_m(z) = z theta_m(|z|)`.
pub fn theta_m(r: f64, m: u64) -> f64 {
    let mf = m as f64;
    let lo = 1.0 / mf;
    let a = alpha(r.max(lo));
    let b = if r <= mf { beta(r) } else { beta(mf) };
    b - a
}

/// `g_m(z)`; zero at the origin by the linear inner clamp.
pub fn g_m_eval(z: Complex64, m: u64) -> Complex64 {
    z * theta_m(z.norm(), m)
}

fn p_log(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        let s2 = s * s;
        0.5 * s2 * (s2.ln() - 1.0)
    }
}

fn p_alpha(s: f64) -> f64 {
    if s <= KNOT {
        -p_log(s)
    } else {
        let at_knot = -p_log(KNOT);
        let f = |t: f64| 1.5 * t * t + 4.0 * KNOT * t - KNOT_SQ * t.ln();
        at_knot + f(s) - f(KNOT)
    }
}

/// `G_m(r) = 2 int_0^r s theta_m(s) ds`, in closed form.
///
/// In the band this is `r^2 Log r^2 - r^2`, so `G_m(|u|) -> |u|^2 Log|u|^2 - |u|^2`
/// as `m -> infinity`.
pub fn big_g_m(r: f64, m: u64) -> f64 {
    let mf = m as f64;
    let lo = 1.0 / mf;
    let inner = |s: f64| p_log(s) + p_alpha(s) - alpha(lo) * s * s / 2.0;
    let band = |s: f64| inner(lo) + p_log(s) - p_log(lo);
    let half = if r <= lo {
        inner(r)
    } else if r <= mf {
        band(r)
    } else {
        band(mf) + beta(mf) * (r * r - mf * mf) / 2.0 - (p_alpha(r) - p_alpha(mf))
    };
    2.0 * half
}

fn band_sq(m: u64) -> (f64, f64) {
    let mf = m as f64;
    (1.0 / (mf * mf), mf * mf)
}

/// `E_m(u) = F_gamma[u]/2 - (1/2) int G_m(|u|)`.
pub fn regularized_energy(u: &GraphState, gamma: f64, m: u64) -> f64 {
    let (lo2, hi2) = band_sq(m);
    let lo = 1.0 / m as f64;
    // Inside the band G_m(r) = r^2 (Log r^2 - 1) + offset.
    let offset = big_g_m(lo, m) - 2.0 * p_log(lo);
    let g = |z: Complex64| {
        let r2 = z.norm_sqr();
        if r2 > lo2 && r2 <= hi2 {
            r2 * (r2.ln() - 1.0) + offset
        } else {
            big_g_m(r2.sqrt(), m)
        }
    };
    0.5 * quadratic_form(u, gamma) - 0.5 * integrate(u, g)
}

/// Gradient of `E_m` with respect to the real inner product: `K u - g_m(u)`.
pub fn regularized_gradient(u: &GraphState, gamma: f64, m: u64) -> Result<GraphState> {
    let ku = DiscreteOperator::new(*u.grid(), gamma).apply(u)?;
    let g = u.map(|z| g_m_eval(z, m));
    ku.sub(&g)
}

/// Regularization index whose exact band covers `[1e-6 max|u|, 10 max|u|]`.
pub fn default_m(u: &GraphState) -> u64 {
    let peak = u.max_modulus();
    if peak == 0.0 {
        return 1;
    }
    let need = (1.0 / (1e-6 * peak)).max(10.0 * peak).ceil();
    need.clamp(1.0, 1e15) as u64
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GraphState>,
    /// Time of every step, starting with 0.
    pub step_times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// `|mass(t) - mass(0)| / mass(0)` at every step.
    pub mass_drift: Vec<f64>,
    /// `|E_m(t) - E_m(0)| / |E_m(0)|` at every step.
    pub energy_drift: Vec<f64>,
    pub m: u64,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &GraphState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.mass_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.energy_drift.iter().copied().fold(0.0, f64::max)
    }
}

/// One Strang step of size `dt` (negative `dt` runs the flow backwards).
#[derive(Debug, Clone)]
pub struct Propagator {
    op: DiscreteOperator,
    solver: StarSolver,
    m: u64,
    dt: f64,
}

impl Propagator {
    pub fn new(u: &GraphState, gamma: f64, m: u64, dt: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("regularization index m must be at least 1"));
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(invalid(format!("time step must be finite and nonzero, got {dt}")));
        }
        let grid = *u.grid();
        let beta = Complex64::new(0.0, dt / 2.0);
        Ok(Self {
            op: DiscreteOperator::new(grid, gamma),
            solver: StarSolver::new(grid, gamma, Complex64::new(1.0, 0.0), beta),
            m,
            dt,
        })
    }

    fn rotate(&self, u: &mut GraphState, tau: f64) {
        let m = self.m;
        let (lo2, hi2) = band_sq(m);
        u.map_in_place(|z| {
            let r2 = z.norm_sqr();
            let theta = if r2 >= lo2 && r2 <= hi2 {
                r2.ln()
            } else {
                theta_m(r2.sqrt(), m)
            };
            let (s, c) = (tau * theta).sin_cos();
            z * Complex64::new(c, s)
        });
    }

    pub fn step(&self, u: &mut GraphState) -> Result<()> {
        self.rotate(u, self.dt / 2.0);
        let ku = self.op.apply(u)?;
        let rhs = weighted(u).combine(
            Complex64::new(1.0, 0.0),
            &weighted(&ku),
            Complex64::new(0.0, -self.dt / 2.0),
        )?;
        *u = self.solver.solve(&rhs);
        self.rotate(u, self.dt / 2.0);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateOptions {
    /// Regularization index; `None` picks [`default_m`].
    pub m: Option<u64>,
    pub dt: f64,
    pub horizon: f64,
    /// Keep every `stride`-th state.
    pub stride: usize,
}

impl PropagateOptions {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            m: None,
            dt,
            horizon,
            stride: 1,
        }
    }

    pub fn with_m(mut self, m: u64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }
}

pub fn propagate(u0: &GraphState, gamma: f64, opts: &PropagateOptions) -> Result<Trajectory> {
    let h = u0.grid().spacing();
    if !(opts.dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {}", opts.dt)));
    }
    if opts.dt > h * (1.0 + 1e-12) {
        return Err(invalid(format!("dt = {} exceeds the grid spacing {h}", opts.dt)));
    }
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {}", opts.horizon)));
    }
    if opts.stride == 0 {
        return Err(invalid("stride must be at least 1"));
    }
    u0.check_finite()?;
    let m = opts.m.unwrap_or_else(|| default_m(u0));
    let prop = Propagator::new(u0, gamma, m, opts.dt)?;
    let steps = (opts.horizon / opts.dt).round().max(1.0) as usize;

    let mass0 = mass(u0);
    let energy0 = regularized_energy(u0, gamma, m);
    let rel = |x: f64, x0: f64| {
        if x0 == 0.0 {
            (x - x0).abs()
        } else {
            (x - x0).abs() / x0.abs()
        }
    };

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![u0.clone()],
        step_times: vec![0.0],
        mass: vec![mass0],
        energy: vec![energy0],
        mass_drift: vec![0.0],
        energy_drift: vec![0.0],
        m,
        dt: opts.dt,
    };
    let mut u = u0.clone();
    for k in 1..=steps {
        prop.step(&mut u)?;
        let t = k as f64 * opts.dt;
        let mk = mass(&u);
        if !mk.is_finite() {
            return Err(Error::NonFinite(format!("mass became {mk} at t = {t}")));
        }
        let ek = regularized_energy(&u, gamma, m);
        traj.step_times.push(t);
        traj.mass.push(mk);
        traj.energy.push(ek);
        traj.mass_drift.push(rel(mk, mass0));
        traj.energy_drift.push(rel(ek, energy0));
        if k % opts.stride == 0 || k == steps {
            traj.times.push(t);
            traj.states.push(u.clone());
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub m_coarse: u64,
    pub m_fine: u64,
    pub distance: f64,
}

/// `L^2` distances at the final time between solutions for consecutive
/// entries of an increasing schedule of `m`.
pub fn m_refinement_study(
    u0: &GraphState,
    gamma: f64,
    schedule: &[u64],
    dt: f64,
    horizon: f64,
) -> Result<Vec<RefinementRow>> {
    if schedule.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("m schedule must be nondecreasing"));
    }
    let finals = schedule
        .iter()
        .map(|&m| {
            let opts = PropagateOptions::new(dt, horizon).with_m(m).with_stride(usize::MAX);
            propagate(u0, gamma, &opts).map(|t| t.final_state().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for k in 1..schedule.len() {
        rows.push(RefinementRow {
            m_coarse: schedule[k - 1],
            m_fine: schedule[k],
            distance: l2_norm(&finals[k].sub(&finals[k - 1])?),
        });
    }
    Ok(rows)
}

/// Largest value over the run of `||u(t) - v(t)||^2 / (||u0 - v0||^2 e^{8t})`,
/// the Gronwall envelope of the uniqueness estimate. Returns 0 when `u0 = v0`.
pub fn doubling_check(u0: &GraphState, v0: &GraphState, gamma: f64, m: u64, dt: f64, horizon: f64) -> Result<f64> {
    u0.same_grid(v0)?;
    let d0 = l2_norm(&u0.sub(v0)?).powi(2);
    if d0 == 0.0 {
        return Ok(0.0);
    }
    let p = Propagator::new(u0, gamma, m, dt)?;
    let steps = (horizon / dt).round().max(1.0) as usize;
    let (mut u, mut v) = (u0.clone(), v0.clone());
    let mut worst = 1.0_f64;
    for k in 1..=steps {
        p.step(&mut u)?;
        p.step(&mut v)?;
        let t = k as f64 * dt;
        let d = l2_norm(&u.sub(&v)?).powi(2);
        worst = worst.max(d / (d0 * (8.0 * t).exp()));
    }
    Ok(worst)
}

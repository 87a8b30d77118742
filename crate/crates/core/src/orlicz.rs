//! Scalar functionals on graph states: mass, the quadratic form, the
//! logarithmic integral, energy, action, the Nehari functional, Luxemburg and
//! W-norms, and the gaps of the log-Sobolev and vertex-trace inequalities.
//!
//! The logarithmic integral is assembled through the Orlicz split
//! `|z|^2 Log|z|^2 = B(|z|) - A(|z|)`, with `0 Log 0 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{self, EdgeProfile, GraphState};

pub(crate) const KNOT: f64 = 0.049_787_068_367_863_944; // e^{-3}
pub(crate) const KNOT_SQ: f64 = 0.002_478_752_176_666_358_5; // e^{-6}

/// `A(s)`, the convex Young function taming the logarithm near zero.
pub fn a_fn(s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(invalid(format!("A is defined on [0, inf), got {s}")));
    }
    Ok(young_a(s))
}

/// `B(s) = s^2 Log s^2 + A(s)`.
pub fn b_fn(s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(invalid(format!("B is defined on [0, inf), got {s}")));
    }
    Ok(young_b(s))
}

pub(crate) fn young_a(s: f64) -> f64 {
    if s <= KNOT {
        if s == 0.0 {
            0.0
        } else {
            -s * s * (s * s).ln()
        }
    } else {
        3.0 * s * s + 4.0 * KNOT * s - KNOT_SQ
    }
}

pub(crate) fn young_b(s: f64) -> f64 {
    if s <= KNOT {
        0.0
    } else {
        s * s * (s * s).ln() + young_a(s)
    }
}

/// `|z|^2 Log |z|^2` from the modulus, with the continuous extension at 0.
pub(crate) fn entropy_density(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        let s2 = s * s;
        s2 * s2.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub mass: f64,
    pub form: f64,
    pub log_int: f64,
    pub energy: f64,
    pub action: f64,
    pub nehari: f64,
    pub luxemburg: Vec<f64>,
    pub w_norm: f64,
}

pub fn mass(u: &GraphState) -> f64 {
    graph::integrate(u, |z| z.norm_sqr())
}

/// `F_gamma[u]`: forward-difference gradient energy minus `gamma |u(0)|^2`.
pub fn quadratic_form(u: &GraphState, gamma: f64) -> f64 {
    graph::gradient_energy(u) - gamma * u.vertex().norm_sqr()
}

/// `int |u|^2 Log |u|^2` computed as `int B(|u|) - A(|u|)`.
pub fn log_integral(u: &GraphState) -> f64 {
    graph::integrate(u, |z| {
        let s = z.norm();
        young_b(s) - young_a(s)
    })
}

pub fn energy(u: &GraphState, gamma: f64) -> f64 {
    0.5 * quadratic_form(u, gamma) - 0.5 * log_integral(u)
}

/// Action `S_{omega,gamma}`.
pub fn action(u: &GraphState, omega: f64, gamma: f64) -> f64 {
    0.5 * quadratic_form(u, gamma) + 0.5 * (omega + 1.0) * mass(u) - 0.5 * log_integral(u)
}

/// Nehari functional `I_{omega,gamma} = <S'(u), u>`.
pub fn nehari(u: &GraphState, omega: f64, gamma: f64) -> f64 {
    quadratic_form(u, gamma) + omega * mass(u) - log_integral(u)
}

pub fn functionals(u: &GraphState, omega: f64, gamma: f64) -> FunctionalReport {
    let mass = mass(u);
    let form = quadratic_form(u, gamma);
    let log_int = log_integral(u);
    let luxemburg: Vec<f64> = (0..u.grid().edges())
        .map(|i| luxemburg_norm(&u.edge_profile(i)))
        .collect();
    FunctionalReport {
        mass,
        form,
        log_int,
        energy: 0.5 * form - 0.5 * log_int,
        action: 0.5 * form + 0.5 * (omega + 1.0) * mass - 0.5 * log_int,
        nehari: form + omega * mass - log_int,
        w_norm: w_norm_with(u, &luxemburg),
        luxemburg,
    }
}

/// The rescaled Kirchhoff functional `(4/N^2) |u'|^2 + omega |u|^2 - int |u|^2 Log |u|^2`.
pub fn q_functional(u: &GraphState, omega: f64) -> f64 {
    let n = u.grid().edges() as f64;
    4.0 / (n * n) * graph::gradient_energy(u) + omega * mass(u) - log_integral(u)
}

/// Luxemburg norm `inf { k > 0 : int A(|u| / k) <= 1 }` of one edge profile.
///
/// The modular `k -> int A(|u|/k)` is strictly decreasing, so the root of
/// `modular(k) = 1` is bracketed by doubling/halving and then located by
/// Illinois regula falsi to relative tolerance `1e-10`.
pub fn luxemburg_norm(profile: &EdgeProfile) -> f64 {
    let values = profile.values();
    let peak = values.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let excess = |k: f64| profile.integrate(|v| young_a(v.abs() / k)) - 1.0;

    let mut hi = peak;
    let mut f_hi = excess(hi);
    while f_hi > 0.0 {
        hi *= 2.0;
        f_hi = excess(hi);
    }
    let mut lo = hi / 2.0;
    let mut f_lo = excess(lo);
    while f_lo <= 0.0 {
        hi = lo;
        f_hi = f_lo;
        lo /= 2.0;
        if lo < f64::MIN_POSITIVE {
            return hi;
        }
        f_lo = excess(lo);
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mut k = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(k > lo && k < hi) {
            k = 0.5 * (lo + hi);
        }
        let fk = excess(k);
        if fk == 0.0 {
            return k;
        }
        if fk > 0.0 {
            lo = k;
            f_lo = fk;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = k;
            f_hi = fk;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    hi
}

/// Discrete `H^1` norm of one edge (mass with half vertex weight plus gradient energy).
pub fn edge_h1_norm(profile: &EdgeProfile) -> f64 {
    (profile.mass() + profile.gradient_energy()).sqrt()
}

/// `||u||_W = sqrt(sum_i (||u_i||_{H^1} + ||u_i||_{L^A})^2)`.
pub fn w_norm(u: &GraphState) -> f64 {
    let lux: Vec<f64> = (0..u.grid().edges())
        .map(|i| luxemburg_norm(&u.edge_profile(i)))
        .collect();
    w_norm_with(u, &lux)
}

fn w_norm_with(u: &GraphState, luxemburg: &[f64]) -> f64 {
    (0..u.grid().edges())
        .map(|i| {
            let h1 = complex_edge_h1(u, i);
            (h1 + luxemburg[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// The `H^1` part must see phase differences, so it is taken on the complex samples.
fn complex_edge_h1(u: &GraphState, i: usize) -> f64 {
    let g = u.grid();
    let edge = u.edge(i);
    let mass = g.spacing() / 2.0 * u.vertex().norm_sqr()
        + g.spacing() * edge[..g.points() - 1].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let grad = graph::edge_gradient_energy(u.vertex(), edge) / g.spacing();
    (mass + grad).sqrt()
}

/// Discrete `H^1(Gamma)` norm.
pub fn h1_norm(u: &GraphState) -> f64 {
    (mass(u) + graph::gradient_energy(u)).sqrt()
}

/// Right side minus left side of the log-Sobolev inequality on the star graph:
///
/// ```text
/// int |u|^2 Log|u|^2 <= a^2/pi |u'|^2 + (Log(2|u|^2) - (1 + Log a)) |u|^2
/// ```
pub fn log_sobolev_gap(u: &GraphState, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let m = mass(u);
    if m == 0.0 {
        return Err(Error::ZeroState);
    }
    let grad = graph::gradient_energy(u);
    let rhs = alpha * alpha / std::f64::consts::PI * grad + ((2.0 * m).ln() - (1.0 + alpha.ln())) * m;
    Ok(rhs - log_integral(u))
}

/// `eps |f|^2 + |f'|^2 / eps - |f(0)|^2` for a single half-line profile.
pub fn trace_bound_gap(profile: &EdgeProfile, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let f0 = profile.values()[0];
    Ok(epsilon * profile.mass() + profile.gradient_energy() / epsilon - f0 * f0)
}

/// Half-line Nehari functional `|u'|^2 + omega |u|^2 - int |u|^2 Log |u|^2`.
pub fn halfline_nehari(profile: &EdgeProfile, omega: f64) -> f64 {
    profile.gradient_energy() + omega * profile.mass() - profile.integrate(|v| entropy_density(v.abs()))
}

/// Half-line action.
pub fn halfline_action(profile: &EdgeProfile, omega: f64) -> f64 {
    0.5 * profile.gradient_energy() + 0.5 * (omega + 1.0) * profile.mass()
        - 0.5 * profile.integrate(|v| entropy_density(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn gaussian(n: usize) -> GraphState {
        let g = build_grid(n, 20.0, 4000).unwrap();
        GraphState::symmetric(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn young_functions() {
        let k = (-3.0_f64).exp();
        let inner = -k * k * (k * k).ln();
        let outer = 3.0 * k * k + 4.0 * k * k - (-6.0_f64).exp();
        assert!((inner - outer).abs() < 1e-15);
        assert!((a_fn(k).unwrap() - 0.014_872_513_059_998_15).abs() < 1e-15);
        // mpmath: 3 + 4e^-3 - e^-6 = 3.19666952129478941349
        assert!((a_fn(1.0).unwrap() - 3.196_669_521_294_789_4).abs() < 1e-14);
        assert_eq!(b_fn(k).unwrap(), 0.0);
        assert_eq!(a_fn(0.0).unwrap(), 0.0);
        assert_eq!(b_fn(0.0).unwrap(), 0.0);
        assert!(a_fn(-1e-3).is_err());
        assert!(b_fn(-1.0).is_err());
    }

    #[test]
    fn young_a_is_increasing_and_convex() {
        let xs: Vec<f64> = (0..2000).map(|k| k as f64 * 1e-3).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| young_a(x)).collect();
        for w in ys.windows(3) {
            assert!(w[1] >= w[0]);
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-15);
        }
    }

    #[test]
    fn gaussian_moments() {
        let u = gaussian(2);
        assert!((quadratic_form(&u, 0.0) - PI.sqrt() / 2.0).abs() < 1e-5);
        assert!((quadratic_form(&u, 1.0) - (PI.sqrt() / 2.0 - 1.0)).abs() < 1e-5);
        assert!((log_integral(&u) + PI.sqrt() / 2.0).abs() < 1e-5);
    }

    #[test]
    fn zero_state() {
        let g = build_grid(3, 5.0, 50).unwrap();
        let z = GraphState::zeros(g);
        let r = functionals(&z, 0.3, 1.0);
        assert_eq!(r.mass, 0.0);
        assert_eq!(r.form, 0.0);
        assert_eq!(r.log_int, 0.0);
        assert_eq!(r.action, 0.0);
        assert_eq!(r.nehari, 0.0);
        assert_eq!(r.w_norm, 0.0);
        assert!(r.luxemburg.iter().all(|&v| v == 0.0));
        assert_eq!(q_functional(&z, 1.0), 0.0);
        assert!(matches!(log_sobolev_gap(&z, 1.0), Err(Error::ZeroState)));
    }

    #[test]
    fn q_equals_kirchhoff_nehari_on_two_edges() {
        let u = gaussian(2).scaled_real(1.7);
        let q = q_functional(&u, 0.4);
        let i = nehari(&u, 0.4, 0.0);
        assert!((q - i).abs() < 1e-12 * i.abs().max(1.0));
    }

    #[test]
    fn log_sobolev_sharp_gaussian() {
        // Substituting Gaussian moments gives gap = mass * Log 2 at alpha = sqrt(pi).
        let u = gaussian(2);
        let gap = log_sobolev_gap(&u, PI.sqrt()).unwrap();
        assert!((gap - mass(&u) * 2f64.ln()).abs() < 1e-5, "gap = {gap}");
        let rotated = u.scaled(Complex64::from_polar(1.0, 0.9));
        assert_eq!(gap.to_bits(), log_sobolev_gap(&u, PI.sqrt()).unwrap().to_bits());
        assert!((log_sobolev_gap(&rotated, PI.sqrt()).unwrap() - gap).abs() < 1e-13);
    }

    #[test]
    fn trace_bound_equality_case() {
        let p = EdgeProfile::from_fn(1e-3, 30_001, |x| (-x).exp());
        assert!(trace_bound_gap(&p, 1.0).unwrap().abs() < 1e-6);
        let z = EdgeProfile::new(0.1, vec![0.0; 10]);
        assert_eq!(trace_bound_gap(&z, 2.0).unwrap(), 0.0);
        assert!(trace_bound_gap(&p, 0.0).is_err());
    }

    #[test]
    fn luxemburg_fixed_point() {
        let base = EdgeProfile::from_fn(0.01, 1001, |x| (-x * x).exp());
        // Scale c with int A(c u) = 1, found by secant on the modular.
        let modular = |c: f64| base.integrate(|v| young_a(c * v));
        let (mut c0, mut c1) = (0.1, 1.0);
        for _ in 0..100 {
            let (f0, f1) = (modular(c0) - 1.0, modular(c1) - 1.0);
            if f1 == f0 {
                break;
            }
            let c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
            c0 = c1;
            c1 = c2;
        }
        assert!((modular(c1) - 1.0).abs() < 1e-13);
        let scaled = EdgeProfile::new(0.01, base.values().iter().map(|v| v * c1).collect());
        assert!((luxemburg_norm(&scaled) - 1.0).abs() < 1e-8);
        assert_eq!(luxemburg_norm(&EdgeProfile::new(0.1, vec![0.0; 5])), 0.0);
    }
}

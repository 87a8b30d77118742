//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run a subset with `cargo test --release --test acceptance -- 3 7`.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use lognls_core::evolution::{default_m, propagate, PropagateOptions};
use lognls_core::graph::{gradient_energy, DiscreteOperator};
use lognls_core::orlicz::{action, log_integral, log_sobolev_gap, mass, nehari, trace_bound_gap};
use lognls_core::orlicz::{halfline_action, halfline_nehari};
use lognls_core::rearrange::{distribution, rearrange};
use lognls_core::sampling::random_state;
use lognls_core::stability::{perturbation, phase_distance, stability_sweep, Norm, PerturbationKind, StabilityOptions};
use lognls_core::stationary::{
    action_closed_form, d_values, escaping_sequence, stationary_residual, stationary_state, StationaryParams,
};
use lognls_core::variational::{
    gamma_grid, minimize_action, nehari_project, threshold_bracket, threshold_scan, Init, MinimizeOptions,
    MinimizeReport,
};
use lognls_core::{build_grid, GraphState, Result};

// Independent high-precision values (30-digit arithmetic), frozen.
const GAMMA_STAR: [(usize, f64); 3] = [
    (3, 0.913_710_582_521_956_9),
    (4, 1.907_745_104_817_879_5),
    (6, 4.104_422_097_939_736),
];
const D0_OMEGA0: f64 = 2.409_014_547_349_361;
const ACTION_N3_G12: f64 = 2.065_516_698_103_026_6;
const ACTION_N3_G05: f64 = 2.940_191_591_898_806;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 11] = [
        ("stationary catalog", stationary_catalog),
        ("action closed form", action_closed_form_check),
        ("threshold", threshold),
        ("spectral bottom", spectral),
        ("Kirchhoff infimum", kirchhoff_infimum),
        ("ground-state recovery", ground_state_recovery),
        ("conservation", conservation),
        ("orbital stability proxy", orbital_stability),
        ("rearrangement", rearrangement),
        ("inequalities", inequalities),
        ("functional identities", identities),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} [{id:>2}] {name}: {} ({secs:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

fn catalog() -> Vec<StationaryParams> {
    let mut out = Vec::new();
    for n in [2, 3, 5] {
        for gamma in [0.5, 1.0, 2.0] {
            for omega in [-1.0, 0.0, 1.0] {
                for kappa in 0..=(n - 1) / 2 {
                    out.push(StationaryParams::new(n, gamma, omega, kappa).expect("catalog entry is valid"));
                }
            }
        }
    }
    out
}

fn stationary_catalog() -> Result<Outcome> {
    let (mut interior, mut jump) = (0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let entries = catalog();
    for p in &entries {
        let coarse = stationary_state(p, build_grid(p.edges(), 20.0, 2000)?)?;
        let fine = stationary_state(p, build_grid(p.edges(), 20.0, 4000)?)?;
        let rc = stationary_residual(&coarse, p.omega(), p.gamma());
        let rf = stationary_residual(&fine, p.omega(), p.gamma());
        interior = interior.max(rc.interior);
        jump = jump.max(rc.jump);
        let ratio = rc.interior / rf.interior;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(Outcome::new(
        interior <= 1e-3 && jump <= 1e-3 && lo >= 3.5 && hi <= 4.5,
        format!(
            "{} states, max interior {interior:.2e}, max jump {jump:.2e}, h-halving ratio in [{lo:.3}, {hi:.3}]",
            entries.len()
        ),
    ))
}

fn action_closed_form_check() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for p in catalog() {
        let u = stationary_state(&p, build_grid(p.edges(), 20.0, 2000)?)?;
        let exact = action_closed_form(&p);
        worst = worst.max(((action(&u, p.omega(), p.gamma()) - exact) / exact).abs());
    }
    let oracle = [
        (StationaryParams::new(3, 1.2, 0.0, 0)?, ACTION_N3_G12),
        (StationaryParams::new(3, 0.5, 0.0, 0)?, ACTION_N3_G05),
    ];
    let formula = oracle
        .iter()
        .map(|(p, v)| ((action_closed_form(p) - v) / v).abs())
        .fold(0.0, f64::max);
    Ok(Outcome::new(
        worst <= 1e-4 && formula <= 1e-13,
        format!("max relative quadrature error {worst:.2e}, formula vs oracle {formula:.1e}"),
    ))
}

fn threshold() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, star) in GAMMA_STAR {
        let rows = threshold_scan(n, 0.0, &gamma_grid(0.0, 6.0, 12_000)?)?;
        match threshold_bracket(&rows) {
            Some((a, b)) => {
                let ok = a <= star && star <= b && b - a <= 1e-3;
                pass &= ok;
                parts.push(format!("N={n}: [{a:.4}, {b:.4}] vs {star:.6}"));
            }
            None => {
                pass = false;
                parts.push(format!("N={n}: no bracket"));
            }
        }
    }
    let rows = threshold_scan(2, 0.0, &gamma_grid(0.01, 6.0, 600)?)?;
    let below = rows.iter().all(|r| r.difference < 0.0);
    pass &= below;
    parts.push(format!("N=2: S(phi0) < d0 at all {} gammas: {below}", rows.len()));
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn spectral() -> Result<Outcome> {
    let (n, gamma) = (3, 1.5);
    let op = DiscreteOperator::new(build_grid(n, 40.0, 4000)?, gamma);
    let (lambda, _) = op.min_eigenpair()?;
    let expected = -gamma * gamma / (n * n) as f64;
    let mut negatives = 0;
    for g in [0.0, -0.5, -2.0] {
        negatives += DiscreteOperator::new(build_grid(n, 40.0, 4000)?, g).count_below(0.0);
    }
    let err = (lambda - expected).abs();
    Ok(Outcome::new(
        err <= 1e-3 && negatives == 0,
        format!(
            "lambda_min {lambda:.6} vs {expected:.6} (err {err:.1e}); negative eigenvalues for gamma <= 0: {negatives}"
        ),
    ))
}

fn kirchhoff_infimum() -> Result<Outcome> {
    let mut pass = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut signed = Vec::new();
    for omega in [-1.0, 0.0, 1.0] {
        let f = escaping_sequence(10, omega, 1e-3, 20.0)?;
        let m = f.mass();
        let d = d_values(omega);
        let nehari_rel = halfline_nehari(&f, omega).abs() / m;
        let mass_rel = (m / ((omega + 1.0).exp() * std::f64::consts::PI.sqrt()) - 1.0).abs();
        let s = halfline_action(&f, omega);
        let action_rel = (s - d.kirchhoff) / d.kirchhoff;
        pass &= nehari_rel <= 1e-6 && mass_rel <= 1e-6 && action_rel.abs() <= 1e-6;
        signed.push(format!("{action_rel:+.1e}"));
        worst.0 = worst.0.max(nehari_rel);
        worst.1 = worst.1.max(mass_rel);
        worst.2 = worst.2.max(action_rel.abs());
    }
    let oracle = (d_values(0.0).kirchhoff - D0_OMEGA0).abs() / D0_OMEGA0;
    pass &= oracle <= 1e-14;
    Ok(Outcome::new(
        pass,
        format!(
            "|I|/mass {:.1e}, mass rel {:.1e}, action vs d0 rel {:.1e} (signed {}), d0 vs oracle {oracle:.0e}",
            worst.0,
            worst.1,
            worst.2,
            signed.join(" ")
        ),
    ))
}

fn lower_bound(edges: usize, gamma: f64, omega: f64) -> f64 {
    0.25 * (std::f64::consts::PI / 2.0).sqrt()
        * (omega + 1.0).exp()
        * (-2.0 * gamma * gamma / (edges * edges) as f64).exp()
}

fn ground_states() -> Result<Vec<MinimizeReport>> {
    let opts = MinimizeOptions::default();
    (0..5)
        .map(|seed| minimize_action(3, 1.2, 0.0, Init::RandomSymmetric(seed), &opts))
        .collect()
}

fn ground_state_recovery() -> Result<Outcome> {
    let exact = action_closed_form(&StationaryParams::new(3, 1.2, 0.0, 0)?);
    let mut pass = true;
    let (mut dist, mut rel) = (0.0f64, 0.0f64);
    for r in ground_states()? {
        let d = r.dist_mod_phase_to_phi0.unwrap_or(f64::INFINITY);
        let e = ((r.final_action - exact) / exact).abs();
        pass &= r.converged && d <= 1e-3 && e <= 1e-3;
        dist = dist.max(d);
        rel = rel.max(e);
    }
    let above = format!("gamma=1.2: 5 seeds, max dist {dist:.2e}, max action rel {rel:.2e}");

    // Below the threshold the minimizing sequences lose compactness: the
    // action approaches d0 from the symmetric state's level while the state
    // moves away from phi0 onto a single edge.
    let d0 = d_values(0.0).kirchhoff;
    let s_phi0 = action_closed_form(&StationaryParams::new(3, 0.5, 0.0, 0)?);
    let opts = MinimizeOptions {
        max_iter: 5000,
        ..MinimizeOptions::default()
    };
    let mut below = Vec::new();
    for seed in 0..3 {
        let r = minimize_action(3, 0.5, 0.0, Init::RandomAsymmetric(seed), &opts)?;
        let d = r.dist_mod_phase_to_phi0.unwrap_or(0.0);
        let gap = (r.final_action - d0) / d0;
        let ok = r.escaped || (gap.abs() <= 1e-3 && r.final_action < s_phi0 && d > 0.5);
        pass &= ok;
        below.push(format!(
            "seed {seed}: S-d0 rel {gap:.1e}, dist {d:.2}, centroid {:.2}, escaped {}",
            r.centroid, r.escaped
        ));
    }
    Ok(Outcome::new(pass, format!("{above}; gamma=0.5: {}", below.join(", "))))
}

fn conservation() -> Result<Outcome> {
    let grid = build_grid(3, 20.0, 2000)?;
    let phi = stationary_state(&StationaryParams::new(3, 1.2, 0.0, 0)?, grid)?;
    let traj = propagate(&phi, 1.2, &PropagateOptions::new(1e-3, 10.0).with_stride(5000))?;
    let mass_drift = traj.max_mass_drift();
    let energy_drift = traj.max_energy_drift();
    let at5 = traj
        .times
        .iter()
        .position(|&t| (t - 5.0).abs() < 1e-9)
        .expect("snapshot at t = 5");
    let err = phase_distance(&traj.states[at5], &phi, Norm::L2)?;

    // Order check on a state that is not stationary.
    let u0 = phi.combine(
        Complex64::new(1.0, 0.0),
        &perturbation(grid, PerturbationKind::Random, 0)?,
        Complex64::new(0.1, 0.0),
    )?;
    let m = default_m(&u0);
    let drifts = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            propagate(
                &u0,
                1.2,
                &PropagateOptions::new(dt, 2.0).with_m(m).with_stride(usize::MAX),
            )
            .map(|t| t.max_energy_drift())
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = [drifts[0] / drifts[1], drifts[1] / drifts[2]];
    let order_ok = ratios.iter().all(|r| (3.0..=5.0).contains(r));
    Ok(Outcome::new(
        mass_drift <= 1e-9 && energy_drift <= 1e-5 && err <= 1e-4 && order_ok,
        format!(
            "mass drift {mass_drift:.1e}, energy drift {energy_drift:.1e}, L2 error at T=5 {err:.2e}, \
             energy drift ratios under dt halving {:.2}, {:.2}",
            ratios[0], ratios[1]
        ),
    ))
}

fn orbital_stability() -> Result<Outcome> {
    let opts = StabilityOptions::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in [
        PerturbationKind::Symmetric,
        PerturbationKind::Antisymmetric,
        PerturbationKind::Random,
    ] {
        let reps = stability_sweep(3, 1.2, 0.0, &[1e-3, 5e-4], 50.0, kind, &opts)?;
        let factor = reps[0].sup_dist / reps[1].sup_dist;
        let ok = reps.iter().all(|r| r.sup_dist <= 10.0 * r.epsilon) && (1.5..=3.0).contains(&factor);
        pass &= ok;
        parts.push(format!(
            "{kind:?}: ratio {:.3}/{:.3}, halving factor {factor:.3}",
            reps[0].ratio, reps[1].ratio
        ));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn rearrangement() -> Result<Outcome> {
    let (mut mass_err, mut dist_err, mut log_err, mut grad_excess) = (0.0f64, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    let mut pass = true;
    for k in 0..100u64 {
        let n = 2 + (k % 3) as usize;
        let g = build_grid(n, 10.0, 500)?;
        let h = g.spacing();
        let u = random_state(g, k)?;
        let r = rearrange(&u);
        let (mu, mr) = (mass(&u), mass(&r));
        let e_mass = ((mu - mr) / mu).abs();
        let peak = u.max_modulus();
        let e_dist = (1..400)
            .map(|i| {
                let s = peak * i as f64 / 400.0;
                (distribution(&u, s) - distribution(&r, s)).abs()
            })
            .fold(0.0, f64::max);
        let e_log = (log_integral(&u) - log_integral(&r)).abs();
        let excess = gradient_energy(&r).sqrt() - n as f64 / 2.0 * gradient_energy(&u).sqrt();
        pass &= e_mass <= 1e-12 && e_dist <= 2.0 * n as f64 * h && e_log <= h * mu.max(1.0) && excess <= 1e-6;
        mass_err = mass_err.max(e_mass);
        dist_err = dist_err.max(e_dist / (2.0 * n as f64 * h));
        log_err = log_err.max(e_log / (h * mu.max(1.0)));
        grad_excess = grad_excess.max(excess);
    }
    Ok(Outcome::new(
        pass,
        format!(
            "100 states: mass rel {mass_err:.1e}, distribution gap {dist_err:.2} x 2Nh, \
             log-integral change {log_err:.3} x h mass, max gradient excess {grad_excess:.3}"
        ),
    ))
}

fn inequalities() -> Result<Outcome> {
    let (mut ls, mut tr) = (f64::INFINITY, f64::INFINITY);
    for k in 0..100u64 {
        let n = 2 + (k % 4) as usize;
        let u = random_state(build_grid(n, 15.0, 1500)?, 1000 + k)?;
        let scale = mass(&u) + gradient_energy(&u) + log_integral(&u).abs();
        for alpha in [0.25, 1.0, 2.0, 5.0] {
            ls = ls.min(log_sobolev_gap(&u, alpha)? / scale);
        }
        for i in 0..n {
            let f = u.edge_profile(i);
            let s = f.mass() + f.gradient_energy() + f.values()[0].powi(2);
            for eps in [0.1, 1.0, 10.0] {
                tr = tr.min(trace_bound_gap(&f, eps)? / s);
            }
        }
    }
    let bound = lower_bound(3, 1.2, 0.0);
    let lowest = ground_states()?
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.final_action)
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome::new(
        ls >= -1e-8 && tr >= -1e-8 && lowest >= bound,
        format!(
            "min log-Sobolev gap/scale {ls:.3e}, min trace gap/scale {tr:.3e}, \
             converged action {lowest:.6} >= bound {bound:.6}"
        ),
    ))
}

fn identities() -> Result<Outcome> {
    let (omega, gamma) = (0.0, 1.2);
    let mut s_err = 0.0f64;
    let (mut idem, mut on) = (0.0f64, 0.0f64);
    for k in 0..50u64 {
        let n = 2 + (k % 4) as usize;
        let u = random_state(build_grid(n, 15.0, 1500)?, 500 + k)?;
        let (w, g) = (-1.0 + 0.04 * k as f64, -1.0 + 0.06 * k as f64);
        let s = action(&u, w, g);
        let rhs = nehari(&u, w, g) + mass(&u);
        s_err = s_err.max((2.0 * s - rhs).abs() / (2.0 * s).abs().max(rhs.abs()));
        let p = nehari_project(&u, omega, gamma)?;
        let q = nehari_project(&p, omega, gamma)?;
        idem = idem.max(rel_dist(&p, &q)?);
        on = on.max(nehari(&p, omega, gamma).abs() / mass(&p));
    }
    let phi = stationary_state(&StationaryParams::new(3, gamma, omega, 0)?, build_grid(3, 20.0, 2000)?)?;
    let target = nehari_project(&phi, omega, gamma)?;
    let mut scaled = 0.0f64;
    for c in [0.1, 3.0] {
        scaled = scaled.max(rel_dist(&nehari_project(&phi.scaled_real(c), omega, gamma)?, &target)?);
    }
    Ok(Outcome::new(
        s_err <= 1e-12 && idem <= 1e-12 && on <= 1e-12 && scaled <= 1e-10,
        format!(
            "2S = I + mass rel {s_err:.1e}; projection idempotence {idem:.1e}, |I|/mass after projection {on:.1e}; \
             c*phi0 projection error {scaled:.1e}"
        ),
    ))
}

fn rel_dist(a: &GraphState, b: &GraphState) -> Result<f64> {
    Ok(mass(&a.sub(b)?).sqrt() / mass(b).sqrt())
}

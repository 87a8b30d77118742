//! Symmetric rearrangement on the star graph.
//!
//! The discrete state is viewed as a collection of atoms: the vertex sample
//! split into `N` half-atoms of length `h/2` (one per edge) and the interior
//! samples with length `h`. Atoms are sorted by decreasing modulus and poured
//! into the slots of a symmetric profile (slot 0 is the vertex with capacity
//! `N h/2`, slot `j` holds `N h`). An atom that straddles two slots is split,
//! and each slot takes the quadratic mean of what it received, so the `L^2`
//! mass is preserved exactly.
//!
//! This realizes the generalized inverse `t -> sup{s : lambda_u(s) > N t}` of
//! the distribution function, read off slot by slot.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::graph::GraphState;

#[derive(Debug, Clone, Copy)]
struct Atom {
    modulus: f64,
    weight: f64,
    edge: usize,
    position: usize,
}

fn atoms(u: &GraphState) -> Vec<Atom> {
    let g = u.grid();
    let h = g.spacing();
    let m = g.points();
    let mut out = Vec::with_capacity(g.edges() * m);
    let v = u.vertex().norm();
    for (i, edge) in u.edges().enumerate() {
        out.push(Atom {
            modulus: v,
            weight: h / 2.0,
            edge: i,
            position: 0,
        });
        for (j, z) in edge[..m - 1].iter().enumerate() {
            out.push(Atom {
                modulus: z.norm(),
                weight: h,
                edge: i,
                position: j + 1,
            });
        }
    }
    out
}

/// Sorted level profile: `(modulus, length)` pairs in decreasing order.
pub fn level_profile(u: &GraphState) -> Vec<(f64, f64)> {
    let mut a = atoms(u);
    sort_atoms(&mut a);
    a.into_iter().map(|x| (x.modulus, x.weight)).collect()
}

fn sort_atoms(a: &mut [Atom]) {
    a.sort_by(|x, y| {
        y.modulus
            .partial_cmp(&x.modulus)
            .unwrap_or(Ordering::Equal)
            .then(x.edge.cmp(&y.edge))
            .then(x.position.cmp(&y.position))
    });
}

/// `lambda_u(s) = |{|u| >= s}|`, measured with the quadrature lengths.
pub fn distribution(u: &GraphState, s: f64) -> f64 {
    let g = u.grid();
    let h = g.spacing();
    let m = g.points();
    let mut len = if u.vertex().norm() >= s { g.vertex_weight() } else { 0.0 };
    for edge in u.edges() {
        len += h * edge[..m - 1].iter().filter(|z| z.norm() >= s).count() as f64;
    }
    len
}

/// The symmetric, nonnegative, nonincreasing rearrangement `u*`.
pub fn rearrange(u: &GraphState) -> GraphState {
    let g = *u.grid();
    let n = g.edges() as f64;
    let h = g.spacing();
    let m = g.points();
    let mut sorted = atoms(u);
    sort_atoms(&mut sorted);

    let mut slots = vec![0.0; m];
    let capacity = |j: usize| if j == 0 { n * h / 2.0 } else { n * h };
    let mut slot = 0;
    let mut room = capacity(0);
    let mut acc = 0.0;
    for atom in &sorted {
        let mut left = atom.weight;
        let s2 = atom.modulus * atom.modulus;
        while left > 0.0 && slot < m {
            let take = left.min(room);
            acc += take * s2;
            left -= take;
            room -= take;
            if room <= 1e-12 * h {
                slots[slot] = (acc / capacity(slot)).sqrt();
                slot += 1;
                room = capacity(slot);
                acc = 0.0;
            }
        }
    }
    if slot < m && acc > 0.0 {
        slots[slot] = (acc / capacity(slot)).sqrt();
    }

    let mut out = GraphState::zeros(g);
    out.set_vertex(Complex64::new(slots[0], 0.0));
    for i in 0..g.edges() {
        let dst = out.edge_interior_mut(i);
        for (j, z) in dst.iter_mut().enumerate() {
            *z = Complex64::new(slots[j + 1], 0.0);
        }
    }
    out
}

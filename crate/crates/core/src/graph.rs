//! Star-graph grids, sampled states and the discrete delta-vertex Laplacian.
//!
//! Every edge is the half-line truncated to `[0, L]` and sampled at `x_j = j h`
//! for `j = 1..=M`. The vertex value `u(0)` is stored once and shared by all
//! edges, so continuity at the vertex holds by construction. The sample at
//! `x = L` is a homogeneous Dirichlet node and is always zero.
//!
//! The operator is derived from the discrete quadratic form
//!
//! ```text
//! F[u] = sum_i sum_{j=0}^{M-1} |u_{i,j+1} - u_{i,j}|^2 / h  -  gamma |u(0)|^2
//! ```
//!
//! against the trapezoidal inner product (vertex weight `N h / 2`, interior
//! weight `h`), which makes it exactly self-adjoint.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    edges: usize,
    length: f64,
    points: usize,
    spacing: f64,
}

impl GridSpec {
    pub fn new(edges: usize, length: f64, points: usize) -> Result<Self> {
        if edges < 2 {
            return Err(Error::InvalidGrid(format!(
                "a star graph needs at least 2 edges, got {edges}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "edge length must be positive, got {length}"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points per edge, got {points}"
            )));
        }
        Ok(Self {
            edges,
            length,
            points,
            spacing: length / points as f64,
        })
    }

    /// Number of edges `N`.
    pub fn edges(&self) -> usize {
        self.edges
    }

    /// Truncation length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Samples per edge `M` (the last one sits on the Dirichlet node).
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Position of sample `j` (0-based, so `x = (j + 1) h`).
    pub fn position(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.spacing
    }

    /// Quadrature weight carried by the shared vertex sample.
    pub fn vertex_weight(&self) -> f64 {
        self.edges as f64 * self.spacing / 2.0
    }
}

/// Convenience wrapper matching the `(N, L, M)` argument order used throughout.
pub fn build_grid(edges: usize, length: f64, points: usize) -> Result<GridSpec> {
    GridSpec::new(edges, length, points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::io::StateRecord", try_from = "crate::io::StateRecord")]
pub struct GraphState {
    grid: GridSpec,
    vertex: Complex64,
    samples: Vec<Complex64>,
}

impl GraphState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            vertex: ZERO,
            samples: vec![ZERO; grid.edges * grid.points],
        }
    }

    /// Builds a state from raw samples. `samples[i]` holds the `M` values of
    /// edge `i`; the last one must be zero.
    pub fn from_parts(grid: GridSpec, vertex: Complex64, samples: Vec<Vec<Complex64>>) -> Result<Self> {
        if samples.len() != grid.edges {
            return Err(invalid(format!(
                "expected {} edges of samples, got {}",
                grid.edges,
                samples.len()
            )));
        }
        let mut flat = Vec::with_capacity(grid.edges * grid.points);
        for (i, edge) in samples.into_iter().enumerate() {
            if edge.len() != grid.points {
                return Err(invalid(format!(
                    "edge {i} has {} samples, expected {}",
                    edge.len(),
                    grid.points
                )));
            }
            if edge[grid.points - 1] != ZERO {
                return Err(invalid(format!(
                    "edge {i}: sample at x = L must be zero (Dirichlet node)"
                )));
            }
            flat.extend(edge);
        }
        let state = Self {
            grid,
            vertex,
            samples: flat,
        };
        state.check_finite()?;
        Ok(state)
    }

    /// Samples per-edge profiles. All profiles must agree at `x = 0`.
    pub fn from_profile<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(usize, f64) -> Complex64,
    {
        let vertex = f(0, 0.0);
        for i in 1..grid.edges {
            let value = f(i, 0.0);
            let tol = 1e-12 * vertex.norm().max(value.norm()).max(f64::MIN_POSITIVE);
            if (value - vertex).norm() > tol {
                return Err(Error::VertexMismatch {
                    edge: i,
                    value: value.to_string(),
                    reference: vertex.to_string(),
                });
            }
        }
        let mut state = Self::zeros(grid);
        state.vertex = vertex;
        let m = grid.points;
        for i in 0..grid.edges {
            let edge = &mut state.samples[i * m..(i + 1) * m];
            for (j, s) in edge.iter_mut().enumerate().take(m - 1) {
                *s = f(i, grid.position(j));
            }
        }
        state.check_finite()?;
        Ok(state)
    }

    /// Same profile on every edge.
    pub fn symmetric<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        Self::from_profile(grid, |_, x| f(x))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn vertex(&self) -> Complex64 {
        self.vertex
    }

    pub fn set_vertex(&mut self, value: Complex64) {
        self.vertex = value;
    }

    /// The `M` samples of edge `i`, `x = h, 2h, ..., L`.
    pub fn edge(&self, i: usize) -> &[Complex64] {
        let m = self.grid.points;
        &self.samples[i * m..(i + 1) * m]
    }

    /// Mutable view of the interior samples of edge `i` (the Dirichlet node is excluded).
    pub fn edge_interior_mut(&mut self, i: usize) -> &mut [Complex64] {
        let m = self.grid.points;
        &mut self.samples[i * m..(i + 1) * m - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[Complex64]> {
        self.samples.chunks(self.grid.points)
    }

    /// Per-edge sample vectors, including the zero at `x = L`.
    pub fn samples(&self) -> Vec<Vec<Complex64>> {
        self.edges().map(<[Complex64]>::to_vec).collect()
    }

    /// Moduli of edge `i` as a half-line profile starting at the vertex.
    pub fn edge_profile(&self, i: usize) -> EdgeProfile {
        let mut values = Vec::with_capacity(self.grid.points + 1);
        values.push(self.vertex.norm());
        values.extend(self.edge(i).iter().map(|z| z.norm()));
        EdgeProfile::new(self.grid.spacing, values)
    }

    pub fn same_grid(&self, other: &GraphState) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        let ok = self.vertex.re.is_finite()
            && self.vertex.im.is_finite()
            && self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("graph state contains NaN or infinity".into()))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vertex == ZERO && self.samples.iter().all(|z| *z == ZERO)
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(self.vertex.norm(), f64::max)
    }

    /// Applies `f` to every stored value (vertex and interior samples).
    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> GraphState {
        let mut out = self.clone();
        out.map_in_place(f);
        out
    }

    pub fn map_in_place<F: Fn(Complex64) -> Complex64>(&mut self, f: F) {
        let m = self.grid.points;
        self.vertex = f(self.vertex);
        for edge in self.samples.chunks_mut(m) {
            for z in &mut edge[..m - 1] {
                *z = f(*z);
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> GraphState {
        self.map(|z| z * c)
    }

    pub fn scaled_real(&self, c: f64) -> GraphState {
        self.map(|z| z * c)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &GraphState, b: Complex64) -> Result<GraphState> {
        self.same_grid(other)?;
        let mut out = self.clone();
        out.vertex = a * self.vertex + b * other.vertex;
        for (z, w) in out.samples.iter_mut().zip(&other.samples) {
            *z = a * *z + b * *w;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GraphState) -> Result<GraphState> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &GraphState) -> Result<GraphState> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }
}

/// A real profile on one half-line edge, sampled at `x_j = j h` for
/// `j = 0..len`, integrated with the trapezoidal rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeProfile {
    spacing: f64,
    values: Vec<f64>,
}

impl EdgeProfile {
    pub fn new(spacing: f64, values: Vec<f64>) -> Self {
        assert!(spacing > 0.0, "profile spacing must be positive");
        assert!(values.len() >= 2, "profile needs at least two samples");
        Self { spacing, values }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(spacing: f64, len: usize, f: F) -> Self {
        Self::new(spacing, (0..len).map(|j| f(j as f64 * spacing)).collect())
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.values.len() {
            self.spacing / 2.0
        } else {
            self.spacing
        }
    }

    /// Trapezoidal integral of `f(u_j)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &u)| self.weight(j) * f(u))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|u| u * u)
    }

    /// Forward-difference Dirichlet energy `sum |u_{j+1} - u_j|^2 / h`.
    pub fn gradient_energy(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / self.spacing
    }
}

/// Weighted sum `sum_k w_k f(u_k)`.
pub(crate) fn integrate<F: Fn(Complex64) -> f64>(u: &GraphState, f: F) -> f64 {
    let g = u.grid;
    let mut acc = g.vertex_weight() * f(u.vertex);
    let mut interior = 0.0;
    for edge in u.edges() {
        for &z in &edge[..g.points - 1] {
            interior += f(z);
        }
    }
    acc += g.spacing * interior;
    acc
}

/// Complex pairing `sum_k w_k u_k conj(v_k)`.
pub fn complex_pairing(u: &GraphState, v: &GraphState) -> Result<Complex64> {
    u.same_grid(v)?;
    let g = u.grid;
    let mut interior = ZERO;
    for (a, b) in u.edges().zip(v.edges()) {
        for (x, y) in a[..g.points - 1].iter().zip(&b[..g.points - 1]) {
            interior += x * y.conj();
        }
    }
    Ok(u.vertex * v.vertex.conj() * g.vertex_weight() + interior * g.spacing)
}

/// Real scalar product `Re int u conj(v)` with trapezoidal weights.
pub fn inner_product(u: &GraphState, v: &GraphState) -> Result<f64> {
    Ok(complex_pairing(u, v)?.re)
}

pub fn l2_norm(u: &GraphState) -> f64 {
    integrate(u, |z| z.norm_sqr()).sqrt()
}

/// Forward-difference gradient energy `sum_i sum_j |u_{i,j+1} - u_{i,j}|^2 / h`
/// with `u_{i,0}` the vertex and `u_{i,M} = 0`.
pub fn gradient_energy(u: &GraphState) -> f64 {
    let g = u.grid;
    let mut acc = 0.0;
    for edge in u.edges() {
        acc += edge_gradient_energy(u.vertex, edge);
    }
    acc / g.spacing
}

/// Gradient energy of a single edge, undivided by `h`.
pub(crate) fn edge_gradient_energy(vertex: Complex64, edge: &[Complex64]) -> f64 {
    let mut prev = vertex;
    let mut acc = 0.0;
    for &z in edge {
        acc += (z - prev).norm_sqr();
        prev = z;
    }
    acc
}

/// Polarized quadratic form `Re F_gamma[u, v]`.
pub fn form_bilinear(u: &GraphState, v: &GraphState, gamma: f64) -> Result<f64> {
    u.same_grid(v)?;
    let g = u.grid;
    let mut acc = 0.0;
    for (a, b) in u.edges().zip(v.edges()) {
        let (mut pa, mut pb) = (u.vertex, v.vertex);
        for (&x, &y) in a.iter().zip(b) {
            acc += ((x - pa) * (y - pb).conj()).re;
            pa = x;
            pb = y;
        }
    }
    Ok(acc / g.spacing - gamma * (u.vertex * v.vertex.conj()).re)
}

/// The self-adjoint realization of `-Laplacian` with a delta condition of
/// strength `gamma` at the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteOperator {
    grid: GridSpec,
    gamma: f64,
}

impl DiscreteOperator {
    pub fn new(grid: GridSpec, gamma: f64) -> Self {
        Self { grid, gamma }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(-Delta_gamma u)`: negated second differences in the interior and the
    /// form-consistent row at the vertex.
    pub fn apply(&self, u: &GraphState) -> Result<GraphState> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let g = self.grid;
        let h = g.spacing;
        let m = g.points;
        let inv_h2 = 1.0 / (h * h);
        let mut out = GraphState::zeros(g);
        let mut flux = ZERO;
        for (i, edge) in u.edges().enumerate() {
            flux += u.vertex - edge[0];
            let dst = &mut out.samples[i * m..(i + 1) * m];
            for j in 0..m - 1 {
                let left = if j == 0 { u.vertex } else { edge[j - 1] };
                let right = edge[j + 1];
                dst[j] = (edge[j] * 2.0 - left - right) * inv_h2;
            }
        }
        out.vertex = (flux / h - u.vertex * self.gamma) / g.vertex_weight();
        Ok(out)
    }

    /// Smallest eigenvalue and a normalized eigenvector.
    ///
    /// The eigenvalue is bracketed by inertia counting on the shifted system
    /// and polished with shifted inverse iteration until the Rayleigh
    /// quotient changes by less than `1e-10`.
    pub fn min_eigenpair(&self) -> Result<(f64, GraphState)> {
        let g = self.grid;
        let h = g.spacing;
        let n = g.edges as f64;
        let mut lo = -2.0 * self.gamma.abs() / (n * h) - 1.0;
        let mut hi = (2.0 + (2.0 * n).sqrt()) / (h * h) + 2.0 * self.gamma.abs() / (n * h) + 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * mid.abs().max(1.0) {
                break;
            }
        }
        let estimate = 0.5 * (lo + hi);
        let shift = estimate - 1e-7 * estimate.abs().max(1.0);
        let solver = StarSolver::new(g, self.gamma, Complex64::new(-shift, 0.0), Complex64::new(1.0, 0.0));

        let mut x = GraphState::symmetric(g, |t| Complex64::new((-t).exp() + 1e-3, 0.0))?;
        let mut rq = f64::INFINITY;
        for _ in 0..500 {
            let rhs = weighted(&x);
            let mut y = solver.solve(&rhs);
            let norm = l2_norm(&y);
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::NonFinite(
                    "inverse iteration produced a degenerate vector".into(),
                ));
            }
            y = y.scaled_real(1.0 / norm);
            let next = form_bilinear(&y, &y, self.gamma)?;
            x = y;
            let done = (next - rq).abs() < 1e-10;
            rq = next;
            if done {
                break;
            }
        }
        Ok((rq, x))
    }

    /// Number of generalized eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let g = self.grid;
        let h = g.spacing;
        let n = g.points - 1;
        let d = -sigma * h + 2.0 / h;
        let e = -1.0 / h;
        let mut negatives = 0usize;
        let mut pivot = d;
        if pivot < 0.0 {
            negatives += 1;
        }
        // Backward pivots give (T^-1)_{11} = 1 / pivot_1 for the Schur complement.
        let mut back = d;
        for _ in 1..n {
            pivot = d - e * e / pivot;
            if pivot < 0.0 {
                negatives += 1;
            }
            back = d - e * e / back;
        }
        let t11_inv = 1.0 / back;
        let vertex = -sigma * g.vertex_weight() + g.edges as f64 / h - self.gamma;
        let schur = vertex - g.edges as f64 * e * e * t11_inv;
        g.edges * negatives + usize::from(schur < 0.0)
    }
}

/// Multiplies by the quadrature weights (used to form right-hand sides).
pub(crate) fn weighted(u: &GraphState) -> GraphState {
    let g = u.grid;
    let mut out = u.scaled_real(g.spacing);
    out.vertex = u.vertex * g.vertex_weight();
    out
}

/// Direct solver for `(alpha W + beta W K) x = r`, where `W` holds the
/// quadrature weights and `W K` is the symmetric stiffness matrix of the
/// delta-vertex form.
///
/// Every edge contributes the same constant tridiagonal block, coupled to the
/// vertex through its first entry, so one Thomas factorization serves all
/// edges and the vertex is recovered from a scalar Schur complement.
#[derive(Debug, Clone)]
pub struct StarSolver {
    grid: GridSpec,
    coupling: Complex64,
    factors: Factors,
    first_column: Vec<Complex64>,
    schur: Complex64,
}

impl StarSolver {
    pub fn new(grid: GridSpec, gamma: f64, alpha: Complex64, beta: Complex64) -> Self {
        let h = grid.spacing;
        let n = grid.points - 1;
        let diag = alpha * h + beta * (2.0 / h);
        let off = -beta / h;
        let mut pivots: Vec<Complex64> = Vec::with_capacity(n);
        pivots.push(diag);
        for j in 1..n {
            let p = diag - off * off / pivots[j - 1];
            pivots.push(p);
        }
        let factors = Factors {
            off,
            inv_pivots: pivots.iter().map(|p| p.inv()).collect(),
            lower: (0..n)
                .map(|j| if j == 0 { ZERO } else { off / pivots[j - 1] })
                .collect(),
        };
        let mut e1 = vec![ZERO; n];
        e1[0] = Complex64::new(1.0, 0.0);
        factors.solve_in_place(&mut e1);
        let first_column = e1;
        let vertex_diag = alpha * grid.vertex_weight() + beta * (grid.edges as f64 / h - gamma);
        let coupling = beta / h;
        let schur = vertex_diag - coupling * coupling * first_column[0] * grid.edges as f64;
        Self {
            grid,
            coupling,
            factors,
            first_column,
            schur,
        }
    }

    /// Solves for `x`; `rhs` is taken as a raw vector (already weighted).
    pub fn solve(&self, rhs: &GraphState) -> GraphState {
        let g = self.grid;
        let m = g.points;
        let mut out = rhs.clone();
        let mut sum_first = ZERO;
        for i in 0..g.edges {
            let y = &mut out.samples[i * m..(i + 1) * m - 1];
            self.factors.solve_in_place(y);
            sum_first += y[0];
        }
        let v = (rhs.vertex + self.coupling * sum_first) / self.schur;
        out.vertex = v;
        let shift = self.coupling * v;
        for i in 0..g.edges {
            let dst = &mut out.samples[i * m..(i + 1) * m - 1];
            for (x, z) in dst.iter_mut().zip(&self.first_column) {
                *x += shift * z;
            }
        }
        out
    }
}

/// LU factors of the constant tridiagonal edge block.
#[derive(Debug, Clone)]
struct Factors {
    off: Complex64,
    inv_pivots: Vec<Complex64>,
    lower: Vec<Complex64>,
}

impl Factors {
    fn solve_in_place(&self, x: &mut [Complex64]) {
        let n = x.len();
        for j in 1..n {
            let prev = x[j - 1];
            x[j] -= self.lower[j] * prev;
        }
        x[n - 1] *= self.inv_pivots[n - 1];
        for j in (0..n - 1).rev() {
            let next = x[j + 1];
            x[j] = (x[j] - self.off * next) * self.inv_pivots[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_spacing() {
        assert!((build_grid(2, 20.0, 2000).unwrap().spacing() - 0.01).abs() < 1e-15);
        assert!((build_grid(3, 15.0, 1500).unwrap().spacing() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(build_grid(1, 10.0, 100).is_err());
        assert!(build_grid(2, 0.0, 100).is_err());
        assert!(build_grid(2, -1.0, 100).is_err());
        assert!(build_grid(2, 1.0, 1).is_err());
    }

    #[test]
    fn profile_continuity_enforced() {
        let g = build_grid(2, 5.0, 50).unwrap();
        let err = GraphState::from_profile(g, |i, _| c(i as f64 + 1.0)).unwrap_err();
        assert!(matches!(err, Error::VertexMismatch { edge: 1, .. }));
        let zero = GraphState::from_profile(g, |_, _| c(0.0)).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn gaussian_mass_is_sqrt_pi() {
        let g = build_grid(2, 20.0, 2000).unwrap();
        let u = GraphState::symmetric(g, |x| c((-x * x / 2.0).exp())).unwrap();
        assert!((inner_product(&u, &u).unwrap() - PI.sqrt()).abs() < 1e-6);
        let iu = u.scaled(Complex64::i());
        assert!(inner_product(&u, &iu).unwrap().abs() < 1e-15);
    }

    #[test]
    fn solver_inverts_operator() {
        let g = build_grid(3, 4.0, 40).unwrap();
        let gamma = 0.7;
        let alpha = Complex64::new(1.0, 0.0);
        let beta = Complex64::new(0.0, 0.003);
        let u = GraphState::from_profile(g, |i, x| {
            Complex64::new((-(x * (i + 1) as f64).powi(2)).exp(), x.sin() * (-x).exp())
        })
        .unwrap();
        let op = DiscreteOperator::new(g, gamma);
        let ku = op.apply(&u).unwrap();
        let rhs = weighted(&u).combine(alpha, &weighted(&ku), beta).unwrap();
        let x = StarSolver::new(g, gamma, alpha, beta).solve(&rhs);
        let err = l2_norm(&x.sub(&u).unwrap());
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn operator_matches_form() {
        let g = build_grid(4, 3.0, 30).unwrap();
        let op = DiscreteOperator::new(g, 1.3);
        let u = GraphState::from_profile(g, |i, x| Complex64::new((x * (i + 1) as f64).cos(), x)).unwrap();
        let v = GraphState::from_profile(g, |i, x| Complex64::new(x * x, (i as f64) * x - 0.5)).unwrap();
        let lhs = inner_product(&op.apply(&u).unwrap(), &v).unwrap();
        let rhs = form_bilinear(&u, &v, 1.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn counts_single_bound_state() {
        let g = build_grid(3, 40.0, 4000).unwrap();
        let op = DiscreteOperator::new(g, 1.5);
        assert_eq!(op.count_below(0.0), 1);
        assert_eq!(op.count_below(-0.3), 0);
        let (lambda, _) = op.min_eigenpair().unwrap();
        assert!((lambda + 0.25).abs() < 1e-3, "lambda = {lambda}");
    }

    #[test]
    fn no_bound_state_without_attraction() {
        let g = build_grid(3, 20.0, 2000).unwrap();
        for gamma in [0.0, -1.0] {
            let op = DiscreteOperator::new(g, gamma);
            assert_eq!(op.count_below(-1e-12), 0);
            let (lambda, _) = op.min_eigenpair().unwrap();
            assert!(lambda > -1e-10);
        }
    }

    #[test]
    fn edge_profile_trapezoid() {
        let p = EdgeProfile::from_fn(1e-3, 30_001, |x| (-x).exp());
        assert!((p.mass() - 0.5).abs() < 1e-6);
        assert!((p.gradient_energy() - 0.5).abs() < 1e-6);
    }
}

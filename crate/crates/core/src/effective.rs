//! Effective Hamiltonian `H̄(P)` through the coercive approximants `H_k`.
//!
//! Cycles route: `H̄_k(P)` is the least level `a` at which the tilted
//! truncated metric has no negative cycle, located by bisection.
//! PDE route: long-time growth rate of `w_t + H_k(x, P + Dw) = 0`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{coercive_hamiltonian_with, dot, hamiltonian_with, norm, sphere_directions};
use crate::metric::{
    bellman_ford_negative_cycle, tilted_distance_field, CycleCertificate, EdgeGeometry,
    EdgeWeighting,
};
use crate::stencil::DEFAULT_RADIUS;
use crate::torus_grid::{GridFunction, TorusGrid};
use crate::vector_field::{VectorFieldSpec, MAX_DIM};

pub const DEFAULT_STOP_TOL: f64 = 1e-2;
pub const DEFAULT_K_MAX: u32 = 32;

fn field_at_centers(spec: &VectorFieldSpec, grid: &TorusGrid) -> Vec<f64> {
    let d = grid.dim();
    let mut out = vec![0.0; grid.len() * d];
    let mut x = [0.0; MAX_DIM];
    for c in 0..grid.len() {
        grid.center_into(c, &mut x[..d]);
        spec.eval_into(&x[..d], &mut out[c * d..(c + 1) * d]);
    }
    out
}

fn check_p(spec: &VectorFieldSpec, p: &[f64]) -> Result<()> {
    if p.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: p.len(),
        });
    }
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("P must be finite".into()));
    }
    Ok(())
}

/// Grid extrema `(min_x H(x,P), max_x H(x,P))`.
pub fn effective_bounds(spec: &VectorFieldSpec, p: &[f64], grid: &TorusGrid) -> Result<(f64, f64)> {
    check_p(spec, p)?;
    let d = grid.dim();
    let v = field_at_centers(spec, grid);
    Ok(v.chunks(d).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), vc| {
        let h = hamiltonian_with(vc, p);
        (lo.min(h), hi.max(h))
    }))
}

fn truncated_bounds(v: &[f64], d: usize, k: f64, p: &[f64]) -> (f64, f64) {
    v.chunks(d).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), vc| {
        let h = coercive_hamiltonian_with(vc, k, p);
        (lo.min(h), hi.max(h))
    })
}

/// Result of one cycles-route bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclesEstimate {
    pub value: f64,
    /// Highest level seen with a negative cycle (or the bracket floor).
    pub below: f64,
    /// Lowest level seen without one.
    pub above: f64,
    pub iterations: usize,
    /// Certificate at `below`, when one was found.
    pub certificate: Option<CycleCertificate>,
}

/// `H̄_k(P)` by bisection on the negative-cycle verdict.
///
/// `tol` is the final bracket width; the midpoint is returned.
pub fn effective_k_cycles_with(
    geo: &EdgeGeometry,
    v_centers: &[f64],
    p: &[f64],
    k: u32,
    tol: f64,
) -> Result<CyclesEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("truncation k must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be > 0, got {tol}")));
    }
    let d = geo.grid.dim();
    let (lo_h, hi_h) = truncated_bounds(v_centers, d, k as f64, p);
    let mut lo = lo_h.max(0.0);
    let mut hi = hi_h.max(lo);
    let radius = geo.stencil.radius();
    let cycle_at = |a: f64| -> Result<Option<CycleCertificate>> {
        let w = EdgeWeighting::new(d, a)
            .with_tilt(p.to_vec())
            .with_truncation(Some(k))
            .with_radius(radius);
        Ok(bellman_ford_negative_cycle(&geo.weights(&w)?))
    };
    let mut iterations = 0;
    if cycle_at(hi)?.is_some() {
        iterations += 1;
        let inflated = hi + (hi - lo + 1.0);
        if cycle_at(inflated)?.is_some() {
            return Err(Error::Bracket { level: inflated });
        }
        lo = hi;
        hi = inflated;
    }
    let mut certificate = None;
    if hi - lo > tol {
        iterations += 1;
        match cycle_at(lo)? {
            None => hi = lo,
            Some(c) => certificate = Some(c),
        }
    }
    while hi - lo > tol {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        match cycle_at(mid)? {
            Some(c) => {
                lo = mid;
                certificate = Some(c);
            }
            None => hi = mid,
        }
    }
    Ok(CyclesEstimate {
        value: 0.5 * (lo + hi),
        below: lo,
        above: hi,
        iterations,
        certificate,
    })
}

pub fn default_bisection_tol(lower: f64, upper: f64) -> f64 {
    1e-3 * (upper - lower + 1.0)
}

/// `H̄_k(P)` on `grid` with stencil radius `radius`.
pub fn effective_k_cycles(
    spec: &VectorFieldSpec,
    p: &[f64],
    k: u32,
    grid: &TorusGrid,
    radius: usize,
    tol: f64,
) -> Result<f64> {
    check_p(spec, p)?;
    let geo = EdgeGeometry::new(spec, grid, radius)?;
    let v = field_at_centers(spec, grid);
    effective_k_cycles_with(&geo, &v, p, k, tol).map(|e| e.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeEstimate {
    pub value: f64,
    /// Max minus min of the per-cell rates.
    pub spread: f64,
    pub steps: usize,
    pub dt: f64,
}

pub const PDE_CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeScheme {
    /// `max(RT + upwind advection, −k) + max(RT − k, 0)` with the
    /// Rouy–Tourin form `RT` of `|p|`.
    #[default]
    Upwind,
    /// Local Lax–Friedrichs with per-axis `α_i = 1 + |V_i| + [|p| > k]`.
    LaxFriedrichs,
}

/// Rouy–Tourin `|p|` from backward (`lo`) and forward (`hi`) differences.
#[inline]
pub fn rouy_tourin(lo: &[f64], hi: &[f64]) -> f64 {
    lo.iter()
        .zip(hi)
        .map(|(&l, &u)| {
            let m = l.max(0.0).max(-u.min(0.0));
            m * m
        })
        .sum::<f64>()
        .sqrt()
}

/// Upwind `V·p`: backward difference where `V_i > 0`, forward otherwise.
#[inline]
pub fn upwind_advection(v: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    v.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&vi, (&l, &u))| if vi > 0.0 { vi * l } else { vi * u })
        .sum()
}

/// Monotone numerical `H_k`.
#[inline]
pub fn upwind_truncated(v: &[f64], k: f64, lo: &[f64], hi: &[f64]) -> f64 {
    let rt = rouy_tourin(lo, hi);
    (rt + upwind_advection(v, lo, hi)).max(-k) + (rt - k).max(0.0)
}

/// `H̄_k(P)` as the growth rate `−(w(T) − w(T/2))/(T/2)` of the cell
/// problem `w_t + H_k(x, P + Dw) = 0`, `w(·,0) = 0`.
pub fn effective_k_pde(
    spec: &VectorFieldSpec,
    p: &[f64],
    k: u32,
    grid: &TorusGrid,
    t_final: f64,
) -> Result<PdeEstimate> {
    effective_k_pde_with(spec, p, k, grid, t_final, PdeScheme::default())
}

pub fn effective_k_pde_with(
    spec: &VectorFieldSpec,
    p: &[f64],
    k: u32,
    grid: &TorusGrid,
    t_final: f64,
    scheme: PdeScheme,
) -> Result<PdeEstimate> {
    check_p(spec, p)?;
    if k == 0 {
        return Err(Error::InvalidArgument("truncation k must be >= 1".into()));
    }
    if !(t_final >= 10.0) {
        return Err(Error::InvalidArgument(format!("T must be >= 10, got {t_final}")));
    }
    let d = grid.dim();
    let n = grid.len();
    let kf = k as f64;
    let v = field_at_centers(spec, grid);
    let h: Vec<f64> = grid.spacings();
    let nbr: Vec<[usize; 2 * MAX_DIM]> = (0..n)
        .map(|c| {
            let mut out = [0usize; 2 * MAX_DIM];
            let mut o = vec![0i64; d];
            for a in 0..d {
                o[a] = 1;
                out[2 * a] = grid.shift(c, &o);
                o[a] = -1;
                out[2 * a + 1] = grid.shift(c, &o);
                o[a] = 0;
            }
            out
        })
        .collect();
    // |∂H_k/∂p_i| ≤ 1 + |V_i| + [truncation active]
    let mut alpha_max = vec![0.0f64; d];
    for vc in v.chunks(d) {
        for a in 0..d {
            alpha_max[a] = alpha_max[a].max(2.0 + vc[a].abs());
        }
    }
    let rate: f64 = (0..d).map(|a| alpha_max[a] / h[a]).sum();
    let dt_nominal = PDE_CFL / rate;
    let half_steps = (0.5 * t_final / dt_nominal).ceil() as usize;
    let dt = 0.5 * t_final / half_steps as f64;
    if dt * rate > 1.0 {
        return Err(Error::Cfl {
            dt,
            limit: 1.0 / rate,
        });
    }
    let mut w = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut half = Vec::new();
    for step in 0..2 * half_steps {
        if step == half_steps {
            half = w.clone();
        }
        let extra = match scheme {
            PdeScheme::Upwind => 0.0,
            PdeScheme::LaxFriedrichs => {
                // is |P + Dw| > k possible anywhere on the one-sided box?
                let pmax = (0..n)
                    .map(|c| {
                        let mut s = 0.0;
                        for a in 0..d {
                            let up = (w[nbr[c][2 * a]] - w[c]) / h[a];
                            let dn = (w[c] - w[nbr[c][2 * a + 1]]) / h[a];
                            let m = (p[a] + up).abs().max((p[a] + dn).abs());
                            s += m * m;
                        }
                        s.sqrt()
                    })
                    .fold(0.0, f64::max);
                if pmax > kf {
                    1.0
                } else {
                    0.0
                }
            }
        };
        next.par_iter_mut().enumerate().for_each(|(c, out)| {
            let vc = &v[c * d..(c + 1) * d];
            let mut lo = [0.0; MAX_DIM];
            let mut hi = [0.0; MAX_DIM];
            for a in 0..d {
                hi[a] = p[a] + (w[nbr[c][2 * a]] - w[c]) / h[a];
                lo[a] = p[a] + (w[c] - w[nbr[c][2 * a + 1]]) / h[a];
            }
            let flux = match scheme {
                PdeScheme::Upwind => upwind_truncated(vc, kf, &lo[..d], &hi[..d]),
                PdeScheme::LaxFriedrichs => {
                    let mut q = [0.0; MAX_DIM];
                    let mut diss = 0.0;
                    for a in 0..d {
                        q[a] = 0.5 * (lo[a] + hi[a]);
                        diss += 0.5 * (1.0 + vc[a].abs() + extra) * (hi[a] - lo[a]);
                    }
                    coercive_hamiltonian_with(vc, kf, &q[..d]) - diss
                }
            };
            *out = w[c] - dt * flux;
        });
        std::mem::swap(&mut w, &mut next);
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step });
        }
    }
    let rates: Vec<f64> = w
        .iter()
        .zip(&half)
        .map(|(a, b)| -(a - b) / (0.5 * t_final))
        .collect();
    let mean = rates.iter().sum::<f64>() / n as f64;
    let (lo, hi) = rates
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &r| (l.min(r), u.max(r)));
    Ok(PdeEstimate {
        value: mean,
        spread: hi - lo,
        steps: 2 * half_steps,
        dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Cycles,
    Pde,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Cycles => "cycles",
            Route::Pde => "pde",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub k: u32,
    pub value: f64,
    pub route: Route,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveOptions {
    pub resolution: usize,
    pub radius: usize,
    /// Stop once consecutive `H̄_k` differ by less than this.
    pub tol: f64,
    pub k_max: u32,
    /// Bracket width; defaults to `1e-3·(upper − lower + 1)`.
    pub bisection_tol: Option<f64>,
    /// Run the PDE route alongside every `k` with this final time.
    pub pde_audit: Option<f64>,
    pub pde_scheme: PdeScheme,
}

impl Default for EffectiveOptions {
    fn default() -> Self {
        Self {
            resolution: 64,
            radius: DEFAULT_RADIUS,
            tol: DEFAULT_STOP_TOL,
            k_max: DEFAULT_K_MAX,
            bisection_tol: None,
            pde_audit: None,
            pde_scheme: PdeScheme::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveResult {
    pub p: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub bisection_tol: f64,
    pub sequence: Vec<SequenceEntry>,
    pub limit: f64,
    pub stabilized: bool,
    /// Largest `|cycles − pde|` over audited `k`; zero without audit.
    pub wulff_margin: f64,
    /// Cycles-route detail for the last `k`.
    pub last: CyclesEstimate,
}

/// Reusable per-field state for repeated `H̄` evaluations.
pub struct EffectiveSolver {
    spec: VectorFieldSpec,
    grid: TorusGrid,
    geo: EdgeGeometry,
    v: Vec<f64>,
    pub options: EffectiveOptions,
}

impl EffectiveSolver {
    pub fn new(spec: &VectorFieldSpec, options: EffectiveOptions) -> Result<Self> {
        spec.validate()?;
        if !(options.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be > 0, got {}", options.tol)));
        }
        if options.k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be >= 1".into()));
        }
        let grid = TorusGrid::cube(spec.dim(), options.resolution)?;
        let geo = EdgeGeometry::new(spec, &grid, options.radius)?;
        let v = field_at_centers(spec, &grid);
        Ok(Self {
            spec: spec.clone(),
            grid,
            geo,
            v,
            options,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn geometry(&self) -> &EdgeGeometry {
        &self.geo
    }

    pub fn bounds(&self, p: &[f64]) -> (f64, f64) {
        let d = self.grid.dim();
        self.v.chunks(d).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), vc| {
            let h = hamiltonian_with(vc, p);
            (lo.min(h), hi.max(h))
        })
    }

    pub fn cycles(&self, p: &[f64], k: u32, tol: f64) -> Result<CyclesEstimate> {
        check_p(&self.spec, p)?;
        effective_k_cycles_with(&self.geo, &self.v, p, k, tol)
    }

    pub fn pde(&self, p: &[f64], k: u32, t_final: f64) -> Result<PdeEstimate> {
        effective_k_pde_with(&self.spec, p, k, &self.grid, t_final, self.options.pde_scheme)
    }

    /// The doubling schedule `k = 1, 2, 4, …` up to `k_max`.
    pub fn evaluate(&self, p: &[f64]) -> Result<EffectiveResult> {
        check_p(&self.spec, p)?;
        let (lower, upper) = self.bounds(p);
        let btol = self
            .options
            .bisection_tol
            .unwrap_or_else(|| default_bisection_tol(lower, upper));
        let mut sequence = Vec::new();
        let mut margin: f64 = 0.0;
        let mut previous: Option<f64> = None;
        let mut stabilized = false;
        let mut last;
        let mut k = 1u32;
        loop {
            let est = self.cycles(p, k, btol)?;
            if let Some(prev) = previous {
                if est.value > prev + 2.0 * btol {
                    return Err(Error::NonMonotone {
                        k,
                        value: est.value,
                        previous: prev,
                        tol: 2.0 * btol,
                    });
                }
            }
            sequence.push(SequenceEntry {
                k,
                value: est.value,
                route: Route::Cycles,
                iterations: est.iterations,
            });
            if let Some(t) = self.options.pde_audit {
                let pde = self.pde(p, k, t)?;
                margin = margin.max((pde.value - est.value).abs());
                sequence.push(SequenceEntry {
                    k,
                    value: pde.value,
                    route: Route::Pde,
                    iterations: pde.steps,
                });
            }
            let done = previous.is_some_and(|prev| (prev - est.value).abs() < self.options.tol);
            previous = Some(est.value);
            last = Some(est);
            if done {
                stabilized = true;
                break;
            }
            if k >= self.options.k_max {
                break;
            }
            k = (2 * k).min(self.options.k_max);
        }
        let last = last.expect("at least one k evaluated");
        Ok(EffectiveResult {
            p: p.to_vec(),
            lower,
            upper,
            bisection_tol: btol,
            sequence,
            limit: last.value,
            stabilized,
            wulff_margin: margin,
            last,
        })
    }
}

/// `H̄(P)` as the stabilized limit of the `H̄_k(P)` sequence.
pub fn effective_hamiltonian(
    spec: &VectorFieldSpec,
    p: &[f64],
    options: EffectiveOptions,
) -> Result<EffectiveResult> {
    EffectiveSolver::new(spec, options)?.evaluate(p)
}

/// `W = ⋂_j {v : v·P_j ≤ H̄(P_j)}` for unit directions `P_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WulffSet {
    pub dim: usize,
    pub directions: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl WulffSet {
    pub fn new(directions: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if directions.is_empty() || directions.len() != values.len() {
            return Err(Error::InvalidArgument("Wulff set needs one value per direction".into()));
        }
        let dim = directions[0].len();
        Ok(Self {
            dim,
            directions,
            values,
        })
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.directions
            .iter()
            .zip(&self.values)
            .all(|(p, &h)| dot(p, v) <= h + tol)
    }

    /// Distance from the origin to the boundary along unit `u`.
    pub fn radial(&self, u: &[f64]) -> f64 {
        self.directions
            .iter()
            .zip(&self.values)
            .filter_map(|(p, &h)| {
                let c = dot(p, u);
                (c > 0.0).then(|| (h / c).max(0.0))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Polygon vertices, counter-clockwise (planar sets only).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        if self.dim != 2 {
            return Vec::new();
        }
        let big = 1e6;
        let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
        for (p, &h) in self.directions.iter().zip(&self.values) {
            let inside = |x: &[f64; 2]| p[0] * x[0] + p[1] * x[1] <= h;
            let mut out = Vec::with_capacity(poly.len() + 1);
            for i in 0..poly.len() {
                let a = poly[i];
                let b = poly[(i + 1) % poly.len()];
                let (ia, ib) = (inside(&a), inside(&b));
                if ia {
                    out.push(a);
                }
                if ia != ib {
                    let fa = p[0] * a[0] + p[1] * a[1] - h;
                    let fb = p[0] * b[0] + p[1] * b[1] - h;
                    let t = fa / (fa - fb);
                    out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                }
            }
            poly = out;
            if poly.is_empty() {
                break;
            }
        }
        poly.into_iter().map(|v| v.to_vec()).collect()
    }

    /// Euclidean projection of `z` onto `W`: exact on the polygon in the
    /// plane, Dykstra's alternating projections otherwise.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        if self.contains(z, 0.0) {
            return z.to_vec();
        }
        if self.dim == 2 {
            let verts = self.vertices();
            if verts.len() >= 2 {
                let mut best = (f64::INFINITY, z.to_vec());
                for i in 0..verts.len() {
                    let a = &verts[i];
                    let b = &verts[(i + 1) % verts.len()];
                    let ab = [b[0] - a[0], b[1] - a[1]];
                    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
                    let t = if len2 > 0.0 {
                        (((z[0] - a[0]) * ab[0] + (z[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    let q = vec![a[0] + t * ab[0], a[1] + t * ab[1]];
                    let d = (q[0] - z[0]).powi(2) + (q[1] - z[1]).powi(2);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                return best.1;
            }
        }
        let m = self.directions.len();
        let mut x = z.to_vec();
        let mut incr = vec![vec![0.0; self.dim]; m];
        for _ in 0..500 {
            let mut moved: f64 = 0.0;
            for j in 0..m {
                let p = &self.directions[j];
                let y: Vec<f64> = x.iter().zip(&incr[j]).map(|(a, b)| a + b).collect();
                let pp = dot(p, p);
                let excess = dot(p, &y) - self.values[j];
                let proj: Vec<f64> = if excess > 0.0 {
                    y.iter().zip(p).map(|(a, b)| a - excess * b / pp).collect()
                } else {
                    y.clone()
                };
                for i in 0..self.dim {
                    incr[j][i] = y[i] - proj[i];
                    moved = moved.max((proj[i] - x[i]).abs());
                }
                x = proj;
            }
            if moved < 1e-12 {
                break;
            }
        }
        x
    }

    /// Vertices, 64 radial boundary points and a 16-per-axis interior lattice.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let mut pts = self.vertices();
        let boundary = match self.dim {
            2 => 64,
            _ => 256,
        };
        for u in sphere_directions(self.dim, boundary) {
            let r = self.radial(&u);
            if r.is_finite() {
                pts.push(u.iter().map(|c| c * r).collect());
            }
        }
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &pts {
            for a in 0..self.dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if pts.is_empty() {
            return pts;
        }
        let m = 16usize;
        let total = m.pow(self.dim as u32);
        for mut code in 0..total {
            let v: Vec<f64> = (0..self.dim)
                .map(|a| {
                    let i = code % m;
                    code /= m;
                    lo[a] + (hi[a] - lo[a]) * (i as f64 + 0.5) / m as f64
                })
                .collect();
            if self.contains(&v, 0.0) {
                pts.push(v);
            }
        }
        pts
    }
}

/// Equispaced unit directions (planar) or a Fibonacci sphere.
pub fn wulff_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count)
            .map(|j| {
                let t = TAU * j as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => sphere_directions(dim, count),
    }
}

pub fn wulff_set(
    spec: &VectorFieldSpec,
    direction_count: usize,
    options: EffectiveOptions,
) -> Result<WulffSet> {
    let need = if spec.dim() == 2 { 8 } else { 32 };
    if spec.dim() >= 2 && direction_count < need {
        return Err(Error::InvalidArgument(format!(
            "need at least {need} directions, got {direction_count}"
        )));
    }
    let solver = EffectiveSolver::new(spec, options)?;
    let directions = wulff_directions(spec.dim(), direction_count);
    let values = directions
        .iter()
        .map(|p| solver.evaluate(p).map(|r| r.limit))
        .collect::<Result<Vec<f64>>>()?;
    WulffSet::new(directions, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corrector {
    pub field: GridFunction,
    pub base_cell: usize,
    pub level: f64,
    /// `min` over in-edges of `v(c) + w(c, base) − v(base)`: the weight of the
    /// cheapest cycle through the base cell.
    pub residual: f64,
    pub spread: f64,
}

/// Tilted periodic distance from an approximate Aubry cell at `level`.
///
/// Candidates are the cells of `hint` plus every 8th cell per axis; the one
/// with the cheapest return cycle wins.
pub fn corrector_field(
    solver: &EffectiveSolver,
    p: &[f64],
    k: u32,
    level: f64,
    hint: Option<&CycleCertificate>,
) -> Result<Corrector> {
    check_p(&solver.spec, p)?;
    let grid = &solver.grid;
    let d = grid.dim();
    let w = EdgeWeighting::new(d, level.max(0.0))
        .with_tilt(p.to_vec())
        .with_truncation(Some(k))
        .with_radius(solver.geo.stencil.radius());
    let table = solver.geo.weights(&w)?;
    let mut candidates: Vec<usize> = hint.map(|c| c.cells.clone()).unwrap_or_default();
    candidates.extend(
        (0..grid.len()).filter(|&c| grid.multi_index_vec(c).iter().all(|i| i % 8 == 0)),
    );
    candidates.sort_unstable();
    candidates.dedup();
    let m = table.stencil.len();
    let opposite: Vec<usize> = (0..m).map(|j| table.stencil.opposite(j)).collect();
    let mut best: Option<(f64, usize, GridFunction)> = None;
    for &y in &candidates {
        let field = tilted_distance_field(&table, y)?;
        let vals = field.values();
        let residual = (0..m)
            .map(|j| {
                let c = table.neighbors[y * m + opposite[j]];
                vals[c] + table.weights[c * m + j] - vals[y]
            })
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().map_or(true, |(r, _, _)| residual < *r) {
            best = Some((residual, y, field));
        }
    }
    let (residual, base_cell, field) = best.expect("candidate set is nonempty");
    let spread = field.oscillation();
    Ok(Corrector {
        field,
        base_cell,
        level,
        residual,
        spread,
    })
}

/// Max `|P|` over a list, used to scale tolerances.
pub fn max_norm(ps: &[Vec<f64>]) -> f64 {
    ps.iter().map(|p| norm(p)).fold(0.0, f64::max)
}

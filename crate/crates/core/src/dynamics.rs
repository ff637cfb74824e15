//! Discrete reachability for `ẋ ∈ F(x)` on the torus.
//!
//! An edge `c → c+o` is present iff `o·h` lies in the cone of `F_δ` at the
//! center of `c`, with `δ = 1−η` (inner graph) or `δ = 1+η` (outer graph).
//! Forward-invariant cell sets are unions of strongly connected components
//! closed under outgoing edges, so the verdict is read off the SCC
//! condensation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{control_gauge, cone_contains, norm, project_onto_control_set};
use crate::stencil::Stencil;
use crate::torus_grid::{periodic_delta, TorusGrid};
use crate::vector_field::{field_constants, VectorFieldSpec, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inner,
    Outer,
}

impl Side {
    pub fn radius(self, eta: f64) -> f64 {
        match self {
            Side::Inner => 1.0 - eta,
            Side::Outer => 1.0 + eta,
        }
    }
}

/// What to do when `h·R > η/L_V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginPolicy {
    #[default]
    Report,
    Enforce,
}

#[derive(Debug, Clone)]
pub struct ReachabilityGraph {
    pub grid: TorusGrid,
    pub stencil: Stencil,
    pub eta: f64,
    pub side: Side,
    /// `cells × offsets`, row-major by cell.
    pub feasible: Vec<bool>,
    pub neighbors: Vec<usize>,
    pub margin_step: f64,
    pub margin_limit: f64,
    pub margin_certified: bool,
}

impl ReachabilityGraph {
    pub fn edge(&self, cell: usize, j: usize) -> bool {
        self.feasible[cell * self.stencil.len() + j]
    }

    pub fn edge_count(&self) -> usize {
        self.feasible.iter().filter(|&&b| b).count()
    }

    pub fn successors(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.stencil.len();
        (0..m).filter_map(move |j| self.feasible[cell * m + j].then(|| self.neighbors[cell * m + j]))
    }

    /// Cells whose feasible offset sets differ between `self` and `other`.
    pub fn differing_cells(&self, other: &ReachabilityGraph) -> usize {
        let m = self.stencil.len();
        (0..self.grid.len())
            .filter(|&c| self.feasible[c * m..(c + 1) * m] != other.feasible[c * m..(c + 1) * m])
            .count()
    }
}

pub fn build_reachability_graph(
    spec: &VectorFieldSpec,
    grid: &TorusGrid,
    radius: usize,
    eta: f64,
    side: Side,
    policy: MarginPolicy,
) -> Result<ReachabilityGraph> {
    spec.validate()?;
    if grid.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: grid.dim(),
        });
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0,1), got {eta}")));
    }
    let stencil = Stencil::new(grid.dim(), radius)?;
    let (lip, _) = field_constants(spec, grid);
    let margin_step = grid.max_spacing() * radius as f64;
    let margin_limit = if lip > 0.0 { eta / lip } else { f64::INFINITY };
    let margin_certified = margin_step <= margin_limit;
    if !margin_certified && policy == MarginPolicy::Enforce {
        return Err(Error::MarginViolated {
            step: margin_step,
            limit: margin_limit,
        });
    }
    let delta = side.radius(eta);
    let m = stencil.len();
    let d = grid.dim();
    let disp: Vec<Vec<f64>> = (0..m).map(|j| stencil.displacement(grid, j)).collect();
    let feasible: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut x = [0.0; MAX_DIM];
            let mut v = [0.0; MAX_DIM];
            grid.center_into(c, &mut x[..d]);
            spec.eval_into(&x[..d], &mut v[..d]);
            disp.iter()
                .map(|q| cone_contains(&v[..d], delta, q))
                .collect::<Vec<_>>()
        })
        .collect();
    let neighbors = stencil.neighbor_table(grid)?;
    Ok(ReachabilityGraph {
        grid: grid.clone(),
        stencil,
        eta,
        side,
        feasible,
        neighbors,
        margin_step,
        margin_limit,
        margin_certified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSetReport {
    pub component_count: usize,
    /// Cell lists, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    /// Component index per cell.
    pub labels: Vec<usize>,
    pub proper_invariant_found: bool,
    /// `|Θ|` per component.
    pub volumes: Vec<f64>,
    pub boundary_cells: Vec<Vec<usize>>,
    /// Components with no edge leaving them (forward-invariant).
    pub trapped: Vec<usize>,
}

impl InvariantSetReport {
    /// The trapped component containing `cell`, if any.
    pub fn trapped_containing(&self, cell: usize) -> Option<usize> {
        let c = self.labels[cell];
        self.trapped.contains(&c).then_some(c)
    }
}

/// Iterative Tarjan; returns a component label per node.
fn strongly_connected(n: usize, succ: impl Fn(usize, &mut Vec<usize>)) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut label = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut comps = 0usize;
    // frames: (node, successor list, cursor)
    let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut s = Vec::new();
        succ(root, &mut s);
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, s, 0));
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSET {
                    let mut s = Vec::new();
                    succ(w, &mut s);
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, s, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        label[w] = comps;
                        if w == v {
                            break;
                        }
                    }
                    comps += 1;
                }
                if let Some(parent) = frames.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    label
}

pub fn detect_invariant_sets(graph: &ReachabilityGraph) -> InvariantSetReport {
    let grid = &graph.grid;
    let n = grid.len();
    let raw = strongly_connected(n, |c, out| out.extend(graph.successors(c)));
    // relabel by first appearance for a deterministic order
    let mut remap = vec![usize::MAX; n];
    let mut labels = vec![0usize; n];
    let mut count = 0usize;
    for c in 0..n {
        if remap[raw[c]] == usize::MAX {
            remap[raw[c]] = count;
            count += 1;
        }
        labels[c] = remap[raw[c]];
    }
    let mut components = vec![Vec::new(); count];
    for c in 0..n {
        components[labels[c]].push(c);
    }
    let mut leaves = vec![false; count];
    for c in 0..n {
        if graph.successors(c).any(|t| labels[t] != labels[c]) {
            leaves[labels[c]] = true;
        }
    }
    let trapped = (0..count).filter(|&k| !leaves[k]).collect();
    let axis: Vec<Vec<i64>> = (0..grid.dim())
        .flat_map(|a| {
            [-1i64, 1].into_iter().map(move |s| {
                let mut o = vec![0i64; grid.dim()];
                o[a] = s;
                o
            })
        })
        .collect();
    let boundary_cells = components
        .iter()
        .enumerate()
        .map(|(k, cells)| {
            cells
                .iter()
                .copied()
                .filter(|&c| axis.iter().any(|o| labels[grid.shift(c, o)] != k))
                .collect()
        })
        .collect();
    let volumes = components
        .iter()
        .map(|c| c.len() as f64 * grid.cell_volume())
        .collect();
    InvariantSetReport {
        component_count: count,
        components,
        labels,
        proper_invariant_found: count >= 2,
        volumes,
        boundary_cells,
        trapped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Selector {
    /// Velocity `V + V/|V|`, the fastest point of `F` along the drift.
    Drift,
    /// Feasible velocity nearest to the straight-line velocity toward a target.
    Steered(Vec<f64>),
}

pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// Explicit Euler for `ẋ ∈ F(x)`; returns unwrapped positions `x(0), x(dt), …`.
pub fn integrate_trajectory(
    spec: &VectorFieldSpec,
    x0: &[f64],
    selector: &Selector,
    t_final: f64,
    dt: f64,
) -> Result<Vec<Vec<f64>>> {
    if !(dt > 0.0) || !(t_final >= dt) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and T >= dt (dt = {dt}, T = {t_final})"
        )));
    }
    if x0.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: x0.len(),
        });
    }
    let steps = (t_final / dt).round() as usize;
    let mut x = x0.to_vec();
    let mut path = Vec::with_capacity(steps + 1);
    path.push(x.clone());
    for s in 0..steps {
        let v = spec.eval(&x);
        let vel = match selector {
            Selector::Drift => {
                let nv = norm(&v);
                if nv == 0.0 {
                    vec![0.0; v.len()]
                } else {
                    v.iter().map(|c| c + c / nv).collect()
                }
            }
            Selector::Steered(target) => {
                let want: Vec<f64> = target
                    .iter()
                    .zip(&x)
                    .map(|(t, xi)| periodic_delta(t - xi) / dt)
                    .collect();
                project_onto_control_set(&v, 1.0, &want)
            }
        };
        let step: Vec<f64> = vel.iter().map(|c| c * dt).collect();
        if control_gauge(&v, 1.0, &step) > dt * (1.0 + MEMBERSHIP_TOL) {
            return Err(Error::StepRejected { t: s as f64 * dt });
        }
        for (xi, d) in x.iter_mut().zip(&step) {
            *xi += d;
        }
        path.push(x.clone());
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub cell: usize,
    pub normal: Vec<f64>,
    pub n_dot_v: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStats {
    pub component: usize,
    pub tol: f64,
    pub samples: Vec<BoundarySample>,
    /// Share of samples with `n·V ≤ −1 + tol`.
    pub normal_fraction: f64,
    /// Share of samples with `|V| ≥ 1 − tol`.
    pub speed_fraction: f64,
    pub median_n_dot_v: f64,
}

pub const DEFAULT_BOUNDARY_TOL: f64 = 0.25;

fn box_blur(grid: &TorusGrid, u: &[f64], reach: i64) -> Vec<f64> {
    let mut cur = u.to_vec();
    for a in 0..grid.dim() {
        let mut next = vec![0.0; cur.len()];
        let mut o = vec![0i64; grid.dim()];
        for (c, out) in next.iter_mut().enumerate() {
            let mut s = 0.0;
            for r in -reach..=reach {
                o[a] = r;
                s += cur[grid.shift(c, &o)];
            }
            *out = s / (2 * reach + 1) as f64;
        }
        cur = next;
    }
    cur
}

/// Distribution of `n·V` over the boundary cells of a trapped component.
///
/// With `component = None` the largest proper trapped component is used.
pub fn boundary_normal_check(
    report: &InvariantSetReport,
    graph: &ReachabilityGraph,
    spec: &VectorFieldSpec,
    component: Option<usize>,
    tol: f64,
) -> Result<BoundaryStats> {
    if !report.proper_invariant_found {
        return Err(Error::NoInvariantSet(
            "single component: the whole torus is the only invariant set".into(),
        ));
    }
    let grid = &graph.grid;
    let k = match component {
        Some(k) if k < report.component_count => k,
        Some(k) => {
            return Err(Error::InvalidArgument(format!("no component {k}")));
        }
        None => *report
            .trapped
            .iter()
            .filter(|&&k| report.components[k].len() < grid.len())
            .max_by_key(|&&k| (report.components[k].len(), usize::MAX - k))
            .ok_or_else(|| Error::NoInvariantSet("no trapped component".into()))?,
    };
    let indicator: Vec<f64> = report
        .labels
        .iter()
        .map(|&l| if l == k { 1.0 } else { 0.0 })
        .collect();
    // two passes of a 5-wide box blur
    let smooth = box_blur(grid, &box_blur(grid, &indicator, 2), 2);
    let d = grid.dim();
    let mut samples = Vec::new();
    for &c in &report.boundary_cells[k] {
        let mut grad = vec![0.0; d];
        let mut o = vec![0i64; d];
        for a in 0..d {
            o[a] = 1;
            let up = smooth[grid.shift(c, &o)];
            o[a] = -1;
            let dn = smooth[grid.shift(c, &o)];
            o[a] = 0;
            grad[a] = (up - dn) / (2.0 * grid.spacing(a));
        }
        let g = norm(&grad);
        if g == 0.0 {
            continue;
        }
        let normal: Vec<f64> = grad.iter().map(|c| -c / g).collect();
        let v = spec.eval(&grid.center(c));
        let n_dot_v = normal.iter().zip(&v).map(|(a, b)| a * b).sum();
        samples.push(BoundarySample {
            cell: c,
            normal,
            n_dot_v,
            speed: norm(&v),
        });
    }
    if samples.is_empty() {
        return Err(Error::NoInvariantSet("component has no boundary".into()));
    }
    let total = samples.len() as f64;
    let normal_fraction = samples.iter().filter(|s| s.n_dot_v <= -1.0 + tol).count() as f64 / total;
    let speed_fraction = samples.iter().filter(|s| s.speed >= 1.0 - tol).count() as f64 / total;
    let mut nv: Vec<f64> = samples.iter().map(|s| s.n_dot_v).collect();
    nv.sort_by(f64::total_cmp);
    Ok(BoundaryStats {
        component: k,
        tol,
        samples,
        normal_fraction,
        speed_fraction,
        median_n_dot_v: nv[nv.len() / 2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(spec: &VectorFieldSpec, n: usize, side: Side) -> ReachabilityGraph {
        let grid = TorusGrid::cube(2, n).unwrap();
        build_reachability_graph(spec, &grid, 2, 0.05, side, MarginPolicy::Report).unwrap()
    }

    #[test]
    fn zero_field_is_complete() {
        let g = graph(&VectorFieldSpec::zero(2), 16, Side::Inner);
        assert_eq!(g.edge_count(), 16 * 16 * 24);
        assert!(g.margin_certified);
        let r = detect_invariant_sets(&g);
        assert_eq!(r.component_count, 1);
        assert!(!r.proper_invariant_found);
    }

    #[test]
    fn strong_constant_drift_blocks_backward_offset() {
        let grid = TorusGrid::cube(2, 16).unwrap();
        let spec = VectorFieldSpec::constant(vec![2.0, 0.0]);
        for side in [Side::Inner, Side::Outer] {
            let g = build_reachability_graph(&spec, &grid, 2, 0.1, side, MarginPolicy::Report)
                .unwrap();
            let back = g.stencil.offsets().iter().position(|o| *o == vec![-1, 0]).unwrap();
            assert!((0..grid.len()).all(|c| !g.edge(c, back)));
        }
    }

    #[test]
    fn tarjan_small_cases() {
        // 0 -> 1 -> 2 -> 0, 2 -> 3, 3 isolated sink
        let adj = [vec![1], vec![2], vec![0, 3], vec![]];
        let l = strongly_connected(4, |c, out| out.extend(adj[c].iter().copied()));
        assert_eq!(l[0], l[1]);
        assert_eq!(l[1], l[2]);
        assert_ne!(l[2], l[3]);
    }

    #[test]
    fn margin_enforcement() {
        let grid = TorusGrid::cube(2, 16).unwrap();
        let spec = VectorFieldSpec::shear_sin(2.0);
        let err = build_reachability_graph(&spec, &grid, 2, 0.05, Side::Inner, MarginPolicy::Enforce);
        assert!(matches!(err, Err(Error::MarginViolated { .. })));
    }

    #[test]
    fn drift_on_constant_field() {
        let spec = VectorFieldSpec::constant(vec![2.0, 0.0]);
        let path = integrate_trajectory(&spec, &[0.1, 0.2], &Selector::Drift, 1.0, 0.01).unwrap();
        let end = path.last().unwrap();
        assert!((end[0] - 3.1).abs() < 1e-9 && (end[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn steered_cannot_go_upstream() {
        let spec = VectorFieldSpec::constant(vec![2.0, 0.0]);
        let path =
            integrate_trajectory(&spec, &[0.5, 0.5], &Selector::Steered(vec![0.3, 0.5]), 0.5, 0.01)
                .unwrap();
        // the best feasible velocity toward an upstream target is zero
        assert!((path.last().unwrap()[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn boundary_check_rejects_single_component() {
        let g = graph(&VectorFieldSpec::zero(2), 8, Side::Inner);
        let r = detect_invariant_sets(&g);
        let spec = VectorFieldSpec::zero(2);
        assert!(matches!(
            boundary_normal_check(&r, &g, &spec, None, 0.25),
            Err(Error::NoInvariantSet(_))
        ));
    }
}

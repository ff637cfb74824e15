//! Time-dependent problems: the oscillatory G-equation
//! `u_t + |Du| + Du·V(x/ε) = 0` and its Hopf–Lax homogenized limit.

use serde::{Deserialize, Serialize};

use crate::effective::{rouy_tourin, upwind_advection, WulffSet};
use crate::error::{Error, Result};
use crate::torus_grid::{GridFunction, TorusGrid};
use crate::vector_field::{field_constants, VectorFieldSpec, MAX_DIM};

pub const DEFAULT_CFL: f64 = 0.5;
pub const MIN_CELLS_PER_PERIOD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    /// Side `L` of the periodic box.
    pub side: f64,
    pub cfl: f64,
    pub t_final: f64,
    /// Cells per unit length.
    pub resolution: usize,
}

impl SolverConfig {
    pub fn new(epsilon: f64, t_final: f64, resolution: usize) -> Self {
        Self {
            epsilon,
            side: 1.0,
            cfl: DEFAULT_CFL,
            t_final,
            resolution,
        }
    }

    pub fn cells_per_axis(&self) -> usize {
        (self.side * self.resolution as f64).round() as usize
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0,1], got {}",
                self.epsilon
            )));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidArgument(format!("cfl must lie in (0,1), got {}", self.cfl)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("T must be >= 0, got {}", self.t_final)));
        }
        if !(self.side > 0.0) {
            return Err(Error::InvalidArgument(format!("side must be > 0, got {}", self.side)));
        }
        let cells = self.side * self.resolution as f64;
        if (cells - cells.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "side·resolution must be an integer, got {cells}"
            )));
        }
        let periods = self.side / self.epsilon;
        if (periods - periods.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "side/epsilon must be an integer for periodicity, got {periods}"
            )));
        }
        if self.epsilon * (self.resolution as f64) < MIN_CELLS_PER_PERIOD - 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "epsilon·resolution = {} < {MIN_CELLS_PER_PERIOD} cells per fast period",
                self.epsilon * self.resolution as f64
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Periodized distance to `center`, optionally capped.
    Cone { center: Vec<f64>, cap: Option<f64> },
    /// `amplitude·cos(2π m·x / L)`.
    Trig { amplitude: f64, wavevector: Vec<i32> },
    /// Minimum of cones, optionally capped.
    Plateau { centers: Vec<Vec<f64>>, cap: Option<f64> },
}

fn box_distance(x: &[f64], c: &[f64], side: f64) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| {
            let d = (a - b).rem_euclid(side);
            let d = d.min(side - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

impl InitialData {
    pub fn cone(center: Vec<f64>) -> Self {
        InitialData::Cone { center, cap: None }
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialData::Cone { center, .. } => center.len(),
            InitialData::Trig { wavevector, .. } => wavevector.len(),
            InitialData::Plateau { centers, .. } => centers.first().map_or(0, |c| c.len()),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = match self {
            InitialData::Plateau { centers, .. } => {
                !centers.is_empty() && centers.iter().all(|c| c.len() == dim)
            }
            other => other.dim() == dim,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "initial data does not match dimension {dim}"
            )))
        }
    }

    pub fn eval(&self, x: &[f64], side: f64) -> f64 {
        let capped = |v: f64, cap: &Option<f64>| cap.map_or(v, |c| v.min(c));
        match self {
            InitialData::Cone { center, cap } => capped(box_distance(x, center, side), cap),
            InitialData::Trig {
                amplitude,
                wavevector,
            } => {
                let ph: f64 = x
                    .iter()
                    .zip(wavevector)
                    .map(|(a, &m)| a * m as f64)
                    .sum::<f64>();
                amplitude * (std::f64::consts::TAU * ph / side).cos()
            }
            InitialData::Plateau { centers, cap } => capped(
                centers
                    .iter()
                    .map(|c| box_distance(x, c, side))
                    .fold(f64::INFINITY, f64::min),
                cap,
            ),
        }
    }
}

/// Explicit monotone scheme for the oscillatory problem on a fixed grid.
#[derive(Debug, Clone)]
pub struct OscillatoryScheme {
    pub grid: TorusGrid,
    pub side: f64,
    pub dt: f64,
    h: f64,
    v: Vec<f64>,
    nbr: Vec<[usize; 2 * MAX_DIM]>,
}

impl OscillatoryScheme {
    pub fn new(spec: &VectorFieldSpec, config: &SolverConfig) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        let d = spec.dim();
        let grid = TorusGrid::cube(d, config.cells_per_axis())?;
        let h = config.spacing();
        let (_, sup) = field_constants(spec, &TorusGrid::cube(d, 64)?);
        let dt = config.cfl * h / (d as f64 * (1.0 + sup));
        let mut v = vec![0.0; grid.len() * d];
        let mut x = [0.0; MAX_DIM];
        for c in 0..grid.len() {
            grid.center_into(c, &mut x[..d]);
            for xi in x[..d].iter_mut() {
                *xi *= config.side / config.epsilon;
            }
            spec.eval_into(&x[..d], &mut v[c * d..(c + 1) * d]);
        }
        let nbr = (0..grid.len())
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
        Ok(Self {
            grid,
            side: config.side,
            dt,
            h,
            v,
            nbr,
        })
    }

    /// Physical coordinates of a cell center.
    pub fn position(&self, c: usize) -> Vec<f64> {
        self.grid.center(c).into_iter().map(|x| x * self.side).collect()
    }

    pub fn sample(&self, u0: &InitialData) -> Vec<f64> {
        (0..self.grid.len()).map(|c| u0.eval(&self.position(c), self.side)).collect()
    }

    /// Updated value at `c` after one step of length `dt`.
    #[inline]
    pub fn update_cell(&self, u: &[f64], c: usize, dt: f64) -> f64 {
        let d = self.grid.dim();
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for a in 0..d {
            hi[a] = (u[self.nbr[c][2 * a]] - u[c]) / self.h;
            lo[a] = (u[c] - u[self.nbr[c][2 * a + 1]]) / self.h;
        }
        let vc = &self.v[c * d..(c + 1) * d];
        u[c] - dt * (rouy_tourin(&lo[..d], &hi[..d]) + upwind_advection(vc, &lo[..d], &hi[..d]))
    }

    pub fn step(&self, u: &[f64], out: &mut [f64], dt: f64) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.update_cell(u, c, dt);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: GridFunction,
}

/// Snapshots of the oscillatory solution at the requested `times`
/// (each in `[0, T]`); steps are shortened to land on them exactly.
pub fn solve_oscillatory(
    spec: &VectorFieldSpec,
    u0: &InitialData,
    config: &SolverConfig,
    times: &[f64],
) -> Result<Vec<Snapshot>> {
    let scheme = OscillatoryScheme::new(spec, config)?;
    u0.validate(spec.dim())?;
    let mut targets: Vec<f64> = times.to_vec();
    if targets.iter().any(|&t| !(t >= 0.0 && t <= config.t_final + 1e-12)) {
        return Err(Error::InvalidArgument("snapshot times must lie in [0, T]".into()));
    }
    targets.sort_by(f64::total_cmp);
    let mut u = scheme.sample(u0);
    let mut next = vec![0.0; u.len()];
    let mut t = 0.0;
    let mut step = 0usize;
    let mut out = Vec::with_capacity(targets.len());
    for &target in &targets {
        while t < target - 1e-14 {
            let dt = scheme.dt.min(target - t);
            scheme.step(&u, &mut next, dt);
            std::mem::swap(&mut u, &mut next);
            step += 1;
            if u.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { step });
            }
            t = if target - (t + dt) < 1e-14 { target } else { t + dt };
        }
        out.push(Snapshot {
            t: target,
            field: GridFunction::new(scheme.grid.clone(), u.clone())?,
        });
    }
    Ok(out)
}

/// Hopf–Lax value `min_{v ∈ W} u₀(x − t v)`.
///
/// Candidates are the Wulff samples plus, for cone and plateau data, the
/// projections onto `W` of `(x − c)/t` for every center `c` and each nearby
/// periodic copy, which are the exact minimizers for those data.
pub fn solve_homogenized(
    u0: &InitialData,
    wulff: &WulffSet,
    samples: &[Vec<f64>],
    x: &[f64],
    t: f64,
    side: f64,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty Wulff sample".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0.eval(x, side));
    }
    let d = x.len();
    let mut y = x.to_vec();
    let mut value_at = |v: &[f64]| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x[i] - t * v[i];
        }
        u0.eval(&y, side)
    };
    let mut best = samples.iter().map(|v| value_at(v)).fold(f64::INFINITY, f64::min);
    let centers: &[Vec<f64>] = match u0 {
        InitialData::Cone { center, .. } => std::slice::from_ref(center),
        InitialData::Plateau { centers, .. } => centers,
        InitialData::Trig { .. } => &[],
    };
    let copies = 3usize.pow(d as u32);
    for c in centers {
        for mut code in 0..copies {
            let z: Vec<f64> = (0..d)
                .map(|i| {
                    let shift = (code % 3) as f64 - 1.0;
                    code /= 3;
                    // nearest representative of c, then a neighboring copy
                    let rep = c[i] + side * ((x[i] - c[i]) / side).round();
                    (x[i] - rep - shift * side) / t
                })
                .collect();
            best = best.min(value_at(&wulff.project(&z)));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub epsilon: f64,
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogenizationTable {
    pub rows: Vec<ErrorRow>,
    /// `e(ε)`: max over both times, one per ε.
    pub errors: Vec<f64>,
    /// `e(ε_{i+1}) / e(ε_i)`.
    pub ratios: Vec<f64>,
    pub spacing: f64,
}

/// Lattice stride for error evaluation (every 8th cell per axis).
pub const EVAL_STRIDE: usize = 8;

/// `e(ε) = max |u_ε − u⁰|` over a coarse lattice at `T/2` and `T`.
///
/// `template` supplies `T`, resolution, side and cfl; its `epsilon` is
/// replaced by each entry of `eps_list`.
pub fn homogenization_experiment(
    spec: &VectorFieldSpec,
    u0: &InitialData,
    wulff: &WulffSet,
    eps_list: &[f64],
    template: &SolverConfig,
) -> Result<HomogenizationTable> {
    if eps_list.is_empty() || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps_list must be nonempty and decreasing".into()));
    }
    let samples = wulff.sample_points();
    let t_final = template.t_final;
    let side = template.side;
    let times = [0.5 * t_final, t_final];
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &eps in eps_list {
        let config = SolverConfig {
            epsilon: eps,
            ..template.clone()
        };
        let snaps = solve_oscillatory(spec, u0, &config, &times)?;
        let grid = snaps[0].field.grid().clone();
        let lattice: Vec<usize> = (0..grid.len())
            .filter(|&c| grid.multi_index_vec(c).iter().all(|i| i % EVAL_STRIDE == 0))
            .collect();
        let mut worst: f64 = 0.0;
        for snap in &snaps {
            let mut e: f64 = 0.0;
            for &c in &lattice {
                let x: Vec<f64> = grid.center(c).into_iter().map(|x| x * side).collect();
                let hom = solve_homogenized(u0, wulff, &samples, &x, snap.t, side)?;
                e = e.max((snap.field.get(c) - hom).abs());
            }
            rows.push(ErrorRow {
                epsilon: eps,
                t: snap.t,
                error: e,
            });
            worst = worst.max(e);
        }
        errors.push(worst);
    }
    let ratios = errors.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(HomogenizationTable {
        rows,
        errors,
        ratios,
        spacing: template.spacing(),
    })
}

/// Exact erosion `min_{|y − (x − tc)| ≤ t} u₀(y)` for a cone under constant
/// drift `c`: `max(dist(x − tc, x₀) − t, 0)`.
pub fn cone_erosion(center: &[f64], drift: &[f64], x: &[f64], t: f64, side: f64) -> f64 {
    let y: Vec<f64> = x.iter().zip(drift).map(|(a, c)| a - t * c).collect();
    (box_distance(&y, center, side) - t).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::wulff_directions;

    #[test]
    fn config_checks() {
        assert!(SolverConfig::new(0.25, 0.5, 32).validate().is_ok());
        assert!(SolverConfig::new(0.25, 0.5, 16).validate().is_err());
        assert!(SolverConfig::new(0.3, 0.5, 64).validate().is_err());
        assert!(SolverConfig::new(1.5, 0.5, 64).validate().is_err());
    }

    #[test]
    fn zero_field_erodes_cone() {
        let spec = VectorFieldSpec::zero(2);
        let u0 = InitialData::cone(vec![0.5, 0.5]);
        let config = SolverConfig::new(1.0, 0.25, 64);
        let snap = &solve_oscillatory(&spec, &u0, &config, &[0.25]).unwrap()[0];
        let h = 1.0 / 64.0;
        let grid = snap.field.grid();
        for c in 0..grid.len() {
            let x = grid.center(c);
            let exact = cone_erosion(&[0.5, 0.5], &[0.0, 0.0], &x, 0.25, 1.0);
            assert!((snap.field.get(c) - exact).abs() <= 3.0 * h, "{x:?}");
        }
    }

    #[test]
    fn homogenized_t0_is_initial_data() {
        let u0 = InitialData::cone(vec![0.2, 0.7]);
        let w = WulffSet::new(wulff_directions(2, 16), vec![1.0; 16]).unwrap();
        let s = w.sample_points();
        let x = [0.9, 0.1];
        assert_eq!(solve_homogenized(&u0, &w, &s, &x, 0.0, 1.0).unwrap(), u0.eval(&x, 1.0));
        assert!(solve_homogenized(&u0, &w, &[], &x, 0.1, 1.0).is_err());
        // inside the eroded plateau the value is exactly zero
        let near = [0.25, 0.7];
        assert_eq!(solve_homogenized(&u0, &w, &s, &near, 0.1, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn constants_bound_the_solution() {
        let spec = VectorFieldSpec::shear_sin(2.0);
        let u0 = InitialData::Trig {
            amplitude: 1.0,
            wavevector: vec![1, 2],
        };
        let config = SolverConfig::new(0.125, 0.3, 64);
        for s in solve_oscillatory(&spec, &u0, &config, &[0.1, 0.3]).unwrap() {
            assert!(s.field.max() <= 1.0 + 1e-9 && s.field.min() >= -1.0 - 1e-9);
        }
    }
}

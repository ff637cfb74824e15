//! Uniform cell-centered grids on the flat torus `[0,1)^N` and scalar fields
//! over them.
//!
//! Linear cell indices run with axis 0 fastest. Values may be `+inf`
//! (unreachable cells of a distance field); the min-plus utilities here never
//! produce NaN from such entries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible per-axis cell count.
pub const MIN_RESOLUTION: usize = 4;

/// Reduce a point to its representative in `[0,1)^N`.
pub fn wrap_point(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| wrap_scalar(v)).collect()
}

/// Reduce a coordinate modulo 1 into `[0,1)`.
#[inline]
pub fn wrap_scalar(v: f64) -> f64 {
    let w = v - v.floor();
    // v slightly below an integer can round up to exactly 1.0
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Shortest periodic representative of a coordinate difference, in `[-1/2, 1/2)`.
#[inline]
pub fn periodic_delta(d: f64) -> f64 {
    d - (d + 0.5).floor()
}

/// Euclidean distance on the unit flat torus.
pub fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| periodic_delta(a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    resolution: Vec<usize>,
}

impl TorusGrid {
    pub fn new(resolution: Vec<usize>) -> Result<Self> {
        if resolution.is_empty() {
            return Err(Error::InvalidArgument("grid dimension must be >= 1".into()));
        }
        if let Some(&n) = resolution.iter().find(|&&n| n < MIN_RESOLUTION) {
            return Err(Error::InvalidArgument(format!(
                "resolution {n} below minimum {MIN_RESOLUTION}"
            )));
        }
        Ok(Self { resolution })
    }

    /// `n` cells along each of `dim` axes.
    pub fn cube(dim: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        1.0 / self.resolution[axis] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.spacing(a)).collect()
    }

    /// Largest spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.resolution[..axis].iter().product()
    }

    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for (a, &n) in self.resolution.iter().enumerate() {
            out[a] = idx % n;
            idx /= n;
        }
    }

    pub fn multi_index_vec(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        self.multi_index(idx, &mut out);
        out
    }

    /// Linear index of a (possibly out-of-range) integer multi-index, wrapped.
    pub fn linear_index_wrapped(&self, mi: &[i64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (a, &n) in self.resolution.iter().enumerate() {
            let c = mi[a].rem_euclid(n as i64) as usize;
            idx += c * stride;
            stride *= n;
        }
        idx
    }

    pub fn linear_index(&self, mi: &[usize]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (a, &n) in self.resolution.iter().enumerate() {
            idx += (mi[a] % n) * stride;
            stride *= n;
        }
        idx
    }

    /// Cell reached from `idx` by an integer offset, with wrap-around.
    pub fn shift(&self, idx: usize, offset: &[i64]) -> usize {
        let mut out = 0usize;
        let mut stride = 1usize;
        let mut rest = idx;
        for (a, &n) in self.resolution.iter().enumerate() {
            let c = (rest % n) as i64;
            rest /= n;
            let w = (c + offset[a]).rem_euclid(n as i64) as usize;
            out += w * stride;
            stride *= n;
        }
        out
    }

    pub fn center_into(&self, idx: usize, out: &mut [f64]) {
        let mut rest = idx;
        for (a, &n) in self.resolution.iter().enumerate() {
            out[a] = ((rest % n) as f64 + 0.5) / n as f64;
            rest /= n;
        }
    }

    pub fn center(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.center_into(idx, &mut out);
        out
    }

    /// Cell containing the point (after wrapping).
    pub fn cell_of(&self, x: &[f64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (a, &n) in self.resolution.iter().enumerate() {
            let c = ((wrap_scalar(x[a]) * n as f64).floor() as usize).min(n - 1);
            idx += c * stride;
            stride *= n;
        }
        idx
    }

    /// All offsets in `{-1,0,1}^N`, including zero.
    pub fn unit_neighborhood(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let total = 3usize.pow(n as u32);
        (0..total)
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let d = (code % 3) as i64 - 1;
                        code /= 3;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    /// Start indices of the grid lines parallel to `axis`.
    fn line_starts(&self, axis: usize) -> Vec<usize> {
        let stride = self.stride(axis);
        let n = self.resolution[axis];
        (0..self.len())
            .filter(|&idx| (idx / stride) % n == 0)
            .collect()
    }
}

/// A scalar field on a [`TorusGrid`], values in `R ∪ {+inf}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("grid function contains NaN".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        let values = vec![c; grid.len()];
        Self { grid, values }
    }

    /// Sample a continuum function at cell centers.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.center_into(i, &mut x);
                f(&x)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max - min`; infinite if any entry is.
    pub fn oscillation(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `i0,..,i{N-1},value`; `+inf` is written as `inf`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let n = self.grid.dim();
        let mut header: Vec<String> = (0..n).map(|a| format!("i{a}")).collect();
        header.push("value".into());
        wtr.write_record(&header).map_err(csv_err)?;
        let mut mi = vec![0usize; n];
        for (idx, &v) in self.values.iter().enumerate() {
            self.grid.multi_index(idx, &mut mi);
            let mut row: Vec<String> = mi.iter().map(|c| c.to_string()).collect();
            row.push(format_value(v));
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(grid: TorusGrid, r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let n = grid.dim();
        let mut values = vec![f64::NAN; grid.len()];
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != n + 1 {
                return Err(Error::Parse(format!("expected {} columns", n + 1)));
            }
            let mi = (0..n)
                .map(|a| {
                    rec[a]
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            if mi.iter().zip(grid.resolution()).any(|(c, r)| c >= r) {
                return Err(Error::Parse("index out of range".into()));
            }
            values[grid.linear_index(&mi)] = parse_value(&rec[n])?;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("missing cells in CSV".into()));
        }
        Self::new(grid, values)
    }

    /// Flat little-endian binary: magic `GFN1`, `u32` dimension, `u32`
    /// resolutions, then `f64` values in linear order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"GFN1")?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        for &n in self.grid.resolution() {
            w.write_all(&(n as u32).to_le_bytes())?;
        }
        for &v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"GFN1" {
            return Err(Error::Parse("bad magic".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let dim = u32::from_le_bytes(word) as usize;
        let mut res = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut word)?;
            res.push(u32::from_le_bytes(word) as usize);
        }
        let grid = TorusGrid::new(res)?;
        let mut values = Vec::with_capacity(grid.len());
        let mut buf = [0u8; 8];
        for _ in 0..grid.len() {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        Self::new(grid, values)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Decimal with `inf`/`-inf` literals.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

pub fn parse_value(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{t:?}: {e}"))),
    }
}

/// Result of a quadratic inf-convolution with the optimal points attached.
#[derive(Debug, Clone)]
pub struct InfConvolution {
    pub value: GridFunction,
    /// Unwrapped optimal point `y_δ(x)` per cell, `N` coordinates each.
    optimal: Vec<f64>,
    pub delta: f64,
}

impl InfConvolution {
    pub fn optimal_point(&self, idx: usize) -> &[f64] {
        let n = self.value.grid().dim();
        &self.optimal[idx * n..(idx + 1) * n]
    }

    /// `max_x |x - y_δ(x)|² / δ`.
    pub fn max_gap_ratio(&self) -> f64 {
        let grid = self.value.grid();
        let mut x = vec![0.0; grid.dim()];
        (0..grid.len())
            .map(|i| {
                grid.center_into(i, &mut x);
                let y = self.optimal_point(i);
                x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / self.delta
            })
            .fold(0.0, f64::max)
    }
}

/// `u_δ(x) = min_y u(y) + |x-y|²/(2δ)` over grid points `y` and their periodic
/// representatives.
pub fn inf_convolution(u: &GridFunction, delta: f64) -> Result<GridFunction> {
    inf_convolution_with_argmin(u, delta).map(|r| r.value)
}

/// `u^δ(x) = max_y u(y) - |x-y|²/(2δ)`.
pub fn sup_convolution(u: &GridFunction, delta: f64) -> Result<GridFunction> {
    let neg = u.map(|v| -v);
    Ok(inf_convolution(&neg, delta)?.map(|v| -v))
}

/// Periods searched on each side of the base cell so that no farther
/// representative can win against `y = x`.
fn period_reach(osc: f64, delta: f64) -> usize {
    if osc <= 0.0 || delta * osc <= 0.125 {
        1
    } else {
        (8.0 * delta * osc).sqrt().ceil() as usize
    }
}

pub fn inf_convolution_with_argmin(u: &GridFunction, delta: f64) -> Result<InfConvolution> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    if !u.is_finite() {
        return Err(Error::InvalidArgument(
            "inf-convolution input must be finite".into(),
        ));
    }
    let grid = u.grid().clone();
    let dim = grid.dim();
    let reach = period_reach(u.oscillation(), delta);

    let mut values = u.values().to_vec();
    // unwrapped source multi-index per cell
    let mut src: Vec<i64> = Vec::with_capacity(grid.len() * dim);
    let mut mi = vec![0usize; dim];
    for i in 0..grid.len() {
        grid.multi_index(i, &mut mi);
        src.extend(mi.iter().map(|&c| c as i64));
    }

    let curvature = 1.0 / (2.0 * delta);
    for axis in 0..dim {
        let n = grid.resolution()[axis];
        let h = grid.spacing(axis);
        let stride = grid.stride(axis);
        let ext_len = (2 * reach + 1) * n;
        let ext_pos: Vec<f64> = (0..ext_len)
            .map(|j| (j as f64 - (reach * n) as f64 + 0.5) * h)
            .collect();
        let query: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let mut line = vec![0.0; ext_len];
        let mut out = vec![0.0; n];
        let mut arg = vec![0usize; n];
        let mut new_values = values.clone();
        let mut new_src = src.clone();
        for start in grid.line_starts(axis) {
            for j in 0..ext_len {
                line[j] = values[start + (j % n) * stride];
            }
            lower_envelope(&ext_pos, &line, &query, curvature, &mut out, &mut arg);
            for i in 0..n {
                let cell = start + i * stride;
                let j = arg[i];
                let from = start + (j % n) * stride;
                new_values[cell] = out[i];
                new_src[cell * dim..(cell + 1) * dim]
                    .copy_from_slice(&src[from * dim..(from + 1) * dim]);
                new_src[cell * dim + axis] = j as i64 - (reach * n) as i64;
            }
        }
        values = new_values;
        src = new_src;
    }

    let spacings = grid.spacings();
    let optimal = src
        .chunks(dim)
        .flat_map(|s| {
            s.iter()
                .zip(&spacings)
                .map(|(&c, &h)| (c as f64 + 0.5) * h)
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(InfConvolution {
        value: GridFunction::new(grid, values)?,
        optimal,
        delta,
    })
}

/// Lower envelope of parabolas `f_j + c (x - y_j)²` evaluated at sorted
/// queries; `y` must be strictly increasing.
fn lower_envelope(
    y: &[f64],
    f: &[f64],
    query: &[f64],
    c: f64,
    out: &mut [f64],
    arg: &mut [usize],
) {
    let m = y.len();
    let mut hull = vec![0usize; m];
    let mut bounds = vec![0.0f64; m + 1];
    let mut k = 0usize;
    hull[0] = 0;
    bounds[0] = f64::NEG_INFINITY;
    bounds[1] = f64::INFINITY;
    let key = |j: usize| f[j] + c * y[j] * y[j];
    for q in 1..m {
        let mut s = (key(q) - key(hull[k])) / (2.0 * c * (y[q] - y[hull[k]]));
        while s <= bounds[k] {
            k -= 1;
            s = (key(q) - key(hull[k])) / (2.0 * c * (y[q] - y[hull[k]]));
        }
        k += 1;
        hull[k] = q;
        bounds[k] = s;
        bounds[k + 1] = f64::INFINITY;
    }
    let mut k = 0usize;
    for (i, &x) in query.iter().enumerate() {
        while bounds[k + 1] < x {
            k += 1;
        }
        let j = hull[k];
        out[i] = f[j] + c * (x - y[j]).powi(2);
        arg[i] = j;
    }
}

/// Discrete lower weak semilimit: at each cell the minimum, over every member
/// of `sequence`, of the minimum over the `3^N` neighborhood.
pub fn discrete_lower_semilimit(sequence: &[GridFunction]) -> Result<GridFunction> {
    semilimit(sequence, f64::INFINITY, f64::min)
}

/// Dual of [`discrete_lower_semilimit`] with maxima.
pub fn discrete_upper_semilimit(sequence: &[GridFunction]) -> Result<GridFunction> {
    semilimit(sequence, f64::NEG_INFINITY, f64::max)
}

/// Semilimit over the tail of the sequence starting at `start`.
pub fn discrete_lower_semilimit_from(
    sequence: &[GridFunction],
    start: usize,
) -> Result<GridFunction> {
    discrete_lower_semilimit(sequence.get(start..).unwrap_or(&[]))
}

fn semilimit(
    sequence: &[GridFunction],
    init: f64,
    pick: fn(f64, f64) -> f64,
) -> Result<GridFunction> {
    let first = sequence
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty sequence".into()))?;
    let grid = first.grid().clone();
    if sequence.iter().any(|g| g.grid() != &grid) {
        return Err(Error::InvalidArgument(
            "sequence members must share one grid".into(),
        ));
    }
    let hood = grid.unit_neighborhood();
    let values = (0..grid.len())
        .map(|i| {
            let mut acc = init;
            for off in &hood {
                let j = grid.shift(i, off);
                for g in sequence {
                    acc = pick(acc, g.values[j]);
                }
            }
            acc
        })
        .collect();
    GridFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize) -> TorusGrid {
        TorusGrid::cube(1, n).unwrap()
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_point(&[0.3, 0.7]), vec![0.3, 0.7]);
        let w = wrap_point(&[1.3, -0.25]);
        assert!((w[0] - 0.3).abs() < 1e-15 && (w[1] - 0.75).abs() < 1e-15);
        assert_eq!(wrap_point(&[1.0, 2.0]), vec![0.0, 0.0]);
        assert_eq!(wrap_scalar(-1e-18), 0.0);
    }

    #[test]
    fn shift_wraps_exactly() {
        let g = TorusGrid::new(vec![5, 7]).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.shift(idx, &[5, 0]), idx);
            assert_eq!(g.shift(idx, &[0, -7]), idx);
            assert_eq!(g.shift(g.shift(idx, &[2, -3]), &[-2, 3]), idx);
        }
        for idx in 0..g.len() {
            let c = g.center(idx);
            assert!(c.iter().all(|&v| (0.0..1.0).contains(&v)));
            assert_eq!(g.cell_of(&c), idx);
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(TorusGrid::new(vec![3, 8]).is_err());
        assert!(TorusGrid::new(vec![]).is_err());
    }

    #[test]
    fn constant_is_its_own_envelope() {
        let u = GridFunction::constant(TorusGrid::cube(2, 8).unwrap(), 3.5);
        let ud = inf_convolution(&u, 0.05).unwrap();
        assert!(ud.values().iter().all(|&v| (v - 3.5).abs() < 1e-14));
    }

    #[test]
    fn huber_profile_of_cone() {
        let n = 1000;
        let g = grid1(n);
        let x0 = 0.5;
        let u = GridFunction::from_fn(g.clone(), |x| periodic_delta(x[0] - x0).abs());
        let delta = 0.01;
        let ud = inf_convolution(&u, delta).unwrap();
        let h = 1.0 / n as f64;
        for i in 0..n {
            let r = periodic_delta(g.center(i)[0] - x0).abs();
            let huber = if r >= delta {
                r - delta / 2.0
            } else {
                r * r / (2.0 * delta)
            };
            assert!((ud.get(i) - huber).abs() <= 2.0 * h, "cell {i}");
        }
    }

    #[test]
    fn rejects_bad_delta_and_infinite_input() {
        let g = grid1(8);
        let u = GridFunction::constant(g.clone(), 0.0);
        assert!(inf_convolution(&u, 0.0).is_err());
        assert!(inf_convolution(&u, -1.0).is_err());
        let mut vals = vec![0.0; 8];
        vals[2] = f64::INFINITY;
        let w = GridFunction::new(g, vals).unwrap();
        assert!(inf_convolution(&w, 0.1).is_err());
    }

    #[test]
    fn wide_search_when_oscillation_large() {
        // osc * delta > 1/8 forces more than one period of representatives
        let g = grid1(16);
        let u = GridFunction::from_fn(g.clone(), |x| 50.0 * (std::f64::consts::TAU * x[0]).sin());
        let delta = 0.5;
        let ud = inf_convolution(&u, delta).unwrap();
        // brute force over many periods
        for i in 0..16 {
            let xi = g.center(i)[0];
            let mut best = f64::INFINITY;
            for p in -6i64..=6 {
                for j in 0..16 {
                    let y = g.center(j)[0] + p as f64;
                    best = best.min(u.get(j) + (xi - y).powi(2) / (2.0 * delta));
                }
            }
            assert!((ud.get(i) - best).abs() < 1e-10);
        }
    }

    #[test]
    fn sup_convolution_dominates() {
        let g = TorusGrid::cube(2, 8).unwrap();
        let u = GridFunction::from_fn(g, |x| (x[0] * 7.0).sin() + x[1]);
        let us = sup_convolution(&u, 0.01).unwrap();
        for (a, b) in us.values().iter().zip(u.values()) {
            assert!(a >= b);
        }
    }

    #[test]
    fn semilimit_examples() {
        let g = grid1(8);
        let u = GridFunction::from_fn(g.clone(), |x| x[0]);
        let v = GridFunction::from_fn(g.clone(), |x| 1.0 - x[0]);
        let s = discrete_lower_semilimit(&[u.clone(), u.clone(), u.clone()]).unwrap();
        for i in 0..8 {
            let expected = [i + 7, i, i + 1]
                .iter()
                .map(|&j| u.get(j % 8))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(s.get(i), expected);
        }
        let alt = discrete_lower_semilimit(&[u.clone(), v.clone(), u.clone(), v.clone()]).unwrap();
        for i in 0..8 {
            let expected = [i + 7, i, i + 1]
                .iter()
                .map(|&j| u.get(j % 8).min(v.get(j % 8)))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(alt.get(i), expected);
        }
        let up = discrete_upper_semilimit(&[u.clone(), v]).unwrap();
        assert!(up.values().iter().zip(u.values()).all(|(a, b)| a >= b));
        assert!(discrete_lower_semilimit(&[]).is_err());
        assert!(discrete_lower_semilimit_from(&[u], 1).is_err());
    }

    #[test]
    fn semilimit_keeps_infinity_without_nan() {
        let g = grid1(6);
        let mut vals = vec![1.0; 6];
        vals[3] = f64::INFINITY;
        let u = GridFunction::new(g, vals).unwrap();
        let up = discrete_upper_semilimit(&[u.clone()]).unwrap();
        assert!(up.values().iter().all(|v| !v.is_nan()));
        assert_eq!(up.get(2), f64::INFINITY);
        let lo = discrete_lower_semilimit(&[u]).unwrap();
        assert_eq!(lo.get(3), 1.0);
    }

    #[test]
    fn csv_and_binary_round_trip_with_infinity() {
        let g = TorusGrid::new(vec![4, 5]).unwrap();
        let mut u = GridFunction::from_fn(g.clone(), |x| x[0] - 2.0 * x[1]);
        u.values[7] = f64::INFINITY;
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i0,i1,value\n"));
        assert!(text.contains(",inf\n"));
        let back = GridFunction::read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(back, u);
        let mut bin = Vec::new();
        u.write_binary(&mut bin).unwrap();
        assert_eq!(GridFunction::read_binary(bin.as_slice()).unwrap(), u);
    }

    #[test]
    fn high_dimension_tiny_grid() {
        let g = TorusGrid::cube(4, 4).unwrap();
        let u = GridFunction::from_fn(g, |x| x.iter().sum());
        let ud = inf_convolution(&u, 0.01).unwrap();
        assert!(ud.values().iter().zip(u.values()).all(|(a, b)| a <= b));
        let s = discrete_lower_semilimit(&[u]).unwrap();
        assert_eq!(s.grid().len(), 256);
    }
}

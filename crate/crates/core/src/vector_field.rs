//! Periodic Lipschitz drift fields `V`, their analytic derivatives, and the
//! executable check of the standing assumptions on `V`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus_grid::{wrap_scalar, TorusGrid};

/// Largest dimension supported by the field catalog and the kernels above it.
pub const MAX_DIM: usize = 3;

/// Inflation applied to grid maxima of `|DV|` and `|V|`.
pub const CONSTANT_INFLATION: f64 = 1.05;

/// One Fourier mode `c cos(2π m y) + s sin(2π m y)` of a shear profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileMode {
    pub mode: u32,
    pub cos: f64,
    pub sin: f64,
}

impl ProfileMode {
    pub fn sin(mode: u32) -> Self {
        Self { mode, cos: 0.0, sin: 1.0 }
    }

    pub fn cos(mode: u32) -> Self {
        Self { mode, cos: 1.0, sin: 0.0 }
    }
}

/// Term `c cos(2π k·x) + s sin(2π k·x)` added to one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub component: usize,
    pub wavevector: Vec<i32>,
    pub cos: f64,
    pub sin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorFieldSpec {
    Constant {
        value: Vec<f64>,
    },
    /// Flow along `axis` with strength `amplitude * profile(x[transverse])`.
    Shear {
        dim: usize,
        axis: usize,
        transverse: usize,
        amplitude: f64,
        profile: Vec<ProfileMode>,
    },
    /// `(A sin 2πx₁ cos 2πx₂, −A cos 2πx₁ sin 2πx₂)`, planar only.
    Cellular {
        amplitude: f64,
    },
    /// `V_i = −A sin(2π(x_i − c_i))`.
    Sink {
        amplitude: f64,
        center: Vec<f64>,
    },
    TrigPoly {
        dim: usize,
        terms: Vec<TrigTerm>,
    },
}

impl VectorFieldSpec {
    pub fn zero(dim: usize) -> Self {
        Self::Constant { value: vec![0.0; dim] }
    }

    pub fn constant(value: Vec<f64>) -> Self {
        Self::Constant { value }
    }

    /// Planar shear along `x₁` with profile `sin(2π x₂)`.
    pub fn shear_sin(amplitude: f64) -> Self {
        Self::Shear {
            dim: 2,
            axis: 0,
            transverse: 1,
            amplitude,
            profile: vec![ProfileMode::sin(1)],
        }
    }

    pub fn cellular(amplitude: f64) -> Self {
        Self::Cellular { amplitude }
    }

    pub fn sink(amplitude: f64, center: Vec<f64>) -> Self {
        Self::Sink { amplitude, center }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Constant { value } => value.len(),
            Self::Shear { dim, .. } | Self::TrigPoly { dim, .. } => *dim,
            Self::Cellular { .. } => 2,
            Self::Sink { center, .. } => center.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Shear { .. } => "shear",
            Self::Cellular { .. } => "cellular",
            Self::Sink { .. } => "sink",
            Self::TrigPoly { .. } => "trig_poly",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "field dimension {d} outside 1..={MAX_DIM}"
            )));
        }
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{what} must be finite")))
            }
        };
        match self {
            Self::Constant { value } => value.iter().try_for_each(|&v| finite(v, "value")),
            Self::Shear {
                dim,
                axis,
                transverse,
                amplitude,
                profile,
            } => {
                if axis >= dim || transverse >= dim || axis == transverse {
                    return Err(Error::InvalidArgument(format!(
                        "shear axis {axis} / transverse {transverse} invalid for dimension {dim}"
                    )));
                }
                finite(*amplitude, "amplitude")?;
                profile
                    .iter()
                    .try_for_each(|m| finite(m.cos + m.sin, "profile coefficient"))
            }
            Self::Cellular { amplitude } => finite(*amplitude, "amplitude"),
            Self::Sink { amplitude, center } => {
                finite(*amplitude, "amplitude")?;
                center.iter().try_for_each(|&c| finite(c, "center"))
            }
            Self::TrigPoly { dim, terms } => terms.iter().try_for_each(|t| {
                if t.component >= *dim || t.wavevector.len() != *dim {
                    return Err(Error::InvalidArgument(format!(
                        "trig term {t:?} inconsistent with dimension {dim}"
                    )));
                }
                finite(t.cos + t.sin, "trig coefficient")
            }),
        }
    }

    /// Write `V(x)` into `out`. `x` is first reduced to `[0,1)^N`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        let mut w = [0.0; MAX_DIM];
        for a in 0..d {
            w[a] = wrap_scalar(x[a]);
        }
        let w = &w[..d];
        out[..d].fill(0.0);
        match self {
            Self::Constant { value } => out[..d].copy_from_slice(value),
            Self::Shear {
                axis,
                transverse,
                amplitude,
                profile,
                ..
            } => {
                out[*axis] = amplitude * profile_value(profile, w[*transverse]);
            }
            Self::Cellular { amplitude } => {
                let (s1, c1) = (TAU * w[0]).sin_cos();
                let (s2, c2) = (TAU * w[1]).sin_cos();
                out[0] = amplitude * s1 * c2;
                out[1] = -amplitude * c1 * s2;
            }
            Self::Sink { amplitude, center } => {
                for a in 0..d {
                    out[a] = -amplitude * (TAU * (w[a] - center[a])).sin();
                }
            }
            Self::TrigPoly { terms, .. } => {
                for t in terms {
                    let phase = TAU * dot_i(&t.wavevector, w);
                    let (s, c) = phase.sin_cos();
                    out[t.component] += t.cos * c + t.sin * s;
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }

    /// Row-major Jacobian `J[i*N + j] = ∂V_i/∂x_j`.
    pub fn jacobian_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        out[..d * d].fill(0.0);
        match self {
            Self::Constant { .. } => {}
            Self::Shear {
                axis,
                transverse,
                amplitude,
                profile,
                ..
            } => {
                out[axis * d + transverse] = amplitude * profile_derivative(profile, x[*transverse]);
            }
            Self::Cellular { amplitude } => {
                let (s1, c1) = (TAU * x[0]).sin_cos();
                let (s2, c2) = (TAU * x[1]).sin_cos();
                let k = TAU * amplitude;
                out[0] = k * c1 * c2;
                out[1] = -k * s1 * s2;
                out[2] = k * s1 * s2;
                out[3] = -k * c1 * c2;
            }
            Self::Sink { amplitude, center } => {
                for a in 0..d {
                    out[a * d + a] = -TAU * amplitude * (TAU * (x[a] - center[a])).cos();
                }
            }
            Self::TrigPoly { terms, .. } => {
                for t in terms {
                    let phase = TAU * dot_i(&t.wavevector, x);
                    let (s, c) = phase.sin_cos();
                    let g = -t.cos * s + t.sin * c;
                    for j in 0..d {
                        out[t.component * d + j] += TAU * t.wavevector[j] as f64 * g;
                    }
                }
            }
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d * d];
        self.jacobian_into(x, &mut out);
        out
    }

    /// Analytic `div V(x)`.
    pub fn divergence(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut j = [0.0; MAX_DIM * MAX_DIM];
        self.jacobian_into(x, &mut j);
        (0..d).map(|a| j[a * d + a]).sum()
    }
}

fn dot_i(k: &[i32], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
}

fn profile_value(profile: &[ProfileMode], y: f64) -> f64 {
    profile
        .iter()
        .map(|m| {
            let (s, c) = (TAU * m.mode as f64 * y).sin_cos();
            m.cos * c + m.sin * s
        })
        .sum()
}

fn profile_derivative(profile: &[ProfileMode], y: f64) -> f64 {
    profile
        .iter()
        .map(|m| {
            let k = TAU * m.mode as f64;
            let (s, c) = (k * y).sin_cos();
            k * (-m.cos * s + m.sin * c)
        })
        .sum()
}

/// Largest singular value of a row-major `d×d` matrix, `d ≤ 3`.
pub fn operator_norm(m: &[f64], d: usize) -> f64 {
    match d {
        1 => m[0].abs(),
        2 => {
            let fro = m.iter().take(4).map(|v| v * v).sum::<f64>();
            let det = m[0] * m[3] - m[1] * m[2];
            let disc = (fro * fro - 4.0 * det * det).max(0.0);
            ((fro + disc.sqrt()) / 2.0).sqrt()
        }
        _ => {
            // power iteration on MᵀM
            let mut v = [1.0, 0.7, 0.3];
            let mut lambda = 0.0;
            for _ in 0..200 {
                let mut mv = [0.0; 3];
                for i in 0..d {
                    for j in 0..d {
                        mv[i] += m[i * d + j] * v[j];
                    }
                }
                let mut w = [0.0; 3];
                for j in 0..d {
                    for i in 0..d {
                        w[j] += m[i * d + j] * mv[i];
                    }
                }
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return 0.0;
                }
                lambda = norm;
                for j in 0..d {
                    v[j] = w[j] / norm;
                }
            }
            lambda.sqrt()
        }
    }
}

/// `‖div V‖_{L^N(T^N)}` by the midpoint rule on `grid`.
pub fn divergence_norm(spec: &VectorFieldSpec, grid: &TorusGrid) -> f64 {
    let n = grid.dim() as i32;
    let mut x = vec![0.0; grid.dim()];
    let sum: f64 = (0..grid.len())
        .map(|i| {
            grid.center_into(i, &mut x);
            spec.divergence(&x).abs().powi(n)
        })
        .sum();
    (sum * grid.cell_volume()).powf(1.0 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub divergence_norm: f64,
    pub chi: f64,
    /// `1/χ`.
    pub threshold: f64,
    pub lipschitz_bound: f64,
    pub sup_norm: f64,
    pub passes_a2: bool,
    pub coercive_everywhere: bool,
}

/// Grid estimates of `L_V` and `M_V`, inflated by [`CONSTANT_INFLATION`].
pub fn field_constants(spec: &VectorFieldSpec, grid: &TorusGrid) -> (f64, f64) {
    let d = spec.dim();
    let mut x = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut j = vec![0.0; d * d];
    let mut lip: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for i in 0..grid.len() {
        grid.center_into(i, &mut x);
        spec.eval_into(&x, &mut v);
        spec.jacobian_into(&x, &mut j);
        sup = sup.max(v.iter().map(|c| c * c).sum::<f64>().sqrt());
        lip = lip.max(operator_norm(&j, d));
    }
    (lip * CONSTANT_INFLATION, sup * CONSTANT_INFLATION)
}

pub fn check_assumptions(
    spec: &VectorFieldSpec,
    chi: f64,
    grid: &TorusGrid,
) -> Result<AssumptionReport> {
    spec.validate()?;
    if !(chi > 0.0) || !chi.is_finite() {
        return Err(Error::InvalidArgument(format!("chi must be > 0, got {chi}")));
    }
    if grid.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: grid.dim(),
        });
    }
    let divergence_norm = divergence_norm(spec, grid);
    let threshold = 1.0 / chi;
    let (lipschitz_bound, sup_norm) = field_constants(spec, grid);
    Ok(AssumptionReport {
        divergence_norm,
        chi,
        threshold,
        lipschitz_bound,
        sup_norm,
        passes_a2: divergence_norm <= threshold,
        coercive_everywhere: sup_norm < 1.0,
    })
}

/// Largest observed `|V(x)-V(y)| / |x-y|` over the given pairs.
pub fn lipschitz_ratio(spec: &VectorFieldSpec, pairs: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    pairs
        .iter()
        .filter_map(|(x, y)| {
            let dx = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if dx == 0.0 {
                return None;
            }
            let vx = spec.eval(x);
            let vy = spec.eval(y);
            let dv = vx.iter().zip(&vy).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            Some(dv / dx)
        })
        .fold(0.0, f64::max)
}

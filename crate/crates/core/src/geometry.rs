//! Convex-geometry kernel for `H(x,p) = |p| + p·V(x)`.
//!
//! The sublevel `Z(x) = {p : H(x,p) ≤ 1}` is the polar of the control set
//! `F(x) = conv(B(V(x),1) ∪ {0})`, so its support function `σ(x,·)` is the
//! gauge of `F(x)`: the least `s ≥ 0` with `|q − sV| ≤ s`. Squaring gives
//! `(1−|V|²)s² + 2s(q·V) − |q|² ≥ 0`, and by Vieta the smallest admissible
//! root is `|q|² / (q·V + √D)` with `D = (q·V)² + (1−|V|²)|q|²`, whenever
//! `D ≥ 0` and the denominator is positive; otherwise `σ = +∞`.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector_field::{VectorFieldSpec, MAX_DIM};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `F_δ(x) = conv(B(V(x), δ) ∪ {0})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSetQuery {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl ControlSetQuery {
    pub fn at(spec: &VectorFieldSpec, x: &[f64], radius: f64) -> Self {
        Self {
            center: spec.eval(x),
            radius,
        }
    }

    pub fn gauge(&self, q: &[f64]) -> f64 {
        control_gauge(&self.center, self.radius, q)
    }

    /// Extreme points `V + δe` for `count` equispaced unit `e` (planar) plus
    /// the origin.
    pub fn sample_extreme_points(&self, count: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.center.len()]];
        for e in sphere_directions(self.center.len(), count) {
            out.push(
                self.center
                    .iter()
                    .zip(&e)
                    .map(|(c, d)| c + self.radius * d)
                    .collect(),
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportValue {
    /// `σ(x,q) ∈ [0, +∞]`.
    pub value: f64,
    /// Unit normal `e` of `F(x)` at `q/σ`; the maximizer of `p·q` over
    /// `Z(x)` is `e / (1 + e·V)`.
    pub attaining_direction: Option<Vec<f64>>,
}

pub fn hamiltonian(spec: &VectorFieldSpec, x: &[f64], p: &[f64]) -> f64 {
    let mut v = [0.0; MAX_DIM];
    spec.eval_into(x, &mut v);
    hamiltonian_with(&v[..p.len()], p)
}

#[inline]
pub fn hamiltonian_with(v: &[f64], p: &[f64]) -> f64 {
    norm(p) + dot(p, v)
}

/// `H_k(x,p) = max{H(x,p), −k} + max{|p| − k, 0}`.
pub fn coercive_hamiltonian(spec: &VectorFieldSpec, k: u32, x: &[f64], p: &[f64]) -> Result<f64> {
    check_k(k)?;
    let mut v = [0.0; MAX_DIM];
    spec.eval_into(x, &mut v);
    Ok(coercive_hamiltonian_with(&v[..p.len()], k as f64, p))
}

#[inline]
pub fn coercive_hamiltonian_with(v: &[f64], k: f64, p: &[f64]) -> f64 {
    let np = norm(p);
    (np + dot(p, v)).max(-k) + (np - k).max(0.0)
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("truncation k must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Least `s ≥ 0` with `|q − s v| ≤ s δ`: the gauge of `F_δ` at `q`.
#[inline]
pub fn control_gauge(v: &[f64], delta: f64, q: &[f64]) -> f64 {
    let qq = dot(q, q);
    if qq == 0.0 {
        return 0.0;
    }
    let b = dot(q, v);
    let alpha = delta * delta - dot(v, v);
    let disc = b * b + alpha * qq;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let denom = b + disc.sqrt();
    if denom > 0.0 {
        qq / denom
    } else {
        // |V| ≥ δ and q outside the cone of F_δ, including the linear
        // case |V| = δ with q·V ≤ 0
        f64::INFINITY
    }
}

/// `σ(x,q)` given `v = V(x)`.
#[inline]
pub fn sigma_with(v: &[f64], q: &[f64]) -> f64 {
    control_gauge(v, 1.0, q)
}

pub fn support_sigma(spec: &VectorFieldSpec, x: &[f64], q: &[f64]) -> SupportValue {
    let v = spec.eval(x);
    let value = sigma_with(&v, q);
    let attaining_direction = if value > 0.0 && value.is_finite() {
        let e: Vec<f64> = q.iter().zip(&v).map(|(qi, vi)| qi / value - vi).collect();
        let n = norm(&e);
        Some(e.iter().map(|c| c / n).collect())
    } else {
        None
    };
    SupportValue {
        value,
        attaining_direction,
    }
}

/// True iff `q ∈ (1+tol) F_δ(x)`.
pub fn gauge_membership(query: &ControlSetQuery, q: &[f64], tol: f64) -> bool {
    query.gauge(q) <= 1.0 + tol
}

/// True iff the direction of `q` lies in the cone generated by `F_δ`.
#[inline]
pub fn cone_contains(v: &[f64], delta: f64, q: &[f64]) -> bool {
    control_gauge(v, delta, q).is_finite()
}

/// `p ∈ Z^∞(x) = {H(x,p) ≤ 0}`.
pub fn recession_cone_contains(spec: &VectorFieldSpec, x: &[f64], p: &[f64]) -> bool {
    hamiltonian(spec, x, p) <= 0.0
}

/// Euclidean projection of `w` onto `F_δ = ⋃_{λ∈[0,1]} B(λv, λδ)`.
pub fn project_onto_control_set(v: &[f64], delta: f64, w: &[f64]) -> Vec<f64> {
    if control_gauge(v, delta, w) <= 1.0 {
        return w.to_vec();
    }
    // distance to B(λv, λδ) is |w − λv| − λδ, convex in λ
    let dist = |l: f64| {
        let d: f64 = w
            .iter()
            .zip(v)
            .map(|(a, b)| (a - l * b).powi(2))
            .sum::<f64>()
            .sqrt();
        d - l * delta
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if dist(a) <= dist(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let l = 0.5 * (lo + hi);
    let c: Vec<f64> = v.iter().map(|b| l * b).collect();
    let r: Vec<f64> = w.iter().zip(&c).map(|(a, b)| a - b).collect();
    let nr = norm(&r);
    if nr <= l * delta || nr == 0.0 {
        return w.to_vec();
    }
    c.iter()
        .zip(&r)
        .map(|(ci, ri)| ci + l * delta * ri / nr)
        .collect()
}

/// Largest `r ≥ 0` with `H_k(x, r u) ≤ a` for unit `u`, `a ≥ 0`.
///
/// Uses `{H_k ≤ a} = {H ≤ a} ∩ {H + |p| ≤ a + k} ∩ {|p| ≤ a + 2k}`.
#[inline]
pub fn ray_radius(v: &[f64], k: f64, a: f64, u: &[f64]) -> f64 {
    let h = 1.0 + dot(u, v);
    let mut r = a + 2.0 * k;
    if h > 0.0 {
        r = r.min(a / h);
    }
    if h + 1.0 > 0.0 {
        r = r.min((a + k) / (h + 1.0));
    }
    r
}

const PLANAR_DIRECTIONS: usize = 256;
const SPATIAL_DIRECTIONS: usize = 1024;

fn direction_table(dim: usize) -> &'static [Vec<f64>] {
    static T1: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    static T2: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    static T3: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    match dim {
        1 => T1.get_or_init(|| sphere_directions(1, 2)),
        2 => T2.get_or_init(|| sphere_directions(2, PLANAR_DIRECTIONS)),
        _ => T3.get_or_init(|| sphere_directions(3, SPATIAL_DIRECTIONS)),
    }
}

/// Equispaced circle directions (planar), a Fibonacci sphere (spatial), or
/// `±1` on the line.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|j| {
                let t = TAU * j as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * j as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
    }
}

fn golden_max(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iters {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Maximizer direction of `p·q` over `{|p| + p·w ≤ 1}`, if bounded.
fn piece_direction(w: &[f64], q: &[f64], out: &mut [f64]) -> bool {
    let s = control_gauge(w, 1.0, q);
    if !(s > 0.0 && s.is_finite()) {
        return false;
    }
    for i in 0..q.len() {
        out[i] = q[i] / s - w[i];
    }
    norm(out) > 0.0
}

/// Unit `u` maximizing `u·q` subject to `u·v = c`, if the constraint is
/// satisfiable.
fn kink_direction(v: &[f64], c: f64, q: &[f64], out: &mut [f64]) -> bool {
    let nv = norm(v);
    if nv == 0.0 {
        return false;
    }
    let m = c / nv;
    if !(m.abs() <= 1.0) {
        return false;
    }
    let qv = dot(q, v) / nv;
    let mut perp = [0.0; MAX_DIM];
    for i in 0..q.len() {
        perp[i] = q[i] - qv * v[i] / nv;
    }
    let np = norm(&perp[..q.len()]);
    let t = (1.0 - m * m).max(0.0).sqrt();
    for i in 0..q.len() {
        let w = if np > 0.0 { perp[i] / np } else { 0.0 };
        out[i] = m * v[i] / nv + t * w;
    }
    true
}

/// Support function of the compact set `{p : H_k(x,p) ≤ a}` at `q`, given
/// `v = V(x)`. Requires `a ≥ 0`, `k > 0`.
///
/// The set is the intersection of `{H ≤ a}`, `{H + |p| ≤ a+k}` and the ball
/// of radius `a+2k`. The support is attained either at the maximizer of a
/// single piece or where two boundaries meet, which happens along
/// `u·V = const` for the ray direction `u`. Every candidate direction is
/// scored by `r*(u)·(u·q)`, which is feasible by construction.
pub fn sigma_truncated_with(v: &[f64], k: f64, a: f64, q: &[f64]) -> f64 {
    let dim = q.len();
    if dot(q, q) == 0.0 {
        return 0.0;
    }
    let mut best = f64::NEG_INFINITY;
    let mut u = [0.0; MAX_DIM];
    let mut score = |u: &mut [f64]| {
        let n = norm(u);
        if n > 0.0 {
            u.iter_mut().for_each(|c| *c /= n);
            best = best.max(ray_radius(v, k, a, u) * dot(u, q));
        }
    };
    u[..dim].copy_from_slice(q);
    score(&mut u[..dim]);
    if piece_direction(v, q, &mut u[..dim]) {
        score(&mut u[..dim]);
    }
    let mut half = [0.0; MAX_DIM];
    for i in 0..dim {
        half[i] = 0.5 * v[i];
    }
    if piece_direction(&half[..dim], q, &mut u[..dim]) {
        score(&mut u[..dim]);
    }
    // u·V = h − 1 on each pairwise kink
    let ball = a + 2.0 * k;
    let mut kinks = Vec::with_capacity(3);
    if k > 0.0 {
        kinks.push(a / k - 1.0);
    }
    if ball > 0.0 {
        kinks.push(a / ball - 1.0);
        kinks.push((a + k) / ball - 2.0);
    }
    for c in kinks {
        if kink_direction(v, c, q, &mut u[..dim]) {
            score(&mut u[..dim]);
        }
    }
    best.max(0.0)
}

/// Direction-sampling evaluation of [`sigma_truncated_with`]: 256 planar
/// directions or a 1024-point Fibonacci sphere, then golden-section
/// refinement around the best sample.
pub fn sigma_truncated_sampled(v: &[f64], k: f64, a: f64, q: &[f64]) -> f64 {
    let dim = q.len();
    if dot(q, q) == 0.0 {
        return 0.0;
    }
    let table = direction_table(dim);
    let objective = |u: &[f64]| ray_radius(v, k, a, u) * dot(u, q);
    let (mut best_j, mut best) = (0usize, f64::NEG_INFINITY);
    for (j, u) in table.iter().enumerate() {
        let val = objective(u);
        if val > best {
            best = val;
            best_j = j;
        }
    }
    match dim {
        1 => best,
        2 => {
            let step = TAU / table.len() as f64;
            let t0 = step * best_j as f64;
            let (_, refined) = golden_max(t0 - step, t0 + step, 32, |t| {
                let u = [t.cos(), t.sin()];
                objective(&u)
            });
            best.max(refined)
        }
        _ => {
            let u0 = &table[best_j];
            let (t1, t2) = tangent_frame(u0);
            let step = (4.0 * std::f64::consts::PI / table.len() as f64).sqrt();
            let at = |al: f64, be: f64| {
                let mut u = [0.0; 3];
                for i in 0..3 {
                    u[i] = u0[i] + al * t1[i] + be * t2[i];
                }
                let n = norm(&u);
                u.iter_mut().for_each(|c| *c /= n);
                objective(&u)
            };
            let (mut al, mut be) = (0.0, 0.0);
            let mut val = best;
            let mut width = step;
            for _ in 0..3 {
                let (a1, v1) = golden_max(al - width, al + width, 24, |s| at(s, be));
                if v1 > val {
                    al = a1;
                    val = v1;
                }
                let (b1, v2) = golden_max(be - width, be + width, 24, |s| at(al, s));
                if v2 > val {
                    be = b1;
                    val = v2;
                }
                width *= 0.5;
            }
            val
        }
    }
}

fn tangent_frame(u: &[f64]) -> ([f64; 3], [f64; 3]) {
    let pick = if u[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = dot(&pick, u);
    let mut t1 = [pick[0] - d * u[0], pick[1] - d * u[1], pick[2] - d * u[2]];
    let n1 = norm(&t1);
    t1.iter_mut().for_each(|c| *c /= n1);
    let t2 = [
        u[1] * t1[2] - u[2] * t1[1],
        u[2] * t1[0] - u[0] * t1[2],
        u[0] * t1[1] - u[1] * t1[0],
    ];
    (t1, t2)
}

/// Support function of `{p : H_k(x,p) ≤ a}` at `q`; always finite.
pub fn support_sigma_truncated(
    spec: &VectorFieldSpec,
    k: u32,
    a: f64,
    x: &[f64],
    q: &[f64],
) -> Result<f64> {
    check_k(k)?;
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "truncated support requires level a >= 0, got {a}"
        )));
    }
    let mut v = [0.0; MAX_DIM];
    spec.eval_into(x, &mut v);
    Ok(sigma_truncated_with(&v[..q.len()], k as f64, a, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v2() -> VectorFieldSpec {
        VectorFieldSpec::constant(vec![2.0, 0.0])
    }

    #[test]
    fn hamiltonian_examples() {
        let zero = VectorFieldSpec::zero(2);
        assert_eq!(hamiltonian(&zero, &[0.1, 0.2], &[0.0, 0.0]), 0.0);
        assert_eq!(hamiltonian(&zero, &[0.1, 0.2], &[3.0, 4.0]), 5.0);
        assert_eq!(hamiltonian(&v2(), &[0.1, 0.2], &[-1.0, 0.0]), -1.0);
    }

    #[test]
    fn coercive_hamiltonian_examples() {
        let zero = VectorFieldSpec::zero(2);
        let x = [0.3, 0.3];
        assert_eq!(coercive_hamiltonian(&zero, 3, &x, &[0.6, 0.8]).unwrap(), 1.0);
        assert_eq!(coercive_hamiltonian(&v2(), 5, &x, &[0.0, 0.0]).unwrap(), 0.0);
        let v3 = VectorFieldSpec::constant(vec![3.0, 0.0]);
        assert_eq!(coercive_hamiltonian(&v3, 2, &x, &[-3.0, 0.0]).unwrap(), -1.0);
        assert!(coercive_hamiltonian(&v3, 0, &x, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn sigma_examples() {
        let x = [0.5, 0.5];
        let zero = VectorFieldSpec::zero(2);
        assert!((support_sigma(&zero, &x, &[3.0, -4.0]).value - 5.0).abs() < 1e-14);
        let s = support_sigma(&v2(), &x, &[1.0, 0.0]);
        assert!((s.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.attaining_direction, Some(vec![1.0, 0.0]));
        assert_eq!(support_sigma(&v2(), &x, &[-1.0, 0.0]).value, f64::INFINITY);
        assert_eq!(support_sigma(&v2(), &x, &[0.0, 0.0]).value, 0.0);
    }

    #[test]
    fn sigma_unit_speed_boundary() {
        // |V| = 1: linear branch
        let v = [1.0, 0.0];
        assert_eq!(sigma_with(&v, &[0.0, 1.0]), f64::INFINITY);
        assert_eq!(sigma_with(&v, &[-1.0, 0.2]), f64::INFINITY);
        let q = [1.0, 1.0];
        assert!((sigma_with(&v, &q) - 2.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_examples() {
        let x = [0.1, 0.9];
        let zero = VectorFieldSpec::zero(2);
        for q in [[1.0, 0.0], [0.3, -0.7], [-2.0, 1.0]] {
            let s = support_sigma_truncated(&zero, 2, 1.0, &x, &q).unwrap();
            assert!((s - norm(&q)).abs() < 1e-9);
        }
        let s = support_sigma_truncated(&v2(), 1, 1.0, &x, &[-1.0, 0.0]).unwrap();
        assert!((s - 3.0).abs() < 1e-9);
        assert!(support_sigma_truncated(&v2(), 1, -0.1, &x, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn ray_radius_matches_piecewise_scan() {
        // H_k along a ray is convex piecewise linear; bisect g(r) = a
        let v = [1.7, -0.4];
        for k in [1.0, 2.0, 5.0] {
            for a in [0.0, 0.5, 1.0, 3.0] {
                for u in sphere_directions(2, 64) {
                    let g = |r: f64| {
                        let p = [r * u[0], r * u[1]];
                        coercive_hamiltonian_with(&v, k, &p)
                    };
                    let (mut lo, mut hi) = (0.0, 1e3);
                    for _ in 0..200 {
                        let m = 0.5 * (lo + hi);
                        if g(m) <= a {
                            lo = m;
                        } else {
                            hi = m;
                        }
                    }
                    let r = ray_radius(&v, k, a, &u);
                    assert!((r - lo).abs() < 1e-9 * (1.0 + lo), "k={k} a={a} u={u:?}");
                }
            }
        }
    }

    #[test]
    fn gauge_membership_examples() {
        let q = ControlSetQuery {
            center: vec![2.0, 0.0],
            radius: 1.0,
        };
        assert!(gauge_membership(&q, &[2.0, 0.0], 0.0));
        assert!(gauge_membership(&q, &[0.0, 0.0], 0.0));
        assert!(!gauge_membership(&q, &[3.1, 0.0], 0.0));
        assert!((q.gauge(&[3.1, 0.0]) - 31.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn recession_cone_examples() {
        let x = [0.0, 0.0];
        assert!(recession_cone_contains(&v2(), &x, &[0.0, 0.0]));
        assert!(recession_cone_contains(&v2(), &x, &[-1.0, 0.0]));
        let slow = VectorFieldSpec::constant(vec![0.5, 0.3]);
        assert!(!recession_cone_contains(&slow, &x, &[-1.0, -0.2]));
    }

    #[test]
    fn projection_lands_in_control_set() {
        let v = [2.0, 0.0];
        for w in [[-1.0, 0.0], [0.0, 5.0], [4.0, 3.0], [1.0, 0.1]] {
            let p = project_onto_control_set(&v, 1.0, &w);
            assert!(control_gauge(&v, 1.0, &p) <= 1.0 + 1e-9, "{w:?} -> {p:?}");
        }
        assert_eq!(project_onto_control_set(&v, 1.0, &[1.0, 0.1]), vec![1.0, 0.1]);
        let p = project_onto_control_set(&v, 1.0, &[-1.0, 0.0]);
        assert!(norm(&p) < 1e-6);
    }

    #[test]
    fn exact_truncated_support_matches_sampling() {
        let mut seed = 7u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..400 {
            let v = [5.0 * rnd() - 2.5, 5.0 * rnd() - 2.5];
            let q = [2.0 * rnd() - 1.0, 2.0 * rnd() - 1.0];
            let k = [1.0, 2.0, 4.0, 8.0][(rnd() * 4.0) as usize];
            let a = 4.0 * rnd();
            let exact = sigma_truncated_with(&v, k, a, &q);
            let sampled = sigma_truncated_sampled(&v, k, a, &q);
            // the sampled value is feasible, so it can only undershoot
            assert!(exact >= sampled - 1e-9 * (1.0 + exact), "{v:?} {q:?} {k} {a}");
            assert!(exact - sampled <= 1e-6 * (1.0 + exact), "{v:?} {q:?} {k} {a}: {exact} vs {sampled}");
        }
        let dense = sphere_directions(3, 200_000);
        for _ in 0..20 {
            let v = [4.0 * rnd() - 2.0, 4.0 * rnd() - 2.0, 4.0 * rnd() - 2.0];
            let q = [2.0 * rnd() - 1.0, 2.0 * rnd() - 1.0, 2.0 * rnd() - 1.0];
            let exact = sigma_truncated_with(&v, 2.0, 1.5, &q);
            let brute = dense
                .iter()
                .map(|u| ray_radius(&v, 2.0, 1.5, u) * dot(u, &q))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(exact >= brute - 1e-9, "{v:?} {q:?}: {exact} vs {brute}");
            assert!(exact - brute <= 1e-2 * (1.0 + exact), "{v:?} {q:?}: {exact} vs {brute}");
        }
    }

    #[test]
    fn spatial_truncated_support() {
        let zero = VectorFieldSpec::zero(3);
        let s = support_sigma_truncated(&zero, 2, 1.0, &[0.0; 3], &[0.2, -0.5, 0.4]).unwrap();
        assert!((s - norm(&[0.2, -0.5, 0.4])).abs() < 1e-6);
    }
}

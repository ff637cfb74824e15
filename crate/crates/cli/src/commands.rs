//! Subcommand bodies. Each returns the files it wrote, relative to the
//! output directory.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use homog_core::dynamics::{
    boundary_normal_check, build_reachability_graph, detect_invariant_sets, MarginPolicy,
    DEFAULT_BOUNDARY_TOL,
};
use homog_core::effective::{
    corrector_field, wulff_set, EffectiveOptions, EffectiveSolver, WulffSet,
};
use homog_core::geometry::{norm, sigma_truncated_with, sigma_with};
use homog_core::hj_solver::{homogenization_experiment, solve_oscillatory, SolverConfig};
use homog_core::isoperimetric::isoperimetric_study;
use homog_core::metric::{
    bellman_ford_negative_cycle, build_weights, shortest_path_field, tilted_distance_field,
    EdgeWeighting,
};
use homog_core::torus_grid::format_value;
use homog_core::vector_field::check_assumptions;
use homog_core::{GridFunction, TorusGrid};

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    pub strict: bool,
    pub certify_margin: bool,
}

pub(crate) struct Output {
    dir: PathBuf,
    format: OutputFormat,
    pub written: Vec<String>,
}

impl Output {
    pub(crate) fn new(dir: &Path, format: OutputFormat) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub(crate) fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    }

    fn json(&mut self, name: &str, mut body: Value) -> Result<(), CliError> {
        if let Value::Object(m) = &mut body {
            m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        }
        let mut s = serde_json::to_string_pretty(&body).expect("json values serialize");
        s.push('\n');
        self.text(name, &s)
    }

    fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let p = self.path(name);
        let mut w = csv::Writer::from_path(&p).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    fn grid(&mut self, stem: &str, f: &GridFunction) -> Result<(), CliError> {
        let name = match self.format {
            OutputFormat::Csv => format!("{stem}.csv"),
            OutputFormat::Binary => format!("{stem}.bin"),
        };
        let p = self.path(&name);
        let file = fs::File::create(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        let w = BufWriter::new(file);
        match self.format {
            OutputFormat::Csv => f.write_csv(w)?,
            OutputFormat::Binary => f.write_binary(w)?,
        }
        Ok(())
    }
}

/// Finite numbers as JSON numbers, infinities as `"inf"`/`"-inf"`.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(format_value(v))
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn columns(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|i| format!("{prefix}{i}")).collect()
}

fn cells(v: &[f64]) -> Vec<String> {
    v.iter().map(|&x| format_value(x)).collect()
}

fn grid(cfg: &RunConfig) -> Result<TorusGrid, CliError> {
    Ok(TorusGrid::cube(cfg.dimension()?, cfg.usize("grid.resolution")?)?)
}

fn effective_options(cfg: &RunConfig) -> Result<EffectiveOptions, CliError> {
    let k_max = cfg.usize("effective.k_max")?;
    Ok(EffectiveOptions {
        resolution: cfg.usize("grid.resolution")?,
        radius: cfg.usize("metric.radius")?,
        tol: cfg.f64("effective.tol")?,
        k_max: u32::try_from(k_max).map_err(|_| CliError::Config("effective.k_max too large".into()))?,
        bisection_tol: cfg.optional_f64("effective.bisection_tol")?,
        pde_audit: cfg.optional_f64("effective.pde_audit")?,
        pde_scheme: cfg.scheme()?,
    })
}

fn weighting(cfg: &RunConfig, dim: usize) -> Result<EdgeWeighting, CliError> {
    Ok(EdgeWeighting::new(dim, cfg.f64("metric.level")?)
        .with_tilt(cfg.vector("metric.tilt")?)
        .with_truncation(cfg.optional_u32("metric.truncation")?)
        .with_radius(cfg.usize("metric.radius")?))
}

fn wulff(cfg: &RunConfig) -> Result<WulffSet, CliError> {
    let spec = cfg.field()?;
    Ok(wulff_set(&spec, cfg.usize("effective.directions")?, effective_options(cfg)?)?)
}

fn solver_template(cfg: &RunConfig) -> Result<SolverConfig, CliError> {
    let eps = cfg.vector("solver.epsilon")?;
    Ok(SolverConfig {
        side: cfg.f64("solver.side")?,
        cfl: cfg.f64("solver.cfl")?,
        ..SolverConfig::new(eps[0], cfg.f64("solver.t")?, cfg.usize("solver.resolution")?)
    })
}

pub(crate) fn check_assumptions_cmd(
    cfg: &RunConfig,
    flags: Flags,
    out: &mut Output,
) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let g = grid(cfg)?;
    let study = isoperimetric_study(g.dim())?;
    let chi = cfg.optional_f64("assumptions.chi")?.unwrap_or(study.chi);
    let report = check_assumptions(&spec, chi, &g)?;
    out.json(
        "check_assumptions.json",
        json!({
            "field": to_value(&spec),
            "resolution": g.resolution()[0],
            "passes_A2": report.passes_a2,
            "report": to_value(&report),
            "isoperimetric": to_value(&study),
        }),
    )?;
    if flags.strict && !report.passes_a2 {
        return Err(CliError::Assumption(format!(
            "‖div V‖ = {:.6} exceeds 1/χ = {:.6}",
            report.divergence_norm, report.threshold
        )));
    }
    Ok(())
}

pub(crate) fn sigma_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let d = spec.dim();
    let samples = cfg.usize("sigma.samples")?;
    let trunc = cfg.optional_u32("sigma.truncation")?;
    let level = cfg.f64("sigma.level")?;
    let mut queries: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if samples == 0 {
        let x = cfg.vector("sigma.x")?;
        let q = cfg.vector("sigma.q")?;
        if x.len() != d || q.len() != d {
            return Err(CliError::Config(format!("sigma.x and sigma.q need {d} components")));
        }
        queries.push((spec.eval(&x), q));
    } else {
        // random V-values with |V| ≤ 2.5 and unit directions
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.u64("seed")?);
        for _ in 0..samples {
            let v = random_in_ball(&mut rng, d, 2.5);
            let q = random_unit(&mut rng, d);
            queries.push((v, q));
        }
    }
    let mut header = columns("v", d);
    header.extend(columns("q", d));
    header.push("sigma".into());
    if trunc.is_some() {
        header.push("sigma_k".into());
    }
    let rows: Vec<Vec<String>> = queries
        .iter()
        .map(|(v, q)| {
            let mut r = cells(v);
            r.extend(cells(q));
            r.push(format_value(sigma_with(v, q)));
            if let Some(k) = trunc {
                r.push(format_value(sigma_truncated_with(v, k as f64, level, q)));
            }
            r
        })
        .collect();
    out.csv("sigma.csv", &header, &rows)
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn random_in_ball(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Vec<f64> {
    let u = random_unit(rng, d);
    let r = radius * rng.gen::<f64>();
    u.into_iter().map(|c| c * r).collect()
}

pub(crate) fn distance_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let g = grid(cfg)?;
    let w = weighting(cfg, g.dim())?;
    let table = build_weights(&spec, &g, &w)?;
    let source = g.cell_of(&cfg.vector("metric.source")?);
    let (_, min_weight) = table.min_weight();
    let field = if min_weight >= 0.0 {
        shortest_path_field(&table, source)?
    } else {
        tilted_distance_field(&table, source)?
    };
    out.grid("distance", &field)?;
    out.json(
        "distance.json",
        json!({
            "source_cell": source,
            "weighting": to_value(&w),
            "min_weight": num(min_weight),
            "finite": field.is_finite(),
            "max_value": num(field.max()),
        }),
    )
}

pub(crate) fn cycle_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let g = grid(cfg)?;
    let w = weighting(cfg, g.dim())?;
    let table = build_weights(&spec, &g, &w)?;
    let body = match bellman_ford_negative_cycle(&table) {
        Some(c) => json!({
            "weighting": to_value(&w),
            "found": true,
            "winding": c.winding,
            "cells": c.cells,
            "offsets": c.offsets,
            "total_weight": num(c.total_weight),
            "resummed_weight": num(c.resum(&table)),
        }),
        None => json!({ "weighting": to_value(&w), "found": false }),
    };
    out.json("cycle.json", body)
}

pub(crate) fn invariant_sets_cmd(
    cfg: &RunConfig,
    flags: Flags,
    out: &mut Output,
) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let g = grid(cfg)?;
    let policy = if flags.certify_margin {
        MarginPolicy::Enforce
    } else {
        MarginPolicy::Report
    };
    let graph = build_reachability_graph(
        &spec,
        &g,
        cfg.usize("metric.radius")?,
        cfg.f64("metric.eta")?,
        cfg.side()?,
        policy,
    )?;
    let report = detect_invariant_sets(&graph);
    let boundary = if report.proper_invariant_found {
        let s = boundary_normal_check(&report, &graph, &spec, None, DEFAULT_BOUNDARY_TOL)?;
        json!({
            "component": s.component,
            "tol": s.tol,
            "cells": s.samples.len(),
            "normal_fraction": s.normal_fraction,
            "speed_fraction": s.speed_fraction,
            "median_n_dot_v": s.median_n_dot_v,
        })
    } else {
        Value::Null
    };
    let trapped: Vec<Value> = report
        .trapped
        .iter()
        .map(|&k| {
            json!({
                "component": k,
                "cells": report.components[k].len(),
                "volume": report.volumes[k],
            })
        })
        .collect();
    let labels = GridFunction::new(g.clone(), report.labels.iter().map(|&l| l as f64).collect())?;
    out.grid("invariant_labels", &labels)?;
    out.json(
        "invariant_sets.json",
        json!({
            "field": to_value(&spec),
            "resolution": g.resolution()[0],
            "side": format!("{:?}", graph.side).to_lowercase(),
            "eta": graph.eta,
            "edges": graph.edge_count(),
            "margin_certified": graph.margin_certified,
            "margin_step": graph.margin_step,
            "margin_limit": num(graph.margin_limit),
            "component_count": report.component_count,
            "proper_invariant_found": report.proper_invariant_found,
            "trapped": trapped,
            "boundary": boundary,
        }),
    )
}

pub(crate) fn effective_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let d = spec.dim();
    let ps = cfg.vectors("effective.p")?;
    let solver = EffectiveSolver::new(&spec, effective_options(cfg)?)?;
    let mut results = Vec::new();
    for p in &ps {
        results.push(solver.evaluate(p)?);
    }
    let mut header = columns("p", d);
    header.extend(
        ["lower", "upper", "limit", "stabilized", "bisection_tol", "wulff_margin"]
            .map(String::from),
    );
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = cells(&r.p);
            row.extend(cells(&[r.lower, r.upper, r.limit]));
            row.push(r.stabilized.to_string());
            row.extend(cells(&[r.bisection_tol, r.wulff_margin]));
            row
        })
        .collect();
    out.csv("effective.csv", &header, &rows)?;
    let mut header = columns("p", d);
    header.extend(["k", "route", "value", "iterations"].map(String::from));
    let rows: Vec<Vec<String>> = results
        .iter()
        .flat_map(|r| {
            r.sequence.iter().map(move |s| {
                let mut row = cells(&r.p);
                row.push(s.k.to_string());
                row.push(s.route.as_str().to_string());
                row.push(format_value(s.value));
                row.push(s.iterations.to_string());
                row
            })
        })
        .collect();
    out.csv("effective_sequence.csv", &header, &rows)?;
    out.json(
        "effective.json",
        json!({
            "field": to_value(&spec),
            "options": to_value(&solver.options),
            "results": to_value(&results),
        }),
    )
}

pub(crate) fn wulff_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let w = wulff(cfg)?;
    let mut header = columns("p", w.dim);
    header.push("value".into());
    let rows: Vec<Vec<String>> = w
        .directions
        .iter()
        .zip(&w.values)
        .map(|(p, &v)| {
            let mut r = cells(p);
            r.push(format_value(v));
            r
        })
        .collect();
    out.csv("wulff.csv", &header, &rows)?;
    let vertices = if w.dim == 2 { json!(w.vertices()) } else { Value::Null };
    out.json(
        "wulff.json",
        json!({
            "directions": w.directions,
            "values": w.values,
            "vertices": vertices,
        }),
    )
}

pub(crate) fn corrector_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let p = cfg.vectors("effective.p")?.remove(0);
    let k = cfg
        .optional_u32("effective.k")?
        .ok_or_else(|| CliError::Config("effective.k must be a positive integer".into()))?;
    let solver = EffectiveSolver::new(&spec, effective_options(cfg)?)?;
    let (lower, upper) = solver.bounds(&p);
    let btol = solver
        .options
        .bisection_tol
        .unwrap_or_else(|| homog_core::effective::default_bisection_tol(lower, upper));
    let est = solver.cycles(&p, k, btol)?;
    let c = corrector_field(&solver, &p, k, est.above, est.certificate.as_ref())?;
    out.grid("corrector", &c.field)?;
    out.json(
        "corrector.json",
        json!({
            "p": p,
            "k": k,
            "level": c.level,
            "base_cell": c.base_cell,
            "residual": num(c.residual),
            "spread": num(c.spread),
        }),
    )
}

pub(crate) fn homogenize_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let u0 = cfg.initial_data()?;
    let eps = cfg.vector("solver.epsilon")?;
    let w = wulff(cfg)?;
    let template = solver_template(cfg)?;
    let table = homogenization_experiment(&spec, &u0, &w, &eps, &template)?;
    let header = ["epsilon", "t", "error"].map(String::from);
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| cells(&[r.epsilon, r.t, r.error]))
        .collect();
    out.csv("homogenize.csv", &header, &rows)?;
    out.json(
        "homogenize.json",
        json!({
            "epsilon": eps,
            "errors": table.errors,
            "ratios": table.ratios,
            "spacing": table.spacing,
            "wulff_values": w.values,
        }),
    )
}

pub(crate) fn evolve_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let spec = cfg.field()?;
    let u0 = cfg.initial_data()?;
    let config = solver_template(cfg)?;
    let times = cfg.vector("solver.snapshots")?;
    let snaps = solve_oscillatory(&spec, &u0, &config, &times)?;
    let mut summary = Vec::new();
    for (i, s) in snaps.iter().enumerate() {
        out.grid(&format!("evolve_{i:03}"), &s.field)?;
        summary.push(json!({ "t": s.t, "min": num(s.field.min()), "max": num(s.field.max()) }));
    }
    out.json(
        "evolve.json",
        json!({
            "epsilon": config.epsilon,
            "side": config.side,
            "resolution": config.resolution,
            "snapshots": summary,
        }),
    )
}

//! Keyed-text run configuration.
//!
//! One `key = value` pair per line, `#` starts a comment. Every key has a
//! default; unknown keys are rejected. Lists use `,` between components and
//! `;` between vectors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use homog_core::dynamics::Side;
use homog_core::effective::PdeScheme;
use homog_core::hj_solver::InitialData;
use homog_core::VectorFieldSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Parsed<T> = std::result::Result<T, ConfigError>;

const DEFAULTS: &[(&str, &str)] = &[
    ("field.kind", "shear"),
    ("field.amplitude", "2"),
    ("field.value", "0,0"),
    ("field.center", "0.5,0.5"),
    ("grid.dimension", "2"),
    ("grid.resolution", "64"),
    ("assumptions.chi", "auto"),
    ("metric.radius", "2"),
    ("metric.eta", "0.05"),
    ("metric.side", "inner"),
    ("metric.level", "1"),
    ("metric.tilt", "0,0"),
    ("metric.truncation", "none"),
    ("metric.source", "0.5,0.5"),
    ("effective.p", "1,0;0,1"),
    ("effective.tol", "0.01"),
    ("effective.k_max", "32"),
    ("effective.k", "8"),
    ("effective.bisection_tol", "auto"),
    ("effective.pde_audit", "none"),
    ("effective.scheme", "upwind"),
    ("effective.directions", "32"),
    ("sigma.x", "0.5,0.5"),
    ("sigma.q", "1,0"),
    ("sigma.samples", "0"),
    ("sigma.truncation", "none"),
    ("sigma.level", "1"),
    ("solver.epsilon", "0.25,0.125,0.0625"),
    ("solver.t", "0.5"),
    ("solver.cfl", "0.5"),
    ("solver.resolution", "256"),
    ("solver.side", "2"),
    ("solver.initial", "cone"),
    ("solver.center", "1,1"),
    ("solver.snapshots", "0.25,0.5"),
    ("output.directory", "out"),
    ("output.format", "csv"),
    ("seed", "0"),
];

/// Fully resolved configuration: every known key mapped to its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            values: DEFAULTS
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

impl RunConfig {
    pub fn known_keys() -> impl Iterator<Item = &'static str> {
        DEFAULTS.iter().map(|(k, _)| *k)
    }

    pub fn parse(text: &str) -> Parsed<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| ConfigError(format!("line {}: {}", n + 1, e.0)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Parsed<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(ConfigError(format!("unknown key `{key}`"))),
        }
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Parsed<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("override `{assignment}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("known key")
    }

    /// Manifest text: sorted `key = value` lines, parseable by [`RunConfig::parse`].
    pub fn to_manifest(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn f64(&self, key: &str) -> Parsed<f64> {
        parse_f64(key, self.get(key))
    }

    pub fn usize(&self, key: &str) -> Parsed<usize> {
        let v = self.get(key);
        v.parse().map_err(|_| bad(key, v, "a nonnegative integer"))
    }

    pub fn u64(&self, key: &str) -> Parsed<u64> {
        let v = self.get(key);
        v.parse().map_err(|_| bad(key, v, "a nonnegative integer"))
    }

    pub fn vector(&self, key: &str) -> Parsed<Vec<f64>> {
        let v = self.get(key);
        v.split(',').map(|c| parse_f64(key, c.trim())).collect()
    }

    pub fn vectors(&self, key: &str) -> Parsed<Vec<Vec<f64>>> {
        let v = self.get(key);
        v.split(';')
            .map(|part| part.split(',').map(|c| parse_f64(key, c.trim())).collect())
            .collect()
    }

    /// `none` or a number.
    pub fn optional_f64(&self, key: &str) -> Parsed<Option<f64>> {
        match self.get(key) {
            "none" | "auto" => Ok(None),
            v => parse_f64(key, v).map(Some),
        }
    }

    pub fn optional_u32(&self, key: &str) -> Parsed<Option<u32>> {
        match self.get(key) {
            "none" => Ok(None),
            v => v
                .parse()
                .map(Some)
                .map_err(|_| bad(key, v, "`none` or a positive integer")),
        }
    }

    pub fn dimension(&self) -> Parsed<usize> {
        let d = self.usize("grid.dimension")?;
        if !(1..=3).contains(&d) {
            return Err(bad("grid.dimension", self.get("grid.dimension"), "1, 2 or 3"));
        }
        Ok(d)
    }

    pub fn field(&self) -> Parsed<VectorFieldSpec> {
        let d = self.dimension()?;
        let amp = self.f64("field.amplitude")?;
        let spec = match self.get("field.kind") {
            "zero" => VectorFieldSpec::zero(d),
            "constant" => VectorFieldSpec::constant(self.vector("field.value")?),
            "shear" => VectorFieldSpec::shear_sin(amp),
            "cellular" => VectorFieldSpec::cellular(amp),
            "sink" => VectorFieldSpec::sink(amp, self.vector("field.center")?),
            other => {
                return Err(bad(
                    "field.kind",
                    other,
                    "zero, constant, shear, cellular or sink",
                ))
            }
        };
        if spec.dim() != d {
            return Err(ConfigError(format!(
                "field `{}` has dimension {} but grid.dimension = {d}",
                spec.kind(),
                spec.dim()
            )));
        }
        Ok(spec)
    }

    pub fn side(&self) -> Parsed<Side> {
        match self.get("metric.side") {
            "inner" => Ok(Side::Inner),
            "outer" => Ok(Side::Outer),
            v => Err(bad("metric.side", v, "inner or outer")),
        }
    }

    pub fn scheme(&self) -> Parsed<PdeScheme> {
        match self.get("effective.scheme") {
            "upwind" => Ok(PdeScheme::Upwind),
            "lax_friedrichs" => Ok(PdeScheme::LaxFriedrichs),
            v => Err(bad("effective.scheme", v, "upwind or lax_friedrichs")),
        }
    }

    pub fn initial_data(&self) -> Parsed<InitialData> {
        let center = self.vector("solver.center")?;
        match self.get("solver.initial") {
            "cone" => Ok(InitialData::cone(center)),
            v => Err(bad("solver.initial", v, "cone")),
        }
    }

    pub fn format(&self) -> Parsed<OutputFormat> {
        match self.get("output.format") {
            "csv" => Ok(OutputFormat::Csv),
            "binary" => Ok(OutputFormat::Binary),
            v => Err(bad("output.format", v, "csv or binary")),
        }
    }
}

/// Encoding of grid-valued outputs; reports are always JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Binary,
}

fn parse_f64(key: &str, v: &str) -> Parsed<f64> {
    homog_core::torus_grid::parse_value(v).map_err(|_| bad(key, v, "a number"))
}

fn bad(key: &str, v: &str, want: &str) -> ConfigError {
    ConfigError(format!("{key} = `{v}`: expected {want}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("field.kind", "sink").unwrap();
        cfg.set("effective.p", "1,0;0.5,0.5").unwrap();
        let back = RunConfig::parse(&cfg.to_manifest()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RunConfig::parse("grid.resolution = 32\nfield.colour = red\n").unwrap_err();
        assert!(err.0.contains("line 2"));
        assert!(RunConfig::default().apply_override("nope=1").is_err());
    }

    #[test]
    fn comments_and_lists() {
        let cfg = RunConfig::parse("# sweep\neffective.p = 1,0 ; 0,1 # two\n").unwrap();
        assert_eq!(cfg.vectors("effective.p").unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(cfg.optional_u32("metric.truncation").unwrap(), None);
    }

    #[test]
    fn field_dimension_checked() {
        let mut cfg = RunConfig::default();
        cfg.set("grid.dimension", "3").unwrap();
        assert!(cfg.field().is_err());
        cfg.set("field.kind", "zero").unwrap();
        assert_eq!(cfg.field().unwrap().dim(), 3);
    }
}

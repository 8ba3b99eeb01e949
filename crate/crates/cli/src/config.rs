//! Run configuration: TOML sections with strict key checking.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use stirling::{
    EngineSpec, FridgeSpec, GevaKosloff, Machine, Mode, Numerics, QuadratureConfig, RegeneratorModel, RegimeWindow,
    Statistics, SweepTemplate,
};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}', expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
    pub particle_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub machine: Machine,
    pub numerics: Numerics,
    pub mode: Mode,
    pub output: OutputConfig,
    /// Fixed ratios of the engine, for sweeps over `beta1 * omega1`.
    pub template: Option<SweepTemplate>,
}

/// One TOML section; remembers which keys were read so leftovers can be
/// reported as unknown.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    seen: BTreeSet<&'static str>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'static str) -> Result<Self, CliError> {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(CliError::Config(format!("{name}: expected a [{name}] section"))),
        };
        Ok(Self { name, table, seen: BTreeSet::new() })
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.insert(key);
        self.table.and_then(|t| t.get(key))
    }

    fn has(&self, key: &str) -> bool {
        self.table.is_some_and(|t| t.contains_key(key))
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{}.{key}: {msg}", self.name))
    }

    fn float(&mut self, key: &'static str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(self.err(key, format!("expected a number, got {}", other.type_str()))),
        }
    }

    fn req_float(&mut self, key: &'static str) -> Result<f64, CliError> {
        self.float(key)?.ok_or_else(|| self.err(key, "missing"))
    }

    fn string(&mut self, key: &'static str) -> Result<Option<&'a str>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(other) => Err(self.err(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    fn integer(&mut self, key: &'static str) -> Result<Option<i64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Integer(v)) => Ok(Some(*v)),
            Some(other) => Err(self.err(key, format!("expected an integer, got {}", other.type_str()))),
        }
    }

    /// Absolute value under `abs_key` or `ratio * base` under `ratio_key`,
    /// but not both.
    fn beta_or_ratio(&mut self, abs_key: &'static str, ratio_key: &'static str, base: f64) -> Result<f64, CliError> {
        match (self.float(abs_key)?, self.float(ratio_key)?) {
            (Some(_), Some(_)) => Err(self.err(ratio_key, format!("give either {abs_key} or {ratio_key}, not both"))),
            (Some(b), None) => Ok(b),
            (None, Some(r)) => Ok(r * base),
            (None, None) => Err(self.err(abs_key, format!("missing (or give {ratio_key})"))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if let Some(t) = self.table {
            if let Some(extra) = t.keys().find(|k| !self.seen.contains(k.as_str())) {
                return Err(self.err(extra, "unknown key"));
            }
        }
        Ok(())
    }
}

const SECTIONS: [&str; 6] = ["working_medium", "cycle", "bath", "regenerator", "numerics", "output"];

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let root: Table =
        text.parse().map_err(|e: toml::de::Error| CliError::Config(format!("malformed config: {}", e.message())))?;
    if let Some(extra) = root.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(CliError::Config(format!("{extra}: unknown section")));
    }

    let mut medium = Section::new(&root, "working_medium")?;
    let stat_name = medium.string("statistics")?.ok_or_else(|| medium.err("statistics", "missing"))?;
    let stat: Statistics = stat_name.parse().map_err(|e| medium.err("statistics", e))?;
    medium.finish()?;

    let mut bath = Section::new(&root, "bath")?;
    if bath.has("rho0") || bath.has("m") {
        let key = if bath.has("rho0") { "rho0" } else { "m" };
        return Err(bath.err(key, "thermal-field baths have no stroke-time model here; give a and q"));
    }
    let a = bath.req_float("a")?;
    let q = bath.req_float("q")?;
    let model = GevaKosloff::new(a, q).map_err(|e| {
        let key = if !(a > 0.0) { "a" } else { "q" };
        bath.err(key, e)
    })?;
    bath.finish()?;

    let mut cycle = Section::new(&root, "cycle")?;
    let kind = cycle.string("kind")?.ok_or_else(|| cycle.err("kind", "missing"))?;
    let omega1 = cycle.req_float("omega1")?;
    let omega2 = cycle.req_float("omega2")?;
    let mut regen = Section::new(&root, "regenerator")?;
    let (machine, template) = match kind {
        "engine" => {
            let beta1 = cycle.req_float("beta1")?;
            let beta2 = cycle.req_float("beta2")?;
            let beta_h = cycle.beta_or_ratio("beta_h", "alpha_h", beta1)?;
            let beta_c = cycle.beta_or_ratio("beta_c", "alpha_c", beta2)?;
            let gamma1 = regen.req_float("gamma1")?;
            let gamma2 = regen.req_float("gamma2")?;
            let model_r = RegeneratorModel::engine(gamma1, gamma2).map_err(|e| {
                let key = if gamma1 > 1.0 { "gamma2" } else { "gamma1" };
                regen.err(key, e)
            })?;
            let spec = EngineSpec { stat, omega1, omega2, beta_h, beta1, beta2, beta_c };
            let template = SweepTemplate {
                stat,
                omega_ratio: omega2 / omega1,
                beta_ratio: beta2 / beta1,
                alpha_h: beta_h / beta1,
                alpha_c: beta_c / beta2,
                gamma1,
                gamma2,
                model,
            };
            (Machine::engine(spec, model, model_r), Some(template))
        }
        "fridge" | "refrigerator" => {
            let beta1p = cycle.req_float("beta1p")?;
            let beta2p = cycle.req_float("beta2p")?;
            let beta_h = cycle.beta_or_ratio("beta_h", "alpha_h", beta1p)?;
            let beta_c = cycle.beta_or_ratio("beta_c", "alpha_c", beta2p)?;
            let b = regen.req_float("b")?;
            let bp = regen.req_float("bp")?;
            let model_r = RegeneratorModel::fridge(b, bp).map_err(|e| {
                let key = if b > 0.0 { "bp" } else { "b" };
                regen.err(key, e)
            })?;
            let spec = FridgeSpec { stat, omega1, omega2, beta1p, beta_h, beta_c, beta2p };
            (Machine::fridge(spec, model, model_r), None)
        }
        other => return Err(cycle.err("kind", format!("expected engine or fridge, got '{other}'"))),
    };
    cycle.finish()?;
    regen.finish()?;

    let mut num = Section::new(&root, "numerics")?;
    let defaults = QuadratureConfig::default();
    let quadrature = QuadratureConfig {
        rel_tol: num.float("rel_tol")?.unwrap_or(defaults.rel_tol),
        abs_tol: num.float("abs_tol")?.unwrap_or(defaults.abs_tol),
        max_subdivisions: match num.integer("max_subdivisions")? {
            None => defaults.max_subdivisions,
            Some(n) if n >= 1 => n as usize,
            Some(n) => return Err(num.err("max_subdivisions", format!("must be at least 1, got {n}"))),
        },
    };
    if !(quadrature.rel_tol > 0.0) {
        return Err(num.err("rel_tol", "must be positive"));
    }
    if !(quadrature.abs_tol > 0.0) {
        return Err(num.err("abs_tol", "must be positive"));
    }
    let mode = match num.string("regime_mode")? {
        None => Mode::Exact,
        Some(s) => s.parse().map_err(|e| num.err("regime_mode", e))?,
    };
    let window_defaults = RegimeWindow::default();
    let window = RegimeWindow {
        x_low: num.float("x_low_threshold")?.unwrap_or(window_defaults.x_low),
        x_high: num.float("x_high_threshold")?.unwrap_or(window_defaults.x_high),
    };
    window.validate().map_err(|e| num.err("x_low_threshold", e))?;
    num.finish()?;

    let mut out = Section::new(&root, "output")?;
    let format = match out.string("format")? {
        None => None,
        Some(s) => Some(s.parse().map_err(|e| out.err("format", e))?),
    };
    let path = out.string("path")?.map(PathBuf::from);
    let particle_count = match out.integer("particle_count")? {
        None => 1,
        Some(n) if n >= 1 => n as u64,
        Some(n) => return Err(out.err("particle_count", format!("must be at least 1, got {n}"))),
    };
    out.finish()?;

    Ok(RunConfig {
        machine,
        numerics: Numerics { quadrature, window },
        mode,
        output: OutputConfig { format, path, particle_count },
        template,
    })
}

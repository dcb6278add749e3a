//! Run settings merged from an optional key=value file and command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qcf_core::charfn::{EngineTag, JumpConfig};
use qcf_core::numerics::QuadratureConfig;
use qcf_core::Observable;

use crate::error::CliError;

/// Keys accepted in a config file; flags use the same names with `--`.
pub const KEYS: [&str; 13] = [
    "observable",
    "engine",
    "t-range",
    "x-range",
    "radius",
    "eps-schedule",
    "abs-tol",
    "rel-tol",
    "format",
    "out",
    "z",
    "params",
    "levels",
];

pub type Settings = BTreeMap<String, String>;

pub fn parse_config_text(text: &str) -> Result<Settings, CliError> {
    let mut out = Settings::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", k + 1)))?;
        let key = key.trim().replace('_', "-").to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key '{key}'", k + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Overlays `flags` on `file`.
pub fn merge(file: Settings, flags: Settings) -> Settings {
    let mut out = file;
    out.extend(flags);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    One(EngineTag),
    All,
}

impl EngineChoice {
    pub fn token(self) -> &'static str {
        match self {
            EngineChoice::One(tag) => tag.token(),
            EngineChoice::All => "all",
        }
    }
}

impl FromStr for EngineChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(EngineChoice::All);
        }
        Ok(EngineChoice::One(s.parse()?))
    }
}

/// `min:max:step` with `min <= max` and `step > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

const MAX_POINTS: f64 = 1e6;

impl FromStr for Range {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("range '{s}' is not min:max:step"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let p = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        let (min, max, step) = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(bad());
        }
        if min > max {
            return Err(CliError::Config(format!("range '{s}': min {min} exceeds max {max}")));
        }
        if !(step > 0.0) {
            return Err(CliError::Config(format!("range '{s}': step must be positive")));
        }
        if (max - min) / step > MAX_POINTS {
            return Err(CliError::Config(format!("range '{s}' has too many points")));
        }
        Ok(Range { min, max, step })
    }
}

impl Range {
    /// Grid points from `min`; `max` is included when the step divides the span.
    pub fn points(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let ratio = span / self.step;
        let n = ratio.round();
        if (ratio - n).abs() <= 1e-9 * n.max(1.0) {
            let n = n as usize;
            if n == 0 {
                return vec![self.min];
            }
            (0..=n)
                .map(|k| self.min + span * k as f64 / n as f64)
                .collect()
        } else {
            let n = ratio.floor() as usize;
            (0..=n).map(|k| self.min + k as f64 * self.step).collect()
        }
    }

    pub fn echo(&self) -> String {
        format!("{}:{}:{}", echo_num(self.min), echo_num(self.max), echo_num(self.step))
    }
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{key}: '{v}' is not a number")))
        })
        .collect()
}

/// Shortest round-trip form, in exponent notation outside `[1e-3, 1e6)`.
fn echo_num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn echo_list(v: &[f64]) -> String {
    v.iter().map(|&x| echo_num(x)).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Cf,
    Compare,
    Spectrum,
    Density,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Cf => "cf",
            Command::Compare => "compare",
            Command::Spectrum => "spectrum",
            Command::Density => "density",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub observable: Observable,
    pub engine: EngineChoice,
    pub t_range: Range,
    pub x_range: Range,
    pub jump: JumpConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub z: f64,
    /// Family parameters for `spectrum`; the default set when empty.
    pub params: Vec<f64>,
    pub levels: usize,
}

impl RunConfig {
    pub fn resolve(command: Command, s: &Settings) -> Result<Self, CliError> {
        let get = |k: &str| s.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64, CliError> {
            match get(k) {
                Some(v) => v
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Config(format!("{k}: '{v}' is not a finite number"))),
                None => Ok(default),
            }
        };

        let observable: Observable = get("observable").unwrap_or("x").parse()?;
        let default_engine = match command {
            Command::Compare => "jump",
            _ => "closed",
        };
        let engine: EngineChoice = get("engine").unwrap_or(default_engine).parse()?;
        let t_range: Range = get("t-range").unwrap_or("-2:2:0.2").parse()?;
        let x_range: Range = get("x-range").unwrap_or("-8:8:0.1").parse()?;

        let defaults = JumpConfig::default();
        let eps_schedule = match get("eps-schedule") {
            Some(v) => parse_list("eps-schedule", v)?,
            None => defaults.eps_schedule.clone(),
        };
        let quad = QuadratureConfig::default();
        let quadrature = QuadratureConfig::new(
            quad.radius,
            num("abs-tol", quad.abs_tol)?,
            num("rel-tol", quad.rel_tol)?,
            quad.max_subdivisions,
            quad.min_interval,
        )?;
        let jump = JumpConfig::new(eps_schedule, num("radius", defaults.radius)?, quadrature)?;

        let params = match get("params") {
            Some(v) => parse_list("params", v)?,
            None => Vec::new(),
        };
        let levels = match get("levels") {
            Some(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("levels: '{v}' is not a positive integer")))?,
            None => 8,
        };

        Ok(Self {
            command,
            observable,
            engine,
            t_range,
            x_range,
            jump,
            format: get("format").unwrap_or("csv").parse()?,
            out: get("out").map(PathBuf::from),
            z: num("z", 0.5)?,
            params,
            levels,
        })
    }

    /// Resolved settings relevant to the command, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("command".to_string(), self.command.name().to_string()),
            ("observable".to_string(), self.observable.token().to_string()),
        ];
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        match self.command {
            Command::Cf | Command::Compare => {
                push("engine", self.engine.token().to_string());
                push("t-range", self.t_range.echo());
                push("radius", echo_num(self.jump.radius));
                push("eps-schedule", echo_list(&self.jump.eps_schedule));
                push("abs-tol", echo_num(self.jump.quadrature.abs_tol));
                push("rel-tol", echo_num(self.jump.quadrature.rel_tol));
            }
            Command::Spectrum => {
                push("z", echo_num(self.z));
                if self.observable == Observable::Harmonic {
                    push("levels", self.levels.to_string());
                } else if !self.params.is_empty() {
                    push("params", echo_list(&self.params));
                }
            }
            Command::Density => push("x-range", self.x_range.echo()),
        }
        out
    }
}

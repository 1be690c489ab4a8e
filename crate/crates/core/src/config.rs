//! Plain-text experiment configuration.
//!
//! One `key = value` statement per line (or several separated by `;`),
//! `#` starts a comment. Lists are comma separated, complex numbers are
//! written `a+bi`.

use crate::expansion::LambdaGrid;
use crate::scatterer::{BoundaryCondition, CutoffProfile, RadialScatterer, ScattererError};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {key}: {message}")]
pub struct ConfigError {
    /// 1-based; 0 when the problem is a missing key.
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }
}

const KEYS: &[&str] = &[
    "kind",
    "breaks",
    "values",
    "radius",
    "bc",
    "cutoff.r0",
    "cutoff.width",
    "grid.argDeg",
    "grid.secondDeg",
    "grid.min",
    "grid.max",
    "grid.count",
    "fit.jmax",
    "fit.kmax",
    "lmax",
    "f.mode",
    "f.inner",
    "f.outer",
    "g.inner",
    "g.outer",
    "tune.mode",
    "tune.lo",
    "tune.hi",
    "perturb.breaks",
    "perturb.values",
    "epsilons",
    "pole.mode",
    "pole.seed",
    "pole.radius",
    "phase.min",
    "phase.max",
    "phase.count",
    "wave.x",
    "wave.times",
    "tol.identity",
];

/// A smooth bump `f` supported on `(inner, outer)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpSpec {
    pub inner: f64,
    pub outer: f64,
}

/// Scale the potential by `c ∈ [lo, hi]` until mode `mode` is at threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuneSpec {
    pub mode: u32,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl PhaseRange {
    /// Log-spaced `λ` values, ascending.
    pub fn lambdas(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max / self.min).ln() / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.min * (step * i as f64).exp())
            .collect()
    }
}

/// `λ` sampling for fits, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub arg_deg: f64,
    pub second_deg: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn lambda_grid(&self) -> LambdaGrid {
        LambdaGrid {
            arg: deg_to_rad(self.arg_deg),
            min: self.min,
            max: self.max,
            count: self.count,
            second_arg: self.second_deg.map(deg_to_rad),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleSpec {
    pub mode: u32,
    pub seed: Option<C64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScattererConfig {
    pub scatterer: RadialScatterer,
    pub cutoff: CutoffProfile,
    pub grid: GridSpec,
    pub jmax: u32,
    pub kmax: u32,
    pub lmax: u32,
    pub f_mode: u32,
    pub f: BumpSpec,
    pub g: BumpSpec,
    pub tune: Option<TuneSpec>,
    pub perturbation: Option<RadialScatterer>,
    pub epsilons: Vec<f64>,
    pub pole: PoleSpec,
    pub phase: PhaseRange,
    pub wave_x: f64,
    pub wave_times: Vec<f64>,
    pub identity_tol: f64,
}

type Raw = BTreeMap<&'static str, (usize, String)>;

fn split_statements(text: &str) -> Result<Raw, ConfigError> {
    let mut raw = Raw::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("");
        for stmt in body.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let Some((k, v)) = stmt.split_once('=') else {
                return Err(ConfigError::new(line_no, stmt, "expected `key = value`"));
            };
            let k = k.trim();
            let Some(&key) = KEYS.iter().find(|&&known| known == k) else {
                return Err(ConfigError::new(line_no, k, "unknown key"));
            };
            if let Some((first, _)) = raw.get(key) {
                return Err(ConfigError::new(
                    line_no,
                    k,
                    format!("duplicate key, first set on line {first}"),
                ));
            }
            raw.insert(key, (line_no, unwrap_value(v.trim()).to_string()));
        }
    }
    Ok(raw)
}

/// TOML-style `"text"` and `[a, b]` are accepted as plain values.
fn unwrap_value(v: &str) -> &str {
    for (a, b) in [('"', '"'), ('[', ']')] {
        if let Some(x) = v.strip_prefix(a).and_then(|x| x.strip_suffix(b)) {
            return x.trim();
        }
    }
    v
}

pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|x| C64::new(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => t.parse::<f64>().ok(),
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(C64::new(0.0, imag(body)?)),
    }
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

struct Reader {
    raw: Raw,
}

impl Reader {
    fn line(&self, key: &str) -> usize {
        self.raw.get(key).map_or(0, |e| e.0)
    }

    fn has(&self, key: &str) -> bool {
        self.raw.contains_key(key)
    }

    fn get<T>(
        &self,
        key: &str,
        what: &str,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<Option<T>, ConfigError> {
        match self.raw.get(key) {
            None => Ok(None),
            Some((line, v)) => parse(v)
                .map(Some)
                .ok_or_else(|| ConfigError::new(*line, key, format!("expected {what}, got `{v}`"))),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key, "a finite number", |v| {
            v.parse::<f64>().ok().filter(|x| x.is_finite())
        })
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let x = self.float(key)?;
        if x.is_some_and(|x| x <= 0.0) {
            return Err(ConfigError::new(self.line(key), key, "must be positive"));
        }
        Ok(x)
    }

    fn uint(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        self.get(key, "a non-negative integer", |v| v.parse().ok())
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(key, "a comma separated list of numbers", |v| {
            v.split(',')
                .map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect()
        })
    }

    fn complexes(&self, key: &str) -> Result<Option<Vec<C64>>, ConfigError> {
        self.get(key, "a comma separated list of complex numbers", |v| {
            v.split(',').map(parse_complex).collect()
        })
    }

    fn breaks(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let b = self.floats(key)?;
        if let Some(b) = &b {
            if b[0] <= 0.0 || b.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::new(
                    self.line(key),
                    key,
                    "breakpoints not increasing",
                ));
            }
        }
        Ok(b)
    }

    fn required<T>(&self, v: Option<T>, key: &str, ctx: &str) -> Result<T, ConfigError> {
        v.ok_or_else(|| ConfigError::new(0, key, format!("required for {ctx}")))
    }

    fn forbid(&self, keys: &[&str], ctx: &str) -> Result<(), ConfigError> {
        match keys.iter().find(|k| self.has(k)) {
            Some(k) => Err(ConfigError::new(
                self.line(k),
                k,
                format!("not valid for {ctx}"),
            )),
            None => Ok(()),
        }
    }

    fn potential(&self, bkey: &str, vkey: &str) -> Result<RadialScatterer, ConfigError> {
        let breaks = self.required(self.breaks(bkey)?, bkey, "a potential")?;
        let values = self.required(self.complexes(vkey)?, vkey, "a potential")?;
        RadialScatterer::potential(breaks, values).map_err(|e| self.scatterer_error(e, vkey))
    }

    fn scatterer_error(&self, e: ScattererError, key: &str) -> ConfigError {
        ConfigError::new(self.line(key), key, e.to_string())
    }
}

impl ScattererConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let r = Reader {
            raw: split_statements(text)?,
        };
        // validate the breakpoints first so their error wins over missing keys
        r.breaks("breaks")?;
        r.breaks("perturb.breaks")?;

        let kind = r.raw.get("kind").map_or("potential", |e| e.1.as_str());
        let scatterer = match kind {
            "free" => {
                r.forbid(
                    &["breaks", "values", "radius", "bc", "tune.mode"],
                    "kind = free",
                )?;
                RadialScatterer::free()
            }
            "potential" => {
                r.forbid(&["radius", "bc"], "kind = potential")?;
                r.potential("breaks", "values")?
            }
            "disk" => {
                r.forbid(&["breaks", "values", "tune.mode"], "kind = disk")?;
                let radius = r.required(r.positive("radius")?, "radius", "a disk")?;
                let bc = match r.raw.get("bc").map(|e| e.1.as_str()) {
                    Some("dirichlet") => BoundaryCondition::Dirichlet,
                    Some("neumann") => BoundaryCondition::Neumann,
                    Some(other) => {
                        return Err(ConfigError::new(
                            r.line("bc"),
                            "bc",
                            format!("expected dirichlet or neumann, got `{other}`"),
                        ))
                    }
                    None => return Err(ConfigError::new(0, "bc", "required for a disk")),
                };
                RadialScatterer::disk(radius, bc).map_err(|e| r.scatterer_error(e, "radius"))?
            }
            other => {
                return Err(ConfigError::new(
                    r.line("kind"),
                    "kind",
                    format!("expected potential, disk or free, got `{other}`"),
                ))
            }
        };

        let default_cut = CutoffProfile::for_scatterer(&scatterer);
        let cutoff = CutoffProfile::new(
            r.float("cutoff.r0")?.unwrap_or(default_cut.r0),
            r.float("cutoff.width")?.unwrap_or(default_cut.width),
        )
        .map_err(|e| r.scatterer_error(e, "cutoff.r0"))?;
        cutoff
            .check(&scatterer)
            .map_err(|e| r.scatterer_error(e, "cutoff.r0"))?;

        let second_deg = match r.raw.get("grid.secondDeg") {
            Some((_, v)) if v == "none" => None,
            Some(_) => r.float("grid.secondDeg")?,
            None => Some(90.0),
        };
        let grid = GridSpec {
            arg_deg: r.float("grid.argDeg")?.unwrap_or(45.0),
            second_deg,
            min: r.positive("grid.min")?.unwrap_or(1e-6),
            max: r.positive("grid.max")?.unwrap_or(1e-2),
            count: r.uint("grid.count")?.map_or(24, |c| c as usize),
        };
        grid.lambda_grid().validate().map_err(|e| {
            ConfigError::new(
                r.line("grid.min").max(r.line("grid.count")),
                "grid",
                e.to_string(),
            )
        })?;

        let lmax = r.uint("lmax")?.unwrap_or(8);
        if lmax < 2 {
            return Err(ConfigError::new(
                r.line("lmax"),
                "lmax",
                "must be at least 2",
            ));
        }

        let bump = |p: &str, lo: f64, hi: f64| -> Result<BumpSpec, ConfigError> {
            let (ik, ok) = (format!("{p}.inner"), format!("{p}.outer"));
            let inner = r.float(&ik)?.unwrap_or(lo);
            let outer = r.float(&ok)?.unwrap_or(hi);
            if inner < 0.0 || outer <= inner {
                return Err(ConfigError::new(
                    r.line(&ik).max(r.line(&ok)),
                    &ik,
                    "need 0 <= inner < outer",
                ));
            }
            Ok(BumpSpec { inner, outer })
        };
        // f on (a, r0) and g on its outer half, a just outside any obstacle
        let start = scatterer.inner_radius();
        let a = if start > 0.0 { start + 0.1 } else { 0.0 };
        let f = bump("f", a, cutoff.r0)?;
        let g = bump("g", 0.5 * (a + cutoff.r0), cutoff.r0)?;
        if f.inner < start || g.inner < start {
            let k = if f.inner < start {
                "f.inner"
            } else {
                "g.inner"
            };
            return Err(ConfigError::new(
                r.line(k),
                k,
                "bump reaches inside the obstacle",
            ));
        }

        let tune = match r.uint("tune.mode")? {
            None => {
                r.forbid(&["tune.lo", "tune.hi"], "missing tune.mode")?;
                None
            }
            Some(mode) => {
                let lo = r.required(r.float("tune.lo")?, "tune.lo", "tuning")?;
                let hi = r.required(r.float("tune.hi")?, "tune.hi", "tuning")?;
                if hi <= lo {
                    return Err(ConfigError::new(
                        r.line("tune.hi"),
                        "tune.hi",
                        "must exceed tune.lo",
                    ));
                }
                Some(TuneSpec { mode, lo, hi })
            }
        };

        let perturbation = if r.has("perturb.breaks") || r.has("perturb.values") {
            Some(r.potential("perturb.breaks", "perturb.values")?)
        } else {
            None
        };

        let pole = PoleSpec {
            mode: r.uint("pole.mode")?.unwrap_or(0),
            seed: r.get("pole.seed", "a complex number", parse_complex)?,
            radius: r.positive("pole.radius")?.unwrap_or(0.3),
        };

        let phase = PhaseRange {
            min: r.positive("phase.min")?.unwrap_or(1e-6),
            max: r.positive("phase.max")?.unwrap_or(1.0),
            count: r.uint("phase.count")?.map_or(61, |c| c as usize),
        };
        if phase.count == 0 || phase.max < phase.min {
            return Err(ConfigError::new(
                r.line("phase.count"),
                "phase",
                "need count >= 1 and min <= max",
            ));
        }

        let wave_times = r
            .floats("wave.times")?
            .unwrap_or_else(|| vec![1e2, 1e3, 1e4]);
        if wave_times.iter().any(|&t| t <= 0.0) {
            return Err(ConfigError::new(
                r.line("wave.times"),
                "wave.times",
                "times must be positive",
            ));
        }

        Ok(Self {
            scatterer,
            cutoff,
            grid,
            jmax: r.uint("fit.jmax")?.unwrap_or(2),
            kmax: r.uint("fit.kmax")?.unwrap_or(2),
            lmax,
            f_mode: r.uint("f.mode")?.unwrap_or(0),
            f,
            g,
            tune,
            perturbation,
            epsilons: r.floats("epsilons")?.unwrap_or_default(),
            pole,
            phase,
            wave_x: r.float("wave.x")?.unwrap_or(0.0),
            wave_times,
            identity_tol: r.positive("tol.identity")?.unwrap_or(1e-6),
        })
    }

    /// Canonical text; every key is written out explicitly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let list = |xs: &[f64]| {
            xs.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let clist = |zs: &[C64]| {
            zs.iter()
                .map(|&z| format_complex(z))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match &self.scatterer {
            RadialScatterer::PiecewisePotential { breaks, .. } if breaks.is_empty() => {
                put("kind", "free".into())
            }
            RadialScatterer::PiecewisePotential { breaks, values } => {
                put("kind", "potential".into());
                put("breaks", list(breaks));
                put("values", clist(values));
            }
            RadialScatterer::DiskObstacle { radius, bc } => {
                put("kind", "disk".into());
                put("radius", format!("{radius:?}"));
                put(
                    "bc",
                    match bc {
                        BoundaryCondition::Dirichlet => "dirichlet",
                        BoundaryCondition::Neumann => "neumann",
                    }
                    .into(),
                );
            }
        }
        put("cutoff.r0", format!("{:?}", self.cutoff.r0));
        put("cutoff.width", format!("{:?}", self.cutoff.width));
        put("grid.argDeg", format!("{:?}", self.grid.arg_deg));
        put(
            "grid.secondDeg",
            self.grid
                .second_deg
                .map_or("none".into(), |a| format!("{a:?}")),
        );
        put("grid.min", format!("{:?}", self.grid.min));
        put("grid.max", format!("{:?}", self.grid.max));
        put("grid.count", self.grid.count.to_string());
        put("fit.jmax", self.jmax.to_string());
        put("fit.kmax", self.kmax.to_string());
        put("lmax", self.lmax.to_string());
        put("f.mode", self.f_mode.to_string());
        put("f.inner", format!("{:?}", self.f.inner));
        put("f.outer", format!("{:?}", self.f.outer));
        put("g.inner", format!("{:?}", self.g.inner));
        put("g.outer", format!("{:?}", self.g.outer));
        if let Some(t) = &self.tune {
            put("tune.mode", t.mode.to_string());
            put("tune.lo", format!("{:?}", t.lo));
            put("tune.hi", format!("{:?}", t.hi));
        }
        if let Some(RadialScatterer::PiecewisePotential { breaks, values }) = &self.perturbation {
            put("perturb.breaks", list(breaks));
            put("perturb.values", clist(values));
        }
        if !self.epsilons.is_empty() {
            put("epsilons", list(&self.epsilons));
        }
        put("pole.mode", self.pole.mode.to_string());
        if let Some(z) = self.pole.seed {
            put("pole.seed", format_complex(z));
        }
        put("pole.radius", format!("{:?}", self.pole.radius));
        put("phase.min", format!("{:?}", self.phase.min));
        put("phase.max", format!("{:?}", self.phase.max));
        put("phase.count", self.phase.count.to_string());
        put("wave.x", format!("{:?}", self.wave_x));
        put("wave.times", list(&self.wave_times));
        put("tol.identity", format!("{:?}", self.identity_tol));
        out
    }

    /// The scatterer after optional threshold tuning of its overall scale.
    pub fn resolved_scatterer(&self) -> Result<RadialScatterer, crate::threshold::ThresholdError> {
        let Some(t) = &self.tune else {
            return Ok(self.scatterer.clone());
        };
        let RadialScatterer::PiecewisePotential { breaks, values } = &self.scatterer else {
            return Ok(self.scatterer.clone());
        };
        let build = |c: f64| {
            RadialScatterer::potential(breaks.clone(), values.iter().map(|v| v * c).collect())
                .expect("scaling keeps a valid potential")
        };
        let c = crate::threshold::tune_threshold(build, t.mode, t.lo, t.hi)?;
        Ok(build(c))
    }
}

/// Exact for the right angle and its halves.
fn deg_to_rad(d: f64) -> f64 {
    match d {
        45.0 => PI / 4.0,
        90.0 => PI / 2.0,
        _ => d.to_radians(),
    }
}

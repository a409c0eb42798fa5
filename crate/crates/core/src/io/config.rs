//! Flat `key = value` configuration files.
//!
//! One numeric entry per line, `#` starts a comment, blank lines are
//! ignored. Lengths are mm, speeds mm/s, times s, angles degrees.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{DesignParams, RequirementSpec, TUBE_INNER_RADIUS};
use crate::profile::ConicProfile;

const DESIGN_KEYS: &[&str] = &["l", "k", "r", "alpha", "eta", "Z", "scale", "tube_inner_radius"];
const REQUIREMENT_KEYS: &[&str] = &[
    "max_tip_speed",
    "target_pitch",
    "max_pitch",
    "min_area",
    "max_duration",
    "target_duration",
    "max_height_change",
    "max_inclination_deg",
    "hard_max_inclination_deg",
    "nominal_tip_distance",
    "max_tip_distance",
];
const PROFILE_KEYS: &[&str] = &["A", "B", "C", "s_max", "f_max"];

/// Parsed entries in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub path: PathBuf,
    pub entries: Vec<(String, f64)>,
}

impl Config {
    pub fn parse(text: &str, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut entries: Vec<(String, f64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: path.clone(),
                line: i + 1,
                msg,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(err(format!("bad key `{key}`")));
            }
            if !DESIGN_KEYS
                .iter()
                .chain(REQUIREMENT_KEYS)
                .chain(PROFILE_KEYS)
                .any(|k| *k == key)
            {
                return Err(err(format!("unknown key `{key}`")));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("`{}` is not a number", value.trim())))?;
            if !value.is_finite() {
                return Err(err(format!("`{key}` must be finite")));
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            entries.push((key.to_string(), value));
        }
        Ok(Self { path, entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    pub fn set(&mut self, key: &str, value: f64) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    /// Renders the entries so that parsing the text gives them back exactly.
    pub fn render(&self, header: &str) -> String {
        let mut out = String::new();
        for line in header.lines() {
            let _ = writeln!(out, "# {line}");
        }
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v:?}");
        }
        out
    }
}

/// Mechanism constants plus the tube radius, which has a fixed default but
/// may be overridden per file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignConfig {
    pub params: DesignParams,
    /// Unity-scale tube inner radius (mm).
    pub tube_inner_radius: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            params: DesignParams::default(),
            tube_inner_radius: TUBE_INNER_RADIUS,
        }
    }
}

impl DesignConfig {
    /// Missing keys take their default values.
    pub fn from_config(c: &Config) -> Result<Self> {
        let d = DesignParams::default();
        let params = DesignParams {
            l: c.get_or("l", d.l),
            k: c.get_or("k", d.k),
            r: c.get_or("r", d.r),
            alpha: c.get_or("alpha", d.alpha),
            eta: c.get_or("eta", d.eta),
            z_max: c.get_or("Z", d.z_max),
            scale: c.get_or("scale", d.scale),
        };
        params.validate()?;
        let tube_inner_radius = c.get_or("tube_inner_radius", TUBE_INNER_RADIUS);
        if !(tube_inner_radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tube_inner_radius must be > 0, got {tube_inner_radius}"
            )));
        }
        Ok(Self {
            params,
            tube_inner_radius,
        })
    }

    pub fn to_config(&self) -> Config {
        let p = &self.params;
        let mut c = Config::default();
        for (k, v) in [
            ("l", p.l),
            ("k", p.k),
            ("r", p.r),
            ("alpha", p.alpha),
            ("eta", p.eta),
            ("Z", p.z_max),
            ("scale", p.scale),
            ("tube_inner_radius", self.tube_inner_radius),
        ] {
            c.set(k, v);
        }
        c
    }
}

pub fn requirements_from_config(c: &Config) -> Result<RequirementSpec> {
    let d = RequirementSpec::default();
    let req = RequirementSpec {
        max_tip_speed: c.get_or("max_tip_speed", d.max_tip_speed),
        target_pitch: c.get_or("target_pitch", d.target_pitch),
        max_pitch: c.get_or("max_pitch", d.max_pitch),
        min_area: c.get_or("min_area", d.min_area),
        max_duration: c.get_or("max_duration", d.max_duration),
        target_duration: c.get_or("target_duration", d.target_duration),
        max_height_change: c.get_or("max_height_change", d.max_height_change),
        max_inclination_deg: c.get_or("max_inclination_deg", d.max_inclination_deg),
        hard_max_inclination_deg: c.get_or("hard_max_inclination_deg", d.hard_max_inclination_deg),
        nominal_tip_distance: c.get_or("nominal_tip_distance", d.nominal_tip_distance),
        max_tip_distance: c.get_or("max_tip_distance", d.max_tip_distance),
    };
    req.validate()?;
    Ok(req)
}

pub fn requirements_to_config(req: &RequirementSpec) -> Config {
    let mut c = Config::default();
    for (k, v) in [
        ("max_tip_speed", req.max_tip_speed),
        ("target_pitch", req.target_pitch),
        ("max_pitch", req.max_pitch),
        ("min_area", req.min_area),
        ("max_duration", req.max_duration),
        ("target_duration", req.target_duration),
        ("max_height_change", req.max_height_change),
        ("max_inclination_deg", req.max_inclination_deg),
        ("hard_max_inclination_deg", req.hard_max_inclination_deg),
        ("nominal_tip_distance", req.nominal_tip_distance),
        ("max_tip_distance", req.max_tip_distance),
    ] {
        c.set(k, v);
    }
    c
}

/// `A`, `B`, `C` and `s_max` are required; `f_max` is recomputed.
pub fn profile_from_config(c: &Config) -> Result<ConicProfile> {
    let need = |key: &str| {
        c.get(key).ok_or_else(|| Error::Parse {
            path: c.path.clone(),
            line: 0,
            msg: format!("missing profile key `{key}`"),
        })
    };
    let p = ConicProfile::new(need("A")?, need("B")?, need("C")?, need("s_max")?);
    p.validate()?;
    Ok(p)
}

pub fn profile_to_config(p: &ConicProfile) -> Config {
    let mut c = Config::default();
    c.set("A", p.a);
    c.set("B", p.b);
    c.set("C", p.c);
    c.set("s_max", p.s_max);
    c.set("f_max", p.f_max);
    c
}

pub const PROFILE_HEADER: &str = "cone face profile f'(s) = A s^2 + B s + C\n\
                                  A in 1/mm, B dimensionless, C, s_max and f_max in mm";

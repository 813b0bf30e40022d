//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use ramsey_tg::specfn::{DEFAULT_NODES, DEFAULT_SEPARATION_MULT, DEFAULT_WIDTH_MULT};
use ramsey_tg::tgmap::DEFAULT_CONTACT_EPS;
use ramsey_tg::PhysicsConfig;

use crate::error::CliError;

/// Every accepted key, in emission order, with a short description.
pub const KEYS: &[(&str, &str)] = &[
    ("mass", "atomic mass, kg (> 0)"),
    ("omega", "preparation-trap angular frequency, rad/s (> 0)"),
    ("x0", "trap centre, m (< 0)"),
    ("v0", "launch speed, m/s (> 0)"),
    ("l", "field-region length, m (> 0)"),
    ("L", "free-flight length between fields, m (>= 0)"),
    ("rabi", "Rabi frequency, rad/s (>= 0)"),
    ("N", "number of atoms (>= 1)"),
    ("delta_min", "lowest detuning of the scan, rad/s"),
    ("delta_max", "highest detuning of the scan, rad/s (>= delta_min)"),
    ("delta_count", "number of scan points (>= 1; >= 2 for noise)"),
    ("noise_step", "detuning step of the noise scan, rad/s (> 0)"),
    ("nodes", "k-grid nodes (>= 64)"),
    ("width_mult", "k-grid half-width multiplier (> 0)"),
    ("per_level", "emit p_n columns in fringe output (true/false)"),
    ("tau", "time-domain pulse duration, s (> 0)"),
    ("T", "time-domain dark duration, s (>= 0)"),
    ("x0_guard", "minimum |x0|/delta_N before warning (>= 0)"),
    ("density_points", "x samples of the tg-density output (>= 2)"),
    ("density_halfwidth", "half-width of the tg-density window, m (> 0)"),
    ("well_steps", "number of widths 10^-1..10^-n in wellimit (>= 2)"),
    ("contact_eps", "one-sided contact offset in internal lengths (> 0)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fringe,
    TimeDomain,
    Noise,
    TgDensity,
    Collision,
    WellLimit,
}

impl Scenario {
    pub const NAMES: &'static str = "fringe | timedomain | noise | tg-density | collision | wellimit";

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "fringe" => Scenario::Fringe,
            "timedomain" => Scenario::TimeDomain,
            "noise" => Scenario::Noise,
            "tg-density" => Scenario::TgDensity,
            "collision" => Scenario::Collision,
            "wellimit" => Scenario::WellLimit,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown scenario `{other}`; expected one of {}",
                    Self::NAMES
                )))
            }
        })
    }
}

/// Fully resolved configuration (SI at the boundary).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub physics: PhysicsConfig,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_count: usize,
    pub noise_step: f64,
    pub nodes: usize,
    pub width_mult: f64,
    pub per_level: bool,
    pub tau: f64,
    pub dark_time: f64,
    pub x0_guard: f64,
    pub density_points: usize,
    pub density_halfwidth: f64,
    pub well_steps: usize,
    pub contact_eps: f64,
}

/// Raw `key -> value` text collected from a file and flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let mut raw = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("line {}: expected `key = value`, got `{line}`", no + 1))
            })?;
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::UnknownKey {
                key: key.to_string(),
                accepted: KEYS.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", "),
            });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Later values win.
    pub fn merge(&mut self, other: &RawConfig) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn get(&self, key: &'static str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

fn range_of(key: &str) -> &'static str {
    KEYS.iter().find(|(k, _)| *k == key).map_or("", |(_, d)| d)
}

fn number(raw: &RawConfig, key: &'static str, default: f64) -> Result<f64, CliError> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::BadValue {
                key,
                value: v.to_string(),
                expected: range_of(key),
            }),
    }
}

fn count(raw: &RawConfig, key: &'static str, default: usize) -> Result<usize, CliError> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v.parse::<usize>().map_err(|_| CliError::BadValue {
            key,
            value: v.to_string(),
            expected: range_of(key),
        }),
    }
}

fn flag(raw: &RawConfig, key: &'static str, default: bool) -> Result<bool, CliError> {
    match raw.get(key) {
        None => Ok(default),
        Some("true") | Some("1") => Ok(true),
        Some("false") | Some("0") => Ok(false),
        Some(v) => Err(CliError::BadValue {
            key,
            value: v.to_string(),
            expected: range_of(key),
        }),
    }
}

fn require(ok: bool, key: &'static str, value: impl ToString) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::OutOfRange {
            key,
            value: value.to_string(),
            expected: range_of(key),
        })
    }
}

/// Resolves defaults and checks every invariant.
pub fn parse_config(raw: &RawConfig) -> Result<RunConfig, CliError> {
    let base = PhysicsConfig::default();
    let mass = number(raw, "mass", base.mass)?;
    let n_atoms = count(raw, "N", base.n_atoms)?;
    require(mass > 0.0, "mass", mass)?;
    require((1..=10_000).contains(&n_atoms), "N", n_atoms)?;
    let default_omega = ramsey_tg::units::trap_omega_for_width(
        mass,
        10,
        ramsey_tg::units::DEFAULT_DELTA_N,
    );
    let omega = number(raw, "omega", default_omega)?;
    let v0 = number(raw, "v0", base.v0)?;
    let l = number(raw, "l", base.l)?;
    let gap = number(raw, "L", base.gap)?;
    let x0 = number(raw, "x0", base.x0)?;
    require(omega > 0.0, "omega", omega)?;
    require(v0 > 0.0, "v0", v0)?;
    require(l > 0.0, "l", l)?;
    require(gap >= 0.0, "L", gap)?;
    require(x0 < 0.0, "x0", x0)?;
    let tau_field = l / v0;
    let rabi = number(raw, "rabi", PI / 2.0 / tau_field)?;
    require(rabi >= 0.0, "rabi", rabi)?;
    let flight = gap / v0;

    let physics = PhysicsConfig {
        mass,
        trap_omega: omega,
        x0,
        v0,
        l,
        gap,
        rabi,
        detuning: 0.0,
        n_atoms,
    };

    let span = if flight > 0.0 { PI / flight } else { PI / tau_field };
    let delta_min = number(raw, "delta_min", -span)?;
    let delta_max = number(raw, "delta_max", span)?;
    require(delta_max >= delta_min, "delta_max", delta_max)?;
    let delta_count = count(raw, "delta_count", 201)?;
    require(delta_count >= 1, "delta_count", delta_count)?;
    require(
        delta_count == 1 || delta_max > delta_min,
        "delta_max",
        delta_max,
    )?;
    let noise_step = number(raw, "noise_step", span / 200.0)?;
    require(noise_step > 0.0, "noise_step", noise_step)?;
    let nodes = count(raw, "nodes", DEFAULT_NODES)?;
    require(nodes >= 64, "nodes", nodes)?;
    let width_mult = number(raw, "width_mult", DEFAULT_WIDTH_MULT)?;
    require(width_mult > 0.0, "width_mult", width_mult)?;
    let per_level = flag(raw, "per_level", false)?;
    let tau = number(raw, "tau", tau_field)?;
    require(tau > 0.0, "tau", tau)?;
    let dark_time = number(raw, "T", flight)?;
    require(dark_time >= 0.0, "T", dark_time)?;
    let x0_guard = number(raw, "x0_guard", DEFAULT_SEPARATION_MULT)?;
    require(x0_guard >= 0.0, "x0_guard", x0_guard)?;
    let density_points = count(raw, "density_points", 401)?;
    require(density_points >= 2, "density_points", density_points)?;
    let delta_n = ((n_atoms as f64 + 0.5) * ramsey_tg::HBAR / (mass * omega)).sqrt();
    let density_halfwidth = number(raw, "density_halfwidth", 2.0 * delta_n)?;
    require(density_halfwidth > 0.0, "density_halfwidth", density_halfwidth)?;
    let well_steps = count(raw, "well_steps", 6)?;
    require((2..=15).contains(&well_steps), "well_steps", well_steps)?;
    let contact_eps = number(raw, "contact_eps", DEFAULT_CONTACT_EPS)?;
    require(contact_eps > 0.0, "contact_eps", contact_eps)?;

    Ok(RunConfig {
        physics,
        delta_min,
        delta_max,
        delta_count,
        noise_step,
        nodes,
        width_mult,
        per_level,
        tau,
        dark_time,
        x0_guard,
        density_points,
        density_halfwidth,
        well_steps,
        contact_eps,
    })
}

impl RunConfig {
    /// Emits every key; parsing the result reproduces this configuration exactly.
    pub fn to_config_text(&self) -> String {
        let p = &self.physics;
        let f = |x: f64| format!("{x:.16e}");
        let entries: Vec<(&str, String)> = vec![
            ("mass", f(p.mass)),
            ("omega", f(p.trap_omega)),
            ("x0", f(p.x0)),
            ("v0", f(p.v0)),
            ("l", f(p.l)),
            ("L", f(p.gap)),
            ("rabi", f(p.rabi)),
            ("N", p.n_atoms.to_string()),
            ("delta_min", f(self.delta_min)),
            ("delta_max", f(self.delta_max)),
            ("delta_count", self.delta_count.to_string()),
            ("noise_step", f(self.noise_step)),
            ("nodes", self.nodes.to_string()),
            ("width_mult", f(self.width_mult)),
            ("per_level", self.per_level.to_string()),
            ("tau", f(self.tau)),
            ("T", f(self.dark_time)),
            ("x0_guard", f(self.x0_guard)),
            ("density_points", self.density_points.to_string()),
            ("density_halfwidth", f(self.density_halfwidth)),
            ("well_steps", self.well_steps.to_string()),
            ("contact_eps", f(self.contact_eps)),
        ];
        let mut out = String::new();
        for (k, v) in entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Resolved values plus derived quantities, as `#` comment lines.
    pub fn header_block(&self) -> String {
        let p = &self.physics;
        let units = p.units();
        let mut out = String::from("# resolved configuration\n");
        for line in self.to_config_text().lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# derived: tau_field = {:.16e} s", p.tau());
        let _ = writeln!(out, "# derived: T_flight = {:.16e} s", p.flight_time());
        let _ = writeln!(out, "# derived: k0 = {:.16e} 1/m", p.k0());
        let _ = writeln!(out, "# derived: delta0 = {:.16e} m", units.length);
        let _ = writeln!(
            out,
            "# derived: delta_N = {:.16e} m",
            units.length * (2.0 * (p.n_atoms as f64 + 0.5)).sqrt()
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let raw = RawConfig::parse_text("# header\n\nl = 0.02  # metres\nN=4\n").unwrap();
        let cfg = parse_config(&raw).unwrap();
        assert_eq!(cfg.physics.l, 0.02);
        assert_eq!(cfg.physics.n_atoms, 4);
    }

    #[test]
    fn malformed_line_is_reported_with_its_number() {
        let err = RawConfig::parse_text("l = 1\nnonsense\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn defaults_track_the_geometry() {
        let raw = RawConfig::parse_text("L = 0.2\nv0 = 0.02").unwrap();
        let cfg = parse_config(&raw).unwrap();
        assert_eq!(cfg.dark_time, 10.0);
        assert_eq!(cfg.delta_max, PI / 10.0);
        assert_eq!(cfg.tau, 0.5);
        assert_eq!(cfg.physics.rabi, PI);
    }

    #[test]
    fn non_numeric_value_names_key() {
        let raw = RawConfig::parse_text("v0 = fast").unwrap();
        let err = parse_config(&raw).unwrap_err().to_string();
        assert!(err.contains("`v0`") && err.contains("> 0"), "{err}");
    }

    #[test]
    fn inverted_scan_is_rejected() {
        let raw = RawConfig::parse_text("delta_min = 1\ndelta_max = -1").unwrap();
        assert!(matches!(
            parse_config(&raw),
            Err(CliError::OutOfRange { key: "delta_max", .. })
        ));
    }
}

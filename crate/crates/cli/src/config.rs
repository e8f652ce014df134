//! Flat `key = value` scenario files.
//!
//! Lines starting with `#` are comments. Output files echo the resolved
//! configuration as `#@ key = value` lines; when a file contains any such
//! line only those are read, so a CSV written by this tool is itself a valid
//! config for reproducing it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use planargeo::{FieldModel, FieldParams, ModelKind, TransverseMomenta};

use crate::CliError;

/// Every key the tool understands.
pub const KEYS: &[&str] = &[
    "kind",
    "amplitude",
    "omega",
    "delta",
    "charge_mass_ratio",
    "eta",
    "p_y",
    "p_z",
    "t0",
    "x0",
    "dx_dtau0",
    "j0",
    "dj0",
    "cycles",
    "samples_per_cycle",
    "tol",
    "eta_min",
    "eta_max",
    "step",
    "refine_tol",
    "grid",
    "t_min",
    "t_max",
    "x_min",
    "x_max",
];

/// Marks echoed configuration lines in output files.
pub const ECHO_MARK: &str = "#@";

/// Relative mismatch allowed between a given `eta` and `q E / (m omega)`.
const ETA_CONSISTENCY: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let echoed = text.lines().any(|l| l.starts_with(ECHO_MARK));
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let body = if echoed {
                match line.strip_prefix(ECHO_MARK) {
                    Some(b) => b,
                    None => continue,
                }
            } else {
                line
            };
            let body = body.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected `key = value`, got `{body}`", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = match key {
            "P_y" => "p_y",
            "P_z" => "p_z",
            k => k,
        };
        if !KEYS.contains(&key) {
            return Err(CliError::usage(format!("unknown config key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// `#@ key = value` lines sorted by key, or a bare `#@` when empty so the
    /// output still parses as an (empty) config.
    pub fn echo_lines(&self) -> Vec<String> {
        if self.entries.is_empty() {
            return vec![ECHO_MARK.to_string()];
        }
        self.entries
            .iter()
            .map(|(k, v)| format!("{ECHO_MARK} {k} = {v}"))
            .collect()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("bad value `{v}` for `{key}`: {e}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::usage(format!("missing required key `{key}`")))
    }

    pub fn kind(&self) -> Result<ModelKind, CliError> {
        let kind: String = self.require("kind")?;
        match kind.as_str() {
            "plane_wave" | "plane_wave_elliptic" => Ok(ModelKind::PlaneWaveElliptic),
            "standing_wave" | "standing_wave_linear" => Ok(ModelKind::StandingWaveLinear),
            other => Err(CliError::usage(format!(
                "unknown kind `{other}` (expected plane_wave or standing_wave)"
            ))),
        }
    }

    /// Field parameters from `omega` with either `amplitude` or `eta`; when
    /// both are given they must agree.
    pub fn field_params(&self) -> Result<FieldParams, CliError> {
        let omega: f64 = self.require("omega")?;
        let delta = self.get_or("delta", 0.0)?;
        let qm = self.get_or("charge_mass_ratio", 1.0)?;
        let eta: Option<f64> = self.get("eta")?;
        let amplitude = match (self.get::<f64>("amplitude")?, eta) {
            (Some(a), _) => a,
            (None, Some(eta)) => eta * omega / qm,
            (None, None) => return Err(CliError::usage("missing required key `amplitude` (or `eta`)")),
        };
        let params = FieldParams::new(amplitude, omega, delta, qm).map_err(CliError::usage_from)?;
        if let Some(eta) = eta {
            check_eta(eta, params.eta())?;
        }
        Ok(params)
    }

    /// Impulse factor from `eta`, or derived from the field parameters.
    pub fn eta(&self) -> Result<f64, CliError> {
        let given: Option<f64> = self.get("eta")?;
        if self.contains("amplitude") {
            let derived = self.field_params()?.eta();
            if let Some(eta) = given {
                check_eta(eta, derived)?;
            }
            return Ok(derived);
        }
        given.ok_or_else(|| CliError::usage("missing required key `eta` (or `amplitude` and `omega`)"))
    }

    pub fn momenta(&self) -> Result<TransverseMomenta, CliError> {
        Ok(TransverseMomenta::new(self.get_or("p_y", 0.0)?, self.get_or("p_z", 0.0)?))
    }

    pub fn field_model(&self) -> Result<FieldModel, CliError> {
        let params = self.field_params()?;
        match self.kind()? {
            ModelKind::PlaneWaveElliptic => FieldModel::plane_wave(params),
            _ => FieldModel::standing_wave(params),
        }
        .map_err(CliError::usage_from)
    }

    /// Scenario for field-based commands.
    pub fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let model = self.field_model()?;
        let cycles: f64 = self.get_or("cycles", 10.0)?;
        if !(cycles.is_finite() && cycles >= 0.0) {
            return Err(CliError::usage(format!("`cycles` must be finite and >= 0, got {cycles}")));
        }
        Ok(ScenarioConfig {
            kind: model.kind(),
            params: *model.params(),
            momenta: self.momenta()?,
            t0: self.get_or("t0", 0.0)?,
            x0: self.get_or("x0", 0.0)?,
            dx_dtau0: self.get_or("dx_dtau0", 0.0)?,
            cycles,
            samples_per_cycle: self.samples_per_cycle()?,
            tol: self.tol(1e-12)?,
        })
    }

    pub fn samples_per_cycle(&self) -> Result<usize, CliError> {
        let n = self.get_or("samples_per_cycle", planargeo::dynamics::DEFAULT_SAMPLES_PER_CYCLE)?;
        if n == 0 {
            return Err(CliError::usage("`samples_per_cycle` must be positive"));
        }
        Ok(n)
    }

    pub fn tol(&self, default: f64) -> Result<f64, CliError> {
        let tol = self.get_or("tol", default)?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::usage(format!("`tol` must lie in (0, 1), got {tol}")));
        }
        Ok(tol)
    }
}

fn check_eta(given: f64, derived: f64) -> Result<(), CliError> {
    if (given - derived).abs() > ETA_CONSISTENCY * derived.abs().max(1.0) {
        return Err(CliError::usage(format!(
            "`eta` = {given} contradicts q E / (m omega) = {derived}"
        )));
    }
    Ok(())
}

/// Resolved inputs of the field-based commands.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ModelKind,
    pub params: FieldParams,
    pub momenta: TransverseMomenta,
    pub t0: f64,
    pub x0: f64,
    pub dx_dtau0: f64,
    /// Run length in optical cycles of proper time.
    pub cycles: f64,
    pub samples_per_cycle: usize,
    pub tol: f64,
}

impl ScenarioConfig {
    pub fn model(&self) -> FieldModel {
        match self.kind {
            ModelKind::PlaneWaveElliptic => FieldModel::PlaneWaveElliptic(self.params),
            _ => FieldModel::StandingWaveLinear(self.params),
        }
    }
}

//! Run configuration: JSON on disk, `key=value` overrides on the command line.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use unidir_core::ParamSpec;

use crate::Failure;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_d_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_m_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_over_2pi_hz: Option<f64>,
    #[serde(rename = "J_over_2pi_hz", skip_serializing_if = "Option::is_none")]
    pub j_over_2pi_hz: Option<f64>,
    #[serde(rename = "Delta1_over_2pi_hz", skip_serializing_if = "Option::is_none")]
    pub delta1_over_2pi_hz: Option<f64>,
    #[serde(rename = "Delta2_over_2pi_hz", skip_serializing_if = "Option::is_none")]
    pub delta2_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa1_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa1_e_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa1_o_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa2_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa2_e_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa2_o_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_eff_over_2pi_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_over_2pi_hz: Option<f64>,
}

impl ParamsConfig {
    pub fn to_spec(&self) -> ParamSpec {
        ParamSpec {
            omega_d_hz: self.omega_d_over_2pi_hz,
            omega_m_hz: self.omega_m_over_2pi_hz,
            gamma_m_hz: self.gamma_m_over_2pi_hz,
            g_hz: self.g_over_2pi_hz,
            j_hz: self.j_over_2pi_hz,
            delta1_hz: self.delta1_over_2pi_hz,
            delta2_hz: self.delta2_over_2pi_hz,
            kappa1_hz: self.kappa1_over_2pi_hz,
            kappa1_e_hz: self.kappa1_e_over_2pi_hz,
            kappa1_o_hz: self.kappa1_o_over_2pi_hz,
            kappa2_hz: self.kappa2_over_2pi_hz,
            kappa2_e_hz: self.kappa2_e_over_2pi_hz,
            kappa2_o_hz: self.kappa2_o_over_2pi_hz,
            kappa_eff_hz: self.kappa_eff_over_2pi_hz,
            gain_hz: self.gain_over_2pi_hz,
        }
    }

    pub fn from_spec(s: &ParamSpec) -> Self {
        Self {
            omega_d_over_2pi_hz: s.omega_d_hz,
            omega_m_over_2pi_hz: s.omega_m_hz,
            gamma_m_over_2pi_hz: s.gamma_m_hz,
            g_over_2pi_hz: s.g_hz,
            j_over_2pi_hz: s.j_hz,
            delta1_over_2pi_hz: s.delta1_hz,
            delta2_over_2pi_hz: s.delta2_hz,
            kappa1_over_2pi_hz: s.kappa1_hz,
            kappa1_e_over_2pi_hz: s.kappa1_e_hz,
            kappa1_o_over_2pi_hz: s.kappa1_o_hz,
            kappa2_over_2pi_hz: s.kappa2_hz,
            kappa2_e_over_2pi_hz: s.kappa2_e_hz,
            kappa2_o_over_2pi_hz: s.kappa2_o_hz,
            kappa_eff_over_2pi_hz: s.kappa_eff_hz,
            gain_over_2pi_hz: s.gain_hz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Lin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p_min_w: f64,
    pub p_max_w: f64,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub n_m: f64,
    pub delta_omega_over_2pi_hz: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    /// Log-spaced powers across the working region.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_n_points() -> usize {
    unidir_core::noise::DEFAULT_NSR_POINTS
}

fn default_samples() -> usize {
    50
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn default_format() -> Format {
    Format::Csv
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub sweep: SweepConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, Failure> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            Failure::Config(format!(
                "{origin}: line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {path}: {e}")))?;
        Self::parse(&text, path)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }

    /// Sweep and output invariants; parameter validity is checked on resolve.
    pub fn check(&self) -> Result<(), Failure> {
        let s = &self.sweep;
        if s.points < 2 {
            return Err(Failure::Config(format!("sweep.points must be at least 2 (got {})", s.points)));
        }
        if !(s.p_min_w.is_finite() && s.p_max_w.is_finite()) || s.p_min_w < 0.0 || s.p_min_w > s.p_max_w {
            return Err(Failure::Config(format!(
                "sweep range must satisfy 0 <= p_min_w <= p_max_w (got {:e}, {:e})",
                s.p_min_w, s.p_max_w
            )));
        }
        if s.spacing == Spacing::Log && s.p_min_w <= 0.0 {
            return Err(Failure::Config("log spacing needs p_min_w > 0".into()));
        }
        let n = &self.noise;
        if !(n.n_m >= 0.0) || !(n.delta_omega_over_2pi_hz >= 0.0) {
            return Err(Failure::Config("noise.n_m and noise.delta_omega_over_2pi_hz must be >= 0".into()));
        }
        if n.n_points < 11 {
            return Err(Failure::Config(format!("noise.n_points must be at least 11 (got {})", n.n_points)));
        }
        if n.samples < 2 {
            return Err(Failure::Config(format!("noise.samples must be at least 2 (got {})", n.samples)));
        }
        Ok(())
    }

    /// Applies `key=value` overrides. Plain keys address `params`; dotted keys
    /// address any section (`sweep.points=801`). `null` removes a parameter.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self, Failure> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut tree = serde_json::to_value(self).expect("config serialises");
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Failure::Config(format!("override '{item}' is not key=value")))?;
            let path: Vec<&str> = if key.contains('.') {
                key.split('.').collect()
            } else {
                vec!["params", key]
            };
            let value: Value =
                serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut tree, &path, value)
                .map_err(|e| Failure::Config(format!("override '{item}': {e}")))?;
        }
        let cfg: RunConfig = serde_json::from_value(tree)
            .map_err(|e| Failure::Config(format!("after overrides: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }
}

fn set_path(tree: &mut Value, path: &[&str], value: Value) -> Result<(), String> {
    let (last, parents) = path.split_last().ok_or("empty key")?;
    let mut node = tree;
    for part in parents {
        node = node
            .get_mut(*part)
            .ok_or_else(|| format!("unknown section '{part}'"))?;
    }
    let obj = node.as_object_mut().ok_or("key does not address an object")?;
    if value.is_null() {
        obj.remove(*last);
    } else {
        obj.insert((*last).to_string(), value);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::FigurePreset;

    #[test]
    fn round_trip_is_lossless() {
        for preset in FigurePreset::ALL {
            let cfg = preset.config();
            let back = RunConfig::parse(&cfg.to_json(), "test").unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn overrides() {
        let cfg = FigurePreset::Fig2b.config();
        let o = cfg
            .with_overrides(&["g_over_2pi_hz=0".into(), "sweep.points=11".into(), "output.format=json".into()])
            .unwrap();
        assert_eq!(o.params.g_over_2pi_hz, Some(0.0));
        assert_eq!(o.sweep.points, 11);
        assert_eq!(o.output.format, Format::Json);
        assert!(matches!(cfg.with_overrides(&["nope=1".into()]), Err(Failure::Config(_))));
        assert!(matches!(cfg.with_overrides(&["sweep.points=1".into()]), Err(Failure::Config(_))));
        assert!(matches!(cfg.with_overrides(&["g_over_2pi_hz".into()]), Err(Failure::Config(_))));
        let removed = cfg.with_overrides(&["kappa_eff_over_2pi_hz=null".into(), "gain_over_2pi_hz=99.8e6".into()]).unwrap();
        assert_eq!(removed.params.kappa_eff_over_2pi_hz, None);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RunConfig::parse("{\n  \"params\": {},\n  \"bogus\": 1\n}", "x.json").unwrap_err();
        let Failure::Config(msg) = err else { panic!() };
        assert!(msg.contains("line 3"), "{msg}");
    }
}

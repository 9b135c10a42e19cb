//! JSON run configuration and its translation into model, set and control
//! objects. Every validation failure names the offending key.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::glv::{GlvParameters, MayLeonardParams, DEFAULT_COEFF_FLOOR};
use crate::sets::{RectangularSet, DEFAULT_POPULATION_FLOOR};
use crate::sizos::ControlBox;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }

    fn lib(key: &str, e: Error) -> Self {
        Self::new(key, e.to_string())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MayLeonardSpec {
    pub alpha: f64,
    pub beta: f64,
}

/// Either `{nl, nu}` (a cube, optionally with `n`) or `{lower, upper}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

/// Either `{al, au}` (the same interval for every control) or `{lower, upper}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub al: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub au: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

/// Sweep window; `x` is `nl` (bounds) or `alpha` (coeffs), `y` is `nu` or `beta`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum MethodChoice {
    ClosedForm,
    Sampled,
    Minimax,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub may_leonard: Option<MayLeonardSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<ControlSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
}

const KEYS: &[&str] = &[
    "n",
    "r",
    "alpha",
    "may_leonard",
    "set",
    "controls",
    "method",
    "resolution",
    "control_resolution",
    "t_end",
    "samples",
    "band_width",
    "nominal",
    "eps1",
    "eps2",
    "window",
];

fn field<T: DeserializeOwned>(map: &Map<String, Value>, key: &str) -> Result<Option<T>, ConfigError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| ConfigError::new(key, e.to_string())),
    }
}

/// A model as written in the config: the May-Leonard shorthand keeps its two
/// coefficients so that the closed-form May-Leonard conditions can be used.
#[derive(Debug, Clone)]
pub enum Model {
    MayLeonard(MayLeonardParams),
    General(GlvParameters),
}

impl Model {
    pub fn params(&self) -> GlvParameters {
        match self {
            Model::MayLeonard(ml) => ml.to_glv(),
            Model::General(p) => p.clone(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Model::MayLeonard(_) => 3,
            Model::General(p) => p.n(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("<document>", e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(ConfigError::new("<document>", "expected a JSON object"));
        };
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(k.clone(), "unknown key"));
        }
        Ok(Self {
            n: field(&map, "n")?,
            r: field(&map, "r")?,
            alpha: field(&map, "alpha")?,
            may_leonard: field(&map, "may_leonard")?,
            set: field(&map, "set")?,
            controls: field(&map, "controls")?,
            method: field(&map, "method")?,
            resolution: field(&map, "resolution")?,
            control_resolution: field(&map, "control_resolution")?,
            t_end: field(&map, "t_end")?,
            samples: field(&map, "samples")?,
            band_width: field(&map, "band_width")?,
            nominal: field(&map, "nominal")?,
            eps1: field(&map, "eps1")?,
            eps2: field(&map, "eps2")?,
            window: field(&map, "window")?,
        })
    }

    pub fn eps1(&self) -> f64 {
        self.eps1.unwrap_or(DEFAULT_COEFF_FLOOR)
    }

    pub fn eps2(&self) -> f64 {
        self.eps2.unwrap_or(DEFAULT_POPULATION_FLOOR)
    }

    pub fn model(&self) -> Result<Model, ConfigError> {
        let model = match (&self.may_leonard, &self.r, &self.alpha) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(ConfigError::new("may_leonard", "give either `may_leonard` or `r`/`alpha`, not both"))
            }
            (Some(ml), None, None) => Model::MayLeonard(
                MayLeonardParams::with_floor(ml.alpha, ml.beta, self.eps1()).map_err(|e| ConfigError::lib("may_leonard", e))?,
            ),
            (None, Some(r), Some(alpha)) => {
                Model::General(GlvParameters::new(r.clone(), alpha.clone()).map_err(|e| ConfigError::lib("alpha", e))?)
            }
            (None, None, Some(_)) => return Err(ConfigError::new("r", "missing growth rates")),
            (None, Some(_), None) => return Err(ConfigError::new("alpha", "missing competition matrix")),
            (None, None, None) => {
                return Err(ConfigError::new("may_leonard", "missing model: give `may_leonard` or `r` and `alpha`"))
            }
        };
        if let Some(n) = self.n {
            if n != model.n() {
                return Err(ConfigError::new("n", format!("n = {n} but the model has {} species", model.n())));
            }
        }
        Ok(model)
    }

    pub fn rect(&self, n: usize) -> Result<RectangularSet, ConfigError> {
        let spec = self.set.as_ref().ok_or_else(|| ConfigError::new("set", "missing state set"))?;
        let rect = match spec {
            SetSpec { nl: Some(nl), nu: Some(nu), lower: None, upper: None, n: sn } => {
                if let Some(sn) = sn {
                    if *sn != n {
                        return Err(ConfigError::new("set.n", format!("set.n = {sn} but the model has {n} species")));
                    }
                }
                RectangularSet::symmetric(n, *nl, *nu)
            }
            SetSpec { nl: None, nu: None, n: None, lower: Some(l), upper: Some(u) } => {
                RectangularSet::new(l.clone(), u.clone())
            }
            _ => return Err(ConfigError::new("set", "expected `{nl, nu}` or `{lower, upper}`")),
        }
        .map_err(|e| ConfigError::lib("set", e))?;
        if rect.dim() != n {
            return Err(ConfigError::new("set", format!("set has dimension {} but the model has {n} species", rect.dim())));
        }
        rect.require_population(self.eps2()).map_err(|e| ConfigError::lib("set", e))?;
        Ok(rect)
    }

    pub fn controls(&self, n: usize) -> Result<ControlBox, ConfigError> {
        let spec = self.controls.as_ref().ok_or_else(|| ConfigError::new("controls", "missing control box"))?;
        let bx = match spec {
            ControlSpec { al: Some(al), au: Some(au), lower: None, upper: None } => ControlBox::uniform(n, *al, *au),
            ControlSpec { al: None, au: None, lower: Some(l), upper: Some(u) } => ControlBox::new(l.clone(), u.clone()),
            _ => return Err(ConfigError::new("controls", "expected `{al, au}` or `{lower, upper}`")),
        }
        .map_err(|e| ConfigError::lib("controls", e))?;
        if bx.len() != n {
            return Err(ConfigError::new("controls", format!("{} controls but the model has {n} species", bx.len())));
        }
        Ok(bx)
    }

    /// `(nl, nu)` when the set is a cube.
    pub fn cube_bounds(&self) -> Option<(f64, f64)> {
        match self.set.as_ref()? {
            SetSpec { nl: Some(nl), nu: Some(nu), .. } => Some((*nl, *nu)),
            SetSpec { lower: Some(l), upper: Some(u), .. } => {
                let same = |v: &[f64]| v.iter().all(|x| *x == v[0]);
                (!l.is_empty() && same(l) && same(u) && l.len() == u.len()).then(|| (l[0], u[0]))
            }
            _ => None,
        }
    }

    /// `(al, au)` when every control has the same interval.
    pub fn uniform_controls(&self) -> Option<(f64, f64)> {
        match self.controls.as_ref()? {
            ControlSpec { al: Some(al), au: Some(au), .. } => Some((*al, *au)),
            ControlSpec { lower: Some(l), upper: Some(u), .. } => {
                let same = |v: &[f64]| v.iter().all(|x| *x == v[0]);
                (!l.is_empty() && same(l) && same(u) && l.len() == u.len()).then(|| (l[0], u[0]))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_may_leonard_cube() {
        let c = Config::from_json(r#"{"may_leonard": {"alpha": 0.2, "beta": 0.05}, "set": {"nl": 0.5, "nu": 2.0}}"#).unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.n(), 3);
        let r = c.rect(3).unwrap();
        assert_eq!(r.upper(), &[2.0, 2.0, 2.0]);
        assert_eq!(c.cube_bounds(), Some((0.5, 2.0)));
    }

    #[test]
    fn general_model_and_box() {
        let c = Config::from_json(
            r#"{"n": 2, "r": [1, -2], "alpha": [[1, -0.5], [0, 2]],
                "set": {"lower": [0.1, 0.2], "upper": [1, 2]},
                "controls": {"lower": [0.5, 1], "upper": [2, 3]}, "method": "both"}"#,
        )
        .unwrap();
        assert_eq!(c.model().unwrap().n(), 2);
        assert_eq!(c.controls(2).unwrap().upper(), &[2.0, 3.0]);
        assert_eq!(c.method, Some(MethodChoice::Both));
        assert_eq!(c.cube_bounds(), None);
    }

    #[test]
    fn errors_name_the_key() {
        let key = |s: &str| Config::from_json(s).unwrap_err().key;
        assert_eq!(key(r#"{"sett": {}}"#), "sett");
        assert_eq!(key(r#"{"method": "fast"}"#), "method");
        assert_eq!(key(r#"{"resolution": -3}"#), "resolution");
        assert_eq!(key("[1]"), "<document>");
        let c = Config::from_json(r#"{"may_leonard": {"alpha": 0.2, "beta": 0.05}}"#).unwrap();
        assert_eq!(c.rect(3).unwrap_err().key, "set");
        assert_eq!(c.controls(3).unwrap_err().key, "controls");
        let c = Config::from_json(r#"{"may_leonard": {"alpha": 0, "beta": 0.05}}"#).unwrap();
        assert_eq!(c.model().unwrap_err().key, "may_leonard");
        let c = Config::from_json(r#"{"n": 4, "may_leonard": {"alpha": 0.2, "beta": 0.05}}"#).unwrap();
        assert_eq!(c.model().unwrap_err().key, "n");
        let c = Config::from_json(r#"{"set": {"nl": 2.0, "nu": 0.5}}"#).unwrap();
        assert_eq!(c.rect(3).unwrap_err().key, "set");
    }

    #[test]
    fn serializes_only_present_keys() {
        let c = Config {
            may_leonard: Some(MayLeonardSpec { alpha: 0.8, beta: 1.3 }),
            ..Default::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"may_leonard":{"alpha":0.8,"beta":1.3}}"#);
        assert_eq!(Config::from_json(&text).unwrap(), c);
    }
}

//! Experiment configuration: JSON files and `key=value` overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;
use serde_json::Value;
use skewrot::squares::Rational;
use skewrot::PlanarPoint;

use crate::error::{HarnessError, HarnessResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Raw parameter text; numbers may be decimals or exact `p/q`.
    pub parameters: BTreeMap<String, String>,
    /// Falls back to the experiment's default when absent.
    pub n_steps: Option<u64>,
    pub seed: u64,
    /// Output files are `<output_prefix>_<name>.<ext>`.
    pub output_prefix: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            parameters: BTreeMap::new(),
            n_steps: None,
            seed: 0,
            output_prefix: None,
        }
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn from_json_str(text: &str) -> HarnessResult<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            experiment: String,
            #[serde(default)]
            parameters: BTreeMap<String, Value>,
            n_steps: Option<u64>,
            #[serde(default)]
            seed: u64,
            output_prefix: Option<PathBuf>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("bad config: {e}")))?;
        let mut parameters = BTreeMap::new();
        for (k, v) in raw.parameters {
            parameters.insert(k.clone(), json_param_text(&k, &v)?);
        }
        Ok(Self {
            experiment: raw.experiment,
            parameters,
            n_steps: raw.n_steps,
            seed: raw.seed,
            output_prefix: raw.output_prefix,
        })
    }

    /// Applies a `key=value` override. `n_steps`, `seed` and `output_prefix`
    /// set the top-level fields; anything else is a parameter.
    pub fn apply_override(&mut self, text: &str) -> HarnessResult<()> {
        let (k, v) = parse_override(text)?;
        match k.as_str() {
            "n_steps" => self.n_steps = Some(parse_u64("n_steps", &v)?),
            "seed" => self.seed = parse_u64("seed", &v)?,
            "output_prefix" => self.output_prefix = Some(PathBuf::from(v)),
            _ => {
                self.parameters.insert(k, v);
            }
        }
        Ok(())
    }
}

fn json_param_text(key: &str, v: &Value) -> HarnessResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        // [x, y] is a point, [[x, y], ...] a list of points
        Value::Array(items) if items.len() == 2 && items.iter().all(Value::is_number) => {
            Ok(format!("({},{})", items[0], items[1]))
        }
        Value::Array(items) => {
            let parts: HarnessResult<Vec<String>> = items.iter().map(|i| json_param_text(key, i)).collect();
            Ok(parts?.join(";"))
        }
        _ => Err(HarnessError::Config(format!("parameter {key}: unsupported value {v}"))),
    }
}

pub fn parse_override(text: &str) -> HarnessResult<(String, String)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override {text:?} is not key=value")))?;
    let k = k.trim();
    if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(HarnessError::Config(format!("bad parameter name {k:?}")));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

pub fn parse_u64(key: &str, text: &str) -> HarnessResult<u64> {
    text.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("{key}: expected a non-negative integer, got {text:?}")))
}

pub fn parse_rational(key: &str, text: &str) -> HarnessResult<Rational> {
    text.parse().map_err(|e| HarnessError::Config(format!("{key}: {e}")))
}

/// Decimal or `p/q`.
pub fn parse_real(key: &str, text: &str) -> HarnessResult<f64> {
    let t = text.trim();
    let v = if t.contains('/') {
        parse_rational(key, t)?.to_f64()
    } else {
        t.parse::<f64>().map_err(|_| HarnessError::Config(format!("{key}: expected a number, got {text:?}")))?
    };
    if !v.is_finite() {
        return Err(HarnessError::Config(format!("{key}: {text:?} is not finite")));
    }
    Ok(v)
}

/// `(x,y)` or `x,y`.
pub fn parse_point(key: &str, text: &str) -> HarnessResult<PlanarPoint> {
    let t = text.trim();
    let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
    let (x, y) = inner
        .split_once(',')
        .ok_or_else(|| HarnessError::Config(format!("{key}: expected (x,y), got {text:?}")))?;
    Ok(PlanarPoint::new(parse_real(key, x)?, parse_real(key, y)?))
}

/// Points separated by `;`.
pub fn parse_points(key: &str, text: &str) -> HarnessResult<Vec<PlanarPoint>> {
    let pts: HarnessResult<Vec<_>> =
        text.split(';').filter(|s| !s.trim().is_empty()).map(|s| parse_point(key, s)).collect();
    let pts = pts?;
    if pts.is_empty() {
        return Err(HarnessError::Config(format!("{key}: no points given")));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_values_become_text() {
        let c = ExperimentConfig::from_json_str(
            r#"{"experiment": "fig4-kam", "parameters": {"h1": 3.8, "a": "1/3", "z0": [[0, 2.419], [0, 3]], "p": [1, 2]},
                "n_steps": 10, "seed": 4}"#,
        )
        .unwrap();
        assert_eq!(c.parameters["h1"], "3.8");
        assert_eq!(c.parameters["a"], "1/3");
        assert_eq!(c.parameters["z0"], "(0,2.419);(0,3)");
        assert_eq!(c.parameters["p"], "(1,2)");
        assert_eq!((c.n_steps, c.seed), (Some(10), 4));
        assert!(ExperimentConfig::from_json_str(r#"{"experiment": "x", "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"experiment": "x", "parameters": {"k": null}}"#).is_err());
    }

    #[test]
    fn overrides() {
        let mut c = ExperimentConfig::new("fig3-oval");
        c.apply_override("h1=2.5").unwrap();
        c.apply_override("n_steps=77").unwrap();
        c.apply_override("seed = 9").unwrap();
        assert_eq!(c.parameters["h1"], "2.5");
        assert_eq!((c.n_steps, c.seed), (Some(77), 9));
        assert!(c.apply_override("novalue").is_err());
        assert!(c.apply_override("=3").is_err());
        assert!(c.apply_override("n_steps=-1").is_err());
    }

    #[test]
    fn numbers_and_points() {
        assert_eq!(parse_real("k", "1/4").unwrap(), 0.25);
        assert_eq!(parse_real("k", "-3e2").unwrap(), -300.0);
        assert!(parse_real("k", "inf").is_err());
        assert_eq!(parse_point("k", "(0, 2.419)").unwrap(), PlanarPoint::new(0.0, 2.419));
        assert_eq!(parse_point("k", "1/2,-1").unwrap(), PlanarPoint::new(0.5, -1.0));
        assert_eq!(parse_points("k", "(1,2);(3,4);").unwrap().len(), 2);
        assert!(parse_points("k", ";").is_err());
        assert!(parse_point("k", "(1 2)").is_err());
    }
}

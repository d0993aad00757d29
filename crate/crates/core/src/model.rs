//! Selecting a family member by name and `key=value` parameters, as done by
//! the command line and the simulation config.

use crate::error::{Error, Result};
use crate::family::{from_named, FamilySpec, ModelName, Params};

/// Either a named distribution or the bare family (`s`, `delta`, `mu`, `sigma`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Named(ModelName),
    Family,
}

/// A fully specified model.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedModel {
    pub spec: FamilySpec,
    pub params: Params,
    pub named: Option<ModelName>,
}

impl std::str::FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("family") {
            Ok(Self::Family)
        } else {
            s.parse().map(Self::Named)
        }
    }
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Named(m) => write!(f, "{m}"),
            Self::Family => f.write_str("family"),
        }
    }
}

/// Parses `k=v,k=v,...`.
pub fn parse_params(text: &str) -> Result<Vec<(String, f64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got '{item}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("'{}' is not a number", v.trim())))?;
            Ok((k.trim().to_ascii_lowercase(), v))
        })
        .collect()
}

fn get(params: &[(String, f64)], key: &str) -> Result<f64> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{key}'")))
}

fn family_spec(params: &[(String, f64)]) -> Result<FamilySpec> {
    let s = get(params, "s")?;
    let delta = get(params, "delta")?;
    if delta != 0.0 && delta != 1.0 {
        return Err(Error::InvalidParameter(format!("delta must be 0 or 1, got {delta}")));
    }
    FamilySpec::new(s, delta as u8)
}

impl ModelChoice {
    pub fn named(&self) -> Option<ModelName> {
        match self {
            Self::Named(m) => Some(*m),
            Self::Family => None,
        }
    }

    /// The family spec alone; only the generator-defining parameters are
    /// needed (`delta` for power rows, `s` and `delta` for the bare family).
    pub fn spec(&self, params: &[(String, f64)]) -> Result<FamilySpec> {
        match self {
            Self::Named(m) => {
                let power = match m.power_param() {
                    Some(k) => Some(get(params, k)?),
                    None => None,
                };
                m.spec_with_power(power)
            }
            Self::Family => family_spec(params),
        }
    }

    pub fn resolve(&self, params: &[(String, f64)]) -> Result<ResolvedModel> {
        match self {
            Self::Named(m) => {
                let native: Vec<(&str, f64)> =
                    params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                let nm = from_named(*m, &native)?;
                Ok(ResolvedModel {
                    spec: nm.spec,
                    params: nm.params,
                    named: Some(*m),
                })
            }
            Self::Family => {
                for (k, _) in params {
                    if !["s", "delta", "mu", "sigma"].contains(&k.as_str()) {
                        return Err(Error::InvalidParameter(format!(
                            "family model has no parameter '{k}' (expected s, delta, mu, sigma)"
                        )));
                    }
                }
                Ok(ResolvedModel {
                    spec: family_spec(params)?,
                    params: Params::new(get(params, "mu")?, get(params, "sigma")?)?,
                    named: None,
                })
            }
        }
    }
}

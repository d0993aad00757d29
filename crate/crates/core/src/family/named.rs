//! Classical distributions whose generator is a pure power of `x`, and the
//! bijection between their native parameters and `(mu, sigma, s, delta)`.

use std::fmt;
use std::str::FromStr;

use super::{FamilySpec, Params};
use crate::error::{Error, Result};

/// Relative tolerance used when checking that `(mu, sigma)` lies on the
/// curve a constrained model (e.g. Rayleigh, `mu = 1`) can reach.
const IMAGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelName {
    WeightedLindley,
    WeightedInverseLindley,
    WeightedNakagami,
    WeightedInverseNakagami,
    Nakagami,
    MaxwellBoltzmann,
    Rayleigh,
    Gamma,
    InverseGamma,
    DeltaGamma,
    Weibull,
    InverseWeibull,
    GeneralizedGamma,
    GeneralizedInverseGamma,
    ChiSquared,
    ScaledInverseChiSquared,
}

// Rows of the generator tables that are not pure powers of x.
const NON_POWER_MODELS: &[&str] = &[
    "new-weighted-exponentiated-lindley",
    "new-weighted-log-lindley",
    "new-weighted-exponentiated-nakagami",
    "new-weighted-log-nakagami",
    "new-log-generalized-gamma",
    "new-log-generalized-inverse-gamma",
    "new-exponentiated-generalized-gamma",
    "new-exponentiated-generalized-inverse-gamma",
    "new-modified-log-generalized-gamma",
    "new-extended-log-generalized-gamma",
    "gompertz",
    "modified-weibull-extension",
    "traditional-weibull",
    "flexible-weibull",
    "burr-xii",
    "singh-maddala",
    "dagum",
    "mielke-beta-kappa",
];

impl ModelName {
    pub const ALL: [ModelName; 16] = [
        Self::WeightedLindley,
        Self::WeightedInverseLindley,
        Self::WeightedNakagami,
        Self::WeightedInverseNakagami,
        Self::Nakagami,
        Self::MaxwellBoltzmann,
        Self::Rayleigh,
        Self::Gamma,
        Self::InverseGamma,
        Self::DeltaGamma,
        Self::Weibull,
        Self::InverseWeibull,
        Self::GeneralizedGamma,
        Self::GeneralizedInverseGamma,
        Self::ChiSquared,
        Self::ScaledInverseChiSquared,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::WeightedLindley => "weighted-lindley",
            Self::WeightedInverseLindley => "weighted-inverse-lindley",
            Self::WeightedNakagami => "weighted-nakagami",
            Self::WeightedInverseNakagami => "weighted-inverse-nakagami",
            Self::Nakagami => "nakagami",
            Self::MaxwellBoltzmann => "maxwell-boltzmann",
            Self::Rayleigh => "rayleigh",
            Self::Gamma => "gamma",
            Self::InverseGamma => "inverse-gamma",
            Self::DeltaGamma => "delta-gamma",
            Self::Weibull => "weibull",
            Self::InverseWeibull => "inverse-weibull",
            Self::GeneralizedGamma => "generalized-gamma",
            Self::GeneralizedInverseGamma => "generalized-inverse-gamma",
            Self::ChiSquared => "chi-squared",
            Self::ScaledInverseChiSquared => "scaled-inverse-chi-squared",
        }
    }

    /// Native parameter names, in canonical order.
    pub fn native_names(&self) -> &'static [&'static str] {
        match self {
            Self::WeightedLindley | Self::WeightedInverseLindley => &["lambda", "phi"],
            Self::WeightedNakagami | Self::WeightedInverseNakagami | Self::Nakagami => {
                &["m", "omega"]
            }
            Self::MaxwellBoltzmann | Self::Rayleigh => &["beta"],
            Self::Gamma | Self::InverseGamma => &["alpha", "beta"],
            Self::DeltaGamma | Self::Weibull | Self::InverseWeibull => &["delta", "beta"],
            Self::GeneralizedGamma | Self::GeneralizedInverseGamma => &["alpha", "delta", "beta"],
            Self::ChiSquared => &["nu"],
            Self::ScaledInverseChiSquared => &["nu", "tau2"],
        }
    }

    /// Value of the weighting indicator for this row.
    pub fn delta(&self) -> u8 {
        match self {
            Self::WeightedLindley
            | Self::WeightedInverseLindley
            | Self::WeightedNakagami
            | Self::WeightedInverseNakagami => 1,
            _ => 0,
        }
    }

    /// Name of the native parameter that sets the generator power, if any.
    pub fn power_param(&self) -> Option<&'static str> {
        match self {
            Self::DeltaGamma
            | Self::Weibull
            | Self::InverseWeibull
            | Self::GeneralizedGamma
            | Self::GeneralizedInverseGamma => Some("delta"),
            _ => None,
        }
    }

    /// Generator power `s` (convention `T(x) = x^(-s)`) when it does not
    /// depend on the native parameters.
    pub fn fixed_s(&self) -> Option<f64> {
        match self {
            Self::WeightedLindley | Self::Gamma | Self::ChiSquared => Some(-1.0),
            Self::WeightedInverseLindley | Self::InverseGamma | Self::ScaledInverseChiSquared => {
                Some(1.0)
            }
            Self::WeightedNakagami | Self::Nakagami | Self::MaxwellBoltzmann | Self::Rayleigh => {
                Some(-2.0)
            }
            Self::WeightedInverseNakagami => Some(2.0),
            _ => None,
        }
    }

    /// Sign of `s` for rows whose power is a native parameter: `T(x) = x^delta`
    /// gives `s = -delta`, `T(x) = x^(-delta)` gives `s = delta`.
    fn power_sign(&self) -> f64 {
        match self {
            Self::InverseWeibull | Self::GeneralizedInverseGamma => 1.0,
            _ => -1.0,
        }
    }

    /// Native parameters (excluding the power) that are in one-to-one
    /// correspondence with `(mu, sigma)`. `None` for rows that pin `(mu, sigma)`
    /// to a curve (e.g. Rayleigh has `mu = 1`).
    pub fn free_params(&self) -> Option<&'static [&'static str]> {
        match self {
            Self::WeightedLindley | Self::WeightedInverseLindley => Some(&["lambda", "phi"]),
            Self::WeightedNakagami | Self::WeightedInverseNakagami | Self::Nakagami => {
                Some(&["m", "omega"])
            }
            Self::Gamma | Self::InverseGamma => Some(&["alpha", "beta"]),
            Self::GeneralizedGamma | Self::GeneralizedInverseGamma => Some(&["alpha", "beta"]),
            Self::ScaledInverseChiSquared => Some(&["nu", "tau2"]),
            _ => None,
        }
    }

    /// Family spec for this row given its power parameter (ignored for rows
    /// with a fixed generator).
    pub fn spec_with_power(&self, power: Option<f64>) -> Result<FamilySpec> {
        let s = match self.fixed_s() {
            Some(s) => s,
            None => {
                let p = power.ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "model {} needs its power parameter 'delta'",
                        self
                    ))
                })?;
                positive("delta", p)?;
                self.power_sign() * p
            }
        };
        FamilySpec::new(s, self.delta())
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        let alias = match key.as_str() {
            "frechet" => "inverse-weibull",
            "chi2" | "chisq" => "chi-squared",
            "scaled-inverse-chi2" => "scaled-inverse-chi-squared",
            "maxwell" => "maxwell-boltzmann",
            other => other,
        };
        if let Some(m) = Self::ALL.iter().find(|m| m.as_str() == alias) {
            return Ok(*m);
        }
        if NON_POWER_MODELS.contains(&alias) {
            return Err(Error::UnknownModel(format!(
                "{s} (generator is not a power of x; closed-form estimators need T(x) = x^(-s))"
            )));
        }
        Err(Error::UnknownModel(s.to_string()))
    }
}

/// A named distribution together with its family representation.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedModel {
    pub name: ModelName,
    pub native_params: Vec<(&'static str, f64)>,
    pub spec: FamilySpec,
    pub params: Params,
}

impl NamedModel {
    pub fn native(&self, key: &str) -> Option<f64> {
        self.native_params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn nakagami_shape(m: f64) -> Result<f64> {
    if m >= 0.5 && m.is_finite() {
        Ok(m)
    } else {
        Err(Error::InvalidParameter(format!("m must satisfy m >= 1/2, got {m}")))
    }
}

fn lookup(name: ModelName, native: &[(&str, f64)], key: &str) -> Result<f64> {
    native
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(key))
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidParameter(format!("model {name} needs parameter '{key}'")))
}

/// Builds a [`NamedModel`] from native parameters given as `(name, value)`
/// pairs in any order.
pub fn from_named(name: ModelName, native: &[(&str, f64)]) -> Result<NamedModel> {
    let names = name.native_names();
    for (k, _) in native {
        if !names.iter().any(|n| n.eq_ignore_ascii_case(k)) {
            return Err(Error::InvalidParameter(format!(
                "model {name} has no parameter '{k}' (expected {})",
                names.join(", ")
            )));
        }
    }
    let get = |key: &str| lookup(name, native, key);

    let (mu, sigma) = match name {
        ModelName::WeightedLindley | ModelName::WeightedInverseLindley => {
            let lambda = positive("lambda", get("lambda")?)?;
            let phi = positive("phi", get("phi")?)?;
            (phi, lambda / phi)
        }
        ModelName::WeightedNakagami | ModelName::WeightedInverseNakagami | ModelName::Nakagami => {
            let m = nakagami_shape(get("m")?)?;
            let omega = positive("omega", get("omega")?)?;
            (m, 1.0 / omega)
        }
        ModelName::MaxwellBoltzmann => {
            let beta = positive("beta", get("beta")?)?;
            (1.5, 1.0 / (3.0 * beta * beta))
        }
        ModelName::Rayleigh => {
            let beta = positive("beta", get("beta")?)?;
            (1.0, 1.0 / (2.0 * beta * beta))
        }
        ModelName::Gamma | ModelName::InverseGamma => {
            let alpha = positive("alpha", get("alpha")?)?;
            let beta = positive("beta", get("beta")?)?;
            (alpha, 1.0 / (alpha * beta))
        }
        ModelName::DeltaGamma => {
            let delta = positive("delta", get("delta")?)?;
            let beta = positive("beta", get("beta")?)?;
            (beta / delta, 1.0 / beta)
        }
        ModelName::Weibull | ModelName::InverseWeibull => {
            let delta = positive("delta", get("delta")?)?;
            let beta = positive("beta", get("beta")?)?;
            (1.0, beta.powf(-delta))
        }
        ModelName::GeneralizedGamma | ModelName::GeneralizedInverseGamma => {
            let alpha = positive("alpha", get("alpha")?)?;
            let delta = positive("delta", get("delta")?)?;
            let beta = positive("beta", get("beta")?)?;
            (alpha / delta, delta / (alpha * beta.powf(delta)))
        }
        ModelName::ChiSquared => {
            let nu = positive("nu", get("nu")?)?;
            (nu / 2.0, 1.0 / nu)
        }
        ModelName::ScaledInverseChiSquared => {
            let nu = positive("nu", get("nu")?)?;
            let tau2 = positive("tau2", get("tau2")?)?;
            (nu / 2.0, tau2)
        }
    };

    let power = name.power_param().map(get).transpose()?;
    let spec = name.spec_with_power(power)?;
    let params = Params::new(mu, sigma)?;
    let native_params = names
        .iter()
        .map(|k| get(k).map(|v| (*k, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NamedModel {
        name,
        native_params,
        spec,
        params,
    })
}

fn on_curve(what: &str, got: f64, want: f64) -> Result<()> {
    if ((got - want) / want).abs() <= IMAGE_TOL {
        Ok(())
    } else {
        Err(Error::ModelMismatch(format!("{what} must equal {want}, got {got}")))
    }
}

/// Maps `(spec, params)` back to native parameters, in canonical order.
pub fn to_named(
    name: ModelName,
    spec: FamilySpec,
    params: Params,
) -> Result<Vec<(&'static str, f64)>> {
    if spec.delta() != name.delta() {
        return Err(Error::ModelMismatch(format!(
            "model {name} has delta = {}, spec has delta = {}",
            name.delta(),
            spec.delta()
        )));
    }
    let s = spec.s();
    match name.fixed_s() {
        Some(fixed) if fixed != s => {
            return Err(Error::ModelMismatch(format!(
                "model {name} has s = {fixed}, spec has s = {s}"
            )));
        }
        None if s.signum() != name.power_sign() => {
            return Err(Error::ModelMismatch(format!(
                "model {name} needs s with sign {}, spec has s = {s}",
                name.power_sign()
            )));
        }
        _ => {}
    }
    let (mu, sigma) = (params.mu(), params.sigma());
    let power = s.abs();

    let values: Vec<f64> = match name {
        ModelName::WeightedLindley | ModelName::WeightedInverseLindley => {
            vec![mu * sigma, mu]
        }
        ModelName::WeightedNakagami | ModelName::WeightedInverseNakagami | ModelName::Nakagami => {
            vec![nakagami_shape(mu).map_err(|e| Error::ModelMismatch(e.to_string()))?, 1.0 / sigma]
        }
        ModelName::MaxwellBoltzmann => {
            on_curve("mu", mu, 1.5)?;
            vec![(1.0 / (3.0 * sigma)).sqrt()]
        }
        ModelName::Rayleigh => {
            on_curve("mu", mu, 1.0)?;
            vec![(1.0 / (2.0 * sigma)).sqrt()]
        }
        ModelName::Gamma | ModelName::InverseGamma => vec![mu, 1.0 / (mu * sigma)],
        ModelName::DeltaGamma => {
            on_curve("mu * sigma * delta", mu * sigma * power, 1.0)?;
            vec![power, 1.0 / sigma]
        }
        ModelName::Weibull | ModelName::InverseWeibull => {
            on_curve("mu", mu, 1.0)?;
            vec![power, sigma.powf(-1.0 / power)]
        }
        ModelName::GeneralizedGamma | ModelName::GeneralizedInverseGamma => {
            vec![mu * power, power, (mu * sigma).powf(-1.0 / power)]
        }
        ModelName::ChiSquared => {
            on_curve("mu * sigma", mu * sigma, 0.5)?;
            vec![2.0 * mu]
        }
        ModelName::ScaledInverseChiSquared => vec![2.0 * mu, sigma],
    };
    Ok(name.native_names().iter().copied().zip(values).collect())
}

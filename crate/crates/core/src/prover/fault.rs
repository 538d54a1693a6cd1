use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// How the simulated device deviates from an ideal quantum computer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FaultModel {
    #[default]
    Ideal,
    /// Every `MAGIC` input is prepared with phase `π/4 + delta_theta`.
    MagicMiscalibration { delta_theta: f64 },
    /// Gadget ancilla readouts are Bernoulli(1/2 + bias) regardless of the state.
    GadgetCoinBias { bias: f64 },
    /// A uniformly random non-identity Pauli follows each gate with probability `p_err`.
    Depolarizing { p_err: f64 },
    /// The `out` measurement reports 0 with fixed probability `q`.
    Liar { q: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FaultSpecError {
    #[error("unknown fault model {0:?}")]
    Unknown(String),
    #[error("fault model {0} expects {1} parameter(s)")]
    Arity(&'static str, usize),
    #[error("bad fault parameter {0:?}")]
    Number(String),
    #[error("fault parameter out of range: {0}")]
    Range(String),
}

impl FaultModel {
    pub fn check(&self) -> Result<(), FaultSpecError> {
        let ok = match *self {
            FaultModel::Ideal => true,
            FaultModel::MagicMiscalibration { delta_theta } => delta_theta.is_finite(),
            FaultModel::GadgetCoinBias { bias } => bias.abs() <= 0.5,
            FaultModel::Depolarizing { p_err } => (0.0..=1.0).contains(&p_err),
            FaultModel::Liar { q } => (0.0..=1.0).contains(&q),
        };
        if ok {
            Ok(())
        } else {
            Err(FaultSpecError::Range(self.to_string()))
        }
    }

    pub fn magic_offset(&self) -> f64 {
        match *self {
            FaultModel::MagicMiscalibration { delta_theta } => delta_theta,
            _ => 0.0,
        }
    }

    /// True when gates inject randomness beyond measurement sampling.
    pub fn is_noisy_between_measurements(&self) -> bool {
        matches!(self, FaultModel::Depolarizing { p_err } if *p_err > 0.0)
    }

    fn name(&self) -> &'static str {
        match self {
            FaultModel::Ideal => "ideal",
            FaultModel::MagicMiscalibration { .. } => "magic_miscalibration",
            FaultModel::GadgetCoinBias { .. } => "gadget_coin_bias",
            FaultModel::Depolarizing { .. } => "depolarizing",
            FaultModel::Liar { .. } => "liar",
        }
    }
}

impl fmt::Display for FaultModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FaultModel::Ideal => f.write_str("ideal"),
            FaultModel::MagicMiscalibration { delta_theta: v }
            | FaultModel::GadgetCoinBias { bias: v }
            | FaultModel::Depolarizing { p_err: v }
            | FaultModel::Liar { q: v } => write!(f, "{} {v}", self.name()),
        }
    }
}

/// Mini-grammar: `ideal` | `<model> <value>`, names case-insensitive.
impl FromStr for FaultModel {
    type Err = FaultSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let Some(name) = parts.first() else {
            return Err(FaultSpecError::Unknown(String::new()));
        };
        let name = name.to_ascii_lowercase();
        let param = |label: &'static str| -> Result<f64, FaultSpecError> {
            if parts.len() != 2 {
                return Err(FaultSpecError::Arity(label, 1));
            }
            parts[1]
                .parse::<f64>()
                .map_err(|_| FaultSpecError::Number(parts[1].to_string()))
        };
        let model = match name.as_str() {
            "ideal" => {
                if parts.len() != 1 {
                    return Err(FaultSpecError::Arity("ideal", 0));
                }
                FaultModel::Ideal
            }
            "magic_miscalibration" => FaultModel::MagicMiscalibration {
                delta_theta: param("magic_miscalibration")?,
            },
            "gadget_coin_bias" => FaultModel::GadgetCoinBias {
                bias: param("gadget_coin_bias")?,
            },
            "depolarizing" => FaultModel::Depolarizing {
                p_err: param("depolarizing")?,
            },
            "liar" => FaultModel::Liar { q: param("liar")? },
            _ => return Err(FaultSpecError::Unknown(parts[0].to_string())),
        };
        model.check()?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for spec in [
            "ideal",
            "magic_miscalibration 0.3",
            "gadget_coin_bias 0.1",
            "depolarizing 0.01",
            "liar 1",
        ] {
            let m: FaultModel = spec.parse().unwrap();
            assert_eq!(m.to_string().parse::<FaultModel>().unwrap(), m);
        }
        assert_eq!(
            "GADGET_COIN_BIAS -0.2".parse::<FaultModel>().unwrap(),
            FaultModel::GadgetCoinBias { bias: -0.2 }
        );
    }

    #[test]
    fn ranges() {
        assert!("gadget_coin_bias 0.6".parse::<FaultModel>().is_err());
        assert!("liar 1.5".parse::<FaultModel>().is_err());
        assert!("depolarizing -0.1".parse::<FaultModel>().is_err());
        assert!("liar".parse::<FaultModel>().is_err());
        assert!("ideal 3".parse::<FaultModel>().is_err());
        assert!("gremlin 1".parse::<FaultModel>().is_err());
    }
}

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Normalization of quadrature variances.
///
/// `Half` puts the vacuum variance at 1/2 and is what every formula in this
/// crate works in. `Snl` puts the vacuum (shot-noise limit) at 1 and is what
/// measured data and file I/O use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Half,
    Snl,
}

impl Units {
    /// Factor that converts a variance in these units into `Half` units.
    pub fn to_half_factor(self) -> f64 {
        match self {
            Units::Half => 1.0,
            Units::Snl => 0.5,
        }
    }

    pub fn convert(self, value: f64, to: Units) -> f64 {
        match (self, to) {
            (Units::Half, Units::Snl) => value * 2.0,
            (Units::Snl, Units::Half) => value / 2.0,
            _ => value,
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Half => "half",
            Units::Snl => "snl",
        })
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "half" => Ok(Units::Half),
            "snl" => Ok(Units::Snl),
            other => Err(format!("unknown unit convention '{other}' (expected snl or half)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_are_exact() {
        assert_eq!(Units::Snl.convert(1.0, Units::Half), 0.5);
        assert_eq!(Units::Half.convert(1.0, Units::Snl), 2.0);
        assert_eq!(Units::Snl.convert(0.3, Units::Snl), 0.3);
        let x = 0.123_456_789_f64;
        assert_eq!(Units::Half.convert(Units::Snl.convert(x, Units::Half), Units::Snl), x);
    }

    #[test]
    fn parse_tags() {
        assert_eq!("SNL".parse::<Units>().unwrap(), Units::Snl);
        assert_eq!("half".parse::<Units>().unwrap(), Units::Half);
        assert!("vacuum".parse::<Units>().is_err());
    }
}

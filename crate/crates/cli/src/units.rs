//! Quantities written as `"<number> <unit>"` in configuration files.
//!
//! Frequencies are cyclic (`Hz`, `kHz`, `MHz`, `GHz`) and become angular
//! on conversion, or are given directly in `rad/s`.

use std::fmt;

use deltacpt::constants::{AMU, TAU};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Power,
    Temperature,
    Length,
    Density,
    Angle,
    Wavenumber,
    Mass,
    Dipole,
    Dimensionless,
}

impl Dimension {
    fn describe(self) -> &'static str {
        match self {
            Dimension::Frequency => "Hz, kHz, MHz, GHz or rad/s",
            Dimension::Power => "dBm",
            Dimension::Temperature => "K or degC",
            Dimension::Length => "m, cm, mm or um",
            Dimension::Density => "m^-3 or cm^-3",
            Dimension::Angle => "rad, deg or pi",
            Dimension::Wavenumber => "m^-1 or rad/m",
            Dimension::Mass => "kg or u",
            Dimension::Dipole => "C*m or ea0",
            Dimension::Dimensionless => "a plain number",
        }
    }

    /// Converts `value unit` to SI, angular frequencies in rad/s.
    fn convert(self, value: f64, unit: &str) -> Option<f64> {
        use Dimension::*;
        let v = match (self, unit) {
            (Frequency, "Hz") => TAU * value,
            (Frequency, "kHz") => TAU * 1e3 * value,
            (Frequency, "MHz") => TAU * 1e6 * value,
            (Frequency, "GHz") => TAU * 1e9 * value,
            (Frequency, "rad/s") => value,
            (Power, "dBm") => value,
            (Temperature, "K") => value,
            (Temperature, "degC" | "°C") => value + 273.15,
            (Length, "m") => value,
            (Length, "cm") => 1e-2 * value,
            (Length, "mm") => 1e-3 * value,
            (Length, "um" | "µm") => 1e-6 * value,
            (Density, "m^-3") => value,
            (Density, "cm^-3") => 1e6 * value,
            (Angle, "rad") => value,
            (Angle, "deg") => value.to_radians(),
            (Angle, "pi") => std::f64::consts::PI * value,
            (Wavenumber, "m^-1" | "rad/m") => value,
            (Mass, "kg") => value,
            (Mass, "u") => AMU * value,
            (Dipole, "C*m") => value,
            (Dipole, "ea0") => 8.478_353_625_8e-30 * value,
            (Dimensionless, "") => value,
            _ => return None,
        };
        Some(v)
    }
}

/// A number with its unit as written, not yet checked against a dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        // longest prefix that reads as a number
        let split = s
            .char_indices()
            .map(|(i, c)| i + c.len_utf8())
            .filter(|&i| s[..i].parse::<f64>().is_ok())
            .last()
            .ok_or_else(|| format!("cannot read a number from {s:?}"))?;
        let (num, unit) = s.split_at(split);
        Ok(Quantity { value: num.parse().expect("prefix parses"), unit: unit.trim().to_string() })
    }

    pub fn to(&self, dim: Dimension) -> Result<f64, String> {
        dim.convert(self.value, &self.unit)
            .ok_or_else(|| format!("unit {:?} is not one of {}", self.unit, dim.describe()))
    }

    /// Like [`Quantity::to`], rejecting infinities and NaN.
    pub fn finite(&self, dim: Dimension) -> Result<f64, String> {
        let v = self.to(dim)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{} {} is not finite", self.value, self.unit))
        }
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a quantity such as \"20 MHz\", or a plain number")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Quantity, E> {
                Quantity::parse(s).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
                Ok(Quantity { value: v, unit: String::new() })
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
                Ok(Quantity { value: v as f64, unit: String::new() })
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
                Ok(Quantity { value: v as f64, unit: String::new() })
            }
        }
        d.deserialize_any(V)
    }
}

macro_rules! typed {
    ($name:ident, $dim:expr) => {
        /// SI value of a quantity of fixed dimension.
        #[derive(Clone, Copy, Debug, PartialEq)]
        pub struct $name(pub f64);

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let q = Quantity::deserialize(d)?;
                q.to($dim).map($name).map_err(de::Error::custom)
            }
        }
    };
}

typed!(Frequency, Dimension::Frequency);
typed!(Power, Dimension::Power);
typed!(Temperature, Dimension::Temperature);
typed!(Length, Dimension::Length);
typed!(Density, Dimension::Density);
typed!(Angle, Dimension::Angle);
typed!(Wavenumber, Dimension::Wavenumber);
typed!(Mass, Dimension::Mass);
typed!(Dipole, Dimension::Dipole);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quantity {
        Quantity::parse(s).unwrap()
    }

    #[test]
    fn frequencies_become_angular() {
        let close = |a: f64, b: f64| (a / b - 1.0).abs() < 1e-15;
        assert!(close(q("20 MHz").to(Dimension::Frequency).unwrap(), TAU * 20e6));
        assert!(close(q("1.5e3Hz").to(Dimension::Frequency).unwrap(), TAU * 1.5e3));
        assert_eq!(q("-3 rad/s").to(Dimension::Frequency).unwrap(), -3.0);
    }

    #[test]
    fn exponents_and_infinities() {
        assert_eq!(q("1.5e17 m^-3"), Quantity { value: 1.5e17, unit: "m^-3".into() });
        assert_eq!(q("-inf dBm").value, f64::NEG_INFINITY);
        assert_eq!(q("2E-3 m").value, 2e-3);
        assert!(q("-inf dBm").finite(Dimension::Power).is_err());
    }

    #[test]
    fn temperatures() {
        assert!((q("57 degC").to(Dimension::Temperature).unwrap() - 330.15).abs() < 1e-12);
        assert_eq!(q("330 K").to(Dimension::Temperature).unwrap(), 330.0);
    }

    #[test]
    fn wrong_or_missing_units_rejected() {
        assert!(q("20").to(Dimension::Frequency).is_err());
        assert!(q("20 dBm").to(Dimension::Frequency).is_err());
        assert!(q("20 mhz").to(Dimension::Frequency).is_err());
        assert!(Quantity::parse("MHz").is_err());
        assert!(Quantity::parse("").is_err());
    }

    #[test]
    fn angles() {
        assert!((q("1.25 pi").to(Dimension::Angle).unwrap() - 5.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((q("90 deg").to(Dimension::Angle).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}

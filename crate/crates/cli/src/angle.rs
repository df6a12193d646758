//! Angles on the command line, written as multiples of π.
//!
//! `1/3` is π/3, `-0.25` is −π/4, and a `rad` suffix (`0.7854rad`) takes the
//! number as radians.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Angle {
    /// What the user typed; used to replay the command.
    pub text: String,
    pub radians: f64,
}

impl Angle {
    pub fn pi_fraction(text: &str) -> Self {
        text.parse().expect("valid angle literal")
    }
}

fn number(s: &str, whole: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("invalid angle '{whole}': expected a π multiple like 1/3 or -0.25, or radians like 0.5rad"))
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let radians = if let Some(r) = t.strip_suffix("rad") {
            number(r, s)?
        } else if let Some((p, q)) = t.split_once('/') {
            let (p, q) = (number(p, s)?, number(q, s)?);
            if q == 0.0 {
                return Err(format!("invalid angle '{s}': zero denominator"));
            }
            p / q * PI
        } else {
            number(t, s)? * PI
        };
        Ok(Angle { text: t.to_string(), radians })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `lo:hi`, both ends angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub lo: Angle,
    pub hi: Angle,
}

impl FromStr for AngleRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("invalid range '{s}': expected lo:hi, e.g. -1/2:1/2"))?;
        let range = AngleRange { lo: lo.parse()?, hi: hi.parse()? };
        if range.lo.radians > range.hi.radians {
            return Err(format!("invalid range '{s}': lower end exceeds upper end"));
        }
        Ok(range)
    }
}

impl fmt::Display for AngleRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

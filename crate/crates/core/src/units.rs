//! Units of account carried by accounts, booking legs and category payloads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Unit of account. `Eu` is the single nominal unit; the rest are real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Unit {
    /// Monetary unit.
    Eu,
    /// Labor hours.
    Hours,
    /// Resource kilograms.
    Kg,
    /// Units of the produced good.
    Good,
}

impl Unit {
    pub const ALL: [Unit; 4] = [Unit::Eu, Unit::Hours, Unit::Kg, Unit::Good];

    pub fn is_nominal(self) -> bool {
        matches!(self, Unit::Eu)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Eu => "EU",
            Unit::Hours => "h",
            Unit::Kg => "kg",
            Unit::Good => "G",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EU" => Ok(Unit::Eu),
            "h" => Ok(Unit::Hours),
            "kg" => Ok(Unit::Kg),
            "G" => Ok(Unit::Good),
            other => Err(format!("unknown unit `{other}`")),
        }
    }
}

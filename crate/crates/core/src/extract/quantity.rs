use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::ExtractError;
use crate::text::{tokenize, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    PercentVolume,
    MicrolitrePerLitre,
    Ppmv,
    MgPerKg,
    Ppmw,
    Celsius,
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    VolumeFraction,
    MassFraction,
    Temperature,
    None,
}

impl Unit {
    pub const ALL: [Unit; 7] = [
        Unit::PercentVolume,
        Unit::MicrolitrePerLitre,
        Unit::Ppmv,
        Unit::MgPerKg,
        Unit::Ppmw,
        Unit::Celsius,
        Unit::Dimensionless,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Unit::PercentVolume => "percent_volume",
            Unit::MicrolitrePerLitre => "microlitre_per_litre",
            Unit::Ppmv => "ppmv",
            Unit::MgPerKg => "mg_per_kg",
            Unit::Ppmw => "ppmw",
            Unit::Celsius => "celsius",
            Unit::Dimensionless => "dimensionless",
        }
    }

    /// Conventional symbol, e.g. `µl/l`.
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::PercentVolume => "% volume",
            Unit::MicrolitrePerLitre => "µl/l",
            Unit::Ppmv => "ppmv",
            Unit::MgPerKg => "mg/kg",
            Unit::Ppmw => "ppmw",
            Unit::Celsius => "°C",
            Unit::Dimensionless => "",
        }
    }

    fn dimension(self) -> Dimension {
        match self {
            Unit::PercentVolume | Unit::MicrolitrePerLitre | Unit::Ppmv => Dimension::VolumeFraction,
            Unit::MgPerKg | Unit::Ppmw => Dimension::MassFraction,
            Unit::Celsius => Dimension::Temperature,
            Unit::Dimensionless => Dimension::None,
        }
    }

    /// Size of one unit in parts per million (1 for non-fractions).
    fn ppm_factor(self) -> Decimal {
        match self {
            Unit::PercentVolume => Decimal::from(10_000),
            _ => Decimal::ONE,
        }
    }

    /// True for volume or mass fractions.
    pub fn is_concentration(self) -> bool {
        matches!(self.dimension(), Dimension::VolumeFraction | Dimension::MassFraction)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: Decimal,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: Decimal, unit: Unit) -> Self {
        Quantity { value, unit }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Unit::Dimensionless => write!(f, "{}", self.value.normalize()),
            u => write!(f, "{} {}", self.value.normalize(), u.symbol()),
        }
    }
}

fn unit_from_text(spaced: &str, compact: &str) -> Option<Unit> {
    Some(match compact {
        "" => Unit::Dimensionless,
        "µl/l" | "ul/l" => Unit::MicrolitrePerLitre,
        "ppmv" => Unit::Ppmv,
        "mg/kg" => Unit::MgPerKg,
        "ppmw" => Unit::Ppmw,
        "°c" => Unit::Celsius,
        _ => match spaced {
            "%" | "% volume" | "% by volume" | "% vol" | "percent" | "percentage" | "percent volume" => {
                Unit::PercentVolume
            }
            _ => return None,
        },
    })
}

/// Parses a value with an optional unit: `99,7 % volume`, `1 500 µl/l`,
/// `-40 °C`. Decimal commas and space-grouped thousands are accepted.
pub fn parse_quantity(text: &str) -> Result<Quantity, ExtractError> {
    let unparsable = || ExtractError::UnparsableQuantity { text: text.to_string() };
    let tokens = tokenize(text);
    let mut i = 0;
    let mut negative = false;
    if let Some(t) = tokens.first() {
        if matches!(t.text.as_str(), "-" | "+" | "\u{2212}") {
            negative = t.text != "+";
            i = 1;
        }
    }
    let number = tokens.get(i).filter(|t| t.kind == TokenKind::Number).ok_or_else(unparsable)?;
    if negative && tokens[0].span.end != number.span.start {
        return Err(unparsable());
    }
    let mut value = Decimal::from_str(&number.norm).map_err(|_| unparsable())?;
    if negative {
        value = -value;
    }

    let rest = &tokens[i + 1..];
    let spaced = rest.iter().map(|t| t.norm.as_str()).collect::<Vec<_>>().join(" ");
    let compact: String = rest.iter().map(|t| t.norm.as_str()).collect();
    let unit = unit_from_text(&spaced, &compact).ok_or_else(|| ExtractError::UnknownUnit {
        unit: rest
            .first()
            .map(|t| text.chars().skip(t.span.start).collect::<String>().trim().to_string())
            .unwrap_or_default(),
    })?;
    Ok(Quantity { value, unit })
}

/// Exact conversion between units of the same dimension.
///
/// µl/l and ppmv are the same unit, as are mg/kg and ppmw; one percent by
/// volume is 10 000 ppmv.
pub fn convert_unit(q: Quantity, target: Unit) -> Result<Quantity, ExtractError> {
    if q.unit == target {
        return Ok(q);
    }
    if q.unit.dimension() != target.dimension() || q.unit.dimension() == Dimension::Temperature {
        return Err(ExtractError::IncompatibleUnits { from: q.unit, to: target });
    }
    let overflow = || ExtractError::ConversionOverflow { value: q.value.to_string(), from: q.unit, to: target };
    let ppm = q.value.checked_mul(q.unit.ppm_factor()).ok_or_else(overflow)?;
    let value = ppm.checked_div(target.ppm_factor()).ok_or_else(overflow)?;
    Ok(Quantity { value: value.normalize(), unit: target })
}

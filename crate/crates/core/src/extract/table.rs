use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::quantity::{convert_unit, parse_quantity, Quantity};
use super::ExtractError;
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    GT,
    LT,
    GE,
    LE,
    EQ,
}

impl Comparator {
    pub fn phrase(self) -> &'static str {
        match self {
            Comparator::GT => "greater than",
            Comparator::LT => "less than",
            Comparator::GE => "at least",
            Comparator::LE => "at most",
            Comparator::EQ => "equal to",
        }
    }

    pub fn from_phrase(s: &str) -> Option<Comparator> {
        [Comparator::GT, Comparator::LT, Comparator::GE, Comparator::LE, Comparator::EQ]
            .into_iter()
            .find(|c| c.phrase() == s)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::GT => ">",
            Comparator::LT => "<",
            Comparator::GE => ">=",
            Comparator::LE => "<=",
            Comparator::EQ => "=",
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstanceRef {
    pub uri: Option<String>,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRequirement {
    pub context: String,
    pub substance: SubstanceRef,
    pub comparator: Comparator,
    pub quantity: Quantity,
    pub alt_quantity: Option<Quantity>,
}

/// A raw row of a requirement table CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub substance: String,
    pub constraint: String,
}

/// A parsed constraint cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableCell {
    pub comparator: Comparator,
    pub quantity: Quantity,
    pub alt_quantity: Option<Quantity>,
}

pub fn read_table_csv<R: Read>(reader: R) -> Result<Vec<TableRow>, csv::Error> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader).deserialize().collect()
}

// Longest forms first so "<=" wins over "<".
const COMPARATORS: &[(&str, Comparator)] = &[
    ("greater than or equal to", Comparator::GE),
    ("less than or equal to", Comparator::LE),
    ("greater than", Comparator::GT),
    ("higher than", Comparator::GT),
    ("more than", Comparator::GT),
    ("smaller than", Comparator::LT),
    ("less than", Comparator::LT),
    ("lower than", Comparator::LT),
    ("equal to", Comparator::EQ),
    ("at least", Comparator::GE),
    ("at most", Comparator::LE),
    (">=", Comparator::GE),
    ("<=", Comparator::LE),
    ("≥", Comparator::GE),
    ("≤", Comparator::LE),
    (">", Comparator::GT),
    ("<", Comparator::LT),
    ("=", Comparator::EQ),
];

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    let head = s.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| &s[prefix.len()..])
}

/// Parses `> 99,7 % volume`, `< 500 µl/l (i.e. 500 ppmv)` or
/// `SMALLER THAN 3 000 µl/l (= 3 000 ppmv)`. The parenthetical, when
/// present, must equal the main quantity after conversion.
pub fn parse_table_cell(cell: &str, row: usize) -> Result<TableCell, ExtractError> {
    let mut rest = cell.trim();
    if let Some(r) = strip_prefix_ci(rest, "concentration") {
        rest = r.trim_start();
    }
    let (comparator, after) = COMPARATORS
        .iter()
        .find_map(|(p, c)| strip_prefix_ci(rest, p).map(|r| (*c, r)))
        .ok_or_else(|| ExtractError::ComparatorMissing { row, cell: cell.to_string() })?;

    let (main, paren) = match after.find('(') {
        Some(open) => {
            let close = after.rfind(')').filter(|&c| c > open).ok_or_else(|| ExtractError::Row {
                row,
                source: Box::new(ExtractError::UnparsableQuantity { text: after.trim().to_string() }),
            })?;
            (&after[..open], Some(&after[open + 1..close]))
        }
        None => (after, None),
    };
    let with_row = |e: ExtractError| ExtractError::Row { row, source: Box::new(e) };
    let quantity = parse_quantity(main.trim()).map_err(with_row)?;

    let alt_quantity = match paren {
        None => None,
        Some(inner) => {
            let inner = inner.trim();
            let inner =
                strip_prefix_ci(inner, "i.e.").or_else(|| inner.strip_prefix('=')).map(str::trim).unwrap_or(inner);
            let alt = parse_quantity(inner).map_err(with_row)?;
            let agrees = convert_unit(quantity, alt.unit).is_ok_and(|q| q.value == alt.value);
            if !agrees {
                return Err(ExtractError::QuantityMismatch {
                    row,
                    stated: quantity.to_string(),
                    alternative: alt.to_string(),
                });
            }
            Some(alt)
        }
    };
    Ok(TableCell { comparator, quantity, alt_quantity })
}

fn is_key_row(row: &TableRow) -> bool {
    let s = row.substance.trim();
    strip_prefix_ci(s, "key").is_some_and(|r| r.is_empty() || r.starts_with([' ', ':']))
}

// Joins formulas typeset with spaced subscripts: "H ₂ O" -> "H₂O".
fn clean_substance(s: &str) -> String {
    let is_sub = |c: char| ('\u{2080}'..='\u{2089}').contains(&c);
    let chars: Vec<char> = s.trim().chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_whitespace() {
            let next = chars[i..].iter().find(|c| !c.is_whitespace()).copied();
            let after_sub = out.chars().next_back().is_some_and(is_sub);
            if next.is_some_and(is_sub) || (after_sub && next.is_some_and(char::is_uppercase)) {
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// One requirement per substance row. Key rows are skipped; substances not
/// in the lexicon keep `uri = None`.
pub fn parse_requirement_table(
    rows: &[TableRow],
    context: &str,
    lex: &Lexicon,
) -> Result<Vec<TableRequirement>, ExtractError> {
    let mut out = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let row_no = k + 1;
        if is_key_row(row) || (row.substance.trim().is_empty() && row.constraint.trim().is_empty()) {
            continue;
        }
        let cell = parse_table_cell(&row.constraint, row_no)?;
        if cell.quantity.unit.is_concentration() && cell.quantity.value <= rust_decimal::Decimal::ZERO {
            return Err(ExtractError::NonPositiveConcentration { row: row_no, value: cell.quantity.value.to_string() });
        }
        let surface = clean_substance(&row.substance);
        let uri = lex.resolve(&surface).map(|e| e.uri.clone());
        if uri.is_none() {
            log::info!("table {context:?}: substance {surface:?} is not in the lexicon");
        }
        out.push(TableRequirement {
            context: context.to_string(),
            substance: SubstanceRef { uri, surface },
            comparator: cell.comparator,
            quantity: cell.quantity,
            alt_quantity: cell.alt_quantity,
        });
    }
    Ok(out)
}

use super::FormalError;
use crate::text::fold_subscripts;

const DIGIT_WORDS: [&str; 10] = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"];
const ARTICLES: &[&str] = &["the", "a", "an"];

fn fold_letter(c: char) -> Option<&'static str> {
    Some(match c {
        'à' | 'á' | 'â' | 'ä' | 'ã' | 'å' => "a",
        'ç' => "c",
        'è' | 'é' | 'ê' | 'ë' => "e",
        'ì' | 'í' | 'î' | 'ï' => "i",
        'ñ' => "n",
        'ò' | 'ó' | 'ô' | 'ö' | 'õ' => "o",
        'ù' | 'ú' | 'û' | 'ü' => "u",
        'ÿ' => "y",
        'œ' => "oe",
        'æ' => "ae",
        'µ' | 'μ' => "micro",
        _ => return None,
    })
}

/// Turns a surface phrase into a contract identifier.
///
/// Lowercases, folds subscripts and accents, spells every digit out as a
/// word glued to its neighbours (`SF6` → `sfsix`), drops articles and joins
/// the remaining words with `_`.
pub fn mangle_identifier(surface: &str) -> Result<String, FormalError> {
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    for c in fold_subscripts(surface).chars() {
        let lower: String = c.to_lowercase().collect();
        let mut lc = lower.chars();
        let single = lc.next().filter(|_| lc.next().is_none());
        match single {
            Some(l) if l.is_ascii_lowercase() => current.push(l),
            Some(d) if d.is_ascii_digit() => current.push_str(DIGIT_WORDS[d as usize - '0' as usize]),
            Some(l) if fold_letter(l).is_some() => current.push_str(fold_letter(l).unwrap()),
            _ => {
                if !current.is_empty() {
                    words.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    if words.is_empty() {
        return Err(FormalError::EmptyIdentifier { surface: surface.to_string() });
    }
    let content: Vec<&str> = words.iter().map(String::as_str).filter(|w| !ARTICLES.contains(w)).collect();
    if content.is_empty() {
        Ok(words.join("_"))
    } else {
        Ok(content.join("_"))
    }
}

/// Display form used in RSML text: everything before the first digit is
/// kept, digits are spelled out and what follows is lowercased
/// (`SF6` → `SFsix`, `H₂O` → `Htwoo`).
pub fn display_identifier(surface: &str) -> String {
    let folded = fold_subscripts(surface.trim());
    let mut out = String::with_capacity(folded.len() + 8);
    let mut seen_digit = false;
    for c in folded.chars() {
        if let Some(d) = c.to_digit(10) {
            seen_digit = true;
            out.push_str(DIGIT_WORDS[d as usize]);
        } else if seen_digit {
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Makes a number usable inside an identifier: `99.7` → `99_7`,
/// `-40` → `minus_40`.
pub fn sanitize_numeral(numeral: &str) -> String {
    let (sign, digits) = match numeral.strip_prefix('-') {
        Some(rest) => ("minus_", rest),
        None => ("", numeral),
    };
    format!("{sign}{}", digits.replace(['.', ','], "_"))
}

/// Uppercase class-name form of a block name.
pub(crate) fn class_name(block: &str) -> String {
    let mut out = String::new();
    for c in fold_subscripts(block).chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_uppercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    while out.ends_with('_') {
        out.pop();
    }
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert_str(0, "B_");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chemical_formulas() {
        for (surface, want) in [
            ("SF6", "sfsix"),
            ("CF4", "cffour"),
            ("H2O", "htwoo"),
            ("H₂O", "htwoo"),
            ("O₂", "otwo"),
            ("N2", "ntwo"),
            ("Mineral oil", "mineral_oil"),
            ("Total acidity", "total_acidity"),
            ("Toxicity of the gas", "toxicity_of_gas"),
            ("the responsibility of the supplier", "responsibility_of_supplier"),
            ("toxicité", "toxicite"),
        ] {
            assert_eq!(mangle_identifier(surface).unwrap(), want, "{surface}");
        }
    }

    #[test]
    fn empty_or_symbol_only() {
        assert!(matches!(mangle_identifier(""), Err(FormalError::EmptyIdentifier { .. })));
        assert!(matches!(mangle_identifier(" -- "), Err(FormalError::EmptyIdentifier { .. })));
        assert_eq!(mangle_identifier("the").unwrap(), "the");
    }

    #[test]
    fn display_forms() {
        assert_eq!(display_identifier("SF6"), "SFsix");
        assert_eq!(display_identifier("CF ₄"), "CF four");
        assert_eq!(display_identifier("CF₄"), "CFfour");
        assert_eq!(display_identifier("H₂O"), "Htwoo");
        assert_eq!(display_identifier("Air"), "Air");
        assert_eq!(display_identifier("Mineral oil"), "Mineral oil");
    }

    #[test]
    fn numerals_and_class_names() {
        assert_eq!(sanitize_numeral("99.7"), "99_7");
        assert_eq!(sanitize_numeral("-40"), "minus_40");
        assert_eq!(class_name("SFsix_MIXTURE"), "SFSIX_MIXTURE");
        assert_eq!(class_name("RESPONSIBILITY OF THE SUPPLIER"), "RESPONSIBILITY_OF_THE_SUPPLIER");
    }
}

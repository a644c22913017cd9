use serde::{Deserialize, Serialize};

use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Number,
    Punctuation,
    Symbol,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Word => "word",
            TokenKind::Number => "number",
            TokenKind::Punctuation => "punctuation",
            TokenKind::Symbol => "symbol",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub span: Span,
    pub kind: TokenKind,
    pub text: String,
    pub norm: String,
}

const SYMBOLS: &str = "<>=+%°/\\*^~|≤≥±×÷$€£&#@§";

fn is_subscript_digit(c: char) -> bool {
    ('\u{2080}'..='\u{2089}').contains(&c)
}

fn is_group_space(c: char) -> bool {
    matches!(c, ' ' | '\u{00A0}' | '\u{202F}')
}

/// Replaces subscript digits `₀`..`₉` with their ASCII counterparts.
pub fn fold_subscripts(s: &str) -> String {
    s.chars().map(|c| if is_subscript_digit(c) { char::from(b'0' + (c as u32 - 0x2080) as u8) } else { c }).collect()
}

/// Lowercases, folds subscript digits and the Greek mu onto the micro sign,
/// and collapses whitespace runs to a single space.
///
/// Idempotent: `normalize(&normalize(x)) == normalize(x)`.
pub fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        for l in c.to_lowercase() {
            let l = if is_subscript_digit(l) {
                char::from(b'0' + (l as u32 - 0x2080) as u8)
            } else if l == '\u{03BC}' {
                '\u{00B5}'
            } else {
                l
            };
            out.push(l);
        }
    }
    out
}

/// Splits `text` into word, number, punctuation and symbol tokens.
///
/// Numbers accept a decimal comma or dot, and absorb space-separated groups of
/// exactly three digits when the leading group has at most three digits
/// (`1 500 000`). The number's `norm` drops the grouping and uses a dot.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }

        let start = i;
        let kind;
        let norm;
        if c.is_ascii_digit() {
            i = scan_number(&chars, i);
            kind = TokenKind::Number;
            norm = chars[start..i]
                .iter()
                .filter(|c| !is_group_space(**c))
                .map(|&c| if c == ',' { '.' } else { c })
                .collect::<String>();
        } else if c.is_alphanumeric() || is_subscript_digit(c) {
            while i < n && (chars[i].is_alphanumeric() || is_subscript_digit(chars[i])) {
                i += 1;
            }
            kind = TokenKind::Word;
            norm = normalize(&chars[start..i].iter().collect::<String>());
        } else {
            i += 1;
            kind = if SYMBOLS.contains(c) { TokenKind::Symbol } else { TokenKind::Punctuation };
            norm = normalize(&c.to_string());
        }

        tokens.push(Token { span: Span::new(start, i), kind, text: chars[start..i].iter().collect(), norm });
    }
    tokens
}

fn scan_number(chars: &[char], start: usize) -> usize {
    let n = chars.len();
    let mut i = start;
    while i < n && chars[i].is_ascii_digit() {
        i += 1;
    }

    if i - start <= 3 {
        // "1 500", "1 500 000": a space followed by exactly three digits
        while i + 4 <= n
            && is_group_space(chars[i])
            && chars[i + 1..i + 4].iter().all(|c| c.is_ascii_digit())
            && !chars.get(i + 4).is_some_and(|c| c.is_ascii_digit())
        {
            i += 4;
        }
    }

    if i + 1 < n && matches!(chars[i], ',' | '.') && chars[i + 1].is_ascii_digit() {
        i += 1;
        while i < n && chars[i].is_ascii_digit() {
            i += 1;
        }
    }
    i
}

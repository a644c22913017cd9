use serde::{Deserialize, Serialize};

use super::{Span, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub span: Span,
    pub index: usize,
}

pub const DEFAULT_ABBREVIATIONS: &[&str] = &["e.g.", "i.e.", "etc.", "fig.", "no.", "cf.", "vs."];

const CLOSERS: &[&str] = &[")", "]", "\"", "'", "»", "”", "’"];

/// Rule-based sentence splitter.
///
/// A boundary follows `.`, `!` or `?` (plus any closing brackets or quotes
/// glued to it) when the next token is separated by whitespace and starts
/// with a capital letter, or when the text ends. A blank line always ends a
/// sentence.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: Vec<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        SentenceSplitter::new(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn new<'a>(abbreviations: impl IntoIterator<Item = &'a str>) -> Self {
        SentenceSplitter { abbreviations: abbreviations.into_iter().map(str::to_lowercase).collect() }
    }

    pub fn split(&self, text: &str, tokens: &[Token]) -> Vec<SentenceSpan> {
        let chars: Vec<char> = text.chars().collect();
        let mut sentences = Vec::new();
        let mut first = 0;
        let mut k = 0;

        while k < tokens.len() {
            let mut last = k;
            let boundary = if k + 1 == tokens.len() {
                true
            } else if is_terminal(&tokens[k]) {
                while last + 1 < tokens.len()
                    && CLOSERS.contains(&tokens[last + 1].text.as_str())
                    && tokens[last + 1].span.start == tokens[last].span.end
                {
                    last += 1;
                }
                match tokens.get(last + 1) {
                    None => true,
                    Some(next) => {
                        let gap = &chars[tokens[last].span.end..next.span.start];
                        !gap.is_empty()
                            && (is_paragraph_break(gap)
                                || (starts_upper(next) && !self.is_abbreviation(&chars, &tokens[k])))
                    }
                }
            } else {
                let gap = &chars[tokens[k].span.end..tokens[k + 1].span.start];
                is_paragraph_break(gap)
            };

            if boundary {
                sentences.push(SentenceSpan {
                    span: Span::new(tokens[first].span.start, tokens[last].span.end),
                    index: sentences.len(),
                });
                first = last + 1;
            }
            k = last + 1;
        }
        sentences
    }

    fn is_abbreviation(&self, chars: &[char], dot: &Token) -> bool {
        if dot.text != "." {
            return false;
        }
        let end = dot.span.end;
        let mut start = dot.span.start;
        while start > 0 && (chars[start - 1].is_alphanumeric() || chars[start - 1] == '.') {
            start -= 1;
        }
        let candidate: String = chars[start..end].iter().collect::<String>().to_lowercase();
        self.abbreviations.contains(&candidate)
    }
}

/// Splits with the default abbreviation list.
pub fn split_sentences(text: &str, tokens: &[Token]) -> Vec<SentenceSpan> {
    SentenceSplitter::default().split(text, tokens)
}

fn is_terminal(token: &Token) -> bool {
    token.kind == TokenKind::Punctuation && matches!(token.text.as_str(), "." | "!" | "?")
}

fn starts_upper(token: &Token) -> bool {
    token.text.chars().next().is_some_and(char::is_uppercase)
}

fn is_paragraph_break(gap: &[char]) -> bool {
    gap.iter().filter(|c| **c == '\n').count() >= 2
}

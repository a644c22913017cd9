use serde::{Deserialize, Serialize};

use super::deontic::{classify_sentence, find_markers, DeonticLexicon, StatementClass};
use super::ExtractError;
use crate::lexicon::{Lexicon, LOOKUP};
use crate::text::{AnnotatedDocument, SentenceSpan, Span};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptSlot {
    pub uri: String,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredRequirement {
    pub req_id: String,
    pub doc_id: String,
    pub sentence_span: Span,
    pub sentence_text: String,
    pub classification: StatementClass,
    pub distinguish_features: Vec<String>,
    pub concepts: Vec<ConceptSlot>,
    pub conditions: Vec<String>,
}

const REGULATION_CLASS: &str = "regulation";
const REGULATION_HEADS: &[&str] = &["regulation", "standard", "law", "directive", "legislation"];
const CLAUSE_KEYWORDS: &[&str] = &["accordance", "conformance", "compliance"];
const CLAUSE_END: &[&str] = &[",", ";", ".", ":"];
const COORDINATORS: &[&str] = &["and", "or"];
pub(crate) const DETERMINERS: &[&str] = &["the", "a", "an", "their", "its", "any", "all", "this", "these", "those"];

/// A "in accordance with ..." clause split into its conjuncts.
struct Clause {
    keyword: String,
    coordinator: String,
    conjuncts: Vec<Conjunct>,
}

struct Conjunct {
    text: String,
    regulation: bool,
}

/// English plural to singular for the last word of a phrase.
pub(crate) fn singularize_last(phrase: &str) -> String {
    let (head, last) = match phrase.rsplit_once(' ') {
        Some((h, l)) => (Some(h), l),
        None => (None, phrase),
    };
    let lower = last.to_lowercase();
    let single = if lower.ends_with("ies") && last.len() > 4 {
        format!("{}y", &last[..last.len() - 3])
    } else if lower.ends_with("sses") {
        last[..last.len() - 2].to_string()
    } else if lower.ends_with('s') && !lower.ends_with("ss") && !lower.ends_with("us") && last.len() > 3 {
        last[..last.len() - 1].to_string()
    } else {
        last.to_string()
    };
    match head {
        Some(h) => format!("{h} {single}"),
        None => single,
    }
}

/// Whether a conjunct names a regulation, by head word or lexicon class.
pub(crate) fn is_regulation_text(text: &str, lex: &Lexicon) -> bool {
    let head = text.rsplit(' ').next().unwrap_or("").to_lowercase();
    REGULATION_HEADS.contains(&head.as_str()) || lex.resolve(text).is_some_and(|e| e.class_name == REGULATION_CLASS)
}

fn clauses(doc: &AnnotatedDocument, sentence: Span, lex: &Lexicon) -> Vec<Clause> {
    let range = doc.token_range(sentence);
    let tokens = &doc.tokens()[range.clone()];
    let regulation_spans: Vec<Span> = doc
        .annotations_within(LOOKUP, sentence)
        .into_iter()
        .filter(|a| a.feature_str("class") == Some(REGULATION_CLASS))
        .map(|a| a.span)
        .collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i + 2 < tokens.len() {
        let opens = tokens[i].norm == "in"
            && CLAUSE_KEYWORDS.contains(&tokens[i + 1].norm.as_str())
            && tokens[i + 2].norm == "with";
        if !opens {
            i += 1;
            continue;
        }
        let keyword = tokens[i + 1].norm.clone();
        let body_start = i + 3;
        let body_end =
            (body_start..tokens.len()).find(|&k| CLAUSE_END.contains(&tokens[k].norm.as_str())).unwrap_or(tokens.len());

        // Split on coordinators, commas and the slash of "and/or".
        let mut groups: Vec<Vec<usize>> = vec![Vec::new()];
        let mut coordinator = None;
        for (k, token) in tokens.iter().enumerate().take(body_end).skip(body_start) {
            let norm = token.norm.as_str();
            if COORDINATORS.contains(&norm) || norm == "/" {
                coordinator.get_or_insert_with(|| norm.to_string());
                groups.push(Vec::new());
            } else {
                groups.last_mut().unwrap().push(k);
            }
        }
        let groups: Vec<Vec<usize>> = groups
            .into_iter()
            .map(|g| g.into_iter().skip_while(|&k| DETERMINERS.contains(&tokens[k].norm.as_str())).collect::<Vec<_>>())
            .filter(|g| !g.is_empty())
            .collect();

        let last_head = groups.last().and_then(|g| g.last()).map(|&k| tokens[k].text.clone());
        let conjuncts = groups
            .iter()
            .map(|g| {
                let span = doc.tokens_span(range.start + g[0]..range.start + g[g.len() - 1] + 1);
                let mut text = doc.slice(span).to_string();
                if g.len() == 1 && g.as_slice() != groups.last().unwrap().as_slice() {
                    if let Some(head) = &last_head {
                        text = format!("{text} {head}");
                    }
                }
                let text = singularize_last(&text);
                let regulation = is_regulation_text(&text, lex) || regulation_spans.iter().any(|s| s.overlaps(span));
                Conjunct { text, regulation }
            })
            .collect::<Vec<_>>();

        if !conjuncts.is_empty() {
            out.push(Clause { keyword, coordinator: coordinator.unwrap_or_else(|| "and".into()), conjuncts });
        }
        i = body_end;
    }
    out
}

/// Decomposes a requirement sentence into distinguish features, concept
/// slots and conditions.
///
/// Distinguish features list the deontic markers, then regulation
/// references: a clause citing only regulations is reported as one grouped
/// feature (`in conformance with (A and B)`), a mixed clause contributes each
/// regulation on its own.
pub fn extract_structured(
    doc: &AnnotatedDocument,
    sentence: &SentenceSpan,
    deontic: &DeonticLexicon,
    lex: &Lexicon,
) -> Result<StructuredRequirement, ExtractError> {
    let classification = classify_sentence(doc, sentence, deontic);
    if classification == StatementClass::Statement {
        return Err(ExtractError::NotARequirement { doc_id: doc.doc_id.clone(), index: sentence.index });
    }

    let mut distinguish: Vec<String> =
        find_markers(doc, sentence.span, deontic).into_iter().map(|m| m.phrase).collect();
    let mut conditions = Vec::new();
    for clause in clauses(doc, sentence.span, lex) {
        let regulations: Vec<&str> =
            clause.conjuncts.iter().filter(|c| c.regulation).map(|c| c.text.as_str()).collect();
        if !regulations.is_empty() {
            if regulations.len() == clause.conjuncts.len() {
                let joined = regulations.join(&format!(" {} ", clause.coordinator));
                distinguish.push(format!("in conformance with ({joined})"));
            } else {
                distinguish.extend(regulations.iter().map(|r| r.to_string()));
            }
        }
        conditions.extend(clause.conjuncts.iter().map(|c| format!("in {} with {}", clause.keyword, c.text)));
    }

    let concepts = doc
        .annotations_within(LOOKUP, sentence.span)
        .into_iter()
        .filter(|a| a.feature_str("class") != Some(REGULATION_CLASS))
        .map(|a| ConceptSlot {
            uri: a.feature_str("URI").unwrap_or_default().to_string(),
            surface: doc.slice(a.span).to_string(),
        })
        .collect();

    Ok(StructuredRequirement {
        req_id: format!("{}-s{}", doc.doc_id, sentence.index),
        doc_id: doc.doc_id.clone(),
        sentence_span: sentence.span,
        sentence_text: doc.slice(sentence.span).to_string(),
        classification,
        distinguish_features: distinguish,
        concepts,
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_forms() {
        assert_eq!(singularize_last("local regulations"), "local regulation");
        assert_eq!(singularize_last("mode of transport"), "mode of transport");
        assert_eq!(singularize_last("national bodies"), "national body");
        assert_eq!(singularize_last("gas"), "gas");
        assert_eq!(singularize_last("process"), "process");
    }
}

use std::ops::Range;

use super::ast::{Control, FeatureSource, RulePhase, Scope};
use super::matcher::{Compiled, Matcher, Window};
use crate::text::{AnnotatedDocument, Annotation, FeatureValue, Features};

/// Pseudo-annotation type exposing every token (`string`, `norm`, `kind`).
pub const TOKEN: &str = "Token";
/// Pseudo-annotation type exposing every sentence (`index`).
pub const SENTENCE: &str = "Sentence";

/// A fired rule: which rule, over which tokens, with which bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub rule_index: usize,
    pub rule: String,
    /// Document token indices.
    pub tokens: Range<usize>,
    pub bindings: Vec<(String, Range<usize>)>,
}

fn pseudo_annotations(phase: &RulePhase, doc: &AnnotatedDocument) -> Vec<Annotation> {
    let wants = |t: &str| phase.input_types.iter().any(|x| x == t);
    let mut out = Vec::new();
    if wants(TOKEN) {
        for tok in doc.tokens() {
            let mut features = Features::new();
            features.insert("string".into(), tok.text.as_str().into());
            features.insert("norm".into(), tok.norm.as_str().into());
            features.insert("kind".into(), tok.kind.as_str().into());
            out.push(Annotation { id: 0, type_name: TOKEN.into(), span: tok.span, features });
        }
    }
    if wants(SENTENCE) {
        for s in doc.sentences() {
            let mut features = Features::new();
            features.insert("index".into(), FeatureValue::Num(s.index as f64));
            out.push(Annotation { id: 0, type_name: SENTENCE.into(), span: s.span, features });
        }
    }
    out
}

fn windows(phase: &RulePhase, doc: &AnnotatedDocument) -> Vec<Range<usize>> {
    match phase.scope {
        Scope::Document => std::iter::once(0..doc.tokens().len()).collect(),
        Scope::Sentence => doc.sentences().iter().map(|s| doc.token_range(s.span)).collect(),
    }
}

/// Runs one phase and reports the matches selected by its control strategy,
/// in firing order.
pub fn run_phase_matches(phase: &RulePhase, doc: &AnnotatedDocument) -> Vec<MatchRecord> {
    let pseudo = pseudo_annotations(phase, doc);
    let visible: Vec<&Annotation> =
        doc.annotations().iter().filter(|a| phase.input_types.contains(&a.type_name)).chain(pseudo.iter()).collect();

    let mut covering: Vec<Vec<&Annotation>> = vec![Vec::new(); doc.tokens().len()];
    for ann in &visible {
        for t in doc.token_range(ann.span) {
            covering[t].push(ann);
        }
    }

    let compiled: Vec<Compiled> = phase.rules.iter().map(|r| Compiled::new(&r.lhs)).collect();
    let mut records = Vec::new();

    for range in windows(phase, doc) {
        let offset = range.start;
        let window = Window { covering: covering[range.clone()].to_vec() };
        let mut matchers: Vec<Matcher> = compiled.iter().map(|c| Matcher::new(c, &window)).collect();
        let record = |rule_index: usize, start: usize, d: &super::matcher::Derivation| MatchRecord {
            rule_index,
            rule: phase.rules[rule_index].name.clone(),
            tokens: offset + start..offset + d.end,
            bindings: d
                .bindings
                .iter()
                .map(|&(l, s, e)| (compiled[rule_index].labels[l].clone(), offset + s..offset + e))
                .collect(),
        };

        let n = window.len();
        let mut pos = 0;
        while pos < n {
            match phase.control {
                Control::Appelt => {
                    let mut best: Option<(usize, super::matcher::Derivation)> = None;
                    for (r, m) in matchers.iter_mut().enumerate() {
                        let Some(d) = m.matches_at(pos).into_iter().next() else { continue };
                        let better = match &best {
                            None => true,
                            Some((br, bd)) => {
                                d.end > bd.end
                                    || (d.end == bd.end && phase.rules[r].priority > phase.rules[*br].priority)
                            }
                        };
                        if better {
                            best = Some((r, d));
                        }
                    }
                    match best {
                        Some((r, d)) => {
                            records.push(record(r, pos, &d));
                            pos = d.end;
                        }
                        None => pos += 1,
                    }
                }
                Control::First => {
                    let hit =
                        matchers.iter_mut().enumerate().find_map(|(r, m)| m.matches_at(pos).pop().map(|d| (r, d)));
                    match hit {
                        Some((r, d)) => {
                            records.push(record(r, pos, &d));
                            pos = d.end;
                        }
                        None => pos += 1,
                    }
                }
                Control::All => {
                    for (r, m) in matchers.iter_mut().enumerate() {
                        for d in m.matches_at(pos).iter().rev() {
                            records.push(record(r, pos, d));
                        }
                    }
                    pos += 1;
                }
            }
        }
    }
    records
}

/// Runs one phase and returns the annotations its actions create. The
/// document is not modified; ids are provisional, following `doc.next_id()`.
pub fn run_phase(phase: &RulePhase, doc: &AnnotatedDocument) -> Vec<Annotation> {
    let pseudo = pseudo_annotations(phase, doc);
    let mut out = Vec::new();
    for m in run_phase_matches(phase, doc) {
        let rule = &phase.rules[m.rule_index];
        for action in &rule.rhs {
            let Some((_, range)) = m.bindings.iter().find(|(l, _)| *l == action.binding) else { continue };
            if range.is_empty() {
                continue;
            }
            let span = doc.tokens_span(range.clone());
            let mut features = Features::new();
            for (name, source) in &action.features {
                let value = match source {
                    FeatureSource::Literal(v) => Some(v.clone()),
                    FeatureSource::Copy { binding, ann_type, feature } => m
                        .bindings
                        .iter()
                        .find(|(l, r)| l == binding && !r.is_empty())
                        .and_then(|(_, r)| {
                            let within = doc.tokens_span(r.clone());
                            first_within(doc, &pseudo, phase, ann_type, within)
                        })
                        .and_then(|a| a.feature(feature).cloned()),
                };
                if let Some(v) = value {
                    features.insert(name.clone(), v);
                }
            }
            features.entry("rule".into()).or_insert_with(|| rule.name.as_str().into());
            out.push(Annotation {
                id: doc.next_id() + out.len() as u64,
                type_name: action.out_type.clone(),
                span,
                features,
            });
        }
    }
    out
}

fn first_within<'a>(
    doc: &'a AnnotatedDocument,
    pseudo: &'a [Annotation],
    phase: &RulePhase,
    ann_type: &str,
    within: crate::text::Span,
) -> Option<&'a Annotation> {
    if !phase.input_types.iter().any(|t| t == ann_type) {
        return None;
    }
    doc.annotations()
        .iter()
        .chain(pseudo.iter())
        .filter(|a| a.type_name == ann_type && within.contains(a.span))
        .min_by_key(|a| (a.span.start, std::cmp::Reverse(a.span.end), a.id))
}

/// Applies phases in order, each seeing the annotations of the ones before.
pub fn run_cascade(phases: &[RulePhase], doc: &AnnotatedDocument) -> AnnotatedDocument {
    let mut doc = doc.clone();
    for phase in phases {
        let created = run_phase(phase, &doc);
        doc.merge(created);
    }
    doc
}

//! Brute-force reference for appelt matching: decide membership of every
//! (rule, i, j) triple independently, then select greedily.

use std::collections::HashMap;

use normreq_core::rules::{
    Action, ConstraintOp, Control, FeatureConstraint, FeatureSource, PatternNode, Rule, RulePhase, Scope,
};
use normreq_core::text::{AnnotatedDocument, Annotation, FeatureValue, Features, Span};
use rand::rngs::StdRng;
use rand::Rng;

pub struct Oracle<'a> {
    covering: Vec<Vec<&'a Annotation>>,
    memo: HashMap<(usize, usize, usize, usize), bool>,
}

impl<'a> Oracle<'a> {
    pub fn new(doc: &'a AnnotatedDocument, input: &[String]) -> Self {
        let covering = doc
            .tokens()
            .iter()
            .map(|t| {
                doc.annotations()
                    .iter()
                    .filter(|a| input.contains(&a.type_name))
                    .filter(|a| a.span.start <= t.span.start && t.span.end <= a.span.end)
                    .collect()
            })
            .collect();
        Oracle { covering, memo: HashMap::new() }
    }

    fn holds(&self, c: &FeatureConstraint, i: usize) -> bool {
        self.covering[i].iter().any(|a| {
            a.type_name == c.ann_type
                && match &c.op {
                    ConstraintOp::Exists => true,
                    ConstraintOp::Eq { feature, value } => a.feature(feature) == Some(value),
                    ConstraintOp::Neq { feature, value } => a.feature(feature) != Some(value),
                }
        })
    }

    /// Does `p` match exactly tokens i..j?
    pub fn matches(&mut self, p: &PatternNode, i: usize, j: usize) -> bool {
        let key = (p as *const PatternNode as usize, usize::MAX, i, j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = match p {
            PatternNode::Constraint(cs) => j == i + 1 && cs.iter().all(|c| self.holds(c, i)),
            PatternNode::Sequence(children) => self.seq(children, i, j),
            PatternNode::Alternation(children) => children.iter().any(|c| self.matches(c, i, j)),
            PatternNode::Binding { child, .. } => self.matches(child, i, j),
            PatternNode::Quantified { child, min, max } => {
                // Extra zero-length repetitions never add new spans, so
                // min + (j - i) repetitions suffice.
                let cap = (*min as usize + (j - i)).min(max.map_or(usize::MAX, |m| m as usize));
                (*min as usize..=cap).any(|k| self.reps(child, k, i, j))
            }
        };
        self.memo.insert(key, v);
        v
    }

    fn seq(&mut self, children: &[PatternNode], i: usize, j: usize) -> bool {
        match children.split_first() {
            None => i == j,
            Some((head, rest)) => (i..=j).any(|m| self.matches(head, i, m) && self.seq(rest, m, j)),
        }
    }

    fn reps(&mut self, child: &PatternNode, k: usize, i: usize, j: usize) -> bool {
        if k == 0 {
            return i == j;
        }
        let key = (child as *const PatternNode as usize, k, i, j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = (i..=j).any(|m| self.matches(child, i, m) && self.reps(child, k - 1, m, j));
        self.memo.insert(key, v);
        v
    }
}

/// Appelt selection over all (rule, start, end) memberships.
pub fn oracle_appelt(phase: &RulePhase, doc: &AnnotatedDocument) -> Vec<(usize, usize, usize)> {
    let n = doc.tokens().len();
    let mut oracle = Oracle::new(doc, &phase.input_types);
    let mut all = Vec::new();
    for (r, rule) in phase.rules.iter().enumerate() {
        for i in 0..n {
            for j in i + 1..=n {
                if oracle.matches(&rule.lhs, i, j) {
                    all.push((r, i, j));
                }
            }
        }
    }
    all.sort_by_key(|&(r, i, j)| (i, std::cmp::Reverse(j - i), std::cmp::Reverse(phase.rules[r].priority), r));
    let mut cursor = 0;
    let mut chosen = Vec::new();
    for (r, i, j) in all {
        if i >= cursor {
            chosen.push((r, i, j));
            cursor = j;
        }
    }
    chosen
}

fn random_constraint(rng: &mut StdRng) -> FeatureConstraint {
    let ty = if rng.gen_bool(0.5) { "A" } else { "B" };
    match rng.gen_range(0..3) {
        0 => FeatureConstraint::exists(ty),
        1 => FeatureConstraint::eq(ty, "f", FeatureValue::Num(rng.gen_range(1..3) as f64)),
        _ => FeatureConstraint::neq(ty, "f", FeatureValue::Num(rng.gen_range(1..3) as f64)),
    }
}

pub fn random_pattern(rng: &mut StdRng, depth: u32) -> PatternNode {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..4) };
    match choice {
        0 => {
            let k = if rng.gen_bool(0.8) { 1 } else { 2 };
            PatternNode::Constraint((0..k).map(|_| random_constraint(rng)).collect())
        }
        1 => PatternNode::Sequence((0..rng.gen_range(2..4)).map(|_| random_pattern(rng, depth - 1)).collect()),
        2 => PatternNode::Alternation((0..rng.gen_range(2..4)).map(|_| random_pattern(rng, depth - 1)).collect()),
        _ => {
            let min = rng.gen_range(0..3);
            let max = if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(min.max(1)..=3)) };
            PatternNode::quantified(random_pattern(rng, depth - 1), min, max)
        }
    }
}

/// A random single-sentence document of up to 20 tokens, each covered by
/// annotations of types A and B with a numeric feature `f`.
pub fn random_document(rng: &mut StdRng) -> AnnotatedDocument {
    let n = rng.gen_range(1..=20);
    let text = vec!["w"; n].join(" ");
    let mut doc = AnnotatedDocument::new("rand", "rand", text);
    let mut anns = Vec::new();
    let mut i = 0;
    while i < n {
        let len = if rng.gen_bool(0.8) { 1 } else { rng.gen_range(1..=3).min(n - i) };
        for ty in ["A", "B"] {
            if rng.gen_bool(0.6) {
                let mut features = Features::new();
                if rng.gen_bool(0.8) {
                    features.insert("f".into(), FeatureValue::Num(rng.gen_range(1..3) as f64));
                }
                anns.push(Annotation {
                    id: 0,
                    type_name: ty.into(),
                    span: Span::new(2 * i, 2 * (i + len) - 1),
                    features,
                });
            }
        }
        i += len;
    }
    doc.merge(anns);
    doc
}

pub fn random_phase(rng: &mut StdRng) -> RulePhase {
    let rules = (0..rng.gen_range(1..=3))
        .map(|r| Rule {
            name: format!("R{r}"),
            priority: rng.gen_range(-1..=1),
            lhs: PatternNode::bind("m", random_pattern(rng, 3)),
            rhs: vec![Action {
                binding: "m".into(),
                out_type: "Out".into(),
                features: [("rule".to_string(), FeatureSource::Literal(format!("R{r}").into()))].into(),
            }],
        })
        .collect();
    RulePhase {
        name: "Random".into(),
        input_types: vec!["A".into(), "B".into()],
        control: Control::Appelt,
        scope: Scope::Document,
        rules,
    }
}

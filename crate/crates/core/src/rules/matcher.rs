//! Match enumeration for one rule over one token window.
//!
//! `ends(node, i)` yields every position `j` such that the node matches tokens
//! `i..j`, one derivation per distinct `j`, longest first. When several
//! derivations reach the same end the greedy one is kept: longer earlier
//! components in sequences, earlier branches in alternations, more
//! repetitions in quantifiers.

use std::collections::HashMap;
use std::rc::Rc;

use super::ast::{ConstraintOp, FeatureConstraint, PatternNode};
use crate::text::Annotation;

/// Per-token view of the annotations a phase can see.
pub(crate) struct Window<'a> {
    /// Annotations covering each token of the window, window-relative.
    pub covering: Vec<Vec<&'a Annotation>>,
}

impl Window<'_> {
    pub fn len(&self) -> usize {
        self.covering.len()
    }
}

/// Bound label index with its window-relative token range.
pub(crate) type Bound = (usize, usize, usize);

#[derive(Debug, Clone)]
pub(crate) struct Derivation {
    pub end: usize,
    pub bindings: Vec<Bound>,
}

enum Node {
    Constraint(Vec<FeatureConstraint>),
    Sequence(Vec<usize>),
    Alternation(Vec<usize>),
    Quantified { child: usize, min: u32, max: Option<u32> },
    Binding { label: usize, child: usize },
}

/// A rule's LHS flattened into an arena, with binding labels interned.
pub(crate) struct Compiled {
    nodes: Vec<Node>,
    root: usize,
    pub labels: Vec<String>,
}

impl Compiled {
    pub fn new(pattern: &PatternNode) -> Compiled {
        let mut compiled = Compiled { nodes: Vec::new(), root: 0, labels: Vec::new() };
        compiled.root = compiled.add(pattern);
        compiled
    }

    fn add(&mut self, pattern: &PatternNode) -> usize {
        let node = match pattern {
            PatternNode::Constraint(cs) => Node::Constraint(cs.clone()),
            PatternNode::Sequence(children) => Node::Sequence(children.iter().map(|c| self.add(c)).collect()),
            PatternNode::Alternation(children) => Node::Alternation(children.iter().map(|c| self.add(c)).collect()),
            PatternNode::Quantified { child, min, max } => {
                Node::Quantified { child: self.add(child), min: *min, max: *max }
            }
            PatternNode::Binding { label, child } => {
                let child = self.add(child);
                let label = match self.labels.iter().position(|l| l == label) {
                    Some(idx) => idx,
                    None => {
                        self.labels.push(label.clone());
                        self.labels.len() - 1
                    }
                };
                Node::Binding { label, child }
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

pub(crate) fn constraint_holds(c: &FeatureConstraint, covering: &[&Annotation]) -> bool {
    covering.iter().filter(|a| a.type_name == c.ann_type).any(|a| match &c.op {
        ConstraintOp::Exists => true,
        ConstraintOp::Eq { feature, value } => a.feature(feature).is_some_and(|v| v.matches(value)),
        ConstraintOp::Neq { feature, value } => !a.feature(feature).is_some_and(|v| v.matches(value)),
    })
}

fn merge_bindings(a: &[Bound], b: &[Bound]) -> Vec<Bound> {
    let mut out = a.to_vec();
    for &(label, start, end) in b {
        match out.iter_mut().find(|(l, _, _)| *l == label) {
            Some(existing) => {
                existing.1 = existing.1.min(start);
                existing.2 = existing.2.max(end);
            }
            None => out.push((label, start, end)),
        }
    }
    out
}

// Keeps the first derivation seen for each end.
fn insert_first(out: &mut Vec<Derivation>, d: Derivation) {
    if !out.iter().any(|x| x.end == d.end) {
        out.push(d);
    }
}

fn sorted(mut v: Vec<Derivation>) -> Rc<Vec<Derivation>> {
    v.sort_by_key(|r| std::cmp::Reverse(r.end));
    Rc::new(v)
}

pub(crate) struct Matcher<'c, 'w, 'a> {
    compiled: &'c Compiled,
    window: &'w Window<'a>,
    memo: HashMap<(usize, usize, usize), Rc<Vec<Derivation>>>,
}

impl<'c, 'w, 'a> Matcher<'c, 'w, 'a> {
    pub fn new(compiled: &'c Compiled, window: &'w Window<'a>) -> Self {
        Matcher { compiled, window, memo: HashMap::new() }
    }

    /// Non-empty matches of the whole pattern starting at `start`, longest first.
    pub fn matches_at(&mut self, start: usize) -> Vec<Derivation> {
        let root = self.compiled.root;
        self.ends(root, start).iter().filter(|d| d.end > start).cloned().collect()
    }

    fn ends(&mut self, node: usize, i: usize) -> Rc<Vec<Derivation>> {
        if let Some(hit) = self.memo.get(&(node, 0, i)) {
            return hit.clone();
        }
        let compiled = self.compiled;
        let result = match &compiled.nodes[node] {
            Node::Constraint(cs) => {
                let holds = i < self.window.len() && cs.iter().all(|c| constraint_holds(c, &self.window.covering[i]));
                let v = if holds { vec![Derivation { end: i + 1, bindings: Vec::new() }] } else { Vec::new() };
                Rc::new(v)
            }
            Node::Sequence(_) => self.seq_ends(node, 0, i),
            Node::Alternation(children) => {
                let mut out = Vec::new();
                for &child in children {
                    for d in self.ends(child, i).iter() {
                        insert_first(&mut out, d.clone());
                    }
                }
                sorted(out)
            }
            Node::Quantified { child, min, max } => self.quantified(*child, *min, *max, i),
            Node::Binding { label, child } => {
                let out = self
                    .ends(*child, i)
                    .iter()
                    .map(|d| Derivation { end: d.end, bindings: merge_bindings(&d.bindings, &[(*label, i, d.end)]) })
                    .collect();
                sorted(out)
            }
        };
        self.memo.insert((node, 0, i), result.clone());
        result
    }

    // Matches of children[k..] of a sequence node, memoized under key k + 1.
    fn seq_ends(&mut self, node: usize, k: usize, i: usize) -> Rc<Vec<Derivation>> {
        let compiled = self.compiled;
        let Node::Sequence(children) = &compiled.nodes[node] else { unreachable!() };
        if k == children.len() {
            return Rc::new(vec![Derivation { end: i, bindings: Vec::new() }]);
        }
        if k > 0 {
            if let Some(hit) = self.memo.get(&(node, k + 1, i)) {
                return hit.clone();
            }
        }
        let mut out = Vec::new();
        let heads = self.ends(children[k], i);
        for head in heads.iter() {
            let tails = self.seq_ends(node, k + 1, head.end);
            for tail in tails.iter() {
                if out.iter().any(|x: &Derivation| x.end == tail.end) {
                    continue;
                }
                out.push(Derivation { end: tail.end, bindings: merge_bindings(&head.bindings, &tail.bindings) });
            }
        }
        let result = sorted(out);
        if k > 0 {
            self.memo.insert((node, k + 1, i), result.clone());
        }
        result
    }

    fn quantified(&mut self, child: usize, min: u32, max: Option<u32>, i: usize) -> Rc<Vec<Derivation>> {
        let mut result: Vec<Derivation> = Vec::new();
        let mut level = vec![Derivation { end: i, bindings: Vec::new() }];
        if min == 0 {
            result.push(level[0].clone());
        }
        let mut k = 0u32;
        while max.is_none_or(|m| k < m) {
            let mut next: Vec<Derivation> = Vec::new();
            for d in &level {
                for c in self.ends(child, d.end).iter() {
                    insert_first(
                        &mut next,
                        Derivation { end: c.end, bindings: merge_bindings(&d.bindings, &c.bindings) },
                    );
                }
            }
            k += 1;
            if next.is_empty() {
                break;
            }
            if k >= min {
                let mut grew = false;
                for d in &next {
                    match result.iter_mut().find(|r| r.end == d.end) {
                        Some(existing) => *existing = d.clone(),
                        None => {
                            grew = true;
                            result.push(d.clone());
                        }
                    }
                }
                // Every later level only reaches ends already collected.
                if !grew && k > min {
                    break;
                }
            }
            level = next;
        }
        sorted(result)
    }
}

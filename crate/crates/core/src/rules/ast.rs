use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text::FeatureValue;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum ConstraintOp {
    Exists,
    Eq {
        feature: String,
        value: FeatureValue,
    },
    /// Satisfied when the feature is absent or differs.
    Neq {
        feature: String,
        value: FeatureValue,
    },
}

/// One `Type` or `Type.feature op value` test inside `{...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConstraint {
    pub ann_type: String,
    pub op: ConstraintOp,
}

impl FeatureConstraint {
    pub fn exists(ann_type: impl Into<String>) -> Self {
        FeatureConstraint { ann_type: ann_type.into(), op: ConstraintOp::Exists }
    }

    pub fn eq(ann_type: impl Into<String>, feature: impl Into<String>, value: impl Into<FeatureValue>) -> Self {
        FeatureConstraint {
            ann_type: ann_type.into(),
            op: ConstraintOp::Eq { feature: feature.into(), value: value.into() },
        }
    }

    pub fn neq(ann_type: impl Into<String>, feature: impl Into<String>, value: impl Into<FeatureValue>) -> Self {
        FeatureConstraint {
            ann_type: ann_type.into(),
            op: ConstraintOp::Neq { feature: feature.into(), value: value.into() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternNode {
    /// Conjunction of constraints over a single token position.
    Constraint(Vec<FeatureConstraint>),
    Sequence(Vec<PatternNode>),
    Alternation(Vec<PatternNode>),
    Quantified {
        child: Box<PatternNode>,
        min: u32,
        max: Option<u32>,
    },
    Binding {
        label: String,
        child: Box<PatternNode>,
    },
}

impl PatternNode {
    pub fn quantified(child: PatternNode, min: u32, max: Option<u32>) -> Self {
        PatternNode::Quantified { child: Box::new(child), min, max }
    }

    pub fn bind(label: impl Into<String>, child: PatternNode) -> Self {
        PatternNode::Binding { label: label.into(), child: Box::new(child) }
    }

    /// Binding labels in pre-order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |node| {
            if let PatternNode::Binding { label, .. } = node {
                out.push(label.as_str());
            }
        });
        out
    }

    /// Annotation types tested anywhere under this node.
    pub fn constraint_types(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |node| {
            if let PatternNode::Constraint(cs) = node {
                out.extend(cs.iter().map(|c| c.ann_type.as_str()));
            }
        });
        out
    }

    /// The node bound to `label`, if any.
    pub fn find_binding(&self, label: &str) -> Option<&PatternNode> {
        let mut found = None;
        self.walk(&mut |node| {
            if let PatternNode::Binding { label: l, child } = node {
                if l == label && found.is_none() {
                    found = Some(child.as_ref());
                }
            }
        });
        found
    }

    fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a PatternNode)) {
        f(self);
        match self {
            PatternNode::Constraint(_) => {}
            PatternNode::Sequence(children) | PatternNode::Alternation(children) => {
                for c in children {
                    c.walk(f);
                }
            }
            PatternNode::Quantified { child, .. } | PatternNode::Binding { child, .. } => child.walk(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Literal(FeatureValue),
    /// Feature of the first `ann_type` annotation under `binding`.
    Copy {
        binding: String,
        ann_type: String,
        feature: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub binding: String,
    pub out_type: String,
    pub features: BTreeMap<String, FeatureSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub priority: i32,
    pub lhs: PatternNode,
    pub rhs: Vec<Action>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Control {
    #[default]
    Appelt,
    All,
    First,
}

impl Control {
    pub fn as_str(self) -> &'static str {
        match self {
            Control::Appelt => "appelt",
            Control::All => "all",
            Control::First => "first",
        }
    }
}

/// Window within which a single match must lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    #[default]
    Sentence,
    Document,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Sentence => "sentence",
            Scope::Document => "document",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulePhase {
    pub name: String,
    pub input_types: Vec<String>,
    pub control: Control,
    pub scope: Scope,
    pub rules: Vec<Rule>,
}

// Printing back to the rule DSL. `parse_rule_file(&phase.to_string())`
// reproduces the phase.

fn write_value(f: &mut fmt::Formatter<'_>, v: &FeatureValue) -> fmt::Result {
    match v {
        FeatureValue::Str(s) => {
            f.write_str("\"")?;
            for c in s.chars() {
                match c {
                    '"' => f.write_str("\\\"")?,
                    '\\' => f.write_str("\\\\")?,
                    '\n' => f.write_str("\\n")?,
                    c => write!(f, "{c}")?,
                }
            }
            f.write_str("\"")
        }
        FeatureValue::Num(n) => write!(f, "{n}"),
    }
}

impl fmt::Display for FeatureConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.op {
            ConstraintOp::Exists => f.write_str(&self.ann_type),
            ConstraintOp::Eq { feature, value } => {
                write!(f, "{}.{} == ", self.ann_type, feature)?;
                write_value(f, value)
            }
            ConstraintOp::Neq { feature, value } => {
                write!(f, "{}.{} != ", self.ann_type, feature)?;
                write_value(f, value)
            }
        }
    }
}

fn write_quantifier(f: &mut fmt::Formatter<'_>, min: u32, max: Option<u32>) -> fmt::Result {
    match (min, max) {
        (0, None) => f.write_str("*"),
        (1, None) => f.write_str("+"),
        (0, Some(1)) => f.write_str("?"),
        (n, None) => write!(f, "[{n},]"),
        (n, Some(m)) => write!(f, "[{n},{m}]"),
    }
}

impl PatternNode {
    // Writes the node as a single postfix-able element.
    fn fmt_element(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternNode::Constraint(cs) => {
                f.write_str("{")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("}")
            }
            PatternNode::Quantified { .. }
            | PatternNode::Binding { .. }
            | PatternNode::Sequence(_)
            | PatternNode::Alternation(_) => {
                f.write_str("(")?;
                self.fmt_body(f)?;
                f.write_str(")")
            }
        }
    }

    // Writes the node in a position where a sequence or alternation needs no
    // surrounding parentheses.
    fn fmt_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternNode::Sequence(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    c.fmt_item(f)?;
                }
                Ok(())
            }
            PatternNode::Alternation(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    match c {
                        PatternNode::Alternation(_) => c.fmt_element(f)?,
                        _ => c.fmt_body(f)?,
                    }
                }
                Ok(())
            }
            _ => self.fmt_item(f),
        }
    }

    // Writes the node as one item of a sequence.
    fn fmt_item(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternNode::Quantified { child, min, max } => {
                match child.as_ref() {
                    PatternNode::Constraint(_) => child.fmt_element(f)?,
                    PatternNode::Quantified { .. } | PatternNode::Binding { .. } => {
                        f.write_str("(")?;
                        child.fmt_item(f)?;
                        f.write_str(")")?;
                    }
                    _ => child.fmt_element(f)?,
                }
                write_quantifier(f, *min, *max)
            }
            PatternNode::Binding { label, child } => {
                match child.as_ref() {
                    PatternNode::Binding { .. } => {
                        f.write_str("(")?;
                        child.fmt_item(f)?;
                        f.write_str(")")?;
                    }
                    PatternNode::Quantified { .. } => child.fmt_item(f)?,
                    _ => child.fmt_element(f)?,
                }
                write!(f, ":{label}")
            }
            _ => self.fmt_element(f),
        }
    }
}

impl fmt::Display for PatternNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_body(f)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":{}.{} = {{", self.binding, self.out_type)?;
        for (i, (name, source)) in self.features.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{name} = ")?;
            match source {
                FeatureSource::Literal(v) => write_value(f, v)?,
                FeatureSource::Copy { binding, ann_type, feature } => write!(f, ":{binding}.{ann_type}.{feature}")?,
            }
        }
        if !self.features.is_empty() {
            f.write_str(" ")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for RulePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Phase: {}", self.name)?;
        writeln!(f, "Input: {}", self.input_types.join(" "))?;
        writeln!(f, "Options: control = {}, scope = {}", self.control.as_str(), self.scope.as_str())?;
        for rule in &self.rules {
            writeln!(f)?;
            writeln!(f, "Rule: {}", rule.name)?;
            if rule.priority != 0 {
                writeln!(f, "Priority: {}", rule.priority)?;
            }
            writeln!(f, "{}", rule.lhs)?;
            writeln!(f, "-->")?;
            for action in &rule.rhs {
                writeln!(f, "{action}")?;
            }
        }
        Ok(())
    }
}

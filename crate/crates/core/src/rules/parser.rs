use std::collections::{BTreeMap, HashSet};

use super::ast::{Action, Control, FeatureConstraint, FeatureSource, PatternNode, Rule, RulePhase, Scope};
use super::RuleError;
use crate::text::FeatureValue;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Sym(s) => format!("{s:?}"),
            Tok::Eof => "end of file".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &["-->", "==", "!=", "{", "}", "(", ")", "[", "]", ",", ".", ":", "=", "|", "*", "+", "?"];

fn lex(text: &str) -> Result<Vec<Lexeme>, RuleError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let start = i;
        let tok = if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Num(s.parse().expect("lexed number"))
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(RuleError::SyntaxError {
                            line,
                            col,
                            expected: "closing '\"'".into(),
                            found: "end of line".into(),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let escaped = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(&e @ ('"' | '\\')) => e,
                            other => {
                                return Err(RuleError::SyntaxError {
                                    line,
                                    col: col + (i - start),
                                    expected: "escape sequence".into(),
                                    found: other.map_or("end of file".into(), |c| format!("{c:?}")),
                                })
                            }
                        };
                        s.push(escaped);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            Tok::Str(s)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(RuleError::SyntaxError { line, col, expected: "token".into(), found: format!("{c:?}") });
            };
            i += sym.chars().count();
            Tok::Sym(sym)
        };
        out.push(Lexeme { tok, line, col });
        col += i - start;
    }
    out.push(Lexeme { tok: Tok::Eof, line, col });
    Ok(out)
}

const HEADERS: &[&str] = &["Phase", "Input", "Options", "Rule", "Priority"];

struct Parser {
    toks: Vec<Lexeme>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Lexeme {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Lexeme {
        let lx = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        lx
    }

    fn error<T>(&self, expected: impl Into<String>) -> Result<T, RuleError> {
        let lx = self.peek();
        Err(RuleError::SyntaxError { line: lx.line, col: lx.col, expected: expected.into(), found: lx.tok.describe() })
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(s) if *s == sym)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if self.at_sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), RuleError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            self.error(format!("{sym:?}"))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, RuleError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn at_header(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == name) && matches!(self.peek_at(1), Tok::Sym(":"))
    }

    fn at_any_header(&self) -> bool {
        HEADERS.iter().any(|h| self.at_header(h))
    }

    fn expect_header(&mut self, name: &str) -> Result<usize, RuleError> {
        if !self.at_header(name) {
            return self.error(format!("'{name}:'"));
        }
        let line = self.bump().line;
        self.bump();
        Ok(line)
    }

    fn phase(&mut self) -> Result<RulePhase, RuleError> {
        self.expect_header("Phase")?;
        let name = self.expect_ident("phase name")?;
        let mut phase = RulePhase {
            name,
            input_types: Vec::new(),
            control: Control::default(),
            scope: Scope::default(),
            rules: Vec::new(),
        };

        if self.at_header("Input") {
            let line = self.expect_header("Input")?;
            while self.peek().line == line {
                if let Tok::Ident(_) = self.peek().tok {
                    let ty = self.expect_ident("annotation type")?;
                    if !phase.input_types.contains(&ty) {
                        phase.input_types.push(ty);
                    }
                } else {
                    break;
                }
            }
        }

        if self.at_header("Options") {
            let line = self.expect_header("Options")?;
            loop {
                let key = self.expect_ident("option name")?;
                self.expect_sym("=")?;
                let value_line = self.peek().line;
                let value = self.expect_ident("option value")?;
                match key.as_str() {
                    "control" => {
                        phase.control = match value.as_str() {
                            "appelt" => Control::Appelt,
                            "all" => Control::All,
                            "first" => Control::First,
                            _ => return Err(RuleError::UnknownControl { line: value_line, control: value }),
                        }
                    }
                    "scope" => {
                        phase.scope = match value.as_str() {
                            "sentence" => Scope::Sentence,
                            "document" => Scope::Document,
                            _ => {
                                return Err(RuleError::UnknownOption {
                                    line: value_line,
                                    option: format!("scope = {value}"),
                                })
                            }
                        }
                    }
                    _ => return Err(RuleError::UnknownOption { line: value_line, option: key }),
                }
                if !(self.peek().line == line && self.eat_sym(",")) {
                    break;
                }
            }
        }

        while self.at_header("Rule") {
            phase.rules.push(self.rule()?);
        }
        Ok(phase)
    }

    fn rule(&mut self) -> Result<Rule, RuleError> {
        self.expect_header("Rule")?;
        let name = self.expect_ident("rule name")?;
        let mut priority = 0;
        if self.at_header("Priority") {
            self.expect_header("Priority")?;
            priority = match self.peek().tok {
                Tok::Num(n) if n.fract() == 0.0 && n.abs() <= i32::MAX as f64 => n as i32,
                _ => return self.error("integer priority"),
            };
            self.bump();
        }
        let lhs = self.alternatives()?;
        self.expect_sym("-->")?;
        let mut rhs = Vec::new();
        while self.at_sym(":") {
            rhs.push(self.action()?);
            self.eat_sym(",");
        }
        if !(self.at_any_header() || matches!(self.peek().tok, Tok::Eof)) {
            return self.error("action ':label.Type = {...}' or next rule");
        }
        Ok(Rule { name, priority, lhs, rhs })
    }

    fn alternatives(&mut self) -> Result<PatternNode, RuleError> {
        let mut branches = vec![self.sequence()?];
        while self.eat_sym("|") {
            branches.push(self.sequence()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { PatternNode::Alternation(branches) })
    }

    fn sequence(&mut self) -> Result<PatternNode, RuleError> {
        let mut items = Vec::new();
        while self.at_sym("{") || self.at_sym("(") {
            items.push(self.item()?);
        }
        match items.len() {
            0 => self.error("'{' or '('"),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(PatternNode::Sequence(items)),
        }
    }

    fn item(&mut self) -> Result<PatternNode, RuleError> {
        let mut node = if self.eat_sym("{") {
            let mut constraints = vec![self.constraint()?];
            while self.eat_sym(",") {
                constraints.push(self.constraint()?);
            }
            self.expect_sym("}")?;
            PatternNode::Constraint(constraints)
        } else {
            self.expect_sym("(")?;
            let inner = self.alternatives()?;
            self.expect_sym(")")?;
            inner
        };

        let quant = if self.eat_sym("*") {
            Some((0, None))
        } else if self.eat_sym("+") {
            Some((1, None))
        } else if self.eat_sym("?") {
            Some((0, Some(1)))
        } else if self.at_sym("[") {
            let (line, col) = (self.peek().line, self.peek().col);
            self.bump();
            let min = self.bound()?;
            let max = if self.eat_sym(",") {
                if self.at_sym("]") {
                    None
                } else {
                    Some(self.bound()?)
                }
            } else {
                Some(min)
            };
            self.expect_sym("]")?;
            if max.is_some_and(|m| m < min) || max == Some(0) {
                return Err(RuleError::SyntaxError {
                    line,
                    col,
                    expected: "bounds with min <= max and max > 0".into(),
                    found: format!("[{min},{}]", max.unwrap_or(0)),
                });
            }
            Some((min, max))
        } else {
            None
        };
        if let Some((min, max)) = quant {
            node = PatternNode::quantified(node, min, max);
        }

        if self.eat_sym(":") {
            let label = self.expect_ident("binding label")?;
            node = PatternNode::bind(label, node);
        }
        Ok(node)
    }

    fn bound(&mut self) -> Result<u32, RuleError> {
        match self.peek().tok {
            Tok::Num(n) if n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64 => {
                self.bump();
                Ok(n as u32)
            }
            _ => self.error("non-negative integer bound"),
        }
    }

    fn constraint(&mut self) -> Result<FeatureConstraint, RuleError> {
        let ann_type = self.expect_ident("annotation type")?;
        if !self.eat_sym(".") {
            return Ok(FeatureConstraint::exists(ann_type));
        }
        let feature = self.expect_ident("feature name")?;
        let negated = if self.eat_sym("==") {
            false
        } else if self.eat_sym("!=") {
            true
        } else {
            return self.error("'==' or '!='");
        };
        let value = self.value()?;
        Ok(if negated {
            FeatureConstraint::neq(ann_type, feature, value)
        } else {
            FeatureConstraint::eq(ann_type, feature, value)
        })
    }

    fn value(&mut self) -> Result<FeatureValue, RuleError> {
        let value = match &self.peek().tok {
            Tok::Str(s) | Tok::Ident(s) => FeatureValue::Str(s.clone()),
            Tok::Num(n) => FeatureValue::Num(*n),
            _ => return self.error("value"),
        };
        self.bump();
        Ok(value)
    }

    fn action(&mut self) -> Result<Action, RuleError> {
        self.expect_sym(":")?;
        let binding = self.expect_ident("binding label")?;
        self.expect_sym(".")?;
        let out_type = self.expect_ident("output annotation type")?;
        self.expect_sym("=")?;
        self.expect_sym("{")?;
        let mut features = BTreeMap::new();
        if !self.at_sym("}") {
            loop {
                let (line, col) = (self.peek().line, self.peek().col);
                let name = self.expect_ident("feature name")?;
                self.expect_sym("=")?;
                let source = if self.eat_sym(":") {
                    let binding = self.expect_ident("binding label")?;
                    self.expect_sym(".")?;
                    let ann_type = self.expect_ident("annotation type")?;
                    self.expect_sym(".")?;
                    let feature = self.expect_ident("feature name")?;
                    FeatureSource::Copy { binding, ann_type, feature }
                } else {
                    FeatureSource::Literal(self.value()?)
                };
                if features.insert(name.clone(), source).is_some() {
                    return Err(RuleError::SyntaxError {
                        line,
                        col,
                        expected: "distinct feature names".into(),
                        found: format!("repeated feature {name:?}"),
                    });
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        Ok(Action { binding, out_type, features })
    }
}

/// Parses a rule file into its phases, in file order.
pub fn parse_rule_file(text: &str) -> Result<Vec<RulePhase>, RuleError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let mut phases = Vec::new();
    while !matches!(parser.peek().tok, Tok::Eof) {
        let phase = parser.phase()?;
        validate_phase(&phase)?;
        phases.push(phase);
    }
    Ok(phases)
}

/// Checks the structural invariants the parser cannot express locally.
pub fn validate_phase(phase: &RulePhase) -> Result<(), RuleError> {
    let mut names = HashSet::new();
    for rule in &phase.rules {
        if !names.insert(rule.name.as_str()) {
            return Err(RuleError::DuplicateRuleName { phase: phase.name.clone(), rule: rule.name.clone() });
        }
        validate_pattern(&rule.name, &rule.lhs)?;
        for ty in rule.lhs.constraint_types() {
            if !phase.input_types.iter().any(|t| t == ty) {
                return Err(RuleError::InvisibleType { rule: rule.name.clone(), ann_type: ty.to_string() });
            }
        }

        let labels = rule.lhs.labels();
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(*label) {
                return Err(RuleError::DuplicateBinding { rule: rule.name.clone(), label: label.to_string() });
            }
        }
        for action in &rule.rhs {
            if !seen.contains(action.binding.as_str()) {
                return Err(RuleError::UnboundLabel { rule: rule.name.clone(), label: action.binding.clone() });
            }
            for source in action.features.values() {
                let FeatureSource::Copy { binding, ann_type, .. } = source else { continue };
                let Some(bound) = rule.lhs.find_binding(binding) else {
                    return Err(RuleError::UnboundLabel { rule: rule.name.clone(), label: binding.clone() });
                };
                if !bound.constraint_types().contains(&ann_type.as_str()) {
                    return Err(RuleError::UnknownCopySource {
                        rule: rule.name.clone(),
                        label: binding.clone(),
                        ann_type: ann_type.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn validate_pattern(rule: &str, node: &PatternNode) -> Result<(), RuleError> {
    let invalid = |detail: &str| Err(RuleError::InvalidPattern { rule: rule.to_string(), detail: detail.to_string() });
    match node {
        PatternNode::Constraint(cs) if cs.is_empty() => invalid("empty constraint"),
        PatternNode::Constraint(_) => Ok(()),
        PatternNode::Sequence(children) | PatternNode::Alternation(children) => {
            if children.is_empty() {
                return invalid("empty sequence or alternation");
            }
            children.iter().try_for_each(|c| validate_pattern(rule, c))
        }
        PatternNode::Quantified { child, min, max } => {
            if max.is_some_and(|m| m < *min || m == 0) {
                return invalid("quantifier bounds");
            }
            validate_pattern(rule, child)
        }
        PatternNode::Binding { child, .. } => validate_pattern(rule, child),
    }
}

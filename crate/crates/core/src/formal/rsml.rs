use std::fmt::Write;

use rust_decimal::Decimal;

use super::{EnvironmentDecl, FormalError, FormalStatement, RsmlBlock, RsmlProgram, StatementBody};
use crate::extract::Comparator;

const ENVIRONMENT: &str = "Environment:";

pub(crate) fn number(value: Decimal) -> String {
    if value.is_zero() {
        "0".to_string()
    } else {
        value.normalize().to_string()
    }
}

pub(crate) fn valid_block_name(name: &str) -> bool {
    !name.is_empty()
        && name.trim() == name
        && name != "Environment"
        && !name.starts_with(['[', '-'])
        && !name.contains(['\n', '\r', ':'])
}

fn tail(comparator: Comparator, value: Decimal, unit: Option<&str>) -> String {
    match unit {
        Some(u) => format!("shall be {} {} [{u}] .", comparator.phrase(), number(value)),
        None => format!("shall be {} {} .", comparator.phrase(), number(value)),
    }
}

/// One statement line, without its trailing newline.
pub(crate) fn statement_text(statement: &FormalStatement) -> String {
    let n = statement.number;
    match &statement.body {
        StatementBody::ConditionalImmediate { state_var, state_value, subject, comparator, value, unit } => format!(
            "[{n}] When the {state_var} is equal to {state_value} then immediately {subject} {}",
            tail(*comparator, *value, unit.as_deref())
        ),
        StatementBody::AccordingTo { authority, subject, comparator, value, unit } => {
            format!("[{n}] According to {authority} the {subject} {}", tail(*comparator, *value, unit.as_deref()))
        }
        StatementBody::Narrative { text } => format!("[{n}]\"{text}\""),
    }
}

/// Renders a program as RSML text.
pub fn emit_rsml(program: &RsmlProgram) -> String {
    let mut out = String::from(ENVIRONMENT);
    out.push('\n');
    for decl in &program.environment {
        let _ = writeln!(out, "- {} is in {} and {} .", decl.var, number(decl.lower), number(decl.upper));
    }
    for block in &program.blocks {
        let _ = writeln!(out, "{}:", block.name);
        for statement in &block.statements {
            out.push_str(&statement_text(statement));
            out.push('\n');
        }
    }
    out
}

struct LineParser<'a> {
    line: usize,
    rest: &'a str,
}

impl<'a> LineParser<'a> {
    fn fail<T>(&self, expected: &str) -> Result<T, FormalError> {
        Err(FormalError::RsmlSyntaxError { line: self.line, expected: expected.to_string() })
    }

    fn literal(&mut self, lit: &str) -> Result<(), FormalError> {
        match self.rest.strip_prefix(lit) {
            Some(r) => {
                self.rest = r;
                Ok(())
            }
            None => self.fail(&format!("{lit:?}")),
        }
    }

    /// Text up to the first occurrence of `sep`, consuming both.
    fn until(&mut self, sep: &str, what: &str) -> Result<&'a str, FormalError> {
        match self.rest.split_once(sep) {
            Some((head, r)) if !head.is_empty() => {
                self.rest = r;
                Ok(head)
            }
            _ => self.fail(what),
        }
    }

    fn decimal(&self, text: &str) -> Result<Decimal, FormalError> {
        text.parse::<Decimal>().or_else(|_| self.fail("a number"))
    }

    /// `<comparator> <value> [<unit>] .` through the end of line.
    fn tail(&mut self) -> Result<(Comparator, Decimal, Option<String>), FormalError> {
        let comparator = [Comparator::GT, Comparator::LT, Comparator::GE, Comparator::LE, Comparator::EQ]
            .into_iter()
            .find(|c| self.rest.starts_with(&format!("{} ", c.phrase())));
        let Some(comparator) = comparator else {
            return self.fail("a comparator phrase");
        };
        self.rest = &self.rest[comparator.phrase().len() + 1..];
        let Some(body) = self.rest.strip_suffix(" .") else {
            return self.fail("\" .\" at end of statement");
        };
        let (value, unit) = match body.split_once(" [") {
            Some((v, u)) => match u.strip_suffix(']') {
                Some(u) if !u.is_empty() => (v, Some(u.to_string())),
                _ => return self.fail("a bracketed unit"),
            },
            None => (body, None),
        };
        let value = self.decimal(value)?;
        self.rest = "";
        Ok((comparator, value, unit))
    }
}

fn parse_statement(line: usize, text: &str) -> Result<FormalStatement, FormalError> {
    let mut p = LineParser { line, rest: text };
    p.literal("[")?;
    let digits = p.until("]", "a statement number")?;
    let number: u32 = digits.parse().or_else(|_| p.fail("a statement number"))?;

    let body = if let Some(quoted) = p.rest.strip_prefix('"') {
        match quoted.strip_suffix('"') {
            Some(t) if !t.is_empty() && !t.contains('"') => StatementBody::Narrative { text: t.to_string() },
            _ => return p.fail("a quoted narrative"),
        }
    } else if p.rest.starts_with(" When the ") {
        p.literal(" When the ")?;
        let state_var = p.until(" is equal to ", "\"is equal to\"")?.to_string();
        let state_value = p.until(" then immediately ", "\"then immediately\"")?.to_string();
        let subject = p.until(" shall be ", "\"shall be\"")?.to_string();
        let (comparator, value, unit) = p.tail()?;
        StatementBody::ConditionalImmediate { state_var, state_value, subject, comparator, value, unit }
    } else if p.rest.starts_with(" According to ") {
        p.literal(" According to ")?;
        let authority = p.until(" the ", "\"the\" before the subject")?.to_string();
        let subject = p.until(" shall be ", "\"shall be\"")?.to_string();
        let (comparator, value, unit) = p.tail()?;
        StatementBody::AccordingTo { authority, subject, comparator, value, unit }
    } else {
        return p.fail("\"When the\", \"According to\" or a quoted narrative");
    };
    Ok(FormalStatement { number, body })
}

fn parse_environment(line: usize, text: &str) -> Result<EnvironmentDecl, FormalError> {
    let p = LineParser { line, rest: text };
    let Some(body) = text.strip_prefix("- ").and_then(|t| t.strip_suffix(" .")) else {
        return p.fail("\"- <var> is in <lower> and <upper> .\"");
    };
    let Some((head, upper)) = body.rsplit_once(" and ") else {
        return p.fail("\"and\" between bounds");
    };
    let Some((var, lower)) = head.rsplit_once(" is in ") else {
        return p.fail("\"is in\"");
    };
    if var.is_empty() {
        return p.fail("a variable");
    }
    Ok(EnvironmentDecl { var: var.to_string(), lower: p.decimal(lower)?, upper: p.decimal(upper)? })
}

/// Reads RSML text written by [`emit_rsml`]. Statement numbers must run
/// 1..N in order.
pub fn parse_rsml(text: &str) -> Result<RsmlProgram, FormalError> {
    let mut program = RsmlProgram::default();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, ENVIRONMENT)) => {}
        Some((line, _)) => return Err(FormalError::RsmlSyntaxError { line, expected: ENVIRONMENT.into() }),
        None => return Err(FormalError::RsmlSyntaxError { line: 1, expected: ENVIRONMENT.into() }),
    }

    let mut next_number = 1;
    for (line, content) in lines {
        if content.starts_with('-') && program.blocks.is_empty() {
            program.environment.push(parse_environment(line, content)?);
        } else if content.starts_with('[') {
            let Some(block) = program.blocks.last_mut() else {
                return Err(FormalError::RsmlSyntaxError { line, expected: "a block header".into() });
            };
            let statement = parse_statement(line, content)?;
            if statement.number != next_number {
                return Err(FormalError::RsmlSyntaxError { line, expected: format!("statement [{next_number}]") });
            }
            next_number += 1;
            block.statements.push(statement);
        } else if let Some(name) = content.strip_suffix(':').filter(|n| valid_block_name(n)) {
            program.blocks.push(RsmlBlock { name: name.to_string(), statements: Vec::new() });
        } else {
            return Err(FormalError::RsmlSyntaxError { line, expected: "a block header or statement".into() });
        }
    }
    Ok(program)
}

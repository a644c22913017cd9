use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::ident::{class_name, mangle_identifier, sanitize_numeral};
use super::rsml::{number, statement_text};
use super::{FormalStatement, RsmlBlock, RsmlProgram, StatementBody};
use crate::extract::Comparator;

pub const DOMAIN_FILE: &str = "domain_knowledge.e";
pub const DOCUMENTATION_FILE: &str = "requirements_documentation.e";

/// How `is in <lo> and <hi>` becomes an invariant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bounds {
    #[default]
    Strict,
    Inclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractOptions {
    pub bounds: Bounds,
    /// Name of the RSML file quoted in trace notes.
    pub source: String,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions { bounds: Bounds::Strict, source: "requirements.rsml".into() }
    }
}

/// A statement fixing a variable to a value its declared range excludes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeConflict {
    pub statement: u32,
    pub var: String,
    pub value: Decimal,
    pub lower: Decimal,
    pub upper: Decimal,
}

// Identifiers that fail to mangle only occur in programs that do not validate.
fn ident(phrase: &str) -> String {
    mangle_identifier(phrase).unwrap_or_else(|_| "unnamed".to_string())
}

fn value_ident(value: &str) -> String {
    if value.parse::<Decimal>().is_ok() {
        sanitize_numeral(value)
    } else {
        ident(value)
    }
}

fn value_expr(value: &str) -> String {
    match value.parse::<Decimal>() {
        Ok(d) => number(d),
        Err(_) => ident(value),
    }
}

fn comparator_words(c: Comparator) -> String {
    c.phrase().replace(' ', "_")
}

fn operator(c: Comparator) -> &'static str {
    match c {
        Comparator::GT => ">",
        Comparator::LT => "<",
        Comparator::GE => ">=",
        Comparator::LE => "<=",
        Comparator::EQ => "=",
    }
}

/// Feature name of a statement in the generated classes.
pub fn statement_label(statement: &FormalStatement) -> String {
    match &statement.body {
        StatementBody::ConditionalImmediate { state_var, state_value, subject, comparator, value, .. } => format!(
            "when_{}_is_{}_then_immediately_{}_should_be_{}_{}",
            ident(state_var),
            value_ident(state_value),
            ident(subject),
            comparator_words(*comparator),
            sanitize_numeral(&number(*value))
        ),
        StatementBody::AccordingTo { authority, subject, comparator, value, .. } => format!(
            "according_to_{}_{}_should_be_{}_{}",
            ident(authority),
            ident(subject),
            comparator_words(*comparator),
            sanitize_numeral(&number(*value))
        ),
        StatementBody::Narrative { .. } => format!("requirement_{}", statement.number),
    }
}

/// Labels for every statement, keyed by number, with collisions resolved by
/// appending the statement number.
fn labels(program: &RsmlProgram) -> BTreeMap<u32, String> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeMap::new();
    for (_, statement) in program.statements() {
        let mut label = statement_label(statement);
        if !seen.insert(label.clone()) {
            label = format!("{label}_{}", statement.number);
            seen.insert(label.clone());
        }
        out.insert(statement.number, label);
    }
    out
}

fn header(out: &mut String, source: &str, reference: Option<&str>, description: &str) {
    out.push_str("note\n");
    match reference {
        Some(r) => {
            let _ = writeln!(out, "    EIS: \"src={source}\", \"ref={r}\", \"type=trace\"");
        }
        None => {
            let _ = writeln!(out, "    EIS: \"src={source}\", \"type=trace\"");
        }
    }
    out.push_str("    description: \"[\n");
    let _ = writeln!(out, "        {description}");
    out.push_str("    ]\"\n");
}

fn domain_knowledge(program: &RsmlProgram, options: &ContractOptions) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &options.source,
        Some("Environment"),
        "This class contains the domain knowledge that will be used by requirements.",
    );
    out.push_str("class DOMAIN_KNOWLEDGE\nfeature\n");
    for decl in &program.environment {
        let _ = writeln!(out, "    {} : DOUBLE", ident(&decl.var));
    }
    if !program.environment.is_empty() {
        out.push_str("invariant\n");
        let (lo_op, hi_op) = match options.bounds {
            Bounds::Strict => (">", "<"),
            Bounds::Inclusive => (">=", "<="),
        };
        for decl in &program.environment {
            let var = ident(&decl.var);
            let (lo, hi) = (number(decl.lower), number(decl.upper));
            let _ = writeln!(
                out,
                "    {var}_is_in_{}_and_{}: {var} {lo_op} {lo} and {var} {hi_op} {hi}",
                sanitize_numeral(&lo),
                sanitize_numeral(&hi)
            );
        }
    }
    out.push_str("end\n");
    out
}

fn documentation(program: &RsmlProgram, labels: &BTreeMap<u32, String>, options: &ContractOptions) -> String {
    let mut out = String::new();
    header(&mut out, &options.source, None, "This class contains the documentation of all requirements.");
    out.push_str("class REQUIREMENTS_DOCUMENTATION\nfeature -- Requirements\n");
    for (_, statement) in program.statements() {
        let label = &labels[&statement.number];
        let _ = writeln!(out, "\n    {label}_doc: STRING");
        out.push_str("        note\n");
        let _ = writeln!(
            out,
            "            EIS: \"src={}\", \"ref=[{}]\", \"type=trace\"",
            options.source, statement.number
        );
        out.push_str("            doc: \"true\"\n");
        out.push_str("        do\n            Result := \"[\n");
        let _ = writeln!(out, "                {}", statement_text(statement));
        out.push_str("            ]\"\n        end\n");
    }
    out.push_str("\nend\n");
    out
}

fn block_class(
    block: &RsmlBlock,
    class: &str,
    declared: &BTreeSet<String>,
    labels: &BTreeMap<u32, String>,
    options: &ContractOptions,
) -> String {
    let mut states_range: Vec<String> = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let mut add_state = |id: String| {
        if !declared.contains(&id) && !states.contains(&id) {
            states.push(id);
        }
    };
    for statement in &block.statements {
        match &statement.body {
            StatementBody::ConditionalImmediate { state_var, state_value, subject, .. } => {
                if state_value.parse::<Decimal>().is_err() && !states_range.contains(&ident(state_value)) {
                    states_range.push(ident(state_value));
                }
                add_state(ident(state_var));
                add_state(ident(subject));
            }
            StatementBody::AccordingTo { subject, .. } => add_state(ident(subject)),
            StatementBody::Narrative { .. } => {}
        }
    }

    let mut out = String::new();
    header(
        &mut out,
        &options.source,
        Some(&block.name),
        &format!("This class contains requirements in the context of: {}.", block.name),
    );
    let _ = writeln!(out, "class {class}_REQUIREMENTS");
    out.push_str("inherit\n    DOMAIN_KNOWLEDGE\nfeature\n");
    out.push_str("    -- For temporal requirements\n    duration: DOUBLE\n\n    -- States range\n");
    for (k, state) in states_range.iter().enumerate() {
        let _ = writeln!(out, "    {state} : DOUBLE = {}", k + 1);
    }
    out.push_str("\n    -- States\n");
    for state in &states {
        let _ = writeln!(out, "    {state} : DOUBLE");
    }
    out.push_str("\nfeature -- Requirements\n");

    for statement in &block.statements {
        let label = &labels[&statement.number];
        let _ = writeln!(out, "\n    {label}");
        out.push_str("        note\n");
        let _ = writeln!(out, "            doc: \"{{REQUIREMENTS_DOCUMENTATION}}.{label}_doc\"");
        let check = match &statement.body {
            StatementBody::ConditionalImmediate { state_var, state_value, subject, comparator, value, unit } => {
                let sv = ident(state_var);
                out.push_str("        require\n");
                let _ = writeln!(
                    out,
                    "            when_{sv}_is_equal_to_{}: ({sv} = {})",
                    value_ident(state_value),
                    value_expr(state_value)
                );
                Some((subject, *comparator, *value, unit))
            }
            StatementBody::AccordingTo { subject, comparator, value, unit, .. } => {
                Some((subject, *comparator, *value, unit))
            }
            StatementBody::Narrative { .. } => None,
        };
        out.push_str("        deferred\n");
        if let Some((subject, comparator, value, unit)) = check {
            let subject = ident(subject);
            let value = number(value);
            let unit_suffix =
                unit.as_deref().and_then(|u| mangle_identifier(u).ok()).map(|u| format!("_{u}")).unwrap_or_default();
            out.push_str("        ensure\n");
            let _ = writeln!(
                out,
                "            check_{subject}_shall_be_{}_{}{unit_suffix}: ({subject} {} {value})",
                comparator_words(comparator),
                sanitize_numeral(&value),
                operator(comparator)
            );
        }
        out.push_str("        end\n");
    }
    out.push_str("\nend\n");
    out
}

/// Generates the contract classes for a program: the domain knowledge, the
/// requirement documentation and one requirements class per block, keyed by
/// file name.
pub fn emit_contracts(program: &RsmlProgram, options: &ContractOptions) -> BTreeMap<String, String> {
    let labels = labels(program);
    let declared: BTreeSet<String> = program.environment.iter().map(|d| ident(&d.var)).collect();
    let mut files = BTreeMap::new();
    files.insert(DOMAIN_FILE.to_string(), domain_knowledge(program, options));
    files.insert(DOCUMENTATION_FILE.to_string(), documentation(program, &labels, options));
    let mut used = BTreeSet::new();
    for block in &program.blocks {
        let mut class = class_name(&block.name);
        let mut k = 2;
        while !used.insert(class.clone()) {
            class = format!("{}_{k}", class_name(&block.name));
            k += 1;
        }
        let file = format!("{}_requirements.e", class.to_lowercase());
        files.insert(file, block_class(block, &class, &declared, &labels, options));
    }
    files
}

/// Statements whose equality constraint lies outside the declared range of
/// the variable it fixes, under the given bounds.
pub fn range_conflicts(program: &RsmlProgram, bounds: Bounds) -> Vec<RangeConflict> {
    let ranges: BTreeMap<String, (Decimal, Decimal)> =
        program.environment.iter().map(|d| (ident(&d.var), (d.lower, d.upper))).collect();
    let inside = |v: Decimal, lo: Decimal, hi: Decimal| match bounds {
        Bounds::Strict => lo < v && v < hi,
        Bounds::Inclusive => lo <= v && v <= hi,
    };
    let mut out = Vec::new();
    for (_, statement) in program.statements() {
        let mut fixed: Vec<(&str, Decimal)> = Vec::new();
        match &statement.body {
            StatementBody::ConditionalImmediate { state_var, state_value, subject, comparator, value, .. } => {
                if let Ok(v) = state_value.parse::<Decimal>() {
                    fixed.push((state_var, v));
                }
                if *comparator == Comparator::EQ {
                    fixed.push((subject, *value));
                }
            }
            StatementBody::AccordingTo { subject, comparator: Comparator::EQ, value, .. } => {
                fixed.push((subject, *value))
            }
            _ => {}
        }
        for (var, v) in fixed {
            let id = ident(var);
            if let Some(&(lo, hi)) = ranges.get(&id) {
                if !inside(v, lo, hi) {
                    out.push(RangeConflict { statement: statement.number, var: id, value: v, lower: lo, upper: hi });
                }
            }
        }
    }
    out
}

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::ident::{display_identifier, mangle_identifier};
use super::rsml::number;
use super::{EnvironmentDecl, FormalError, FormalStatement, RsmlBlock, RsmlProgram, StatementBody};
use crate::extract::{is_regulation_text, Comparator, StructuredRequirement, TableRequirement, Unit};
use crate::lexicon::Lexicon;
use crate::text::normalize;

const AGENT_CLASS: &str = "agent";
const SUBSTANCE_CLASS: &str = "substance";
const PROPERTY_CLASS: &str = "property";
const NEGATING_PREFIXES: &[&str] = &["non-", "non ", "not "];

/// State assigned to the rows of one requirement table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableContext {
    pub context: String,
    /// e.g. `pure` or `mixture`.
    pub state: String,
    /// Substance whose state the rows depend on. Defaults to the first row's.
    #[serde(default)]
    pub state_substance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildConfig {
    pub tables: Vec<TableContext>,
    /// Unit written after property values in according-to statements.
    pub property_unit: Option<String>,
    pub property_range: (Decimal, Decimal),
    pub responsibility_range: (Decimal, Decimal),
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            tables: Vec::new(),
            property_unit: Some("Percentage".into()),
            property_range: (Decimal::ZERO, Decimal::from(100)),
            responsibility_range: (Decimal::ZERO, Decimal::ONE),
        }
    }
}

fn unit_label(unit: Unit) -> Option<&'static str> {
    match unit {
        Unit::PercentVolume => Some("percentage"),
        Unit::MicrolitrePerLitre => Some("ul/l"),
        Unit::Ppmv => Some("ppmv"),
        Unit::MgPerKg => Some("mg/kg"),
        Unit::Ppmw => Some("ppmw"),
        Unit::Celsius => Some("degC"),
        Unit::Dimensionless => None,
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn subject_ident(subject: &str) -> Result<String, FormalError> {
    mangle_identifier(subject).map_err(|_| FormalError::UnmangleableSubject { subject: subject.to_string() })
}

#[derive(Default)]
struct Assembly {
    program: RsmlProgram,
}

impl Assembly {
    fn declare(&mut self, var: String, (lower, upper): (Decimal, Decimal)) -> Result<(), FormalError> {
        let id = subject_ident(&var)?;
        for decl in &self.program.environment {
            if mangle_identifier(&decl.var)? == id {
                return Ok(());
            }
        }
        self.program.environment.push(EnvironmentDecl { var, lower, upper });
        Ok(())
    }

    fn push(&mut self, block: &str, body: StatementBody) {
        let index = match self.program.blocks.iter().position(|b| b.name == block) {
            Some(i) => i,
            None => {
                self.program.blocks.push(RsmlBlock { name: block.to_string(), statements: Vec::new() });
                self.program.blocks.len() - 1
            }
        };
        let statements = &mut self.program.blocks[index].statements;
        if !statements.iter().any(|s| s.body == body) {
            statements.push(FormalStatement { number: 0, body });
        }
    }
}

/// One atom's substances and the property values it asserts for them.
struct AtomFacts {
    vars: Vec<(String, Decimal)>,
    substances: Vec<String>,
}

fn atom_facts(atom: &StructuredRequirement, lex: &Lexicon) -> AtomFacts {
    let mut substances = Vec::new();
    let mut properties = Vec::new();
    for slot in &atom.concepts {
        let Some(entry) = lex.entry(&slot.uri) else { continue };
        let label = entry.display_label().to_string();
        match entry.class_name.as_str() {
            SUBSTANCE_CLASS => substances.push(label),
            PROPERTY_CLASS => {
                let surface = normalize(&slot.surface);
                if NEGATING_PREFIXES.iter().any(|p| surface.starts_with(p)) {
                    properties.push((label, Decimal::ZERO));
                }
            }
            _ => {}
        }
    }
    let vars =
        properties.iter().flat_map(|(p, v)| substances.iter().map(move |s| (format!("{p} of the {s}"), *v))).collect();
    AtomFacts { vars, substances }
}

fn authorities(req: &StructuredRequirement, lex: &Lexicon) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for condition in &req.conditions {
        let Some((_, target)) = condition.strip_prefix("in ").and_then(|c| c.split_once(" with ")) else {
            continue;
        };
        if is_regulation_text(target, lex) && !out.iter().any(|a| a == target) {
            out.push(target.to_string());
        }
    }
    out
}

/// Statements for the atoms split from one sentence.
fn sentence_statements(
    asm: &mut Assembly,
    atoms: &[&StructuredRequirement],
    lex: &Lexicon,
    config: &BuildConfig,
) -> Result<(), FormalError> {
    let first = atoms[0];
    let facts: Vec<AtomFacts> = atoms.iter().map(|a| atom_facts(a, lex)).collect();
    let agent = first
        .concepts
        .iter()
        .filter_map(|c| lex.entry(&c.uri))
        .find(|e| e.class_name == AGENT_CLASS)
        .map(|e| e.display_label().to_string());

    for (var, _) in facts.iter().flat_map(|f| &f.vars) {
        asm.declare(capitalize(var), config.property_range)?;
    }

    if let Some(agent) = &agent {
        let block = agent.to_uppercase();
        for substance in facts.iter().flat_map(|f| &f.substances) {
            asm.push(&block, StatementBody::Narrative { text: format!("The {agent} provides the {substance} .") });
        }

        let responsibility = format!("responsibility of the {agent}");
        let first_var = facts.iter().flat_map(|f| &f.vars).next();
        if let (true, Some((var, value))) = (normalize(&first.sentence_text).contains(&responsibility), first_var) {
            asm.declare(capitalize(&responsibility), config.responsibility_range)?;
            asm.push(
                &responsibility.to_uppercase(),
                StatementBody::ConditionalImmediate {
                    state_var: var.clone(),
                    state_value: number(*value),
                    subject: format!("the {responsibility}"),
                    comparator: Comparator::EQ,
                    value: config.responsibility_range.0,
                    unit: None,
                },
            );
        }
    }

    for authority in authorities(first, lex) {
        for (var, value) in facts.iter().flat_map(|f| &f.vars) {
            asm.push(
                &authority.to_uppercase(),
                StatementBody::AccordingTo {
                    authority: authority.clone(),
                    subject: var.clone(),
                    comparator: Comparator::EQ,
                    value: *value,
                    unit: config.property_unit.clone(),
                },
            );
        }
    }
    Ok(())
}

fn table_statements(asm: &mut Assembly, rows: &[&TableRequirement], context: &TableContext) -> Result<(), FormalError> {
    let state_substance = match &context.state_substance {
        Some(s) => s.clone(),
        None => rows[0].substance.surface.clone(),
    };
    let state_var = display_identifier(&state_substance);
    subject_ident(&state_var)?;
    let block = format!("{state_var}_{}", context.state.to_uppercase());
    for row in rows {
        let subject = display_identifier(&row.substance.surface);
        subject_ident(&subject)?;
        asm.push(
            &block,
            StatementBody::ConditionalImmediate {
                state_var: state_var.clone(),
                state_value: context.state.clone(),
                subject,
                comparator: row.comparator,
                value: row.quantity.value,
                unit: unit_label(row.quantity.unit).map(str::to_string),
            },
        );
    }
    Ok(())
}

/// Assembles a program from sentence atoms and table rows.
///
/// Atoms are grouped by source sentence. A sentence naming an agent yields
/// narrative statements in the agent's block; negated properties of its
/// substances ("non-toxic") become environment ranges and, for each cited
/// regulation, according-to statements in a block named after it. Table rows
/// become conditional statements in a `<Substance>_<STATE>` block, with the
/// state taken from the matching [`TableContext`].
pub fn build_rsml(
    tables: &[TableRequirement],
    structured: &[StructuredRequirement],
    lex: &Lexicon,
    config: &BuildConfig,
) -> Result<RsmlProgram, FormalError> {
    let mut asm = Assembly::default();

    let mut sentences: Vec<Vec<&StructuredRequirement>> = Vec::new();
    for req in structured {
        match sentences.iter_mut().find(|g| g[0].doc_id == req.doc_id && g[0].sentence_span == req.sentence_span) {
            Some(group) => group.push(req),
            None => sentences.push(vec![req]),
        }
    }
    for atoms in &sentences {
        sentence_statements(&mut asm, atoms, lex, config)?;
    }

    let mut contexts: Vec<(&str, Vec<&TableRequirement>)> = Vec::new();
    for row in tables {
        match contexts.iter_mut().find(|(c, _)| *c == row.context) {
            Some((_, rows)) => rows.push(row),
            None => contexts.push((&row.context, vec![row])),
        }
    }
    for (name, rows) in &contexts {
        let context = config
            .tables
            .iter()
            .find(|t| t.context == *name)
            .ok_or_else(|| FormalError::MissingContextState { context: name.to_string() })?;
        table_statements(&mut asm, rows, context)?;
    }

    let mut program = asm.program;
    program.renumber();
    program.validate()?;
    Ok(program)
}

//! Random valid RSML programs.

use normreq_core::extract::Comparator;
use normreq_core::formal::{EnvironmentDecl, FormalStatement, RsmlBlock, RsmlProgram, StatementBody};
use proptest::prelude::*;
use rust_decimal::Decimal;

const WORDS: &[&str] = &["gas", "toxicity", "of", "supplier", "mixture", "oil", "SF6", "CF₄", "air", "grade", "water"];

pub fn phrase() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..4).prop_map(|w| w.join(" "))
}

pub fn decimal() -> impl Strategy<Value = Decimal> {
    (-100_000i64..100_000, 0u32..4).prop_map(|(m, s)| Decimal::new(m, s).normalize())
}

pub fn comparator() -> impl Strategy<Value = Comparator> {
    prop::sample::select(vec![Comparator::GT, Comparator::LT, Comparator::GE, Comparator::LE, Comparator::EQ])
}

pub fn unit() -> impl Strategy<Value = Option<String>> {
    prop::option::of(prop::sample::select(vec!["percentage", "ul/l", "mg/kg", "Percentage"]).prop_map(String::from))
}

pub fn program() -> impl Strategy<Value = RsmlProgram> {
    let decl = (phrase(), decimal(), 1i64..1000).prop_map(|(var, lower, width)| EnvironmentDecl {
        var,
        lower,
        upper: lower + Decimal::from(width),
    });
    (prop::collection::vec(decl, 0..4), prop::collection::vec((phrase(), prop::collection::vec(0u8..3, 0..4)), 0..4))
        .prop_flat_map(|(environment, blocks)| {
            let vars: Vec<String> = environment.iter().map(|d| d.var.to_lowercase()).collect();
            let env = environment.clone();
            let block_bodies: Vec<_> = blocks
                .into_iter()
                .map(|(name, kinds)| {
                    let vars = vars.clone();
                    let bodies: Vec<BoxedStrategy<StatementBody>> = kinds
                        .into_iter()
                        .map(|k| match (k, vars.is_empty()) {
                            (0, _) => (phrase(), phrase(), phrase(), comparator(), decimal(), unit())
                                .prop_map(|(state_var, state_value, subject, comparator, value, unit)| {
                                    StatementBody::ConditionalImmediate {
                                        state_var,
                                        state_value,
                                        subject,
                                        comparator,
                                        value,
                                        unit,
                                    }
                                })
                                .boxed(),
                            (1, false) => {
                                (phrase(), prop::sample::select(vars.clone()), comparator(), decimal(), unit())
                                    .prop_map(|(authority, subject, comparator, value, unit)| {
                                        StatementBody::AccordingTo { authority, subject, comparator, value, unit }
                                    })
                                    .boxed()
                            }
                            _ => phrase().prop_map(|t| StatementBody::Narrative { text: format!("The {t} .") }).boxed(),
                        })
                        .collect();
                    (Just(name.to_uppercase()), bodies)
                })
                .collect();
            (Just(env), block_bodies)
        })
        .prop_map(|(environment, blocks)| {
            let mut program = RsmlProgram { environment, blocks: Vec::new() };
            for (name, bodies) in blocks {
                if program.blocks.iter().all(|b| b.name != name) {
                    let statements = bodies.into_iter().map(|body| FormalStatement { number: 0, body }).collect();
                    program.blocks.push(RsmlBlock { name, statements });
                }
            }
            program.renumber();
            program
        })
}

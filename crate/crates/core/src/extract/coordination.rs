use super::structure::{ConceptSlot, StructuredRequirement, DETERMINERS};
use crate::text::tokenize;

/// Char offset of `needle` in `hay` at or after `from`, on word boundaries.
fn find_word(hay: &[char], needle: &[char], from: usize) -> Option<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return None;
    }
    let is_word = |c: char| c.is_alphanumeric();
    (from..=hay.len() - needle.len()).find(|&i| {
        hay[i..i + needle.len()].iter().zip(needle).all(|(a, b)| a.to_lowercase().eq(b.to_lowercase()))
            && (i == 0 || !is_word(hay[i - 1]) || !is_word(needle[0]))
            && hay.get(i + needle.len()).is_none_or(|&c| !is_word(c) || !is_word(needle[needle.len() - 1]))
    })
}

/// `Some(has_coordinator)` when `gap` is non-blank and holds only
/// coordinators, commas, slashes or determiners, `None` otherwise.
fn coordination_gap(gap: &str) -> Option<bool> {
    let tokens = tokenize(gap);
    if tokens.is_empty() {
        return None;
    }
    let mut conjunction = false;
    for t in tokens {
        match t.norm.as_str() {
            "and" | "or" => conjunction = true,
            "," | "/" => {}
            w if DETERMINERS.contains(&w) => {}
            _ => return None,
        }
    }
    Some(conjunction)
}

/// Splits a requirement whose concepts are coordinated ("gas or gas
/// mixture") into one atomic requirement per combination of coordinated
/// concepts. Atoms get ids `<req_id>.1`, `<req_id>.2`, ... in odometer order
/// (the last coordination varies fastest). A requirement without
/// coordination comes back unchanged.
pub fn split_coordination(req: &StructuredRequirement) -> Vec<StructuredRequirement> {
    let text: Vec<char> = req.sentence_text.chars().collect();

    // Locate every concept surface, left to right.
    let mut located: Vec<Option<(usize, usize)>> = Vec::with_capacity(req.concepts.len());
    let mut cursor = 0;
    for c in &req.concepts {
        let needle: Vec<char> = c.surface.chars().collect();
        match find_word(&text, &needle, cursor) {
            Some(at) => {
                located.push(Some((at, at + needle.len())));
                cursor = at + needle.len();
            }
            None => located.push(None),
        }
    }

    // Group adjacent concepts separated only by list punctuation and
    // coordinators into chains ("A, B and C"). A chain without any
    // coordinator is a plain list and falls apart again.
    let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
    for (k, loc) in located.iter().enumerate() {
        let gap = match (k.checked_sub(1).and_then(|p| located[p]), loc) {
            (Some((_, prev_end)), Some((start, _))) if prev_end <= *start => {
                coordination_gap(&text[prev_end..*start].iter().collect::<String>())
            }
            _ => None,
        };
        match gap {
            Some(coordinated) => {
                let chain = chains.last_mut().unwrap();
                chain.0.push(k);
                chain.1 |= coordinated;
            }
            None => chains.push((vec![k], false)),
        }
    }
    let groups: Vec<Vec<usize>> = chains
        .into_iter()
        .flat_map(
            |(members, coordinated)| {
                if coordinated {
                    vec![members]
                } else {
                    members.into_iter().map(|k| vec![k]).collect()
                }
            },
        )
        .collect();

    if groups.iter().all(|g| g.len() == 1) {
        return vec![req.clone()];
    }

    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for group in &groups {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                group.iter().map(move |&k| {
                    let mut next = prefix.clone();
                    next.push(k);
                    next
                })
            })
            .collect();
    }

    combos
        .into_iter()
        .enumerate()
        .map(|(n, picks)| StructuredRequirement {
            req_id: format!("{}.{}", req.req_id, n + 1),
            concepts: picks.iter().map(|&k| req.concepts[k].clone()).collect::<Vec<ConceptSlot>>(),
            ..req.clone()
        })
        .collect()
}

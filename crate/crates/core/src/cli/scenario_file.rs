//! Scenario file grammar.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Lists are comma separated and may be empty.
//!
//! Aggregation keys:
//!
//! | key                | value                                         |
//! |--------------------|-----------------------------------------------|
//! | `parties`          | party count (optional when `set.*` is given)  |
//! | `universal`        | element labels in canonical order             |
//! | `leader`           | leader index (default 0)                      |
//! | `seed`             | master seed (default 0)                       |
//! | `prime`            | prime override                                |
//! | `leader_encodes`   | `true` / `false` (default `true`)             |
//! | `q`                | generate sets with membership probability q   |
//! | `set.<i>`          | labels held by party `i`                      |
//! | `byzantine.party`  | misbehaving party                             |
//! | `byzantine.mode`   | `wrong_phase`, `shift` or `random_unitary`    |
//! | `byzantine.delta`  | phase offset for `wrong_phase` (default 1)    |
//! | `byzantine.blocks` | element indices to tamper with                |
//!
//! Summation keys: `prime`, `leader`, `seed`, and `input.<i>` holding party
//! `i`'s field elements, one per block.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::analysis::{ByzantineSpec, TamperMode};
use crate::protocol::{PartySets, Scenario, SummationConfig};

use super::CliError;

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

fn entries(text: &str, allowed: &dyn Fn(&str) -> bool) -> Result<BTreeMap<String, Entry>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::parse(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim().to_string();
        if !allowed(&key) {
            return Err(CliError::parse(line, format!("unknown key `{key}`")));
        }
        let entry = Entry {
            line,
            value: value.trim().to_string(),
        };
        if map.insert(key.clone(), entry).is_some() {
            return Err(CliError::parse(line, format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

fn number<T: FromStr>(entry: &Entry, key: &str) -> Result<T, CliError> {
    entry
        .value
        .parse()
        .map_err(|_| CliError::parse(entry.line, format!("`{key}` expects a number, got `{}`", entry.value)))
}

fn list(entry: &Entry) -> Vec<String> {
    entry
        .value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn indexed<'a>(
    map: &'a BTreeMap<String, Entry>,
    prefix: &str,
) -> Result<BTreeMap<usize, &'a Entry>, CliError> {
    let mut out = BTreeMap::new();
    for (key, entry) in map {
        if let Some(idx) = key.strip_prefix(prefix) {
            let i = idx
                .parse()
                .map_err(|_| CliError::parse(entry.line, format!("bad index in `{key}`")))?;
            out.insert(i, entry);
        }
    }
    Ok(out)
}

fn contiguous<T>(items: BTreeMap<usize, T>, what: &str) -> Result<Vec<T>, CliError> {
    let count = items.len();
    if items.keys().copied().ne(0..count) {
        return Err(CliError::validation(
            "one_set_per_party",
            format!("{what} indices must be 0..{count} without gaps"),
        ));
    }
    Ok(items.into_values().collect())
}

const SCENARIO_KEYS: &[&str] = &[
    "parties",
    "universal",
    "leader",
    "seed",
    "prime",
    "leader_encodes",
    "q",
    "byzantine.party",
    "byzantine.mode",
    "byzantine.delta",
    "byzantine.blocks",
];

pub fn parse_scenario_str(text: &str) -> Result<Scenario, CliError> {
    let map = entries(text, &|k| SCENARIO_KEYS.contains(&k) || k.starts_with("set."))?;

    let universal_set = map.get("universal").map(list).unwrap_or_default();
    let leader = map.get("leader").map(|e| number(e, "leader")).transpose()?.unwrap_or(0);
    let master_seed = map.get("seed").map(|e| number(e, "seed")).transpose()?.unwrap_or(0);
    let prime_override = map.get("prime").map(|e| number(e, "prime")).transpose()?;
    let leader_encodes = match map.get("leader_encodes") {
        None => true,
        Some(e) => parse_bool(&e.value).ok_or_else(|| {
            CliError::parse(e.line, format!("`leader_encodes` expects true/false, got `{}`", e.value))
        })?,
    };
    let sets: Vec<Vec<String>> = contiguous(indexed(&map, "set.")?, "set")?
        .into_iter()
        .map(list)
        .collect();
    let q: Option<f64> = map.get("q").map(|e| number(e, "q")).transpose()?;
    let declared: Option<usize> = map.get("parties").map(|e| number(e, "parties")).transpose()?;

    let (parties, party_sets) = match (q, sets.is_empty()) {
        (Some(_), false) => {
            return Err(CliError::validation(
                "sets_or_q",
                "give either explicit `set.*` lines or `q`, not both",
            ))
        }
        (Some(q), true) => {
            let parties = declared.ok_or_else(|| {
                CliError::validation("parties_declared", "`parties` is required with `q`")
            })?;
            (parties, PartySets::Bernoulli { q })
        }
        (None, _) => {
            let parties = declared.unwrap_or(sets.len());
            if parties != sets.len() {
                return Err(CliError::validation(
                    "one_set_per_party",
                    format!("{} sets for {parties} parties", sets.len()),
                ));
            }
            (parties, PartySets::Explicit(sets))
        }
    };

    let byzantine = parse_byzantine(&map)?;
    Ok(Scenario {
        parties,
        universal_set,
        party_sets,
        leader,
        prime_override,
        master_seed,
        leader_encodes,
        byzantine,
    })
}

fn parse_byzantine(map: &BTreeMap<String, Entry>) -> Result<Option<ByzantineSpec>, CliError> {
    let Some(mode_entry) = map.get("byzantine.mode") else {
        if let Some((key, e)) = map.iter().find(|(k, _)| k.starts_with("byzantine.")) {
            return Err(CliError::parse(e.line, format!("`{key}` needs `byzantine.mode`")));
        }
        return Ok(None);
    };
    let delta = map
        .get("byzantine.delta")
        .map(|e| number(e, "byzantine.delta"))
        .transpose()?
        .unwrap_or(1);
    let mode = match mode_entry.value.as_str() {
        "wrong_phase" => TamperMode::WrongPhase { delta },
        "shift" => TamperMode::Shift,
        "random_unitary" => TamperMode::RandomUnitary,
        other => {
            return Err(CliError::parse(
                mode_entry.line,
                format!("unknown byzantine mode `{other}`"),
            ))
        }
    };
    let party = map
        .get("byzantine.party")
        .map(|e| number(e, "byzantine.party"))
        .transpose()?
        .ok_or_else(|| CliError::validation("byzantine_party_declared", "missing `byzantine.party`"))?;
    let blocks = match map.get("byzantine.blocks") {
        Some(e) => list(e)
            .iter()
            .map(|b| {
                b.parse()
                    .map_err(|_| CliError::parse(e.line, format!("bad block index `{b}`")))
            })
            .collect::<Result<Vec<usize>, _>>()?,
        None => Vec::new(),
    };
    Ok(Some(ByzantineSpec {
        party,
        mode,
        blocks,
    }))
}

pub fn parse_summation_str(text: &str) -> Result<SummationConfig, CliError> {
    let map = entries(text, &|k| {
        ["prime", "leader", "seed"].contains(&k) || k.starts_with("input.")
    })?;
    let prime = map
        .get("prime")
        .map(|e| number(e, "prime"))
        .transpose()?
        .ok_or_else(|| CliError::validation("prime_declared", "missing `prime`"))?;
    let leader = map.get("leader").map(|e| number(e, "leader")).transpose()?.unwrap_or(0);
    let master_seed = map.get("seed").map(|e| number(e, "seed")).transpose()?.unwrap_or(0);
    let inputs = contiguous(indexed(&map, "input.")?, "input")?
        .into_iter()
        .map(|e| {
            list(e)
                .iter()
                .map(|x| {
                    x.parse()
                        .map_err(|_| CliError::parse(e.line, format!("bad input `{x}`")))
                })
                .collect::<Result<Vec<u64>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SummationConfig {
        prime,
        leader,
        inputs,
        master_seed,
    })
}

pub(crate) fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

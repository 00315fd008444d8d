//! Plain-text grid configuration.
//!
//! ```text
//! # shared settings
//! [defaults]
//! replications = 5000
//! seed = 7
//!
//! [scenario]
//! name = power
//! procedure = LOND, gsLOND
//! pi0 = 0, 0.5, 1
//! ```
//!
//! Every `[scenario]` block inherits the defaults and expands comma-separated
//! values into their cartesian product, the first listed key varying slowest.
//! Keys before the first header are defaults too.

use std::collections::HashMap;

use super::scenario::TrialScenario;
use crate::error::{Error, Result};

pub const KEYS: &[&str] = &[
    "name",
    "procedure",
    "spending",
    "control_mode",
    "order",
    "pi0",
    "delta",
    "K",
    "N",
    "beta_mode",
    "n",
    "n1",
    "n_delta",
    "alpha",
    "alpha_futility",
    "replications",
    "seed",
    "budget",
];

#[derive(Debug, Clone)]
struct Entry {
    key: &'static str,
    values: Vec<String>,
    line: usize,
}

#[derive(Debug, Default)]
struct Block {
    entries: Vec<Entry>,
}

impl Block {
    fn insert(&mut self, entry: Entry) -> Result<()> {
        if let Some(prev) = self.entries.iter().find(|e| e.key == entry.key) {
            return Err(Error::config(
                entry.key,
                format!("line {}: repeated in the same block (first set on line {})", entry.line, prev.line),
            ));
        }
        self.entries.push(entry);
        Ok(())
    }

    fn overlay(&self, over: &Block) -> Vec<Entry> {
        let mut merged: Vec<Entry> = self
            .entries
            .iter()
            .map(|d| over.entries.iter().find(|e| e.key == d.key).unwrap_or(d).clone())
            .collect();
        merged.extend(over.entries.iter().filter(|e| !self.entries.iter().any(|d| d.key == e.key)).cloned());
        merged
    }
}

fn canonical_key(raw: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == raw).or_else(|| match raw.to_ascii_lowercase().as_str() {
        "k" => Some("K"),
        "n_bound" | "bound" => Some("N"),
        "control" | "controls" => Some("control_mode"),
        "nd" | "ndelta" => Some("n_delta"),
        "alpha_f" => Some("alpha_futility"),
        "master_seed" => Some("seed"),
        _ => None,
    })
}

fn parse_num<T: std::str::FromStr>(entry: &Entry, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::config(entry.key, format!("line {}: cannot parse `{v}`", entry.line)))
}

fn apply(s: &mut TrialScenario, entry: &Entry, v: &str) -> Result<()> {
    let located = |e: Error| match e {
        Error::Domain(msg) => Error::config(entry.key, format!("line {}: {msg}", entry.line)),
        other => other,
    };
    match entry.key {
        "name" => s.id = v.to_string(),
        "procedure" => s.procedure = v.parse().map_err(located)?,
        "spending" => s.spending = v.parse().map_err(located)?,
        "control_mode" => s.control_mode = v.parse().map_err(located)?,
        "order" => s.order = v.parse().map_err(located)?,
        "pi0" => s.pi0 = parse_num(entry, v)?,
        "delta" => s.delta = parse_num(entry, v)?,
        "K" => s.arms = parse_num(entry, v)?,
        "N" => {
            s.n_bound = match v.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "none" | "unbounded" => None,
                _ => Some(parse_num(entry, v)?),
            }
        }
        "beta_mode" => s.beta = v.parse().map_err(located)?,
        "n" => s.n = parse_num(entry, v)?,
        "n1" => s.n1 = parse_num(entry, v)?,
        "n_delta" => s.n_delta = parse_num(entry, v)?,
        "alpha" => s.alpha = parse_num(entry, v)?,
        "alpha_futility" => s.alpha_futility = parse_num(entry, v)?,
        "replications" => s.replications = parse_num(entry, v)?,
        "seed" => s.master_seed = parse_num(entry, v)?,
        "budget" => {
            s.budget = match v.to_ascii_lowercase().as_str() {
                "none" | "off" => None,
                _ => Some(v.parse().map_err(located)?),
            }
        }
        _ => unreachable!("key list and match arms diverged"),
    }
    Ok(())
}

/// Parses a grid configuration into validated scenarios.
pub fn parse_grid(text: &str) -> Result<Vec<TrialScenario>> {
    let mut defaults = Block::default();
    let mut blocks: Vec<Block> = Vec::new();
    let mut in_defaults = true;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            match header.trim() {
                "defaults" => {
                    if !blocks.is_empty() {
                        return Err(Error::Parse { line, msg: "[defaults] must precede all [scenario] blocks".into() });
                    }
                    in_defaults = true;
                }
                "scenario" => {
                    blocks.push(Block::default());
                    in_defaults = false;
                }
                other => return Err(Error::Parse { line, msg: format!("unknown section [{other}]") }),
            }
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{content}`") })?;
        let key = canonical_key(k.trim())
            .ok_or_else(|| Error::config(k.trim(), format!("line {line}: unknown key")))?;
        let values: Vec<String> = v.split(',').map(|x| x.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(Error::config(key, format!("line {line}: empty value")));
        }
        let entry = Entry { key, values, line };
        if in_defaults {
            defaults.insert(entry)?;
        } else {
            blocks.last_mut().expect("scenario block open").insert(entry)?;
        }
    }
    if blocks.is_empty() {
        blocks.push(Block::default());
    }

    let mut out = Vec::new();
    let mut counters: HashMap<String, usize> = HashMap::new();
    for block in &blocks {
        let entries = defaults.overlay(block);
        let total: usize = entries.iter().map(|e| e.values.len()).product();
        for combo in 0..total {
            let mut s = TrialScenario::default();
            let mut rest = combo;
            let mut picks = vec![0usize; entries.len()];
            for (slot, e) in entries.iter().enumerate().rev() {
                picks[slot] = rest % e.values.len();
                rest /= e.values.len();
            }
            for (e, &p) in entries.iter().zip(&picks) {
                apply(&mut s, e, &e.values[p])?;
            }
            let counter = counters.entry(s.id.clone()).or_insert(0);
            *counter += 1;
            s.id = format!("{}-{:04}", s.id, counter);
            s.validate().map_err(|e| match e {
                Error::Config { key, msg } => Error::Config { key, msg: format!("scenario {}: {msg}", s.id) },
                other => other,
            })?;
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ProcedureKind;
    use crate::sim::scenario::{BudgetScenario, ControlMode};

    #[test]
    fn expands_cartesian_product() {
        let text = "
            [defaults]
            replications = 10  # short
            seed = 3
            [scenario]
            name = grid
            procedure = LOND, gsLOND
            pi0 = 0, 0.5, 1
        ";
        let g = parse_grid(text).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0].id, "grid-0001");
        assert_eq!(g[5].id, "grid-0006");
        assert_eq!(g[0].procedure, ProcedureKind::FixedLond);
        assert_eq!(g[2].pi0, 1.0);
        assert_eq!(g[3].procedure, ProcedureKind::GsLond);
        assert!(g.iter().all(|s| s.replications == 10 && s.master_seed == 3));
    }

    #[test]
    fn block_overrides_defaults() {
        let text = "replications = 10\nN = 100\n[scenario]\nN = inf\ncontrol_mode = ncc+cc\nbudget = s3\n";
        let g = parse_grid(text).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].n_bound, None);
        assert_eq!(g[0].control_mode, ControlMode::AllControls);
        assert_eq!(g[0].budget, Some(BudgetScenario::DecreasingNull(1.0 / 80.0)));
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            ("replications = 0\n", "replications"),
            ("pi0 = 1.2\n", "pi0"),
            ("colour = red\n", "colour"),
            ("spending = linear\n", "spending"),
            ("n = ten\n", "n"),
            ("[scenario]\npi0 = 0.1\npi0 = 0.2\n", "pi0"),
            ("K = 20\nN = 10\n", "N"),
        ];
        for (text, key) in cases {
            match parse_grid(text) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert_eq!(
            parse_grid("seed = 1\n\nnot a pair\n"),
            Err(Error::Parse { line: 3, msg: "expected `key = value`, got `not a pair`".into() })
        );
        assert!(matches!(parse_grid("[weird]\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn repeated_names_keep_counting() {
        let text = "replications = 5\n[scenario]\nname = a\n[scenario]\nname = a\ndelta = 0.2, 0.4\n";
        let ids: Vec<String> = parse_grid(text).unwrap().into_iter().map(|s| s.id).collect();
        assert_eq!(ids, ["a-0001", "a-0002", "a-0003"]);
    }
}

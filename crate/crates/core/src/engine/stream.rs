//! Line protocol for streaming decisions.
//!
//! Input, one event per line:
//!
//! ```text
//! REGISTER <beta>
//! INTERIM <index> <p> <time>
//! FINAL <index> <p> <time>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Each accepted event
//! produces one response line `<index> <stage> <nominal_level> <boundary> <outcome>`
//! with levels printed to six decimals.

use std::fmt;

use super::{Response, Timestamp};
use crate::error::{Error, Result};
use crate::numerics::Probability;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Submission {
    Register { beta: f64 },
    Interim { index: usize, p: Probability, time: Timestamp },
    Final { index: usize, p: Probability, time: Timestamp },
}

impl fmt::Display for Submission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{:?}` on f64 round-trips exactly.
        match self {
            Submission::Register { beta } => write!(f, "REGISTER {beta:?}"),
            Submission::Interim { index, p, time } => write!(f, "INTERIM {index} {:?} {time}", p.value()),
            Submission::Final { index, p, time } => write!(f, "FINAL {index} {:?} {time}", p.value()),
        }
    }
}

/// Parses one protocol line. `Ok(None)` for blank and comment lines.
pub fn parse_submission(line: &str, line_no: usize) -> Result<Option<Submission>> {
    let body = line.trim();
    if body.is_empty() || body.starts_with('#') {
        return Ok(None);
    }
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let fields: Vec<&str> = body.split_whitespace().collect();
    let keyword = fields[0].to_ascii_uppercase();
    let number = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| err(format!("invalid {what} `{s}`")))
    };
    let index = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i),
            _ => Err(err(format!("invalid hypothesis index `{s}`"))),
        }
    };
    let time = |s: &str| -> Result<Timestamp> {
        s.parse::<Timestamp>().map_err(|_| err(format!("invalid timestamp `{s}`")))
    };
    let prob = |s: &str| -> Result<Probability> {
        Probability::new(number(s, "p-value")?).map_err(|e| err(e.to_string()))
    };
    match (keyword.as_str(), fields.len()) {
        ("REGISTER", 2) => {
            let beta = number(fields[1], "beta")?;
            if !(beta >= 0.0) || !beta.is_finite() {
                return Err(err(format!("beta must be nonnegative, got {beta}")));
            }
            Ok(Some(Submission::Register { beta }))
        }
        ("INTERIM", 4) => Ok(Some(Submission::Interim {
            index: index(fields[1])?,
            p: prob(fields[2])?,
            time: time(fields[3])?,
        })),
        ("FINAL", 4) => Ok(Some(Submission::Final {
            index: index(fields[1])?,
            p: prob(fields[2])?,
            time: time(fields[3])?,
        })),
        ("REGISTER", _) => Err(err("expected `REGISTER <beta>`".into())),
        ("INTERIM", _) | ("FINAL", _) => Err(err(format!("expected `{keyword} <index> <p> <time>`"))),
        _ => Err(err(format!("unknown event `{}`", fields[0]))),
    }
}

/// Formats a response line.
pub fn format_response(response: &Response) -> String {
    match response {
        Response::Registered { index, beta } => format!("{index} register {beta:.6} - Registered"),
        Response::Decision(e) => format!(
            "{} {} {:.6} {:.6} {}",
            e.index, e.stage, e.nominal_level, e.boundary, e.outcome
        ),
    }
}

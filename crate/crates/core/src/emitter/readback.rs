//! Count-only reader for text this emitter produced. It checks structure
//! just enough to reject foreign input; it is not a general LP/MPS parser.

use std::collections::HashSet;

use super::{EmitError, Format};
use crate::formulation::{model_stats, ModelIR, ModelStats};

pub fn read_back_stats(text: &str, format: Format) -> Result<ModelStats, EmitError> {
    match format {
        Format::Lp => read_lp(text),
        Format::Mps => read_mps(text),
    }
}

/// Errors with [`EmitError::Mismatch`] unless `text` carries exactly the
/// counts of `model`.
pub fn check_round_trip(model: &ModelIR, text: &str, format: Format) -> Result<(), EmitError> {
    let expected = model_stats(model);
    let got = read_back_stats(text, format)?;
    if got != expected {
        return Err(EmitError::Mismatch { expected, got });
    }
    Ok(())
}

fn foreign(msg: impl Into<String>) -> EmitError {
    EmitError::Foreign(msg.into())
}

#[derive(Clone, Copy, PartialEq)]
enum LpSection {
    Start,
    Objective,
    Rows,
    Bounds,
    Binaries,
    End,
}

fn is_sense(t: &str) -> bool {
    matches!(t, "<=" | "=" | ">=" | "<" | ">" | "=<" | "=>")
}

fn is_number(t: &str) -> bool {
    t.parse::<f64>().is_ok() || matches!(t, "inf" | "-inf" | "+inf")
}

fn read_lp(text: &str) -> Result<ModelStats, EmitError> {
    let mut section = LpSection::Start;
    let mut stats = ModelStats::default();
    let mut pending: Vec<&str> = Vec::new();
    let mut bounded: Vec<&str> = Vec::new();
    let mut binaries: HashSet<&str> = HashSet::new();

    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('\\') {
            continue;
        }
        let next = match trimmed {
            "Minimize" if section == LpSection::Start => Some(LpSection::Objective),
            "Subject To" if section == LpSection::Objective => Some(LpSection::Rows),
            "Bounds" if section == LpSection::Rows => Some(LpSection::Bounds),
            "Binaries" if section == LpSection::Bounds => Some(LpSection::Binaries),
            "End" if matches!(section, LpSection::Bounds | LpSection::Binaries) => Some(LpSection::End),
            _ => None,
        };
        if let Some(s) = next {
            if section == LpSection::Rows && !pending.is_empty() {
                return Err(foreign("unterminated constraint"));
            }
            section = s;
            continue;
        }
        match section {
            LpSection::Start => return Err(foreign("missing `Minimize`")),
            LpSection::End => return Err(foreign("text after `End`")),
            LpSection::Objective => {}
            LpSection::Rows => {
                let mut tokens = trimmed.split_whitespace().peekable();
                while let Some(t) = tokens.next() {
                    if is_sense(t) {
                        let rhs = tokens.next().ok_or_else(|| foreign("missing right-hand side"))?;
                        if !is_number(rhs) {
                            return Err(foreign(format!("bad right-hand side `{rhs}`")));
                        }
                        let label = pending.first().copied().unwrap_or("");
                        if !label.ends_with(':') {
                            return Err(foreign("constraint without a name"));
                        }
                        if pending.contains(&"[") {
                            stats.n_cone_constraints += 1;
                            stats.nonzeros += 4;
                        } else {
                            stats.n_linear_constraints += 1;
                            stats.nonzeros += pending[1..]
                                .iter()
                                .filter(|t| !is_number(t) && !matches!(**t, "+" | "-"))
                                .count();
                        }
                        pending.clear();
                    } else {
                        pending.push(t);
                    }
                }
            }
            LpSection::Bounds => {
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                let name = match tokens.as_slice() {
                    [n, "free"] | [n, "=", _] => *n,
                    [_, "<=", n, "<=", _] => *n,
                    _ => return Err(foreign(format!("bad bound `{trimmed}`"))),
                };
                bounded.push(name);
            }
            LpSection::Binaries => {
                binaries.extend(trimmed.split_whitespace());
            }
        }
    }
    if section != LpSection::End {
        return Err(foreign("missing `End`"));
    }
    stats.n_binary = binaries.len();
    stats.n_continuous = bounded
        .iter()
        .collect::<HashSet<_>>()
        .into_iter()
        .filter(|n| !binaries.contains(**n))
        .count();
    Ok(stats)
}

fn read_mps(text: &str) -> Result<ModelStats, EmitError> {
    let mut section = "";
    let mut stats = ModelStats::default();
    let mut objective: Option<&str> = None;
    let mut rows = 0usize;
    let mut in_int = false;
    let mut binaries: HashSet<&str> = HashSet::new();
    let mut continuous: HashSet<&str> = HashSet::new();
    let mut qc_entries = 0usize;
    let mut ended = false;

    for line in text.lines() {
        if line.trim().is_empty() || line.starts_with('*') {
            continue;
        }
        if ended {
            return Err(foreign("text after ENDATA"));
        }
        if !line.starts_with(' ') {
            let head = line.split_whitespace().next().unwrap_or("");
            match head {
                "NAME" | "ROWS" | "COLUMNS" | "RHS" | "BOUNDS" => {}
                "QCMATRIX" => {
                    if qc_entries % 4 != 0 {
                        return Err(foreign("incomplete QCMATRIX block"));
                    }
                    stats.n_cone_constraints += 1;
                }
                "ENDATA" => ended = true,
                other => return Err(foreign(format!("unknown section `{other}`"))),
            }
            if section.is_empty() && head != "NAME" {
                return Err(foreign("missing NAME"));
            }
            section = head;
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match section {
            "ROWS" => match f.as_slice() {
                ["N", name] => objective = Some(name),
                [t, _] if matches!(*t, "E" | "L" | "G") => rows += 1,
                _ => return Err(foreign(format!("bad ROWS line `{line}`"))),
            },
            "COLUMNS" => match f.as_slice() {
                [_, "'MARKER'", "'INTORG'"] => in_int = true,
                [_, "'MARKER'", "'INTEND'"] => in_int = false,
                [col, row, value] if is_number(value) => {
                    if in_int {
                        binaries.insert(col);
                    } else {
                        continuous.insert(col);
                    }
                    if Some(*row) != objective {
                        stats.nonzeros += 1;
                    }
                }
                _ => return Err(foreign(format!("bad COLUMNS line `{line}`"))),
            },
            "RHS" | "BOUNDS" => {}
            "QCMATRIX" => qc_entries += 1,
            _ => return Err(foreign(format!("data outside a section: `{line}`"))),
        }
    }
    if !ended {
        return Err(foreign("missing ENDATA"));
    }
    if qc_entries != 4 * stats.n_cone_constraints {
        return Err(foreign("incomplete QCMATRIX block"));
    }
    stats.n_binary = binaries.len();
    stats.n_continuous = continuous.len();
    stats.n_linear_constraints = rows
        .checked_sub(stats.n_cone_constraints)
        .ok_or_else(|| foreign("more QCMATRIX blocks than rows"))?;
    stats.nonzeros += 4 * stats.n_cone_constraints;
    Ok(stats)
}

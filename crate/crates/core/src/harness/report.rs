use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use super::{BenchRow, HarnessError};
use crate::formulation::FormulationKind;

pub const CSV_HEADER: [&str; 14] = [
    "system",
    "formulation",
    "n_binary",
    "n_continuous",
    "n_linear",
    "n_cone",
    "nonzeros",
    "emit_s",
    "mode",
    "losses_kw",
    "target_kw",
    "deviation_pct",
    "solve_s",
    "trees",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(HarnessError::UnknownFormat(s.to_string())),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let s = r.stats;
        let n = r.native.as_ref();
        w.write_record([
            r.system.clone(),
            r.formulation.to_string(),
            opt(s.map(|s| s.n_binary)),
            opt(s.map(|s| s.n_continuous)),
            opt(s.map(|s| s.n_linear_constraints)),
            opt(s.map(|s| s.n_cone_constraints)),
            opt(s.map(|s| s.nonzeros)),
            opt(r.emit_seconds.map(|t| format!("{t:.6}"))),
            opt(n.map(|n| n.mode)),
            opt(n.map(|n| format!("{:.4}", n.losses_kw))),
            opt(r.target_losses_kw),
            opt(r.deviation_pct.map(|d| format!("{d:.4}"))),
            opt(n.map(|n| format!("{:.6}", n.seconds))),
            opt(n.and_then(|n| n.trees)),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii fields")
}

/// Formulation rows × system columns; a cell holds the native losses, or
/// the nonzero count for emission-only systems.
fn markdown(rows: &[BenchRow]) -> String {
    let mut systems: Vec<&str> = Vec::new();
    for r in rows {
        if !systems.contains(&r.system.as_str()) {
            systems.push(&r.system);
        }
    }
    let mut cells: BTreeMap<(FormulationKind, &str), String> = BTreeMap::new();
    for r in rows {
        let cell = match (&r.native, r.stats, &r.error) {
            (_, _, Some(_)) => "error".to_string(),
            (Some(n), _, _) => format!("{:.2}", n.losses_kw),
            (None, Some(s), _) => format!("{} nz", s.nonzeros),
            (None, None, None) => String::new(),
        };
        cells.insert((r.formulation, &r.system), cell);
    }
    let kinds: Vec<FormulationKind> = FormulationKind::ALL
        .into_iter()
        .filter(|k| rows.iter().any(|r| r.formulation == *k))
        .collect();
    let mut out = String::from("| Model |");
    for s in &systems {
        let _ = write!(out, " {s} |");
    }
    out.push_str("\n|---|");
    for _ in &systems {
        out.push_str("---:|");
    }
    out.push('\n');
    for k in kinds {
        let _ = write!(out, "| {k} |");
        for s in &systems {
            let _ = write!(out, " {} |", cells.get(&(k, *s)).map(String::as_str).unwrap_or(""));
        }
        out.push('\n');
    }
    out
}

pub fn render_report(rows: &[BenchRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => csv(rows),
        ReportFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize") + "\n",
        ReportFormat::Markdown => markdown(rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::ModelStats;
    use crate::harness::{NativeMode, NativeResult};

    fn row(system: &str, kind: FormulationKind, losses: Option<f64>) -> BenchRow {
        BenchRow {
            system: system.to_string(),
            formulation: kind,
            stats: Some(ModelStats {
                n_binary: 3,
                n_continuous: 10,
                n_linear_constraints: 7,
                n_cone_constraints: 3,
                nonzeros: 40,
            }),
            emit_seconds: Some(0.001),
            native: losses.map(|l| NativeResult {
                mode: NativeMode::Exact,
                losses_kw: l,
                seconds: 0.5,
                trees: Some(4),
            }),
            target_losses_kw: Some(100.0),
            deviation_pct: losses.map(|l| super::super::deviation_pct(l, 100.0)),
            gap_pct: None,
            ram_mb: None,
            error: None,
        }
    }

    #[test]
    fn csv_has_fixed_header_and_one_line_per_row() {
        let text = render_report(&[row("a,b", FormulationKind::ScfSt, Some(101.0))], ReportFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(
            lines[1],
            "\"a,b\",scf+st,3,10,7,3,40,0.001000,exact,101.0000,100,1.0000,0.500000,4"
        );
    }

    #[test]
    fn markdown_is_a_formulation_by_system_grid() {
        let rows = [
            row("33", FormulationKind::MCF, Some(139.55)),
            row("33", FormulationKind::Base, Some(139.55)),
            row("417", FormulationKind::Base, None),
            row("417", FormulationKind::MCF, None),
        ];
        let md = render_report(&rows, ReportFormat::Markdown);
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[0], "| Model | 33 | 417 |");
        assert_eq!(lines[2], "| base | 139.55 | 40 nz |");
        assert_eq!(lines[3], "| mcf | 139.55 | 40 nz |");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn json_round_trips() {
        let rows = vec![
            row("x", FormulationKind::PC, Some(3.0)),
            row("x", FormulationKind::ST, None),
        ];
        let text = render_report(&rows, ReportFormat::Json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value[0]["formulation"], "pc");
        assert!(value[1]["gap_pct"].is_null());
        let back: Vec<BenchRow> = serde_json::from_value(value).unwrap();
        assert_eq!(back, rows);
    }
}

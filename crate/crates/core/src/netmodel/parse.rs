//! Canonical sectioned-CSV network format.
//!
//! ```text
//! # comment
//! [system]
//! base_kv = 12.66
//! base_mva = 10
//!
//! [buses]
//! id,p_kw,q_kvar,vmin_pu,vmax_pu,is_substation
//! 1,0,0,1.0,1.0,1
//! 2,100,60,,,0
//!
//! [branches]
//! from,to,r_ohm,x_ohm,imax_a,switchable,closed
//! 1,2,0.0922,0.047,,1,1
//! ```
//!
//! Empty voltage-limit, ampacity, switchable and closed fields take defaults
//! from [`ParseOptions`].

use std::fmt::Write as _;

use thiserror::Error;

use super::{
    current_base_amps, to_physical, Branch, Bus, BusId, Network, NetworkError, Units, DEFAULT_IMAX_PU,
    DEFAULT_LOAD_VMAX, DEFAULT_LOAD_VMIN, SUBSTATION_VOLTAGE,
};

const BUS_HEADER: [&str; 6] = ["id", "p_kw", "q_kvar", "vmin_pu", "vmax_pu", "is_substation"];
const BRANCH_HEADER: [&str; 7] = ["from", "to", "r_ohm", "x_ohm", "imax_a", "switchable", "closed"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing base value `{0}` in [system]")]
    MissingBase(&'static str),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseOptions {
    pub default_imax_pu: f64,
    pub default_vmin: f64,
    pub default_vmax: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            default_imax_pu: DEFAULT_IMAX_PU,
            default_vmin: DEFAULT_LOAD_VMIN,
            default_vmax: DEFAULT_LOAD_VMAX,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    System,
    Buses,
    Branches,
}

struct Field<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Field<'_> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn number(&self, what: &str) -> Result<f64, ParseError> {
        let v: f64 = self
            .text
            .parse()
            .map_err(|_| self.err(format!("invalid number for {what}: `{}`", self.text)))?;
        if !v.is_finite() {
            return Err(self.err(format!("non-finite value for {what}")));
        }
        Ok(v)
    }

    fn optional_number(&self, what: &str) -> Result<Option<f64>, ParseError> {
        if self.text.is_empty() {
            Ok(None)
        } else {
            self.number(what).map(Some)
        }
    }

    fn bus_id(&self, what: &str) -> Result<BusId, ParseError> {
        self.text
            .parse()
            .map_err(|_| self.err(format!("invalid bus id for {what}: `{}`", self.text)))
    }

    fn flag(&self, what: &str, default: bool) -> Result<bool, ParseError> {
        match self.text.to_ascii_lowercase().as_str() {
            "" => Ok(default),
            "1" | "true" | "yes" => Ok(true),
            "0" | "false" | "no" => Ok(false),
            _ => Err(self.err(format!("invalid boolean for {what}: `{}`", self.text))),
        }
    }
}

fn split_fields(raw: &str, line: usize) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in raw.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        out.push(Field {
            text: piece.trim(),
            line,
            column: raw[..start].chars().count() + lead + 1,
        });
        start += piece.len() + 1;
    }
    out
}

/// Parses a canonical network document with default options.
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    parse_network_with(text, &ParseOptions::default())
}

/// from, to, r, x, optional ampacity, switchable, closed
type BranchRow = (BusId, BusId, f64, f64, Option<f64>, bool, bool);

pub fn parse_network_with(text: &str, opts: &ParseOptions) -> Result<Network, ParseError> {
    let mut section = Section::None;
    let mut header_seen = false;
    let mut base_kv: Option<f64> = None;
    let mut base_mva: Option<f64> = None;
    let mut buses: Vec<Bus> = Vec::new();
    // Ampacity defaults depend on the bases, which may appear after [branches].
    let mut branch_rows: Vec<BranchRow> = Vec::new();

    for (n, raw_line) in text.split('\n').enumerate() {
        let line_no = n + 1;
        let raw = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        let syntax = |column: usize, message: String| ParseError::Syntax {
            line: line_no,
            column,
            message,
        };
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| syntax(indent + 1, "unterminated section header".into()))?;
            section = match name.trim() {
                "system" => Section::System,
                "buses" => Section::Buses,
                "branches" => Section::Branches,
                other => return Err(syntax(indent + 2, format!("unknown section `{other}`"))),
            };
            header_seen = false;
            continue;
        }
        match section {
            Section::None => {
                return Err(syntax(indent + 1, "data outside of any section".into()));
            }
            Section::System => {
                let (key, value) = trimmed
                    .split_once('=')
                    .ok_or_else(|| syntax(indent + 1, "expected `key = value`".into()))?;
                let value_col = raw.find('=').map_or(1, |p| p + 2);
                let field = Field {
                    text: value.trim(),
                    line: line_no,
                    column: value_col,
                };
                let slot = match key.trim() {
                    "base_kv" => &mut base_kv,
                    "base_mva" => &mut base_mva,
                    other => return Err(syntax(indent + 1, format!("unknown system key `{other}`"))),
                };
                if slot.is_some() {
                    return Err(syntax(indent + 1, format!("duplicate key `{}`", key.trim())));
                }
                *slot = Some(field.number(key.trim())?);
            }
            Section::Buses | Section::Branches => {
                let fields = split_fields(raw, line_no);
                let expected: &[&str] = if section == Section::Buses {
                    &BUS_HEADER
                } else {
                    &BRANCH_HEADER
                };
                if !header_seen {
                    let names: Vec<&str> = fields.iter().map(|f| f.text).collect();
                    if names != expected {
                        return Err(syntax(indent + 1, format!("expected header `{}`", expected.join(","))));
                    }
                    header_seen = true;
                    continue;
                }
                if fields.len() != expected.len() {
                    return Err(syntax(
                        indent + 1,
                        format!("expected {} fields, found {}", expected.len(), fields.len()),
                    ));
                }
                if section == Section::Buses {
                    let sub = fields[5].flag("is_substation", false)?;
                    let (dmin, dmax) = if sub {
                        (SUBSTATION_VOLTAGE, SUBSTATION_VOLTAGE)
                    } else {
                        (opts.default_vmin, opts.default_vmax)
                    };
                    let bus = Bus {
                        id: fields[0].bus_id("id")?,
                        p_demand: fields[1].number("p_kw")?,
                        q_demand: fields[2].number("q_kvar")?,
                        v_min: fields[3].optional_number("vmin_pu")?.unwrap_or(dmin),
                        v_max: fields[4].optional_number("vmax_pu")?.unwrap_or(dmax),
                        is_substation: sub,
                    };
                    buses.push(bus);
                } else {
                    branch_rows.push((
                        fields[0].bus_id("from")?,
                        fields[1].bus_id("to")?,
                        fields[2].number("r_ohm")?,
                        fields[3].number("x_ohm")?,
                        fields[4].optional_number("imax_a")?,
                        fields[5].flag("switchable", true)?,
                        fields[6].flag("closed", true)?,
                    ));
                }
            }
        }
    }

    let base_kv = base_kv.ok_or(ParseError::MissingBase("base_kv"))?;
    let base_mva = base_mva.ok_or(ParseError::MissingBase("base_mva"))?;
    let default_imax = opts.default_imax_pu * current_base_amps(base_kv, base_mva);
    let branches = branch_rows
        .into_iter()
        .map(|(from, to, r, x, imax, switchable, closed)| Branch {
            from_bus: from,
            to_bus: to,
            r,
            x,
            i_max: imax.unwrap_or(default_imax),
            switchable,
            initially_closed: closed,
        })
        .collect();
    Ok(Network::new(base_kv, base_mva, buses, branches)?)
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Writes a network in the canonical format. Per-unit networks are converted
/// back to physical units first.
pub fn serialize_network(net: &Network) -> String {
    let physical;
    let net = if net.units() == Units::PerUnit {
        physical = to_physical(net);
        &physical
    } else {
        net
    };
    let mut out = String::new();
    let _ = writeln!(out, "[system]");
    let _ = writeln!(out, "base_kv = {}", net.base_kv());
    let _ = writeln!(out, "base_mva = {}", net.base_mva());
    let _ = writeln!(out, "\n[buses]\n{}", BUS_HEADER.join(","));
    for b in net.buses() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            b.id,
            b.p_demand,
            b.q_demand,
            b.v_min,
            b.v_max,
            flag(b.is_substation)
        );
    }
    let _ = writeln!(out, "\n[branches]\n{}", BRANCH_HEADER.join(","));
    for br in net.branches() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            br.from_bus,
            br.to_bus,
            br.r,
            br.x,
            br.i_max,
            flag(br.switchable),
            flag(br.initially_closed)
        );
    }
    out
}

//! Importer for the branch-list layout in which the 33-bus feeder usually
//! circulates: one line per branch with the load of its receiving bus.
//!
//! ```text
//! from,to,r_ohm,x_ohm,p_kw_at_to,q_kvar_at_to[,closed]
//! ```
//!
//! Blank lines and `#` comments are skipped; a header line whose first field
//! is not numeric is ignored. Loads listed against the same receiving bus are
//! summed. Bases and the substation id are not part of the layout and come
//! from [`BranchListOptions`].

use std::collections::BTreeMap;

use super::{
    current_base_amps, Branch, Bus, BusId, Network, ParseError, DEFAULT_IMAX_PU, DEFAULT_LOAD_VMAX, DEFAULT_LOAD_VMIN,
    SUBSTATION_VOLTAGE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct BranchListOptions {
    pub base_kv: f64,
    pub base_mva: f64,
    pub substation: BusId,
}

fn syntax(line: usize, column: usize, message: String) -> ParseError {
    ParseError::Syntax { line, column, message }
}

pub fn parse_branch_list(text: &str, opts: &BranchListOptions) -> Result<Network, ParseError> {
    let mut loads: BTreeMap<BusId, (f64, f64)> = BTreeMap::new();
    let mut order: Vec<BusId> = Vec::new();
    let mut branches = Vec::new();
    let default_imax = DEFAULT_IMAX_PU * current_base_amps(opts.base_kv, opts.base_mva);

    fn see(id: BusId, order: &mut Vec<BusId>, loads: &mut BTreeMap<BusId, (f64, f64)>) {
        if let std::collections::btree_map::Entry::Vacant(e) = loads.entry(id) {
            e.insert((0.0, 0.0));
            order.push(id);
        }
    }
    see(opts.substation, &mut order, &mut loads);

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields[0].parse::<f64>().is_err() && branches.is_empty() && order.len() == 1 {
            // header
            continue;
        }
        if fields.len() != 6 && fields.len() != 7 {
            return Err(syntax(
                line,
                1,
                format!("expected 6 or 7 fields, found {}", fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64, ParseError> {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| syntax(line, i + 1, format!("invalid number `{}`", fields[i])))
        };
        let id = |i: usize| -> Result<BusId, ParseError> {
            fields[i]
                .parse::<BusId>()
                .map_err(|_| syntax(line, i + 1, format!("invalid bus id `{}`", fields[i])))
        };
        let (from, to) = (id(0)?, id(1)?);
        let (r, x, p, q) = (num(2)?, num(3)?, num(4)?, num(5)?);
        let closed = match fields.get(6).copied() {
            None | Some("1") | Some("true") => true,
            Some("0") | Some("false") => false,
            Some(other) => return Err(syntax(line, 7, format!("invalid boolean `{other}`"))),
        };
        see(from, &mut order, &mut loads);
        see(to, &mut order, &mut loads);
        let entry = loads.get_mut(&to).expect("registered above");
        entry.0 += p;
        entry.1 += q;
        branches.push(Branch {
            from_bus: from,
            to_bus: to,
            r,
            x,
            i_max: default_imax,
            switchable: true,
            initially_closed: closed,
        });
    }

    let buses = order
        .iter()
        .map(|&id| {
            let sub = id == opts.substation;
            let (p, q) = loads[&id];
            Bus {
                id,
                p_demand: p,
                q_demand: q,
                v_min: if sub { SUBSTATION_VOLTAGE } else { DEFAULT_LOAD_VMIN },
                v_max: if sub { SUBSTATION_VOLTAGE } else { DEFAULT_LOAD_VMAX },
                is_substation: sub,
            }
        })
        .collect();
    Ok(Network::new(opts.base_kv, opts.base_mva, buses, branches)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imports_branch_list_with_ties() {
        let text = "from,to,r_ohm,x_ohm,p_kw_at_to,q_kvar_at_to\n\
                    1,2,0.0922,0.047,100,60\n\
                    2,3,0.493,0.2511,90,40\n\
                    # tie\n\
                    3,1,2,2,0,0,0\n";
        let net = parse_branch_list(
            text,
            &BranchListOptions {
                base_kv: 12.66,
                base_mva: 10.0,
                substation: 1,
            },
        )
        .unwrap();
        assert_eq!(net.n_buses(), 3);
        assert_eq!(net.n_branches(), 3);
        assert!(net.bus(0).is_substation);
        assert_eq!(net.bus(2).p_demand, 90.0);
        assert!(!net.branch(2).initially_closed);
    }

    #[test]
    fn rejects_malformed_rows() {
        let opts = BranchListOptions {
            base_kv: 10.0,
            base_mva: 1.0,
            substation: 1,
        };
        assert!(parse_branch_list("1,2,0.1,0.1,5\n", &opts).is_err());
        assert!(parse_branch_list("1,2,0.1,abc,5,5\n", &opts).is_err());
        assert!(parse_branch_list("1,2,0.1,0.1,5,5,maybe\n", &opts).is_err());
    }
}

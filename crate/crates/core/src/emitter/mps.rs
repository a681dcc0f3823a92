use std::fmt::Write;

use super::{format_number, EmitError, EmitOptions, MAX_MPS_NAME};
use crate::formulation::{ModelIR, Sense, VarKind};

fn check_name(name: &str) -> Result<(), EmitError> {
    let len = name.chars().count();
    if len > MAX_MPS_NAME {
        return Err(EmitError::NameTooLong {
            name: name.to_string(),
            len,
        });
    }
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_graphic()) {
        return Err(EmitError::BadMpsName(name.to_string()));
    }
    Ok(())
}

/// Pads to the classic field widths while still accepting long names.
fn field(out: &mut String, s: &str, width: usize) {
    out.push_str(s);
    for _ in s.len()..width {
        out.push(' ');
    }
    out.push(' ');
}

fn entry(out: &mut String, a: &str, b: &str, value: &str) {
    out.push_str("    ");
    field(out, a, 8);
    field(out, b, 8);
    out.push_str(value);
    out.push('\n');
}

pub fn write_mps(model: &ModelIR, opts: &EmitOptions) -> Result<String, EmitError> {
    opts.check()?;
    let prec = opts.precision;
    check_name(&opts.objective_name)?;
    for v in model.variables() {
        check_name(&v.name)?;
    }
    for r in model.linear_constraints() {
        check_name(&r.name)?;
    }
    for c in model.cone_constraints() {
        check_name(&c.name)?;
    }
    let obj = opts.objective_name.as_str();
    let nvar = model.variables().len();

    // Column-major view of the linear rows.
    let mut cols: Vec<Vec<(&str, f64)>> = vec![Vec::new(); nvar];
    for &(v, c) in model.objective() {
        cols[v].push((obj, c));
    }
    for row in model.linear_constraints() {
        for &(v, c) in &row.terms {
            cols[v].push((row.name.as_str(), c));
        }
    }

    let mut out = String::new();
    out.push_str("NAME          model\nROWS\n");
    let _ = writeln!(out, " N  {obj}");
    for row in model.linear_constraints() {
        let t = match row.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {t}  {}", row.name);
    }
    for c in model.cone_constraints() {
        let _ = writeln!(out, " L  {}", c.name);
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (v, var) in model.variables().iter().enumerate() {
        let binary = var.kind == VarKind::Binary;
        if binary != in_int {
            let tag = if binary { "'INTORG'" } else { "'INTEND'" };
            entry(&mut out, &format!("MARKER{marker}"), "'MARKER'", tag);
            marker += 1;
            in_int = binary;
        }
        if cols[v].is_empty() {
            // declare the column even when it only appears in a cone
            entry(&mut out, &var.name, obj, "0");
        }
        for &(row, c) in &cols[v] {
            entry(&mut out, &var.name, row, &format_number(c, prec));
        }
    }
    if in_int {
        entry(&mut out, &format!("MARKER{marker}"), "'MARKER'", "'INTEND'");
    }

    out.push_str("RHS\n");
    for row in model.linear_constraints() {
        if row.rhs != 0.0 {
            entry(&mut out, "RHS", &row.name, &format_number(row.rhs, prec));
        }
    }

    out.push_str("BOUNDS\n");
    for var in model.variables() {
        let n = var.name.as_str();
        let bound = |out: &mut String, t: &str, value: Option<f64>| {
            let _ = write!(out, " {t} ");
            field(out, "BND", 8);
            match value {
                Some(x) => {
                    field(out, n, 8);
                    out.push_str(&format_number(x, prec));
                }
                None => out.push_str(n),
            }
            out.push('\n');
        };
        if var.lb == var.ub {
            bound(&mut out, "FX", Some(var.lb));
        } else if var.kind == VarKind::Binary && var.lb == 0.0 && var.ub == 1.0 {
            bound(&mut out, "BV", None);
        } else if var.lb == f64::NEG_INFINITY && var.ub == f64::INFINITY {
            bound(&mut out, "FR", None);
        } else {
            if var.lb == f64::NEG_INFINITY {
                bound(&mut out, "MI", None);
            } else if var.lb != 0.0 || var.kind == VarKind::Binary {
                bound(&mut out, "LO", Some(var.lb));
            }
            if var.ub == f64::INFINITY {
                bound(&mut out, "PL", None);
            } else {
                bound(&mut out, "UP", Some(var.ub));
            }
        }
    }

    let vars = model.variables();
    for c in model.cone_constraints() {
        let _ = writeln!(out, "QCMATRIX   {}", c.name);
        let (p, q, u, v) = (&vars[c.p].name, &vars[c.q].name, &vars[c.u].name, &vars[c.v].name);
        entry(&mut out, p, p, "1");
        entry(&mut out, q, q, "1");
        entry(&mut out, u, v, "-0.5");
        entry(&mut out, v, u, "-0.5");
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

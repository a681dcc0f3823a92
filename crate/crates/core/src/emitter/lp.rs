use std::collections::HashMap;
use std::fmt::Write;

use super::{format_number, EmitError, EmitOptions};
use crate::formulation::{ModelIR, Sense, VarKind};

/// Terms per physical line; keeps lines well under the 510-character limit
/// some readers enforce.
const TERMS_PER_LINE: usize = 6;

fn allowed(c: char) -> bool {
    c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c)
}

/// Maps the catalogue names onto the LP alphabet: brackets become
/// parentheses and `->` becomes `~`.
pub(crate) fn lp_name(name: &str) -> Result<String, EmitError> {
    let s = name.replace("->", "~").replace('[', "(").replace(']', ")");
    let first = s.chars().next();
    if first.map_or(true, |c| c.is_ascii_digit() || c == '.') || !s.chars().all(allowed) {
        return Err(EmitError::ForbiddenName(name.to_string()));
    }
    Ok(s)
}

fn lp_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<Vec<String>, EmitError> {
    let mut seen: HashMap<String, &str> = HashMap::new();
    let mut out = Vec::new();
    for n in names {
        let s = lp_name(n)?;
        if let Some(prev) = seen.insert(s.clone(), n) {
            return Err(EmitError::NameCollision(prev.to_string(), n.to_string()));
        }
        out.push(s);
    }
    Ok(out)
}

fn sense_str(s: Sense) -> &'static str {
    match s {
        Sense::Le => "<=",
        Sense::Eq => "=",
        Sense::Ge => ">=",
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], vars: &[String], prec: u8) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (n, &(v, c)) in terms.iter().enumerate() {
        if n > 0 && n % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        if n == 0 && sign == '+' {
            let _ = write!(out, " {} {}", format_number(c, prec), vars[v]);
        } else {
            let _ = write!(out, " {sign} {} {}", format_number(c.abs(), prec), vars[v]);
        }
    }
}

pub fn write_lp(model: &ModelIR, opts: &EmitOptions) -> Result<String, EmitError> {
    opts.check()?;
    let prec = opts.precision;
    let vars = lp_names(model.variables().iter().map(|v| v.name.as_str()))?;
    let obj = lp_name(&opts.objective_name)?;
    let rows = lp_names(
        std::iter::once(opts.objective_name.as_str())
            .chain(model.linear_constraints().iter().map(|r| r.name.as_str()))
            .chain(model.cone_constraints().iter().map(|c| c.name.as_str())),
    )?;
    let mut rows = rows.into_iter().skip(1);

    let mut out = String::new();
    out.push_str("Minimize\n");
    let _ = write!(out, " {obj}:");
    write_terms(&mut out, model.objective(), &vars, prec);
    out.push_str("\nSubject To\n");
    for row in model.linear_constraints() {
        let _ = write!(out, " {}:", rows.next().expect("one name per row"));
        write_terms(&mut out, &row.terms, &vars, prec);
        let _ = writeln!(out, " {} {}", sense_str(row.sense), format_number(row.rhs, prec));
    }
    for c in model.cone_constraints() {
        let _ = writeln!(
            out,
            " {}: [ {p} ^2 + {q} ^2 - {u} * {v} ] <= 0",
            rows.next().expect("one name per row"),
            p = vars[c.p],
            q = vars[c.q],
            u = vars[c.u],
            v = vars[c.v],
        );
    }

    out.push_str("Bounds\n");
    for (var, name) in model.variables().iter().zip(&vars) {
        let binary = var.kind == VarKind::Binary;
        if binary && var.lb != var.ub {
            continue;
        }
        if var.lb == var.ub {
            let _ = writeln!(out, " {name} = {}", format_number(var.lb, prec));
        } else if var.lb == f64::NEG_INFINITY && var.ub == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else {
            let _ = writeln!(
                out,
                " {} <= {name} <= {}",
                format_number(var.lb, prec),
                format_number(var.ub, prec)
            );
        }
    }
    let binaries: Vec<&String> = model
        .variables()
        .iter()
        .zip(&vars)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for n in binaries {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitizes_catalogue_names() {
        assert_eq!(lp_name("fk[3][1->2]").unwrap(), "fk(3)(1~2)");
        assert_eq!(lp_name("y[1,2]").unwrap(), "y(1,2)");
        assert!(lp_name("a b").is_err());
        assert!(lp_name("1x").is_err());
        assert!(lp_name("").is_err());
    }

    #[test]
    fn empty_model_skeleton() {
        let text = write_lp(&ModelIR::new(), &EmitOptions::default()).unwrap();
        assert_eq!(text, "Minimize\n obj: 0\nSubject To\nBounds\nEnd\n");
    }

    #[test]
    fn collisions_are_reported() {
        let mut m = ModelIR::new();
        m.add_var("a~b", VarKind::Continuous, 0.0, 1.0).unwrap();
        m.add_var("a->b", VarKind::Continuous, 0.0, 1.0).unwrap();
        assert!(matches!(
            write_lp(&m, &EmitOptions::default()),
            Err(EmitError::NameCollision(..))
        ));
    }
}

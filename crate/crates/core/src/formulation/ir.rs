use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{FormulationError, FormulationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearConstraint {
    pub name: String,
    /// `(variable index, coefficient)` in insertion order.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Rotated cone `u * v >= p^2 + q^2` over variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeConstraint {
    pub name: String,
    pub u: usize,
    pub v: usize,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelStats {
    pub n_binary: usize,
    pub n_continuous: usize,
    pub n_linear_constraints: usize,
    pub n_cone_constraints: usize,
    /// Linear-row coefficients plus four entries per cone row.
    pub nonzeros: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ModelIR {
    variables: Vec<Variable>,
    linear: Vec<LinearConstraint>,
    cones: Vec<ConeConstraint>,
    objective: Vec<(usize, f64)>,
    var_names: HashMap<String, usize>,
    row_names: HashSet<String>,
    fingerprint: Option<u64>,
    radiality: Option<FormulationKind>,
}

impl PartialEq for ModelIR {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.linear == other.linear
            && self.cones == other.cones
            && self.objective == other.objective
    }
}

impl ModelIR {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lb: f64,
        ub: f64,
    ) -> Result<usize, FormulationError> {
        let name = name.into();
        if lb.is_nan() || ub.is_nan() || lb > ub {
            return Err(FormulationError::BadBounds { name, lb, ub });
        }
        if self.var_names.contains_key(&name) {
            return Err(FormulationError::DuplicateName(name));
        }
        let id = self.variables.len();
        self.var_names.insert(name.clone(), id);
        self.variables.push(Variable { name, kind, lb, ub });
        Ok(id)
    }

    fn claim_row(&mut self, name: &str) -> Result<(), FormulationError> {
        if !self.row_names.insert(name.to_string()) {
            return Err(FormulationError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    fn check_var(&self, row: &str, var: usize) -> Result<(), FormulationError> {
        if var >= self.variables.len() {
            return Err(FormulationError::UnknownVariable {
                row: row.to_string(),
                var,
            });
        }
        Ok(())
    }

    pub fn add_linear(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, FormulationError> {
        let name = name.into();
        for &(v, _) in &terms {
            self.check_var(&name, v)?;
        }
        self.claim_row(&name)?;
        self.linear.push(LinearConstraint {
            name,
            terms,
            sense,
            rhs,
        });
        Ok(self.linear.len() - 1)
    }

    pub fn add_cone(
        &mut self,
        name: impl Into<String>,
        u: usize,
        v: usize,
        p: usize,
        q: usize,
    ) -> Result<usize, FormulationError> {
        let name = name.into();
        for var in [u, v, p, q] {
            self.check_var(&name, var)?;
        }
        self.claim_row(&name)?;
        self.cones.push(ConeConstraint { name, u, v, p, q });
        Ok(self.cones.len() - 1)
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>) -> Result<(), FormulationError> {
        for &(v, _) in &terms {
            self.check_var("objective", v)?;
        }
        self.objective = terms;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn linear_constraints(&self) -> &[LinearConstraint] {
        &self.linear
    }

    pub fn cone_constraints(&self) -> &[ConeConstraint] {
        &self.cones
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.get(name).copied()
    }

    /// Digest of the network the model was built from, if any.
    pub fn fingerprint(&self) -> Option<u64> {
        self.fingerprint
    }

    pub(crate) fn set_fingerprint(&mut self, fp: u64) {
        self.fingerprint = Some(fp);
    }

    pub fn radiality(&self) -> Option<FormulationKind> {
        self.radiality
    }

    pub(crate) fn set_radiality(&mut self, kind: FormulationKind) {
        self.radiality = Some(kind);
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v]).sum()
    }

    /// Worst violation of a candidate point, split by constraint class.
    pub fn residuals(&self, x: &[f64]) -> Residuals {
        assert_eq!(x.len(), self.variables.len(), "point has wrong length");
        let mut r = Residuals::default();
        for (var, &val) in self.variables.iter().zip(x) {
            let mut viol = (var.lb - val).max(val - var.ub).max(0.0);
            if var.kind == VarKind::Binary {
                viol = viol.max(val.min(1.0 - val).max(0.0));
            }
            if viol > r.bounds {
                r.bounds = viol;
                r.worst_bound = Some(var.name.clone());
            }
        }
        for row in &self.linear {
            let lhs: f64 = row.terms.iter().map(|&(v, c)| c * x[v]).sum();
            let viol = match row.sense {
                Sense::Le => (lhs - row.rhs).max(0.0),
                Sense::Ge => (row.rhs - lhs).max(0.0),
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            if viol > r.linear {
                r.linear = viol;
                r.worst_linear = Some(row.name.clone());
            }
        }
        for c in &self.cones {
            let gap = x[c.u] * x[c.v] - x[c.p] * x[c.p] - x[c.q] * x[c.q];
            r.cone = r.cone.max((-gap).max(0.0));
            r.cone_gap = r.cone_gap.max(gap.abs());
        }
        r
    }
}

/// Maximum violations of a point; `cone_gap` measures tightness rather than
/// feasibility.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Residuals {
    pub bounds: f64,
    pub linear: f64,
    pub cone: f64,
    pub cone_gap: f64,
    pub worst_bound: Option<String>,
    pub worst_linear: Option<String>,
}

pub fn model_stats(model: &ModelIR) -> ModelStats {
    let n_binary = model.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
    ModelStats {
        n_binary,
        n_continuous: model.variables.len() - n_binary,
        n_linear_constraints: model.linear.len(),
        n_cone_constraints: model.cones.len(),
        nonzeros: model.linear.iter().map(|r| r.terms.len()).sum::<usize>() + 4 * model.cones.len(),
    }
}

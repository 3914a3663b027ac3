//! Solver-agnostic MILP container: variables with bounds and integrality,
//! linear constraints, a linear objective, plus canonical LP-format export
//! and an assignment checker used to audit solutions.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::MilpError;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

pub type VarId = usize;

#[derive(Clone, Debug)]
pub struct VarDef {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct MilpModel {
    pub name: String,
    vars: Vec<VarDef>,
    index: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    pub objective_constant: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModelStats {
    pub variables: usize,
    pub binaries: usize,
    pub integers: usize,
    pub constraints: usize,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        MilpModel {
            name: name.into(),
            ..MilpModel::default()
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> VarId {
        let name = name.into();
        debug_assert!(!self.index.contains_key(&name), "duplicate variable {name}");
        let (lower, upper) = match kind {
            VarKind::Binary => (0.0, 1.0),
            _ => (lower, upper),
        };
        let id = self.vars.len();
        self.index.insert(name.clone(), id);
        self.vars.push(VarDef {
            name,
            kind,
            lower,
            upper,
        });
        id
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        debug_assert!(!terms.is_empty(), "empty constraint row");
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
    }

    pub fn add_objective_term(&mut self, var: VarId, coefficient: f64) {
        if coefficient != 0.0 {
            self.objective.push((var, coefficient));
        }
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn has_integrality(&self) -> bool {
        self.vars.iter().any(|v| v.kind != VarKind::Continuous)
    }

    pub fn stats(&self) -> ModelStats {
        ModelStats {
            variables: self.vars.len(),
            binaries: self.vars.iter().filter(|v| v.kind == VarKind::Binary).count(),
            integers: self.vars.iter().filter(|v| v.kind == VarKind::Integer).count(),
            constraints: self.constraints.len(),
        }
    }

    /// Structural checks run before handing the model to a backend.
    pub fn validate(&self) -> Result<(), MilpError> {
        for c in &self.constraints {
            if c.terms.is_empty() {
                return Err(MilpError::InvalidModel(format!("empty constraint row {}", c.name)));
            }
            for &(v, _) in &c.terms {
                if v >= self.vars.len() {
                    return Err(MilpError::InvalidModel(format!(
                        "constraint {} references undeclared variable",
                        c.name
                    )));
                }
            }
        }
        for v in &self.vars {
            if v.lower > v.upper {
                return Err(MilpError::InvalidModel(format!(
                    "variable {} has crossed bounds",
                    v.name
                )));
            }
            if v.kind == VarKind::Binary && (v.lower != 0.0 || v.upper != 1.0) {
                return Err(MilpError::InvalidModel(format!(
                    "binary variable {} must be bounded [0, 1]",
                    v.name
                )));
            }
        }
        Ok(())
    }

    /// Objective value of an assignment, including the constant part.
    pub fn objective_value(&self, assignment: &[f64]) -> f64 {
        self.objective
            .iter()
            .map(|&(v, c)| c * assignment[v])
            .sum::<f64>()
            + self.objective_constant
    }

    /// Constraint and bound violations beyond `tol`, for solution audits.
    pub fn check_assignment(&self, assignment: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if assignment.len() != self.vars.len() {
            out.push(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.vars.len()
            ));
            return out;
        }
        for (v, def) in self.vars.iter().enumerate() {
            let x = assignment[v];
            if x < def.lower - tol || x > def.upper + tol {
                out.push(format!("{} = {x} violates bounds [{}, {}]", def.name, def.lower, def.upper));
            }
            if def.kind != VarKind::Continuous && (x - x.round()).abs() > tol {
                out.push(format!("{} = {x} is not integral", def.name));
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, k)| k * assignment[v]).sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs + tol,
                Sense::Ge => lhs >= c.rhs - tol,
                Sense::Eq => (lhs - c.rhs).abs() <= tol,
            };
            if !ok {
                out.push(format!(
                    "{}: lhs {lhs} violates {} {}",
                    c.name,
                    match c.sense {
                        Sense::Le => "<=",
                        Sense::Ge => ">=",
                        Sense::Eq => "=",
                    },
                    c.rhs
                ));
            }
        }
        out
    }

    /// Canonical LP-format text with deterministic variable and row ordering,
    /// suitable for cross-solver verification and golden-file diffs.
    pub fn export_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ Problem: {}", self.name);
        let _ = writeln!(out, "Minimize");
        let mut obj = String::new();
        write_terms(&mut obj, &self.objective, &self.vars);
        if self.objective_constant != 0.0 {
            if obj.is_empty() {
                let _ = write!(obj, "{}", self.objective_constant);
            } else {
                let _ = write!(obj, " + {}", self.objective_constant);
            }
        }
        if obj.is_empty() {
            obj.push('0');
        }
        let _ = writeln!(out, " obj: {obj}");
        let _ = writeln!(out, "Subject To");
        for c in &self.constraints {
            let mut row = String::new();
            write_terms(&mut row, &c.terms, &self.vars);
            let sense = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {}: {row} {sense} {}", c.name, c.rhs);
        }
        let _ = writeln!(out, "Bounds");
        for v in &self.vars {
            if v.kind == VarKind::Binary {
                continue;
            }
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
        let binaries: Vec<&str> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            let _ = writeln!(out, "Binaries");
            for name in binaries {
                let _ = writeln!(out, " {name}");
            }
        }
        let integers: Vec<&str> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Integer)
            .map(|v| v.name.as_str())
            .collect();
        if !integers.is_empty() {
            let _ = writeln!(out, "Generals");
            for name in integers {
                let _ = writeln!(out, " {name}");
            }
        }
        let _ = writeln!(out, "End");
        out
    }
}

fn write_terms(out: &mut String, terms: &[(VarId, f64)], vars: &[VarDef]) {
    for (i, &(v, c)) in terms.iter().enumerate() {
        if i == 0 {
            if c < 0.0 {
                let _ = write!(out, "-{} {}", -c, vars[v].name);
            } else {
                let _ = write!(out, "{} {}", c, vars[v].name);
            }
        } else if c < 0.0 {
            let _ = write!(out, " - {} {}", -c, vars[v].name);
        } else {
            let _ = write!(out, " + {} {}", c, vars[v].name);
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MilpModel {
        let mut m = MilpModel::new("tiny");
        let x = m.add_var("x", VarKind::Continuous, -2.0, 2.0);
        let b = m.add_var("b", VarKind::Binary, 0.0, 1.0);
        let n = m.add_var("n", VarKind::Integer, 0.0, 7.0);
        m.add_constraint("c0", vec![(x, 1.0), (b, -3.0)], Sense::Le, 4.0);
        m.add_constraint("c1", vec![(n, 1.0), (x, 2.5)], Sense::Ge, -1.0);
        m.add_constraint("c2", vec![(n, 1.0)], Sense::Eq, 3.0);
        m.add_objective_term(x, 1.5);
        m.add_objective_term(n, -0.5);
        m.objective_constant = 2.0;
        m
    }

    #[test]
    fn empty_model_exports_header_and_sections() {
        let m = MilpModel::new("empty");
        let lp = m.export_lp();
        assert!(lp.starts_with("\\ Problem: empty\n"));
        assert!(lp.contains("Minimize\n obj: 0\n"));
        assert!(lp.contains("Subject To\n"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn export_is_deterministic() {
        assert_eq!(tiny().export_lp(), tiny().export_lp());
    }

    #[test]
    fn export_parse_reexport_is_fixed_point() {
        let lp = tiny().export_lp();
        let reparsed = lp_parse::parse(&lp);
        assert_eq!(reparsed.export_lp(), lp);
    }

    #[test]
    fn check_assignment_flags_violations() {
        let m = tiny();
        // x=0, b=0, n=3 satisfies everything.
        assert!(m.check_assignment(&[0.0, 0.0, 3.0], 1e-6).is_empty());
        // n=2 violates c2; b=0.5 is fractional.
        let bad = m.check_assignment(&[0.0, 0.5, 2.0], 1e-6);
        assert_eq!(bad.len(), 2);
    }

    #[test]
    fn objective_includes_constant() {
        let m = tiny();
        let v = m.objective_value(&[2.0, 0.0, 3.0]);
        assert!((v - (1.5 * 2.0 - 0.5 * 3.0 + 2.0)).abs() < 1e-12);
    }
}

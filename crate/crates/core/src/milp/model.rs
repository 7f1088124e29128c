use std::collections::{BTreeMap, HashMap};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// `lower ≤ Σ coef·var ≤ upper` over binary variables.
///
/// Terms are merged per variable and zero coefficients dropped when the
/// constraint enters a [`Model`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(i64, VarId)>,
    pub lower: Option<i64>,
    pub upper: Option<i64>,
    /// Constraint family label, used for LP row names.
    pub tag: String,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(i64, VarId)>, lower: Option<i64>, upper: Option<i64>, tag: impl Into<String>) -> Self {
        LinearConstraint { terms, lower, upper, tag: tag.into() }
    }

    pub fn at_least(terms: Vec<(i64, VarId)>, rhs: i64, tag: impl Into<String>) -> Self {
        Self::new(terms, Some(rhs), None, tag)
    }

    pub fn at_most(terms: Vec<(i64, VarId)>, rhs: i64, tag: impl Into<String>) -> Self {
        Self::new(terms, None, Some(rhs), tag)
    }

    pub fn equal(terms: Vec<(i64, VarId)>, rhs: i64, tag: impl Into<String>) -> Self {
        Self::new(terms, Some(rhs), Some(rhs), tag)
    }

    pub fn activity(&self, assignment: &[bool]) -> i64 {
        self.terms.iter().filter(|(_, v)| assignment[v.0]).map(|(c, _)| c).sum()
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        let a = self.activity(assignment);
        self.lower.is_none_or(|l| a >= l) && self.upper.is_none_or(|u| a <= u)
    }

    /// Merges repeated variables (summing coefficients) and drops zeros;
    /// terms end up sorted by variable id.
    fn normalize(&mut self) {
        let mut merged: BTreeMap<VarId, i64> = BTreeMap::new();
        for &(c, v) in &self.terms {
            *merged.entry(v).or_insert(0) += c;
        }
        self.terms = merged.into_iter().filter(|&(_, c)| c != 0).map(|(v, c)| (c, v)).collect();
    }
}

/// Linear minimization objective.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Objective {
    pub terms: Vec<(i64, VarId)>,
}

impl Objective {
    pub fn value(&self, assignment: &[bool]) -> i64 {
        self.terms.iter().filter(|(_, v)| assignment[v.0]).map(|(c, _)| c).sum()
    }
}

/// 0-1 linear program: named binary variables, linear constraints and an
/// optional minimization objective.
#[derive(Debug, Clone, Default)]
pub struct Model {
    names: Vec<String>,
    by_name: HashMap<String, VarId>,
    constraints: Vec<LinearConstraint>,
    objective: Option<Objective>,
    hint: Option<Vec<bool>>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let id = VarId(self.names.len());
        self.by_name.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    /// Appends a constraint after merging its coefficients. Returns its index.
    pub fn add_constraint(&mut self, mut c: LinearConstraint) -> Result<usize, ModelError> {
        if let Some(&(_, v)) = c.terms.iter().find(|(_, v)| v.0 >= self.names.len()) {
            return Err(ModelError::UnknownVariable(v.0));
        }
        if let (Some(lower), Some(upper)) = (c.lower, c.upper) {
            if lower > upper {
                return Err(ModelError::EmptyRange { lower, upper });
            }
        }
        c.normalize();
        self.constraints.push(c);
        Ok(self.constraints.len() - 1)
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, terms: Vec<(i64, VarId)>) -> Result<(), ModelError> {
        let mut holder = LinearConstraint::new(terms, None, None, "obj");
        if let Some(&(_, v)) = holder.terms.iter().find(|(_, v)| v.0 >= self.names.len()) {
            return Err(ModelError::UnknownVariable(v.0));
        }
        holder.normalize();
        self.objective = Some(Objective { terms: holder.terms });
        Ok(())
    }

    pub fn clear_objective(&mut self) {
        self.objective = None;
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    /// Warm-start assignment tried before search; survives constraint additions.
    pub fn set_hint(&mut self, hint: Vec<bool>) -> Result<(), ModelError> {
        if hint.len() != self.names.len() {
            return Err(ModelError::HintLength { got: hint.len(), expected: self.names.len() });
        }
        self.hint = Some(hint);
        Ok(())
    }

    pub fn hint(&self) -> Option<&[bool]> {
        self.hint.as_deref()
    }

    /// Index of the first violated constraint, if any.
    pub fn first_violation(&self, assignment: &[bool]) -> Option<usize> {
        self.constraints.iter().position(|c| !c.is_satisfied(assignment))
    }

    pub fn is_feasible(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.names.len() && self.first_violation(assignment).is_none()
    }

    pub fn objective_value(&self, assignment: &[bool]) -> i64 {
        self.objective.as_ref().map_or(0, |o| o.value(assignment))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_constraint_basic() {
        let mut m = Model::new();
        let x0 = m.add_var("x0").unwrap();
        let x1 = m.add_var("x1").unwrap();
        m.add_constraint(LinearConstraint::at_most(vec![(1, x0), (1, x1)], 1, "c")).unwrap();
        assert_eq!(m.num_constraints(), 1);
    }

    #[test]
    fn add_constraint_unknown_var() {
        let mut m = Model::new();
        m.add_var("x0").unwrap();
        let err = m.add_constraint(LinearConstraint::at_most(vec![(1, VarId(3))], 1, "c"));
        assert_eq!(err, Err(ModelError::UnknownVariable(3)));
    }

    #[test]
    fn coefficients_merge() {
        let mut m = Model::new();
        let x0 = m.add_var("x0").unwrap();
        m.add_constraint(LinearConstraint::at_most(vec![(2, x0), (-1, x0)], 0, "c")).unwrap();
        assert_eq!(m.constraints()[0].terms, vec![(1, x0)]);
        m.add_constraint(LinearConstraint::at_most(vec![(2, x0), (-2, x0)], 0, "c")).unwrap();
        assert!(m.constraints()[1].terms.is_empty());
    }

    #[test]
    fn rejects_duplicate_names_and_empty_range() {
        let mut m = Model::new();
        let x = m.add_var("x").unwrap();
        assert!(m.add_var("x").is_err());
        assert!(m.add_constraint(LinearConstraint::new(vec![(1, x)], Some(2), Some(1), "c")).is_err());
    }

    #[test]
    fn hint_length_checked() {
        let mut m = Model::new();
        m.add_var("a").unwrap();
        assert!(m.set_hint(vec![true, false]).is_err());
        m.set_hint(vec![true]).unwrap();
        let a = m.var_by_name("a").unwrap();
        m.add_constraint(LinearConstraint::at_most(vec![(1, a)], 0, "c")).unwrap();
        assert_eq!(m.hint(), Some(&[true][..]));
        assert!(!m.is_feasible(&[true]));
    }
}

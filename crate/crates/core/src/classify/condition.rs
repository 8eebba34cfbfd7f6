//! Polynomial condition sets and three-valued verdicts.
//!
//! A condition set is a conjunction of equations `p = 0` over the family's
//! parameters, read together with the family constraints `q != 0`.
//! Normalization makes every generator monic, takes exact square roots,
//! strips factors known to be nonzero, and eliminates variables that appear
//! linearly with a constant coefficient. No ideal machinery beyond that.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::scalar::{Polynomial, Rational, Vars};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionSet {
    vars: Vars,
    /// Eliminated variables `(index, value)`, values free of eliminated variables.
    solved: Vec<(usize, Polynomial)>,
    /// Remaining generators, canonical and sorted.
    rest: Vec<Polynomial>,
    nonzero: Vec<Polynomial>,
    unsat: bool,
}

enum Norm {
    Trivial,
    Unsat,
    Eq(Polynomial),
}

fn nonzero_var_indices(vars: &Vars, nonzero: &[Polynomial]) -> Vec<usize> {
    let mut out: Vec<usize> = (0..vars.len()).filter(|&i| vars.is_involutive(i)).collect();
    for k in nonzero {
        if let Some((m, _)) = k.leading_term() {
            if k.num_terms() == 1 && m.degree() >= 1 {
                // a monomial constraint forbids each of its variables from vanishing
                out.extend(m.exponents().iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn normalize(p: &Polynomial, nonzero: &[Polynomial], nz_vars: &[usize]) -> Norm {
    let mut p = p.clone();
    'outer: loop {
        if p.is_zero() {
            return Norm::Trivial;
        }
        if p.is_constant() {
            return Norm::Unsat;
        }
        p = p.monic();
        if p.num_terms() == 1 {
            let (m, _) = p.leading_term().expect("nonzero");
            let all_nonzero = m
                .exponents()
                .iter()
                .enumerate()
                .all(|(i, e)| *e == 0 || nz_vars.contains(&i));
            if all_nonzero {
                return Norm::Unsat;
            }
        }
        if positive_definite(&p) {
            return Norm::Unsat;
        }
        if let Some(q) = p.sqrt() {
            if q != p {
                p = q;
                continue;
            }
        }
        // common power of a nonzero, non-involutive variable
        for &i in nz_vars {
            if p.vars().is_involutive(i) {
                continue;
            }
            let min = p.terms().map(|(m, _)| m.exponents()[i]).min().unwrap_or(0);
            if min > 0 {
                let x = Polynomial::var_at(p.vars(), i).pow(u32::from(min));
                p = p.exact_div(&x).expect("monomial factor divides");
                continue 'outer;
            }
        }
        for k in nonzero {
            if k.is_constant() {
                continue;
            }
            if let Some(q) = p.exact_div(k) {
                if q.total_degree() < p.total_degree() {
                    p = q;
                    continue 'outer;
                }
            }
        }
        return Norm::Eq(p);
    }
}

/// Even powers with positive coefficients and a positive constant: no real
/// zero. Parameters are real.
fn positive_definite(p: &Polynomial) -> bool {
    let vars = p.vars();
    let zero = Rational::from_integer(0.into());
    p.terms().any(|(m, _)| m.is_one())
        && p.terms().all(|(m, c)| {
            *c > zero
                && m.exponents()
                    .iter()
                    .enumerate()
                    .all(|(i, e)| e % 2 == 0 && (*e == 0 || !vars.is_involutive(i)))
        })
}

/// A variable occurring only as `c * x` with rational `c != 0`, and the value
/// `x = -(p - c x) / c`.
fn linear_pivot(p: &Polynomial) -> Option<(usize, Polynomial)> {
    let vars = p.vars().clone();
    for i in 0..vars.len() {
        if vars.is_involutive(i) || p.degree_in(i) != 1 {
            continue;
        }
        let with_x: Vec<_> = p.terms().filter(|(m, _)| m.exponents()[i] > 0).collect();
        if with_x.len() != 1 || with_x[0].0.degree() != 1 {
            continue;
        }
        let c = with_x[0].1.clone();
        let x = Polynomial::var_at(&vars, i);
        let rest = p - &x.scale(&c);
        let value = rest.scale(&(-Rational::from_integer(1.into()) / c));
        return Some((i, value));
    }
    None
}

impl ConditionSet {
    pub fn new<I>(vars: &Vars, equations: I, nonzero: &[Polynomial]) -> Self
    where
        I: IntoIterator<Item = Polynomial>,
    {
        let nz_vars = nonzero_var_indices(vars, nonzero);
        let mut pending: Vec<Polynomial> = equations.into_iter().collect();
        let mut solved: Vec<(usize, Polynomial)> = Vec::new();
        let mut rest: Vec<Polynomial> = Vec::new();
        let unsat_set = |vars: &Vars| ConditionSet {
            vars: vars.clone(),
            solved: Vec::new(),
            rest: Vec::new(),
            nonzero: nonzero.to_vec(),
            unsat: true,
        };
        while let Some(p) = pending.pop() {
            let mut p = p;
            for (i, v) in &solved {
                p = p.compose(*i, v);
            }
            match normalize(&p, nonzero, &nz_vars) {
                Norm::Trivial => {}
                Norm::Unsat => return unsat_set(vars),
                Norm::Eq(q) => match linear_pivot(&q) {
                    Some((i, value)) => {
                        for (_, v) in solved.iter_mut() {
                            *v = v.compose(i, &value);
                        }
                        solved.push((i, value));
                        // earlier generators may simplify under the new elimination
                        pending.append(&mut rest);
                    }
                    None => {
                        if !rest.contains(&q) {
                            rest.push(q);
                        }
                    }
                },
            }
        }
        // a nonzero constraint forced to vanish makes the set empty
        for k in nonzero {
            let mut kk = k.clone();
            for (i, v) in &solved {
                kk = kk.compose(*i, v);
            }
            if kk.is_zero() {
                return unsat_set(vars);
            }
        }
        solved.sort_by_key(|(i, _)| *i);
        rest.sort_by_key(|p| p.to_string());
        ConditionSet {
            vars: vars.clone(),
            solved,
            rest,
            nonzero: nonzero.to_vec(),
            unsat: false,
        }
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    /// Holds for every admissible parameter value.
    pub fn is_trivial(&self) -> bool {
        !self.unsat && self.solved.is_empty() && self.rest.is_empty()
    }

    /// Canonical generators, each read as `= 0`.
    pub fn equations(&self) -> Vec<Polynomial> {
        let mut out: Vec<Polynomial> = self
            .solved
            .iter()
            .map(|(i, v)| &Polynomial::var_at(&self.vars, *i) - v)
            .collect();
        out.extend(self.rest.iter().cloned());
        out
    }

    pub fn nonzero(&self) -> &[Polynomial] {
        &self.nonzero
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Eliminated variables and their values.
    pub fn solutions(&self) -> &[(usize, Polynomial)] {
        &self.solved
    }

    /// Whether `p = 0` holds everywhere on this set (decided by substitution
    /// of the eliminated variables and canonical comparison).
    pub fn implies_zero(&self, p: &Polynomial) -> bool {
        if self.unsat {
            return true;
        }
        let mut q = p.clone();
        for (i, v) in &self.solved {
            q = q.compose(*i, v);
        }
        let nz_vars = nonzero_var_indices(&self.vars, &self.nonzero);
        match normalize(&q, &self.nonzero, &nz_vars) {
            Norm::Trivial => true,
            Norm::Unsat => false,
            Norm::Eq(q) => self.rest.contains(&q),
        }
    }

    pub fn implies(&self, other: &ConditionSet) -> bool {
        if self.unsat {
            return true;
        }
        if other.unsat {
            return false;
        }
        other.equations().iter().all(|p| self.implies_zero(p))
    }

    pub fn same_locus(&self, other: &ConditionSet) -> bool {
        self.implies(other) && other.implies(self)
    }

    /// Conjunction.
    pub fn and(&self, other: &ConditionSet) -> ConditionSet {
        let mut nonzero = self.nonzero.clone();
        for k in &other.nonzero {
            if !nonzero.contains(k) {
                nonzero.push(k.clone());
            }
        }
        if self.unsat || other.unsat {
            return ConditionSet {
                vars: self.vars.clone(),
                solved: Vec::new(),
                rest: Vec::new(),
                nonzero,
                unsat: true,
            };
        }
        ConditionSet::new(&self.vars, self.equations().into_iter().chain(other.equations()), &nonzero)
    }

    /// `Some(true/false)` once every variable involved is assigned.
    pub fn satisfied_by(&self, assignment: &BTreeMap<String, Rational>) -> Option<bool> {
        if self.unsat {
            return Some(false);
        }
        let mut all = true;
        for k in &self.nonzero {
            match k.eval(assignment) {
                Some(v) if v == Rational::from_integer(0.into()) => return Some(false),
                Some(_) => {}
                None => all = false,
            }
        }
        for p in self.equations() {
            match p.eval(assignment) {
                Some(v) if v != Rational::from_integer(0.into()) => return Some(false),
                Some(_) => {}
                None => all = false,
            }
        }
        all.then_some(true)
    }
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unsat {
            return write!(f, "unsatisfiable");
        }
        if self.is_trivial() {
            return write!(f, "always");
        }
        let eqs: Vec<String> = self.equations().iter().map(|p| format!("{p} = 0")).collect();
        write!(f, "{}", eqs.join(", "))
    }
}

/// Outcome of a predicate over a parameter family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    HoldsIff(ConditionSet),
}

impl Verdict {
    /// The verdict of "every residual vanishes".
    pub fn from_residuals<I>(vars: &Vars, residuals: I, nonzero: &[Polynomial]) -> Verdict
    where
        I: IntoIterator<Item = Polynomial>,
    {
        Verdict::from_set(ConditionSet::new(vars, residuals, nonzero))
    }

    pub fn from_set(set: ConditionSet) -> Verdict {
        if set.is_unsat() {
            Verdict::Fails
        } else if set.is_trivial() {
            Verdict::Holds
        } else {
            Verdict::HoldsIff(set)
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails)
    }

    pub fn conditions(&self) -> Option<&ConditionSet> {
        match self {
            Verdict::HoldsIff(c) => Some(c),
            _ => None,
        }
    }

    /// The locus as a condition set (trivial or unsatisfiable for the
    /// unconditional verdicts).
    pub fn to_set(&self, vars: &Vars, nonzero: &[Polynomial]) -> ConditionSet {
        match self {
            Verdict::Holds => ConditionSet::new(vars, [], nonzero),
            Verdict::Fails => ConditionSet::new(vars, [Polynomial::one(vars)], nonzero),
            Verdict::HoldsIff(c) => c.clone(),
        }
    }

    pub fn same_locus(&self, other: &Verdict) -> bool {
        match (self, other) {
            (Verdict::Holds, Verdict::Holds) | (Verdict::Fails, Verdict::Fails) => true,
            (Verdict::HoldsIff(a), Verdict::HoldsIff(b)) => a.same_locus(b),
            _ => false,
        }
    }

    pub fn and(&self, other: &Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Holds, v) | (v, Verdict::Holds) => v.clone(),
            (Verdict::HoldsIff(a), Verdict::HoldsIff(b)) => Verdict::from_set(a.and(b)),
        }
    }

    /// Short tag used in reports: `holds`, `fails` or `holds_iff`.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HoldsIff(_) => "holds_iff",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Fails => write!(f, "fails"),
            Verdict::HoldsIff(c) => write!(f, "holds iff {c}"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("verdict", self.tag())?;
        if let Verdict::HoldsIff(c) = self {
            let eqs: Vec<String> = c.equations().iter().map(|p| p.to_string()).collect();
            m.serialize_entry("conditions", &eqs)?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, parse_expr, VarList};

    fn p(vars: &Vars, s: &str) -> Polynomial {
        parse_expr(s, vars).unwrap()
    }

    #[test]
    fn square_of_difference_reduces_to_linear() {
        let v = VarList::new(["beta", "gamma"]);
        let c = ConditionSet::new(&v, [p(&v, "1/2*(beta-gamma)^2")], &[]);
        assert_eq!(c.equations(), vec![p(&v, "beta - gamma")]);
    }

    #[test]
    fn nonzero_factor_makes_unsat() {
        let v = VarList::new(["beta", "gamma"]);
        let nz = [p(&v, "gamma")];
        assert!(ConditionSet::new(&v, [p(&v, "-2*gamma^2")], &nz).is_unsat());
        let c = ConditionSet::new(&v, [p(&v, "2*gamma*(1+beta)")], &nz);
        assert_eq!(c.equations(), vec![p(&v, "beta + 1")]);
    }

    #[test]
    fn positive_definite_has_no_real_zero() {
        let v = VarList::new(["beta", "delta"]);
        assert!(ConditionSet::new(&v, [p(&v, "delta^2 + 4")], &[]).is_unsat());
        assert!(ConditionSet::new(&v, [p(&v, "beta^2*delta^4 + delta^2 + 1/3")], &[]).is_unsat());
        assert!(!ConditionSet::new(&v, [p(&v, "delta^2 - 4")], &[]).is_unsat());
        assert!(!ConditionSet::new(&v, [p(&v, "beta*delta + 1")], &[]).is_unsat());
    }

    #[test]
    fn eps_is_never_zero() {
        let v = VarList::new(["beta", "eps"]);
        assert!(ConditionSet::new(&v, [p(&v, "eps")], &[]).is_unsat());
        // beta = eps + 1 makes beta*eps - eps - 1 vanish
        let c = ConditionSet::new(&v, [p(&v, "2*(beta-eps-1)"), p(&v, "2*(beta*eps-eps-1)")], &[]);
        assert_eq!(c.equations(), vec![p(&v, "beta - eps - 1")]);
    }

    #[test]
    fn loci_compare_by_substitution() {
        let v = VarList::new(["beta", "gamma"]);
        let a = ConditionSet::new(&v, [p(&v, "beta - gamma"), p(&v, "gamma - 2")], &[]);
        let b = ConditionSet::new(&v, [p(&v, "beta - 2"), p(&v, "beta*gamma - 4")], &[]);
        assert!(a.same_locus(&b));
        let c = ConditionSet::new(&v, [p(&v, "beta - 2")], &[]);
        assert!(a.implies(&c) && !c.implies(&a));
        assert!(a.implies_zero(&p(&v, "beta^2 - 2*gamma")));
    }

    #[test]
    fn verdicts_from_residuals() {
        let v = VarList::new(["beta"]);
        assert!(Verdict::from_residuals(&v, [Polynomial::zero(&v)], &[]).holds());
        assert!(Verdict::from_residuals(&v, [p(&v, "3")], &[]).fails());
        let iff = Verdict::from_residuals(&v, [p(&v, "2*beta")], &[]);
        assert_eq!(iff.to_string(), "holds iff beta = 0");
        let mut a = BTreeMap::new();
        a.insert("beta".to_string(), int(0));
        assert_eq!(iff.conditions().unwrap().satisfied_by(&a), Some(true));
        a.insert("beta".to_string(), int(1));
        assert_eq!(iff.conditions().unwrap().satisfied_by(&a), Some(false));
    }

    #[test]
    fn nonlinear_generators_survive() {
        let v = VarList::new(["beta", "gamma"]);
        let c = ConditionSet::new(&v, [p(&v, "beta^2 + gamma^2 - 1")], &[]);
        assert_eq!(c.equations().len(), 1);
        assert!(c.same_locus(&ConditionSet::new(&v, [p(&v, "2*beta^2 + 2*gamma^2 - 2")], &[])));
    }
}

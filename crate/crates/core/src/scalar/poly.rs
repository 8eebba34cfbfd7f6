//! Sparse multivariate polynomials with rational coefficients.
//!
//! A polynomial lives over an ordered list of named parameters ([`VarList`]).
//! Terms are stored in a `BTreeMap` keyed by dense exponent vectors, so two
//! polynomials are equal exactly when their canonical term maps are equal.
//!
//! Variables flagged as involutive (the sign parameter `eps`) satisfy
//! `x^2 = 1`; every product reduces their exponents modulo 2.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, rational_sqrt, Rational};
use super::ScalarError;

/// Names treated as sign parameters (`x^2 = 1`).
pub const INVOLUTIVE_NAMES: &[&str] = &["eps"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarList {
    names: Vec<String>,
    involutive: Vec<bool>,
}

/// Shared handle to a variable list.
pub type Vars = Arc<VarList>;

impl VarList {
    pub fn new<I, S>(names: I) -> Vars
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let involutive = names
            .iter()
            .map(|n| INVOLUTIVE_NAMES.contains(&n.as_str()))
            .collect();
        Arc::new(VarList { names, involutive })
    }

    pub fn empty() -> Vars {
        Self::new(Vec::<String>::new())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_involutive(&self, idx: usize) -> bool {
        self.involutive[idx]
    }
}

/// Exponent vector, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    fn reduce(mut self, vars: &VarList) -> Monomial {
        for (i, e) in self.0.iter_mut().enumerate() {
            if vars.involutive[i] {
                *e %= 2;
            }
        }
        self
    }
}

#[derive(Clone)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars)
            && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn from_int(vars: &Vars, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(c.into()))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The polynomial `x_idx`.
    pub fn var_at(vars: &Vars, idx: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial(exps), Rational::one());
        p
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self, ScalarError> {
        let idx = vars
            .index_of(name)
            .ok_or_else(|| ScalarError::UnknownVariable(name.to_string()))?;
        Ok(Self::var_at(vars, idx))
    }

    /// Builds a polynomial from raw terms, reducing and dropping zeros.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u16>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), vars.len(), "exponent arity mismatch");
            p.add_term(Monomial(exps).reduce(vars), c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u16 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&i| self.degree_in(i) > 0)
            .collect()
    }

    /// Leading term in lexicographic order (first variable most significant).
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Same variable list as `other`.
    pub fn compatible(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    fn check(&self, other: &Polynomial) -> Result<(), ScalarError> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(ScalarError::VarMismatch {
                left: self.vars.names().to_vec(),
                right: other.vars.names().to_vec(),
            })
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, ScalarError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, ScalarError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, ScalarError> {
        self.check(other)?;
        Ok(self.mul_impl(other, true))
    }

    fn mul_impl(&self, other: &Polynomial, reduce: bool) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.mul(mb);
                if reduce {
                    m = m.reduce(&self.vars);
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Polynomial {
        self.scale(&Rational::from_integer(c.into()))
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(&self.vars);
        for _ in 0..e {
            out = out.mul_impl(self, true);
        }
        out
    }

    /// Evaluates the variables named in `assignment`; others stay symbolic.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<String, Rational>,
    ) -> Result<Polynomial, ScalarError> {
        let mut slots: Vec<Option<&Rational>> = vec![None; self.vars.len()];
        for (name, value) in assignment {
            let idx = self
                .vars
                .index_of(name)
                .ok_or_else(|| ScalarError::UnknownVariable(name.clone()))?;
            slots[idx] = Some(value);
        }
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = m.0.clone();
            for (i, slot) in slots.iter().enumerate() {
                if let Some(v) = slot {
                    if exps[i] > 0 {
                        coeff *= num_traits::pow::pow((*v).clone(), exps[i] as usize);
                        exps[i] = 0;
                    }
                }
            }
            out.add_term(Monomial(exps), coeff);
        }
        Ok(out)
    }

    /// Replaces variable `idx` by the polynomial `value`.
    pub fn compose(&self, idx: usize, value: &Polynomial) -> Polynomial {
        assert!(self.compatible(value), "variable list mismatch");
        let mut out = Polynomial::zero(&self.vars);
        let mut powers: Vec<Polynomial> = vec![Polynomial::one(&self.vars)];
        for (m, c) in &self.terms {
            let e = m.0[idx] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul_impl(value, true);
                powers.push(next);
            }
            let mut rest = m.0.clone();
            rest[idx] = 0;
            let mut mono = Polynomial::zero(&self.vars);
            mono.terms.insert(Monomial(rest), c.clone());
            out = &out + &mono.mul_impl(&powers[e], true);
        }
        out
    }

    /// Full evaluation; `None` if some occurring variable is unassigned.
    pub fn eval(&self, assignment: &BTreeMap<String, Rational>) -> Option<Rational> {
        self.substitute(assignment).ok()?.constant_value()
    }

    /// Exact quotient `self / divisor`, if the division leaves no remainder.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert!(self.compatible(divisor), "variable list mismatch");
        let (dm, dc) = divisor.leading_term()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.vars);
        let limit = 4 * (self.terms.len() + 1) * (self.total_degree() as usize + 1);
        for _ in 0..limit {
            let Some((rm, rc)) = rem.leading_term() else {
                break;
            };
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            let mut t = Polynomial::zero(&self.vars);
            t.terms.insert(m, c);
            rem = &rem - &t.mul_impl(divisor, false);
            quot = &quot + &t;
        }
        if !rem.is_zero() {
            return None;
        }
        // The raw quotient ignores `eps^2 = 1`; confirm in the reduced ring.
        let quot = quot.reduced();
        (&quot * divisor == *self).then_some(quot)
    }

    fn reduced(&self) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone().reduce(&self.vars), c.clone());
        }
        out
    }

    /// Exact square root up to sign, if `self` is a perfect square.
    pub fn sqrt(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading_term()?;
        if lm.0.iter().any(|e| e % 2 == 1) {
            return None;
        }
        let root_m = Monomial(lm.0.iter().map(|e| e / 2).collect());
        let root_c = rational_sqrt(lc)?;
        let mut root = Polynomial::zero(&self.vars);
        root.terms.insert(root_m.clone(), root_c.clone());
        let two_lead = root_c * Rational::from_integer(2.into());
        for _ in 0..=self.terms.len() + 1 {
            let rem = self - &root.mul_impl(&root, false);
            let Some((rm, rc)) = rem.leading_term() else {
                return (&root * &root == *self).then_some(root);
            };
            let m = rm.div(&root_m)?;
            if m >= root_m {
                return None;
            }
            let mut t = Polynomial::zero(&self.vars);
            t.terms.insert(m, rc / &two_lead);
            root = &root + &t;
        }
        None
    }

    /// Divides by the leading coefficient (the zero polynomial is unchanged).
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Re-expresses the polynomial over another variable list containing
    /// every variable that occurs in `self`.
    pub fn lift(&self, target: &Vars) -> Result<Polynomial, ScalarError> {
        if Arc::ptr_eq(&self.vars, target) || *self.vars == **target {
            return Ok(Polynomial {
                vars: target.clone(),
                terms: self.terms.clone(),
            });
        }
        let map: Vec<Option<usize>> = self.vars.names().iter().map(|n| target.index_of(n)).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0; target.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| ScalarError::UnknownVariable(self.vars.names()[i].clone()))?;
                exps[j] = e;
            }
            out.add_term(Monomial(exps).reduce(target), c.clone());
        }
        Ok(out)
    }

    /// Terms in display order: total degree descending, then lex descending.
    fn display_order(&self) -> Vec<(&Monomial, &Rational)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
        terms
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.display_order().into_iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(format_rational(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars.names[i], e)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("polynomial variable lists differ")
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
        impl $trait<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

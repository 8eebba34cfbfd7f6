//! Left-invariant almost paracontact candidates and the paracontact axioms.
//!
//! A frame is `E_0, ..., E_{2n}` with structure constants
//! `[E_i, E_j] = sum_k c[i][j][k] E_k`, a constant metric `g_ij`, a slot for
//! `xi` and a rational matrix for `phi` (acting column-wise).

pub mod file;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{
    int, rat, vec_ops, PolyMatrix, PolyVec, Polynomial, Rational, RationalMatrix, ScalarError,
    Vars,
};

/// The d-eta sign and the curvature convention used by an analysis run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignConvention {
    d_eta_sign: i8,
}

impl SignConvention {
    /// Under this value every catalog entry validates with its stored phi.
    pub const CALIBRATED: SignConvention = SignConvention { d_eta_sign: 1 };
    pub const CURVATURE: &'static str = "R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y]";
    pub const ENV_VAR: &'static str = "PCLAB_DETA_SIGN";

    pub fn new(d_eta_sign: i8) -> Option<Self> {
        matches!(d_eta_sign, 1 | -1).then_some(SignConvention { d_eta_sign })
    }

    /// Reads `PCLAB_DETA_SIGN`, falling back to the calibrated value.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(Self::ENV_VAR) {
            Err(_) => Ok(Self::CALIBRATED),
            Ok(v) => match v.trim() {
                "1" | "+1" => Ok(SignConvention { d_eta_sign: 1 }),
                "-1" => Ok(SignConvention { d_eta_sign: -1 }),
                other => Err(format!("{} must be +1 or -1, got '{other}'", Self::ENV_VAR)),
            },
        }
    }

    pub fn d_eta_sign(&self) -> i8 {
        self.d_eta_sign
    }
}

impl Default for SignConvention {
    fn default() -> Self {
        Self::CALIBRATED
    }
}

/// Raw frame data, not yet checked against the axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameSpec {
    pub label: String,
    pub vars: Vars,
    /// `brackets[i][j]` are the components of `[E_i, E_j]`.
    pub brackets: Vec<Vec<PolyVec>>,
    pub metric: RationalMatrix,
    pub xi_index: usize,
    pub phi: RationalMatrix,
    /// Slot pairs used to infer phi; informational once phi is set.
    pub pairing: Vec<(usize, usize)>,
    /// Family constraints `p != 0`.
    pub nonzero: Vec<Polynomial>,
}

impl FrameSpec {
    /// An abelian frame with zero phi.
    pub fn new(label: impl Into<String>, vars: &Vars, metric: RationalMatrix, xi_index: usize) -> Self {
        let n = metric.dim();
        FrameSpec {
            label: label.into(),
            vars: vars.clone(),
            brackets: vec![vec![vec_ops::zero(n, vars); n]; n],
            metric,
            xi_index,
            phi: RationalMatrix::zeros(n),
            pairing: Vec::new(),
            nonzero: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Sets `[E_i, E_j] = v` and `[E_j, E_i] = -v`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: PolyVec) {
        self.brackets[j][i] = vec_ops::neg(&v);
        self.brackets[i][j] = v;
    }

    pub fn with_bracket(mut self, i: usize, j: usize, v: PolyVec) -> Self {
        self.set_bracket(i, j, v);
        self
    }

    pub fn with_phi(mut self, phi: RationalMatrix) -> Self {
        self.phi = phi;
        self
    }

    /// `[X, Y]` for left-invariant fields with constant components.
    pub fn bracket(&self, x: &[Polynomial], y: &[Polynomial]) -> PolyVec {
        let n = self.dim();
        let mut acc = vec_ops::zero(n, &self.vars);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                acc = vec_ops::add(&acc, &vec_ops::scale(&self.brackets[i][j], &c));
            }
        }
        acc
    }

    /// Specializes parameters; unassigned ones stay symbolic.
    pub fn substitute(&self, assignment: &BTreeMap<String, Rational>) -> Result<FrameSpec, ScalarError> {
        let sub = |p: &Polynomial| p.substitute(assignment);
        let mut out = self.clone();
        for row in out.brackets.iter_mut() {
            for v in row.iter_mut() {
                *v = v.iter().map(sub).collect::<Result<_, _>>()?;
            }
        }
        out.nonzero = self.nonzero.iter().map(sub).collect::<Result<_, _>>()?;
        Ok(out)
    }

    /// Nonzero constraints that have become identically zero.
    pub fn violated_constraints(&self) -> Vec<&Polynomial> {
        self.nonzero.iter().filter(|p| p.is_zero()).collect()
    }

    /// The covector `eta_i = g(E_i, xi)`.
    pub fn eta(&self) -> Vec<Rational> {
        (0..self.dim()).map(|i| self.metric.get(i, self.xi_index).clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    XiUnit,
    PhiXi,
    PhiSquared,
    PhiMetric,
    DEta,
    HXi,
    HAnticommute,
    HTrace,
    HPhiTrace,
    HSelfAdjoint,
}

impl Axiom {
    pub fn id(&self) -> &'static str {
        match self {
            Axiom::XiUnit => "xi-unit",
            Axiom::PhiXi => "phi-xi",
            Axiom::PhiSquared => "phi-squared",
            Axiom::PhiMetric => "phi-metric",
            Axiom::DEta => "d-eta",
            Axiom::HXi => "h-xi",
            Axiom::HAnticommute => "h-anticommute",
            Axiom::HTrace => "h-trace",
            Axiom::HPhiTrace => "h-phi-trace",
            Axiom::HSelfAdjoint => "h-self-adjoint",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Malformed(String),
    DegenerateMetric,
    Jacobi { i: usize, j: usize, k: usize, residual: PolyVec },
    Axiom { axiom: Axiom, indices: Vec<usize>, residual: Vec<Polynomial> },
}

fn join(ps: &[Polynomial]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Malformed(msg) => write!(f, "malformed: {msg}"),
            Violation::DegenerateMetric => write!(f, "metric is degenerate or not symmetric"),
            Violation::Jacobi { i, j, k, residual } => {
                write!(f, "JacobiViolation({i},{j},{k}): [{}]", join(residual))
            }
            Violation::Axiom { axiom, indices, residual } => {
                write!(f, "AxiomViolation({}, {indices:?}): [{}]", axiom.id(), join(residual))
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("frame is not paracontact: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no sign pattern for phi satisfies the paracontact axioms")]
    NoConsistentPhi,
    #[error("bad pairing: {0}")]
    BadPairing(String),
}

/// A frame that satisfies every paracontact axiom.
#[derive(Clone, Debug)]
pub struct ParacontactFrame {
    spec: FrameSpec,
    convention: SignConvention,
    n: usize,
    eta: Vec<Rational>,
    h: PolyMatrix,
    metric_inv: RationalMatrix,
    phi_p: PolyMatrix,
}

impl ParacontactFrame {
    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    pub fn vars(&self) -> &Vars {
        &self.spec.vars
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// `dim = 2n + 1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xi_index(&self) -> usize {
        self.spec.xi_index
    }

    pub fn xi(&self) -> PolyVec {
        vec_ops::basis(self.dim(), self.spec.xi_index, &self.spec.vars)
    }

    pub fn basis(&self, i: usize) -> PolyVec {
        vec_ops::basis(self.dim(), i, &self.spec.vars)
    }

    pub fn eta(&self) -> &[Rational] {
        &self.eta
    }

    /// `eta(V)` for a vector of components.
    pub fn eta_of(&self, v: &[Polynomial]) -> Polynomial {
        let mut acc = Polynomial::zero(&self.spec.vars);
        for (e, c) in self.eta.iter().zip(v) {
            if !e.is_zero() {
                acc = &acc + &c.scale(e);
            }
        }
        acc
    }

    pub fn h(&self) -> &PolyMatrix {
        &self.h
    }

    pub fn phi(&self) -> &PolyMatrix {
        &self.phi_p
    }

    pub fn metric(&self) -> &RationalMatrix {
        &self.spec.metric
    }

    pub fn metric_inv(&self) -> &RationalMatrix {
        &self.metric_inv
    }

    /// `g(X, Y)`.
    pub fn g(&self, x: &[Polynomial], y: &[Polynomial]) -> Polynomial {
        let gy = self.spec.metric.apply(y);
        let mut acc = Polynomial::zero(&self.spec.vars);
        for (a, b) in x.iter().zip(&gy) {
            if !a.is_zero() && !b.is_zero() {
                acc = &acc + &(a * b);
            }
        }
        acc
    }

    /// Pairs `(i, j, g^{ij})` with nonzero inverse-metric entries.
    pub fn trace_pairs(&self) -> Vec<(usize, usize, Rational)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.metric_inv.get(i, j);
                if !v.is_zero() {
                    out.push((i, j, v.clone()));
                }
            }
        }
        out
    }

    pub fn into_spec(self) -> FrameSpec {
        self.spec
    }
}

/// `h = 1/2 L_xi phi`, i.e. `hX = 1/2([xi, phi X] - phi [xi, X])`.
pub fn compute_h(spec: &FrameSpec) -> PolyMatrix {
    let n = spec.dim();
    let vars = &spec.vars;
    let xi = vec_ops::basis(n, spec.xi_index, vars);
    let phi = spec.phi.to_poly(vars);
    let half = rat(1, 2);
    let cols: Vec<PolyVec> = (0..n)
        .map(|j| {
            let e = vec_ops::basis(n, j, vars);
            let a = spec.bracket(&xi, &phi.apply(&e));
            let b = phi.apply(&spec.bracket(&xi, &e));
            vec_ops::scale_rat(&vec_ops::sub(&a, &b), &half)
        })
        .collect();
    PolyMatrix::from_columns(&cols)
}

/// Cyclic sums `[[E_i,E_j],E_k] + [[E_j,E_k],E_i] + [[E_k,E_i],E_j]` that do
/// not vanish, for `i < j < k`.
pub fn jacobi_check(spec: &FrameSpec) -> Vec<(usize, usize, usize, PolyVec)> {
    let n = spec.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let term = |a: usize, b: usize, c: usize| {
                    spec.bracket(&spec.brackets[a][b], &vec_ops::basis(n, c, &spec.vars))
                };
                let sum = vec_ops::add(&vec_ops::add(&term(i, j, k), &term(j, k, i)), &term(k, i, j));
                if !vec_ops::is_zero(&sum) {
                    out.push((i, j, k, sum));
                }
            }
        }
    }
    out
}

fn structural_violations(spec: &FrameSpec) -> Vec<Violation> {
    let n = spec.dim();
    let mut out = Vec::new();
    if n < 3 || n.is_multiple_of(2) {
        out.push(Violation::Malformed(format!("dimension {n} is not odd and at least 3")));
    }
    if spec.xi_index >= n {
        out.push(Violation::Malformed(format!("xi index {} out of range", spec.xi_index)));
    }
    if spec.phi.dim() != n {
        out.push(Violation::Malformed("phi dimension differs from metric".into()));
    }
    let shape_ok = spec.brackets.len() == n
        && spec.brackets.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n));
    if !shape_ok {
        out.push(Violation::Malformed("bracket table has wrong shape".into()));
        return out;
    }
    for i in 0..n {
        for j in i..n {
            let s = vec_ops::add(&spec.brackets[i][j], &spec.brackets[j][i]);
            if !vec_ops::is_zero(&s) {
                out.push(Violation::Malformed(format!("bracket [{i},{j}] is not antisymmetric")));
            }
        }
    }
    if !spec.metric.is_symmetric() || spec.metric.determinant().is_zero() {
        out.push(Violation::DegenerateMetric);
    }
    out
}

/// Checks every paracontact axiom and returns the validated frame, or every
/// violation found.
pub fn validate(spec: &FrameSpec, conv: SignConvention) -> Result<ParacontactFrame, FrameError> {
    let mut violations = structural_violations(spec);
    if !violations.is_empty() {
        return Err(FrameError::Invalid(violations));
    }
    for (i, j, k, residual) in jacobi_check(spec) {
        violations.push(Violation::Jacobi { i, j, k, residual });
    }

    let n = spec.dim();
    let vars = &spec.vars;
    let xi = spec.xi_index;
    let g = &spec.metric;
    let phi = &spec.phi;
    let eta = spec.eta();
    let mut axiom = |axiom: Axiom, indices: Vec<usize>, residual: Vec<Polynomial>| {
        if residual.iter().any(|p| !p.is_zero()) {
            violations.push(Violation::Axiom { axiom, indices, residual });
        }
    };
    let constant = |r: Rational| Polynomial::constant(vars, r);

    axiom(Axiom::XiUnit, vec![xi], vec![constant(g.get(xi, xi) - Rational::one())]);
    axiom(Axiom::PhiXi, vec![xi], (0..n).map(|i| constant(phi.get(i, xi).clone())).collect());

    let phi2 = phi.mul(phi);
    for i in 0..n {
        for j in 0..n {
            let mut expect = if i == j { Rational::one() } else { Rational::zero() };
            if i == xi {
                expect -= &eta[j];
            }
            axiom(Axiom::PhiSquared, vec![i, j], vec![constant(phi2.get(i, j) - expect)]);
        }
    }

    let compat = phi.transpose().mul(g).mul(phi);
    for i in 0..n {
        for j in i..n {
            let expect = -g.get(i, j) + &eta[i] * &eta[j];
            axiom(Axiom::PhiMetric, vec![i, j], vec![constant(compat.get(i, j) - expect)]);
        }
    }

    // d eta(E_i, E_j) = -sigma/2 eta([E_i, E_j]) against g(E_i, phi E_j).
    let gphi = g.mul(phi);
    let d_eta_factor = rat(-i64::from(conv.d_eta_sign()), 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut lhs = Polynomial::zero(vars);
            for (k, e) in eta.iter().enumerate() {
                if !e.is_zero() {
                    lhs = &lhs + &spec.brackets[i][j][k].scale(e);
                }
            }
            let lhs = lhs.scale(&d_eta_factor);
            let rhs = constant(gphi.get(i, j).clone());
            let lhs_ji = -&lhs;
            let rhs_ji = constant(gphi.get(j, i).clone());
            axiom(Axiom::DEta, vec![i, j], vec![&lhs - &rhs, &lhs_ji - &rhs_ji]);
        }
        axiom(Axiom::DEta, vec![i, i], vec![constant(-gphi.get(i, i))]);
    }

    let h = compute_h(spec);
    let phi_p = phi.to_poly(vars);
    let g_p = g.to_poly(vars);
    axiom(Axiom::HXi, vec![xi], h.column(xi));
    let anti = h.mul(&phi_p).add(&phi_p.mul(&h));
    for j in 0..n {
        axiom(Axiom::HAnticommute, vec![j], anti.column(j));
    }
    axiom(Axiom::HTrace, vec![], vec![h.trace()]);
    axiom(Axiom::HPhiTrace, vec![], vec![h.mul(&phi_p).trace()]);
    let sa = h.transpose().mul(&g_p).sub(&g_p.mul(&h));
    for i in 0..n {
        for j in i + 1..n {
            axiom(Axiom::HSelfAdjoint, vec![i, j], vec![sa.get(i, j).clone()]);
        }
    }

    if !violations.is_empty() {
        return Err(FrameError::Invalid(violations));
    }
    let metric_inv = g.inverse().map_err(|_| FrameError::Invalid(vec![Violation::DegenerateMetric]))?;
    Ok(ParacontactFrame {
        spec: spec.clone(),
        convention: conv,
        n: (n - 1) / 2,
        eta,
        h,
        metric_inv,
        phi_p,
    })
}

/// Every phi built from `pairing` by sign choices that passes validation.
///
/// For a pair with `g_ab = 0` the candidate is `phi E_a = s E_b`,
/// `phi E_b = s E_a`; for a null pair (`g_aa = g_bb = 0`) it is
/// `phi E_a = s E_a`, `phi E_b = -s E_b`.
pub fn infer_phi(
    spec: &FrameSpec,
    pairing: &[(usize, usize)],
    conv: SignConvention,
) -> Result<Vec<RationalMatrix>, FrameError> {
    let n = spec.dim();
    let xi = spec.xi_index;
    let mut seen = vec![false; n];
    if xi < n {
        seen[xi] = true;
    }
    for &(a, b) in pairing {
        for s in [a, b] {
            if s >= n || seen[s] {
                return Err(FrameError::BadPairing(format!("slot {s} is out of range, xi, or repeated")));
            }
            seen[s] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(FrameError::BadPairing("pairing does not cover every non-xi slot".into()));
    }
    let g = &spec.metric;
    let mut null = Vec::with_capacity(pairing.len());
    for &(a, b) in pairing {
        if g.get(a, b).is_zero() && !g.get(a, a).is_zero() && !g.get(b, b).is_zero() {
            null.push(false);
        } else if g.get(a, a).is_zero() && g.get(b, b).is_zero() && !g.get(a, b).is_zero() {
            null.push(true);
        } else {
            return Err(FrameError::BadPairing(format!("slots ({a},{b}) are neither orthogonal nor a null pair")));
        }
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairing.len()) {
        let mut phi = RationalMatrix::zeros(n);
        for (p, &(a, b)) in pairing.iter().enumerate() {
            let s = if mask & (1 << p) == 0 { int(1) } else { int(-1) };
            if null[p] {
                phi.set(a, a, s.clone());
                phi.set(b, b, -s);
            } else {
                phi.set(b, a, s.clone());
                phi.set(a, b, s);
            }
        }
        let candidate = spec.clone().with_phi(phi.clone());
        if validate(&candidate, conv).is_ok() {
            out.push(phi);
        }
    }
    if out.is_empty() {
        Err(FrameError::NoConsistentPhi)
    } else {
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::{parse_expr, VarList};

    pub(crate) fn v3(vars: &Vars, comps: [&str; 3]) -> PolyVec {
        comps.iter().map(|c| parse_expr(c, vars).unwrap()).collect()
    }

    pub(crate) fn lorentz3() -> RationalMatrix {
        RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]).unwrap()
    }

    pub(crate) fn phi3() -> RationalMatrix {
        RationalMatrix::from_i64_rows(&[&[0, 0, 0], &[0, 0, -1], &[0, -1, 0]]).unwrap()
    }

    pub(crate) fn heisenberg() -> FrameSpec {
        let v = VarList::empty();
        FrameSpec::new("heisenberg", &v, lorentz3(), 0)
            .with_bracket(1, 2, v3(&v, ["2", "0", "0"]))
            .with_phi(phi3())
    }

    pub(crate) fn g2() -> FrameSpec {
        let v = VarList::new(["beta", "gamma"]);
        FrameSpec::new("g2", &v, lorentz3(), 0)
            .with_bracket(0, 1, v3(&v, ["0", "-gamma", "beta"]))
            .with_bracket(0, 2, v3(&v, ["0", "beta", "gamma"]))
            .with_bracket(1, 2, v3(&v, ["2", "0", "0"]))
            .with_phi(phi3())
    }

    #[test]
    fn heisenberg_is_k_paracontact() {
        let f = validate(&heisenberg(), SignConvention::CALIBRATED).unwrap();
        assert!(f.h().is_zero());
        assert_eq!(f.n(), 1);
    }

    #[test]
    fn g2_h_rotates_the_pair() {
        let f = validate(&g2(), SignConvention::CALIBRATED).unwrap();
        let v = f.vars().clone();
        let gamma = parse_expr("gamma", &v).unwrap();
        let z = Polynomial::zero(&v);
        assert_eq!(f.h().column(1), vec![z.clone(), z.clone(), -&gamma]);
        assert_eq!(f.h().column(2), vec![z.clone(), gamma, z]);
    }

    #[test]
    fn missing_xi_bracket_breaks_d_eta() {
        let v = VarList::empty();
        let spec = FrameSpec::new("abelian", &v, lorentz3(), 0).with_phi(phi3());
        let Err(FrameError::Invalid(vs)) = validate(&spec, SignConvention::CALIBRATED) else {
            panic!("abelian frame validated");
        };
        assert!(vs.iter().any(|v| matches!(v, Violation::Axiom { axiom: Axiom::DEta, indices, .. } if indices == &vec![1, 2])));
    }

    #[test]
    fn flipped_convention_rejects_catalog_phi() {
        assert!(validate(&heisenberg(), SignConvention::new(-1).unwrap()).is_err());
    }

    #[test]
    fn jacobi_of_abelian_and_broken_tables() {
        let v = VarList::empty();
        let abelian = FrameSpec::new("a", &v, lorentz3(), 0);
        assert!(jacobi_check(&abelian).is_empty());
        // [a,b]=c, [b,c]=a, [a,c]=a
        let broken = abelian
            .with_bracket(0, 1, v3(&v, ["0", "0", "1"]))
            .with_bracket(1, 2, v3(&v, ["1", "0", "0"]))
            .with_bracket(0, 2, v3(&v, ["1", "0", "0"]));
        let res = jacobi_check(&broken);
        assert_eq!(res.len(), 1);
        // [[a,b],c] + [[b,c],a] + [[c,a],b] = 0 + 0 + [-a, b] = -c
        assert_eq!(res[0].3, v3(&v, ["0", "0", "-1"]));
    }

    #[test]
    fn infer_phi_heisenberg_is_unique() {
        let c = infer_phi(&heisenberg(), &[(1, 2)], SignConvention::CALIBRATED).unwrap();
        assert_eq!(c, vec![phi3()]);
    }

    #[test]
    fn infer_phi_without_xi_bracket_fails() {
        let v = VarList::empty();
        let spec = FrameSpec::new("abelian", &v, lorentz3(), 0);
        assert_eq!(
            infer_phi(&spec, &[(1, 2)], SignConvention::CALIBRATED),
            Err(FrameError::NoConsistentPhi)
        );
    }

    #[test]
    fn bad_pairing_is_reported() {
        assert!(matches!(
            infer_phi(&heisenberg(), &[(0, 1)], SignConvention::CALIBRATED),
            Err(FrameError::BadPairing(_))
        ));
    }

    #[test]
    fn substitution_keeps_var_list() {
        let mut a = BTreeMap::new();
        a.insert("gamma".to_string(), int(1));
        let s = g2().substitute(&a).unwrap();
        assert_eq!(s.vars.names(), g2().vars.names());
        assert_eq!(s.brackets[0][1][1], Polynomial::from_int(&s.vars, -1));
    }
}

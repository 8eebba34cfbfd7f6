//! Structural predicates, fitted constants and theorem cross-checks.

pub mod condition;
pub mod identities;

use num_traits::Zero;
use thiserror::Error;

pub use condition::{ConditionSet, Verdict};

use crate::curvature::{lie_xi_metric, nabla_xi, rough_laplacian, Geometry};
use crate::scalar::{int, vec_ops, PolyMatrix, PolyVec, Polynomial, Rational};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no (kappa, mu) fit: the frame is not a (kappa, mu)-space")]
    NotKmSpace,
}

fn verdict(geo: &Geometry, residuals: impl IntoIterator<Item = Polynomial>) -> Verdict {
    Verdict::from_residuals(geo.frame.vars(), residuals, &geo.frame.spec().nonzero)
}

fn int_poly(geo: &Geometry, c: i64) -> Polynomial {
    Polynomial::from_int(geo.frame.vars(), c)
}

/// `eta(X) xi` as a matrix.
fn eta_xi(geo: &Geometry) -> PolyMatrix {
    let f = &geo.frame;
    let n = f.dim();
    let mut m = PolyMatrix::zeros(n, f.vars());
    for (j, e) in f.eta().iter().enumerate() {
        m.set(f.xi_index(), j, Polynomial::constant(f.vars(), e.clone()));
    }
    m
}

/// `h = 0`, cross-checked against `L_xi g = 0`.
pub fn is_k_paracontact(geo: &Geometry) -> Result<Verdict, ClassifyError> {
    let v = verdict(geo, geo.frame.h().entries().cloned());
    let killing = verdict(geo, lie_xi_metric(&geo.frame, &geo.conn).entries().cloned());
    if !v.same_locus(&killing) {
        return Err(ClassifyError::Inconsistent(format!("h = 0 gives {v}, L_xi g = 0 gives {killing}")));
    }
    Ok(v)
}

/// Residuals `(nabla_{E_i} phi) E_j + g(E_i, E_j) xi - eta(E_j) E_i`.
pub fn para_sasakian_residuals(geo: &Geometry) -> Vec<Polynomial> {
    let f = &geo.frame;
    let n = f.dim();
    let mut out = Vec::new();
    for i in 0..n {
        let d = geo.conn.nabla_endo(i, f.phi());
        for j in 0..n {
            let mut r = d.column(j);
            let gij = f.metric().get(i, j);
            r[f.xi_index()] = &r[f.xi_index()] + &Polynomial::constant(f.vars(), gij.clone());
            let ej = &f.eta()[j];
            r[i] = &r[i] - &Polynomial::constant(f.vars(), ej.clone());
            out.extend(r);
        }
    }
    out
}

pub fn is_para_sasakian(geo: &Geometry) -> Verdict {
    verdict(geo, para_sasakian_residuals(geo))
}

/// `R(X,Y) xi = -(eta(X) Y - eta(Y) X)` on all frame pairs.
pub fn check_eq4(geo: &Geometry) -> Verdict {
    let f = &geo.frame;
    let n = f.dim();
    let xi = f.xi();
    let mut res = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut r = geo.curv.r(&f.basis(i), &f.basis(j), &xi);
            r[j] = &r[j] + &Polynomial::constant(f.vars(), f.eta()[i].clone());
            r[i] = &r[i] - &Polynomial::constant(f.vars(), f.eta()[j].clone());
            res.extend(r);
        }
    }
    verdict(geo, res)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaEinstein {
    pub a: Polynomial,
    pub b: Polynomial,
    pub verdict: Verdict,
}

/// Fits `Q = a I + b eta (x) xi`. `a` is read off a unit vector in ker eta,
/// `b` from `Q xi`; the verdict is the vanishing of the remainder.
pub fn eta_einstein_fit(geo: &Geometry) -> EtaEinstein {
    let f = &geo.frame;
    let n = f.dim();
    let x = f.xi_index();
    let q = geo.curv.ricci_operator();
    let j = (0..n).find(|&j| j != x).expect("dim >= 3");
    // e = E_j - eta_j xi lies in ker eta and has E_j-component 1
    let ej = Polynomial::constant(f.vars(), f.eta()[j].clone());
    let a = q.get(j, j) - &(&ej * q.get(j, x));
    let b = q.get(x, x) - &a;
    let fit = PolyMatrix::identity(n, f.vars()).map(|p| p * &a).add(&eta_xi(geo).map(|p| p * &b));
    let verdict = verdict(geo, q.sub(&fit).entries().cloned());
    EtaEinstein { a, b, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mu {
    Value(Polynomial),
    /// `h = 0`: the nullity condition does not see mu.
    Unconstrained,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmFit {
    pub kappa: Polynomial,
    pub mu: Mu,
    /// `Q xi = 2 n kappa xi`.
    pub q_xi_check: bool,
    /// `h^2 = (kappa + 1) phi^2`.
    pub h2_check: bool,
}

/// Every component of the nullity condition as `A_kappa kappa + A_mu mu = rhs`.
fn km_rows(geo: &Geometry) -> Vec<(Polynomial, Polynomial, Polynomial)> {
    let f = &geo.frame;
    let n = f.dim();
    let h = f.h();
    let xi = f.xi();
    let vars = f.vars();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (&f.eta()[i], &f.eta()[j]);
            if ei.is_zero() && ej.is_zero() {
                continue;
            }
            let r = geo.curv.r(&f.basis(i), &f.basis(j), &xi);
            for (k, rk) in r.into_iter().enumerate() {
                let delta = |a: usize| if a == k { int(1) } else { int(0) };
                let ak = Polynomial::constant(vars, ei * delta(j) - ej * delta(i));
                let am = &h.get(k, j).scale(ei) - &h.get(k, i).scale(ej);
                rows.push((ak, am, rk));
            }
        }
    }
    rows
}

/// Solves `R(X,Y) xi = kappa (eta(X)Y - eta(Y)X) + mu (eta(X)hY - eta(Y)hX)`
/// for polynomial kappa, mu.
pub fn km_fit(geo: &Geometry) -> Result<KmFit, ClassifyError> {
    let rows = km_rows(geo);
    let f = &geo.frame;
    let vars = f.vars();
    let check = |kappa: &Polynomial, mu: &Polynomial| {
        rows.iter().all(|(ak, am, r)| (&(ak * kappa) + &(am * mu) - r).is_zero())
    };
    let zero = Polynomial::zero(vars);
    let mut found: Option<(Polynomial, Mu)> = None;
    if rows.iter().all(|(_, am, _)| am.is_zero()) {
        for (ak, _, r) in &rows {
            if ak.is_zero() {
                continue;
            }
            if let Some(kappa) = r.exact_div(ak) {
                if check(&kappa, &zero) {
                    found = Some((kappa, Mu::Unconstrained));
                }
            }
            break;
        }
    } else {
        'search: for (p, (ak1, am1, r1)) in rows.iter().enumerate() {
            for (ak2, am2, r2) in &rows[p + 1..] {
                let det = &(ak1 * am2) - &(ak2 * am1);
                if det.is_zero() {
                    continue;
                }
                let kn = &(r1 * am2) - &(r2 * am1);
                let mn = &(ak1 * r2) - &(ak2 * r1);
                if let (Some(kappa), Some(mu)) = (kn.exact_div(&det), mn.exact_div(&det)) {
                    if check(&kappa, &mu) {
                        found = Some((kappa, Mu::Value(mu)));
                    }
                }
                break 'search;
            }
        }
    }
    let (kappa, mu) = found.ok_or(ClassifyError::NotKmSpace)?;
    let two_n = Rational::from_integer((2 * f.n() as i64).into());
    let q_xi_check = vec_ops::is_zero(&vec_ops::sub(
        &geo.q_xi(),
        &vec_ops::scale(&f.xi(), &kappa.scale(&two_n)),
    ));
    let phi2 = f.phi().mul(f.phi());
    let kp1 = &kappa + &Polynomial::one(vars);
    let h2_check = f.h().mul(f.h()).sub(&phi2.map(|p| p * &kp1)).is_zero();
    Ok(KmFit {
        kappa,
        mu,
        q_xi_check,
        h2_check,
    })
}

/// Residuals of the `R(X,Y)hZ - hR(X,Y)Z` identity for (kappa, mu)-spaces
/// with kappa != -1, over all frame triples.
///
/// The `eta(Z)(eta(Y)hX - eta(X)hY)` term carries a factor kappa.
pub fn kno1_residuals(geo: &Geometry, fit: &KmFit) -> Result<Vec<Polynomial>, ClassifyError> {
    let f = &geo.frame;
    let vars = f.vars();
    let kp1 = &fit.kappa + &Polynomial::one(vars);
    if kp1.is_zero() {
        return Err(ClassifyError::Precondition("kappa = -1 identically".into()));
    }
    let Mu::Value(mu) = &fit.mu else {
        return Err(ClassifyError::Precondition("mu is unconstrained (h = 0)".into()));
    };
    let kappa = &fit.kappa;
    let n = f.dim();
    let h = f.h();
    let phi = f.phi();
    let xi = f.xi();
    let phih = phi.mul(h);
    let eta = |v: &PolyVec| f.eta_of(v);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (f.basis(a), f.basis(b));
            let rxy = geo.curv.r_endo(&x, &y);
            let (ex, ey) = (eta(&x), eta(&y));
            let (hx, hy) = (h.apply(&x), h.apply(&y));
            let (phx, phy) = (phih.apply(&x), phih.apply(&y));
            let (px, py) = (phi.apply(&x), phi.apply(&y));
            let g_x_phiy = f.g(&x, &py);
            for c in 0..n {
                let z = f.basis(c);
                let lhs = vec_ops::sub(&rxy.apply(&h.apply(&z)), &h.apply(&rxy.apply(&z)));
                let ez = eta(&z);
                let pz = phi.apply(&z);
                let xi_coeff = &(kappa * &(&(&ey * &f.g(&hx, &z)) - &(&ex * &f.g(&hy, &z))))
                    + &(&(mu * &kp1) * &(&(&ey * &f.g(&x, &z)) - &(&ex * &f.g(&y, &z))));
                let mut rhs = vec_ops::scale(&xi, &xi_coeff);
                let bracket = vec_ops::add(
                    &vec_ops::sub(&vec_ops::scale(&phx, &f.g(&y, &pz)), &vec_ops::scale(&phy, &f.g(&x, &pz))),
                    &vec_ops::sub(&vec_ops::scale(&px, &f.g(&z, &phy)), &vec_ops::scale(&py, &f.g(&z, &phx))),
                );
                rhs = vec_ops::add(&rhs, &vec_ops::scale(&bracket, kappa));
                let t = vec_ops::sub(&vec_ops::scale(&hx, &ey), &vec_ops::scale(&hy, &ex));
                rhs = vec_ops::add(&rhs, &vec_ops::scale(&t, &(kappa * &ez)));
                let t = vec_ops::sub(&vec_ops::scale(&x, &ey), &vec_ops::scale(&y, &ex));
                rhs = vec_ops::add(&rhs, &vec_ops::scale(&t, &(&(mu * &kp1) * &ez)));
                let t = phih.apply(&z);
                rhs = vec_ops::add(&rhs, &vec_ops::scale(&t, &(&mu.scale_int(2) * &g_x_phiy)));
                out.extend(vec_ops::sub(&lhs, &rhs));
            }
        }
    }
    Ok(out)
}

pub fn check_kno1(geo: &Geometry, fit: &KmFit) -> Result<Verdict, ClassifyError> {
    Ok(verdict(geo, kno1_residuals(geo, fit)?))
}

/// Components of `Q xi` and `Delta xi` off the xi slot.
fn off_xi(geo: &Geometry, v: PolyVec) -> Vec<Polynomial> {
    let x = geo.frame.xi_index();
    v.into_iter().enumerate().filter(|(i, _)| *i != x).map(|(_, p)| p).collect()
}

/// xi is a Ricci eigenvector; cross-checked against `Delta xi` collinear to xi.
pub fn is_h_paracontact(geo: &Geometry) -> Result<Verdict, ClassifyError> {
    let v = verdict(geo, off_xi(geo, geo.q_xi()));
    let lap = rough_laplacian(&geo.frame, &geo.conn, &geo.frame.xi());
    let via_lap = verdict(geo, off_xi(geo, lap));
    if !v.same_locus(&via_lap) {
        return Err(ClassifyError::Inconsistent(format!(
            "Q xi eigenvector gives {v}, Laplacian collinearity gives {via_lap}"
        )));
    }
    Ok(v)
}

pub fn is_harmonic_map(geo: &Geometry) -> Result<Verdict, ClassifyError> {
    let h = is_h_paracontact(geo)?;
    let tr = crate::curvature::harmonic_map_trace(&geo.frame, &geo.conn, &geo.curv);
    Ok(h.and(&verdict(geo, tr)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IhtChecks {
    /// `Q xi = -2n xi`.
    pub q_xi: Verdict,
    /// `Delta xi = Q xi`.
    pub laplacian: Verdict,
    /// H-paracontact and `tr h^2 = 0`.
    pub h_and_trace: Verdict,
}

/// The three equivalent characterizations; errors if their loci differ.
pub fn is_iht(geo: &Geometry) -> Result<(Verdict, IhtChecks), ClassifyError> {
    let f = &geo.frame;
    let two_n = Rational::from_integer((2 * f.n() as i64).into());
    let q_xi = verdict(geo, vec_ops::add(&geo.q_xi(), &vec_ops::scale_rat(&f.xi(), &two_n)));
    let lap = rough_laplacian(f, &geo.conn, &f.xi());
    let laplacian = verdict(geo, vec_ops::sub(&lap, &geo.q_xi()));
    let h_and_trace = is_h_paracontact(geo)?.and(&verdict(geo, [geo.tr_h2()]));
    if !q_xi.same_locus(&laplacian) || !q_xi.same_locus(&h_and_trace) {
        return Err(ClassifyError::Inconsistent(format!(
            "IHT characterizations disagree: {q_xi} / {laplacian} / {h_and_trace}"
        )));
    }
    Ok((q_xi.clone(), IhtChecks { q_xi, laplacian, h_and_trace }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Soliton {
    pub verdict: Verdict,
    /// `rho(xi, xi)`, the only possible constant.
    pub lambda: Polynomial,
    /// Einstein with Killing xi, on the soliton locus.
    pub trivial: Verdict,
    /// `lambda = -2n` wherever the equation holds.
    pub lambda_is_minus_2n: bool,
}

/// `rho + 1/2 L_xi g = lambda g` with constant lambda.
pub fn soliton_solve(geo: &Geometry) -> Result<Soliton, ClassifyError> {
    let f = &geo.frame;
    let lambda = geo.rho_xi_xi();
    let half = crate::scalar::rat(1, 2);
    let g = f.metric().to_poly(f.vars());
    let residual = geo
        .curv
        .ricci()
        .add(&lie_xi_metric(f, &geo.conn).scale(&half))
        .sub(&g.map(|p| p * &lambda));
    let verdict = verdict(geo, residual.entries().cloned());
    let minus_2n = int_poly(geo, -2 * f.n() as i64);
    let lambda_is_minus_2n = verdict
        .to_set(f.vars(), &f.spec().nonzero)
        .implies_zero(&(&lambda - &minus_2n));
    let einstein = verdict_of_einstein(geo, &lambda);
    let killing = is_k_paracontact(geo)?;
    let trivial = verdict.and(&einstein.and(&killing));
    Ok(Soliton {
        verdict,
        lambda,
        trivial,
        lambda_is_minus_2n,
    })
}

fn verdict_of_einstein(geo: &Geometry, lambda: &Polynomial) -> Verdict {
    let f = &geo.frame;
    let g = f.metric().to_poly(f.vars());
    verdict(geo, geo.curv.ricci().sub(&g.map(|p| p * lambda)).entries().cloned())
}

/// For `h = 0`: `R(Y,Z,xi,X) = g((nabla_Y phi)Z, X) - g((nabla_Z phi)Y, X)` and
/// `R(xi,X,Y,Z) = g((nabla_X phi)Z, Y)`, with `R(X,Y,Z,W) = g(R(X,Y)Z, W)`.
pub fn kparacontact_identity_residuals(geo: &Geometry) -> Result<(Vec<Polynomial>, Vec<Polynomial>), ClassifyError> {
    let f = &geo.frame;
    if !f.h().is_zero() {
        return Err(ClassifyError::Precondition("h is not identically zero".into()));
    }
    let n = f.dim();
    let xi = f.xi();
    let dphi: Vec<PolyMatrix> = (0..n).map(|i| geo.conn.nabla_endo(i, f.phi())).collect();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (f.basis(a), f.basis(b));
            let r_ab_xi = geo.curv.r(&ea, &eb, &xi);
            let r_xi_a = geo.curv.r_endo(&xi, &ea);
            for c in 0..n {
                let ec = f.basis(c);
                // (Y, Z, X) = (a, b, c)
                let lhs = f.g(&r_ab_xi, &ec);
                let rhs = &f.g(&dphi[a].column(b), &ec) - &f.g(&dphi[b].column(a), &ec);
                first.push(&lhs - &rhs);
                // (X, Y, Z) = (a, b, c)
                let lhs = f.g(&r_xi_a.apply(&eb), &ec);
                let rhs = f.g(&dphi[a].column(c), &eb);
                second.push(&lhs - &rhs);
            }
        }
    }
    Ok((first, second))
}

pub fn check_kparacontact_identities(geo: &Geometry) -> Result<(Verdict, Verdict), ClassifyError> {
    let (a, b) = kparacontact_identity_residuals(geo)?;
    Ok((verdict(geo, a), verdict(geo, b)))
}

/// `||nabla xi||^2 = sum_ij g^{ij} g(nabla_i xi, nabla_j xi)`.
pub fn nabla_xi_norm2(geo: &Geometry) -> Polynomial {
    let f = &geo.frame;
    let a = nabla_xi(f, &geo.conn);
    let mut acc = Polynomial::zero(f.vars());
    for (i, j, gij) in f.trace_pairs() {
        acc = &acc + &f.g(&a.column(i), &a.column(j)).scale(&gij);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fitted {
    pub a: Option<Polynomial>,
    pub b: Option<Polynomial>,
    pub kappa: Option<Polynomial>,
    pub mu: Option<Mu>,
    pub lambda: Option<Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub k_paracontact: Verdict,
    pub para_sasakian: Verdict,
    pub eq4_holds: Verdict,
    pub eta_einstein: Verdict,
    pub km_space: Verdict,
    pub h_paracontact: Verdict,
    pub harmonic_map: Verdict,
    pub iht: Verdict,
    pub soliton: Verdict,
    pub soliton_trivial: Verdict,
    pub km: Option<KmFit>,
    pub fitted: Fitted,
}

impl Classification {
    /// `(name, verdict)` in report order.
    pub fn flags(&self) -> Vec<(&'static str, &Verdict)> {
        vec![
            ("K_paracontact", &self.k_paracontact),
            ("paraSasakian", &self.para_sasakian),
            ("eq4_holds", &self.eq4_holds),
            ("eta_einstein", &self.eta_einstein),
            ("km_space", &self.km_space),
            ("H_paracontact", &self.h_paracontact),
            ("harmonic_map", &self.harmonic_map),
            ("iht", &self.iht),
            ("soliton", &self.soliton),
            ("soliton_trivial", &self.soliton_trivial),
        ]
    }
}

/// Runs every predicate and checks the implications between them.
pub fn classify(geo: &Geometry) -> Result<Classification, ClassifyError> {
    let f = &geo.frame;
    let vars = f.vars();
    let nz = &f.spec().nonzero;
    let k_paracontact = is_k_paracontact(geo)?;
    let para_sasakian = is_para_sasakian(geo);
    if !para_sasakian.to_set(vars, nz).implies(&k_paracontact.to_set(vars, nz)) {
        return Err(ClassifyError::Inconsistent("paraSasakian locus is not inside the K-paracontact locus".into()));
    }
    let eq4_holds = check_eq4(geo);
    let ee = eta_einstein_fit(geo);
    let km = km_fit(geo).ok();
    let km_space = if km.is_some() { Verdict::Holds } else { Verdict::Fails };
    let h_paracontact = is_h_paracontact(geo)?;
    let harmonic_map = is_harmonic_map(geo)?;
    let (iht, _) = is_iht(geo)?;
    let sol = soliton_solve(geo)?;
    if !sol.lambda_is_minus_2n {
        return Err(ClassifyError::Inconsistent(format!("soliton with lambda = {}", sol.lambda)));
    }
    if !sol.verdict.to_set(vars, nz).implies(&iht.to_set(vars, nz)) {
        return Err(ClassifyError::Inconsistent("soliton locus is not inside the IHT locus".into()));
    }
    let fitted = Fitted {
        a: (!ee.verdict.fails()).then(|| ee.a.clone()),
        b: (!ee.verdict.fails()).then(|| ee.b.clone()),
        kappa: km.as_ref().map(|k| k.kappa.clone()),
        mu: km.as_ref().map(|k| k.mu.clone()),
        lambda: (!sol.verdict.fails()).then(|| sol.lambda.clone()),
    };
    Ok(Classification {
        k_paracontact,
        para_sasakian,
        eq4_holds,
        eta_einstein: ee.verdict,
        km_space,
        h_paracontact,
        harmonic_map,
        iht,
        soliton: sol.verdict,
        soliton_trivial: sol.trivial,
        km,
        fitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::tests::{g2, heisenberg};
    use crate::frame::{validate, SignConvention};
    use crate::scalar::parse_expr;

    fn geo(spec: crate::frame::FrameSpec) -> Geometry {
        Geometry::new(validate(&spec, SignConvention::CALIBRATED).unwrap())
    }

    #[test]
    fn heisenberg_classification() {
        let g = geo(heisenberg());
        let c = classify(&g).unwrap();
        assert!(c.k_paracontact.holds());
        assert!(c.para_sasakian.holds());
        assert!(c.eq4_holds.holds());
        assert!(c.iht.holds());
        let km = c.km.unwrap();
        assert_eq!(km.kappa, Polynomial::from_int(g.frame.vars(), -1));
        assert_eq!(km.mu, Mu::Unconstrained);
        assert!(km.q_xi_check && km.h2_check);
        assert_eq!(c.fitted.a, Some(Polynomial::from_int(g.frame.vars(), 2)));
        assert_eq!(c.fitted.b, Some(Polynomial::from_int(g.frame.vars(), -4)));
    }

    #[test]
    fn g2_km_constants() {
        let mut spec = g2();
        spec.nonzero = vec![parse_expr("gamma", &spec.vars).unwrap()];
        let g = geo(spec);
        let v = g.frame.vars().clone();
        let km = km_fit(&g).unwrap();
        assert_eq!(km.kappa, parse_expr("-1-gamma^2", &v).unwrap());
        assert_eq!(km.mu, Mu::Value(parse_expr("2+2*beta", &v).unwrap()));
        assert!(km.q_xi_check && km.h2_check);
        assert!(check_kno1(&g, &km).unwrap().holds());
        assert!(is_iht(&g).unwrap().0.fails());
        assert!(is_h_paracontact(&g).unwrap().holds());
        assert!(is_k_paracontact(&g).unwrap().fails());
    }

    #[test]
    fn kno1_refuses_kappa_minus_one() {
        let g = geo(heisenberg());
        let km = km_fit(&g).unwrap();
        assert!(matches!(check_kno1(&g, &km), Err(ClassifyError::Precondition(_))));
    }

    #[test]
    fn heisenberg_k_identities() {
        let g = geo(heisenberg());
        let (a, b) = check_kparacontact_identities(&g).unwrap();
        assert!(a.holds() && b.holds());
        assert!(check_kparacontact_identities(&geo(g2())).is_err());
    }
}

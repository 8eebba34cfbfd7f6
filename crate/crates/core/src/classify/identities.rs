//! The identity suite: structural identities every paracontact metric frame
//! must satisfy, plus two per-frame conditions (`cd1`, `sol`) that are
//! reported the same way but may legitimately fail.

use crate::curvature::{divergence_endo, harmonic_map_trace, rough_laplacian, trace_nabla_phi, Geometry};
use crate::scalar::{vec_ops, Polynomial, Rational};

use super::nabla_xi_norm2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Must vanish on every paracontact metric frame.
    Identity,
    /// A property of the particular frame.
    Condition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityResult {
    pub id: &'static str,
    pub kind: Kind,
    /// Nonzero residual components, deduplicated; empty when the check passes.
    pub residuals: Vec<Polynomial>,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }
}

pub const IDS: &[&str] = &[
    "eq1", "eq2", "eq3", "eq3.1p", "eq3.3", "eq3.5", "tr0", "trace", "norm", "main2", "cd1", "sol",
];

fn result(id: &'static str, kind: Kind, residuals: impl IntoIterator<Item = Polynomial>) -> IdentityResult {
    let mut out: Vec<Polynomial> = Vec::new();
    for p in residuals {
        if !p.is_zero() && !out.contains(&p) {
            out.push(p);
        }
    }
    IdentityResult { id, kind, residuals: out }
}

fn rat(n: usize) -> Rational {
    Rational::from_integer((n as i64).into())
}

/// Runs every check in [`IDS`] order.
pub fn identity_suite(geo: &Geometry) -> Vec<IdentityResult> {
    let f = &geo.frame;
    let conn = &geo.conn;
    let n = f.dim();
    let nn = f.n();
    let vars = f.vars();
    let xi = f.xi();
    let phi = f.phi();
    let h = f.h();
    let phih = phi.mul(h);
    let dphi: Vec<_> = (0..n).map(|i| conn.nabla_endo(i, phi)).collect();
    let dphih: Vec<_> = (0..n).map(|i| conn.nabla_endo(i, &phih)).collect();
    let mut out = Vec::new();

    // nabla xi = -phi + phi h, nabla_xi phi = 0
    let mut eq1 = Vec::new();
    for i in 0..n {
        let e = f.basis(i);
        let expect = vec_ops::sub(&phih.apply(&e), &phi.apply(&e));
        eq1.extend(vec_ops::sub(&conn.nabla(i, &xi), &expect));
    }
    eq1.extend(dphi[f.xi_index()].entries().cloned());
    out.push(result("eq1", Kind::Identity, eq1));

    // (nabla_{phi X} phi) phi Y - (nabla_X phi) Y = 2 g(X,Y) xi - eta(Y)(X - hX + eta(X) xi)
    let mut eq2 = Vec::new();
    for a in 0..n {
        let x = f.basis(a);
        let d_phix = conn.nabla_endo_along(&phi.apply(&x), phi);
        for b in 0..n {
            let y = f.basis(b);
            let lhs = vec_ops::sub(&d_phix.apply(&phi.apply(&y)), &dphi[a].column(b));
            let inner = vec_ops::add(
                &vec_ops::sub(&x, &h.apply(&x)),
                &vec_ops::scale(&xi, &f.eta_of(&x)),
            );
            let rhs = vec_ops::sub(
                &vec_ops::scale(&xi, &f.g(&x, &y).scale_int(2)),
                &vec_ops::scale(&inner, &f.eta_of(&y)),
            );
            eq2.extend(vec_ops::sub(&lhs, &rhs));
        }
    }
    out.push(result("eq2", Kind::Identity, eq2));

    // rho(xi, xi) = -2n + tr h^2
    let two_n = Polynomial::constant(vars, rat(2 * nn));
    out.push(result(
        "eq3",
        Kind::Identity,
        [&(&geo.rho_xi_xi() + &two_n) - &geo.tr_h2()],
    ));

    // tr nabla phi = -2n xi
    let tr = trace_nabla_phi(f, conn);
    out.push(result(
        "eq3.1p",
        Kind::Identity,
        vec_ops::add(&tr, &vec_ops::scale_rat(&xi, &rat(2 * nn))),
    ));

    // R(X,Y)xi = (nabla_X phi)Y - (nabla_Y phi)X - (nabla_X phi h)Y + (nabla_Y phi h)X
    let mut eq33 = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let r = geo.curv.r(&f.basis(a), &f.basis(b), &xi);
            let rhs = vec_ops::add(
                &vec_ops::sub(&dphi[a].column(b), &dphi[b].column(a)),
                &vec_ops::sub(&dphih[b].column(a), &dphih[a].column(b)),
            );
            eq33.extend(vec_ops::sub(&r, &rhs));
        }
    }
    out.push(result("eq3.3", Kind::Identity, eq33));

    // rho(X, xi) = -2n eta(X) + g(div(phi h), X)
    let div = divergence_endo(f, conn, &phih);
    let rho = geo.curv.ricci();
    let eq35 = (0..n).map(|a| {
        let x = f.basis(a);
        let rhs = &f.eta_of(&x).scale(&-rat(2 * nn)) + &f.g(&div, &x);
        rho.get(a, f.xi_index()) - &rhs
    });
    out.push(result("eq3.5", Kind::Identity, eq35.collect::<Vec<_>>()));

    // sum_ij g^{ij} g((nabla_X phi) E_i, E_j) = 0
    // sum_ij g^{ij} g((nabla_{E_i} phi) X, E_j) = 2n eta(X)
    let pairs = f.trace_pairs();
    let mut tr0 = Vec::new();
    let mut trace = Vec::new();
    for a in 0..n {
        let x = f.basis(a);
        let mut s0 = Polynomial::zero(vars);
        let mut s1 = Polynomial::zero(vars);
        for (i, j, gij) in &pairs {
            let ej = f.basis(*j);
            s0 = &s0 + &f.g(&dphi[a].column(*i), &ej).scale(gij);
            s1 = &s1 + &f.g(&dphi[*i].column(a), &ej).scale(gij);
        }
        tr0.push(s0);
        trace.push(&s1 - &f.eta_of(&x).scale(&rat(2 * nn)));
    }
    out.push(result("tr0", Kind::Identity, tr0));
    out.push(result("trace", Kind::Identity, trace));

    // ||nabla xi||^2 = -(2n + tr h^2)
    out.push(result(
        "norm",
        Kind::Identity,
        [&(&nabla_xi_norm2(geo) + &two_n) + &geo.tr_h2()],
    ));

    // Delta xi + 4n xi + Q xi = 0
    let lap = rough_laplacian(f, conn, &xi);
    out.push(result(
        "main2",
        Kind::Identity,
        vec_ops::add(&vec_ops::add(&lap, &vec_ops::scale_rat(&xi, &rat(4 * nn))), &geo.q_xi()),
    ));

    out.push(result("cd1", Kind::Condition, harmonic_map_trace(f, conn, &geo.curv)));

    // rho + 1/2 L_xi g - rho(xi,xi) g = 0
    let lambda = geo.rho_xi_xi();
    let g = f.metric().to_poly(vars);
    let sol = rho
        .add(&crate::curvature::lie_xi_metric(f, conn).scale(&crate::scalar::rat(1, 2)))
        .sub(&g.map(|p| p * &lambda));
    out.push(result("sol", Kind::Condition, sol.entries().cloned().collect::<Vec<_>>()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::tests::{g2, heisenberg};
    use crate::frame::{validate, SignConvention};

    #[test]
    fn all_identities_hold_on_g2_and_heisenberg() {
        for spec in [g2(), heisenberg()] {
            let geo = Geometry::new(validate(&spec, SignConvention::CALIBRATED).unwrap());
            let suite = identity_suite(&geo);
            assert_eq!(suite.iter().map(|r| r.id).collect::<Vec<_>>(), IDS);
            for r in &suite {
                if r.kind == Kind::Identity {
                    assert!(r.passed(), "{} on {}: {:?}", r.id, spec.label, r.residuals);
                }
            }
            let cd1 = suite.iter().find(|r| r.id == "cd1").unwrap();
            assert!(cd1.passed());
        }
    }

    mod props {
        use super::*;
        use crate::catalog::sample;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(30))]
            #[test]
            fn identities_vanish_on_random_instances(
                idx in 0usize..10,
                vals in prop::collection::vec((-5i64..=5, 1i64..=3), 2),
                sign in prop::bool::ANY,
            ) {
                let Some(f) = sample(idx, &vals, sign) else { return Ok(()) };
                let geo = Geometry::new(f);
                for r in identity_suite(&geo) {
                    if r.kind == Kind::Identity {
                        prop_assert!(r.passed(), "{}: {:?}", r.id, r.residuals);
                    }
                }
            }
        }
    }
}

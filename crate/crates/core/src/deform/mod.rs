//! D-homothetic deformations `eta_t = t eta`, `xi_t = xi / t`, `phi_t = phi`,
//! `g_t = t g + eps t(t-1) eta (x) eta` for a rational `t != 0`.
//!
//! The deformed frame is `{xi / t}` in the xi slot and the unchanged
//! non-xi vectors, so `s_a = 1/t` for the xi slot and `1` otherwise.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::classify::Verdict;
use crate::curvature::Geometry;
use crate::frame::{FrameError, FrameSpec, ParacontactFrame};
use crate::scalar::{format_rational, vec_ops, PolyVec, Polynomial, Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationParams {
    pub t: Rational,
    pub eps: i8,
}

impl DeformationParams {
    pub fn new(t: Rational, eps: i8) -> Result<Self, DeformError> {
        if t.is_zero() {
            return Err(DeformError::ZeroT);
        }
        if eps != 1 && eps != -1 {
            return Err(DeformError::BadEps(eps));
        }
        Ok(DeformationParams { t, eps })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DeformError {
    #[error("t must be nonzero")]
    ZeroT,
    #[error("eps must be +1 or -1, got {0}")]
    BadEps(i8),
    #[error("deformed metric is degenerate: g_t(xi_t, xi_t) = 0")]
    DegenerateDeformedMetric,
    #[error("deformed frame is not paracontact: {0}")]
    Invalid(#[from] FrameError),
}

fn scales(n: usize, xi: usize, t: &Rational) -> Vec<Rational> {
    (0..n).map(|a| if a == xi { t.recip() } else { Rational::one() }).collect()
}

/// The deformed spec on the rescaled frame.
pub fn d_homothety(frame: &ParacontactFrame, p: &DeformationParams) -> Result<FrameSpec, DeformError> {
    let spec = frame.spec();
    let n = spec.dim();
    let xi = spec.xi_index;
    let t = &p.t;
    let s = scales(n, xi, t);
    let eta = frame.eta();
    let eps = Rational::from_integer(p.eps.into());
    let tt1 = &eps * t * (t - Rational::one());

    let mut metric = RationalMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let v = &s[a] * &s[b] * (t * spec.metric.get(a, b) + &tt1 * &eta[a] * &eta[b]);
            metric.set(a, b, v);
        }
    }
    if metric.get(xi, xi).is_zero() || metric.determinant().is_zero() {
        return Err(DeformError::DegenerateDeformedMetric);
    }
    let mut phi = RationalMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            phi.set(i, j, spec.phi.get(i, j) * &s[j] / &s[i]);
        }
    }
    let mut out = FrameSpec::new(
        format!("{}@t={}", spec.label, format_rational(t)),
        &spec.vars,
        metric,
        xi,
    );
    for i in 0..n {
        for j in i + 1..n {
            let v: PolyVec = (0..n)
                .map(|k| spec.brackets[i][j][k].scale(&(&s[i] * &s[j] / &s[k])))
                .collect();
            out.set_bracket(i, j, v);
        }
    }
    out.phi = phi;
    out.pairing = spec.pairing.clone();
    out.nonzero = spec.nonzero.clone();
    Ok(out)
}

/// Deforms and validates under the frame's own convention.
pub fn deform(frame: &ParacontactFrame, p: &DeformationParams) -> Result<ParacontactFrame, DeformError> {
    let spec = d_homothety(frame, p)?;
    Ok(crate::frame::validate(&spec, frame.convention())?)
}

/// A basis of ker eta, `E_a - eta_a xi` for `a != xi`, in original components.
fn ker_eta_basis(frame: &ParacontactFrame) -> Vec<PolyVec> {
    let xi = frame.xi_index();
    (0..frame.dim())
        .filter(|&a| a != xi)
        .map(|a| {
            let mut v = frame.basis(a);
            v[xi] = &v[xi] - &Polynomial::constant(frame.vars(), frame.eta()[a].clone());
            v
        })
        .collect()
}

/// Original components to deformed-frame components.
fn to_deformed(v: &[Polynomial], s: &[Rational]) -> PolyVec {
    v.iter().zip(s).map(|(p, sa)| p.scale(&sa.recip())).collect()
}

fn to_original(v: &[Polynomial], s: &[Rational]) -> PolyVec {
    v.iter().zip(s).map(|(p, sa)| p.scale(sa)).collect()
}

/// `rho_t(X, xi_t) = (1/t) rho(X, xi)` for X in ker eta.
pub fn check_deformed_ricci_relation(original: &Geometry, deformed: &Geometry, t: &Rational) -> Verdict {
    let f = &original.frame;
    let xi = f.xi_index();
    let s = scales(f.dim(), xi, t);
    let mut res = Vec::new();
    for x in ker_eta_basis(f) {
        let lhs = row_dot(deformed.curv.ricci(), &to_deformed(&x, &s), xi);
        let rhs = row_dot(original.curv.ricci(), &x, xi).scale(&t.recip());
        res.push(&lhs - &rhs);
    }
    Verdict::from_residuals(f.vars(), res, &f.spec().nonzero)
}

/// `rho(X, E_col)` for a bilinear form matrix.
fn row_dot(m: &crate::scalar::PolyMatrix, x: &[Polynomial], col: usize) -> Polynomial {
    let mut acc = Polynomial::zero(x[0].vars());
    for (a, xa) in x.iter().enumerate() {
        if !xa.is_zero() {
            acc = &acc + &(xa * m.get(a, col));
        }
    }
    acc
}

/// `t R_t(X,Y) xi_t = R(X,Y) xi + (t-1)((nabla_X phi)Y - (nabla_Y phi)X)`
/// for X, Y in ker eta.
pub fn check_restricted_curvature_relation(original: &Geometry, deformed: &Geometry, t: &Rational) -> Verdict {
    let f = &original.frame;
    let xi = f.xi();
    let s = scales(f.dim(), f.xi_index(), t);
    let tm1 = t - Rational::one();
    let basis = ker_eta_basis(f);
    let mut res = Vec::new();
    for x in &basis {
        let dphi_x = original.conn.nabla_endo_along(x, f.phi());
        for y in &basis {
            let dphi_y = original.conn.nabla_endo_along(y, f.phi());
            let rt = deformed.curv.r(&to_deformed(x, &s), &to_deformed(y, &s), &deformed.frame.xi());
            let lhs = vec_ops::scale_rat(&to_original(&rt, &s), t);
            let rhs = vec_ops::add(
                &original.curv.r(x, y, &xi),
                &vec_ops::scale_rat(&vec_ops::sub(&dphi_x.apply(y), &dphi_y.apply(x)), &tm1),
            );
            res.extend(vec_ops::sub(&lhs, &rhs));
        }
    }
    Verdict::from_residuals(f.vars(), res, &f.spec().nonzero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_h_paracontact;
    use crate::frame::tests::{g2, heisenberg};
    use crate::frame::{validate, SignConvention};
    use crate::scalar::{int, rat};

    fn frame(spec: FrameSpec) -> ParacontactFrame {
        validate(&spec, SignConvention::CALIBRATED).unwrap()
    }

    #[test]
    fn identity_deformation() {
        let f = frame(g2());
        let mut d = d_homothety(&f, &DeformationParams::new(int(1), 1).unwrap()).unwrap();
        d.label = f.spec().label.clone();
        assert_eq!(&d, f.spec());
    }

    #[test]
    fn heisenberg_t2_stays_unit() {
        let f = frame(heisenberg());
        let d = deform(&f, &DeformationParams::new(int(2), 1).unwrap()).unwrap();
        assert_eq!(d.metric().get(0, 0), &int(1));
        assert_eq!(d.metric().get(1, 1), &int(2));
    }

    #[test]
    fn relations_hold_on_g2() {
        let f = frame(g2());
        for t in [int(2), int(3), rat(1, 2)] {
            let d = deform(&f, &DeformationParams::new(t.clone(), 1).unwrap()).unwrap();
            let (go, gd) = (Geometry::new(f.clone()), Geometry::new(d));
            assert!(check_deformed_ricci_relation(&go, &gd, &t).holds());
            assert!(check_restricted_curvature_relation(&go, &gd, &t).holds());
            assert!(is_h_paracontact(&gd).unwrap().same_locus(&is_h_paracontact(&go).unwrap()));
        }
    }

    #[test]
    fn zero_t_and_degenerate_metric() {
        assert_eq!(DeformationParams::new(int(0), 1), Err(DeformError::ZeroT));
        let f = frame(heisenberg());
        assert_eq!(
            d_homothety(&f, &DeformationParams::new(int(2), -1).unwrap()),
            Err(DeformError::DegenerateDeformedMetric)
        );
        assert!(matches!(
            deform(&f, &DeformationParams::new(int(3), -1).unwrap()),
            Err(DeformError::Invalid(_))
        ));
    }

    #[test]
    fn composition() {
        let f = frame(g2());
        let p = |t: Rational| DeformationParams::new(t, 1).unwrap();
        let once = deform(&f, &p(int(2))).unwrap();
        let mut twice = d_homothety(&once, &p(rat(1, 3))).unwrap();
        let mut direct = d_homothety(&f, &p(rat(2, 3))).unwrap();
        twice.label.clear();
        direct.label.clear();
        assert_eq!(twice, direct);
    }

    mod props {
        use super::*;
        use crate::catalog::sample;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn relations_hold_for_random_t(
                idx in 0usize..10,
                vals in prop::collection::vec((-4i64..=4, 1i64..=3), 2),
                t in (1i64..=6, 1i64..=4),
            ) {
                let Some(f) = sample(idx, &vals, true) else { return Ok(()) };
                let t = rat(t.0, t.1);
                let d = deform(&f, &DeformationParams::new(t.clone(), 1).unwrap()).unwrap();
                let (go, gd) = (Geometry::new(f), Geometry::new(d));
                prop_assert!(check_deformed_ricci_relation(&go, &gd, &t).holds());
                prop_assert!(check_restricted_curvature_relation(&go, &gd, &t).holds());
                prop_assert!(is_h_paracontact(&gd).unwrap().same_locus(&is_h_paracontact(&go).unwrap()));
            }

            #[test]
            fn deformations_compose(idx in 0usize..10, a in (1i64..=5, 1i64..=3), b in (1i64..=5, 1i64..=3)) {
                let Some(f) = sample(idx, &[(1, 1), (2, 1)], true) else { return Ok(()) };
                let (s, t) = (rat(a.0, a.1), rat(b.0, b.1));
                let p = |t: Rational| DeformationParams::new(t, 1).unwrap();
                let once = deform(&f, &p(s.clone())).unwrap();
                let mut twice = d_homothety(&once, &p(t.clone())).unwrap();
                let mut direct = d_homothety(&f, &p(s * t)).unwrap();
                twice.label.clear();
                direct.label.clear();
                prop_assert_eq!(twice, direct);
            }
        }
    }
}

//! Levi-Civita connection, curvature and the derived vector fields of a
//! validated frame.
//!
//! Curvature convention: `R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y]`.
//! Every trace over the frame is a g-trace `sum_ij g^{ij} (...)(E_i, E_j)`.

use num_traits::Zero;

use crate::frame::ParacontactFrame;
use crate::scalar::{rat, vec_ops, PolyMatrix, PolyVec, Polynomial};

/// `gamma[i]` is the matrix of `nabla_{E_i}`: its column `j` is `nabla_{E_i} E_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    gamma: Vec<PolyMatrix>,
}

impl Connection {
    /// Component `k` of `nabla_{E_i} E_j`.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        self.gamma[i].get(k, j)
    }

    pub fn matrix(&self, i: usize) -> &PolyMatrix {
        &self.gamma[i]
    }

    /// The matrix of `nabla_X`.
    pub fn along(&self, x: &[Polynomial]) -> PolyMatrix {
        let vars = x[0].vars();
        let mut acc = PolyMatrix::zeros(self.gamma.len(), vars);
        for (xi, g) in x.iter().zip(&self.gamma) {
            if !xi.is_zero() {
                acc = acc.add(&g.map(|p| p * xi));
            }
        }
        acc
    }

    /// `nabla_{E_i} V` for constant components `V`.
    pub fn nabla(&self, i: usize, v: &[Polynomial]) -> PolyVec {
        self.gamma[i].apply(v)
    }

    pub fn nabla_along(&self, x: &[Polynomial], v: &[Polynomial]) -> PolyVec {
        self.along(x).apply(v)
    }

    /// The endomorphism `nabla_{E_i} T`.
    pub fn nabla_endo(&self, i: usize, t: &PolyMatrix) -> PolyMatrix {
        self.gamma[i].mul(t).sub(&t.mul(&self.gamma[i]))
    }

    pub fn nabla_endo_along(&self, x: &[Polynomial], t: &PolyMatrix) -> PolyMatrix {
        let g = self.along(x);
        g.mul(t).sub(&t.mul(&g))
    }
}

/// Koszul formula for left-invariant fields:
/// `2 g(nabla_i E_j, E_k) = g([i,j],k) - g([j,k],i) + g([k,i],j)`.
pub fn levi_civita(frame: &ParacontactFrame) -> Connection {
    let spec = frame.spec();
    let n = frame.dim();
    let g = frame.metric();
    let ginv = frame.metric_inv();
    let half = rat(1, 2);
    // lowered[i][j][k] = g([E_i, E_j], E_k)
    let lowered: Vec<Vec<PolyVec>> = (0..n)
        .map(|i| (0..n).map(|j| g.apply(&spec.brackets[i][j])).collect())
        .collect();
    let gamma = (0..n)
        .map(|i| {
            let cols: Vec<PolyVec> = (0..n)
                .map(|j| {
                    let low: PolyVec = (0..n)
                        .map(|k| {
                            let s = &(&lowered[i][j][k] - &lowered[j][k][i]) + &lowered[k][i][j];
                            s.scale(&half)
                        })
                        .collect();
                    ginv.apply(&low)
                })
                .collect();
            PolyMatrix::from_columns(&cols)
        })
        .collect();
    Connection { gamma }
}

/// Components `(i, j)` where `nabla_i E_j - nabla_j E_i - [E_i, E_j]` is nonzero.
pub fn torsion_residuals(frame: &ParacontactFrame, conn: &Connection) -> Vec<(usize, usize, PolyVec)> {
    let n = frame.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = vec_ops::sub(
                &vec_ops::sub(&conn.gamma[i].column(j), &conn.gamma[j].column(i)),
                &frame.spec().brackets[i][j],
            );
            if !vec_ops::is_zero(&r) {
                out.push((i, j, r));
            }
        }
    }
    out
}

/// Components `(i, j, k)` where `g(nabla_i E_j, E_k) + g(E_j, nabla_i E_k)` is nonzero.
pub fn metric_residuals(frame: &ParacontactFrame, conn: &Connection) -> Vec<(usize, usize, usize, Polynomial)> {
    let n = frame.dim();
    let g = frame.metric().to_poly(frame.vars());
    let mut out = Vec::new();
    for (i, gam) in conn.gamma.iter().enumerate() {
        // (g Gamma_i)[k][j] = g(E_k, nabla_i E_j)
        let m = g.mul(gam);
        for j in 0..n {
            for k in j..n {
                let r = m.get(k, j) + m.get(j, k);
                if !r.is_zero() {
                    out.push((i, j, k, r));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CurvaturePackage {
    /// `riemann[i][j]` is the matrix of `R(E_i, E_j)`.
    riemann: Vec<Vec<PolyMatrix>>,
    ricci: PolyMatrix,
    ricci_operator: PolyMatrix,
    scalar: Polynomial,
}

impl CurvaturePackage {
    /// `R(E_i, E_j)` as an endomorphism.
    pub fn r_matrix(&self, i: usize, j: usize) -> &PolyMatrix {
        &self.riemann[i][j]
    }

    /// `R(E_i, E_j) E_k`.
    pub fn r_basis(&self, i: usize, j: usize, k: usize) -> PolyVec {
        self.riemann[i][j].column(k)
    }

    /// The endomorphism `R(X, Y)`.
    pub fn r_endo(&self, x: &[Polynomial], y: &[Polynomial]) -> PolyMatrix {
        let n = x.len();
        let mut acc = PolyMatrix::zeros(n, x[0].vars());
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let c = xa * yb;
                acc = acc.add(&self.riemann[a][b].map(|p| p * &c));
            }
        }
        acc
    }

    /// `R(X, Y) Z`.
    pub fn r(&self, x: &[Polynomial], y: &[Polynomial], z: &[Polynomial]) -> PolyVec {
        self.r_endo(x, y).apply(z)
    }

    /// The Ricci form `rho_ij`.
    pub fn ricci(&self) -> &PolyMatrix {
        &self.ricci
    }

    /// `Q = g^{-1} rho`.
    pub fn ricci_operator(&self) -> &PolyMatrix {
        &self.ricci_operator
    }

    pub fn scalar(&self) -> &Polynomial {
        &self.scalar
    }
}

/// `R(E_i,E_j) = nabla_[E_i,E_j] - nabla_i nabla_j + nabla_j nabla_i` and its contractions.
pub fn riemann(frame: &ParacontactFrame, conn: &Connection) -> CurvaturePackage {
    let n = frame.dim();
    let spec = frame.spec();
    let riemann: Vec<Vec<PolyMatrix>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    conn.along(&spec.brackets[i][j])
                        .sub(&conn.gamma[i].mul(&conn.gamma[j]))
                        .add(&conn.gamma[j].mul(&conn.gamma[i]))
                })
                .collect()
        })
        .collect();
    let ricci = ricci_form(frame, &riemann);
    let ricci_operator = frame.metric_inv().to_poly(frame.vars()).mul(&ricci);
    let scalar = ricci_operator.trace();
    CurvaturePackage {
        riemann,
        ricci,
        ricci_operator,
        scalar,
    }
}

/// `rho(X, Y) = sum_ij g^{ij} g(R(X, E_i) Y, E_j)`.
fn ricci_form(frame: &ParacontactFrame, riemann: &[Vec<PolyMatrix>]) -> PolyMatrix {
    let n = frame.dim();
    let vars = frame.vars();
    let g = frame.metric();
    let pairs = frame.trace_pairs();
    let mut rho = PolyMatrix::zeros(n, vars);
    for a in 0..n {
        for b in 0..n {
            let mut acc = Polynomial::zero(vars);
            for (i, j, gij) in &pairs {
                let v = riemann[a][*i].column(b);
                for (l, vl) in v.iter().enumerate() {
                    let glj = g.get(l, *j);
                    if !glj.is_zero() && !vl.is_zero() {
                        acc = &acc + &vl.scale(&(gij * glj));
                    }
                }
            }
            rho.set(a, b, acc);
        }
    }
    rho
}

/// Ricci form from the standard convention
/// `R_std(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`,
/// `Ric(X,Y) = tr(Z -> R_std(Z,X) Y)`. Computed independently of [`riemann`].
pub fn ricci_standard(frame: &ParacontactFrame, conn: &Connection) -> PolyMatrix {
    let n = frame.dim();
    let spec = frame.spec();
    let mut rho = PolyMatrix::zeros(n, frame.vars());
    for a in 0..n {
        let mut acc = PolyMatrix::zeros(n, frame.vars());
        for k in 0..n {
            let r_std = conn.gamma[k]
                .mul(&conn.gamma[a])
                .sub(&conn.gamma[a].mul(&conn.gamma[k]))
                .sub(&conn.along(&spec.brackets[k][a]));
            // row k of R_std(E_k, E_a): component k of R_std(E_k,E_a) E_b
            for b in 0..n {
                let v = acc.get(a, b) + r_std.get(k, b);
                acc.set(a, b, v);
            }
        }
        for b in 0..n {
            rho.set(a, b, acc.get(a, b).clone());
        }
    }
    rho
}

/// Nonvanishing residuals of the curvature symmetries, labelled by kind.
pub fn symmetry_residuals(frame: &ParacontactFrame, pkg: &CurvaturePackage) -> Vec<(&'static str, Vec<usize>, Polynomial)> {
    let n = frame.dim();
    let g = frame.metric().to_poly(frame.vars());
    let mut out = Vec::new();
    let mut push = |kind: &'static str, idx: Vec<usize>, p: Polynomial| {
        if !p.is_zero() {
            out.push((kind, idx, p));
        }
    };
    // lowered[i][j][k][l] = g(R(E_i,E_j)E_k, E_l)
    let lowered: Vec<Vec<PolyMatrix>> = (0..n)
        .map(|i| (0..n).map(|j| pkg.riemann[i][j].transpose().mul(&g)).collect())
        .collect();
    let low = |i: usize, j: usize, k: usize, l: usize| lowered[i][j].get(k, l);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let skew = vec_ops::add(&pkg.r_basis(i, j, k), &pkg.r_basis(j, i, k));
                for p in skew {
                    push("antisymmetry", vec![i, j, k], p);
                }
                let bianchi = vec_ops::add(
                    &vec_ops::add(&pkg.r_basis(i, j, k), &pkg.r_basis(j, k, i)),
                    &pkg.r_basis(k, i, j),
                );
                for p in bianchi {
                    push("bianchi", vec![i, j, k], p);
                }
                for l in 0..n {
                    push("skew-lower", vec![i, j, k, l], low(i, j, k, l) + low(i, j, l, k));
                    push("pair-symmetry", vec![i, j, k, l], low(i, j, k, l) - low(k, l, i, j));
                }
            }
        }
    }
    let rho = pkg.ricci();
    for i in 0..n {
        for j in i + 1..n {
            push("ricci-symmetry", vec![i, j], rho.get(i, j) - rho.get(j, i));
        }
    }
    out
}

/// `nabla xi` as a matrix: column `i` is `nabla_{E_i} xi`.
pub fn nabla_xi(frame: &ParacontactFrame, conn: &Connection) -> PolyMatrix {
    let xi = frame.xi();
    let cols: Vec<PolyVec> = (0..frame.dim()).map(|i| conn.nabla(i, &xi)).collect();
    PolyMatrix::from_columns(&cols)
}

/// `sum_ij g^{ij} (nabla_{nabla_{E_i} E_j} V - nabla_{E_i} nabla_{E_j} V)`.
pub fn rough_laplacian(frame: &ParacontactFrame, conn: &Connection, v: &[Polynomial]) -> PolyVec {
    let n = frame.dim();
    let mut acc = vec_ops::zero(n, frame.vars());
    for (i, j, gij) in frame.trace_pairs() {
        let a = conn.nabla_along(&conn.gamma[i].column(j), v);
        let b = conn.nabla(i, &conn.nabla(j, v));
        acc = vec_ops::add(&acc, &vec_ops::scale_rat(&vec_ops::sub(&a, &b), &gij));
    }
    acc
}

/// `sum_ij g^{ij} (nabla_{E_i} T) E_j`.
pub fn divergence_endo(frame: &ParacontactFrame, conn: &Connection, t: &PolyMatrix) -> PolyVec {
    let n = frame.dim();
    let mut acc = vec_ops::zero(n, frame.vars());
    for (i, j, gij) in frame.trace_pairs() {
        let col = conn.nabla_endo(i, t).column(j);
        acc = vec_ops::add(&acc, &vec_ops::scale_rat(&col, &gij));
    }
    acc
}

/// `tr nabla phi = sum_ij g^{ij} (nabla_{E_i} phi) E_j`.
pub fn trace_nabla_phi(frame: &ParacontactFrame, conn: &Connection) -> PolyVec {
    divergence_endo(frame, conn, frame.phi())
}

/// `sum_ij g^{ij} R(nabla_{E_i} xi, xi) E_j`.
pub fn harmonic_map_trace(frame: &ParacontactFrame, conn: &Connection, pkg: &CurvaturePackage) -> PolyVec {
    let n = frame.dim();
    let xi = frame.xi();
    let mut acc = vec_ops::zero(n, frame.vars());
    for (i, j, gij) in frame.trace_pairs() {
        let r = pkg.r(&conn.nabla(i, &xi), &xi, &frame.basis(j));
        acc = vec_ops::add(&acc, &vec_ops::scale_rat(&r, &gij));
    }
    acc
}

/// `(L_xi g)(E_i, E_j) = g(nabla_i xi, E_j) + g(E_i, nabla_j xi)`.
pub fn lie_xi_metric(frame: &ParacontactFrame, conn: &Connection) -> PolyMatrix {
    let g = frame.metric().to_poly(frame.vars());
    let a = g.mul(&nabla_xi(frame, conn));
    // a[j][i] = g(E_j, nabla_i xi)
    a.transpose().add(&a)
}

/// Connection, curvature and frame bundled for one analysis.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub frame: ParacontactFrame,
    pub conn: Connection,
    pub curv: CurvaturePackage,
}

impl Geometry {
    pub fn new(frame: ParacontactFrame) -> Self {
        let conn = levi_civita(&frame);
        let curv = riemann(&frame, &conn);
        Geometry { frame, conn, curv }
    }

    /// `Q xi`.
    pub fn q_xi(&self) -> PolyVec {
        self.curv.ricci_operator.column(self.frame.xi_index())
    }

    /// `rho(xi, xi)`.
    pub fn rho_xi_xi(&self) -> Polynomial {
        let x = self.frame.xi_index();
        self.curv.ricci.get(x, x).clone()
    }

    /// Plain endomorphism trace of `h^2`.
    pub fn tr_h2(&self) -> Polynomial {
        let h = self.frame.h();
        h.mul(h).trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::vec_ops::is_zero as vanishes;
    use crate::frame::tests::{g2, heisenberg};
    use crate::frame::{validate, SignConvention};
    use crate::scalar::{parse_expr, Rational};
    use std::collections::BTreeMap;

    fn geo(spec: crate::frame::FrameSpec) -> Geometry {
        Geometry::new(validate(&spec, SignConvention::CALIBRATED).unwrap())
    }

    #[test]
    fn heisenberg_xi_and_e_are_geodesic() {
        let g = geo(heisenberg());
        assert!(vanishes(&g.conn.nabla(0, &g.frame.basis(0))));
        assert!(vanishes(&g.conn.nabla(1, &g.frame.basis(1))));
    }

    #[test]
    fn heisenberg_laplacian_of_xi() {
        let g = geo(heisenberg());
        let lap = rough_laplacian(&g.frame, &g.conn, &g.frame.xi());
        assert_eq!(lap, vec_ops::scale_rat(&g.frame.xi(), &Rational::from_integer((-2).into())));
        assert!(vanishes(&rough_laplacian(&g.frame, &g.conn, &vec_ops::zero(3, g.frame.vars()))));
    }

    #[test]
    fn connection_is_torsion_free_and_metric() {
        let g = geo(g2());
        assert!(torsion_residuals(&g.frame, &g.conn).is_empty());
        assert!(metric_residuals(&g.frame, &g.conn).is_empty());
        assert!(symmetry_residuals(&g.frame, &g.curv).is_empty());
    }

    #[test]
    fn ricci_agrees_with_standard_convention() {
        let g = geo(g2());
        assert_eq!(&ricci_standard(&g.frame, &g.conn), g.curv.ricci());
    }

    #[test]
    fn g2_ricci_operator() {
        let g = geo(g2());
        let v = g.frame.vars().clone();
        let p = |s: &str| parse_expr(s, &v).unwrap();
        let q = g.curv.ricci_operator();
        assert_eq!(q.get(0, 0), &p("-2-2*gamma^2"));
        assert_eq!(q.get(1, 1), &p("2+2*beta"));
        assert_eq!(q.get(1, 2), &p("2*gamma*(1+beta)"));
        assert_eq!(q.get(2, 1), &p("-2*gamma*(1+beta)"));
    }

    #[test]
    fn identities_on_g2() {
        let g = geo(g2());
        let xi = g.frame.xi();
        let main = vec_ops::add(
            &rough_laplacian(&g.frame, &g.conn, &xi),
            &vec_ops::add(&vec_ops::scale_rat(&xi, &Rational::from_integer(4.into())), &g.q_xi()),
        );
        assert!(vanishes(&main));
        assert_eq!(trace_nabla_phi(&g.frame, &g.conn), vec_ops::scale_rat(&xi, &Rational::from_integer((-2).into())));
        assert!(vanishes(&harmonic_map_trace(&g.frame, &g.conn, &g.curv)));
        assert!(vanishes(&divergence_endo(&g.frame, &g.conn, &PolyMatrix::identity(3, g.frame.vars()))));
    }

    #[test]
    fn flat_specialization() {
        let mut a = BTreeMap::new();
        a.insert("beta".to_string(), Rational::from_integer(2.into()));
        a.insert("gamma".to_string(), Rational::from_integer(0.into()));
        let v = crate::scalar::VarList::new(["beta", "gamma"]);
        let spec = crate::frame::FrameSpec::new("g3", &v, crate::frame::tests::lorentz3(), 0)
            .with_bracket(0, 1, crate::frame::tests::v3(&v, ["0", "0", "-gamma"]))
            .with_bracket(0, 2, crate::frame::tests::v3(&v, ["0", "-beta", "0"]))
            .with_bracket(1, 2, crate::frame::tests::v3(&v, ["2", "0", "0"]))
            .with_phi(crate::frame::tests::phi3())
            .substitute(&a)
            .unwrap();
        let g = geo(spec);
        for i in 0..3 {
            for j in 0..3 {
                assert!(g.curv.r_matrix(i, j).is_zero());
            }
        }
    }

    mod props {
        use super::*;
        use crate::catalog::sample;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]
            #[test]
            fn curvature_symmetries_on_random_instances(
                idx in 0usize..10,
                vals in prop::collection::vec((-5i64..=5, 1i64..=3), 2),
                sign in prop::bool::ANY,
            ) {
                let Some(f) = sample(idx, &vals, sign) else { return Ok(()) };
                let conn = levi_civita(&f);
                prop_assert!(torsion_residuals(&f, &conn).is_empty());
                prop_assert!(metric_residuals(&f, &conn).is_empty());
                let pkg = riemann(&f, &conn);
                prop_assert!(symmetry_residuals(&f, &pkg).is_empty());
                prop_assert_eq!(&ricci_standard(&f, &conn), pkg.ricci());
            }
        }
    }
}

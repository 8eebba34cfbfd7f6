//! Square matrices over rationals and over polynomials.
//!
//! Layout is row-major. As an endomorphism, a matrix `T` acts column-wise:
//! `T(E_j) = sum_i T[i][j] E_i`.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::{Polynomial, Vars};
use super::rational::{format_rational, Rational};
use super::ScalarError;

/// A vector of polynomial components in a fixed frame.
pub type PolyVec = Vec<Polynomial>;

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| format_rational(self.get(i, j))).collect())
            .collect();
        write!(f, "RationalMatrix({rows:?})")
    }
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        RationalMatrix {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ScalarError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ScalarError::DimensionMismatch);
        }
        Ok(RationalMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, ScalarError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = Rational::zero();
                for k in 0..self.n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn determinant(&self) -> Rational {
        let mut a = self.clone();
        let n = self.n;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det *= &p;
            for r in col + 1..n {
                let f = a.get(r, col) / &p;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.n {
            self.data.swap(a * self.n + c, b * self.n + c);
        }
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<RationalMatrix, ScalarError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(ScalarError::Singular)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a.get(col, col).recip();
            for c in 0..n {
                let v = a.get(col, c) * &p;
                a.set(col, c, v);
                let v = inv.get(col, c) * &p;
                inv.set(col, c, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                    let v = inv.get(r, c) - &f * inv.get(col, c);
                    inv.set(r, c, v);
                }
            }
        }
        Ok(inv)
    }

    /// `M v` for a polynomial vector `v`.
    pub fn apply(&self, v: &[Polynomial]) -> PolyVec {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        (0..self.n)
            .map(|i| {
                let mut acc = Polynomial::zero(v[0].vars());
                for (j, vj) in v.iter().enumerate() {
                    let c = self.get(i, j);
                    if !c.is_zero() {
                        acc = &acc + &vj.scale(c);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_poly(&self, vars: &Vars) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|c| Polynomial::constant(vars, c.clone()))
                .collect(),
        }
    }
}

/// Solves `matrix * x = rhs` exactly for a polynomial right-hand side.
pub fn solve_linear(
    matrix: &RationalMatrix,
    rhs: &[Polynomial],
) -> Result<PolyVec, ScalarError> {
    if rhs.len() != matrix.dim() || rhs.is_empty() {
        return Err(ScalarError::DimensionMismatch);
    }
    if rhs.iter().any(|p| !p.compatible(&rhs[0])) {
        return Err(ScalarError::VarMismatch {
            left: rhs[0].vars().names().to_vec(),
            right: rhs
                .iter()
                .find(|p| !p.compatible(&rhs[0]))
                .map(|p| p.vars().names().to_vec())
                .unwrap_or_default(),
        });
    }
    Ok(matrix.inverse()?.apply(rhs))
}

/// Square matrix of polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    n: usize,
    data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(n: usize, vars: &Vars) -> Self {
        PolyMatrix {
            n,
            data: vec![Polynomial::zero(vars); n * n],
        }
    }

    pub fn identity(n: usize, vars: &Vars) -> Self {
        let mut m = Self::zeros(n, vars);
        for i in 0..n {
            m.set(i, i, Polynomial::one(vars));
        }
        m
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[PolyVec]) -> Self {
        let n = columns.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for col in columns {
                data.push(col[i].clone());
            }
        }
        PolyMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Result<Self, ScalarError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ScalarError::DimensionMismatch);
        }
        Ok(PolyMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Polynomial) {
        self.data[i * self.n + j] = v;
    }

    pub fn column(&self, j: usize) -> PolyVec {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Polynomial>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Polynomial> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Polynomial::is_zero)
    }

    pub fn apply(&self, v: &[Polynomial]) -> PolyVec {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        (0..self.n)
            .map(|i| {
                let mut acc = Polynomial::zero(v[0].vars());
                for (j, vj) in v.iter().enumerate() {
                    let c = self.get(i, j);
                    if !c.is_zero() && !vj.is_zero() {
                        acc = &acc + &(c * vj);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        let cols: Vec<PolyVec> = (0..self.n).map(|j| self.apply(&other.column(j))).collect();
        PolyMatrix::from_columns(&cols)
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            data: self.data.iter().map(|p| -p).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            data: self.data.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &PolyMatrix, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> PolyMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        PolyMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn trace(&self) -> Polynomial {
        let mut acc = Polynomial::zero(self.data[0].vars());
        for i in 0..self.n {
            acc = &acc + self.get(i, i);
        }
        acc
    }
}

/// Component-wise helpers for [`PolyVec`].
pub mod vec_ops {
    use super::*;

    pub fn zero(n: usize, vars: &Vars) -> PolyVec {
        vec![Polynomial::zero(vars); n]
    }

    /// The frame vector `E_i`.
    pub fn basis(n: usize, i: usize, vars: &Vars) -> PolyVec {
        let mut v = zero(n, vars);
        v[i] = Polynomial::one(vars);
        v
    }

    pub fn add(a: &[Polynomial], b: &[Polynomial]) -> PolyVec {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[Polynomial], b: &[Polynomial]) -> PolyVec {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(a: &[Polynomial], c: &Polynomial) -> PolyVec {
        a.iter().map(|x| x * c).collect()
    }

    pub fn scale_rat(a: &[Polynomial], c: &Rational) -> PolyVec {
        a.iter().map(|x| x.scale(c)).collect()
    }

    pub fn neg(a: &[Polynomial]) -> PolyVec {
        a.iter().map(|x| -x).collect()
    }

    pub fn is_zero(a: &[Polynomial]) -> bool {
        a.iter().all(Polynomial::is_zero)
    }

    /// `sum_i c_i v_i` with polynomial coefficients.
    pub fn combine<'a, I>(n: usize, vars: &Vars, terms: I) -> PolyVec
    where
        I: IntoIterator<Item = (&'a Polynomial, &'a PolyVec)>,
    {
        let mut acc = zero(n, vars);
        for (c, v) in terms {
            if c.is_zero() {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(v) {
                if !x.is_zero() {
                    *a = &*a + &(c * x);
                }
            }
        }
        acc
    }
}

//! Golden comparison for catalog entries.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::{CatalogEntry, CatalogError, CurvatureConvention, FlagGolden, Goldens};
use crate::classify::{classify, Classification, Mu, Verdict};
use crate::curvature::Geometry;
use crate::frame::file::rational_matrix;
use crate::frame::{compute_h, validate, FrameSpec, SignConvention};
use crate::scalar::{format_rational, parse_expr, vec_ops, Polynomial, Rational, Vars};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Match,
    /// Disagrees exactly as recorded in the entry's errata.
    Erratum { note: String },
    /// Disagrees; `counterexample` is a parameter point where the values differ.
    Mismatch {
        #[serde(skip_serializing_if = "Option::is_none")]
        counterexample: Option<BTreeMap<String, String>>,
    },
    /// An erratum that no longer describes a disagreement.
    StaleErratum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub field: String,
    pub expected: String,
    pub got: String,
    #[serde(flatten)]
    pub status: Status,
}

impl Comparison {
    /// Equal to the printed golden, errata ignored.
    pub fn agrees(&self) -> bool {
        self.status == Status::Match
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenReport {
    pub id: String,
    pub comparisons: Vec<Comparison>,
}

impl GoldenReport {
    /// No unexplained mismatch and no stale erratum.
    pub fn ok(&self) -> bool {
        self.comparisons
            .iter()
            .all(|c| matches!(c.status, Status::Match | Status::Erratum { .. }))
    }

    pub fn get(&self, field: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.field == field)
    }

    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Comparison> + 'a {
        self.comparisons.iter().filter(move |c| c.field.starts_with(prefix))
    }
}

/// Compared value. Polynomials compare exactly; other values as text.
#[derive(Clone, Debug)]
enum Value {
    Poly(Polynomial),
    Flag(Verdict),
    Text(String),
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Poly(p) => p.to_string(),
            Value::Flag(v) => flag_text(v),
            Value::Text(s) => s.clone(),
        }
    }
}

fn flag_text(v: &Verdict) -> String {
    match v {
        Verdict::HoldsIff(c) => {
            let eqs: Vec<String> = c.equations().iter().map(|p| p.to_string()).collect();
            format!("iff {}", eqs.join(", "))
        }
        other => other.tag().to_string(),
    }
}

struct Ctx<'a> {
    vars: &'a Vars,
    nonzero: &'a [Polynomial],
}

impl Ctx<'_> {
    fn poly(&self, text: &str) -> Result<Polynomial, CatalogError> {
        parse_expr(text, self.vars).map_err(|error| CatalogError::Expr {
            text: text.to_string(),
            error,
        })
    }

    /// Reads the textual form used in goldens and errata.
    fn parse_like(&self, text: &str, like: &Value) -> Result<Value, CatalogError> {
        Ok(match like {
            Value::Poly(_) => Value::Poly(self.poly(text)?),
            Value::Flag(_) => Value::Flag(self.flag(text)?),
            Value::Text(_) => Value::Text(text.to_string()),
        })
    }

    fn flag(&self, text: &str) -> Result<Verdict, CatalogError> {
        match text.trim() {
            "holds" => Ok(Verdict::Holds),
            "fails" => Ok(Verdict::Fails),
            t => {
                let rest = t.strip_prefix("iff ").ok_or_else(|| CatalogError::Malformed {
                    id: String::new(),
                    msg: format!("bad flag value '{t}'"),
                })?;
                let eqs = rest.split(',').map(|s| self.poly(s)).collect::<Result<Vec<_>, _>>()?;
                Ok(Verdict::from_residuals(self.vars, eqs, self.nonzero))
            }
        }
    }

    fn flag_golden(&self, g: &FlagGolden) -> Result<Verdict, CatalogError> {
        match g {
            FlagGolden::Plain(s) => self.flag(s),
            FlagGolden::Iff { iff } => {
                let eqs = iff.iter().map(|s| self.poly(s)).collect::<Result<Vec<_>, _>>()?;
                Ok(Verdict::from_residuals(self.vars, eqs, self.nonzero))
            }
        }
    }

    fn same(&self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => x == y,
            (Value::Flag(x), Value::Flag(y)) => x.same_locus(y),
            (Value::Text(x), Value::Text(y)) => x == y,
            _ => false,
        }
    }

    fn counterexample(&self, a: &Value, b: &Value) -> Option<BTreeMap<String, String>> {
        let (Value::Poly(x), Value::Poly(y)) = (a, b) else {
            return None;
        };
        find_counterexample(&(x - y), self.nonzero).map(|m| {
            m.into_iter().map(|(k, v)| (k, format_rational(&v))).collect()
        })
    }
}

const TRIAL: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (1, 2)];

/// A small rational point, respecting the nonzero constraints and `eps = +-1`,
/// where `p` does not vanish.
pub fn find_counterexample(p: &Polynomial, nonzero: &[Polynomial]) -> Option<BTreeMap<String, Rational>> {
    if p.is_zero() {
        return None;
    }
    let vars = p.vars();
    let names = vars.names();
    let choices: Vec<Vec<Rational>> = (0..names.len())
        .map(|i| {
            if vars.is_involutive(i) {
                vec![Rational::from_integer(1.into()), Rational::from_integer((-1).into())]
            } else {
                TRIAL.iter().map(|&(a, b)| Rational::new(a.into(), b.into())).collect()
            }
        })
        .collect();
    let mut idx = vec![0usize; names.len()];
    loop {
        let point: BTreeMap<String, Rational> = names
            .iter()
            .zip(&idx)
            .enumerate()
            .map(|(v, (n, &k))| (n.clone(), choices[v][k].clone()))
            .collect();
        let allowed = nonzero.iter().all(|c| c.eval(&point).is_some_and(|x| !x.is_zero()));
        if allowed && p.eval(&point).is_some_and(|x| !x.is_zero()) {
            return Some(point);
        }
        let mut v = 0;
        loop {
            if v == idx.len() {
                return None;
            }
            idx[v] += 1;
            if idx[v] < choices[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

struct Collector<'a> {
    ctx: Ctx<'a>,
    entry: &'a CatalogEntry,
    out: Vec<Comparison>,
    used: Vec<bool>,
}

impl Collector<'_> {
    fn compare(&mut self, field: String, expected: Value, got: Value) -> Result<(), CatalogError> {
        let errata = self.entry.errata.iter().enumerate().filter(|(_, e)| e.field == field);
        let mut pinned = None;
        for (k, e) in errata {
            self.used[k] = true;
            let printed = self.ctx.parse_like(&e.printed, &expected)?;
            let engine = self.ctx.parse_like(&e.engine, &got)?;
            if self.ctx.same(&printed, &expected) && self.ctx.same(&engine, &got) {
                pinned = Some(e.note.clone());
            }
        }
        let status = if self.ctx.same(&expected, &got) {
            if self.entry.errata.iter().any(|e| e.field == field) {
                Status::StaleErratum
            } else {
                Status::Match
            }
        } else if let Some(note) = pinned {
            Status::Erratum { note }
        } else {
            Status::Mismatch { counterexample: self.ctx.counterexample(&expected, &got) }
        };
        self.out.push(Comparison { field, expected: expected.text(), got: got.text(), status });
        Ok(())
    }
}

/// Compares every golden of `entry` against the engine.
pub fn verify_goldens(entry: &CatalogEntry, conv: SignConvention) -> Result<GoldenReport, CatalogError> {
    let frame = validate(&entry.spec, conv)?;
    let geo = Geometry::new(frame);
    let cls = classify(&geo).map_err(|e| CatalogError::Malformed { id: entry.id.clone(), msg: e.to_string() })?;
    let mut c = Collector {
        ctx: Ctx { vars: &entry.spec.vars, nonzero: &entry.spec.nonzero },
        entry,
        out: Vec::new(),
        used: vec![false; entry.errata.len()],
    };
    compare_all(&mut c, &entry.goldens, &geo, &cls)?;
    for (k, e) in entry.errata.iter().enumerate() {
        if !c.used[k] {
            c.out.push(Comparison {
                field: e.field.clone(),
                expected: e.printed.clone(),
                got: String::new(),
                status: Status::StaleErratum,
            });
        }
    }
    Ok(GoldenReport { id: entry.id.clone(), comparisons: c.out })
}

fn compare_all(c: &mut Collector, g: &Goldens, geo: &Geometry, cls: &Classification) -> Result<(), CatalogError> {
    let f = &geo.frame;
    let n = f.dim();
    let malformed = |msg: String| CatalogError::Malformed { id: c.entry.id.clone(), msg };

    if let Some(hg) = &g.h {
        let h = match &hg.phi {
            Some(rows) => {
                let phi = rational_matrix("goldens.h.phi", rows, n)
                    .map_err(|e| malformed(e.to_string()))?;
                compute_h(&FrameSpec::clone(f.spec()).with_phi(phi))
            }
            None => f.h().clone(),
        };
        for (&j, col) in &hg.columns {
            if j >= n || col.len() != n {
                return Err(malformed(format!("h column {j} has the wrong shape")));
            }
            for (i, text) in col.iter().enumerate() {
                let expected = Value::Poly(c.ctx.poly(text)?);
                c.compare(format!("h[{i}][{j}]"), expected, Value::Poly(h.get(i, j).clone()))?;
            }
        }
    }
    if let Some(b) = g.h_nonzero {
        c.compare("h_nonzero".into(), Value::Text(b.to_string()), Value::Text((!f.h().is_zero()).to_string()))?;
    }
    if let Some(b) = g.h_squared_zero {
        let h2 = f.h().mul(f.h()).is_zero();
        c.compare("h_squared_zero".into(), Value::Text(b.to_string()), Value::Text(h2.to_string()))?;
    }
    if let Some(q) = &g.q {
        if q.len() != n || q.iter().any(|r| r.len() != n) {
            return Err(malformed("Q has the wrong shape".into()));
        }
        let qe = geo.curv.ricci_operator();
        for (i, row) in q.iter().enumerate() {
            for (j, text) in row.iter().enumerate() {
                let expected = Value::Poly(c.ctx.poly(text)?);
                c.compare(format!("Q[{i}][{j}]"), expected, Value::Poly(qe.get(i, j).clone()))?;
            }
        }
    }
    for r in &g.r_table {
        if r.x >= n || r.y >= n || r.z >= n || r.value.len() != n {
            return Err(malformed("r_table entry has the wrong shape".into()));
        }
        let mut v = geo.curv.r(&f.basis(r.x), &f.basis(r.y), &f.basis(r.z));
        if r.convention == CurvatureConvention::Standard {
            v = vec_ops::neg(&v);
        }
        for (k, text) in r.value.iter().enumerate() {
            let expected = Value::Poly(c.ctx.poly(text)?);
            c.compare(format!("R({},{}){}[{k}]", r.x, r.y, r.z), expected, Value::Poly(v[k].clone()))?;
        }
    }
    let flags = cls.flags();
    for (name, golden) in &g.flags {
        let (_, verdict) = flags
            .iter()
            .find(|(k, _)| k == name)
            .ok_or_else(|| malformed(format!("unknown flag '{name}'")))?;
        let expected = Value::Flag(c.ctx.flag_golden(golden)?);
        c.compare(format!("flags.{name}"), expected, Value::Flag((*verdict).clone()))?;
    }
    for (name, text) in &g.fitted {
        let fitted = &cls.fitted;
        let got = match name.as_str() {
            "kappa" => fitted.kappa.clone().map(Value::Poly),
            "mu" => match &fitted.mu {
                Some(Mu::Value(p)) => Some(Value::Poly(p.clone())),
                Some(Mu::Unconstrained) => Some(Value::Text("unconstrained".into())),
                None => None,
            },
            "a" => fitted.a.clone().map(Value::Poly),
            "b" => fitted.b.clone().map(Value::Poly),
            "lambda" => fitted.lambda.clone().map(Value::Poly),
            _ => return Err(malformed(format!("unknown fitted value '{name}'"))),
        }
        .unwrap_or_else(|| Value::Text("none".into()));
        let expected = match c.ctx.poly(text) {
            Ok(p) => Value::Poly(p),
            Err(_) => Value::Text(text.clone()),
        };
        c.compare(format!("fitted.{name}"), expected, got)?;
    }
    Ok(())
}

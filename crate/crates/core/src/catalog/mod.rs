//! Built-in frame families with golden data.
//!
//! Each entry is a JSON file under `catalog/`: either a full frame file
//! (`frame`) or a specialization of another entry (`base` + `assign`, where
//! assigned values are expressions in the base parameters). `goldens` holds
//! expected values as printed in the source tables; `errata` pins every
//! golden that the engine is known to disagree with, printed and computed
//! value both given exactly.

pub mod verify;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use crate::frame::file::{FrameFile, FrameFileError, NumText};
use crate::frame::{validate, FrameError, FrameSpec, ParacontactFrame, SignConvention};
use crate::scalar::{parse_expr, ParseError, Polynomial, Rational, VarList};

pub use verify::{verify_goldens, Comparison, GoldenReport, Status};

const SOURCES: &[(&str, &str)] = &[
    ("g2", include_str!("../../catalog/g2.json")),
    ("g3", include_str!("../../catalog/g3.json")),
    ("g4", include_str!("../../catalog/g4.json")),
    ("g5g6", include_str!("../../catalog/g5g6.json")),
    ("g7", include_str!("../../catalog/g7.json")),
    ("km5d", include_str!("../../catalog/km5d.json")),
    ("heisenberg", include_str!("../../catalog/heisenberg.json")),
    ("flat_e2", include_str!("../../catalog/flat_e2.json")),
    ("hyp3", include_str!("../../catalog/hyp3.json")),
    ("eq4_nonsasakian", include_str!("../../catalog/eq4_nonsasakian.json")),
];

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum FlagGolden {
    /// `"holds"` or `"fails"`.
    Plain(String),
    /// Holds exactly on the common zero set of the listed expressions.
    Iff { iff: Vec<String> },
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureConvention {
    /// `R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y]`, as the engine computes.
    Engine,
    /// `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`.
    Standard,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
pub struct RTableEntry {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    /// Components of `R(E_x, E_y) E_z`.
    pub value: Vec<String>,
    pub convention: CurvatureConvention,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
pub struct HGolden {
    /// The phi under which the action is stated; the entry's phi if absent.
    #[serde(default)]
    pub phi: Option<Vec<Vec<NumText>>>,
    /// Column `j` is `h E_j`.
    pub columns: BTreeMap<usize, Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Goldens {
    #[serde(default)]
    pub h: Option<HGolden>,
    #[serde(default)]
    pub h_nonzero: Option<bool>,
    #[serde(default)]
    pub h_squared_zero: Option<bool>,
    #[serde(default, rename = "Q")]
    pub q: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub r_table: Vec<RTableEntry>,
    #[serde(default)]
    pub flags: BTreeMap<String, FlagGolden>,
    /// `kappa`, `mu` (or `"unconstrained"`), `a`, `b`, `lambda`.
    #[serde(default)]
    pub fitted: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
pub struct Erratum {
    /// Golden field path as reported by verification, e.g. `Q[1][1]`.
    pub field: String,
    pub printed: String,
    pub engine: String,
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    id: String,
    description: String,
    #[serde(default)]
    frame: Option<FrameFile>,
    #[serde(default)]
    base: Option<String>,
    #[serde(default)]
    assign: BTreeMap<String, String>,
    #[serde(default)]
    goldens: Goldens,
    #[serde(default)]
    errata: Vec<Erratum>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub base: Option<String>,
    /// Symbolic family, specialization applied.
    pub spec: FrameSpec,
    pub goldens: Goldens,
    pub errata: Vec<Erratum>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("entry '{id}' is malformed: {msg}")]
    Malformed { id: String, msg: String },
    #[error("entry '{id}': {source}")]
    Frame { id: String, source: FrameFileError },
    #[error("'{name}' is not a parameter of '{id}'")]
    UnknownParameter { id: String, name: String },
    #[error("constraint violated: {0} = 0")]
    ConstraintViolation(String),
    #[error("eps must be +1 or -1")]
    EpsOutOfRange,
    #[error("validation failed: {0}")]
    Validation(#[from] FrameError),
    #[error("cannot parse '{text}': {error}")]
    Expr { text: String, error: ParseError },
}

fn build(files: &[EntryFile]) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out: Vec<CatalogEntry> = Vec::new();
    for f in files {
        let malformed = |msg: &str| CatalogError::Malformed { id: f.id.clone(), msg: msg.into() };
        let spec = match (&f.frame, &f.base) {
            (Some(frame), None) => frame
                .to_spec(SignConvention::CALIBRATED)
                .map_err(|source| CatalogError::Frame { id: f.id.clone(), source })?,
            (None, Some(base)) => {
                let b = out
                    .iter()
                    .find(|e| &e.id == base)
                    .ok_or_else(|| malformed("base must precede the specialization"))?;
                let mut spec = specialize(&b.spec, &f.assign, &f.id)?;
                spec.label = f.id.clone();
                spec
            }
            _ => return Err(malformed("exactly one of frame or base is required")),
        };
        out.push(CatalogEntry {
            id: f.id.clone(),
            description: f.description.clone(),
            base: f.base.clone(),
            spec,
            goldens: f.goldens.clone(),
            errata: f.errata.clone(),
        });
    }
    Ok(out)
}

/// Replaces parameters by expressions in the same parameter list.
fn specialize(spec: &FrameSpec, assign: &BTreeMap<String, String>, id: &str) -> Result<FrameSpec, CatalogError> {
    let mut out = spec.clone();
    for (name, text) in assign {
        let idx = spec.vars.index_of(name).ok_or_else(|| CatalogError::UnknownParameter {
            id: id.into(),
            name: name.clone(),
        })?;
        let value = parse_expr(text, &spec.vars).map_err(|error| CatalogError::Expr {
            text: text.clone(),
            error,
        })?;
        let sub = |p: &Polynomial| p.compose(idx, &value);
        for row in out.brackets.iter_mut() {
            for v in row.iter_mut() {
                *v = v.iter().map(sub).collect();
            }
        }
        out.nonzero = out.nonzero.iter().map(sub).collect();
    }
    if let Some(k) = out.violated_constraints().first() {
        return Err(CatalogError::ConstraintViolation(k.to_string()));
    }
    Ok(drop_unused_params(out))
}

/// Restricts the parameter list to the variables still occurring.
fn drop_unused_params(mut spec: FrameSpec) -> FrameSpec {
    let mut used = vec![false; spec.vars.len()];
    let polys = spec.brackets.iter().flatten().flatten().chain(&spec.nonzero);
    for p in polys {
        for i in p.support() {
            used[i] = true;
        }
    }
    let names = spec.vars.names().iter().zip(&used).filter(|(_, u)| **u).map(|(n, _)| n.clone());
    let vars = VarList::new(names);
    let lift = |p: &Polynomial| p.lift(&vars).expect("occurring variables kept");
    for row in spec.brackets.iter_mut() {
        for v in row.iter_mut() {
            *v = v.iter().map(lift).collect();
        }
    }
    spec.nonzero = spec.nonzero.iter().map(lift).collect();
    spec.vars = vars;
    spec
}

fn entries_result() -> &'static Result<Vec<CatalogEntry>, String> {
    static CELL: OnceLock<Result<Vec<CatalogEntry>, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let files: Vec<EntryFile> = SOURCES
            .iter()
            .map(|(id, text)| serde_json::from_str(text).map_err(|e| format!("{id}: {e}")))
            .collect::<Result<_, _>>()?;
        build(&files).map_err(|e| e.to_string())
    })
}

/// All entries in catalog order. Panics if the embedded data is malformed,
/// which the test suite rules out.
pub fn entries() -> &'static [CatalogEntry] {
    match entries_result() {
        Ok(v) => v,
        Err(e) => panic!("embedded catalog is malformed: {e}"),
    }
}

/// `(id, description)` in stable order.
pub fn list_entries() -> Vec<(&'static str, &'static str)> {
    entries().iter().map(|e| (e.id.as_str(), e.description.as_str())).collect()
}

pub fn get(id: &str) -> Result<&'static CatalogEntry, CatalogError> {
    entries()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| CatalogError::UnknownEntry(id.to_string()))
}

impl CatalogEntry {
    /// The family with the given parameters fixed.
    pub fn specialize(&self, assignment: &BTreeMap<String, Rational>) -> Result<FrameSpec, CatalogError> {
        for (name, value) in assignment {
            let idx = self.spec.vars.index_of(name).ok_or_else(|| CatalogError::UnknownParameter {
                id: self.id.clone(),
                name: name.clone(),
            })?;
            if self.spec.vars.is_involutive(idx) && value.clone() * value.clone() != Rational::from_integer(1.into()) {
                return Err(CatalogError::EpsOutOfRange);
            }
        }
        let spec = self.spec.substitute(assignment).expect("names checked");
        if let Some(k) = spec.violated_constraints().first() {
            return Err(CatalogError::ConstraintViolation(k.to_string()));
        }
        // a constraint can vanish at the point without vanishing identically
        for (k, orig) in spec.nonzero.iter().zip(&self.spec.nonzero) {
            if k.constant_value().is_some_and(|c| c == Rational::from_integer(0.into())) {
                return Err(CatalogError::ConstraintViolation(orig.to_string()));
            }
        }
        Ok(spec)
    }

    pub fn instantiate(
        &self,
        assignment: &BTreeMap<String, Rational>,
        conv: SignConvention,
    ) -> Result<ParacontactFrame, CatalogError> {
        Ok(validate(&self.specialize(assignment)?, conv)?)
    }

    /// Parameter names; `eps` only takes the values +1 and -1.
    pub fn params(&self) -> &[String] {
        self.spec.vars.names()
    }

    pub fn frame_file(&self) -> FrameFile {
        FrameFile::from_spec(&self.spec)
    }
}

pub fn instantiate(
    id: &str,
    assignment: &BTreeMap<String, Rational>,
    conv: SignConvention,
) -> Result<ParacontactFrame, CatalogError> {
    get(id)?.instantiate(assignment, conv)
}

/// A constraint-satisfying instance of entry `idx` built from small
/// rationals, or `None` when the values hit a constraint.
#[cfg(test)]
pub(crate) fn sample(idx: usize, vals: &[(i64, i64)], eps_positive: bool) -> Option<ParacontactFrame> {
    let e = &entries()[idx % entries().len()];
    let assignment: BTreeMap<String, Rational> = e
        .params()
        .iter()
        .zip(vals.iter().cycle())
        .map(|(n, &(a, b))| {
            let v = if n == "eps" {
                Rational::from_integer(if eps_positive { 1 } else { -1 }.into())
            } else {
                Rational::new(a.into(), b.into())
            };
            (n.clone(), v)
        })
        .collect();
    match e.instantiate(&assignment, SignConvention::CALIBRATED) {
        Ok(f) => Some(f),
        Err(CatalogError::ConstraintViolation(_)) => None,
        Err(other) => panic!("{}: {other}", e.id),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn assign(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), int(*v))).collect()
    }

    #[test]
    fn catalog_loads_in_order() {
        let ids: Vec<_> = list_entries().into_iter().map(|(id, _)| id).collect();
        assert_eq!(
            ids,
            ["g2", "g3", "g4", "g5g6", "g7", "km5d", "heisenberg", "flat_e2", "hyp3", "eq4_nonsasakian"]
        );
    }

    #[test]
    fn g3_at_origin_is_heisenberg() {
        let f = instantiate("g3", &assign(&[("beta", 0), ("gamma", 0)]), SignConvention::CALIBRATED).unwrap();
        let h = get("heisenberg").unwrap();
        assert_eq!(FrameFile::from_spec(f.spec()).brackets, h.frame_file().brackets);
        assert!(h.spec.vars.is_empty());
        assert!(f.h().is_zero());
    }

    #[test]
    fn every_entry_matches_its_goldens() {
        for e in entries() {
            let r = verify_goldens(e, SignConvention::CALIBRATED).unwrap();
            assert!(r.ok(), "{}: {:?}", e.id, r.comparisons.iter().filter(|c| !c.agrees()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stored_phi_is_the_inferred_one() {
        for e in entries() {
            let candidates = crate::frame::infer_phi(&e.spec, &e.spec.pairing, SignConvention::CALIBRATED).unwrap();
            assert_eq!(candidates[0], e.spec.phi, "{}", e.id);
        }
    }

    #[test]
    fn shipped_frame_files_match_the_catalog() {
        let files = [
            ("heisenberg", include_str!("../../examples/frames/heisenberg.json")),
            ("g2", include_str!("../../examples/frames/g2.json")),
            ("g3", include_str!("../../examples/frames/g3.json")),
            ("g4", include_str!("../../examples/frames/g4.json")),
            ("g5g6", include_str!("../../examples/frames/g5g6.json")),
            ("g7", include_str!("../../examples/frames/g7.json")),
            ("km5d", include_str!("../../examples/frames/km5d.json")),
        ];
        for (id, text) in files {
            assert_eq!(FrameFile::from_json(text).unwrap(), get(id).unwrap().frame_file(), "{id}");
        }
    }

    #[test]
    fn errata_are_exact_pins() {
        let g2 = verify_goldens(get("g2").unwrap(), SignConvention::CALIBRATED).unwrap();
        let c = g2.get("Q[1][1]").unwrap();
        assert!(matches!(c.status, Status::Erratum { .. }));
        assert_eq!(c.got, "2*beta + 2");
        // without the pin the same golden is a mismatch with a witness point
        let mut entry = get("g2").unwrap().clone();
        entry.errata.retain(|e| e.field != "Q[1][1]");
        let r = verify_goldens(&entry, SignConvention::CALIBRATED).unwrap();
        assert!(!r.ok());
        match &r.get("Q[1][1]").unwrap().status {
            Status::Mismatch { counterexample: Some(pt) } => assert_eq!(pt["beta"], "1"),
            other => panic!("{other:?}"),
        }
        // a pin on an agreeing field is stale
        let mut entry = get("g3").unwrap().clone();
        entry.errata.push(Erratum {
            field: "Q[0][0]".into(),
            printed: "0".into(),
            engine: "0".into(),
            note: String::new(),
        });
        assert!(!verify_goldens(&entry, SignConvention::CALIBRATED).unwrap().ok());
    }

    #[test]
    fn g2_rejects_gamma_zero() {
        let e = instantiate("g2", &assign(&[("gamma", 0)]), SignConvention::CALIBRATED).unwrap_err();
        assert!(matches!(e, CatalogError::ConstraintViolation(_)));
        assert!(matches!(
            instantiate("g4", &assign(&[("eps", 2)]), SignConvention::CALIBRATED),
            Err(CatalogError::EpsOutOfRange)
        ));
        assert!(matches!(
            instantiate("g2", &assign(&[("delta", 1)]), SignConvention::CALIBRATED),
            Err(CatalogError::UnknownParameter { .. })
        ));
    }

    mod props {
        use super::*;
        use crate::scalar::rat;
        use proptest::prelude::*;

        fn values() -> impl Strategy<Value = Vec<(i64, i64)>> {
            prop::collection::vec((-5i64..=5, 1i64..=3), 3)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn random_instances_validate(idx in 0usize..10, vals in values(), sign in prop::bool::ANY) {
                let e = &entries()[idx];
                let assignment: BTreeMap<String, Rational> = e
                    .params()
                    .iter()
                    .zip(&vals)
                    .map(|(n, &(a, b))| {
                        let v = if n == "eps" { int(if sign { 1 } else { -1 }) } else { rat(a, b) };
                        (n.clone(), v)
                    })
                    .collect();
                match e.instantiate(&assignment, SignConvention::CALIBRATED) {
                    Ok(f) => prop_assert!(f.vars().names().iter().all(|n| assignment.contains_key(n))),
                    Err(CatalogError::ConstraintViolation(_)) => {
                        prop_assert!(e.spec.nonzero.iter().any(|k| k.eval(&assignment) == Some(int(0))));
                    }
                    Err(other) => prop_assert!(false, "{}: {other}", e.id),
                }
            }
        }
    }
}

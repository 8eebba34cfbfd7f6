//! JSON frame files.
//!
//! ```json
//! {
//!   "label": "heisenberg",
//!   "dim": 3,
//!   "params": [],
//!   "brackets": [{"i": 1, "j": 2, "coeffs": {"0": "2"}}],
//!   "metric": [["1","0","0"],["0","1","0"],["0","0","-1"]],
//!   "xi_index": 0,
//!   "pairing": [[1, 2]]
//! }
//! ```
//!
//! `phi` may be omitted when `pairing` is present; it is then inferred.
//! `nonzero` lists parameter expressions that must not vanish.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{infer_phi, FrameError, FrameSpec, SignConvention};
use crate::scalar::{
    format_rational, parse_expr, parse_rational, vec_ops, ParseError, Rational, RationalMatrix,
    VarList,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumText {
    Int(i64),
    Text(String),
}

impl NumText {
    fn as_text(&self) -> String {
        match self {
            NumText::Int(i) => i.to_string(),
            NumText::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<usize, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub label: String,
    pub dim: usize,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nonzero: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    pub metric: Vec<Vec<NumText>>,
    pub xi_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<NumText>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairing: Vec<[usize; 2]>,
}

#[derive(Debug, Error)]
pub enum FrameFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: cannot parse '{text}': {error}")]
    Expr { field: String, text: String, error: ParseError },
    #[error("{field}: '{text}' is not a rational")]
    Number { field: String, text: String },
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Phi(#[from] FrameError),
}

pub(crate) fn rational_matrix(field: &str, rows: &[Vec<NumText>], dim: usize) -> Result<RationalMatrix, FrameFileError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(FrameFileError::Structure(format!("{field} must be {dim}x{dim}")));
    }
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, x)| {
                    let text = x.as_text();
                    parse_rational(&text).ok_or_else(|| FrameFileError::Number {
                        field: format!("{field}[{i}][{j}]"),
                        text,
                    })
                })
                .collect::<Result<Vec<Rational>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    RationalMatrix::from_rows(parsed).map_err(|e| FrameFileError::Structure(e.to_string()))
}

fn text_matrix(m: &RationalMatrix) -> Vec<Vec<NumText>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|x| NumText::Text(format_rational(x))).collect())
        .collect()
}

impl FrameFile {
    pub fn from_json(text: &str) -> Result<Self, FrameFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, FrameFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| FrameFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("frame file serializes")
    }

    /// Builds the spec; phi is inferred from `pairing` when absent (first
    /// passing sign pattern).
    pub fn to_spec(&self, conv: SignConvention) -> Result<FrameSpec, FrameFileError> {
        let dim = self.dim;
        let structure = |m: String| FrameFileError::Structure(m);
        let mut names = self.params.clone();
        names.sort();
        names.dedup();
        if names.len() != self.params.len() {
            return Err(structure("duplicate parameter name".into()));
        }
        if let Some(bad) = self
            .params
            .iter()
            .find(|p| !p.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                || !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
        {
            return Err(structure(format!("invalid parameter name '{bad}'")));
        }
        let vars = VarList::new(self.params.iter().cloned());
        let metric = rational_matrix("metric", &self.metric, dim)?;
        if self.xi_index >= dim {
            return Err(structure(format!("xi_index {} out of range", self.xi_index)));
        }
        let mut spec = FrameSpec::new(self.label.clone(), &vars, metric, self.xi_index);
        let mut seen = std::collections::BTreeSet::new();
        for (n, b) in self.brackets.iter().enumerate() {
            if b.i >= dim || b.j >= dim || b.i == b.j {
                return Err(structure(format!("brackets[{n}]: bad index pair ({}, {})", b.i, b.j)));
            }
            if !seen.insert((b.i.min(b.j), b.i.max(b.j))) {
                return Err(structure(format!("brackets[{n}]: pair ({}, {}) listed twice", b.i, b.j)));
            }
            let mut v = vec_ops::zero(dim, &vars);
            for (&k, text) in &b.coeffs {
                if k >= dim {
                    return Err(structure(format!("brackets[{n}]: component {k} out of range")));
                }
                v[k] = parse_expr(text, &vars).map_err(|error| FrameFileError::Expr {
                    field: format!("brackets[{n}].coeffs.{k}"),
                    text: text.clone(),
                    error,
                })?;
            }
            spec.set_bracket(b.i, b.j, v);
        }
        spec.nonzero = self
            .nonzero
            .iter()
            .enumerate()
            .map(|(n, text)| {
                parse_expr(text, &vars).map_err(|error| FrameFileError::Expr {
                    field: format!("nonzero[{n}]"),
                    text: text.clone(),
                    error,
                })
            })
            .collect::<Result<_, _>>()?;
        spec.pairing = self.pairing.iter().map(|p| (p[0], p[1])).collect();
        spec.phi = match &self.phi {
            Some(rows) => rational_matrix("phi", rows, dim)?,
            None if !spec.pairing.is_empty() => {
                infer_phi(&spec, &spec.pairing, conv)?.swap_remove(0)
            }
            None => return Err(structure("either phi or pairing is required".into())),
        };
        Ok(spec)
    }

    pub fn from_spec(spec: &FrameSpec) -> Self {
        let n = spec.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let coeffs: BTreeMap<usize, String> = spec.brackets[i][j]
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(k, p)| (k, p.to_string()))
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        FrameFile {
            label: spec.label.clone(),
            dim: n,
            params: spec.vars.names().to_vec(),
            nonzero: spec.nonzero.iter().map(|p| p.to_string()).collect(),
            brackets,
            metric: text_matrix(&spec.metric),
            xi_index: spec.xi_index,
            phi: Some(text_matrix(&spec.phi)),
            pairing: spec.pairing.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

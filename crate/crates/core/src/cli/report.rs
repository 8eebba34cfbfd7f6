//! Serializable reports and their text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::identities::{identity_suite, Kind};
use crate::classify::{classify, is_iht, ClassifyError, Classification, Mu, Verdict};
use crate::curvature::Geometry;
use crate::frame::{ParacontactFrame, SignConvention};
use crate::scalar::{format_rational, PolyMatrix, Polynomial, Rational};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ConventionRecord {
    pub d_eta_sign: i8,
    pub curvature: &'static str,
}

impl From<SignConvention> for ConventionRecord {
    fn from(c: SignConvention) -> Self {
        ConventionRecord { d_eta_sign: c.d_eta_sign(), curvature: SignConvention::CURVATURE }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationRecord {
    pub valid: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRecord {
    pub id: &'static str,
    pub kind: &'static str,
    pub passed: bool,
    pub residuals: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FittedRecord {
    pub a: Option<String>,
    pub b: Option<String>,
    pub kappa: Option<String>,
    pub mu: Option<String>,
    pub lambda: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KmRecord {
    pub kappa: String,
    pub mu: String,
    pub q_xi_check: bool,
    pub h2_check: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub label: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub substitutions: BTreeMap<String, String>,
    pub convention: ConventionRecord,
    pub validation: ValidationRecord,
    pub basis: Vec<String>,
    pub phi: Vec<Vec<String>>,
    pub h: Vec<Vec<String>>,
    pub tr_h2: String,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<String>>,
    pub scalar_curvature: String,
    pub identities: Vec<IdentityRecord>,
    pub classification: BTreeMap<&'static str, Verdict>,
    pub iht_checks: BTreeMap<&'static str, Verdict>,
    pub km: Option<KmRecord>,
    pub fitted: FittedRecord,
    /// Wall time; text output only, so JSON stays byte-identical across runs.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

pub fn matrix_text(m: &PolyMatrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
}

pub fn mu_text(mu: &Mu) -> String {
    match mu {
        Mu::Value(p) => p.to_string(),
        Mu::Unconstrained => "unconstrained".into(),
    }
}

/// Names for the frame vectors: `xi, e, phi e` for the 3D layout,
/// `xi, e1, .., phi e1, ..` when the pairing is given, `E0..` otherwise.
pub fn basis_names(frame: &ParacontactFrame) -> Vec<String> {
    let spec = frame.spec();
    let n = spec.dim();
    let mut names: Vec<String> = (0..n).map(|i| format!("E{i}")).collect();
    names[spec.xi_index] = "xi".into();
    if spec.pairing.len() * 2 + 1 == n {
        let single = spec.pairing.len() == 1;
        for (k, &(a, b)) in spec.pairing.iter().enumerate() {
            let e = if single { "e".to_string() } else { format!("e{}", k + 1) };
            names[b] = format!("phi {e}");
            names[a] = e;
        }
    }
    names
}

pub fn analyze(
    frame: ParacontactFrame,
    substitutions: &BTreeMap<String, Rational>,
) -> Result<AnalysisReport, ClassifyError> {
    let start = std::time::Instant::now();
    let basis = basis_names(&frame);
    let geo = Geometry::new(frame);
    let cls: Classification = classify(&geo)?;
    let (_, iht) = is_iht(&geo)?;
    let f = &geo.frame;
    let identities = identity_suite(&geo)
        .into_iter()
        .map(|r| IdentityRecord {
            id: r.id,
            kind: match r.kind {
                Kind::Identity => "identity",
                Kind::Condition => "condition",
            },
            passed: r.passed(),
            residuals: r.residuals.iter().map(|p| p.to_string()).collect(),
        })
        .collect();
    let classification = cls.flags().into_iter().map(|(k, v)| (k, v.clone())).collect();
    let iht_checks = BTreeMap::from([
        ("q_xi", iht.q_xi),
        ("laplacian", iht.laplacian),
        ("h_and_trace", iht.h_and_trace),
    ]);
    let s = |p: &Option<Polynomial>| p.as_ref().map(|p| p.to_string());
    let fitted = FittedRecord {
        a: s(&cls.fitted.a),
        b: s(&cls.fitted.b),
        kappa: s(&cls.fitted.kappa),
        mu: cls.fitted.mu.as_ref().map(mu_text),
        lambda: s(&cls.fitted.lambda),
    };
    let km = cls.km.as_ref().map(|k| KmRecord {
        kappa: k.kappa.to_string(),
        mu: mu_text(&k.mu),
        q_xi_check: k.q_xi_check,
        h2_check: k.h2_check,
    });
    Ok(AnalysisReport {
        schema: SCHEMA,
        label: f.spec().label.clone(),
        dim: f.dim(),
        params: f.vars().names().to_vec(),
        substitutions: substitutions.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect(),
        convention: f.convention().into(),
        validation: ValidationRecord { valid: true, violations: Vec::new() },
        basis,
        phi: matrix_text(f.phi()),
        h: matrix_text(f.h()),
        tr_h2: geo.tr_h2().to_string(),
        q: matrix_text(geo.curv.ricci_operator()),
        scalar_curvature: geo.curv.scalar().to_string(),
        identities,
        classification,
        iht_checks,
        km,
        fitted,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Text verdict; an unconditional failure reads as an unsatisfiable locus.
pub fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Fails => "unsatisfiable".into(),
        other => other.to_string(),
    }
}

/// Rows aligned by column, one line per row.
pub fn render_matrix(out: &mut String, m: &[Vec<String>]) {
    let cols = m.first().map_or(0, Vec::len);
    let width: Vec<usize> = (0..cols)
        .map(|j| m.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    for row in m {
        let cells: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "  [ {} ]", cells.join("  "));
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "frame {} (dim {}), basis [{}]", self.label, self.dim, self.basis.join(", "));
        if !self.params.is_empty() {
            let _ = writeln!(o, "parameters: {}", self.params.join(", "));
        }
        for (k, v) in &self.substitutions {
            let _ = writeln!(o, "  {k} = {v}");
        }
        let _ = writeln!(
            o,
            "convention: d eta sign {:+}, {}",
            self.convention.d_eta_sign, self.convention.curvature
        );
        let _ = writeln!(o, "\nh:");
        render_matrix(&mut o, &self.h);
        let _ = writeln!(o, "tr h^2 = {}", self.tr_h2);
        let _ = writeln!(o, "\nQ:");
        render_matrix(&mut o, &self.q);
        let _ = writeln!(o, "scalar curvature = {}", self.scalar_curvature);
        let _ = writeln!(o, "\nidentities:");
        for r in &self.identities {
            let status = if r.passed { "ok" } else { "FAIL" };
            let _ = write!(o, "  {:<7} {status}", r.id);
            if r.kind == "condition" {
                let _ = write!(o, " (condition)");
            }
            if !r.residuals.is_empty() {
                let _ = write!(o, ": {}", r.residuals.join("; "));
            }
            let _ = writeln!(o);
        }
        let _ = writeln!(o, "\nclassification:");
        for (k, v) in &self.classification {
            let _ = writeln!(o, "  {k}: {}", verdict_text(v));
        }
        let _ = writeln!(o, "\nfitted:");
        let fields = [
            ("a", &self.fitted.a),
            ("b", &self.fitted.b),
            ("kappa", &self.fitted.kappa),
            ("mu", &self.fitted.mu),
            ("lambda", &self.fitted.lambda),
        ];
        for (k, v) in fields {
            let _ = writeln!(o, "  {k} = {}", v.as_deref().unwrap_or("none"));
        }
        let _ = writeln!(o, "\nelapsed: {} ms", self.elapsed_ms);
        o
    }
}

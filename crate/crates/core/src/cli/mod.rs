//! The `pclab` command line.
//!
//! Exit codes: 0 success, 1 input error, 2 validation or degenerate
//! deformation, 3 golden mismatch.

pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{self, CatalogError, GoldenReport, Status};
use crate::classify::{is_h_paracontact, Verdict};
use crate::curvature::Geometry;
use crate::deform::{check_deformed_ricci_relation, check_restricted_curvature_relation, deform, DeformError, DeformationParams};
use crate::frame::file::{FrameFile, FrameFileError};
use crate::frame::{validate, FrameError, FrameSpec, ParacontactFrame, SignConvention};
use crate::scalar::{format_rational, parse_rational, Rational};

pub use report::{analyze, basis_names, AnalysisReport, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pclab", version, about = "Exact checks for left-invariant paracontact metric structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the paracontact axioms for a frame file.
    Validate { file: PathBuf },
    /// Curvature, identity suite, classification and fitted constants.
    Analyze {
        file: PathBuf,
        /// Fix parameters, e.g. `--subst beta=2 gamma=1/2`.
        #[arg(long = "subst", value_name = "NAME=RAT", num_args = 1.., action = clap::ArgAction::Append)]
        subst: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Built-in families and their goldens.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Apply a D-homothetic deformation.
    Deform {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        eps: i8,
        /// Write the deformed frame file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogCommand {
    List,
    Show {
        id: String,
        /// Print the frame file instead of the summary.
        #[arg(long)]
        json: bool,
    },
    Verify {
        #[arg(default_value = "all")]
        id: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Output plus exit code, so commands are testable without a process.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: stderr.into() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(EXIT_INPUT, text)
            } else {
                Outcome::ok(text)
            };
        }
    };
    let conv = match SignConvention::from_env() {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    match cli.command {
        Command::Validate { file } => cmd_validate(&file, conv),
        Command::Analyze { file, subst, format } => cmd_analyze(&file, &subst, format, conv),
        Command::Catalog { command } => cmd_catalog(command, conv),
        Command::Deform { file, t, eps, out, format } => cmd_deform(&file, &t, eps, out.as_deref(), format, conv),
    }
}

/// Runs with the process arguments and writes to stdio; returns the exit code.
pub fn main_with_stdio() -> i32 {
    let o = run(std::env::args_os());
    let _ = std::io::stdout().write_all(o.stdout.as_bytes());
    let _ = std::io::stderr().write_all(o.stderr.as_bytes());
    o.code
}

fn load_spec(path: &Path, conv: SignConvention) -> Result<FrameSpec, Outcome> {
    let file = FrameFile::load(path).map_err(|e| file_error(path, e))?;
    file.to_spec(conv).map_err(|e| file_error(path, e))
}

fn file_error(path: &Path, e: FrameFileError) -> Outcome {
    let code = match e {
        FrameFileError::Phi(_) => EXIT_INVALID,
        _ => EXIT_INPUT,
    };
    Outcome::fail(code, format!("error: {}: {e}\n", path.display()))
}

fn violations_text(label: &str, e: &FrameError) -> String {
    let mut s = format!("{label}: invalid\n");
    match e {
        FrameError::Invalid(vs) => {
            for v in vs {
                let _ = writeln!(s, "  {v}");
            }
        }
        other => {
            let _ = writeln!(s, "  {other}");
        }
    }
    s
}

fn load_frame(path: &Path, conv: SignConvention) -> Result<ParacontactFrame, Outcome> {
    let spec = load_spec(path, conv)?;
    validate(&spec, conv).map_err(|e| Outcome::fail(EXIT_INVALID, violations_text(&spec.label, &e)))
}

pub fn cmd_validate(path: &Path, conv: SignConvention) -> Outcome {
    let frame = match load_frame(path, conv) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let spec = frame.spec();
    let mut s = format!("{}: valid (dim {}", spec.label, spec.dim());
    if !spec.vars.is_empty() {
        let _ = write!(s, ", parameters {}", spec.vars.names().join(", "));
    }
    let _ = writeln!(s, ", d eta sign {:+})", conv.d_eta_sign());
    Outcome::ok(s)
}

fn parse_substitutions(items: &[String]) -> Result<BTreeMap<String, Rational>, String> {
    let mut out = BTreeMap::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("--subst expects NAME=RAT, got '{item}'"))?;
        let value = parse_rational(v.trim()).ok_or_else(|| format!("'{v}' is not a rational number"))?;
        if out.insert(k.trim().to_string(), value).is_some() {
            return Err(format!("'{k}' substituted twice"));
        }
    }
    Ok(out)
}

pub fn cmd_analyze(path: &Path, subst: &[String], format: Format, conv: SignConvention) -> Outcome {
    let assignment = match parse_substitutions(subst) {
        Ok(a) => a,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    let spec = match load_spec(path, conv) {
        Ok(s) => s,
        Err(o) => return o,
    };
    if let Some(bad) = assignment.keys().find(|k| spec.vars.index_of(k).is_none()) {
        return Outcome::fail(EXIT_INPUT, format!("error: '{bad}' is not a parameter of {}\n", spec.label));
    }
    if let Some((k, _)) = assignment
        .iter()
        .find(|(k, v)| spec.vars.is_involutive(spec.vars.index_of(k).unwrap()) && v.numer().magnitude() != v.denom().magnitude())
    {
        return Outcome::fail(EXIT_INPUT, format!("error: {k} must be +1 or -1\n"));
    }
    let spec = spec.substitute(&assignment).expect("names checked");
    if let Some(k) = spec.violated_constraints().first() {
        return Outcome::fail(EXIT_INVALID, format!("{}: constraint violated: {k} = 0\n", spec.label));
    }
    let frame = match validate(&spec, conv) {
        Ok(f) => f,
        Err(e) => return Outcome::fail(EXIT_INVALID, violations_text(&spec.label, &e)),
    };
    match analyze(frame, &assignment) {
        Ok(r) => Outcome::ok(match format {
            Format::Json => r.to_json() + "\n",
            Format::Text => r.to_text(),
        }),
        Err(e) => Outcome::fail(EXIT_INVALID, format!("{}: {e}\n", spec.label)),
    }
}

fn bracket_text(spec: &FrameSpec, names: &[String]) -> Vec<String> {
    let n = spec.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = &spec.brackets[i][j];
            if v.iter().all(|p| p.is_zero()) {
                continue;
            }
            let terms: Vec<String> = v
                .iter()
                .zip(names)
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, name)| {
                    let c = p.to_string();
                    match c.as_str() {
                        "1" => name.clone(),
                        "-1" => format!("-{name}"),
                        _ if p.num_terms() > 1 => format!("({c}) {name}"),
                        _ => format!("{c} {name}"),
                    }
                })
                .collect();
            out.push(format!("[{}, {}] = {}", names[i], names[j], terms.join(" + ").replace("+ -", "- ")));
        }
    }
    out
}

#[derive(Serialize)]
struct VerifyAll<'a> {
    schema: u32,
    ok: bool,
    entries: &'a [GoldenReport],
}

pub fn cmd_catalog(command: CatalogCommand, conv: SignConvention) -> Outcome {
    match command {
        CatalogCommand::List => {
            let mut s = String::new();
            for (id, desc) in catalog::list_entries() {
                let _ = writeln!(s, "{id:<16} {desc}");
            }
            Outcome::ok(s)
        }
        CatalogCommand::Show { id, json } => {
            let entry = match catalog::get(&id) {
                Ok(e) => e,
                Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
            };
            if json {
                return Outcome::ok(entry.frame_file().to_json() + "\n");
            }
            let frame = match validate(&entry.spec, conv) {
                Ok(f) => f,
                Err(e) => return Outcome::fail(EXIT_INVALID, violations_text(&id, &e)),
            };
            let names = basis_names(&frame);
            let mut s = format!("{id}: {}\n", entry.description);
            if let Some(base) = &entry.base {
                let _ = writeln!(s, "specializes {base}");
            }
            if !entry.spec.vars.is_empty() {
                let _ = writeln!(s, "parameters: {}", entry.spec.vars.names().join(", "));
            }
            for k in &entry.spec.nonzero {
                let _ = writeln!(s, "constraint: {k} != 0");
            }
            for b in bracket_text(&entry.spec, &names) {
                let _ = writeln!(s, "  {b}");
            }
            let _ = writeln!(s, "errata: {}", entry.errata.len());
            Outcome::ok(s)
        }
        CatalogCommand::Verify { id, format } => {
            let entries: Vec<&catalog::CatalogEntry> = if id == "all" {
                catalog::entries().iter().collect()
            } else {
                match catalog::get(&id) {
                    Ok(e) => vec![e],
                    Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
                }
            };
            let results: Vec<Result<GoldenReport, CatalogError>> =
                entries.par_iter().map(|e| catalog::verify_goldens(e, conv)).collect();
            let mut reports = Vec::new();
            for r in results {
                match r {
                    Ok(r) => reports.push(r),
                    Err(e) => return Outcome::fail(EXIT_INVALID, format!("error: {e}\n")),
                }
            }
            let ok = reports.iter().all(GoldenReport::ok);
            let stdout = match format {
                Format::Json => {
                    let all = VerifyAll { schema: SCHEMA, ok, entries: &reports };
                    serde_json::to_string_pretty(&all).expect("report serializes") + "\n"
                }
                Format::Text => verify_text(&reports, entries.len() == 1),
            };
            Outcome { code: if ok { EXIT_OK } else { EXIT_MISMATCH }, stdout, stderr: String::new() }
        }
    }
}

fn verify_text(reports: &[GoldenReport], detailed: bool) -> String {
    let mut s = String::new();
    for r in reports {
        let errata = r.comparisons.iter().filter(|c| matches!(c.status, Status::Erratum { .. })).count();
        let verdict = if r.ok() { "ok" } else { "MISMATCH" };
        let _ = writeln!(s, "{}: {verdict} ({} goldens, {errata} known errata)", r.id, r.comparisons.len());
        for c in &r.comparisons {
            match &c.status {
                Status::Match if detailed => {
                    let _ = writeln!(s, "  {} = {}", c.field, c.got);
                }
                Status::Match => {}
                Status::Erratum { note } => {
                    let _ = writeln!(s, "  {}: printed {}, computed {} ({note})", c.field, c.expected, c.got);
                }
                Status::Mismatch { counterexample } => {
                    let _ = write!(s, "  {}: expected {}, got {}", c.field, c.expected, c.got);
                    if let Some(pt) = counterexample {
                        let pt: Vec<String> = pt.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        let _ = write!(s, "; differs at {}", pt.join(", "));
                    }
                    let _ = writeln!(s);
                }
                Status::StaleErratum => {
                    let _ = writeln!(s, "  {}: erratum no longer applies", c.field);
                }
            }
        }
    }
    s
}

#[derive(Serialize)]
struct DeformReport {
    schema: u32,
    label: String,
    t: String,
    eps: i8,
    h_paracontact_before: Verdict,
    h_paracontact_after: Verdict,
    h_paracontact_preserved: bool,
    ricci_relation: Verdict,
    curvature_relation: Verdict,
    deformed: FrameFile,
}

pub fn cmd_deform(
    path: &Path,
    t: &str,
    eps: i8,
    out: Option<&Path>,
    format: Format,
    conv: SignConvention,
) -> Outcome {
    let Some(t) = parse_rational(t.trim()) else {
        return Outcome::fail(EXIT_INPUT, format!("error: '{t}' is not a rational number\n"));
    };
    let params = match DeformationParams::new(t.clone(), eps) {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    let frame = match load_frame(path, conv) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let deformed = match deform(&frame, &params) {
        Ok(d) => d,
        Err(DeformError::Invalid(e)) => {
            return Outcome::fail(EXIT_INVALID, violations_text(&format!("{}@t", frame.spec().label), &e))
        }
        Err(e) => return Outcome::fail(EXIT_INVALID, format!("error: {e}\n")),
    };
    let (before, after) = (Geometry::new(frame), Geometry::new(deformed));
    let hp = |g: &Geometry| is_h_paracontact(g).map_err(|e| Outcome::fail(EXIT_INVALID, format!("error: {e}\n")));
    let (hb, ha) = match (hp(&before), hp(&after)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    let deformed_file = FrameFile::from_spec(after.frame.spec());
    if let Some(p) = out {
        if let Err(e) = std::fs::write(p, deformed_file.to_json() + "\n") {
            return Outcome::fail(EXIT_INPUT, format!("error: {}: {e}\n", p.display()));
        }
    }
    let report = DeformReport {
        schema: SCHEMA,
        label: before.frame.spec().label.clone(),
        t: format_rational(&t),
        eps,
        h_paracontact_preserved: hb.same_locus(&ha),
        ricci_relation: check_deformed_ricci_relation(&before, &after, &t),
        curvature_relation: check_restricted_curvature_relation(&before, &after, &t),
        h_paracontact_before: hb,
        h_paracontact_after: ha,
        deformed: deformed_file,
    };
    let stdout = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => {
            let mut s = format!("{} deformed with t = {}, eps = {}\n", report.label, report.t, eps);
            let _ = writeln!(s, "  valid: yes");
            let _ = writeln!(s, "  H-paracontact before: {}", report::verdict_text(&report.h_paracontact_before));
            let _ = writeln!(s, "  H-paracontact after:  {}", report::verdict_text(&report.h_paracontact_after));
            let _ = writeln!(s, "  preserved: {}", report.h_paracontact_preserved);
            let _ = writeln!(s, "  rho_t(X, xi_t) = rho(X, xi) / t: {}", report.ricci_relation);
            let _ = writeln!(s, "  t R_t(X,Y) xi_t relation: {}", report.curvature_relation);
            if out.is_none() {
                let _ = writeln!(s, "\n{}", report.deformed.to_json());
            }
            s
        }
    };
    Outcome::ok(stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(name: &str) -> String {
        format!("{}/examples/frames/{name}.json", env!("CARGO_MANIFEST_DIR"))
    }

    fn pclab(args: &[&str]) -> Outcome {
        run(std::iter::once("pclab").chain(args.iter().copied()))
    }

    fn temp_frame(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    const BROKEN_JACOBI: &str = r#"{
        "label": "broken", "dim": 3, "params": [],
        "brackets": [
            {"i": 1, "j": 2, "coeffs": {"0": "2"}},
            {"i": 0, "j": 1, "coeffs": {"2": "1"}},
            {"i": 0, "j": 2, "coeffs": {"0": "1"}}
        ],
        "metric": [[1, 0, 0], [0, 1, 0], [0, 0, -1]],
        "xi_index": 0, "phi": [[0, 0, 0], [0, 0, -1], [0, -1, 0]]
    }"#;

    #[test]
    fn validate_exit_codes() {
        let o = pclab(&["validate", &frame("heisenberg")]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(o.stdout.starts_with("heisenberg: valid"));

        let f = temp_frame(BROKEN_JACOBI);
        let o = pclab(&["validate", f.path().to_str().unwrap()]);
        assert_eq!(o.code, EXIT_INVALID);
        assert!(o.stderr.contains("Jacobi"), "{}", o.stderr);

        let f = temp_frame(&BROKEN_JACOBI.replace(r#""0": "2""#, r#""0": "2*+""#));
        let o = pclab(&["validate", f.path().to_str().unwrap()]);
        assert_eq!(o.code, EXIT_INPUT);
        assert!(o.stderr.contains("position"), "{}", o.stderr);

        assert_eq!(pclab(&["validate", "/nonexistent.json"]).code, EXIT_INPUT);
        assert_eq!(pclab(&["frobnicate"]).code, EXIT_INPUT);
    }

    #[test]
    fn analyze_g2_json_is_deterministic() {
        let a = pclab(&["analyze", &frame("g2"), "--format", "json"]);
        let b = pclab(&["analyze", &frame("g2"), "--format", "json"]);
        assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
        let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["classification"]["H_paracontact"]["verdict"], "holds");
        assert_eq!(v["classification"]["iht"]["verdict"], "fails");
        assert_eq!(v["tr_h2"], "-2*gamma^2");
        let ids: Vec<&str> = v["identities"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
        for id in ["eq1", "eq2", "eq3", "eq3.1p", "eq3.3", "eq3.5", "tr0", "trace", "main2", "cd1", "sol"] {
            assert!(ids.contains(&id), "{id}");
        }
        // every printed polynomial re-parses to itself
        let vars = crate::scalar::VarList::new(["beta", "gamma"]);
        for row in v["Q"].as_array().unwrap() {
            for cell in row.as_array().unwrap() {
                let text = cell.as_str().unwrap();
                assert_eq!(crate::scalar::parse_expr(text, &vars).unwrap().to_string(), text);
            }
        }
        let text = pclab(&["analyze", &frame("g2")]).stdout;
        assert!(text.contains("iht: unsatisfiable"));
    }

    #[test]
    fn analyze_fits_and_substitutions() {
        let o = pclab(&["analyze", &frame("g5g6"), "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["fitted"]["a"], "delta^2 + 2");
        assert_eq!(v["fitted"]["b"], "-delta^2 - 4");
        assert_eq!(v["classification"]["soliton"]["verdict"], "fails");

        let o = pclab(&["analyze", &frame("g3"), "--subst", "beta=2", "gamma=2", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["fitted"]["lambda"], "-2");
        assert_eq!(v["classification"]["soliton_trivial"]["verdict"], "holds");
        assert_eq!(v["substitutions"]["beta"], "2");

        assert_eq!(pclab(&["analyze", &frame("g2"), "--subst", "gamma=0"]).code, EXIT_INVALID);
        assert_eq!(pclab(&["analyze", &frame("g2"), "--subst", "delta=1"]).code, EXIT_INPUT);
        assert_eq!(pclab(&["analyze", &frame("g2"), "--subst", "beta=x"]).code, EXIT_INPUT);
        assert_eq!(pclab(&["analyze", &frame("g4"), "--subst", "eps=2"]).code, EXIT_INPUT);
        assert_eq!(pclab(&["analyze", &frame("g4"), "--subst", "eps=-1"]).code, EXIT_OK);
    }

    #[test]
    fn catalog_commands() {
        let o = pclab(&["catalog", "list"]);
        assert_eq!(o.stdout.lines().count(), 10);
        let o = pclab(&["catalog", "show", "g7"]);
        assert!(o.stdout.contains("[e, phi e] = 2 xi + delta e + delta phi e"), "{}", o.stdout);
        let o = pclab(&["catalog", "verify", "km5d"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.stdout.contains("fitted.kappa = -1") && o.stdout.contains("fitted.mu = 2"));
        let o = pclab(&["catalog", "verify", "all", "--format", "json"]);
        assert_eq!(o.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["ok"], true);
        assert_eq!(v["entries"].as_array().unwrap().len(), 10);
        assert_eq!(pclab(&["catalog", "show", "g9"]).code, EXIT_INPUT);
    }

    #[test]
    fn deform_commands() {
        let o = pclab(&["deform", &frame("heisenberg"), "--t", "2", "--format", "json"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["h_paracontact_preserved"], true);

        let o = pclab(&["deform", &frame("g2"), "--t", "3", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["ricci_relation"]["verdict"], "holds");
        assert_eq!(v["curvature_relation"]["verdict"], "holds");

        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("d.json");
        let o = pclab(&["deform", &frame("g7"), "--t", "1/2", "--out", out.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_OK);
        let o = pclab(&["validate", out.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);

        assert_eq!(pclab(&["deform", &frame("heisenberg"), "--t", "0"]).code, EXIT_INPUT);
        assert_eq!(pclab(&["deform", &frame("heisenberg"), "--t", "2", "--eps", "-1"]).code, EXIT_INVALID);
        assert_eq!(pclab(&["deform", &frame("heisenberg"), "--t", "-3"]).code, EXIT_OK);
    }
}

//! Runs the checkers on a manifest and collects a report.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bockstein::{bockstein, verdict};
use crate::dgla::{lie_homology, validate, DGLAPresentation, DglaError};
use crate::gamma::{check_gamma_hopf_with, dualize, GammaCheckOptions};
use crate::hopf::{check_fhul_hopf, compute_fh_hopf, iota_free_map, primitive_lie, FhulOptions, HopfError};
use crate::linalg::{HomologyDecomposition, LinalgError};
use crate::manifest::{parse_unvalidated, Manifest, ManifestError};
use crate::pbw::{UEATruncation, UeaError};

pub const TOOL: &str = "uea-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_CUTOFF: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Validate,
    Homology,
    Uea,
    Primitives,
    CheckFhul,
    CheckEmbed,
    Bockstein,
    GammaCheck,
    All,
}

impl Subcommand {
    pub const CHECKS: [Subcommand; 8] = [
        Subcommand::Validate,
        Subcommand::Homology,
        Subcommand::Uea,
        Subcommand::Primitives,
        Subcommand::CheckFhul,
        Subcommand::CheckEmbed,
        Subcommand::Bockstein,
        Subcommand::GammaCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Validate => "validate",
            Subcommand::Homology => "homology",
            Subcommand::Uea => "uea",
            Subcommand::Primitives => "primitives",
            Subcommand::CheckFhul => "check-fhul",
            Subcommand::CheckEmbed => "check-embed",
            Subcommand::Bockstein => "bockstein",
            Subcommand::GammaCheck => "gamma-check",
            Subcommand::All => "all",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::CHECKS.into_iter().chain([Subcommand::All]).find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("invalid degree range {0}..{1}")]
    DegreeRange(usize, usize),
    #[error("cutoff {0} is too small; need at least 1")]
    Cutoff(usize),
    #[error(transparent)]
    Uea(#[from] UeaError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Dgla(#[from] DglaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the manifest cutoff.
    pub cutoff: Option<usize>,
    /// Overrides the manifest prime.
    pub prime: Option<u64>,
    /// Restricts the divided-power checks to these degrees.
    pub degrees: Option<(usize, usize)>,
    pub seed: Option<u64>,
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub status: Status,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub manifest_sha256: String,
    pub subcommand: &'static str,
    pub prime: u64,
    pub cutoff: usize,
    pub seed: Option<u64>,
    pub status: Status,
    pub checks: Vec<CheckReport>,
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Parses `text` and runs `sub` on it.
pub fn run(sub: Subcommand, text: &str, options: &RunOptions) -> Result<RunReport, RunError> {
    let mut manifest = parse_unvalidated(text)?;
    if let Some(p) = options.prime {
        crate::scalar::PrimeContext::new(p).map_err(|e| ManifestError::Parse {
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
        manifest.prime = p;
    }
    // `validate` reports violations as a failing check; everything else needs a valid input
    if sub != Subcommand::Validate {
        manifest.presentation()?;
    }
    run_manifest(sub, &manifest, &digest(text), options)
}

pub fn run_manifest(sub: Subcommand, m: &Manifest, digest: &str, options: &RunOptions) -> Result<RunReport, RunError> {
    let cutoff = options.cutoff.or(m.cutoff).unwrap_or(DEFAULT_CUTOFF);
    if cutoff == 0 {
        return Err(RunError::Cutoff(cutoff));
    }
    if let Some((a, b)) = options.degrees {
        if a > b || b > cutoff {
            return Err(RunError::DegreeRange(a, b));
        }
    }
    let l = m.presentation_unchecked();
    let subs: Vec<Subcommand> = match sub {
        Subcommand::All => Subcommand::CHECKS.to_vec(),
        s => vec![s],
    };
    let checks = subs
        .par_iter()
        .map(|&s| {
            let start = Instant::now();
            let (ok, payload) = dispatch(s, &l, cutoff, options)?;
            Ok(CheckReport {
                name: s.name(),
                status: Status::from_bool(ok),
                payload,
                elapsed_ms: options.timings.then(|| start.elapsed().as_millis() as u64),
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let status = Status::from_bool(checks.iter().all(|c| c.status == Status::Pass));
    Ok(RunReport {
        tool: TOOL,
        version: VERSION,
        manifest_sha256: digest.to_string(),
        subcommand: sub.name(),
        prime: m.prime,
        cutoff,
        seed: options.seed.or(m.seed),
        status,
        checks,
    })
}

fn homology_json(h: &HomologyDecomposition) -> Value {
    Value::Array(
        h.degrees
            .iter()
            .map(|d| json!({ "degree": d.degree, "free_rank": d.free_rank, "torsion": d.torsion_orders }))
            .collect(),
    )
}

fn dispatch(s: Subcommand, l: &DGLAPresentation, cutoff: usize, options: &RunOptions) -> Result<(bool, Value), RunError> {
    Ok(match s {
        Subcommand::Validate => {
            let report = validate(l);
            (report.is_valid(), to_json(&report))
        }
        Subcommand::Homology => {
            let lie = lie_homology(l, cutoff)?;
            let u = UEATruncation::new(l, cutoff)?;
            let ul = HomologyDecomposition::compute(l.ctx(), &u.chain_complex());
            (
                true,
                json!({ "lie": homology_json(&lie.homology), "enveloping": homology_json(&ul) }),
            )
        }
        Subcommand::Uea => {
            let u = UEATruncation::new(l, cutoff)?;
            let check = u.poincare_series_check();
            (check.pass, to_json(&check))
        }
        Subcommand::Primitives => {
            let u = UEATruncation::new(l, cutoff)?;
            let fh = compute_fh_hopf(&u)?;
            let prim = primitive_lie(&fh.hopf)?;
            let mut per_degree = Vec::new();
            for (n, basis) in prim.basis.iter().enumerate() {
                if basis.cols() == 0 {
                    continue;
                }
                let cycles: Vec<String> = basis
                    .columns()
                    .iter()
                    .map(|c| u.format_element(&u.element(n, &fh.reps[n].apply(c))))
                    .collect();
                per_degree.push(json!({ "degree": n, "rank": basis.cols(), "cycles": cycles }));
            }
            let ok = prim.closure_failures.is_empty();
            (ok, json!({ "ranks": prim.ranks(), "primitives": per_degree, "closure_failures": prim.closure_failures }))
        }
        Subcommand::CheckFhul => {
            let u = UEATruncation::new(l, cutoff)?;
            let fh = compute_fh_hopf(&u)?;
            let v = check_fhul_hopf(&fh.hopf, FhulOptions::default())?;
            (v.status, to_json(&v))
        }
        Subcommand::CheckEmbed => {
            let v = iota_free_map(l, cutoff)?;
            (v.status, to_json(&v))
        }
        Subcommand::Bockstein => {
            let u = UEATruncation::new(l, cutoff)?;
            let v = verdict(&bockstein(l.ctx(), &u.chain_complex()));
            (v.status, to_json(&v))
        }
        Subcommand::GammaCheck => {
            let u = UEATruncation::new(l, cutoff)?;
            let dual = dualize(&u);
            let mut opts = GammaCheckOptions::full(&dual);
            if let Some(range) = options.degrees {
                opts.degrees = range;
            }
            let v = check_gamma_hopf_with(&dual, opts);
            (v.status, to_json(&v))
        }
        Subcommand::All => unreachable!("expanded by the caller"),
    })
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

impl RunReport {
    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.tool, self.version);
        let _ = writeln!(out, "manifest sha256 {}", self.manifest_sha256);
        let _ = write!(out, "prime {} cutoff {}", self.prime, self.cutoff);
        if let Some(s) = self.seed {
            let _ = write!(out, " seed {s}");
        }
        out.push('\n');
        for c in &self.checks {
            let _ = write!(out, "[{}] {}", c.status.label(), c.name);
            if let Some(ms) = c.elapsed_ms {
                let _ = write!(out, " ({ms} ms)");
            }
            out.push('\n');
            for line in summary(c.name, &c.payload, self.prime) {
                let _ = writeln!(out, "  {line}");
            }
        }
        let _ = writeln!(out, "status {}", self.status.label());
        out
    }
}

fn cyclic(p: u64, exponents: &Value) -> String {
    let parts: Vec<String> = exponents
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(Value::as_u64)
        .map(|e| format!("Z/{}", p.pow(e as u32)))
        .collect();
    parts.join(" + ")
}

fn items<'a>(v: &'a Value, key: &str) -> impl Iterator<Item = &'a Value> {
    v.get(key).and_then(Value::as_array).into_iter().flatten()
}

/// A few human-readable lines per check.
fn summary(name: &str, payload: &Value, p: u64) -> Vec<String> {
    let mut lines = Vec::new();
    match name {
        "validate" => {
            for v in items(payload, "violations") {
                lines.push(format!("{}: {}", v["axiom"].as_str().unwrap_or(""), v["witness"]));
            }
        }
        "homology" => {
            for (key, title) in [("lie", "L"), ("enveloping", "UL")] {
                for d in payload[key].as_array().into_iter().flatten() {
                    let free = d["free_rank"].as_u64().unwrap_or(0);
                    let torsion = cyclic(p, &d["torsion"]);
                    if free == 0 && torsion.is_empty() {
                        continue;
                    }
                    let mut s = format!("H_{}({title}): free rank {free}", d["degree"]);
                    if !torsion.is_empty() {
                        let _ = write!(s, ", torsion {torsion}");
                    }
                    lines.push(s);
                }
            }
        }
        "uea" => {
            let ranks: Vec<String> = items(payload, "degrees").map(|d| d["enumerated"].to_string()).collect();
            lines.push(format!("ranks {}", ranks.join(" ")));
        }
        "primitives" => {
            for d in items(payload, "primitives") {
                let cycles: Vec<&str> = items(d, "cycles").filter_map(Value::as_str).collect();
                lines.push(format!("degree {}: {}", d["degree"], cycles.join(", ")));
            }
        }
        "check-fhul" => {
            for d in items(payload, "per_degree") {
                if d["rank_fh"].as_u64() != Some(0) || d["rank_up"].as_u64() != Some(0) {
                    lines.push(format!(
                        "degree {}: rank FH {} rank U(P) {} surjective {}",
                        d["n"], d["rank_fh"], d["rank_up"], d["surjective"]
                    ));
                }
            }
            for v in items(payload, "law_violations") {
                lines.push(format!("law: {}", v.as_str().unwrap_or("")));
            }
        }
        "check-embed" => {
            for d in items(payload, "per_degree") {
                if d["rank_p"].as_u64() == Some(0) {
                    continue;
                }
                let cokernel = cyclic(p, &d["cokernel"]);
                lines.push(format!(
                    "degree {}: injective {} matrix {} cokernel {}",
                    d["n"],
                    d["injective"],
                    d["matrix"],
                    if cokernel.is_empty() { "0".to_string() } else { cokernel }
                ));
            }
        }
        "bockstein" => {
            lines.push(format!(
                "r_stop {} converged {} reduction witness {}",
                payload["r_stop"], payload["converged"], payload["reduction_witness"]
            ));
            let dims: Vec<String> = items(payload, "per_degree").map(|d| d["dim_e_inf"].to_string()).collect();
            lines.push(format!("dim E_inf {}", dims.join(" ")));
        }
        "gamma-check" => {
            for c in items(payload, "checks") {
                if c["holds"].as_bool() != Some(true) {
                    lines.push(format!("failed {}: {}", c["name"].as_str().unwrap_or(""), c["witnesses"]));
                }
            }
            if let Some(g) = payload["gamma_generators"].as_array() {
                let gens: Vec<String> = g
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.as_u64().is_some_and(|r| r > 0))
                    .map(|(n, r)| format!("{n}:{r}"))
                    .collect();
                lines.push(format!("divided-power generators {}", gens.join(" ")));
            }
        }
        _ => {}
    }
    lines
}

/// Parses, runs and renders; the exit code follows the CLI convention.
pub fn run_to_string(sub: Subcommand, text: &str, options: &RunOptions, json: bool) -> (i32, String) {
    match run(sub, text, options) {
        Ok(r) => (r.exit_code(), if json { r.to_json() } else { r.to_text() }),
        Err(e) => (2, format!("error: {e}\n")),
    }
}

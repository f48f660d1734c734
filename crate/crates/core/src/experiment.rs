//! Experiment configs: named catalog entries, case lists per suite, and the
//! runner that turns them into an [`ExperimentReport`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{FieldDesc, FunctionalDesc, ShapeDesc};
use crate::derivative::{compare, DerivativeReport, FdConfig, FdEstimate, FdSample, Tolerances, Verdict};
use crate::error::ShapeError;
use crate::fields::AmbientField;
use crate::flow::FlowConfig;
use crate::functionals::ShapeFunctional;
use crate::geometry::{Manifold, Region};
use crate::report;
use crate::validation::{
    crack_suite, locality_suite, normal_dependence_suite, random_test_fields, tangential_nullity_suite,
    CrackCoefficients, LocalityPair, NullityField, StructureSuiteResult, SuiteBounds, SuiteConfig,
};

/// Config problems: malformed JSON, unresolvable names, invalid values.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl ConfigError {
    fn invalid(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        ConfigError::Invalid {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Compare,
    Nullity,
    Locality,
    NormalDependence,
    Crack,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::Compare,
        SuiteKind::Nullity,
        SuiteKind::Locality,
        SuiteKind::NormalDependence,
        SuiteKind::Crack,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeEntry {
    pub name: String,
    pub shape: ShapeDesc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub name: String,
    pub field: FieldDesc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalEntry {
    pub name: String,
    pub functional: FunctionalDesc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareCase {
    pub functional: String,
    pub shape: String,
    pub field: String,
    /// Exact value both the analytic derivative and the FD oracle must hit.
    #[serde(default)]
    pub expected: Option<f64>,
    /// Overrides the experiment-wide tolerances for this case.
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullityCase {
    pub functional: String,
    pub shape: String,
    pub fields: Vec<String>,
    #[serde(default)]
    pub negative_controls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub negative_control: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalityCase {
    pub functional: String,
    pub shape: String,
    pub pairs: Vec<PairSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFields {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionCase {
    pub functional: String,
    pub shape: String,
    #[serde(default)]
    pub fields: Vec<String>,
    #[serde(default)]
    pub random: Option<RandomFields>,
}

fn default_stations() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackCase {
    /// A `crack` functional.
    pub functional: String,
    /// The crack curve.
    pub shape: String,
    #[serde(default)]
    pub probe_radius: Option<f64>,
    #[serde(default = "default_stations")]
    pub stations: usize,
    #[serde(default)]
    pub expected_alpha: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Cases {
    pub compare: Vec<CompareCase>,
    pub nullity: Vec<NullityCase>,
    pub locality: Vec<LocalityCase>,
    pub normal_dependence: Vec<DecompositionCase>,
    pub crack: Vec<CrackCase>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub path: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: default_out(),
            formats: default_formats(),
        }
    }
}

fn default_suites() -> Vec<SuiteKind> {
    SuiteKind::ALL.to_vec()
}

fn default_hold_all() -> Region {
    Region::Everywhere
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// Region every bump field must stay inside.
    #[serde(default = "default_hold_all")]
    pub hold_all: Region,
    #[serde(default)]
    pub shapes: Vec<ShapeEntry>,
    #[serde(default)]
    pub fields: Vec<FieldEntry>,
    #[serde(default)]
    pub functionals: Vec<FunctionalEntry>,
    /// Which case lists to run.
    #[serde(default = "default_suites")]
    pub suites: Vec<SuiteKind>,
    #[serde(default)]
    pub cases: Cases,
    #[serde(default)]
    pub fd: FdConfig,
    /// Flow used by the invariance checks.
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub bounds: SuiteBounds,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig::from_parts(self.fd, self.flow, &self.bounds)
    }

    /// Resolves every name and builds every catalog object once, so that
    /// config mistakes surface before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.fd.validate().map_err(|e| ConfigError::invalid("fd", e))?;
        self.flow.validate().map_err(|e| ConfigError::invalid("flow", e))?;
        self.tolerances
            .validate()
            .map_err(|e| ConfigError::invalid("tolerances", e))?;
        self.suite_config()
            .validate()
            .map_err(|e| ConfigError::invalid("bounds", e))?;
        if self.output.formats.is_empty() {
            return Err(ConfigError::invalid(
                "output.formats",
                "at least one format is required",
            ));
        }
        unique(self.shapes.iter().map(|e| &e.name), "shapes")?;
        unique(self.fields.iter().map(|e| &e.name), "fields")?;
        unique(self.functionals.iter().map(|e| &e.name), "functionals")?;
        let env = self.build_env()?;
        let c = &self.cases;
        for (i, k) in c.compare.iter().enumerate() {
            let at = format!("cases.compare[{i}]");
            env.functional(&k.functional, &k.shape, &at)?;
            env.field(&k.field, &k.shape, &format!("{at}.field"))?;
            if let Some(t) = k.tolerances {
                t.validate()
                    .map_err(|e| ConfigError::invalid(format!("{at}.tolerances"), e))?;
            }
        }
        for (i, k) in c.nullity.iter().enumerate() {
            let at = format!("cases.nullity[{i}]");
            env.functional(&k.functional, &k.shape, &at)?;
            for (j, f) in k.fields.iter().enumerate() {
                env.field(f, &k.shape, &format!("{at}.fields[{j}]"))?;
            }
            for (j, f) in k.negative_controls.iter().enumerate() {
                env.field(f, &k.shape, &format!("{at}.negative_controls[{j}]"))?;
            }
        }
        for (i, k) in c.locality.iter().enumerate() {
            let at = format!("cases.locality[{i}]");
            env.functional(&k.functional, &k.shape, &at)?;
            for (j, p) in k.pairs.iter().enumerate() {
                env.field(&p.x, &k.shape, &format!("{at}.pairs[{j}].x"))?;
                env.field(&p.y, &k.shape, &format!("{at}.pairs[{j}].y"))?;
            }
        }
        for (i, k) in c.normal_dependence.iter().enumerate() {
            let at = format!("cases.normal_dependence[{i}]");
            env.functional(&k.functional, &k.shape, &at)?;
            for (j, f) in k.fields.iter().enumerate() {
                env.field(f, &k.shape, &format!("{at}.fields[{j}]"))?;
            }
            if k.fields.is_empty() && k.random.is_none_or(|r| r.count == 0) {
                return Err(ConfigError::invalid(at, "needs fields or a nonzero random count"));
            }
        }
        for (i, k) in c.crack.iter().enumerate() {
            let at = format!("cases.crack[{i}]");
            let j = env.functional(&k.functional, &k.shape, &at)?;
            if j.crack_domain().is_none() {
                return Err(ConfigError::invalid(
                    format!("{at}.functional"),
                    format!("'{}' is not a crack functional", k.functional),
                ));
            }
            if let Some(r) = k.probe_radius {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(ConfigError::invalid(format!("{at}.probe_radius"), "must be positive"));
                }
            }
        }
        Ok(())
    }

    fn build_env(&self) -> Result<Env<'_>, ConfigError> {
        let mut shapes = BTreeMap::new();
        for (i, e) in self.shapes.iter().enumerate() {
            let m = e
                .shape
                .build()
                .map_err(|err| ConfigError::invalid(format!("shapes[{i}].shape"), err))?;
            shapes.insert(e.name.as_str(), m);
        }
        for (i, e) in self.fields.iter().enumerate() {
            e.field
                .build(3, &self.hold_all)
                .map_err(|err| ConfigError::invalid(format!("fields[{i}].field"), err))?;
        }
        Ok(Env { cfg: self, shapes })
    }
}

fn unique<'a>(names: impl Iterator<Item = &'a String>, what: &str) -> Result<(), ConfigError> {
    let mut seen = BTreeSet::new();
    for (i, n) in names.enumerate() {
        if !seen.insert(n) {
            return Err(ConfigError::invalid(
                format!("{what}[{i}].name"),
                format!("duplicate name '{n}'"),
            ));
        }
    }
    Ok(())
}

/// Built shapes plus lookups by name.
struct Env<'a> {
    cfg: &'a ExperimentConfig,
    shapes: BTreeMap<&'a str, Manifold>,
}

impl Env<'_> {
    fn shape(&self, name: &str, at: &str) -> Result<&Manifold, ConfigError> {
        self.shapes
            .get(name)
            .ok_or_else(|| ConfigError::invalid(format!("{at}.shape"), format!("unknown shape '{name}'")))
    }

    fn functional(&self, name: &str, shape: &str, at: &str) -> Result<ShapeFunctional, ConfigError> {
        let m = self.shape(shape, at)?;
        let e =
            self.cfg.functionals.iter().find(|e| e.name == name).ok_or_else(|| {
                ConfigError::invalid(format!("{at}.functional"), format!("unknown functional '{name}'"))
            })?;
        e.functional
            .build(m)
            .map(|j| j.with_name(name))
            .map_err(|err| ConfigError::invalid(format!("{at}.functional"), err))
    }

    fn field(&self, name: &str, shape: &str, at: &str) -> Result<AmbientField, ConfigError> {
        let dim = self.shape(shape, at)?.ambient_dim();
        let e = self
            .cfg
            .fields
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| ConfigError::invalid(at, format!("unknown field '{name}'")))?;
        e.field
            .build(dim, &self.cfg.hold_all)
            .map(|f| f.with_label(name))
            .map_err(|err| ConfigError::invalid(at, err))
    }
}

/// A derivative report plus the exact-value check and FD series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    #[serde(flatten)]
    pub report: DerivativeReport,
    pub expected: Option<f64>,
    /// max(|analytic - expected|, |fd - expected|)
    pub expected_abs_diff: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
    pub series: Vec<FdSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackRecord {
    pub functional: String,
    pub manifold: String,
    pub coefficients: CrackCoefficients,
}

/// Everything a run computes; serializes deterministically (no timings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub comparisons: Vec<ComparisonRecord>,
    pub suites: Vec<StructureSuiteResult>,
    pub cracks: Vec<CrackRecord>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub comparisons: Counts,
    pub suite_cases: Counts,
    pub suites: BTreeMap<String, Counts>,
    pub max_comparison_rel_diff: f64,
    pub max_suite_residual: f64,
    pub wall_time_s: f64,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn summary(&self, wall_time_s: f64) -> Summary {
        let passed = self.comparisons.iter().filter(|c| c.pass).count();
        let mut suites: BTreeMap<String, Counts> = BTreeMap::new();
        for s in &self.suites {
            let e = suites.entry(s.suite.clone()).or_insert(Counts { total: 0, passed: 0 });
            e.total += s.cases.len();
            e.passed += s.cases.iter().filter(|c| c.pass).count();
        }
        let suite_cases = Counts {
            total: suites.values().map(|c| c.total).sum(),
            passed: suites.values().map(|c| c.passed).sum(),
        };
        Summary {
            name: self.name.clone(),
            comparisons: Counts {
                total: self.comparisons.len(),
                passed,
            },
            suite_cases,
            suites,
            max_comparison_rel_diff: self
                .comparisons
                .iter()
                .map(|c| c.report.rel_diff)
                .filter(|v| v.is_finite())
                .fold(0.0, f64::max),
            max_suite_residual: self.suites.iter().map(|s| s.max_residual()).fold(0.0, f64::max),
            wall_time_s,
            pass: self.pass,
        }
    }

    /// Writes report.json + summary.json and/or comparisons.csv +
    /// suite_cases.csv into `dir`, each atomically.
    pub fn write(&self, dir: &Path, formats: &[Format], summary: &Summary) -> std::io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let mut put = |name: &str, text: String| -> std::io::Result<()> {
            let path = dir.join(name);
            report::write_atomic(&path, text.as_bytes())?;
            written.push(path);
            Ok(())
        };
        let json_err = |e: serde_json::Error| std::io::Error::other(e);
        let csv_err = |e: csv::Error| std::io::Error::other(e);
        if formats.contains(&Format::Json) {
            put("report.json", report::to_json(self).map_err(json_err)?)?;
            put("summary.json", report::to_json(summary).map_err(json_err)?)?;
        }
        if formats.contains(&Format::Csv) {
            put(
                "comparisons.csv",
                report::comparisons_csv(&self.comparisons).map_err(csv_err)?,
            )?;
            put("suite_cases.csv", report::suites_csv(self).map_err(csv_err)?)?;
        }
        Ok(written)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }
}

enum Job<'a> {
    Compare(&'a CompareCase),
    Nullity(&'a NullityCase),
    Locality(&'a LocalityCase),
    Decomposition(&'a DecompositionCase),
    Crack(&'a CrackCase),
}

enum Outcome {
    Compare(ComparisonRecord),
    Suite(StructureSuiteResult, Option<CrackRecord>),
}

fn failed_comparison(
    j: &str,
    m: &str,
    x: &str,
    expected: Option<f64>,
    tol: &Tolerances,
    err: &ShapeError,
) -> ComparisonRecord {
    let nan = FdEstimate {
        value: f64::NAN,
        error_estimate: f64::NAN,
        base_value: f64::NAN,
        series: Vec::new(),
    };
    let mut report = DerivativeReport::new(j, m, x, &nan, None, tol);
    report.verdict = Verdict::Fail;
    ComparisonRecord {
        report,
        expected,
        expected_abs_diff: None,
        pass: false,
        error: Some(err.to_string()),
        series: Vec::new(),
    }
}

/// Runs every enabled case. Jobs run on the current rayon pool; results
/// keep config order. Fails only on config errors.
pub fn run(cfg: &ExperimentConfig, progress: Option<&(dyn Fn(&str) + Sync)>) -> Result<ExperimentReport, ConfigError> {
    cfg.validate()?;
    let env = cfg.build_env()?;
    let scfg = cfg.suite_config();
    let tol = cfg.tolerances;
    let on = |k| cfg.suites.contains(&k);
    let c = &cfg.cases;
    let mut jobs: Vec<Job> = Vec::new();
    if on(SuiteKind::Compare) {
        jobs.extend(c.compare.iter().map(Job::Compare));
    }
    if on(SuiteKind::Nullity) {
        jobs.extend(c.nullity.iter().map(Job::Nullity));
    }
    if on(SuiteKind::Locality) {
        jobs.extend(c.locality.iter().map(Job::Locality));
    }
    if on(SuiteKind::NormalDependence) {
        jobs.extend(c.normal_dependence.iter().map(Job::Decomposition));
    }
    if on(SuiteKind::Crack) {
        jobs.extend(c.crack.iter().map(Job::Crack));
    }

    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|job| -> Result<Outcome, ConfigError> {
            let out = match job {
                Job::Compare(k) => {
                    let m = env.shape(&k.shape, "")?;
                    let j = env.functional(&k.functional, &k.shape, "")?;
                    let x = env.field(&k.field, &k.shape, "")?;
                    let tol = k.tolerances.unwrap_or(tol);
                    Outcome::Compare(match compare(&j, m, &x, &cfg.fd, &tol) {
                        Ok(cmp) => {
                            let mut report = cmp.report;
                            report.manifold = k.shape.clone();
                            let expected_abs_diff = k.expected.map(|e| {
                                let a = report.analytic_value.unwrap_or(f64::NAN);
                                (a - e).abs().max((report.fd_value - e).abs())
                            });
                            let exact_ok = match (k.expected, expected_abs_diff) {
                                (Some(e), Some(d)) => d <= tol.rel * e.abs() || d <= tol.abs,
                                _ => true,
                            };
                            ComparisonRecord {
                                pass: report.verdict.is_pass() && exact_ok,
                                report,
                                expected: k.expected,
                                expected_abs_diff,
                                error: None,
                                series: cmp.series,
                            }
                        }
                        Err(e) => failed_comparison(&k.functional, &k.shape, &k.field, k.expected, &tol, &e),
                    })
                }
                Job::Nullity(k) => {
                    let m = env.shape(&k.shape, "")?;
                    let j = env.functional(&k.functional, &k.shape, "")?;
                    let mut fields = Vec::new();
                    for (names, neg) in [(&k.fields, false), (&k.negative_controls, true)] {
                        for n in names {
                            fields.push(NullityField {
                                field: env.field(n, &k.shape, "")?,
                                negative_control: neg,
                            });
                        }
                    }
                    let mut r = tangential_nullity_suite(&j, m, &fields, &scfg);
                    r.manifold = k.shape.clone();
                    Outcome::Suite(r, None)
                }
                Job::Locality(k) => {
                    let m = env.shape(&k.shape, "")?;
                    let j = env.functional(&k.functional, &k.shape, "")?;
                    let pairs = k
                        .pairs
                        .iter()
                        .map(|p| {
                            Ok(LocalityPair {
                                x: env.field(&p.x, &k.shape, "")?,
                                y: env.field(&p.y, &k.shape, "")?,
                                negative_control: p.negative_control,
                            })
                        })
                        .collect::<Result<Vec<_>, ConfigError>>()?;
                    let mut r = locality_suite(&j, m, &pairs, &scfg);
                    r.manifold = k.shape.clone();
                    Outcome::Suite(r, None)
                }
                Job::Decomposition(k) => {
                    let m = env.shape(&k.shape, "")?;
                    let j = env.functional(&k.functional, &k.shape, "")?;
                    let mut fields = k
                        .fields
                        .iter()
                        .map(|n| env.field(n, &k.shape, ""))
                        .collect::<Result<Vec<_>, _>>()?;
                    if let Some(r) = k.random {
                        fields.extend(random_test_fields(m, r.count, r.seed));
                    }
                    let mut r = normal_dependence_suite(&j, m, &fields, &scfg);
                    r.manifold = k.shape.clone();
                    Outcome::Suite(r, None)
                }
                Job::Crack(k) => {
                    let m = env.shape(&k.shape, "")?;
                    let j = env.functional(&k.functional, &k.shape, "")?;
                    let curve = m
                        .as_curve()
                        .ok_or_else(|| ConfigError::invalid("cases.crack", "crack shape must be a curve"))?;
                    let expected = k.expected_alpha.map(|[a, b]| (a, b));
                    let (mut r, coef) = crack_suite(&j, curve, k.probe_radius, k.stations, expected, &scfg);
                    r.manifold = k.shape.clone();
                    let rec = coef.map(|coefficients| CrackRecord {
                        functional: k.functional.clone(),
                        manifold: k.shape.clone(),
                        coefficients,
                    });
                    Outcome::Suite(r, rec)
                }
            };
            if let Some(p) = progress {
                p(&match &out {
                    Outcome::Compare(c) => format!(
                        "compare {} / {} / {}: {}",
                        c.report.functional,
                        c.report.manifold,
                        c.report.field,
                        if c.pass { "pass" } else { "FAIL" }
                    ),
                    Outcome::Suite(s, _) => format!(
                        "{} {} / {}: {}",
                        s.suite,
                        s.functional,
                        s.manifold,
                        if s.pass { "pass" } else { "FAIL" }
                    ),
                });
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;

    let mut report = ExperimentReport {
        name: cfg.name.clone(),
        comparisons: Vec::new(),
        suites: Vec::new(),
        cracks: Vec::new(),
        pass: true,
    };
    for o in outcomes {
        match o {
            Outcome::Compare(c) => report.comparisons.push(c),
            Outcome::Suite(s, crack) => {
                report.suites.push(s);
                report.cracks.extend(crack);
            }
        }
    }
    report.pass = report.comparisons.iter().all(|c| c.pass) && report.suites.iter().all(|s| s.pass);
    Ok(report)
}

/// [`run`] plus wall time, for callers that write a summary.
pub fn run_timed(
    cfg: &ExperimentConfig,
    progress: Option<&(dyn Fn(&str) + Sync)>,
) -> Result<(ExperimentReport, Summary), ConfigError> {
    let start = Instant::now();
    let report = run(cfg, progress)?;
    let summary = report.summary(start.elapsed().as_secs_f64());
    Ok((report, summary))
}

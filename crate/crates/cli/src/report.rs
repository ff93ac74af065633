//! Per-point residual records, their summary and serialization.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use sdmorph::GeomError;

use crate::checks::{self, Check};
use crate::error::{CliError, CliResult, EXIT_DOMAIN, EXIT_FAIL, EXIT_OK};
use crate::scene::{sha256_hex, Built, LoadedScene};

pub const TOOL: &str = concat!("sdmorph ", env!("CARGO_PKG_VERSION"));
pub const DEFAULT_TOL: f64 = 1e-8;
pub const TOL_ENV: &str = "SDMORPH_TOL";

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    pub raw: f64,
    pub normalized: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Record {
    pub index: usize,
    pub point: Vec<f64>,
    pub results: BTreeMap<String, CheckResult>,
    /// Curvature scalars of the total metric at the point.
    pub scalars: BTreeMap<String, f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckSummary {
    pub max: f64,
    pub mean: f64,
    pub max_raw: f64,
    pub failures: usize,
    pub evaluated: usize,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    DomainError,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => EXIT_OK,
            Verdict::Fail => EXIT_FAIL,
            Verdict::DomainError => EXIT_DOMAIN,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub scene: Option<String>,
    pub scene_hash: String,
    pub seed: Option<u64>,
    pub timestamp: u64,
    pub default_tolerance: f64,
    pub checks: Vec<String>,
    pub records: Vec<Record>,
    pub summary: BTreeMap<String, CheckSummary>,
    pub verdict: Verdict,
    pub report_hash: String,
}

/// The built-in default, replaced by `SDMORPH_TOL` when set.
pub fn env_tolerance() -> CliResult<f64> {
    match std::env::var(TOL_ENV) {
        Ok(s) => {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("{TOL_ENV}={s:?} is not a number")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::usage(format!(
                    "{TOL_ENV} must be positive and finite"
                )));
            }
            Ok(v)
        }
        Err(_) => Ok(DEFAULT_TOL),
    }
}

/// Per-check thresholds: scene entries override the scene's `default`,
/// which overrides the environment/built-in default.
pub struct Tolerances {
    pub default: f64,
    per_check: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new(scene: &LoadedScene) -> CliResult<Self> {
        let mut default = env_tolerance()?;
        let mut per_check = BTreeMap::new();
        for (k, v) in &scene.scene.tolerances {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(CliError::Scene {
                    pointer: format!("/tolerances/{k}"),
                    message: "tolerance must be positive and finite".into(),
                });
            }
            if k == "default" {
                default = *v;
            } else {
                let c: Check = k.parse().map_err(|_| CliError::Scene {
                    pointer: format!("/tolerances/{k}"),
                    message: format!("unknown check '{k}'"),
                })?;
                per_check.insert(c.name().to_string(), *v);
            }
        }
        Ok(Tolerances { default, per_check })
    }

    pub fn get(&self, c: Check) -> f64 {
        self.per_check
            .get(c.name())
            .copied()
            .unwrap_or(self.default)
    }
}

fn scalars(c: &sdmorph::geometry::CurvatureReport<f64>) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("riemann_norm".into(), c.riemann_norm);
    m.insert("ricci_norm".into(), c.ricci_norm);
    m.insert("scalar_curvature".into(), c.scalar());
    m.insert("einstein_residual_norm".into(), c.einstein_residual_norm);
    m.insert("weyl_norm".into(), c.weyl_norm);
    if let (Some(p), Some(n)) = (c.w_plus_norm, c.w_minus_norm) {
        m.insert("w_plus_norm".into(), p);
        m.insert("w_minus_norm".into(), n);
    }
    m
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Evaluates `checks` at every sample point of the scene.
pub fn run(scene: &LoadedScene, built: &Built, checks: &[Check]) -> CliResult<Report> {
    checks::applicable(built, checks)?;
    let tol = Tolerances::new(scene)?;
    let total = built.setup.fm.total.clone();
    let points = scene.scene.points(&total)?;
    let fibre = scene.scene.fibre_values(&total);
    if checks.contains(&Check::TwistorialBasic)
        && fibre.len() < sdmorph::morphism::MIN_FIBRE_SAMPLES
    {
        return Err(CliError::Scene {
            pointer: "/fibre_samples".into(),
            message: format!(
                "need at least {} fibre samples",
                sdmorph::morphism::MIN_FIBRE_SAMPLES
            ),
        });
    }
    let mut records = Vec::with_capacity(points.len());
    for (index, point) in points.iter().enumerate() {
        records.push(evaluate_point(index, point, built, checks, &tol, &fibre)?);
    }
    Ok(assemble(scene, checks, tol.default, records))
}

fn evaluate_point(
    index: usize,
    point: &[f64],
    built: &Built,
    checks: &[Check],
    tol: &Tolerances,
    fibre: &[f64],
) -> CliResult<Record> {
    let mut rec = Record {
        index,
        point: point.to_vec(),
        results: BTreeMap::new(),
        scalars: BTreeMap::new(),
        error: None,
    };
    let curv = match checks::curvature(built, point) {
        Ok(c) => c,
        Err(e) if e.is_domain() => {
            rec.error = Some(e.to_string());
            return Ok(rec);
        }
        Err(e) => return Err(e.into()),
    };
    rec.scalars = scalars(&curv);
    for &c in checks {
        let t = tol.get(c);
        match checks::evaluate(c, built, &curv, point, fibre) {
            Ok(raw) => {
                let normalized = curv.normalized(raw);
                rec.results.insert(
                    c.name().into(),
                    CheckResult {
                        raw,
                        normalized,
                        tolerance: t,
                        pass: normalized < t,
                    },
                );
            }
            Err(GeomError::NotHorizontallyConformal { residual, .. }) => {
                rec.results.insert(
                    c.name().into(),
                    CheckResult {
                        raw: residual,
                        normalized: curv.normalized(residual),
                        tolerance: t,
                        pass: false,
                    },
                );
            }
            Err(e) if e.is_domain() => {
                rec.error = Some(format!("{c}: {e}"));
                return Ok(rec);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rec)
}

fn assemble(
    scene: &LoadedScene,
    checks: &[Check],
    default_tol: f64,
    records: Vec<Record>,
) -> Report {
    let mut summary = BTreeMap::new();
    for c in checks {
        let vals: Vec<&CheckResult> = records
            .iter()
            .filter_map(|r| r.results.get(c.name()))
            .collect();
        let n = vals.len();
        let max = vals.iter().fold(0.0f64, |m, r| m.max(r.normalized));
        let max_raw = vals.iter().fold(0.0f64, |m, r| m.max(r.raw));
        let mean = if n == 0 {
            0.0
        } else {
            vals.iter().map(|r| r.normalized).sum::<f64>() / n as f64
        };
        summary.insert(
            c.name().to_string(),
            CheckSummary {
                max,
                mean,
                max_raw,
                failures: vals.iter().filter(|r| !r.pass).count(),
                evaluated: n,
            },
        );
    }
    let verdict = if records.iter().any(|r| r.error.is_some()) {
        Verdict::DomainError
    } else if records.iter().any(|r| r.results.values().any(|v| !v.pass)) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let mut report = Report {
        schema: crate::scene::SCHEMA,
        tool: TOOL.to_string(),
        scene: scene.scene.name.clone(),
        scene_hash: scene.hash(),
        seed: scene.seed(),
        timestamp: unix_time(),
        default_tolerance: default_tol,
        checks: checks.iter().map(|c| c.name().to_string()).collect(),
        records,
        summary,
        verdict,
        report_hash: String::new(),
    };
    report.report_hash = report.content_hash();
    report
}

impl Report {
    /// SHA-256 of the canonical JSON with `timestamp` and `report_hash`
    /// removed.
    pub fn content_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timestamp");
            m.remove("report_hash");
        }
        sha256_hex(
            serde_json::to_string(&v)
                .expect("JSON values serialize")
                .as_bytes(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_csv(&self) -> String {
        let dim = self.records.first().map_or(0, |r| r.point.len());
        let mut head: Vec<String> = vec!["index".into()];
        head.extend((0..dim).map(|k| format!("x{k}")));
        for c in &self.checks {
            head.push(format!("{c}_raw"));
            head.push(format!("{c}_normalized"));
            head.push(format!("{c}_pass"));
        }
        head.push("error".into());
        let mut out = head.join(",");
        out.push('\n');
        for r in &self.records {
            let mut row: Vec<String> = vec![r.index.to_string()];
            row.extend(r.point.iter().map(|v| format!("{v:e}")));
            for c in &self.checks {
                match r.results.get(c) {
                    Some(v) => {
                        row.push(format!("{:e}", v.raw));
                        row.push(format!("{:e}", v.normalized));
                        row.push(v.pass.to_string());
                    }
                    None => row.extend(["".into(), "".into(), "".into()]),
                }
            }
            row.push(r.error.as_deref().map(csv_quote).unwrap_or_default());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

use std::io::Write;

use serde_json::{json, Value};

use sdmorph::constructions::catalog::{self, Params, ENTRIES};
use sdmorph::morphism::{Classification, TypeLabel};

use crate::checks::{self, Check};
use crate::error::{CliError, CliResult, EXIT_FAIL, EXIT_OK};
use crate::report::{self, Report, Verdict};
use crate::scene::LoadedScene;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn emit(text: &str, out: Option<&str>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        }),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
    }
}

fn failures_to_stderr(report: &Report) {
    for r in &report.records {
        if let Some(e) = &r.error {
            eprintln!("point {} {:?}: {e}", r.index, r.point);
        }
        for (name, v) in &r.results {
            if !v.pass {
                eprintln!(
                    "point {} {:?}: {name} failed (normalized {:e} >= {:e})",
                    r.index, r.point, v.normalized, v.tolerance
                );
            }
        }
    }
}

/// Runs the scene's own checks.
pub fn report(scene_path: &str, format: Format, out: Option<&str>) -> CliResult<i32> {
    let scene = LoadedScene::load(scene_path)?;
    let checks = checks::parse_list(scene.scene.checks.iter().map(String::as_str))?;
    let built = scene.scene.build()?;
    let rep = report::run(&scene, &built, &checks)?;
    emit(&render(&rep, format), out)?;
    failures_to_stderr(&rep);
    Ok(rep.verdict.exit_code())
}

/// Runs an explicit list of checks instead of the scene's.
pub fn verify(scene_path: &str, checks: &str, format: Format, out: Option<&str>) -> CliResult<i32> {
    let list = checks::parse_list(checks.split(','))?;
    if list.is_empty() {
        return Err(CliError::usage("--checks needs at least one check name"));
    }
    let scene = LoadedScene::load(scene_path)?;
    let built = scene.scene.build()?;
    let rep = report::run(&scene, &built, &list)?;
    emit(&render(&rep, format), out)?;
    failures_to_stderr(&rep);
    Ok(rep.verdict.exit_code())
}

fn classification_json(c: &Classification<f64>) -> Value {
    let e = &c.evidence;
    let recovered = match c.label {
        TypeLabel::Type4 { c } => Some(c),
        _ => None,
    };
    json!({
        "label": c.label.as_str(),
        "c": recovered,
        "evidence": {
            "dilation_sq_inv": e.dilation_sq_inv,
            "v_lambda": e.v_lambda,
            "v_log_v_lambda": e.v_log_v_lambda.iter().map(|v| if v.is_finite() { json!(v) } else { Value::Null }).collect::<Vec<_>>(),
            "a": e.a,
            "c_samples": e.c,
            "fundamental_eq": e.fundamental,
            "defect_basic": e.defect_basic,
            "defect_closed": e.defect_closed,
            "twistorial_basic": e.twistorial_basic,
            "twistorial_sd": e.twistorial_sd,
            "integrability": e.integrability,
            "horizontal_log_spread": e.horizontal_log_spread,
        }
    })
}

/// Classifies along the fibre through the first sample point.
pub fn classify(scene_path: &str, out: Option<&str>) -> CliResult<i32> {
    let scene = LoadedScene::load(scene_path)?;
    let built = scene.scene.build()?;
    let total = built.setup.fm.total.clone();
    let tol = report::Tolerances::new(&scene)?.default;
    let first = scene.scene.points(&total)?.remove(0);
    let pts: Vec<Vec<f64>> = scene
        .scene
        .fibre_values(&total)
        .iter()
        .map(|t| {
            let mut q = first.clone();
            q[0] = *t;
            q
        })
        .collect();
    let c = built.setup.classify_type(&pts, tol)?;
    let mut v = classification_json(&c);
    v["scene"] = json!(scene.scene.name);
    v["scene_hash"] = json!(scene.hash());
    v["base_point"] = json!(&first[1..]);
    v["fibre_samples"] = json!(pts.iter().map(|p| p[0]).collect::<Vec<_>>());
    let mut text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    text.push('\n');
    emit(&text, out)?;
    Ok(if c.label == TypeLabel::Nonstandard {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}

/// Parses `lo:hi`.
pub fn parse_range(s: &str) -> CliResult<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("range '{s}' is not of the form lo:hi")))?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("bad range start '{a}'")))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("bad range end '{b}'")))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::usage("range ends must be finite"));
    }
    Ok((lo, hi))
}

/// Sets the number at a dot-separated path, creating missing object keys.
pub fn set_param(value: &mut Value, path: &str, x: f64) -> CliResult<()> {
    let mut cur = value;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::usage(format!("bad parameter path '{path}'")));
    }
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(m) => {
                if !m.contains_key(*part) {
                    if last {
                        m.insert(part.to_string(), json!(0.0));
                    } else {
                        m.insert(part.to_string(), json!({}));
                    }
                }
                m.get_mut(*part).expect("inserted above")
            }
            Value::Array(a) => {
                let k: usize = part.parse().map_err(|_| {
                    CliError::usage(format!("'{part}' in '{path}' is not an array index"))
                })?;
                let n = a.len();
                a.get_mut(k).ok_or_else(|| {
                    CliError::usage(format!("index {k} out of range ({n}) in '{path}'"))
                })?
            }
            _ => {
                return Err(CliError::usage(format!(
                    "'{path}' does not address a scene value"
                )))
            }
        };
    }
    if !cur.is_number() {
        return Err(CliError::usage(format!("'{path}' is not numeric")));
    }
    *cur = json!(x);
    Ok(())
}

/// Worst normalized residual per check, or `None` on a domain error.
fn sweep_point(
    base: &LoadedScene,
    path: &str,
    x: f64,
    checks: &[Check],
) -> CliResult<Option<Report>> {
    let mut v = base.value.clone();
    set_param(&mut v, path, x)?;
    let scene = LoadedScene::from_value(v)?;
    let built = match scene.scene.build() {
        Ok(b) => b,
        Err(CliError::Domain(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    match report::run(&scene, &built, checks) {
        Ok(r) => Ok(Some(r)),
        Err(CliError::Domain(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub struct SweepArgs<'a> {
    pub scene: &'a str,
    pub param: &'a str,
    pub range: &'a str,
    pub steps: usize,
    pub refine: bool,
    pub out: Option<&'a str>,
}

/// Table of the worst normalized residual of every scene check across a
/// parameter range; with `refine`, also a golden-section minimum of the
/// first check.
pub fn sweep(args: SweepArgs<'_>) -> CliResult<i32> {
    if args.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let (lo, hi) = parse_range(args.range)?;
    let scene = LoadedScene::load(args.scene)?;
    let checks = checks::parse_list(scene.scene.checks.iter().map(String::as_str))?;
    if checks.is_empty() {
        return Err(CliError::usage(
            "sweep needs a scene with at least one check",
        ));
    }
    // validate the path once up front
    set_param(&mut scene.value.clone(), args.param, lo)?;
    let mut text = format!(
        "{},{},verdict\n",
        args.param,
        checks
            .iter()
            .map(|c| c.name())
            .collect::<Vec<_>>()
            .join(",")
    );
    for i in 0..args.steps {
        let x = if args.steps == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (args.steps - 1) as f64
        };
        let row = match sweep_point(&scene, args.param, x, &checks)? {
            Some(r) => {
                let cells: Vec<String> = checks
                    .iter()
                    .map(|c| format!("{:e}", r.summary[c.name()].max))
                    .collect();
                let verdict = match r.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "fail",
                    Verdict::DomainError => "domain_error",
                };
                format!("{x:e},{},{verdict}", cells.join(","))
            }
            None => format!("{x:e},{},domain_error", vec![""; checks.len()].join(",")),
        };
        text.push_str(&row);
        text.push('\n');
    }
    if args.refine {
        let first = checks[0];
        let objective = |x: f64| -> sdmorph::Result<f64> {
            match sweep_point(&scene, args.param, x, &[first]) {
                Ok(Some(r)) if r.summary[first.name()].evaluated > 0 => {
                    Ok(r.summary[first.name()].max)
                }
                _ => Ok(f64::INFINITY),
            }
        };
        let tol = 1e-10 * (hi - lo).abs().max(1.0);
        let (xm, fm) = sdmorph::weyl3::golden_min(objective, lo.min(hi), lo.max(hi), tol)?;
        text.push_str(&format!(
            "# minimum of {first}: {} = {xm:e}, residual {fm:e}\n",
            args.param
        ));
    }
    emit(&text, args.out)?;
    Ok(EXIT_OK)
}

pub fn catalog_list(json_out: bool) -> CliResult<i32> {
    let text = if json_out {
        let v: Vec<Value> = ENTRIES.iter().map(entry_json).collect();
        let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for e in ENTRIES {
            let params: Vec<String> = e
                .params
                .iter()
                .map(|p| format!("{}={}", p.name, p.default))
                .collect();
            s.push_str(&format!(
                "{:<22} {:<9} {:<10} {}\n",
                e.name,
                e.kind.as_str(),
                format!("{:?}", e.coords).to_lowercase(),
                params.join(" ")
            ));
        }
        s
    };
    emit(&text, None)?;
    Ok(EXIT_OK)
}

fn entry_json(e: &catalog::Entry) -> Value {
    json!({
        "name": e.name,
        "kind": e.kind.as_str(),
        "coordinates": format!("{:?}", e.coords).to_lowercase(),
        "formula": e.formula,
        "params": e.params.iter().map(|p| json!({"name": p.name, "default": p.default, "doc": p.doc})).collect::<Vec<_>>(),
    })
}

/// Formula, parameters and the entry's own validation residual.
pub fn catalog_describe(name: &str, params: &Params) -> CliResult<i32> {
    let e = catalog::entry(name).map_err(|err| CliError::usage(err.to_string()))?;
    let val = catalog::validate(name, params)?;
    let tol = report::env_tolerance()?;
    let mut v = entry_json(e);
    v["validation"] = json!({
        "check": val.check,
        "residual": val.residual,
        "tolerance": tol,
        "pass": val.residual < tol,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    emit(&s, None)?;
    Ok(if val.residual < tol {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

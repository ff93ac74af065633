//! Scene files: a construction built from catalog entries, sample points
//! and the checks to run on them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use sdmorph::constructions::catalog::{self, Params};
use sdmorph::constructions::{type4_normalize, Family, FibrationMetric, Fibre};
use sdmorph::geometry::Field;
use sdmorph::morphism::SubmersionSetup;
use sdmorph::{Chart, FormField, Jet, MetricField, ScalarField};

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub construction: Construction,
    #[serde(default = "default_orientation")]
    pub orientation: i8,
    pub samples: Samples,
    /// Fibre coordinates used for fibre-wise checks and classification.
    #[serde(default)]
    pub fibre_samples: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub checks: Vec<String>,
    /// Basic conformal factor applied to the metric after construction.
    #[serde(default)]
    pub rescale: Option<EntryRef>,
    /// `(u, A, α)` on the base for the pull-back connection and closure checks.
    #[serde(default)]
    pub pair: Option<Pair>,
    /// Base one-form used by the monopole and Einstein–Weyl checks; defaults
    /// to the construction's Lee form (zero when it has none).
    #[serde(default)]
    pub lee_form: Option<EntryRef>,
    /// Sign `s` in `dA = s·*A` for the Beltrami check on type 3 data.
    #[serde(default)]
    pub beltrami_sign: Option<i8>,
}

fn default_orientation() -> i8 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pair {
    pub u: EntryRef,
    pub a: EntryRef,
    #[serde(default)]
    pub alpha: Option<EntryRef>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    /// `g = u·φ*h + u⁻¹(dτ + A)²`.
    JonesTod {
        base: EntryRef,
        u: EntryRef,
        a: EntryRef,
        fibre: FibreSpec,
    },
    /// `g = λ⁻²φ*h + λ²(dτ + A)²` with a basic `λ`.
    Bryant {
        base: EntryRef,
        lambda: EntryRef,
        a: EntryRef,
        fibre: FibreSpec,
    },
    /// `g = e^{rate·τ}·s·φ*h + dτ²` with `s` a basic factor (default 1).
    Type2 {
        base: EntryRef,
        #[serde(default = "default_rate")]
        rate: f64,
        #[serde(default)]
        factor: Option<EntryRef>,
        fibre: FibreSpec,
    },
    Type3 {
        base: EntryRef,
        a: EntryRef,
        fibre: FibreSpec,
    },
    Type4 {
        base: EntryRef,
        alpha: EntryRef,
        c: EntryRef,
        fibre: FibreSpec,
        #[serde(default)]
        normalize: bool,
    },
}

fn default_rate() -> f64 {
    2.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Samples {
    Points(Vec<Vec<f64>>),
    Grid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        counts: Vec<usize>,
    },
    Random {
        count: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        lo: Option<Vec<f64>>,
        #[serde(default)]
        hi: Option<Vec<f64>>,
    },
}

/// A parsed scene together with its canonical JSON form.
#[derive(Clone, Debug)]
pub struct LoadedScene {
    pub scene: Scene,
    pub value: Value,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl LoadedScene {
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Scene {
            pointer: "/".into(),
            message: e.to_string(),
        })?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> CliResult<Self> {
        let scene: Scene =
            serde_path_to_error::deserialize(value.clone()).map_err(|e| CliError::Scene {
                pointer: pointer(e.path()),
                message: e.inner().to_string(),
            })?;
        if scene.schema != SCHEMA {
            return Err(CliError::Scene {
                pointer: "/schema".into(),
                message: format!("unsupported schema {}, expected {SCHEMA}", scene.schema),
            });
        }
        if scene.orientation != 1 && scene.orientation != -1 {
            return Err(CliError::Scene {
                pointer: "/orientation".into(),
                message: "orientation must be +1 or -1".into(),
            });
        }
        Ok(LoadedScene { scene, value })
    }

    pub fn load(path: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// SHA-256 of the canonical (key-sorted, whitespace-free) scene JSON.
    pub fn hash(&self) -> String {
        sha256_hex(
            serde_json::to_string(&self.value)
                .expect("JSON values serialize")
                .as_bytes(),
        )
    }

    pub fn seed(&self) -> Option<u64> {
        match &self.scene.samples {
            Samples::Random { seed, .. } => *seed,
            _ => None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The construction and the auxiliary fields the checks need.
#[derive(Clone, Debug)]
pub struct Built {
    pub setup: SubmersionSetup<f64>,
    pub family: Family,
    /// Lee form on the base for the monopole and Einstein–Weyl checks.
    pub lee_form: FormField,
    /// Beltrami data: the one-form and either a sign or the function `c`.
    pub beltrami: Option<(FormField, Beltrami)>,
    pub pair: Option<(ScalarField, FormField, FormField)>,
}

#[derive(Clone, Debug)]
pub enum Beltrami {
    Sign(i8),
    Generalized(ScalarField),
}

fn params(e: &EntryRef) -> Params {
    e.params.clone()
}

fn base_metric(e: &EntryRef, orientation: i8) -> CliResult<MetricField> {
    let h = catalog::base_metric::<f64>(&e.name, &params(e))?;
    let chart = h.chart().clone().with_orientation(orientation);
    Ok(h.on_chart(chart)?)
}

fn one_form(e: &EntryRef, chart: &Chart) -> CliResult<FormField> {
    Ok(catalog::one_form(&e.name, &params(e), chart)?)
}

fn scalar(e: &EntryRef, chart: &Chart) -> CliResult<ScalarField> {
    Ok(catalog::scalar(&e.name, &params(e), chart)?)
}

fn fibre(f: &FibreSpec) -> Fibre<f64> {
    Fibre::new(&f.name, f.lo, f.hi)
}

impl Scene {
    pub fn build(&self) -> CliResult<Built> {
        let o = self.orientation;
        let zero = |chart: &Chart| catalog::one_form::<f64>("zero", &Params::new(), chart);
        let (fm, lee, beltrami) = match &self.construction {
            Construction::JonesTod {
                base,
                u,
                a,
                fibre: f,
            } => {
                let h = base_metric(base, o)?;
                let fm = FibrationMetric::jones_tod(
                    &h,
                    &scalar(u, h.chart())?,
                    &one_form(a, h.chart())?,
                    fibre(f),
                )?;
                (fm, zero(h.chart())?, None)
            }
            Construction::Bryant {
                base,
                lambda,
                a,
                fibre: f,
            } => {
                let h = base_metric(base, o)?;
                let total = h.chart().with_fibre(&f.name, f.lo, f.hi)?;
                let lam = scalar(lambda, h.chart())?.pullback(&total)?;
                let fm = FibrationMetric::bryant(&h, &lam, &one_form(a, h.chart())?, fibre(f))?;
                (fm, zero(h.chart())?, None)
            }
            Construction::Type2 {
                base,
                rate,
                factor,
                fibre: f,
            } => {
                let h = base_metric(base, o)?;
                let total = h.chart().with_fibre(&f.name, f.lo, f.hi)?;
                let s = match factor {
                    Some(e) => scalar(e, h.chart())?,
                    None => catalog::scalar("constant", &Params::new(), h.chart())?,
                }
                .pullback(&total)?;
                let k = *rate;
                let warp = Field::new(total, move |x: &[Jet]| (x[0] * k).exp() * s.apply(x));
                let fm = FibrationMetric::type2_warped(&h, &warp, fibre(f))?;
                (fm, zero(h.chart())?, None)
            }
            Construction::Type3 { base, a, fibre: f } => {
                let h = base_metric(base, o)?;
                let a = one_form(a, h.chart())?;
                let fm = FibrationMetric::type3(&h, &a, fibre(f))?;
                let sign = self.beltrami_sign.unwrap_or(-1);
                if sign != 1 && sign != -1 {
                    return Err(CliError::Scene {
                        pointer: "/beltrami_sign".into(),
                        message: "must be +1 or -1".into(),
                    });
                }
                (fm, zero(h.chart())?, Some((a, Beltrami::Sign(sign))))
            }
            Construction::Type4 {
                base,
                alpha,
                c,
                fibre: f,
                normalize,
            } => {
                let h = base_metric(base, o)?;
                let al = one_form(alpha, h.chart())?;
                let cf = scalar(c, h.chart())?;
                let fm = FibrationMetric::type4(&h, &al, &cf, fibre(f))?;
                if *normalize {
                    let n = type4_normalize(&fm)?;
                    let m = n.metric;
                    let al = m.data.alpha.clone().expect("type4 keeps α");
                    let cf = m.data.c.clone().expect("type4 keeps c");
                    (m, al.clone(), Some((al, Beltrami::Generalized(cf))))
                } else {
                    (fm, al.clone(), Some((al, Beltrami::Generalized(cf))))
                }
            }
        };
        let fm = match &self.rescale {
            Some(e) => fm.rescaled(&scalar(e, &fm.base)?)?,
            None => fm,
        };
        let lee_form = match &self.lee_form {
            Some(e) => one_form(e, &fm.base)?,
            None => lee,
        };
        let pair = match (&self.pair, &self.construction) {
            (Some(p), _) => {
                let alpha = match &p.alpha {
                    Some(e) => one_form(e, &fm.base)?,
                    None => zero(&fm.base)?,
                };
                Some((scalar(&p.u, &fm.base)?, one_form(&p.a, &fm.base)?, alpha))
            }
            (None, Construction::JonesTod { .. }) => Some((
                fm.data.u.clone().expect("Jones–Tod keeps u"),
                fm.data.a.clone().expect("Jones–Tod keeps A"),
                zero(&fm.base)?,
            )),
            _ => None,
        };
        Ok(Built {
            family: fm.family,
            setup: SubmersionSetup::new(fm)?,
            lee_form,
            beltrami,
            pair,
        })
    }

    /// Sample points on the total chart, in a fixed order.
    pub fn points(&self, total: &Chart) -> CliResult<Vec<Vec<f64>>> {
        let dim = total.dim();
        let check_len = |v: &[f64], what: &str| -> CliResult<()> {
            if v.len() != dim {
                return Err(CliError::Scene {
                    pointer: format!("/samples/{what}"),
                    message: format!("expected {dim} coordinates, got {}", v.len()),
                });
            }
            Ok(())
        };
        match &self.samples {
            Samples::Points(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    check_len(p, &format!("points/{i}"))?;
                }
                if ps.is_empty() {
                    return Err(CliError::usage("scene lists no sample points"));
                }
                Ok(ps.clone())
            }
            Samples::Grid { lo, hi, counts } => {
                check_len(lo, "grid/lo")?;
                check_len(hi, "grid/hi")?;
                if counts.len() != dim || counts.contains(&0) {
                    return Err(CliError::Scene {
                        pointer: "/samples/grid/counts".into(),
                        message: format!("need {dim} positive counts"),
                    });
                }
                let mut out = vec![Vec::new()];
                for k in 0..dim {
                    let n = counts[k];
                    let vals: Vec<f64> = (0..n)
                        .map(|i| {
                            if n == 1 {
                                0.5 * (lo[k] + hi[k])
                            } else {
                                lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64
                            }
                        })
                        .collect();
                    out = out
                        .into_iter()
                        .flat_map(|p| {
                            vals.iter().map(move |v| {
                                let mut q = p.clone();
                                q.push(*v);
                                q
                            })
                        })
                        .collect();
                }
                Ok(out)
            }
            Samples::Random {
                count,
                seed,
                lo,
                hi,
            } => {
                let seed = seed.ok_or_else(|| CliError::Scene {
                    pointer: "/samples/random/seed".into(),
                    message: "random sampling needs an explicit seed".into(),
                })?;
                if *count == 0 {
                    return Err(CliError::usage("random sampling needs count > 0"));
                }
                let lo = lo.clone().unwrap_or_else(|| total.lo().to_vec());
                let hi = hi.clone().unwrap_or_else(|| total.hi().to_vec());
                check_len(&lo, "random/lo")?;
                check_len(&hi, "random/hi")?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..*count)
                    .map(|_| {
                        (0..dim)
                            .map(|k| lo[k] + (hi[k] - lo[k]) * rng.random::<f64>())
                            .collect()
                    })
                    .collect())
            }
        }
    }

    /// Fibre coordinates for fibre-wise checks: the scene's list, or five
    /// evenly spaced interior values of the fibre range.
    pub fn fibre_values(&self, total: &Chart) -> Vec<f64> {
        match &self.fibre_samples {
            Some(v) => v.clone(),
            None => {
                let (lo, hi) = (total.lo()[0], total.hi()[0]);
                (1..=5).map(|i| lo + (hi - lo) * i as f64 / 6.0).collect()
            }
        }
    }
}

//! Named residual checks evaluated at a sample point.

use std::fmt;
use std::str::FromStr;

use sdmorph::geometry::curvature::{report_from_geometry, sectional_spread, CurvatureReport};
use sdmorph::geometry::PointGeometry;
use sdmorph::weyl3::{
    beltrami_residual, einstein_weyl_residual, generalized_beltrami_residual,
    potential_closure_residual, WeylStructure3,
};
use sdmorph::{GeomError, Result};

use crate::error::CliError;
use crate::scene::{Beltrami, Built};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Riemann,
    Ricci,
    Einstein,
    Weyl,
    WMinus,
    WPlus,
    SectionalSpread,
    FundamentalEq,
    TwistorialBasic,
    TwistorialSd,
    Monopole,
    EinsteinWeyl,
    Beltrami,
    PullbackSd,
    Closure,
}

pub const ALL: &[Check] = &[
    Check::Riemann,
    Check::Ricci,
    Check::Einstein,
    Check::Weyl,
    Check::WMinus,
    Check::WPlus,
    Check::SectionalSpread,
    Check::FundamentalEq,
    Check::TwistorialBasic,
    Check::TwistorialSd,
    Check::Monopole,
    Check::EinsteinWeyl,
    Check::Beltrami,
    Check::PullbackSd,
    Check::Closure,
];

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Riemann => "riemann",
            Check::Ricci => "ricci",
            Check::Einstein => "einstein",
            Check::Weyl => "weyl",
            Check::WMinus => "w_minus",
            Check::WPlus => "w_plus",
            Check::SectionalSpread => "sectional_spread",
            Check::FundamentalEq => "fundamental_eq",
            Check::TwistorialBasic => "twistorial_basic",
            Check::TwistorialSd => "twistorial_sd",
            Check::Monopole => "monopole",
            Check::EinsteinWeyl => "einstein_weyl",
            Check::Beltrami => "beltrami",
            Check::PullbackSd => "pullback_sd",
            Check::Closure => "closure",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = CliError;

    fn from_str(s: &str) -> std::result::Result<Self, CliError> {
        ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ALL.iter().map(|c| c.name()).collect();
            CliError::usage(format!("unknown check '{s}' (known: {})", names.join(", ")))
        })
    }
}

pub fn parse_list<'a>(
    names: impl IntoIterator<Item = &'a str>,
) -> std::result::Result<Vec<Check>, CliError> {
    let mut out: Vec<Check> = Vec::new();
    for n in names {
        let n = n.trim();
        if n.is_empty() {
            continue;
        }
        let c: Check = n.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Rejects checks the construction has no data for, before any point is
/// evaluated.
pub fn applicable(built: &Built, checks: &[Check]) -> std::result::Result<(), CliError> {
    for c in checks {
        let missing = match c {
            Check::Beltrami => built.beltrami.is_none(),
            Check::PullbackSd | Check::Closure => built.pair.is_none(),
            _ => false,
        };
        if missing {
            return Err(CliError::usage(format!(
                "check '{c}' needs data the {} construction does not provide (add a 'pair' for pullback_sd/closure)",
                built.family
            )));
        }
    }
    Ok(())
}

/// Curvature of the total metric at a point, shared by every check there.
pub fn curvature(built: &Built, point: &[f64]) -> Result<CurvatureReport<f64>> {
    let pg = PointGeometry::new(&built.setup.fm.g, point)?;
    report_from_geometry(&pg)
}

/// Raw residual of one check.
pub fn evaluate(
    check: Check,
    built: &Built,
    curv: &CurvatureReport<f64>,
    point: &[f64],
    fibre: &[f64],
) -> Result<f64> {
    let s = &built.setup;
    let base = &point[1..];
    let dim4 = |v: Option<f64>| {
        v.ok_or(GeomError::Dimension {
            expected: 4,
            got: 3,
        })
    };
    match check {
        Check::Riemann => Ok(curv.riemann_norm),
        Check::Ricci => Ok(curv.ricci_norm),
        Check::Einstein => Ok(curv.einstein_residual_norm),
        Check::Weyl => Ok(curv.weyl_norm),
        Check::WMinus => dim4(curv.w_minus_norm),
        Check::WPlus => dim4(curv.w_plus_norm),
        Check::SectionalSpread => {
            let pg = PointGeometry::new(&s.fm.g, point)?;
            sectional_spread(&curv.riemann, &pg)
        }
        Check::FundamentalEq => s.fundamental_eq_residual(point),
        Check::TwistorialBasic => {
            let pts: Vec<Vec<f64>> = fibre
                .iter()
                .map(|t| {
                    let mut q = point.to_vec();
                    q[0] = *t;
                    q
                })
                .collect();
            s.twistorial_basic_residual(&pts)
        }
        Check::TwistorialSd => s.twistorial_sd_residual(point),
        Check::Monopole => s.monopole_eq_residual(&built.lee_form, point),
        Check::EinsteinWeyl => {
            let w = WeylStructure3::new(s.fm.h.clone(), built.lee_form.clone())?;
            einstein_weyl_residual(&w, base)
        }
        Check::Beltrami => {
            let (form, kind) = built.beltrami.as_ref().expect("checked by applicable()");
            let w = WeylStructure3::new(s.fm.h.clone(), form.clone())?;
            match kind {
                Beltrami::Sign(sign) => beltrami_residual(&w, *sign, base),
                Beltrami::Generalized(c) => generalized_beltrami_residual(&w, c, base),
            }
        }
        Check::PullbackSd => {
            let (u, a, alpha) = built.pair.as_ref().expect("checked by applicable()");
            Ok(s.pullback_connection(u, a, alpha, point)?.asd)
        }
        Check::Closure => {
            let (u, _, _) = built.pair.as_ref().expect("checked by applicable()");
            potential_closure_residual(&s.fm.h, u, base)
        }
    }
}

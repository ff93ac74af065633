use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdmorph::constructions::catalog::{self, Params};
use sdmorph::constructions::{FibrationMetric, Fibre};
use sdmorph::geometry::curvature::{sectional_spread, Riemann};
use sdmorph::geometry::field::{conformal_rescale, diagonal_metric, flat_metric};
use sdmorph::geometry::forms::{inner, norm};
use sdmorph::geometry::Field;
use sdmorph::geometry::{
    curvature_report, exterior_derivative, hodge_star, sd_asd_split, wedge, Form, PointGeometry,
};
use sdmorph::{Chart, Jet};

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn berger(a: f64) -> sdmorph::MetricField {
    catalog::base_metric("berger_s3", &params(&[("a", a)])).unwrap()
}

fn random_form(r: &mut ChaCha8Rng, dim: usize, degree: usize) -> Form<f64> {
    let mut f = Form::zero(dim, degree);
    for m in sdmorph::geometry::forms::masks(dim, degree) {
        f.set(m, r.random_range(-1.0..1.0));
    }
    f
}

#[test]
fn star_is_an_involution_in_three_and_four_dimensions() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let h = berger(0.7);
    let pg = PointGeometry::new(&h, &[0.2, 1.0, -0.4]).unwrap();
    let hd = pg.hodge();
    for k in 0..=3 {
        let w = random_form(&mut r, 3, k);
        assert!(
            hodge_star(&hodge_star(&w, &hd), &hd).sub(&w).max_abs() < 1e-12,
            "degree {k}"
        );
    }
    let g = curvy_four_metric();
    let pg = PointGeometry::new(&g, &[0.3, 0.2, -0.1, 0.4]).unwrap();
    let hd = pg.hodge();
    let w = random_form(&mut r, 4, 2);
    assert!(hodge_star(&hodge_star(&w, &hd), &hd).sub(&w).max_abs() < 1e-12);
    let (sd, asd) = sd_asd_split(&w, &hd).unwrap();
    assert!(hodge_star(&sd, &hd).sub(&sd).max_abs() < 1e-12);
    assert!(hodge_star(&asd, &hd).add(&asd).max_abs() < 1e-12);
    assert!(inner(&sd, &asd, &hd).abs() < 1e-12);
}

#[test]
fn wedge_with_star_gives_norm_times_volume() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let g = curvy_four_metric();
    let pg = PointGeometry::new(&g, &[0.1, -0.2, 0.3, 0.1]).unwrap();
    let hd = pg.hodge();
    for k in 1..=3 {
        let w = random_form(&mut r, 4, k);
        let top = wedge(&w, &hodge_star(&w, &hd));
        let n = norm(&w, &hd);
        assert!(
            (top.at(0b1111) - n * n * hd.sqrt_det).abs() < 1e-12,
            "degree {k}"
        );
    }
}

fn curvy_four_metric() -> sdmorph::MetricField {
    let chart = Chart::new(&["a", "b", "c", "d"], &[-1.0; 4], &[1.0; 4]).unwrap();
    sdmorph::geometry::field::metric_from_upper(chart, |x: &[Jet]| {
        let one = Jet::constant(1.0);
        let z = Jet::constant(0.0);
        vec![
            one + x[1] * x[1] * 0.3,
            x[2] * 0.1,
            z,
            x[0].sin() * 0.1,
            one + x[3].exp() * 0.2,
            x[0] * 0.05,
            z,
            one * 1.5,
            x[1] * x[3] * 0.1,
            one + x[2].cos() * 0.2,
        ]
    })
}

#[test]
fn d_squared_vanishes_on_catalog_forms() {
    let flat = catalog::base_metric::<f64>("flat3_spherical", &Params::new()).unwrap();
    let b = catalog::one_form("dirac_theta", &Params::new(), flat.chart()).unwrap();
    let u = catalog::scalar("gh_potential", &Params::new(), flat.chart()).unwrap();
    let p = [1.3, 0.8, 0.4];
    let ddb = exterior_derivative(&exterior_derivative(&b.eval(&p).unwrap()));
    assert!(ddb.max_abs() < 1e-14);
    let ddu = exterior_derivative(&exterior_derivative(&Form::scalar(3, u.eval(&p).unwrap())));
    assert!(ddu.max_abs() < 1e-14);
    let h = berger(1.0);
    for idx in [1.0, 2.0, 3.0] {
        let s = catalog::one_form("euler_sigma", &params(&[("index", idx)]), h.chart()).unwrap();
        let d2 = exterior_derivative(&exterior_derivative(&s.eval(&[0.4, 1.2, -0.3]).unwrap()));
        assert!(d2.max_abs() < 1e-14);
    }
}

#[test]
fn round_spheres_have_expected_scalar_curvature() {
    let s2 = diagonal_metric(
        Chart::new(&["t", "p"], &[0.1, -3.0], &[3.0, 3.0]).unwrap(),
        |x: &[Jet]| vec![Jet::constant(1.0), x[0].sin().square()],
    );
    for t in [0.3, 1.0, 2.5] {
        let r = Riemann::from_geometry(&PointGeometry::new(&s2, &[t, 0.0]).unwrap());
        assert!((r.scalar - 2.0).abs() < 1e-10);
    }
    let s3 = catalog::base_metric::<f64>("euler_s3", &Params::new()).unwrap();
    let r = Riemann::from_geometry(&PointGeometry::new(&s3, &[0.5, 0.9, 2.0]).unwrap());
    assert!((r.scalar - 6.0).abs() < 1e-10);
}

#[test]
fn berger_scalar_curvature_matches_closed_form() {
    for a in [0.5, 0.8, 1.3] {
        let r = Riemann::from_geometry(&PointGeometry::new(&berger(a), &[0.5, 0.9, 2.0]).unwrap());
        assert!((r.scalar - (8.0 - 2.0 * a * a)).abs() < 1e-10, "a={a}");
    }
}

#[test]
fn conformally_flat_sphere_has_constant_sectional_curvature() {
    let chart = Chart::new(&["x", "y", "z"], &[-2.0; 3], &[2.0; 3]).unwrap();
    let f = Field::new(chart.clone(), |x: &[Jet]| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        (r2 * 0.25 + 1.0).powi(-2)
    });
    let g = conformal_rescale(&flat_metric(chart), &f).unwrap();
    let pg = PointGeometry::new(&g, &[0.5, -0.3, 1.1]).unwrap();
    let r = Riemann::from_geometry(&pg);
    assert!(sectional_spread(&r, &pg).unwrap() < 1e-12);
    assert!((r.scalar - 6.0).abs() < 1e-10);
}

#[test]
fn flat_space_in_polar_coordinates_is_flat() {
    let h = catalog::base_metric::<f64>("flat3_spherical", &Params::new()).unwrap();
    let one = catalog::scalar("constant", &Params::new(), h.chart()).unwrap();
    let zero = catalog::one_form("zero", &Params::new(), h.chart()).unwrap();
    let fm = FibrationMetric::jones_tod(&h, &one, &zero, Fibre::new("t", -1.0, 1.0)).unwrap();
    let c = curvature_report(&fm.g, &[0.0, 2.0, 0.7, 1.0]).unwrap();
    assert!(c.riemann_norm < 1e-13);
    assert!(c.christoffel.iter().any(|v| v.abs() > 0.1));
}

#[test]
fn curvature_identities_hold_on_a_generic_metric() {
    let g = curvy_four_metric();
    let c = curvature_report(&g, &[0.3, -0.2, 0.5, 0.1]).unwrap();
    let id = c.identities;
    for v in [
        id.antisymmetry,
        id.pair_symmetry,
        id.bianchi,
        id.weyl_trace,
        id.weyl_split,
    ] {
        assert!(v < 1e-12, "{id:?}");
    }
    assert!(c.riemann_norm > 1e-2);
    let w2 = c.weyl_norm.powi(2);
    let split = c.w_plus_norm.unwrap().powi(2) + c.w_minus_norm.unwrap().powi(2);
    assert!((w2 - split).abs() < 1e-12 * (1.0 + w2));
}

#[test]
fn reversing_orientation_swaps_weyl_halves() {
    let h = catalog::base_metric::<f64>("flat3_spherical", &Params::new()).unwrap();
    let u = catalog::scalar("gh_potential", &Params::new(), h.chart()).unwrap();
    let b = catalog::one_form("dirac_theta", &Params::new(), h.chart()).unwrap();
    let p = [0.2, 1.0, 1.0, 0.5];
    let fm = FibrationMetric::jones_tod(&h, &u, &b, Fibre::new("tau", 0.0, 1.0)).unwrap();
    let c = curvature_report(&fm.g, &p).unwrap();
    let flipped =
        fm.g.on_chart(fm.g.chart().clone().with_orientation(-1))
            .unwrap();
    let d = curvature_report(&flipped, &p).unwrap();
    assert!((c.w_plus_norm.unwrap() - d.w_minus_norm.unwrap()).abs() < 1e-12);
    assert!((c.w_minus_norm.unwrap() - d.w_plus_norm.unwrap()).abs() < 1e-12);
}

#[test]
fn points_outside_the_chart_are_domain_errors() {
    let h = berger(0.5);
    let e = PointGeometry::new(&h, &[0.0, 0.0, 0.0]).unwrap_err();
    assert!(e.is_domain());
}

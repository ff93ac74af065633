use sdmorph::constructions::catalog::{self, Params};
use sdmorph::constructions::{type4_normalize, Family, FibrationMetric, Fibre};
use sdmorph::geometry::{conformal_rescale, curvature_report, Field};
use sdmorph::{FormField, Jet, MetricField, ScalarField};

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn metric(name: &str, kv: &[(&str, f64)]) -> MetricField {
    catalog::base_metric(name, &params(kv)).unwrap()
}

fn form(name: &str, kv: &[(&str, f64)], h: &MetricField) -> FormField {
    catalog::one_form(name, &params(kv), h.chart()).unwrap()
}

fn scalar(name: &str, kv: &[(&str, f64)], h: &MetricField) -> ScalarField {
    catalog::scalar(name, &params(kv), h.chart()).unwrap()
}

fn all_families() -> Vec<(FibrationMetric<f64>, Vec<f64>)> {
    let flat = metric("flat3", &[]);
    let sph = metric("flat3_spherical", &[]);
    let ber = metric("berger_s3", &[("a", 0.5)]);
    let total = flat.chart().with_fibre("tau", -1.0, 1.0).unwrap();
    let lam = Field::new(total.clone(), |x: &[Jet]| {
        (x[1] * 0.3).cos() + x[0] * x[0] * 0.2 + 0.5
    });
    let warp = Field::new(total, |x: &[Jet]| (x[0] * 2.0).exp());
    vec![
        (
            FibrationMetric::jones_tod(
                &sph,
                &scalar("gh_potential", &[], &sph),
                &form("dirac_theta", &[], &sph),
                Fibre::new("tau", 0.0, 1.0),
            )
            .unwrap(),
            vec![0.5, 1.2, 0.9, 0.3],
        ),
        (
            FibrationMetric::bryant(
                &flat,
                &lam,
                &form("x_dy", &[], &flat),
                Fibre::new("tau", -1.0, 1.0),
            )
            .unwrap(),
            vec![0.3, 0.4, -0.5, 1.0],
        ),
        (
            FibrationMetric::type2_warped(&flat, &warp, Fibre::new("tau", -1.0, 1.0)).unwrap(),
            vec![0.3, 0.4, -0.5, 1.0],
        ),
        (
            FibrationMetric::type3(
                &flat,
                &form("trkalian", &[], &flat),
                Fibre::new("s", 0.5, 2.0),
            )
            .unwrap(),
            vec![1.1, 0.4, -0.5, 1.0],
        ),
        (
            FibrationMetric::type4(
                &ber,
                &form("euler_sigma", &[("scale", 0.8660254037844386)], &ber),
                &scalar("constant", &[("value", -1.0)], &ber),
                Fibre::new("rho", 0.2, 1.5),
            )
            .unwrap(),
            vec![0.7, 0.4, 1.3, -0.8],
        ),
    ]
}

#[test]
fn every_family_is_horizontally_conformal_with_unit_fundamental_field() {
    for (fm, p) in all_families() {
        let (horiz, vert) = fm.invariant_residuals(&p).unwrap();
        assert!(
            horiz < 1e-12 && vert < 1e-12,
            "{}: {horiz:e} {vert:e}",
            fm.family
        );
    }
}

#[test]
fn bryant_with_lambda_rho_to_minus_half_is_type3() {
    let flat = metric("flat3", &[]);
    let a = form("trkalian", &[], &flat);
    let fibre = || Fibre::new("s", 0.5, 2.0);
    let t3 = FibrationMetric::type3(&flat, &a, fibre()).unwrap();
    let lam = Field::new(t3.total.clone(), |x: &[Jet]| x[0].powf(-0.5));
    let br = FibrationMetric::bryant(&flat, &lam, &a, fibre()).unwrap();
    assert_eq!(br.family, Family::Bryant);
    for p in [[0.7, 0.1, 0.2, 0.3], [1.8, -1.0, 0.5, 1.5]] {
        let (g1, g2) = (t3.g.eval(&p).unwrap(), br.g.eval(&p).unwrap());
        for a in 0..4 {
            for b in 0..4 {
                let (x, y) = (g1[(a, b)], g2[(a, b)]);
                assert!((x.value - y.value).abs() < 1e-13);
                for k in 0..4 {
                    assert!((x.grad[k] - y.grad[k]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn jones_tod_over_a_monopole_is_self_dual() {
    let h = metric("flat3_spherical", &[]);
    for m in [0.5, 1.0, 3.0] {
        let fm = FibrationMetric::jones_tod(
            &h,
            &scalar("gh_potential", &[("m", m)], &h),
            &form("dirac_theta", &[("m", m)], &h),
            Fibre::new("tau", 0.0, 1.0),
        )
        .unwrap();
        for p in [[0.2, 0.7, 0.5, 1.0], [0.9, 2.5, 2.0, -2.0]] {
            let c = curvature_report(&fm.g, &p).unwrap();
            assert!(c.w_minus_norm.unwrap() < 1e-10, "m={m}");
            assert!(c.ricci_norm < 1e-10);
        }
    }
    let wrong = FibrationMetric::jones_tod(
        &h,
        &scalar("gh_potential", &[("m", 1.0)], &h),
        &form("dirac_theta", &[("m", 2.0)], &h),
        Fibre::new("tau", 0.0, 1.0),
    )
    .unwrap();
    assert!(
        curvature_report(&wrong.g, &[0.2, 0.7, 0.5, 1.0])
            .unwrap()
            .w_minus_norm
            .unwrap()
            > 1e-3
    );
}

#[test]
fn type3_is_self_dual_only_for_the_matching_beltrami_sign() {
    let flat = metric("flat3", &[]);
    let p = [1.0, 0.3, -0.2, 0.7];
    for (sign, sd) in [(1.0, true), (-1.0, false)] {
        let fm = FibrationMetric::type3(
            &flat,
            &form("trkalian", &[("sign", sign)], &flat),
            Fibre::new("s", 0.5, 2.0),
        )
        .unwrap();
        let c = curvature_report(&fm.g, &p).unwrap();
        let (wm, wp) = (c.w_minus_norm.unwrap(), c.w_plus_norm.unwrap());
        if sd {
            assert!(wm < 1e-12 && wp > 1e-2);
        } else {
            assert!(wp < 1e-12 && wm > 1e-2);
        }
    }
}

/// `|c|·g = Ψ*g̃` with `Ψ(ρ, x) = (ρ − log|c(x)|, x)`; the Jacobian of `Ψ`
/// is taken by central differences of `map_point`.
#[test]
fn normalization_is_a_homothety_onto_the_normalized_metric() {
    let ber = metric("berger_s3", &[("a", 0.5)]);
    let c = scalar("basic_sine", &[("amp", 0.4), ("axis", 1.0)], &ber);
    let al = form("euler_sigma", &[("scale", 0.3)], &ber);
    let fm = FibrationMetric::type4(&ber, &al, &c, Fibre::new("rho", -1.0, 1.0)).unwrap();
    let n = type4_normalize(&fm).unwrap();
    assert_eq!(n.sign, 1.0);
    let p = [0.2, 0.3, 1.1, -0.6];
    let q = n.map_point(&p).unwrap();
    let gt = n.metric.g.eval(&q).unwrap();
    let g = fm.g.eval(&p).unwrap();
    let f = n.factor(&p).unwrap();
    let step = 1e-6;
    let jac: Vec<Vec<f64>> = (0..4)
        .map(|a| {
            let (mut hi, mut lo) = (p.to_vec(), p.to_vec());
            hi[a] += step;
            lo[a] -= step;
            let (u, v) = (n.map_point(&hi).unwrap(), n.map_point(&lo).unwrap());
            (0..4).map(|k| (u[k] - v[k]) / (2.0 * step)).collect()
        })
        .collect();
    for a in 0..4 {
        for b in 0..4 {
            let mut pulled = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    pulled += jac[a][i] * jac[b][j] * gt[(i, j)].value;
                }
            }
            assert!((pulled - f * g[(a, b)].value).abs() < 1e-8, "({a},{b})");
        }
    }
    let c_new = n.metric.data.c.as_ref().unwrap().eval(&q[1..]).unwrap();
    assert_eq!(c_new.value, 1.0);
}

#[test]
fn normalization_keeps_unit_c_and_flips_sign_for_negative_c() {
    // h/4 with c = −2 normalizes to the self-dual Berger data (h, α, −1)
    let ber = metric("berger_s3", &[("a", 0.5)]);
    let quarter = scalar("constant", &[("value", 0.25)], &ber);
    let small = conformal_rescale(&ber, &quarter).unwrap();
    let al = form("euler_sigma", &[("scale", 0.8660254037844386)], &ber);
    let fm = FibrationMetric::type4(
        &small,
        &al,
        &scalar("constant", &[("value", -2.0)], &ber),
        Fibre::new("rho", 1.0, 2.0),
    )
    .unwrap();
    assert!(
        curvature_report(&fm.g, &[1.5, 0.1, 1.2, 0.3])
            .unwrap()
            .w_minus_norm
            .unwrap()
            < 1e-10
    );
    let n = type4_normalize(&fm).unwrap();
    assert_eq!(n.sign, -1.0);
    let q = n.map_point(&[1.5, 0.1, 1.2, 0.3]).unwrap();
    assert!((q[0] - (1.5 - 2f64.ln())).abs() < 1e-15);
    let c = curvature_report(&n.metric.g, &q).unwrap();
    assert!(c.w_minus_norm.unwrap() < 1e-10);
}

#[test]
fn normalization_rejects_other_families() {
    let flat = metric("flat3", &[]);
    let fm = FibrationMetric::type3(&flat, &form("zero", &[], &flat), Fibre::new("s", 0.5, 2.0))
        .unwrap();
    assert!(type4_normalize(&fm).is_err());
}

#[test]
fn translation_moves_the_fibre_coordinate() {
    let (fm, p) = all_families().remove(3);
    let t = fm.translated(0.25).unwrap();
    let mut q = p.clone();
    q[0] -= 0.25;
    let (a, b) = (fm.g.eval(&p).unwrap(), t.g.eval(&q).unwrap());
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(a[(i, j)].value, b[(i, j)].value);
        }
    }
    assert_eq!(t.total.lo()[0], fm.total.lo()[0] - 0.25);
}

#[test]
fn nonpositive_dilation_is_a_domain_error() {
    let flat = metric("flat3", &[]);
    let fm = FibrationMetric::type4(
        &flat,
        &form("zero", &[], &flat),
        &scalar("constant", &[("value", -2.0)], &flat),
        Fibre::new("rho", -1.0, 1.0),
    )
    .unwrap();
    let e = curvature_report(&fm.g, &[0.0, 0.1, 0.1, 0.1]).unwrap_err();
    assert!(e.is_domain());
    assert!(curvature_report(&fm.g, &[0.9, 0.1, 0.1, 0.1]).is_ok());
}

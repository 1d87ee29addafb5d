use curvop::bochner::{delta_r_inner, delta_r_inner_eigen, delta_r_inner_weyl, tolerance_scale};
use curvop::cone_analysis::{in_cone, ConeParams};
use curvop::model_spaces::{constant_curvature, fubini_study, sphere_product};
use curvop::second_kind::spectrum_of;
use curvop::weyl_action::eigen_profile;
use curvop::{AlgCurvature, Spectrum};

fn assert_spectrum(s: &Spectrum, expect: &[f64]) {
    assert_eq!(s.len(), expect.len());
    for (a, b) in s.values().iter().zip(expect) {
        assert!((a - b).abs() < 1e-10, "{:?} vs {expect:?}", s.values());
    }
}

fn locally_symmetric() -> Vec<(String, AlgCurvature)> {
    let mut out: Vec<(String, AlgCurvature)> = (4..=10)
        .map(|n| {
            (
                format!("constant n={n}"),
                constant_curvature(n, 1.0).unwrap(),
            )
        })
        .collect();
    out.push(("CP2".into(), fubini_study(2).unwrap()));
    out.push(("CP3".into(), fubini_study(3).unwrap()));
    out.push((
        "S2xS2".into(),
        sphere_product(2, 1.0, 2, 1.0).unwrap().curvature,
    ));
    out.push((
        "S2xS3".into(),
        sphere_product(2, 2.0, 3, 1.0).unwrap().curvature,
    ));
    out.push((
        "S3xS3".into(),
        sphere_product(3, 1.0, 3, 1.0).unwrap().curvature,
    ));
    out.push((
        "S2xS4".into(),
        sphere_product(2, 3.0, 4, 1.0).unwrap().curvature,
    ));
    out
}

#[test]
fn model_spectra_baselines() {
    assert_spectrum(
        &spectrum_of(&fubini_study(2).unwrap()).unwrap(),
        &[-0.5, -0.5, -0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    );
    assert_spectrum(
        &spectrum_of(&sphere_product(2, 1.0, 2, 1.0).unwrap().curvature).unwrap(),
        &[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
    );
    let s = spectrum_of(&constant_curvature(7, -1.0).unwrap()).unwrap();
    assert_spectrum(&s, &[-1.0; 27]);
    assert!(
        !in_cone(&s, &ConeParams::new(2.0, 0.0).unwrap())
            .unwrap()
            .member
    );
}

#[test]
fn fubini_study_is_outside_the_n4_rigidity_cone() {
    let s = spectrum_of(&fubini_study(2).unwrap()).unwrap();
    assert!(
        !in_cone(&s, &ConeParams::new(2.7, 0.0).unwrap())
            .unwrap()
            .member
    );
    let scaled = spectrum_of(&fubini_study(2).unwrap().scaled(2.5)).unwrap();
    assert_spectrum(&scaled, s.scaled(2.5).unwrap().values());
}

#[test]
fn eigenvalue_only_formula_baselines() {
    let value = |r: &AlgCurvature, n| delta_r_inner_eigen(&spectrum_of(r).unwrap(), n).unwrap();
    let s2s2 = value(&sphere_product(2, 1.0, 2, 1.0).unwrap().curvature, 4);
    let cp2 = value(&fubini_study(2).unwrap(), 4);
    let s2s3 = value(&sphere_product(2, 2.0, 3, 1.0).unwrap().curvature, 5);
    assert!((s2s2 - 64.0 / 3.0).abs() < 1e-9, "{s2s2}");
    assert!((cp2 - 36.0).abs() < 1e-9, "{cp2}");
    assert!((s2s3 - 108.0).abs() < 1e-9, "{s2s3}");
}

#[test]
fn weyl_form_vanishes_on_locally_symmetric_models() {
    for (name, r) in locally_symmetric() {
        let (spec, profile) = eigen_profile(&r).unwrap();
        let d = delta_r_inner_weyl(&spec, &profile, r.n()).unwrap();
        assert!(d.abs() <= 1e-8 * tolerance_scale(&spec), "{name}: {d}");
    }
}

#[test]
fn locally_symmetric_models_have_zero_bochner_quantity() {
    let mut failures = Vec::new();
    for (name, r) in locally_symmetric() {
        let (spec, profile) = eigen_profile(&r).unwrap();
        let d = delta_r_inner(&spec, Some(&profile), r.n()).unwrap();
        if d.abs() > 1e-8 * tolerance_scale(&spec) {
            failures.push(format!("{name}: {d}"));
        }
    }
    assert!(failures.is_empty(), "nonzero on {failures:?}");
}

use proptest::prelude::*;

use spherical_means::epd::{epd_invert, epd_trace, EpdSpec};
use spherical_means::field::{make_phantom, Bump, PhantomKind, PhantomSpec};
use spherical_means::grid::{CylinderData, SphereGrid, TimeGrid};
use spherical_means::io::{read_cylinder, read_phantom, read_volume, write_cylinder, write_phantom, write_volume};
use spherical_means::recon::{fpr_invert, interior_metrics, ReconConfig};
use spherical_means::sphmean::forward_scan;

fn small_scan() -> (SphereGrid, TimeGrid) {
    (SphereGrid::new(16, 32).unwrap(), TimeGrid::new(160, 2.0).unwrap())
}

fn scale(d: &CylinderData, a: f64) -> CylinderData {
    let s = d.samples().iter().map(|v| a * v).collect();
    CylinderData::new(d.sphere().clone(), *d.times(), s).unwrap()
}

#[test]
fn files_carry_the_whole_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let spec = PhantomSpec {
        kind: PhantomKind::ShiftedBump,
        bumps: vec![Bump::new([0.15, 0.1, 0.0], 0.6, 3)],
    };
    write_phantom(dir.path().join("f.spec"), &spec).unwrap();
    let f = read_phantom(dir.path().join("f.spec")).unwrap().build().unwrap();

    let (sphere, times) = small_scan();
    let data = forward_scan(&f, &sphere, &times);
    write_cylinder(dir.path().join("d.cyl"), &data).unwrap();
    let back = read_cylinder(dir.path().join("d.cyl")).unwrap();
    assert_eq!(back.samples(), data.samples());

    let cfg = ReconConfig::new(24, 1.0);
    let rec = fpr_invert(&back, &cfg).unwrap();
    write_volume(dir.path().join("r.vol"), &rec).unwrap();
    let rec = read_volume(dir.path().join("r.vol")).unwrap();
    let dev = interior_metrics(&rec, &f, &cfg);
    assert!(dev.rel_l2 < 0.1, "{dev:?}");
}

#[test]
fn epd_inversion_matches_fpr_on_the_same_phantom() {
    let f = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.8, 3)]).unwrap();
    let (sphere, times) = small_scan();
    let cfg = ReconConfig::new(24, 1.0);
    let plain = fpr_invert(&forward_scan(&f, &sphere, &times), &cfg).unwrap();
    let base = interior_metrics(&plain, &f, &cfg);
    for (alpha, lambda) in [(1.0, 0.0), (1.0, 2.0), (0.5, 1.0)] {
        let spec = EpdSpec::new(alpha, lambda).unwrap();
        let u = epd_trace(&f, &spec, &sphere, &times).unwrap();
        let rec = epd_invert(&u, &spec, &cfg).unwrap();
        let dev = interior_metrics(&rec, &f, &cfg);
        assert!(
            dev.rel_l2 < 2.0 * base.rel_l2 + 0.01,
            "alpha {alpha} lambda {lambda}: {} vs fpr {}",
            dev.rel_l2,
            base.rel_l2
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn forward_and_inverse_are_linear(a in -3.0f64..3.0, r in 0.4f64..0.8) {
        prop_assume!(a.abs() > 0.1);
        let (sphere, times) = (SphereGrid::new(8, 16).unwrap(), TimeGrid::new(80, 2.0).unwrap());
        let unit = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], r, 3)]).unwrap();
        let scaled = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], r, 3).with_amplitude(a)]).unwrap();
        let d1 = forward_scan(&unit, &sphere, &times);
        let da = forward_scan(&scaled, &sphere, &times);
        let peak = d1.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in d1.samples().iter().zip(da.samples()) {
            prop_assert!((a * x - y).abs() <= 1e-12 * a.abs() * peak);
        }

        let cfg = ReconConfig::new(16, 1.0);
        let r1 = fpr_invert(&d1, &cfg).unwrap();
        let ra = fpr_invert(&scale(&d1, a), &cfg).unwrap();
        let top = r1.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in r1.values().iter().zip(ra.values()) {
            prop_assert!((a * x - y).abs() <= 1e-10 * a.abs() * top);
        }
    }
}

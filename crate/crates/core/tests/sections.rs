use proptest::prelude::*;

use sepgeom::metrics::Convention;
use sepgeom::sections::{self, CellClass, DomainShape, SectionScenario};

#[test]
fn element_grid_agrees_with_classification() {
    for scenario in SectionScenario::named_scenarios() {
        let res = 64;
        let grid = sections::classify_grid(&scenario, res).unwrap();
        let elements = sections::element_grid(&scenario, res, Convention::Bures).unwrap();
        assert_eq!(elements.len(), res * res);
        for iy in 0..res {
            for ix in 0..res {
                let row = &elements[iy * res + ix];
                assert_eq!((row[0], row[1]), (grid.centers[ix], grid.centers[iy]));
                let outside = grid.get(ix, iy) == CellClass::Outside;
                assert_eq!(row[2].is_nan(), outside, "{} at ({}, {})", scenario.name, row[0], row[1]);
            }
        }
    }
}

#[test]
fn element_grid_maximum_is_inside_the_domain() {
    let rows = sections::element_grid(&SectionScenario::c(), 81, Convention::Bures).unwrap();
    let best = rows
        .iter()
        .filter(|r| r[2].is_finite())
        .max_by(|a, b| a[2].total_cmp(&b[2]))
        .unwrap();
    let class = sections::classify_point(&SectionScenario::c(), best[0], best[1]).unwrap();
    assert_ne!(class, CellClass::Outside);
}

#[test]
fn grid_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        sections::emit_element_grid(&SectionScenario::g(), 33, Convention::Bures, p).unwrap();
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("x,y,value\n"));
    assert_eq!(text.lines().count(), 33 * 33 + 1);
}

#[test]
fn grid_areas_approach_the_quadrature() {
    let scenario = SectionScenario::e();
    let exact = sections::euclidean_areas(&scenario, 1e-8).unwrap();
    let coarse = sections::classify_grid(&scenario, 128).unwrap();
    let fine = sections::classify_grid(&scenario, 256).unwrap();
    let err = |g: &sections::ClassGrid| (g.domain_area() - exact.total.value).abs();
    assert!(err(&fine) < 2e-2);
    assert!(err(&fine) <= err(&coarse) + 1e-3);
    assert!((fine.separable_area() - exact.separable.value).abs() < 2e-2);
}

#[test]
fn sd_convention_rescales_volumes_not_ratios() {
    let scenario = SectionScenario::e();
    let b = sections::bures_volumes(&scenario, 1e-5, Convention::Bures).unwrap();
    let s = sections::bures_volumes(&scenario, 1e-5, Convention::SD).unwrap();
    assert!((s.bures_volume_total / b.bures_volume_total - 4.0).abs() < 1e-10);
    assert!((s.probability_bures - b.probability_bures).abs() < 1e-12);
}

#[test]
fn bures_volumes_are_deterministic() {
    let a = sections::bures_volumes(&SectionScenario::g(), 1e-4, Convention::Bures).unwrap();
    let b = sections::bures_volumes(&SectionScenario::g(), 1e-4, Convention::Bures).unwrap();
    assert_eq!(a.bures_volume_total.to_bits(), b.bures_volume_total.to_bits());
    assert_eq!(a.bures_volume_sep.to_bits(), b.bures_volume_sep.to_bits());
}

#[test]
fn calibration_recognizes_named_domains() {
    let entries = sections::calibrate().unwrap();
    let shapes: Vec<DomainShape> = entries.iter().map(|e| e.observed.shape).collect();
    assert_eq!(shapes, vec![DomainShape::Triangle, DomainShape::Ellipse, DomainShape::Parabola]);
    assert!(entries.iter().all(|e| e.ok));
}

#[test]
fn points_outside_are_reported() {
    let e = sections::bures_section_element(&SectionScenario::c(), 1.2, 1.2, Convention::Bures);
    assert!(matches!(e, Err(sepgeom::Error::Outside { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separable_points_lie_in_the_domain(x in -1.25f64..1.25, y in -1.25f64..1.25) {
        for scenario in SectionScenario::named_scenarios() {
            let class = sections::classify_point(&scenario, x, y).unwrap();
            let inside = sections::section_state(&scenario, x, y).is_ok();
            prop_assert_eq!(class != CellClass::Outside, inside);
        }
    }

    #[test]
    fn element_is_positive_inside(x in -0.5f64..0.5, y in -0.5f64..0.5) {
        for scenario in SectionScenario::named_scenarios() {
            if let Ok(e) = sections::bures_section_element(&scenario, x, y, Convention::Bures) {
                prop_assert!(e > 0.0 && e.is_finite());
            }
        }
    }
}

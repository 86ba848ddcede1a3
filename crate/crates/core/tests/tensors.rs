use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sepgeom::linalg::{self, C64};
use sepgeom::metrics::{self, Convention, CLUSTER_TOL};
use sepgeom::states::jacobian;
use sepgeom::{Chart, ChartKind, ChartPoint, ComplexMatrix, DensityMatrix};

fn weights_chart() -> Chart {
    Chart::for_dimension(ChartKind::ConvexWeights, 4).unwrap()
}

fn interior_weights(rng: &mut impl Rng) -> ChartPoint {
    let raw: Vec<f64> = (0..16).map(|_| rng.random::<f64>() + 0.1).collect();
    let total: f64 = raw.iter().sum();
    ChartPoint::new(ChartKind::ConvexWeights, raw[..15].iter().map(|x| x / total).collect())
}

#[test]
fn tensors_transform_covariantly_between_charts() {
    let w = weights_chart();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for other in [Chart::naive(4), Chart::generator(4).unwrap()] {
        let j = jacobian(&w, &other).unwrap();
        for _ in 0..20 {
            let p = interior_weights(&mut rng);
            let rho = w.to_matrix(&p).unwrap();
            let q = other.from_matrix(rho.matrix()).unwrap();
            let gw = metrics::bures_tensor(&w, &p, Convention::Bures).unwrap();
            let go = metrics::bures_tensor(&other, &q, Convention::Bures).unwrap();
            let pulled = go.pulled_back(&j.matrix);
            let err = (&pulled - &gw.g).abs().max();
            assert!(err < 1e-10 * gw.g.abs().max(), "{:?}: {err}", other.kind());
            let ve_w = gw.volume_element().unwrap();
            let ve_o = go.volume_element().unwrap();
            assert!((ve_w - ve_o * j.abs_det).abs() < 1e-8 * ve_w);
        }
    }
}

#[test]
fn jacobians_compose() {
    let w = weights_chart();
    let n = Chart::naive(4);
    let g = Chart::generator(4).unwrap();
    let wn = jacobian(&w, &n).unwrap().matrix;
    let ng = jacobian(&n, &g).unwrap().matrix;
    let wg = jacobian(&w, &g).unwrap().matrix;
    assert!((&ng * &wn - &wg).abs().max() < 1e-12);
}

#[test]
fn diagonalized_weights_chart() {
    let d = metrics::diagonalize_chart(&weights_chart(), Convention::Bures).unwrap();
    let scale = d.tensor.abs().max();
    assert!(d.max_offdiagonal() < 1e-10 * scale);
    for (a, ea) in d.directions.iter().enumerate() {
        assert!(linalg::trace(ea).norm() < 1e-12);
        for eb in &d.directions[a + 1..] {
            // orthogonal under the center tensor, which is proportional to
            // the HS product at I4
            let ip = linalg::trace_product_re(ea, eb);
            assert!(ip.abs() < 1e-10);
        }
    }
    // the constant term is the rank-one member the weights chart eliminates
    let ev = linalg::hermitian_eigenvalues(&d.constant).unwrap();
    let nonzero = ev.iter().filter(|l| l.abs() > 1e-12).count();
    assert_eq!(nonzero, 1);
    let nz = d.nonzero_center_coords(1e-12);
    assert_eq!(nz.len(), 2);
    let (a, b) = (d.center_coords[nz[0]].abs(), d.center_coords[nz[1]].abs());
    let ratio = a.max(b) / a.min(b);
    let r = 769f64.sqrt();
    let exact = ((15.0 * r + 399.0) / (15.0 * r - 399.0)).sqrt();
    assert!((ratio - exact).abs() < 1e-9, "{ratio} vs {exact}");
    assert!((ratio - 0.239581 / 0.0345646).abs() < 1e-4);
}

#[test]
fn spectra_are_convention_free_up_to_scale() {
    let w = weights_chart();
    let b = metrics::bures_tensor(&w, &w.center(), Convention::Bures).unwrap();
    let s = metrics::bures_tensor(&w, &w.center(), Convention::SD).unwrap();
    let rb = b.spectrum(CLUSTER_TOL).unwrap();
    let rs = s.spectrum(CLUSTER_TOL).unwrap();
    assert_eq!(rb.multiplicities(), rs.multiplicities());
    for (x, y) in rb.clusters.iter().zip(&rs.clusters) {
        assert!((y.value / x.value - 4.0).abs() < 1e-12);
    }
}

#[test]
fn tensor_quadratic_form_matches_distance_of_nearby_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let g = Chart::generator(4).unwrap();
    for _ in 0..10 {
        let a = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let p = &a * a.adjoint() + linalg::identity(4) * C64::from(0.1);
        let t = linalg::trace(&p);
        let rho = DensityMatrix::new(p / t).unwrap();
        let point = g.from_matrix(rho.matrix()).unwrap();
        let u: Vec<f64> = (0..15).map(|_| rng.random::<f64>() - 0.5).collect();
        let eps = 1e-4;
        let moved: Vec<f64> = point.params.iter().zip(&u).map(|(p, d)| p + eps * d).collect();
        let sigma = g.to_matrix(&ChartPoint::new(ChartKind::GeneratorCoords, moved)).unwrap();
        let d = metrics::bures_distance(&rho, &sigma).unwrap();
        let q = metrics::bures_tensor(&g, &point, Convention::Bures).unwrap().quadratic_form(&u);
        assert!((d * d / (eps * eps) - q).abs() < 1e-3 * q);
    }
}

#[test]
fn boundary_points_are_rejected() {
    let w = weights_chart();
    let mut p = vec![0.0; 15];
    p[0] = 1.0;
    let e = metrics::bures_tensor(&w, &ChartPoint::new(ChartKind::ConvexWeights, p), Convention::Bures);
    assert!(matches!(e, Err(sepgeom::Error::BoundaryState { .. })));
}

#[test]
fn adjacency_of_a_four_cycle() {
    // C4 has spectrum {2, 0, 0, -2}
    let a = nalgebra::DMatrix::from_row_slice(
        4,
        4,
        &[0., 1., 0., 1., 1., 0., 1., 0., 0., 1., 0., 1., 1., 0., 1., 0.],
    );
    let (ev, _) = linalg::symmetric_eigen(&a).unwrap();
    let r = metrics::SpectrumReport::from_eigenvalues(ev.as_slice(), CLUSTER_TOL);
    let got: Vec<(i64, usize)> = r.clusters.iter().map(|c| (c.value.round() as i64, c.multiplicity)).collect();
    assert_eq!(got, vec![(-2, 1), (0, 2), (2, 1)]);
}

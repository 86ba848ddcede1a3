//! Two-qubit separability by the positive-partial-transpose test, which is
//! exact for 2 x 2 systems.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Subsystem};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// States whose partial transpose has minimum eigenvalue at or above
/// `-PPT_TOL` are separable.
pub const PPT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub is_separable: bool,
    pub min_pt_eigenvalue: f64,
}

impl SeparabilityVerdict {
    pub fn from_min_eigenvalue(min_pt_eigenvalue: f64) -> Self {
        Self {
            is_separable: min_pt_eigenvalue >= -PPT_TOL,
            min_pt_eigenvalue,
        }
    }
}

/// Smallest eigenvalue of the partial transpose of a 4 x 4 matrix.
pub fn min_pt_eigenvalue(m: &linalg::ComplexMatrix, subsystem: Subsystem) -> Result<f64> {
    if m.nrows() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: m.nrows(),
        });
    }
    linalg::min_eigenvalue(&linalg::partial_transpose(m, (2, 2), subsystem)?)
}

pub fn classify_2qubit(rho: &DensityMatrix) -> Result<SeparabilityVerdict> {
    Ok(SeparabilityVerdict::from_min_eigenvalue(min_pt_eigenvalue(
        rho.matrix(),
        Subsystem::B,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ComplexMatrix, C64};
    use crate::states::{ProductBasis, ProductKind};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DVector::from_vec(vec![C64::from(s), C64::from(0.0), C64::from(0.0), C64::from(s)]);
        DensityMatrix::from_pure(&psi).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        DensityMatrix::mixture(&[p, 1.0 - p], &[bell(), DensityMatrix::maximally_mixed(4)]).unwrap()
    }

    fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        a.qr().q()
    }

    fn random_state(rng: &mut impl Rng) -> DensityMatrix {
        let a = ComplexMatrix::from_fn(4, 4, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let p = &a * a.adjoint();
        let t = linalg::trace(&p);
        DensityMatrix::new(p / t).unwrap()
    }

    #[test]
    fn products_are_separable() {
        for m in &ProductBasis::from_kind(ProductKind::Tetra16).members {
            assert!(classify_2qubit(m).unwrap().is_separable);
        }
    }

    #[test]
    fn bell_state_is_entangled() {
        let v = classify_2qubit(&bell()).unwrap();
        assert!(!v.is_separable);
        assert!((v.min_pt_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn werner_threshold() {
        // PT spectrum of the Werner state has minimum (1 - 3p) / 4
        for p in [0.0, 0.1, 0.3, 0.5, 0.9, 1.0] {
            let v = classify_2qubit(&werner(p)).unwrap();
            assert!((v.min_pt_eigenvalue - (1.0 - 3.0 * p) / 4.0).abs() < 1e-13);
        }
        assert!(classify_2qubit(&werner(1.0 / 3.0 - 1e-10)).unwrap().is_separable);
        assert!(!classify_2qubit(&werner(1.0 / 3.0 + 1e-10)).unwrap().is_separable);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let m = DensityMatrix::maximally_mixed(8);
        assert!(matches!(
            classify_2qubit(&m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for i in 0..100 {
            let rho = if i % 2 == 0 {
                random_state(&mut rng)
            } else {
                werner(rng.random::<f64>())
            };
            let u = kron(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 2));
            let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
            let a = classify_2qubit(&rho).unwrap();
            let b = classify_2qubit(&rotated).unwrap();
            assert!((a.min_pt_eigenvalue - b.min_pt_eigenvalue).abs() < 1e-12);
            if a.min_pt_eigenvalue.abs() > 1e-10 {
                assert_eq!(a.is_separable, b.is_separable);
            }
        }
    }

    #[test]
    fn partial_transposes_share_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let rho = random_state(&mut rng);
            let a = min_pt_eigenvalue(rho.matrix(), Subsystem::A).unwrap();
            let b = min_pt_eigenvalue(rho.matrix(), Subsystem::B).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn hull_mixtures_are_separable() {
        let basis = ProductBasis::from_kind(ProductKind::Tetra16);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let w: Vec<f64> = (0..16).map(|_| rng.random::<f64>().powi(4)).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| x / total).collect();
            let rho = DensityMatrix::mixture(&w, &basis.members).unwrap();
            assert!(classify_2qubit(&rho).unwrap().is_separable);
        }
    }
}

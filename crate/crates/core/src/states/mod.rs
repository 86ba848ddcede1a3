//! Density matrices, the extreme pure-product bases, SU(N) generators and
//! the affine coordinate charts used throughout the crate.

mod chart;

pub use chart::{jacobian, Chart, ChartKind, ChartPoint, Jacobian};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

/// Hermiticity and trace tolerance for [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-12;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    label: Option<String>,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`. The stored matrix is symmetrized so it
    /// is exactly Hermitian.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let deviation = linalg::hermiticity_defect(&matrix);
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let matrix = (&matrix + matrix.adjoint()) * C64::from(0.5);
        let min = linalg::min_eigenvalue(&matrix)?;
        if min < -linalg::PSD_CLAMP {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            matrix,
            label: None,
        })
    }

    /// `I_n / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: linalg::identity(n) * C64::from(1.0 / n as f64),
            label: Some(format!("I{n}/{n}")),
        }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn from_pure(psi: &DVector<C64>) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        Self::new(psi * psi.adjoint() * C64::from(1.0 / norm2))
    }

    /// Convex combination `sum_i w_i rho_i`. Weights must be non-negative and
    /// sum to one.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("negative mixture weight".into()));
        }
        let n = states[0].dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.dim(),
                });
            }
            acc += s.matrix() * C64::from(*w);
        }
        Self::new(acc)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        linalg::trace_product_re(&self.matrix, &self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<DVector<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

/// Bloch vector of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }
}

/// `(I + x sx + y sy + z sz) / 2`.
pub fn qubit_from_bloch(v: BlochVector) -> Result<DensityMatrix> {
    let norm = v.norm();
    if norm > 1.0 + 1e-12 {
        return Err(Error::BlochNormExceeded(norm));
    }
    let m = ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.5 * (1.0 + v.z), 0.0),
            C64::new(0.5 * v.x, -0.5 * v.y),
            C64::new(0.5 * v.x, 0.5 * v.y),
            C64::new(0.5 * (1.0 - v.z), 0.0),
        ],
    );
    DensityMatrix::new(m)
}

/// Vertices of the tetrahedron inscribed in the Bloch sphere.
pub fn tetrahedron_vertices() -> [BlochVector; 4] {
    let v = 1.0 / 3f64.sqrt();
    [
        BlochVector::new(v, v, v),
        BlochVector::new(-v, -v, v),
        BlochVector::new(-v, v, -v),
        BlochVector::new(v, -v, -v),
    ]
}

/// Pauli eigenstates in the order `+x, -x, +y, -y, +z, -z`.
pub fn pauli_eigenstates() -> [BlochVector; 6] {
    [
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
    ]
}

const PAULI_LABELS: [&str; 6] = ["+x", "-x", "+y", "-y", "+z", "-z"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Tetra16,
    Tetra64,
    Pauli36,
}

impl ProductKind {
    pub fn member_count(self) -> usize {
        match self {
            ProductKind::Tetra16 => 16,
            ProductKind::Tetra64 => 64,
            ProductKind::Pauli36 => 36,
        }
    }

    pub fn qubits(self) -> usize {
        match self {
            ProductKind::Tetra64 => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Tetra16 => "tetra16",
            ProductKind::Tetra64 => "tetra64",
            ProductKind::Pauli36 => "pauli36",
        }
    }
}

impl std::str::FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetra16" => Ok(ProductKind::Tetra16),
            "tetra64" => Ok(ProductKind::Tetra64),
            "pauli36" => Ok(ProductKind::Pauli36),
            other => Err(Error::InvalidArgument(format!("unknown basis '{other}'"))),
        }
    }
}

/// Ordered list of extreme pure-product states.
#[derive(Debug, Clone)]
pub struct ProductBasis {
    pub kind: ProductKind,
    pub members: Vec<DensityMatrix>,
    /// Single-qubit factor indices of each member, first qubit first.
    pub factors: Vec<Vec<usize>>,
}

impl ProductBasis {
    pub fn from_kind(kind: ProductKind) -> Self {
        match kind {
            ProductKind::Tetra16 => tetra_basis(2).expect("k = 2 is supported"),
            ProductKind::Tetra64 => tetra_basis(3).expect("k = 3 is supported"),
            ProductKind::Pauli36 => pauli36_basis(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// Reorders members by `perm` (new position `i` holds old member `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            kind: self.kind,
            members: perm.iter().map(|&i| self.members[i].clone()).collect(),
            factors: perm.iter().map(|&i| self.factors[i].clone()).collect(),
        }
    }
}

fn lexicographic_products(
    qubits: usize,
    factor_states: &[DensityMatrix],
    label: impl Fn(&[usize]) -> String,
) -> (Vec<DensityMatrix>, Vec<Vec<usize>>) {
    let base = factor_states.len();
    let count = base.pow(qubits as u32);
    let mut members = Vec::with_capacity(count);
    let mut factors = Vec::with_capacity(count);
    for code in 0..count {
        let mut idx = vec![0usize; qubits];
        let mut rest = code;
        for slot in (0..qubits).rev() {
            idx[slot] = rest % base;
            rest /= base;
        }
        let mut m = factor_states[idx[0]].matrix().clone();
        for &i in &idx[1..] {
            m = linalg::kron(&m, factor_states[i].matrix());
        }
        let state = DensityMatrix::new(m)
            .expect("products of qubit states are density matrices")
            .with_label(label(&idx));
        members.push(state);
        factors.push(idx);
    }
    (members, factors)
}

/// All `4^k` tensor products of the tetrahedral qubit states, `k` in {2, 3}.
pub fn tetra_basis(k: usize) -> Result<ProductBasis> {
    let kind = match k {
        2 => ProductKind::Tetra16,
        3 => ProductKind::Tetra64,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "tetrahedral bases exist for 2 or 3 qubits, not {k}"
            )))
        }
    };
    let qubits: Vec<DensityMatrix> = tetrahedron_vertices()
        .iter()
        .map(|&v| qubit_from_bloch(v).expect("vertices lie on the sphere"))
        .collect();
    let (members, factors) = lexicographic_products(k, &qubits, |idx| {
        idx.iter().map(|i| format!("t{i}")).collect::<Vec<_>>().join("")
    });
    Ok(ProductBasis {
        kind,
        members,
        factors,
    })
}

/// The 36 two-qubit products of Pauli eigenstates.
pub fn pauli36_basis() -> ProductBasis {
    let qubits: Vec<DensityMatrix> = pauli_eigenstates()
        .iter()
        .map(|&v| qubit_from_bloch(v).expect("unit vectors"))
        .collect();
    let (members, factors) = lexicographic_products(2, &qubits, |idx| {
        idx.iter().map(|&i| PAULI_LABELS[i]).collect::<Vec<_>>().join("")
    });
    ProductBasis {
        kind: ProductKind::Pauli36,
        members,
        factors,
    }
}

/// How a generator is built from the matrix units `E_jk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GeneratorShape {
    /// `E_jk + E_kj`.
    Symmetric { j: usize, k: usize },
    /// `-i E_jk + i E_kj`.
    Antisymmetric { j: usize, k: usize },
    /// `sqrt(2/(l(l+1))) (E_11 + ... + E_ll - l E_{l+1,l+1})`.
    Diagonal { l: usize },
}

impl std::fmt::Display for GeneratorShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorShape::Symmetric { j, k } => write!(f, "sym({j},{k})"),
            GeneratorShape::Antisymmetric { j, k } => write!(f, "asym({j},{k})"),
            GeneratorShape::Diagonal { l } => write!(f, "diag({l})"),
        }
    }
}

/// Generalized Gell-Mann generators of SU(N), normalized `Tr[l_i l_j] = 2 d_ij`.
///
/// Ordering nests SU(2) in SU(3) in ... in SU(N): for `k = 2..N` the pairs
/// `(j, k)` with `j < k` contribute a symmetric then an antisymmetric
/// generator, followed by the diagonal generator `diag(k-1)`. For `N = 3` this
/// is the usual Gell-Mann order; the two-qubit section scenarios use the
/// `N = 4` table (1-based):
///
/// | idx | generator | idx | generator | idx | generator |
/// |-----|-----------|-----|-----------|-----|-----------|
/// | 1 | sym(1,2)  | 6 | sym(2,3)  | 11 | sym(2,4)  |
/// | 2 | asym(1,2) | 7 | asym(2,3) | 12 | asym(2,4) |
/// | 3 | diag(1)   | 8 | diag(2)   | 13 | sym(3,4)  |
/// | 4 | sym(1,3)  | 9 | sym(1,4)  | 14 | asym(3,4) |
/// | 5 | asym(1,3) | 10 | asym(1,4) | 15 | diag(3)  |
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    pub n: usize,
    pub generators: Vec<ComplexMatrix>,
    pub shapes: Vec<GeneratorShape>,
}

impl GeneratorBasis {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generator by 1-based index, matching the table above.
    pub fn get(&self, index: usize) -> Option<&ComplexMatrix> {
        index.checked_sub(1).and_then(|i| self.generators.get(i))
    }

    /// `Tr[m l_i]` for every generator (real part).
    pub fn expectations(&self, m: &ComplexMatrix) -> Vec<f64> {
        self.generators
            .iter()
            .map(|g| linalg::trace_product_re(m, g))
            .collect()
    }
}

pub fn generator_basis(n: usize) -> Result<GeneratorBasis> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "SU(N) generators need N >= 2, got {n}"
        )));
    }
    let mut generators = Vec::with_capacity(n * n - 1);
    let mut shapes = Vec::with_capacity(n * n - 1);
    let zero = C64::new(0.0, 0.0);
    for k in 1..n {
        for j in 0..k {
            let mut s = ComplexMatrix::from_element(n, n, zero);
            s[(j, k)] = C64::new(1.0, 0.0);
            s[(k, j)] = C64::new(1.0, 0.0);
            generators.push(s);
            shapes.push(GeneratorShape::Symmetric { j: j + 1, k: k + 1 });

            let mut a = ComplexMatrix::from_element(n, n, zero);
            a[(j, k)] = C64::new(0.0, -1.0);
            a[(k, j)] = C64::new(0.0, 1.0);
            generators.push(a);
            shapes.push(GeneratorShape::Antisymmetric { j: j + 1, k: k + 1 });
        }
        let l = k as f64;
        let scale = (2.0 / (l * (l + 1.0))).sqrt();
        let mut d = ComplexMatrix::from_element(n, n, zero);
        for i in 0..k {
            d[(i, i)] = C64::new(scale, 0.0);
        }
        d[(k, k)] = C64::new(-l * scale, 0.0);
        generators.push(d);
        shapes.push(GeneratorShape::Diagonal { l: k });
    }
    Ok(GeneratorBasis {
        n,
        generators,
        shapes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, trace_product_re};

    #[test]
    fn bloch_special_points() {
        let mixed = qubit_from_bloch(BlochVector::new(0.0, 0.0, 0.0)).unwrap();
        assert!(max_abs(&(mixed.matrix() - linalg::identity(2) * C64::from(0.5))) < 1e-15);
        let up = qubit_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(up.matrix()[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(up.matrix()[(1, 1)], C64::new(0.0, 0.0));
        let v = 1.0 / 3f64.sqrt();
        let t = qubit_from_bloch(BlochVector::new(v, v, v)).unwrap();
        assert!((t.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_norm_is_checked() {
        assert!(matches!(
            qubit_from_bloch(BlochVector::new(1.0, 1.0, 0.0)),
            Err(Error::BlochNormExceeded(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = linalg::identity(2) * C64::from(0.5);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPsd { .. })));
        let twice = linalg::identity(2);
        assert!(matches!(
            DensityMatrix::new(twice),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn tetra_bases_have_expected_sizes_and_purity() {
        for (k, count) in [(2usize, 16usize), (3, 64)] {
            let b = tetra_basis(k).unwrap();
            assert_eq!(b.len(), count);
            for m in &b.members {
                assert!((m.purity() - 1.0).abs() < 1e-12);
                let ev = m.eigenvalues().unwrap();
                assert!((ev[ev.len() - 1] - 1.0).abs() < 1e-10);
            }
            assert!(b.factors.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(tetra_basis(4).is_err());
    }

    #[test]
    fn tetra16_pair_overlaps() {
        let b = tetra_basis(2).unwrap();
        let (mut third, mut ninth) = (0, 0);
        for i in 0..16 {
            for j in (i + 1)..16 {
                let t = trace_product_re(b.members[i].matrix(), b.members[j].matrix());
                if (t - 1.0 / 3.0).abs() < 1e-12 {
                    third += 1;
                } else if (t - 1.0 / 9.0).abs() < 1e-12 {
                    ninth += 1;
                } else {
                    panic!("unexpected overlap {t}");
                }
            }
        }
        assert_eq!((third, ninth), (48, 72));
    }

    #[test]
    fn pauli36_members_are_pure_products() {
        let b = pauli36_basis();
        assert_eq!(b.len(), 36);
        assert_eq!(b.members[0].label(), Some("+x+x"));
        assert_eq!(b.members[35].label(), Some("-z-z"));
        for m in &b.members {
            assert!((m.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_are_orthonormal_and_traceless() {
        for n in [2usize, 3, 4, 8] {
            let g = generator_basis(n).unwrap();
            assert_eq!(g.len(), n * n - 1);
            for (i, a) in g.generators.iter().enumerate() {
                assert!(linalg::hermiticity_defect(a) == 0.0);
                assert!(linalg::trace(a).norm() <= 1e-14);
                for (j, b) in g.generators.iter().enumerate() {
                    let expect = if i == j { 2.0 } else { 0.0 };
                    assert!((trace_product_re(a, b) - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn su3_block_is_gell_mann() {
        let g = generator_basis(4).unwrap();
        let labels: Vec<String> = g.shapes.iter().map(|s| s.to_string()).collect();
        assert_eq!(labels[5], "sym(2,3)");
        assert_eq!(labels[7], "diag(2)");
        assert_eq!(labels[8], "sym(1,4)");
        assert_eq!(labels[14], "diag(3)");
        // lambda_2 = [[0, -i], [i, 0]] on the first two levels
        let l2 = g.get(2).unwrap();
        assert_eq!(l2[(0, 1)], C64::new(0.0, -1.0));
        // lambda_8 = diag(1, 1, -2, 0)/sqrt(3)
        let l8 = g.get(8).unwrap();
        assert!((l8[(2, 2)].re + 2.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mixture_rejects_negative_weights() {
        let b = tetra_basis(2).unwrap();
        let r = DensityMatrix::mixture(&[1.5, -0.5], &b.members[..2]);
        assert!(r.is_err());
    }
}

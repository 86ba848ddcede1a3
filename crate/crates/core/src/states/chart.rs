//! Affine coordinate charts `params -> offset + sum_i p_i D_i`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{generator_basis, DensityMatrix, ProductBasis, ProductKind};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

const DOMAIN_TOL: f64 = 1e-12;
const SPAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    /// Weights on the first `M - 1` members of a tetrahedral product basis,
    /// the last weight being `1 - sum`.
    #[serde(rename = "weights")]
    ConvexWeights,
    /// Upper-triangle entries: diagonal `a_kk` for `k < N`, then `a_jk, b_jk`
    /// (real and imaginary parts) for `j < k` in lexicographic order.
    Naive,
    /// Generator expectations `x_i = Tr[rho l_i]`, `rho = I/N + sum x_i l_i / 2`.
    #[serde(rename = "generator")]
    GeneratorCoords,
}

impl ChartKind {
    pub fn name(self) -> &'static str {
        match self {
            ChartKind::ConvexWeights => "weights",
            ChartKind::Naive => "naive",
            ChartKind::GeneratorCoords => "generator",
        }
    }
}

impl std::str::FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weights" | "convex" | "convexweights" => Ok(ChartKind::ConvexWeights),
            "naive" => Ok(ChartKind::Naive),
            "generator" | "generators" | "generatorcoords" => Ok(ChartKind::GeneratorCoords),
            other => Err(Error::InvalidArgument(format!("unknown chart '{other}'"))),
        }
    }
}

/// Parameters of a point in one chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: ChartKind,
    pub params: Vec<f64>,
}

impl ChartPoint {
    pub fn new(chart: ChartKind, params: Vec<f64>) -> Self {
        Self { chart, params }
    }
}

/// An affine parameterization of `N x N` unit-trace Hermitian matrices.
#[derive(Debug, Clone)]
pub struct Chart {
    kind: ChartKind,
    n: usize,
    offset: ComplexMatrix,
    directions: Vec<ComplexMatrix>,
    /// Cholesky factor of the direction Gram matrix (weights chart only).
    gram: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl Chart {
    /// Convex-weight chart over a tetrahedral basis.
    pub fn convex_weights(basis: &ProductBasis) -> Result<Self> {
        if basis.kind == ProductKind::Pauli36 {
            return Err(Error::InvalidArgument(
                "the Pauli basis is overcomplete and does not define a chart".into(),
            ));
        }
        let last = basis.members.last().expect("non-empty basis").matrix();
        let directions: Vec<ComplexMatrix> = basis.members[..basis.len() - 1]
            .iter()
            .map(|m| m.matrix() - last)
            .collect();
        let d = directions.len();
        let gram = DMatrix::from_fn(d, d, |i, j| {
            linalg::trace_product_re(&directions[i], &directions[j])
        });
        let chol = gram.cholesky().ok_or_else(|| {
            Error::InvalidArgument("basis members are not affinely independent".into())
        })?;
        Ok(Self {
            kind: ChartKind::ConvexWeights,
            n: basis.dim(),
            offset: last.clone(),
            directions,
            gram: Some(chol),
        })
    }

    pub fn naive(n: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        let unit = |r: usize, c: usize, v: C64| {
            let mut m = ComplexMatrix::from_element(n, n, zero);
            m[(r, c)] = v;
            m
        };
        let mut directions = Vec::with_capacity(n * n - 1);
        let last = unit(n - 1, n - 1, C64::new(1.0, 0.0));
        for k in 0..n - 1 {
            directions.push(unit(k, k, C64::new(1.0, 0.0)) - &last);
        }
        for j in 0..n {
            for k in (j + 1)..n {
                directions.push(unit(j, k, C64::new(1.0, 0.0)) + unit(k, j, C64::new(1.0, 0.0)));
                directions.push(unit(j, k, C64::new(0.0, 1.0)) + unit(k, j, C64::new(0.0, -1.0)));
            }
        }
        Self {
            kind: ChartKind::Naive,
            n,
            offset: last,
            directions,
            gram: None,
        }
    }

    pub fn generator(n: usize) -> Result<Self> {
        let basis = generator_basis(n)?;
        Ok(Self {
            kind: ChartKind::GeneratorCoords,
            n,
            offset: linalg::identity(n) * C64::from(1.0 / n as f64),
            directions: basis
                .generators
                .into_iter()
                .map(|g| g * C64::from(0.5))
                .collect(),
            gram: None,
        })
    }

    /// The chart of `kind` on `N x N` states; weights use Tetra16 (N=4) or
    /// Tetra64 (N=8).
    pub fn for_dimension(kind: ChartKind, n: usize) -> Result<Self> {
        match kind {
            ChartKind::ConvexWeights => match n {
                4 => Self::convex_weights(&ProductBasis::from_kind(ProductKind::Tetra16)),
                8 => Self::convex_weights(&ProductBasis::from_kind(ProductKind::Tetra64)),
                _ => Err(Error::InvalidArgument(format!(
                    "no tetrahedral basis for dimension {n}"
                ))),
            },
            ChartKind::Naive => Ok(Self::naive(n)),
            ChartKind::GeneratorCoords => Self::generator(n),
        }
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    /// Matrix dimension `N`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn param_count(&self) -> usize {
        self.directions.len()
    }

    pub fn offset(&self) -> &ComplexMatrix {
        &self.offset
    }

    /// Constant partial derivatives `d rho / d p_i`.
    pub fn directions(&self) -> &[ComplexMatrix] {
        &self.directions
    }

    /// Parameter names, e.g. `w1`, `a12`/`b12`, `x1`.
    pub fn param_names(&self) -> Vec<String> {
        match self.kind {
            ChartKind::ConvexWeights => (1..=self.param_count()).map(|i| format!("w{i}")).collect(),
            ChartKind::GeneratorCoords => {
                (1..=self.param_count()).map(|i| format!("x{i}")).collect()
            }
            ChartKind::Naive => {
                let mut names: Vec<String> =
                    (1..self.n).map(|k| format!("a{k}{k}")).collect();
                for j in 1..=self.n {
                    for k in (j + 1)..=self.n {
                        names.push(format!("a{j}{k}"));
                        names.push(format!("b{j}{k}"));
                    }
                }
                names
            }
        }
    }

    fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.chart != self.kind {
            return Err(Error::InvalidArgument(format!(
                "point belongs to chart '{}', not '{}'",
                p.chart.name(),
                self.kind.name()
            )));
        }
        if p.params.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                found: p.params.len(),
            });
        }
        Ok(())
    }

    /// `offset + sum_i params_i D_i`, with no positivity check.
    pub fn affine_image(&self, params: &[f64]) -> Result<ComplexMatrix> {
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                found: params.len(),
            });
        }
        let mut m = self.offset.clone();
        for (p, d) in params.iter().zip(&self.directions) {
            if *p != 0.0 {
                m += d * C64::from(*p);
            }
        }
        Ok(m)
    }

    /// Maps a point inside the chart domain to its density matrix.
    pub fn to_matrix(&self, p: &ChartPoint) -> Result<DensityMatrix> {
        self.check_point(p)?;
        if self.kind == ChartKind::ConvexWeights {
            let sum: f64 = p.params.iter().sum();
            if p.params.iter().any(|&w| w < -DOMAIN_TOL) || sum > 1.0 + DOMAIN_TOL {
                return Err(Error::OutsideChartDomain(format!(
                    "weights must be non-negative with sum <= 1 (sum = {sum})"
                )));
            }
        }
        match DensityMatrix::new(self.affine_image(&p.params)?) {
            Err(Error::NotPsd { min_eigenvalue }) => Err(Error::OutsideChartDomain(format!(
                "image has eigenvalue {min_eigenvalue:e}"
            ))),
            other => other,
        }
    }

    /// Linear coordinates of a traceless Hermitian direction.
    pub fn linear_coords(&self, h: &ComplexMatrix) -> Result<Vec<f64>> {
        if h.nrows() != self.n || h.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: h.nrows(),
            });
        }
        let n = self.n;
        Ok(match self.kind {
            ChartKind::Naive => {
                let mut out: Vec<f64> = (0..n - 1).map(|k| h[(k, k)].re).collect();
                for j in 0..n {
                    for k in (j + 1)..n {
                        out.push(h[(j, k)].re);
                        out.push(h[(j, k)].im);
                    }
                }
                out
            }
            ChartKind::GeneratorCoords => self
                .directions
                .iter()
                .map(|d| 2.0 * linalg::trace_product_re(h, d))
                .collect(),
            ChartKind::ConvexWeights => {
                let rhs = DVector::from_iterator(
                    self.param_count(),
                    self.directions
                        .iter()
                        .map(|d| linalg::trace_product_re(d, h)),
                );
                let chol = self.gram.as_ref().expect("weights chart carries its Gram factor");
                chol.solve(&rhs).iter().copied().collect()
            }
        })
    }

    /// Chart coordinates of `rho`. Fails with `NotInSpan` when the matrix is
    /// not reproduced by its coordinates (non-Hermitian or wrong trace).
    pub fn from_matrix(&self, rho: &ComplexMatrix) -> Result<ChartPoint> {
        let shifted = rho - &self.offset;
        let params = self.linear_coords(&shifted)?;
        let residual = linalg::max_abs(&(self.affine_image(&params)? - rho));
        if residual > SPAN_TOL {
            return Err(Error::NotInSpan { residual });
        }
        Ok(ChartPoint::new(self.kind, params))
    }

    /// Coordinates of `I_N / N`.
    pub fn center(&self) -> ChartPoint {
        self.from_matrix(&(linalg::identity(self.n) * C64::from(1.0 / self.n as f64)))
            .expect("the maximally mixed state lies in every chart")
    }
}

/// Constant Jacobian of an affine change of chart.
#[derive(Debug, Clone)]
pub struct Jacobian {
    pub from: ChartKind,
    pub to: ChartKind,
    /// `to_params = matrix * from_params + const`.
    pub matrix: DMatrix<f64>,
    pub abs_det: f64,
}

pub fn jacobian(from: &Chart, to: &Chart) -> Result<Jacobian> {
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch {
            expected: from.dim(),
            found: to.dim(),
        });
    }
    let d = from.param_count();
    let mut matrix = DMatrix::zeros(to.param_count(), d);
    for (i, dir) in from.directions().iter().enumerate() {
        let col = to.linear_coords(dir)?;
        for (r, v) in col.into_iter().enumerate() {
            matrix[(r, i)] = v;
        }
    }
    let abs_det = matrix.clone().lu().determinant().abs();
    Ok(Jacobian {
        from: from.kind(),
        to: to.kind(),
        matrix,
        abs_det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::states::ProductBasis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn charts4() -> Vec<Chart> {
        vec![
            Chart::for_dimension(ChartKind::ConvexWeights, 4).unwrap(),
            Chart::naive(4),
            Chart::generator(4).unwrap(),
        ]
    }

    fn random_state(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let p = &a * a.adjoint() + linalg::identity(n) * C64::from(0.05);
        let t = linalg::trace(&p);
        p / t
    }

    #[test]
    fn uniform_weights_give_maximally_mixed() {
        let chart = Chart::for_dimension(ChartKind::ConvexWeights, 4).unwrap();
        let rho = chart
            .to_matrix(&ChartPoint::new(ChartKind::ConvexWeights, vec![1.0 / 16.0; 15]))
            .unwrap();
        assert!(max_abs(&(rho.matrix() - linalg::identity(4) * C64::from(0.25))) < 1e-15);
    }

    #[test]
    fn generator_origin_and_naive_center() {
        let g = Chart::generator(4).unwrap();
        let rho = g
            .to_matrix(&ChartPoint::new(ChartKind::GeneratorCoords, vec![0.0; 15]))
            .unwrap();
        assert!(max_abs(&(rho.matrix() - linalg::identity(4) * C64::from(0.25))) < 1e-15);

        let naive = Chart::naive(4).center();
        assert_eq!(&naive.params[..3], &[0.25, 0.25, 0.25]);
        assert!(naive.params[3..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn weights_domain_is_enforced() {
        let chart = Chart::for_dimension(ChartKind::ConvexWeights, 4).unwrap();
        let mut w = vec![0.0; 15];
        w[0] = -0.1;
        assert!(matches!(
            chart.to_matrix(&ChartPoint::new(ChartKind::ConvexWeights, w)),
            Err(Error::OutsideChartDomain(_))
        ));
        let naive = Chart::naive(4);
        let mut p = naive.center().params;
        p[0] = 1.5;
        assert!(matches!(
            naive.to_matrix(&ChartPoint::new(ChartKind::Naive, p)),
            Err(Error::OutsideChartDomain(_))
        ));
    }

    #[test]
    fn round_trips_through_every_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for chart in charts4() {
            for _ in 0..20 {
                let rho = random_state(&mut rng, 4);
                let p = chart.from_matrix(&rho).unwrap();
                let back = chart.affine_image(&p.params).unwrap();
                assert!(max_abs(&(back - &rho)) < 1e-12);
                let p2 = chart.from_matrix(&chart.affine_image(&p.params).unwrap()).unwrap();
                for (a, b) in p.params.iter().zip(&p2.params) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn from_matrix_rejects_wrong_trace() {
        for chart in charts4() {
            let m = linalg::identity(4) * C64::from(0.5);
            assert!(matches!(chart.from_matrix(&m), Err(Error::NotInSpan { .. })));
        }
    }

    #[test]
    fn pauli_basis_has_no_weight_chart() {
        assert!(Chart::convex_weights(&ProductBasis::from_kind(ProductKind::Pauli36)).is_err());
    }

    #[test]
    fn jacobian_determinants() {
        let [w, naive, gen]: [Chart; 3] = charts4().try_into().unwrap();
        let id = jacobian(&w, &w).unwrap();
        assert!(max_abs_real(&(id.matrix - DMatrix::identity(15, 15))) < 1e-12);
        assert!((id.abs_det - 1.0).abs() < 1e-12);

        let n2g = jacobian(&naive, &gen).unwrap();
        let expected = 2f64.powi(14) * 2f64.sqrt();
        assert!((n2g.abs_det / expected - 1.0).abs() < 1e-12);

        // weights -> naive: |det| = 2^10 / 3^12
        let w2n = jacobian(&w, &naive).unwrap();
        let expected = 2f64.powi(10) / 3f64.powi(12);
        assert!((w2n.abs_det / expected - 1.0).abs() < 1e-12, "{}", w2n.abs_det);
    }

    fn max_abs_real(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    #[test]
    fn jacobian_matches_finite_difference_assembly() {
        let charts = charts4();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(&mut rng, 4);
        for from in &charts {
            for to in &charts {
                let j = jacobian(from, to).unwrap();
                let base = from.from_matrix(&rho).unwrap().params;
                let to_base = to.from_matrix(&rho).unwrap().params;
                let h = 1e-3;
                let mut fd = DMatrix::zeros(15, 15);
                for i in 0..15 {
                    let mut p = base.clone();
                    p[i] += h;
                    let q = to.from_matrix(&from.affine_image(&p).unwrap()).unwrap().params;
                    for r in 0..15 {
                        fd[(r, i)] = (q[r] - to_base[r]) / h;
                    }
                }
                assert!(max_abs_real(&(&fd - &j.matrix)) < 1e-8);
                let fd_det = fd.lu().determinant().abs();
                assert!((fd_det / j.abs_det - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn jacobian_composition_is_identity() {
        let charts = charts4();
        for a in &charts {
            for b in &charts {
                let ab = jacobian(a, b).unwrap().matrix;
                let ba = jacobian(b, a).unwrap().matrix;
                assert!(max_abs_real(&(&ab * &ba - DMatrix::identity(15, 15))) < 1e-10);
            }
        }
    }

    #[test]
    fn three_qubit_charts_have_63_parameters() {
        for kind in [ChartKind::ConvexWeights, ChartKind::Naive, ChartKind::GeneratorCoords] {
            let c = Chart::for_dimension(kind, 8).unwrap();
            assert_eq!(c.param_count(), 63);
            assert_eq!(c.param_names().len(), 63);
            let center = c.center();
            let m = c.affine_image(&center.params).unwrap();
            assert!(max_abs(&(m - linalg::identity(8) * C64::from(0.125))) < 1e-13);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn charts_are_affine(
                p in proptest::collection::vec(-0.05f64..0.05, 15),
                q in proptest::collection::vec(-0.05f64..0.05, 15),
                alpha in 0.0f64..1.0,
            ) {
                for chart in charts4() {
                    let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
                    let lhs = chart.affine_image(&mix).unwrap();
                    let rhs = chart.affine_image(&p).unwrap() * C64::from(alpha)
                        + chart.affine_image(&q).unwrap() * C64::from(1.0 - alpha);
                    prop_assert!(max_abs(&(lhs - rhs)) < 1e-13);
                }
            }
        }
    }
}

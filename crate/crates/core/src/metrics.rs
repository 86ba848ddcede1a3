//! Bures, Hilbert-Schmidt and Wigner-Yanase distances, Bures metric tensors
//! in the affine charts, and volume elements.
//!
//! Tensor convention: `g_ab = 1/2 sum_jk Re[<j|A|k><k|B|j>] / (l_j + l_k)`
//! with `A`, `B` the chart's direction matrices, so that the squared Bures
//! distance between nearby states is `dx^T g dx` to leading order. The SD
//! convention multiplies every entry by 4.

use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix, HermitianEigensystem, C64};
use crate::par;
use crate::states::{Chart, ChartKind, ChartPoint, DensityMatrix};
use crate::{Error, Result};

/// Smallest eigenvalue for which a tensor is still evaluated.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Default relative gap separating eigenvalue clusters.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Default finite-difference step of [`fd_oracle`].
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Bures,
    /// Statistical distinguishability, four times Bures.
    #[serde(rename = "sd")]
    SD,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Bures => 1.0,
            Convention::SD => 4.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Bures => "bures",
            Convention::SD => "sd",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bures" => Ok(Convention::Bures),
            "sd" => Ok(Convention::SD),
            other => Err(Error::InvalidArgument(format!("unknown convention '{other}'"))),
        }
    }
}

/// Eigenvalue `value` occurring `multiplicity` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Eigenvalues grouped into clusters, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub clusters: Vec<EigenCluster>,
    pub tolerance: f64,
}

impl SpectrumReport {
    /// Groups eigenvalues whose consecutive gap is at most
    /// `tolerance * max |lambda|`. A cluster's value is the mean of its members.
    pub fn from_eigenvalues(values: &[f64], tolerance: f64) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let scale = sorted.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let gap = tolerance * scale;
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for v in sorted {
            match groups.last_mut() {
                Some(g) if v - g[g.len() - 1] <= gap => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        let clusters = groups
            .into_iter()
            .map(|g| EigenCluster {
                value: g.iter().sum::<f64>() / g.len() as f64,
                multiplicity: g.len(),
            })
            .collect();
        Self {
            clusters,
            tolerance,
        }
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    /// Values of clusters with the given multiplicity, ascending.
    pub fn values_with_multiplicity(&self, m: usize) -> Vec<f64> {
        self.clusters
            .iter()
            .filter(|c| c.multiplicity == m)
            .map(|c| c.value)
            .collect()
    }
}

/// A Bures metric tensor of a chart at a base point.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    pub chart: ChartKind,
    pub base_point: ChartPoint,
    pub convention: Convention,
    pub g: DMatrix<f64>,
}

impl MetricTensor {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `u^T g u`.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        let u = DVector::from_column_slice(u);
        u.dot(&(&self.g * &u))
    }

    pub fn trace(&self) -> f64 {
        self.g.trace()
    }

    pub fn eigenvalues(&self) -> Result<DVector<f64>> {
        Ok(linalg::symmetric_eigen(&self.g)?.0)
    }

    pub fn spectrum(&self, tolerance: f64) -> Result<SpectrumReport> {
        let ev = self.eigenvalues()?;
        Ok(SpectrumReport::from_eigenvalues(ev.as_slice(), tolerance))
    }

    pub fn with_convention(&self, convention: Convention) -> Self {
        let scale = convention.factor() / self.convention.factor();
        Self {
            g: &self.g * scale,
            convention,
            ..self.clone()
        }
    }

    /// `g' = J^T g J` for the pullback through a constant Jacobian.
    pub fn pulled_back(&self, jacobian: &DMatrix<f64>) -> DMatrix<f64> {
        jacobian.transpose() * &self.g * jacobian
    }

    pub fn volume_element(&self) -> Result<f64> {
        volume_element(&self.g)
    }

    pub fn dump(&self, tolerance: f64) -> Result<TensorDump> {
        let n = self.dim();
        Ok(TensorDump {
            chart: self.chart,
            base_point: self.base_point.clone(),
            convention: self.convention,
            dim: n,
            g: (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .map(|(r, c)| self.g[(r, c)])
                .collect(),
            eigenvalue_clusters: self.spectrum(tolerance)?.clusters,
        })
    }
}

/// Serializable form of a [`MetricTensor`], `g` stored row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorDump {
    pub chart: ChartKind,
    pub base_point: ChartPoint,
    pub convention: Convention,
    pub dim: usize,
    pub g: Vec<f64>,
    pub eigenvalue_clusters: Vec<EigenCluster>,
}

fn check_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Squared Bures distance between nearby states `rho` and `rho + delta`,
/// free of the cancellation in `2 - 2F`.
///
/// With `E = sqrt(rho) delta sqrt(rho)`, `sqrt(rho^2 + E) = rho + X` where
/// `rho X + X rho + X^2 = E`. Writing `X = X1 + Y` with `X1` the first-order
/// solution, `d^2 = Tr delta - 2 Tr X1 - 2 Tr Y` and the first two terms
/// cancel identically. `Y` is found by fixed-point iteration in the
/// eigenbasis of `rho`. Returns `None` when the iteration does not contract.
fn near_bures_sq(es: &HermitianEigensystem, delta: &ComplexMatrix) -> Option<f64> {
    let n = es.dim();
    let lam = &es.eigenvalues;
    if lam[0] <= 0.0 {
        return None;
    }
    let v = &es.eigenvectors;
    let dt = v.adjoint() * delta * v;
    let x1 = ComplexMatrix::from_fn(n, n, |j, k| {
        dt[(j, k)] * C64::from((lam[j] * lam[k]).sqrt() / (lam[j] + lam[k]))
    });
    let lead: f64 = (0..n).map(|j| dt[(j, j)].re - 2.0 * x1[(j, j)].re).sum();
    let mut y = ComplexMatrix::zeros(n, n);
    for _ in 0..200 {
        let x = &x1 + &y;
        let sq = &x * &x;
        let next = ComplexMatrix::from_fn(n, n, |j, k| -sq[(j, k)] / (lam[j] + lam[k]));
        let change = linalg::max_abs(&(&next - &y));
        let size = linalg::max_abs(&next);
        y = next;
        if change <= 1e-16 * size || size == 0.0 {
            let tr_y: f64 = (0..n).map(|j| y[(j, j)].re).sum();
            return Some(lead - 2.0 * tr_y);
        }
        if !size.is_finite() {
            return None;
        }
    }
    None
}

/// Root fidelity `Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`.
pub fn root_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho1, rho2)?;
    let s = linalg::psd_sqrt(rho1.matrix())?;
    let inner = &s * rho2.matrix() * &s;
    let inner = (&inner + inner.adjoint()) * C64::from(0.5);
    let es = linalg::psd_eigensystem(&inner)?;
    Ok(es.eigenvalues.iter().map(|l| l.sqrt()).sum())
}

/// `d_B = sqrt(2 - 2 F)` with `F` the root fidelity, in `[0, sqrt 2]`.
pub fn bures_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho1, rho2)?;
    if rho1.matrix() == rho2.matrix() {
        return Ok(0.0);
    }
    let delta = rho2.matrix() - rho1.matrix();
    // close pairs of full-rank states go through the cancellation-free form
    let es = linalg::psd_eigensystem(rho1.matrix())?;
    let lmin = es.min_eigenvalue();
    if lmin > BOUNDARY_TOL && linalg::max_abs(&delta) * (rho1.dim() as f64) < 0.25 * lmin {
        if let Some(d2) = near_bures_sq(&es, &delta) {
            return Ok(d2.max(0.0).sqrt());
        }
    }
    let f = root_fidelity(rho1, rho2)?.min(1.0);
    Ok((2.0 - 2.0 * f).max(0.0).sqrt())
}

pub fn hs_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho1, rho2)?;
    let d = rho1.matrix() - rho2.matrix();
    Ok(linalg::trace_product_re(&d, &d).max(0.0).sqrt())
}

/// `2 arccos(Tr[sqrt(rho1) sqrt(rho2)])`.
pub fn wy_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho1, rho2)?;
    if rho1.matrix() == rho2.matrix() {
        return Ok(0.0);
    }
    let a = linalg::psd_sqrt(rho1.matrix())?;
    let b = linalg::psd_sqrt(rho2.matrix())?;
    let overlap = linalg::trace_product_re(&a, &b).clamp(-1.0, 1.0);
    Ok(2.0 * overlap.acos())
}

/// Bures tensor of the affine family `rho + sum_a x_a D_a` at `rho`.
pub fn bures_tensor_at(rho: &ComplexMatrix, directions: &[ComplexMatrix]) -> Result<DMatrix<f64>> {
    let es = linalg::hermitian_eigensystem(rho)?;
    let lmin = es.min_eigenvalue();
    if lmin <= BOUNDARY_TOL {
        return Err(Error::BoundaryState {
            min_eigenvalue: lmin,
        });
    }
    Ok(tensor_from_eigensystem(&es, directions))
}

/// `W_a(j,k) = <j|D_a|k> / sqrt(l_j + l_k)` in the eigenbasis, so that
/// `g_ab = Re<W_a, W_b> / 2`.
pub(crate) fn weighted_directions(es: &HermitianEigensystem, directions: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let n = es.dim();
    let lam = &es.eigenvalues;
    let v = &es.eigenvectors;
    par::map_slice(directions, |d| {
        let dt = v.adjoint() * d * v;
        ComplexMatrix::from_fn(n, n, |j, k| dt[(j, k)] / (lam[j] + lam[k]).sqrt())
    })
}

fn tensor_from_eigensystem(es: &HermitianEigensystem, directions: &[ComplexMatrix]) -> DMatrix<f64> {
    let weighted = weighted_directions(es, directions);
    let d = directions.len();
    let rows: Vec<Vec<f64>> = par::map_range(d, |a| {
        (a..d)
            .map(|b| {
                let s: f64 = weighted[a]
                    .iter()
                    .zip(weighted[b].iter())
                    .map(|(x, y)| x.re * y.re + x.im * y.im)
                    .sum();
                0.5 * s
            })
            .collect()
    });
    let mut g = DMatrix::zeros(d, d);
    for (a, row) in rows.into_iter().enumerate() {
        for (off, val) in row.into_iter().enumerate() {
            g[(a, a + off)] = val;
            g[(a + off, a)] = val;
        }
    }
    g
}

/// Bures metric tensor of `chart` at `point`.
pub fn bures_tensor(chart: &Chart, point: &ChartPoint, convention: Convention) -> Result<MetricTensor> {
    let rho = chart.to_matrix(point)?;
    let mut g = bures_tensor_at(rho.matrix(), chart.directions())?;
    if convention != Convention::Bures {
        g *= convention.factor();
    }
    Ok(MetricTensor {
        chart: chart.kind(),
        base_point: point.clone(),
        convention,
        g,
    })
}

/// Finite-difference estimate of `u^T g u` from Bures distances alone.
///
/// Uses `f(h) = (d^2(x, x + h u) + d^2(x, x - h u)) / (2 h^2)` and the
/// Richardson combination `(4 f(h/2) - f(h)) / 3`.
pub fn fd_oracle(chart: &Chart, point: &ChartPoint, direction: &[f64], eps: f64) -> Result<f64> {
    let rho = chart.to_matrix(point)?;
    let es = linalg::hermitian_eigensystem(rho.matrix())?;
    let lmin = es.min_eigenvalue();
    if lmin <= BOUNDARY_TOL {
        return Err(Error::BoundaryState {
            min_eigenvalue: lmin,
        });
    }
    if direction.len() != chart.param_count() {
        return Err(Error::DimensionMismatch {
            expected: chart.param_count(),
            found: direction.len(),
        });
    }
    let mut u = ComplexMatrix::zeros(chart.dim(), chart.dim());
    for (c, d) in direction.iter().zip(chart.directions()) {
        u += d * C64::from(*c);
    }
    if linalg::max_abs(&u) == 0.0 {
        return Ok(0.0);
    }
    let sq = |h: f64| -> Result<f64> {
        let delta = &u * C64::from(h);
        near_bures_sq(&es, &delta).ok_or_else(|| {
            Error::NoConvergence(format!("near-state fidelity at step {h:e}"))
        })
    };
    let f = |h: f64| -> Result<f64> { Ok((sq(h)? + sq(-h)?) / (2.0 * h * h)) };
    let coarse = f(eps)?;
    let fine = f(eps / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `sqrt(det g)` as a product of eigenvalues; 0 if any eigenvalue is not
/// positive.
pub fn volume_element(g: &DMatrix<f64>) -> Result<f64> {
    let (ev, _) = linalg::symmetric_eigen(g)?;
    if ev.iter().any(|&l| l <= 0.0) {
        debug!("volume element of a degenerate tensor (min eigenvalue {:e})", ev.min());
        return Ok(0.0);
    }
    Ok(ev.iter().map(|l| l.sqrt()).product())
}

/// Least-squares scale `s` minimizing `sum (reference_i - s computed_i)^2`.
pub fn fit_scale(reference: &[f64], computed: &[f64]) -> f64 {
    let num: f64 = reference.iter().zip(computed).map(|(r, c)| r * c).sum();
    let den: f64 = computed.iter().map(|c| c * c).sum();
    num / den
}

/// The chart re-expressed in eigen-coordinates of its tensor at the center.
#[derive(Debug, Clone)]
pub struct DiagonalizedChart {
    pub chart: ChartKind,
    pub convention: Convention,
    /// Orthonormal eigenvectors `V` of the center tensor (columns, ascending).
    pub eigenvectors: DMatrix<f64>,
    /// `V^T g V`.
    pub tensor: DMatrix<f64>,
    pub spectrum: SpectrumReport,
    /// `E_k = sum_i V_ik D_i`, so `rho = constant + sum_k v_k E_k`.
    pub directions: Vec<ComplexMatrix>,
    pub constant: ComplexMatrix,
    /// `v = V^T p` at the center.
    pub center_coords: Vec<f64>,
}

impl DiagonalizedChart {
    /// Indices of center coordinates with magnitude above `tol`.
    pub fn nonzero_center_coords(&self, tol: f64) -> Vec<usize> {
        (0..self.center_coords.len())
            .filter(|&i| self.center_coords[i].abs() > tol)
            .collect()
    }

    pub fn max_offdiagonal(&self) -> f64 {
        let n = self.tensor.nrows();
        let mut m = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    m = m.max(self.tensor[(r, c)].abs());
                }
            }
        }
        m
    }
}

/// Rotates the chart's parameters onto the eigenvectors of the tensor at
/// the maximally mixed state.
pub fn diagonalize_chart(chart: &Chart, convention: Convention) -> Result<DiagonalizedChart> {
    let center = chart.center();
    let tensor = bures_tensor(chart, &center, convention)?;
    let (values, v) = linalg::symmetric_eigen(&tensor.g)?;
    let d = chart.param_count();
    let directions = par::map_range(d, |k| {
        let mut e = ComplexMatrix::zeros(chart.dim(), chart.dim());
        for (i, di) in chart.directions().iter().enumerate() {
            e += di * C64::from(v[(i, k)]);
        }
        e
    });
    let p = DVector::from_column_slice(&center.params);
    let center_coords = (v.transpose() * p).iter().copied().collect();
    Ok(DiagonalizedChart {
        chart: chart.kind(),
        convention,
        tensor: v.transpose() * &tensor.g * &v,
        spectrum: SpectrumReport::from_eigenvalues(values.as_slice(), CLUSTER_TOL),
        eigenvectors: v,
        directions,
        constant: chart.offset().clone(),
        center_coords,
    })
}

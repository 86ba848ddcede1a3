//! Pairwise distance classes of product bases, distance graphs and their
//! adjacency spectra, ball-volume formulas, leave-out mixtures and the
//! `w1` path scan through the convex-weight chart.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::metrics::{self, Convention, SpectrumReport};
use crate::par;
use crate::quadrature;
use crate::states::{Chart, ChartKind, ChartPoint, DensityMatrix, ProductBasis, ProductKind};
use crate::{linalg, Error, Result};

/// Absolute tolerance for binning pair values into classes.
pub const CLASS_TOL: f64 = 1e-9;
/// Tolerance when a requested class value is looked up.
pub const CLASS_LOOKUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMetric {
    Bures,
    #[serde(rename = "hs")]
    HilbertSchmidt,
    #[serde(rename = "wy")]
    WignerYanase,
    /// `Tr[m m']`, a similarity rather than a distance.
    TraceProduct,
}

impl PairMetric {
    pub fn name(self) -> &'static str {
        match self {
            PairMetric::Bures => "bures",
            PairMetric::HilbertSchmidt => "hs",
            PairMetric::WignerYanase => "wy",
            PairMetric::TraceProduct => "trace-product",
        }
    }

    pub fn evaluate(self, a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
        match self {
            PairMetric::Bures => metrics::bures_distance(a, b),
            PairMetric::HilbertSchmidt => metrics::hs_distance(a, b),
            PairMetric::WignerYanase => metrics::wy_distance(a, b),
            PairMetric::TraceProduct => Ok(linalg::trace_product_re(a.matrix(), b.matrix())),
        }
    }
}

impl std::str::FromStr for PairMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bures" => Ok(PairMetric::Bures),
            "hs" | "hilbert-schmidt" => Ok(PairMetric::HilbertSchmidt),
            "wy" | "wigner-yanase" => Ok(PairMetric::WignerYanase),
            "trace-product" | "trace" => Ok(PairMetric::TraceProduct),
            other => Err(Error::InvalidArgument(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceClass {
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceClassification {
    pub metric: PairMetric,
    /// Ascending by value.
    pub classes: Vec<DistanceClass>,
    pub tolerance: f64,
}

impl DistanceClassification {
    pub fn total_pairs(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn find(&self, value: f64, tol: f64) -> Option<&DistanceClass> {
        self.classes.iter().find(|c| (c.value - value).abs() <= tol)
    }
}

/// Bins values into classes of width `tol` around their first member and
/// rejects classes closer than `10 tol`.
pub fn bin_values(values: &[f64], tol: f64) -> Result<Vec<DistanceClass>> {
    let mut reps: Vec<(f64, Vec<f64>)> = Vec::new();
    for &v in values {
        match reps.iter_mut().find(|(r, _)| (v - *r).abs() <= tol) {
            Some((_, members)) => members.push(v),
            None => reps.push((v, vec![v])),
        }
    }
    let mut classes: Vec<DistanceClass> = reps
        .into_iter()
        .map(|(_, m)| DistanceClass {
            value: m.iter().sum::<f64>() / m.len() as f64,
            count: m.len(),
        })
        .collect();
    classes.sort_by(|a, b| a.value.total_cmp(&b.value));
    for w in classes.windows(2) {
        if w[1].value - w[0].value <= 10.0 * tol {
            return Err(Error::ClassCollision {
                a: w[0].value,
                b: w[1].value,
            });
        }
    }
    Ok(classes)
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

/// Values of `metric` on all unordered pairs, in `(i, j)` lexicographic order.
pub fn pair_values(basis: &ProductBasis, metric: PairMetric) -> Result<Vec<((usize, usize), f64)>> {
    let pairs = pair_list(basis.len());
    let values = par::try_map_range(pairs.len(), |p| {
        let (i, j) = pairs[p];
        metric.evaluate(&basis.members[i], &basis.members[j])
    })?;
    Ok(pairs.into_iter().zip(values).collect())
}

pub fn classify_pairs(basis: &ProductBasis, metric: PairMetric) -> Result<DistanceClassification> {
    let values: Vec<f64> = pair_values(basis, metric)?.into_iter().map(|(_, v)| v).collect();
    Ok(DistanceClassification {
        metric,
        classes: bin_values(&values, CLASS_TOL)?,
        tolerance: CLASS_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceGraph {
    pub basis: ProductKind,
    pub metric: PairMetric,
    pub class_value: f64,
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    /// Common degree if the graph is regular.
    pub degree: Option<usize>,
    pub spectrum: SpectrumReport,
    /// Node groups sharing their first factor, a drawing hint.
    pub layout_groups: Vec<Vec<usize>>,
}

impl DistanceGraph {
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.nodes, self.nodes);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }
}

/// Graph joining members whose pair value equals `class_value`.
pub fn distance_graph(basis: &ProductBasis, metric: PairMetric, class_value: f64) -> Result<DistanceGraph> {
    let pairs = pair_values(basis, metric)?;
    let classes = bin_values(&pairs.iter().map(|p| p.1).collect::<Vec<_>>(), CLASS_TOL)?;
    let class = classes
        .iter()
        .find(|c| (c.value - class_value).abs() <= CLASS_LOOKUP_TOL)
        .ok_or(Error::UnknownClass(class_value))?;
    let edges: Vec<(usize, usize)> = pairs
        .into_iter()
        .filter(|(_, v)| (v - class.value).abs() <= CLASS_TOL)
        .map(|(e, _)| e)
        .collect();
    let n = basis.len();
    let mut degrees = vec![0usize; n];
    for &(i, j) in &edges {
        degrees[i] += 1;
        degrees[j] += 1;
    }
    let degree = degrees.iter().all(|&d| d == degrees[0]).then_some(degrees[0]);
    let mut graph = DistanceGraph {
        basis: basis.kind,
        metric,
        class_value: class.value,
        nodes: n,
        edges,
        degree,
        spectrum: SpectrumReport::from_eigenvalues(&[], metrics::CLUSTER_TOL),
        layout_groups: Vec::new(),
    };
    let (ev, _) = linalg::symmetric_eigen(&graph.adjacency())?;
    graph.spectrum = SpectrumReport::from_eigenvalues(ev.as_slice(), metrics::CLUSTER_TOL);
    let groups = basis.factors.iter().map(|f| f[0]).max().map_or(0, |m| m + 1);
    graph.layout_groups = (0..groups)
        .map(|g| (0..n).filter(|&i| basis.factors[i][0] == g).collect())
        .collect();
    Ok(graph)
}

/// `Gamma(d/2 + 1)` by exact recurrence from `Gamma(1)` or `Gamma(1/2)`.
fn gamma_half_integer_plus_one(d: u32) -> f64 {
    let (mut g, mut x) = if d.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = d as f64 / 2.0 + 1.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume `pi^(d/2) r^d / Gamma(d/2 + 1)` of the Euclidean `d`-ball.
pub fn euclidean_ball_volume(d: u32, r: f64) -> f64 {
    PI.powf(d as f64 / 2.0) * r.powi(d as i32) / gamma_half_integer_plus_one(d)
}

/// Small-radius geodesic-ball volume on `n x n` density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AndaiEstimate {
    pub value: f64,
    /// The Euclidean term.
    pub leading: f64,
    /// `1 - zeta r^2 / (6 (n^2 + 1))`.
    pub factor: f64,
    /// False when the truncated expansion is negative and so meaningless.
    pub within_validity: bool,
}

/// Leading-order volume of a geodesic ball of radius `r` in a space of
/// dimension `n^2 - 1` with scalar curvature `zeta`.
pub fn andai_ball_volume(n: u32, r: f64, zeta: f64) -> AndaiEstimate {
    let d = n * n - 1;
    let leading = euclidean_ball_volume(d, r);
    let factor = 1.0 - zeta * r * r / (6.0 * (n * n + 1) as f64);
    let value = leading * factor;
    AndaiEstimate {
        value,
        leading,
        factor,
        within_validity: value >= 0.0,
    }
}

/// Scalar curvature of the Wigner-Yanase metric on `n x n` states.
pub fn wy_scalar_curvature(n: u32) -> f64 {
    let n2 = (n * n) as f64;
    (n2 - 1.0) * (n2 - 2.0) / 4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaveOutMixture {
    pub left_out: Vec<usize>,
    pub bures_to_center: f64,
    pub hs_to_center: f64,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in combinations(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                let mut c = vec![first];
                c.extend(rest);
                out.push(c);
            }
        }
    }
    out
}

/// Equal-weight mixtures of the basis with `leave` members removed, and
/// their distances to the maximally mixed state.
pub fn leave_out_mixtures(basis: &ProductBasis, leave: usize) -> Result<Vec<LeaveOutMixture>> {
    if leave == 0 || leave >= basis.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot leave out {leave} of {} members",
            basis.len()
        )));
    }
    let center = DensityMatrix::maximally_mixed(basis.dim());
    let sets = combinations(basis.len(), leave);
    par::try_map_range(sets.len(), |s| -> Result<LeaveOutMixture> {
        let left_out = &sets[s];
        let kept: Vec<DensityMatrix> = (0..basis.len())
            .filter(|i| !left_out.contains(i))
            .map(|i| basis.members[i].clone())
            .collect();
        let w = vec![1.0 / kept.len() as f64; kept.len()];
        let mix = DensityMatrix::mixture(&w, &kept)?;
        Ok(LeaveOutMixture {
            left_out: left_out.clone(),
            bures_to_center: metrics::bures_distance(&mix, &center)?,
            hs_to_center: metrics::hs_distance(&mix, &center)?,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub w1: f64,
    pub volume_element: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathScan {
    pub convention: Convention,
    pub points: Vec<PathPoint>,
    pub argmax_w1: f64,
    /// Bures distance between the two endpoint states.
    pub endpoint_distance: f64,
    /// Its square `2 - 2F`, the form in which the endpoint separation is
    /// usually quoted.
    pub endpoint_distance_squared: f64,
    /// Simpson integral of the volume element over `[0, 1/8]`.
    pub element_integral: f64,
}

/// Convex-weight point on the path `w2..w15 = 1/16`, `w16 = 1/8 - w1`.
pub fn w1_path_point(w1: f64) -> ChartPoint {
    let mut w = vec![1.0 / 16.0; 15];
    w[0] = w1;
    ChartPoint::new(ChartKind::ConvexWeights, w)
}

/// Scans the Tetra16 convex-weight tensor along `w1` in `[0, 1/8]` on
/// `resolution` (odd, at least 3) equally spaced points.
pub fn w1_path_scan(resolution: usize, convention: Convention) -> Result<PathScan> {
    if resolution < 3 || resolution.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "path resolution must be odd and >= 3, got {resolution}"
        )));
    }
    let chart = Chart::convex_weights(&ProductBasis::from_kind(ProductKind::Tetra16))?;
    let h = 0.125 / (resolution - 1) as f64;
    let points = par::try_map_range(resolution, |i| -> Result<PathPoint> {
        let w1 = if i == resolution - 1 { 0.125 } else { i as f64 * h };
        let t = metrics::bures_tensor(&chart, &w1_path_point(w1), convention)?;
        Ok(PathPoint {
            w1,
            volume_element: t.volume_element()?,
            trace: t.trace(),
        })
    })?;
    let argmax_w1 = points
        .iter()
        .fold(&points[0], |best, p| {
            if p.volume_element > best.volume_element {
                p
            } else {
                best
            }
        })
        .w1;
    let start = chart.to_matrix(&w1_path_point(0.0))?;
    let end = chart.to_matrix(&w1_path_point(0.125))?;
    let values: Vec<f64> = points.iter().map(|p| p.volume_element).collect();
    let endpoint_distance = metrics::bures_distance(&start, &end)?;
    Ok(PathScan {
        convention,
        argmax_w1,
        endpoint_distance,
        endpoint_distance_squared: endpoint_distance * endpoint_distance,
        element_integral: quadrature::simpson(&values, h)?,
        points,
    })
}

//! Two-dimensional sections `rho = I/4 + (x l_a + y l_b) / 2` of two-qubit
//! state space through the maximally mixed state.
//!
//! Domains and separable subsets are convex, and the margins `lambda_min(rho)`
//! and `min(lambda_min(rho), lambda_min(rho^PT))` are concave in `(x, y)`.
//! Slices in `y` at fixed `x` are therefore intervals, located by
//! golden-section search and bisection, and areas and Bures volumes are
//! iterated integrals: tanh-sinh over each slice (which tolerates the
//! integrable boundary singularities of the Bures element) inside a globally
//! adaptive Gauss-Kronrod rule in `x`, taken after the substitution
//! `x = x0 + (x1 - x0)(1 - cos t)/2`.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::export;
use crate::linalg::{self, ComplexMatrix, Subsystem, C64};
use crate::metrics::{self, Convention};
use crate::par;
use crate::quadrature::{self, Estimate};
use crate::separability;
use crate::states::{generator_basis, DensityMatrix};
use crate::{Error, Result};

/// Half-width of the square containing every section domain. Generator
/// expectations of two-qubit states obey `|<l_i>| <= sqrt(3/2) < 1.25`.
pub const BOX: f64 = 1.25;
/// Points whose minimum eigenvalue is below `-INSIDE_TOL` are outside.
pub const INSIDE_TOL: f64 = 1e-12;
pub const MIN_GRID_RESOLUTION: usize = 64;
/// Default relative error target for areas and volumes.
pub const DEFAULT_TOL: f64 = 1e-5;

const SEARCH_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 4000;
const TANH_SINH_LEVELS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionScenario {
    /// `C`, `G`, `E` or `custom`.
    pub name: String,
    /// 1-based generator indices.
    pub a: usize,
    pub b: usize,
}

impl SectionScenario {
    /// Generators 6 and 15: a triangular domain.
    pub fn c() -> Self {
        Self::named("C", 6, 15)
    }

    /// Generators 6 and 8: an elliptical domain.
    pub fn g() -> Self {
        Self::named("G", 6, 8)
    }

    /// Generators 3 and 9: a domain bounded by a parabolic arc and a segment.
    pub fn e() -> Self {
        Self::named("E", 3, 9)
    }

    fn named(name: &str, a: usize, b: usize) -> Self {
        Self {
            name: name.to_owned(),
            a,
            b,
        }
    }

    pub fn custom(a: usize, b: usize) -> Result<Self> {
        if a == b || !(1..=15).contains(&a) || !(1..=15).contains(&b) {
            return Err(Error::InvalidArgument(format!(
                "section generators must be distinct indices in 1..=15, got ({a}, {b})"
            )));
        }
        Ok(Self::named("custom", a, b))
    }

    pub fn named_scenarios() -> [Self; 3] {
        [Self::c(), Self::g(), Self::e()]
    }

    /// The two direction matrices `l_a / 2`, `l_b / 2`.
    pub fn directions(&self) -> [ComplexMatrix; 2] {
        let basis = generator_basis(4).expect("N = 4 is supported");
        let half = C64::from(0.5);
        [
            basis.get(self.a).expect("index validated") * half,
            basis.get(self.b).expect("index validated") * half,
        ]
    }

    fn geometry(&self) -> SectionGeometry {
        let [da, db] = self.directions();
        SectionGeometry { da, db }
    }
}

impl std::str::FromStr for SectionScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(Self::c()),
            "G" | "g" => Ok(Self::g()),
            "E" | "e" => Ok(Self::e()),
            _ => {
                let spec = s.strip_prefix("custom:").ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown scenario '{s}'"))
                })?;
                let parts: Vec<&str> = spec.split(',').collect();
                let parse = |p: &str| {
                    p.trim().parse::<usize>().map_err(|_| {
                        Error::InvalidArgument(format!("bad generator index '{p}'"))
                    })
                };
                match parts.as_slice() {
                    [a, b] => Self::custom(parse(a)?, parse(b)?),
                    _ => Err(Error::InvalidArgument(format!(
                        "custom scenarios are written custom:a,b, got '{s}'"
                    ))),
                }
            }
        }
    }
}

/// Which subset of a section an integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Domain,
    Separable,
}

struct SectionGeometry {
    da: ComplexMatrix,
    db: ComplexMatrix,
}

impl SectionGeometry {
    fn matrix(&self, x: f64, y: f64) -> ComplexMatrix {
        linalg::identity(4) * C64::from(0.25) + &self.da * C64::from(x) + &self.db * C64::from(y)
    }

    fn margin(&self, region: Region, x: f64, y: f64) -> f64 {
        let m = self.matrix(x, y);
        let own = linalg::min_eigenvalue(&m).unwrap_or(f64::NEG_INFINITY);
        match region {
            Region::Domain => own,
            Region::Separable => {
                let pt = linalg::partial_transpose(&m, (2, 2), Subsystem::B)
                    .ok()
                    .and_then(|p| linalg::min_eigenvalue(&p).ok())
                    .unwrap_or(f64::NEG_INFINITY);
                own.min(pt)
            }
        }
    }

    fn slice(&self, region: Region, x: f64) -> Option<(f64, f64)> {
        quadrature::superlevel_interval(|y| self.margin(region, x, y), -BOX, BOX, SEARCH_TOL)
    }

    fn x_extent(&self, region: Region) -> Option<(f64, f64)> {
        let height = |x: f64| {
            quadrature::golden_max(|y| self.margin(region, x, y), -BOX, BOX, SEARCH_TOL).1
        };
        quadrature::superlevel_interval(height, -BOX, BOX, SEARCH_TOL)
    }

    /// Bures area element at an interior point, or NaN when not positive
    /// definite. Uses `det g = 1/4 sum_{p<q} (u_p v_q - u_q v_p)^2` over the
    /// real components of the weighted directions, which avoids the
    /// cancellation in `g11 g22 - g12^2` near the boundary.
    fn element(&self, x: f64, y: f64) -> f64 {
        let Ok(es) = linalg::hermitian_eigensystem(&self.matrix(x, y)) else {
            return f64::NAN;
        };
        if es.min_eigenvalue() <= 0.0 {
            return f64::NAN;
        }
        let w = metrics::weighted_directions(&es, &[self.da.clone(), self.db.clone()]);
        let u: Vec<f64> = w[0].iter().flat_map(|c| [c.re, c.im]).collect();
        let v: Vec<f64> = w[1].iter().flat_map(|c| [c.re, c.im]).collect();
        let mut s = 0.0;
        for p in 0..u.len() {
            for q in (p + 1)..u.len() {
                let t = u[p] * v[q] - u[q] * v[p];
                s += t * t;
            }
        }
        0.5 * s.sqrt()
    }
}

/// The state at `(x, y)`, or `Outside`.
pub fn section_state(scenario: &SectionScenario, x: f64, y: f64) -> Result<DensityMatrix> {
    let m = scenario.geometry().matrix(x, y);
    if linalg::min_eigenvalue(&m)? < -INSIDE_TOL {
        return Err(Error::Outside { x, y });
    }
    DensityMatrix::new(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellClass {
    Outside,
    Separable,
    Entangled,
}

/// Cell-center classification over `[-BOX, BOX]^2`, rows ordered by `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassGrid {
    pub resolution: usize,
    pub centers: Vec<f64>,
    pub cells: Vec<CellClass>,
}

impl ClassGrid {
    pub fn get(&self, ix: usize, iy: usize) -> CellClass {
        self.cells[iy * self.resolution + ix]
    }

    pub fn cell_area(&self) -> f64 {
        let h = 2.0 * BOX / self.resolution as f64;
        h * h
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }

    pub fn domain_area(&self) -> f64 {
        (self.count(CellClass::Separable) + self.count(CellClass::Entangled)) as f64 * self.cell_area()
    }

    pub fn separable_area(&self) -> f64 {
        self.count(CellClass::Separable) as f64 * self.cell_area()
    }
}

/// Centers of `resolution` equal cells across `[-BOX, BOX]`.
pub fn grid_centers(resolution: usize) -> Vec<f64> {
    let h = 2.0 * BOX / resolution as f64;
    (0..resolution).map(|i| -BOX + (i as f64 + 0.5) * h).collect()
}

pub fn classify_point(scenario: &SectionScenario, x: f64, y: f64) -> Result<CellClass> {
    match section_state(scenario, x, y) {
        Err(Error::Outside { .. }) => Ok(CellClass::Outside),
        Err(e) => Err(e),
        Ok(rho) => Ok(if separability::classify_2qubit(&rho)?.is_separable {
            CellClass::Separable
        } else {
            CellClass::Entangled
        }),
    }
}

pub fn classify_grid(scenario: &SectionScenario, resolution: usize) -> Result<ClassGrid> {
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least {MIN_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    let centers = grid_centers(resolution);
    let rows = par::try_map_range(resolution, |iy| -> Result<Vec<CellClass>> {
        centers
            .iter()
            .map(|&x| classify_point(scenario, x, centers[iy]))
            .collect()
    })?;
    Ok(ClassGrid {
        resolution,
        centers,
        cells: rows.into_iter().flatten().collect(),
    })
}

/// `int_{x0}^{x1} f(x) dx` after `x = x0 + (x1 - x0)(1 - cos t)/2`, which
/// smooths square-root behaviour at both ends.
fn outer_integral<F>(f: F, x0: f64, x1: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let half = 0.5 * (x1 - x0);
    quadrature::adaptive_gk(
        |t: f64| {
            let x = x0 + half * (1.0 - t.cos());
            f(x) * half * t.sin()
        },
        0.0,
        PI,
        rel_tol,
        0.0,
        MAX_PANELS,
    )
}

fn region_area(geo: &SectionGeometry, region: Region, rel_tol: f64) -> Result<Estimate> {
    let Some((x0, x1)) = geo.x_extent(region) else {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    };
    outer_integral(
        |x| geo.slice(region, x).map_or(0.0, |(lo, hi)| hi - lo),
        x0,
        x1,
        rel_tol,
    )
}

fn region_volume(geo: &SectionGeometry, region: Region, rel_tol: f64) -> Result<Estimate> {
    let Some((x0, x1)) = geo.x_extent(region) else {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    };
    let inner_tol = 0.1 * rel_tol;
    outer_integral(
        |x| {
            geo.slice(region, x).map_or(0.0, |(lo, hi)| {
                quadrature::tanh_sinh(|y| geo.element(x, y), lo, hi, inner_tol, 0.0, TANH_SINH_LEVELS)
                    .value
            })
        },
        x0,
        x1,
        rel_tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaReport {
    pub total: Estimate,
    pub separable: Estimate,
}

impl AreaReport {
    pub fn probability(&self) -> f64 {
        self.separable.value / self.total.value
    }
}

/// Euclidean areas of the domain and of its separable part in `(x, y)`.
pub fn euclidean_areas(scenario: &SectionScenario, rel_tol: f64) -> Result<AreaReport> {
    let geo = scenario.geometry();
    Ok(AreaReport {
        total: region_area(&geo, Region::Domain, rel_tol)?,
        separable: region_area(&geo, Region::Separable, rel_tol)?,
    })
}

/// `sqrt(det g)` of the 2 x 2 Bures tensor of the section coordinates.
pub fn bures_section_element(scenario: &SectionScenario, x: f64, y: f64, convention: Convention) -> Result<f64> {
    let geo = scenario.geometry();
    let min = linalg::min_eigenvalue(&geo.matrix(x, y))?;
    if min < -INSIDE_TOL {
        return Err(Error::Outside { x, y });
    }
    if min <= metrics::BOUNDARY_TOL {
        return Err(Error::BoundaryState {
            min_eigenvalue: min,
        });
    }
    Ok(convention.factor() * geo.element(x, y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionReport {
    pub scenario: SectionScenario,
    pub convention: Convention,
    pub target_relative_error: f64,
    pub euclidean_area_total: f64,
    pub euclidean_area_sep: f64,
    pub bures_volume_total: f64,
    pub bures_volume_sep: f64,
    pub probability_euclidean: f64,
    pub probability_bures: f64,
    pub euclidean_error_total: f64,
    pub euclidean_error_sep: f64,
    pub bures_error_total: f64,
    pub bures_error_sep: f64,
}

/// Euclidean areas and Bures volumes of the domain and its separable part.
pub fn bures_volumes(scenario: &SectionScenario, rel_tol: f64, convention: Convention) -> Result<SectionReport> {
    let geo = scenario.geometry();
    let areas = euclidean_areas(scenario, rel_tol)?;
    let total = region_volume(&geo, Region::Domain, rel_tol)?;
    let sep = region_volume(&geo, Region::Separable, rel_tol)?;
    // the area element scales linearly with the metric factor in two dimensions
    let c = convention.factor();
    Ok(SectionReport {
        scenario: scenario.clone(),
        convention,
        target_relative_error: rel_tol,
        euclidean_area_total: areas.total.value,
        euclidean_area_sep: areas.separable.value,
        bures_volume_total: c * total.value,
        bures_volume_sep: c * sep.value,
        probability_euclidean: areas.separable.value / areas.total.value,
        probability_bures: sep.value / total.value,
        euclidean_error_total: areas.total.error,
        euclidean_error_sep: areas.separable.error,
        bures_error_total: c * total.error,
        bures_error_sep: c * sep.error,
    })
}

/// Rows `(x, y, element)` over the cell centers; NaN outside the domain.
pub fn element_grid(scenario: &SectionScenario, resolution: usize, convention: Convention) -> Result<Vec<Vec<f64>>> {
    if resolution < 3 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 3, got {resolution}"
        )));
    }
    let geo = scenario.geometry();
    let centers = grid_centers(resolution);
    let rows = par::map_range(resolution, |iy| {
        let y = centers[iy];
        centers
            .iter()
            .map(|&x| {
                let m = geo.matrix(x, y);
                let inside = linalg::min_eigenvalue(&m).map(|l| l >= -INSIDE_TOL).unwrap_or(false);
                let value = if !inside {
                    f64::NAN
                } else {
                    let e = geo.element(x, y);
                    // a boundary point inside the tolerance band
                    if e.is_nan() { f64::INFINITY } else { convention.factor() * e }
                };
                vec![x, y, value]
            })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

pub fn emit_element_grid(scenario: &SectionScenario, resolution: usize, convention: Convention, path: &Path) -> Result<()> {
    let rows = element_grid(scenario, resolution, convention)?;
    export::write_csv_file(path, &["x", "y", "value"], &rows)
}

/// Observed shape of a domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainShape {
    Triangle,
    Ellipse,
    Parabola,
    Hyperbola,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub shape: DomainShape,
    /// Largest distance of a boundary sample from the fitted curve.
    pub residual: f64,
    pub triangle_vertices: Option<[(f64, f64); 3]>,
    /// Unit-norm coefficients `(A, B, C, D, E, F)` of
    /// `A x^2 + B xy + C y^2 + D x + E y + F = 0`.
    pub conic: Option<[f64; 6]>,
}

pub const TRIANGLE_TOL: f64 = 1e-6;
pub const CONIC_TOL: f64 = 1e-8;

/// Slice endpoints at `n` abscissae strictly inside the domain's x-range.
pub fn boundary_samples(scenario: &SectionScenario, region: Region, n: usize) -> Vec<(f64, f64)> {
    let geo = scenario.geometry();
    let Some((x0, x1)) = geo.x_extent(region) else {
        return Vec::new();
    };
    let per_x = par::map_range(n, |i| {
        let t = PI * (i as f64 + 0.5) / n as f64;
        let x = x0 + 0.5 * (x1 - x0) * (1.0 - t.cos());
        geo.slice(region, x).map(|(lo, hi)| [(x, lo), (x, hi)])
    });
    per_x.into_iter().flatten().flatten().collect()
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

fn line_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    ((p.0 - a.0) * dy - (p.1 - a.1) * dx).abs() / (dx * dx + dy * dy).sqrt()
}

fn triangle_fit(geo: &SectionGeometry, samples: &[(f64, f64)]) -> Option<([(f64, f64); 3], f64)> {
    let (x0, x1) = geo.x_extent(Region::Domain)?;
    let apex = |x: f64| {
        let (y, _) = quadrature::golden_max(|y| geo.margin(Region::Domain, x, y), -BOX, BOX, SEARCH_TOL);
        (x, y)
    };
    let (left, right) = (apex(x0), apex(x1));
    let mut best = (left, 0.0);
    for pick_upper in [false, true] {
        let dist = |x: f64| {
            geo.slice(Region::Domain, x).map_or(0.0, |(lo, hi)| {
                line_distance((x, if pick_upper { hi } else { lo }), left, right)
            })
        };
        let (x, d) = quadrature::golden_max(dist, x0, x1, SEARCH_TOL);
        if d > best.1 {
            let (lo, hi) = geo.slice(Region::Domain, x)?;
            best = ((x, if pick_upper { hi } else { lo }), d);
        }
    }
    let v = [left, right, best.0];
    let residual = samples
        .iter()
        .map(|&p| {
            segment_distance(p, v[0], v[1])
                .min(segment_distance(p, v[1], v[2]))
                .min(segment_distance(p, v[2], v[0]))
        })
        .fold(0.0f64, f64::max);
    Some((v, residual))
}

fn conic_fit(samples: &[(f64, f64)]) -> Option<([f64; 6], f64)> {
    if samples.len() < 6 {
        return None;
    }
    let design = DMatrix::from_fn(samples.len(), 6, |r, c| {
        let (x, y) = samples[r];
        [x * x, x * y, y * y, x, y, 1.0][c]
    });
    let svd = design.svd(false, true);
    let vt = svd.v_t?;
    let k = svd.singular_values.argmin().0;
    let coef: [f64; 6] = std::array::from_fn(|i| vt[(k, i)]);
    let [a, b, c, d, e, f] = coef;
    let residual = samples
        .iter()
        .map(|&(x, y)| {
            let q = a * x * x + b * x * y + c * y * y + d * x + e * y + f;
            let gx = 2.0 * a * x + b * y + d;
            let gy = b * x + 2.0 * c * y + e;
            q.abs() / (gx * gx + gy * gy).sqrt()
        })
        .fold(0.0f64, f64::max);
    Some((coef, residual))
}

/// Classifies the domain boundary as a triangle or a conic.
pub fn domain_shape(scenario: &SectionScenario) -> ShapeReport {
    let geo = scenario.geometry();
    let samples = boundary_samples(scenario, Region::Domain, 200);
    let triangle = triangle_fit(&geo, &samples);
    if let Some((v, residual)) = triangle {
        if residual < TRIANGLE_TOL {
            return ShapeReport {
                shape: DomainShape::Triangle,
                residual,
                triangle_vertices: Some(v),
                conic: None,
            };
        }
    }
    let Some((coef, residual)) = conic_fit(&samples) else {
        return ShapeReport {
            shape: DomainShape::Unknown,
            residual: f64::INFINITY,
            triangle_vertices: None,
            conic: None,
        };
    };
    let [a, b, c, ..] = coef;
    let disc = b * b - 4.0 * a * c;
    let shape = if residual >= CONIC_TOL {
        DomainShape::Unknown
    } else if disc.abs() <= 1e-8 * (a * a + b * b + c * c) {
        DomainShape::Parabola
    } else if disc < 0.0 {
        DomainShape::Ellipse
    } else {
        DomainShape::Hyperbola
    };
    ShapeReport {
        shape,
        residual,
        triangle_vertices: None,
        conic: Some(coef),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub scenario: String,
    pub expected_shape: DomainShape,
    pub observed: ShapeReport,
    pub expected_area: f64,
    pub area: f64,
    pub ok: bool,
}

/// Closed-form domain shapes and areas of the named scenarios.
pub fn expected_domains() -> [(SectionScenario, DomainShape, f64); 3] {
    [
        (
            SectionScenario::c(),
            DomainShape::Triangle,
            2f64.powf(2.5) / 3f64.powf(1.5),
        ),
        (
            SectionScenario::g(),
            DomainShape::Ellipse,
            9.0 * PI * 1.5f64.sqrt() / 32.0,
        ),
        (
            SectionScenario::e(),
            DomainShape::Parabola,
            2.0 * 2f64.sqrt() / 3.0,
        ),
    ]
}

/// Checks that the generator table reproduces the named scenarios' domain
/// shapes and areas (relative tolerance `1e-6`).
pub fn calibrate() -> Result<Vec<CalibrationEntry>> {
    let entries = par::try_map_range(3, |i| -> Result<CalibrationEntry> {
        let (scenario, expected_shape, expected_area) = expected_domains()[i].clone();
        let observed = domain_shape(&scenario);
        let area = region_area(&scenario.geometry(), Region::Domain, 1e-10)?.value;
        let ok = observed.shape == expected_shape && (area / expected_area - 1.0).abs() < 1e-6;
        Ok(CalibrationEntry {
            scenario: scenario.name,
            expected_shape,
            observed,
            expected_area,
            area,
            ok,
        })
    })?;
    if let Some(bad) = entries.iter().find(|e| !e.ok) {
        return Err(Error::CalibrationMismatch(format!(
            "scenario {}: expected {:?} of area {}, found {:?} of area {}",
            bad.scenario, bad.expected_shape, bad.expected_area, bad.observed.shape, bad.area
        )));
    }
    Ok(entries)
}

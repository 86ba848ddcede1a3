use std::path::PathBuf;

use serde::Serialize;

use sepgeom::geometry::{self, DistanceClassification, DistanceGraph, LeaveOutMixture, PairMetric};
use sepgeom::metrics::{self, TensorDump};
use sepgeom::sections::{self, CalibrationEntry, CellClass, SectionReport, SectionScenario, ShapeReport};
use sepgeom::{constants, export, Chart, ChartKind, ChartPoint, Error, ProductBasis, ProductKind, Result};

use crate::config::{write_csv, write_json, RunConfig};
use crate::reference::{self, ScaleFit};

pub fn constants(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let report = constants::report();
    for c in &report {
        println!("{:<14} {:<24} {:.15e}", c.name, c.expression, c.value);
    }
    Ok(vec![write_json(cfg, "constants.json", &report)?])
}

fn basis_of(cfg: &RunConfig) -> Result<ProductBasis> {
    let kind: ProductKind = cfg.basis.as_deref().unwrap_or("tetra16").parse()?;
    Ok(ProductBasis::from_kind(kind))
}

pub fn basis(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let b = basis_of(cfg)?;
    let name = format!("basis_{}.json", b.kind.name());
    Ok(vec![write_json(cfg, &name, &export::basis_export(&b))?])
}

#[derive(Serialize)]
struct GraphArtifact {
    classes: DistanceClassification,
    class_index: usize,
    graph: DistanceGraph,
}

/// `--class` is a 1-based index into the ascending class list, or a value.
fn pick_class(classes: &DistanceClassification, arg: &str) -> Result<usize> {
    if let Ok(k) = arg.parse::<usize>() {
        if (1..=classes.classes.len()).contains(&k) {
            return Ok(k);
        }
        return Err(Error::InvalidArgument(format!(
            "class index {k} out of range 1..={}",
            classes.classes.len()
        )));
    }
    let v: f64 = arg
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("--class expects an index or a value, got '{arg}'")))?;
    classes
        .classes
        .iter()
        .position(|c| (c.value - v).abs() <= geometry::CLASS_LOOKUP_TOL)
        .map(|i| i + 1)
        .ok_or(Error::UnknownClass(v))
}

pub fn graph(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let b = basis_of(cfg)?;
    let metric: PairMetric = cfg.metric.as_deref().unwrap_or("bures").parse()?;
    let classes = geometry::classify_pairs(&b, metric)?;
    let k = pick_class(&classes, cfg.class.as_deref().unwrap_or("1"))?;
    let graph = geometry::distance_graph(&b, metric, classes.classes[k - 1].value)?;
    println!(
        "{} {} class {k} (value {:.10}): {} nodes, {} edges",
        b.kind.name(),
        metric.name(),
        graph.class_value,
        graph.nodes,
        graph.edges.len()
    );
    for c in &graph.spectrum.clusters {
        println!("  eigenvalue {:>12.8} x{}", c.value, c.multiplicity);
    }
    let name = format!("graph_{}_{}_class{k}.json", b.kind.name(), metric.name());
    Ok(vec![write_json(cfg, &name, &GraphArtifact { classes, class_index: k, graph })?])
}

#[derive(Serialize)]
struct TensorArtifact {
    tensor: TensorDump,
    trace: f64,
    volume_element: f64,
    reference_scales: Vec<ScaleFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagonalized: Option<DiagonalSummary>,
}

#[derive(Serialize)]
struct DiagonalSummary {
    max_offdiagonal: f64,
    center_coords: Vec<f64>,
    nonzero_center_coords: Vec<usize>,
}

fn point_of(chart: &Chart, at: &str) -> Result<ChartPoint> {
    if at == "mixed" {
        return Ok(chart.center());
    }
    let params = at
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad coordinate '{s}' in --at")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if params.len() != chart.param_count() {
        return Err(Error::DimensionMismatch {
            expected: chart.param_count(),
            found: params.len(),
        });
    }
    Ok(ChartPoint::new(chart.kind(), params))
}

pub fn tensor(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let kind: ChartKind = cfg.chart.as_deref().unwrap_or("weights").parse()?;
    let n = cfg.dim.unwrap_or(4);
    let chart = Chart::for_dimension(kind, n)?;
    let at = cfg.at.as_deref().unwrap_or("mixed");
    let point = point_of(&chart, at)?;
    let t = metrics::bures_tensor(&chart, &point, cfg.convention)?;
    let dump = t.dump(cfg.cluster_tol)?;
    let reference_scales = if at == "mixed" { reference::scale_fits(&chart, &t)? } else { Vec::new() };
    let diagonalized = if at == "mixed" && kind == ChartKind::ConvexWeights {
        let d = metrics::diagonalize_chart(&chart, cfg.convention)?;
        Some(DiagonalSummary {
            max_offdiagonal: d.max_offdiagonal(),
            nonzero_center_coords: d.nonzero_center_coords(1e-12),
            center_coords: d.center_coords,
        })
    } else {
        None
    };
    println!("{} chart, {}x{} at {at}", kind.name(), t.dim(), t.dim());
    for c in &dump.eigenvalue_clusters {
        println!("  eigenvalue {:.12e} x{}", c.value, c.multiplicity);
    }
    for f in &reference_scales {
        println!("  {}: implied ds^2 scale {:.10e}", f.quantity, f.implied_scale);
    }
    let artifact = TensorArtifact {
        trace: t.trace(),
        volume_element: t.volume_element()?,
        tensor: dump,
        reference_scales,
        diagonalized,
    };
    let name = format!("tensor_{}_n{n}.json", kind.name());
    Ok(vec![write_json(cfg, &name, &artifact)?])
}

#[derive(Serialize)]
struct ScanSummary {
    argmax_w1: f64,
    endpoint_distance: f64,
    endpoint_distance_squared: f64,
    element_integral: f64,
    resolution: usize,
}

pub fn scan(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let resolution = cfg.resolution.unwrap_or(129);
    let s = geometry::w1_path_scan(resolution, cfg.convention)?;
    let rows: Vec<Vec<f64>> = s.points.iter().map(|p| vec![p.w1, p.volume_element, p.trace]).collect();
    let csv = write_csv(cfg, "w1_path.csv", &["w1", "volume_element", "trace"], &rows)?;
    let summary = ScanSummary {
        argmax_w1: s.argmax_w1,
        endpoint_distance: s.endpoint_distance,
        endpoint_distance_squared: s.endpoint_distance_squared,
        element_integral: s.element_integral,
        resolution,
    };
    println!(
        "argmax w1 = {}, endpoint distance {:.12} (squared {:.12}), integral {:.10e}",
        summary.argmax_w1, summary.endpoint_distance, summary.endpoint_distance_squared, summary.element_integral
    );
    Ok(vec![csv, write_json(cfg, "w1_path.json", &summary)?])
}

#[derive(Serialize)]
struct MixtureArtifact {
    leave_one: Vec<LeaveOutMixture>,
    leave_two: Vec<LeaveOutMixture>,
    leave_two_bures_classes: Vec<geometry::DistanceClass>,
}

pub fn mixtures(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let b = ProductBasis::from_kind(ProductKind::Tetra16);
    let leave_one = geometry::leave_out_mixtures(&b, 1)?;
    let leave_two = geometry::leave_out_mixtures(&b, 2)?;
    let values: Vec<f64> = leave_two.iter().map(|m| m.bures_to_center).collect();
    let leave_two_bures_classes = geometry::bin_values(&values, geometry::CLASS_TOL)?;
    for c in &leave_two_bures_classes {
        println!("leave-2 Bures distance {:.10} x{}", c.value, c.count);
    }
    let artifact = MixtureArtifact { leave_one, leave_two, leave_two_bures_classes };
    Ok(vec![write_json(cfg, "mixtures.json", &artifact)?])
}

#[derive(Serialize)]
struct SectionArtifact {
    calibration: Vec<CalibrationEntry>,
    shape: ShapeReport,
    report: SectionReport,
    grid_resolution: usize,
    grid_separable_cells: usize,
    grid_entangled_cells: usize,
}

/// Calibration mismatches surface as `Error::CalibrationMismatch`, which
/// the caller maps to exit code 2.
pub fn section(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let scenario: SectionScenario = cfg.scenario.as_deref().unwrap_or("C").parse()?;
    let resolution = cfg.resolution.unwrap_or(128);
    let tol = cfg.tol.unwrap_or(sections::DEFAULT_TOL);
    let calibration = sections::calibrate()?;
    let report = sections::bures_volumes(&scenario, tol, cfg.convention)?;
    let grid = sections::classify_grid(&scenario, resolution.max(sections::MIN_GRID_RESOLUTION))?;
    let elements = sections::element_grid(&scenario, resolution, cfg.convention)?;
    println!(
        "scenario {}: euclidean P = {:.10}, {} P = {:.10}",
        scenario.name,
        report.probability_euclidean,
        cfg.convention.name(),
        report.probability_bures
    );
    let tag = scenario.name.replace([':', ','], "_");
    let csv = write_csv(cfg, &format!("section_{tag}_grid.csv"), &["x", "y", "value"], &elements)?;
    let artifact = SectionArtifact {
        calibration,
        shape: sections::domain_shape(&scenario),
        report,
        grid_resolution: grid.resolution,
        grid_separable_cells: grid.count(CellClass::Separable),
        grid_entangled_cells: grid.count(CellClass::Entangled),
    };
    Ok(vec![write_json(cfg, &format!("section_{tag}.json"), &artifact)?, csv])
}

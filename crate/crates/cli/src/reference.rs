//! Published absolute tensor constants at I4 and the per-ds^2 scale each one
//! implies for the computed tensor.
//!
//! The constants do not share a single scale: the trace, the volume element
//! and the generator-chart entries agree on 17/2^17, while the naive-chart
//! entries imply 2^-17. Each fit is reported separately.

use serde::Serialize;

use sepgeom::metrics::MetricTensor;
use sepgeom::states::jacobian;
use sepgeom::{Chart, ChartKind, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ScaleFit {
    pub quantity: &'static str,
    pub reference: f64,
    pub computed: f64,
    /// The quantity scales as `s^power` when ds^2 is multiplied by `s`.
    pub power: f64,
    pub implied_scale: f64,
}

impl ScaleFit {
    fn new(quantity: &'static str, reference: f64, computed: f64, power: f64) -> Self {
        Self {
            quantity,
            reference,
            computed,
            power,
            implied_scale: (reference / computed).powf(1.0 / power),
        }
    }
}

/// `2^-120 17^7 sqrt(17/2)`, the naive-chart volume element at I4.
pub fn naive_volume_element() -> f64 {
    2f64.powi(-120) * 17f64.powi(7) * 8.5f64.sqrt()
}

/// Fits for a tensor evaluated at the maximally mixed state. Empty unless
/// `n = 4`.
pub fn scale_fits(chart: &Chart, tensor: &MetricTensor) -> Result<Vec<ScaleFit>> {
    if chart.dim() != 4 {
        return Ok(Vec::new());
    }
    let g = &tensor.g;
    let half_dim = g.nrows() as f64 / 2.0;
    let naive = Chart::naive(4);
    // volume element carried into the naive chart
    let to_naive = jacobian(&naive, chart)?.abs_det;
    let element = ScaleFit::new(
        "naive-chart volume element",
        naive_volume_element(),
        tensor.volume_element()? * to_naive,
        half_dim,
    );
    Ok(match chart.kind() {
        ChartKind::GeneratorCoords => vec![
            ScaleFit::new("diagonal entry", 17.0 / 2f64.powi(18), g[(0, 0)], 1.0),
            element,
        ],
        ChartKind::Naive => vec![
            ScaleFit::new("diagonal entry", 2f64.powi(-16), g[(0, 0)], 1.0),
            ScaleFit::new("off-diagonal entry of the a11..a33 block", 2f64.powi(-17), g[(0, 1)], 1.0),
            ScaleFit::new("trace", 255.0 / 2f64.powi(16), tensor.trace(), 1.0),
            element,
        ],
        ChartKind::ConvexWeights => vec![element],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sepgeom::metrics::{self, Convention};

    fn fits(kind: ChartKind) -> Vec<ScaleFit> {
        let chart = Chart::for_dimension(kind, 4).unwrap();
        let t = metrics::bures_tensor(&chart, &chart.center(), Convention::Bures).unwrap();
        scale_fits(&chart, &t).unwrap()
    }

    #[test]
    fn element_scale_is_chart_independent() {
        let s: Vec<f64> = [ChartKind::ConvexWeights, ChartKind::Naive, ChartKind::GeneratorCoords]
            .into_iter()
            .map(|k| fits(k).last().unwrap().implied_scale)
            .collect();
        let expected = 17.0 / 2f64.powi(17);
        for v in s {
            assert!((v / expected - 1.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn naive_entries_disagree_with_the_trace() {
        let f = fits(ChartKind::Naive);
        assert!((f[0].implied_scale - 2f64.powi(-17)).abs() < 1e-20);
        assert!((f[1].implied_scale - 2f64.powi(-17)).abs() < 1e-20);
        assert!((f[2].implied_scale / (17.0 / 2f64.powi(17)) - 1.0).abs() < 1e-12);
    }
}

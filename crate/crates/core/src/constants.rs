//! Closed-form volume and probability constants for the two-qubit state
//! space, each with its defining expression.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConstant {
    pub name: &'static str,
    pub expression: &'static str,
    pub value: f64,
}

/// Conjectured SD volume of the separable two-qubit states.
pub fn sd_separable_volume() -> f64 {
    (2f64.sqrt() - 1.0) / 3.0
}

/// Bures volume of the separable states, 1/2^15 of the SD value.
pub fn bures_separable_volume() -> f64 {
    sd_separable_volume() / 2f64.powi(15)
}

/// Bures volume of all two-qubit states.
pub fn bures_total_volume() -> f64 {
    PI.powi(8) / 165_150_720.0
}

/// Hilbert-Schmidt volume of all two-qubit states.
pub fn hs_total_volume() -> f64 {
    PI.powi(6) / 851_350_500.0
}

/// Bures probability of separability, separable over total volume.
pub fn bures_separability_probability() -> f64 {
    1680.0 * (2f64.sqrt() - 1.0) / PI.powi(8)
}

pub fn report() -> Vec<NamedConstant> {
    vec![
        NamedConstant {
            name: "V_SD_sep",
            expression: "(sqrt(2)-1)/3",
            value: sd_separable_volume(),
        },
        NamedConstant {
            name: "V_Bures_sep",
            expression: "2^-15 (sqrt(2)-1)/3",
            value: bures_separable_volume(),
        },
        NamedConstant {
            name: "V_Bures_total",
            expression: "pi^8/165150720",
            value: bures_total_volume(),
        },
        NamedConstant {
            name: "V_HS_total",
            expression: "pi^6/851350500",
            value: hs_total_volume(),
        },
        NamedConstant {
            name: "P_Bures_sep",
            expression: "1680 (sqrt(2)-1)/pi^8",
            value: bures_separability_probability(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_is_volume_ratio() {
        let p = bures_separable_volume() / bures_total_volume();
        assert!((p / bures_separability_probability() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn printed_values() {
        assert_eq!(format!("{:.6}", sd_separable_volume()), "0.138071");
        assert_eq!(format!("{:.4e}", bures_separable_volume()), "4.2136e-6");
        assert_eq!(format!("{:.7}", bures_separability_probability()), "0.0733389");
        assert_eq!(report().len(), 5);
    }
}

//! Dense-limit approximations of `<ln X_Π>/n`.
//!
//! When every degree is close to the mean, each factor of a multiplicative
//! index can be evaluated at the mean degree. ER and RG graphs share one
//! formula set in `<d>`. For bipartite graphs an edge always joins a set-1
//! vertex of degree `<d1>` to a set-2 vertex of degree `<d2>`, so
//! `ln X ≈ |E| φ(<d1>, <d2>)` with `φ` the log-factor of the index.

use std::f64::consts::LN_2;

use thiserror::Error;

use crate::index::IndexKind;
use crate::models::ModelKind;

/// Mean degree from which the dense-limit formulas describe ensemble data.
pub const DENSE_REGIME_MEAN_DEGREE: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseLimitError {
    #[error("no dense-limit formula for index `{index}` on {model} graphs")]
    Unsupported { model: ModelKind, index: String },
    #[error("mean degree must be positive (got {0})")]
    NonPositiveDegree(f64),
    #[error("{0} graphs take a single mean degree")]
    ExpectedSingleDegree(ModelKind),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanDegrees {
    Single(f64),
    Bipartite { d1: f64, d2: f64 },
}

impl MeanDegrees {
    fn as_pair(self) -> (f64, f64) {
        match self {
            MeanDegrees::Single(d) => (d, d),
            MeanDegrees::Bipartite { d1, d2 } => (d1, d2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLimitPrediction {
    pub model: ModelKind,
    pub index: String,
    pub degrees: MeanDegrees,
    /// Predicted `<ln X_Π>/n`, with `n` the total vertex count.
    pub value: f64,
}

/// Predicted `<ln X_Π>/n` with `n` the total vertex count.
///
/// For BR the value is `|E|/n · φ(<d1>, <d2>)`, where
/// `|E|/n = <d1><d2>/(<d1>+<d2>)`; use [`predict_bipartite_per_set`] for the
/// per-set normalizations. NK and Π₁ have no bipartite formula and reuse the
/// ER one only when `<d1> = <d2>`.
pub fn predict(model: ModelKind, index: &IndexKind, degrees: MeanDegrees) -> Result<DenseLimitPrediction, DenseLimitError> {
    let (d1, d2) = degrees.as_pair();
    for d in [d1, d2] {
        if !(d > 0.0) {
            return Err(DenseLimitError::NonPositiveDegree(d));
        }
    }
    let unsupported = || DenseLimitError::Unsupported {
        model,
        index: index.name().to_string(),
    };
    let value = match model {
        ModelKind::Er | ModelKind::Rg => {
            let MeanDegrees::Single(d) = degrees else {
                return Err(DenseLimitError::ExpectedSingleDegree(model));
            };
            homogeneous(index, d).ok_or_else(unsupported)?
        }
        ModelKind::Br => match index {
            IndexKind::Nk | IndexKind::Pi1 if d1 == d2 => homogeneous(index, d1).ok_or_else(unsupported)?,
            _ => {
                let phi = bipartite_log_factor(index, d1, d2).ok_or_else(unsupported)?;
                d1 * d2 / (d1 + d2) * phi
            }
        },
    };
    Ok(DenseLimitPrediction {
        model,
        index: index.name().to_string(),
        degrees,
        value,
    })
}

/// `(ln X/n1, ln X/n2) ≈ (<d1> φ, <d2> φ)` for the six edge-based indices.
pub fn predict_bipartite_per_set(index: &IndexKind, d1: f64, d2: f64) -> Result<(f64, f64), DenseLimitError> {
    for d in [d1, d2] {
        if !(d > 0.0) {
            return Err(DenseLimitError::NonPositiveDegree(d));
        }
    }
    let phi = bipartite_log_factor(index, d1, d2).ok_or_else(|| DenseLimitError::Unsupported {
        model: ModelKind::Br,
        index: index.name().to_string(),
    })?;
    Ok((d1 * phi, d2 * phi))
}

/// Converts per-set values of a balanced (`n1 = n2`) bipartite graph to the
/// per-total-`n` normalization.
pub fn per_set_to_total(per_set: f64) -> f64 {
    per_set / 2.0
}

// ER/RG formulas in <d>.
fn homogeneous(index: &IndexKind, d: f64) -> Option<f64> {
    let ln_d = d.ln();
    Some(match index {
        IndexKind::Nk => ln_d,
        IndexKind::Pi1 => 2.0 * ln_d,
        IndexKind::Pi2 => d * ln_d,
        IndexKind::Pi1Star => 0.5 * d * (2.0 * d).ln(),
        IndexKind::RPi => -0.5 * d * ln_d,
        IndexKind::HPi => -0.5 * d * ln_d,
        IndexKind::ChiPi => -LN_2 / 4.0 * d - 0.25 * d * ln_d,
        IndexKind::IdPi => LN_2 / 2.0 * d - d * ln_d,
        IndexKind::GaPi | IndexKind::Custom(_) => return None,
    })
}

// Log of one edge factor with endpoint degrees <d1>, <d2>.
fn bipartite_log_factor(index: &IndexKind, d1: f64, d2: f64) -> Option<f64> {
    Some(match index {
        IndexKind::Pi2 => (d1 * d2).ln(),
        IndexKind::Pi1Star => (d1 + d2).ln(),
        IndexKind::RPi => -0.5 * (d1 * d2).ln(),
        IndexKind::HPi => LN_2 - (d1 + d2).ln(),
        IndexKind::ChiPi => -0.5 * (d1 + d2).ln(),
        IndexKind::IdPi => (1.0 / (d1 * d1) + 1.0 / (d2 * d2)).ln(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er(index: IndexKind, d: f64) -> f64 {
        predict(ModelKind::Er, &index, MeanDegrees::Single(d)).unwrap().value
    }

    #[test]
    fn hand_evaluations() {
        assert!((er(IndexKind::Nk, 10.0) - 10f64.ln()).abs() < 1e-15);
        assert!((er(IndexKind::ChiPi, 4.0) + 3.0 * LN_2).abs() < 1e-14);
        let rg = predict(ModelKind::Rg, &IndexKind::IdPi, MeanDegrees::Single(10.0)).unwrap().value;
        assert!((rg - (LN_2 / 2.0 * 10.0 - 10.0 * 10f64.ln())).abs() < 1e-13);
        assert!((rg + 19.560).abs() < 1e-3);
    }

    #[test]
    fn bipartite_per_set_and_total() {
        let (s1, s2) = predict_bipartite_per_set(&IndexKind::Pi2, 6.0, 6.0).unwrap();
        assert!((s1 - 6.0 * 36f64.ln()).abs() < 1e-13);
        assert!((s1 - 12.0 * 6f64.ln()).abs() < 1e-13);
        assert_eq!(s1, s2);
        let total = predict(ModelKind::Br, &IndexKind::Pi2, MeanDegrees::Bipartite { d1: 6.0, d2: 6.0 })
            .unwrap()
            .value;
        assert!((total - er(IndexKind::Pi2, 6.0)).abs() < 1e-13);
        assert!((per_set_to_total(s1) - total).abs() < 1e-13);
    }

    #[test]
    fn unbalanced_bipartite_total_is_edge_weighted() {
        // n1 = 100, n2 = 300, p = 0.05: <d1> = 15, <d2> = 5, |E|/n = 1500/400.
        let v = predict(ModelKind::Br, &IndexKind::HPi, MeanDegrees::Bipartite { d1: 15.0, d2: 5.0 })
            .unwrap()
            .value;
        assert!((v - 1500.0 / 400.0 * (LN_2 - 20f64.ln())).abs() < 1e-13);
        let (s1, s2) = predict_bipartite_per_set(&IndexKind::HPi, 15.0, 5.0).unwrap();
        assert!((s1 * 100.0 - s2 * 300.0).abs() < 1e-10);
    }

    #[test]
    fn unsupported_pairs() {
        let bip = MeanDegrees::Bipartite { d1: 4.0, d2: 6.0 };
        assert!(matches!(
            predict(ModelKind::Br, &IndexKind::Nk, bip),
            Err(DenseLimitError::Unsupported { .. })
        ));
        assert!(predict(ModelKind::Br, &IndexKind::Nk, MeanDegrees::Single(4.0)).is_ok());
        assert!(predict(ModelKind::Er, &IndexKind::GaPi, MeanDegrees::Single(4.0)).is_err());
        assert!(predict_bipartite_per_set(&IndexKind::Pi1, 4.0, 4.0).is_err());
        assert_eq!(
            predict(ModelKind::Er, &IndexKind::Nk, MeanDegrees::Single(0.0)),
            Err(DenseLimitError::NonPositiveDegree(0.0))
        );
        assert!(predict(ModelKind::Er, &IndexKind::Nk, bip).is_err());
    }

    #[test]
    fn sign_structure_on_dense_grid() {
        for i in 0..=990 {
            let d = 1.0 + i as f64 * 0.1;
            for idx in [IndexKind::Nk, IndexKind::Pi1, IndexKind::Pi2, IndexKind::Pi1Star] {
                assert!(er(idx, d) >= 0.0);
            }
            for idx in [IndexKind::RPi, IndexKind::HPi, IndexKind::ChiPi] {
                assert!(er(idx, d) <= 0.0);
            }
        }
    }

    #[test]
    fn er_and_rg_share_formulas() {
        for d in 1..=50 {
            for idx in IndexKind::studied() {
                let a = predict(ModelKind::Er, &idx, MeanDegrees::Single(d as f64)).unwrap().value;
                let b = predict(ModelKind::Rg, &idx, MeanDegrees::Single(d as f64)).unwrap().value;
                assert_eq!(a, b);
            }
        }
    }
}

//! Conversion-fidelity metrics: accuracy against the bounding-box diagonal
//! and the coefficient of determination.

use crate::converter::SplineResult;
use thiserror::Error;

/// Fidelity scores for one converted road.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    /// (1 - avg_distance / max_possible_error) * 100, clamped to [0, 100].
    pub accuracy_percent: f64,
    /// Minimum of the per-axis R2 values; `None` when undefined
    /// (zero variance with nonzero residuals).
    pub r_squared: Option<f64>,
    /// Mean distance from each original point to its paired spline point.
    pub avg_distance: f64,
    /// Diagonal of the axis-aligned bounding box of the original points.
    pub max_possible_error: f64,
    pub n_original: usize,
    pub n_spline: usize,
}

/// How original points are paired with spline points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Each original point pairs with its nearest spline point.
    #[default]
    Nearest,
    /// Points pair by index; extra points on the longer list are ignored.
    Index,
}

#[derive(Debug, Error, PartialEq)]
pub enum FidelityError {
    #[error("point list is empty")]
    EmptyInput,
    #[error("sample lists differ in length: {expected} vs {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("original samples have zero variance; R2 is undefined")]
    ZeroVariance,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn nearest(point: (f64, f64), candidates: &[(f64, f64)]) -> (f64, f64) {
    let mut best = candidates[0];
    let mut best_d2 = f64::INFINITY;
    for &c in candidates {
        let d2 = (point.0 - c.0).powi(2) + (point.1 - c.1).powi(2);
        if d2 < best_d2 {
            best_d2 = d2;
            best = c;
        }
    }
    best
}

fn bbox_diagonal(points: &[(f64, f64)]) -> f64 {
    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min.0 = min.0.min(x);
        min.1 = min.1.min(y);
        max.0 = max.0.max(x);
        max.1 = max.1.max(y);
    }
    ((max.0 - min.0).powi(2) + (max.1 - min.1).powi(2)).sqrt()
}

fn paired(
    original: &[(f64, f64)],
    spline: &[(f64, f64)],
    pairing: Pairing,
) -> Vec<((f64, f64), (f64, f64))> {
    match pairing {
        Pairing::Nearest => original
            .iter()
            .map(|&p| (p, nearest(p, spline)))
            .collect(),
        Pairing::Index => original
            .iter()
            .zip(spline.iter())
            .map(|(&a, &b)| (a, b))
            .collect(),
    }
}

/// Score how closely the spline matches the original points.
///
/// `avg_distance` is the mean paired distance; `max_possible_error` the
/// bounding-box diagonal of the originals. A degenerate bounding box scores
/// 100 when the average distance is zero and 0 otherwise.
pub fn accuracy(
    original: &[(f64, f64)],
    spline: &[(f64, f64)],
    pairing: Pairing,
) -> Result<FidelityReport, FidelityError> {
    if original.is_empty() || spline.is_empty() {
        return Err(FidelityError::EmptyInput);
    }
    let pairs = paired(original, spline, pairing);
    let avg_distance = pairs.iter().map(|(a, b)| dist(*a, *b)).sum::<f64>() / pairs.len() as f64;
    let max_possible_error = bbox_diagonal(original);

    let accuracy_percent = if max_possible_error == 0.0 {
        if avg_distance == 0.0 {
            100.0
        } else {
            0.0
        }
    } else {
        ((1.0 - avg_distance / max_possible_error) * 100.0).clamp(0.0, 100.0)
    };

    Ok(FidelityReport {
        accuracy_percent,
        r_squared: None,
        avg_distance,
        max_possible_error,
        n_original: original.len(),
        n_spline: spline.len(),
    })
}

/// Coefficient of determination between scalar samples.
pub fn r_squared(original: &[f64], predicted: &[f64]) -> Result<f64, FidelityError> {
    if original.len() != predicted.len() {
        return Err(FidelityError::LengthMismatch {
            expected: original.len(),
            got: predicted.len(),
        });
    }
    if original.len() < 2 {
        return Err(FidelityError::EmptyInput);
    }
    let mean = original.iter().sum::<f64>() / original.len() as f64;
    let ss_tot: f64 = original.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = original
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    if ss_tot == 0.0 {
        return Err(FidelityError::ZeroVariance);
    }
    Ok(1.0 - ss_res / ss_tot)
}

/// R2 for 2D roads: per axis against nearest-spline matches, reported as the
/// minimum over axes.
///
/// An axis whose samples are constant to numerical precision carries no fit
/// information: it is skipped when the residuals are equally negligible
/// (a straight axis-aligned road reproduced exactly) and makes the metric
/// undefined when they are not. The threshold is relative to the coordinate
/// scale so float noise from the interpolation never flips the verdict.
pub fn road_r_squared(
    original: &[(f64, f64)],
    spline: &[(f64, f64)],
) -> Result<f64, FidelityError> {
    if original.len() < 2 || spline.is_empty() {
        return Err(FidelityError::EmptyInput);
    }
    let pairs = paired(original, spline, Pairing::Nearest);
    let n = pairs.len() as f64;
    let mut min_r2: Option<f64> = None;
    for axis in 0..2 {
        let pick = |p: (f64, f64)| if axis == 0 { p.0 } else { p.1 };
        let ys: Vec<f64> = pairs.iter().map(|(o, _)| pick(*o)).collect();
        let ps: Vec<f64> = pairs.iter().map(|(_, m)| pick(*m)).collect();
        let mean = ys.iter().sum::<f64>() / n;
        let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
        let ss_res: f64 = ys.iter().zip(&ps).map(|(y, p)| (y - p).powi(2)).sum();
        let scale = ys.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let negligible = (1e-9 * scale).powi(2) * n;
        if ss_tot <= negligible {
            if ss_res > negligible {
                return Err(FidelityError::ZeroVariance);
            }
            // Constant axis reproduced to precision: skip.
        } else {
            let v = 1.0 - ss_res / ss_tot;
            min_r2 = Some(min_r2.map_or(v, |m: f64| m.min(v)));
        }
    }
    // All control points coincident cannot survive deduplication, but a
    // caller could still feed such data directly.
    min_r2.ok_or(FidelityError::ZeroVariance)
}

/// Full fidelity evaluation of a conversion: accuracy of the spline against
/// the control points plus the conservative road R2.
pub fn evaluate(result: &SplineResult, pairing: Pairing) -> Result<FidelityReport, FidelityError> {
    let original: Vec<(f64, f64)> = result.control_points.iter().map(|p| (p.x, p.y)).collect();
    let spline: Vec<(f64, f64)> = result.spline_points.iter().map(|p| (p[0], p[1])).collect();
    let mut report = accuracy(&original, &spline, pairing)?;
    report.r_squared = match road_r_squared(&original, &spline) {
        Ok(v) => Some(v),
        Err(FidelityError::ZeroVariance) => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets_score_perfect() {
        let pts = vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.5), (3.0, 3.0)];
        let report = accuracy(&pts, &pts, Pairing::Nearest).unwrap();
        assert_eq!(report.accuracy_percent, 100.0);
        assert_eq!(report.avg_distance, 0.0);
    }

    #[test]
    fn unit_square_against_single_corner() {
        // avg = (0 + 1 + 1 + sqrt2)/4, max = sqrt2, accuracy ~ 39.64
        let original = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        let spline = vec![(0.0, 0.0)];
        let report = accuracy(&original, &spline, Pairing::Nearest).unwrap();
        let sqrt2 = 2.0_f64.sqrt();
        assert!((report.avg_distance - (2.0 + sqrt2) / 4.0).abs() < 1e-12);
        assert!((report.max_possible_error - sqrt2).abs() < 1e-12);
        let expected = (1.0 - (2.0 + sqrt2) / (4.0 * sqrt2)) * 100.0;
        assert!((report.accuracy_percent - expected).abs() < 1e-12);
        assert!((report.accuracy_percent - 39.6446609).abs() < 1e-7);
    }

    #[test]
    fn degenerate_bbox_rules() {
        let single = vec![(2.0, 3.0)];
        let on_it = accuracy(&single, &single, Pairing::Nearest).unwrap();
        assert_eq!(on_it.accuracy_percent, 100.0);
        let off_it = accuracy(&single, &[(9.0, 9.0)], Pairing::Nearest).unwrap();
        assert_eq!(off_it.accuracy_percent, 0.0);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(matches!(
            accuracy(&[], &[(0.0, 0.0)], Pairing::Nearest),
            Err(FidelityError::EmptyInput)
        ));
        assert!(matches!(
            accuracy(&[(0.0, 0.0)], &[], Pairing::Nearest),
            Err(FidelityError::EmptyInput)
        ));
    }

    #[test]
    fn r_squared_perfect_and_mean_baseline() {
        let y = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(r_squared(&y, &y).unwrap(), 1.0);
        let mean = vec![2.5; 4];
        assert!((r_squared(&y, &mean).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn r_squared_error_paths() {
        assert!(matches!(
            r_squared(&[1.0, 2.0], &[1.0]),
            Err(FidelityError::LengthMismatch { .. })
        ));
        assert!(matches!(
            r_squared(&[3.0, 3.0, 3.0], &[3.0, 3.1, 2.9]),
            Err(FidelityError::ZeroVariance)
        ));
    }

    #[test]
    fn r_squared_never_exceeds_one() {
        let y = vec![0.5, 1.5, -0.5, 2.0, 0.0];
        let noisy: Vec<f64> = y.iter().map(|v| v + 0.3).collect();
        let r = r_squared(&y, &noisy).unwrap();
        assert!(r <= 1.0);
        assert!(r < 1.0); // nonzero residuals
    }

    #[test]
    fn road_r2_skips_exact_constant_axis() {
        // Straight road along x: y has zero variance but zero residuals too.
        let pts = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        assert_eq!(road_r_squared(&pts, &pts).unwrap(), 1.0);
    }

    #[test]
    fn road_r2_undefined_when_constant_axis_is_missed() {
        let original = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        let shifted = vec![(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)];
        assert!(matches!(
            road_r_squared(&original, &shifted),
            Err(FidelityError::ZeroVariance)
        ));
    }

    #[test]
    fn index_pairing_differs_from_nearest() {
        let original = vec![(0.0, 0.0), (1.0, 0.0)];
        let spline = vec![(1.0, 0.0), (0.0, 0.0)];
        let near = accuracy(&original, &spline, Pairing::Nearest).unwrap();
        assert_eq!(near.avg_distance, 0.0);
        let index = accuracy(&original, &spline, Pairing::Index).unwrap();
        assert_eq!(index.avg_distance, 1.0);
    }
}

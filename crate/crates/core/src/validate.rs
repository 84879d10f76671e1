//! Static road-validity checks on a generated spline: distinct endpoints,
//! bounding-box limit, and self-intersection.

use crate::converter::SplineResult;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    DistinctEndpoints,
    BoundingBox,
    SelfIntersection,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::DistinctEndpoints => "DistinctEndpoints",
            Criterion::BoundingBox => "BoundingBox",
            Criterion::SelfIntersection => "SelfIntersection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    /// Distance between the first and last spline point.
    pub endpoint_distance: f64,
    pub bbox_width: f64,
    pub bbox_height: f64,
    /// Number of proper self-crossings of the spline polyline.
    pub self_intersections: usize,
    pub failed_criteria: Vec<Criterion>,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidityConfig {
    /// Maximum bounding-box side length.
    pub bbox_limit: f64,
    /// Endpoints closer than this count as overlapping.
    pub endpoint_epsilon: f64,
}

impl Default for ValidityConfig {
    fn default() -> Self {
        Self {
            bbox_limit: 250.0,
            endpoint_epsilon: 1.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ValidateError {
    #[error("need at least 2 spline points, got {points}")]
    TooShort { points: usize },
}

/// Apply the three validity criteria to a spline road.
pub fn check_validity(
    result: &SplineResult,
    config: &ValidityConfig,
) -> Result<ValidityReport, ValidateError> {
    let points: Vec<(f64, f64)> = result.spline_points.iter().map(|p| (p[0], p[1])).collect();
    if points.len() < 2 {
        return Err(ValidateError::TooShort {
            points: points.len(),
        });
    }

    let first = points[0];
    let last = *points.last().unwrap();
    let endpoint_distance = ((first.0 - last.0).powi(2) + (first.1 - last.1).powi(2)).sqrt();

    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &points {
        min.0 = min.0.min(x);
        min.1 = min.1.min(y);
        max.0 = max.0.max(x);
        max.1 = max.1.max(y);
    }
    let bbox_width = max.0 - min.0;
    let bbox_height = max.1 - min.1;

    let self_intersections = self_intersects(&points);

    let mut failed_criteria = Vec::new();
    if endpoint_distance <= config.endpoint_epsilon {
        failed_criteria.push(Criterion::DistinctEndpoints);
    }
    if bbox_width > config.bbox_limit || bbox_height > config.bbox_limit {
        failed_criteria.push(Criterion::BoundingBox);
    }
    if self_intersections > 0 {
        failed_criteria.push(Criterion::SelfIntersection);
    }

    Ok(ValidityReport {
        valid: failed_criteria.is_empty(),
        endpoint_distance,
        bbox_width,
        bbox_height,
        self_intersections,
        failed_criteria,
    })
}

/// Orientation epsilon: cross products with magnitude at or below this count
/// as collinear, so touching configurations are not crossings.
const ORIENT_EPS: f64 = 1e-9;

fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn proper_crossing(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let o1 = cross(a, b, c);
    let o2 = cross(a, b, d);
    let o3 = cross(c, d, a);
    let o4 = cross(c, d, b);
    let opposite = |u: f64, v: f64| (u > ORIENT_EPS && v < -ORIENT_EPS) || (u < -ORIENT_EPS && v > ORIENT_EPS);
    opposite(o1, o2) && opposite(o3, o4)
}

/// Count proper crossings (shared interior point) between non-adjacent
/// segments of a polyline. Adjacent segments touching at their shared vertex
/// never count. Consecutive duplicate points are removed first.
pub fn self_intersects(polyline: &[(f64, f64)]) -> usize {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(polyline.len());
    for &p in polyline {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    if pts.len() < 4 {
        return 0;
    }
    let n = pts.len() - 1; // segment count
    let mut crossings = 0;
    for i in 0..n {
        for j in (i + 2)..n {
            if proper_crossing(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                crossings += 1;
            }
        }
    }
    crossings
}

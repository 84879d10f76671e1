//! Conversion from a parsed road network to a Catmull-Rom spline road.
//!
//! Boundary points are sampled along both lane boundaries, averaged into a
//! centerline, and interpolated. Each road of a multi-road network converts
//! independently; [`generate_spline`] treats the whole network as one road
//! sequence for single-road documents (the common case).

mod spline;

pub use spline::{catmull_rom_point, catmull_rom_spline, MIN_CONTROL_POINTS};

use crate::geometry::{
    self, GeometryError, LaneFilter, Side,
};
use crate::ingest::{Road, RoadNetwork};
use thiserror::Error;

/// Interpolated spline sample: x, y, z in meters.
pub type Point3 = [f64; 3];

/// One sampled lane-boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Total road width at the sample's arc length.
    pub width: f64,
    /// Source arc length, retained for diagnostics.
    pub s: f64,
}

/// Centerline sample the spline interpolates through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub width: f64,
}

/// A generated spline road.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineResult {
    pub control_points: Vec<ControlPoint>,
    pub spline_points: Vec<Point3>,
    pub alpha: f64,
    pub points_per_segment: u32,
    pub source_road_id: String,
}

/// Where boundary samples are taken along the reference line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingStrategy {
    /// One sample at each geometry element's start plus the final endpoint.
    Starts,
    /// One sample every `d` meters plus the final endpoint.
    Step(f64),
}

/// Which boundaries feed the control polyline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundarySelection {
    /// Average of right and left boundaries (the centerline).
    #[default]
    Both,
    LeftOnly,
    RightOnly,
}

#[derive(Debug, Clone)]
pub struct SplineConfig {
    pub alpha: f64,
    pub points_per_segment: u32,
    pub sampling: SamplingStrategy,
    /// Consecutive control points closer than this (xy) collapse to one.
    pub dedup_epsilon: f64,
    pub lanes: LaneFilter,
    pub boundary: BoundarySelection,
}

impl Default for SplineConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            points_per_segment: 1,
            sampling: SamplingStrategy::Starts,
            dedup_epsilon: 1e-6,
            lanes: LaneFilter::All,
            boundary: BoundarySelection::Both,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConvertError {
    #[error("need at least {needed} boundary points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("coincident control points survived deduplication; centripetal knots are degenerate")]
    DegenerateKnots,
    #[error("boundary point list is empty")]
    EmptyBoundary,
    #[error("road {road:?} has an empty plan view")]
    EmptyPlanView { road: String },
    #[error("alpha {alpha} outside [0, 1]")]
    InvalidAlpha { alpha: f64 },
    #[error("points_per_segment must be positive")]
    InvalidPointsPerSegment,
    #[error("sampling step must be positive and finite")]
    InvalidStep,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Counters for lossy-but-tolerated events during conversion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConversionWarnings {
    /// Boundary pairs dropped because the two sides had different lengths.
    pub truncated_pairs: usize,
    /// Lane-width evaluations that went negative and were clamped to 0.
    pub clamped_widths: u32,
    /// Consecutive near-duplicate control points removed.
    pub deduped_points: usize,
    /// Plan-view segment joints that broke pose continuity (default
    /// tolerance 1e-3 m / 1e-3 rad).
    pub continuity_breaks: usize,
}

/// Sample stations (segment index, local ds) for one road.
fn sample_stations(road: &Road, sampling: &SamplingStrategy) -> Result<Vec<(usize, f64)>, ConvertError> {
    if road.plan_view.is_empty() {
        return Err(ConvertError::EmptyPlanView {
            road: road.id.clone(),
        });
    }
    let last = road.plan_view.len() - 1;
    match sampling {
        SamplingStrategy::Starts => {
            let mut stations: Vec<(usize, f64)> =
                (0..road.plan_view.len()).map(|i| (i, 0.0)).collect();
            stations.push((last, road.plan_view[last].length));
            Ok(stations)
        }
        SamplingStrategy::Step(step) => {
            if !(step.is_finite() && *step > 0.0) {
                return Err(ConvertError::InvalidStep);
            }
            let end = road
                .plan_view
                .iter()
                .map(|g| g.s + g.length)
                .fold(0.0_f64, f64::max);
            let mut stations = Vec::new();
            let mut s = road.plan_view[0].s;
            while s < end - 1e-9 {
                let idx = road
                    .plan_view
                    .partition_point(|g| g.s <= s)
                    .saturating_sub(1);
                let seg = &road.plan_view[idx];
                let ds = (s - seg.s).clamp(0.0, seg.length);
                stations.push((idx, ds));
                s += step;
            }
            stations.push((last, road.plan_view[last].length));
            Ok(stations)
        }
    }
}

fn extract_for_road(
    road: &Road,
    side: Side,
    sampling: &SamplingStrategy,
    filter: LaneFilter,
    warnings: &mut ConversionWarnings,
) -> Result<Vec<BoundaryPoint>, ConvertError> {
    let stations = sample_stations(road, sampling)?;
    let mut points = Vec::with_capacity(stations.len());
    for (idx, ds) in stations {
        let seg = &road.plan_view[idx];
        let pose = geometry::eval_reference_line(seg, ds)?;
        let s = seg.s + ds;
        let cs = geometry::cross_section_at(road, s, filter)?;
        warnings.clamped_widths += cs.clamped_lanes;
        let offset = match side {
            Side::Left => cs.left_offset,
            Side::Right => cs.right_offset,
        };
        let t = match side {
            Side::Left => offset,
            Side::Right => -offset,
        };
        let (x, y) = geometry::lateral_offset_point(&pose, t);
        points.push(BoundaryPoint {
            x,
            y,
            z: cs.elevation,
            width: cs.width,
            s,
        });
    }
    Ok(points)
}

/// Sample one lane boundary across all roads of the network, in document
/// order.
pub fn extract_road_geometry(
    network: &RoadNetwork,
    side: Side,
    sampling: &SamplingStrategy,
) -> Result<Vec<BoundaryPoint>, ConvertError> {
    let mut warnings = ConversionWarnings::default();
    extract_road_geometry_with(network, side, sampling, LaneFilter::All, &mut warnings)
}

pub fn extract_road_geometry_with(
    network: &RoadNetwork,
    side: Side,
    sampling: &SamplingStrategy,
    filter: LaneFilter,
    warnings: &mut ConversionWarnings,
) -> Result<Vec<BoundaryPoint>, ConvertError> {
    let mut points = Vec::new();
    for road in &network.roads {
        points.extend(extract_for_road(road, side, sampling, filter, warnings)?);
    }
    Ok(points)
}

/// Pairwise mean of two boundaries. Unequal lengths truncate to the shorter
/// side; consecutive near-duplicates are removed.
pub fn compute_centerline(
    right: &[BoundaryPoint],
    left: &[BoundaryPoint],
) -> Result<Vec<ControlPoint>, ConvertError> {
    let mut warnings = ConversionWarnings::default();
    compute_centerline_with(right, left, 1e-6, &mut warnings)
}

pub fn compute_centerline_with(
    right: &[BoundaryPoint],
    left: &[BoundaryPoint],
    dedup_epsilon: f64,
    warnings: &mut ConversionWarnings,
) -> Result<Vec<ControlPoint>, ConvertError> {
    if right.is_empty() || left.is_empty() {
        return Err(ConvertError::EmptyBoundary);
    }
    let n = right.len().min(left.len());
    warnings.truncated_pairs += right.len().max(left.len()) - n;

    let mut points: Vec<ControlPoint> = Vec::with_capacity(n);
    for (r, l) in right.iter().take(n).zip(left.iter().take(n)) {
        let candidate = ControlPoint {
            x: 0.5 * (r.x + l.x),
            y: 0.5 * (r.y + l.y),
            z: 0.5 * (r.z + l.z),
            width: 0.5 * (r.width + l.width),
        };
        if let Some(prev) = points.last() {
            let d = ((candidate.x - prev.x).powi(2) + (candidate.y - prev.y).powi(2)).sqrt();
            if d < dedup_epsilon {
                warnings.deduped_points += 1;
                continue;
            }
        }
        points.push(candidate);
    }
    Ok(points)
}

/// Run the full conversion for a network: extract both boundaries, average
/// them, and interpolate.
///
/// For single-road networks `source_road_id` is the road's id; multi-road
/// networks fall back to the network's source id (batch drivers convert the
/// roads individually instead, see [`convert_roads`]).
pub fn generate_spline(
    network: &RoadNetwork,
    config: &SplineConfig,
) -> Result<SplineResult, ConvertError> {
    let mut warnings = ConversionWarnings::default();
    let source_road_id = if network.roads.len() == 1 {
        network.roads[0].id.clone()
    } else {
        network.source_id.clone()
    };
    generate_from_boundaries(network, config, source_road_id, &mut warnings)
}

pub fn generate_spline_with(
    network: &RoadNetwork,
    config: &SplineConfig,
    warnings: &mut ConversionWarnings,
) -> Result<SplineResult, ConvertError> {
    let source_road_id = if network.roads.len() == 1 {
        network.roads[0].id.clone()
    } else {
        network.source_id.clone()
    };
    generate_from_boundaries(network, config, source_road_id, warnings)
}

fn generate_from_boundaries(
    network: &RoadNetwork,
    config: &SplineConfig,
    source_road_id: String,
    warnings: &mut ConversionWarnings,
) -> Result<SplineResult, ConvertError> {
    for road in &network.roads {
        warnings.continuity_breaks +=
            geometry::check_continuity(road, geometry::ContinuityTolerance::default()).len();
    }
    let right =
        extract_road_geometry_with(network, Side::Right, &config.sampling, config.lanes, warnings)?;
    let left =
        extract_road_geometry_with(network, Side::Left, &config.sampling, config.lanes, warnings)?;
    if right.len() < MIN_CONTROL_POINTS || left.len() < MIN_CONTROL_POINTS {
        return Err(ConvertError::TooFewPoints {
            needed: MIN_CONTROL_POINTS,
            got: right.len().min(left.len()),
        });
    }

    let (a, b): (&[BoundaryPoint], &[BoundaryPoint]) = match config.boundary {
        BoundarySelection::Both => (&right, &left),
        BoundarySelection::LeftOnly => (&left, &left),
        BoundarySelection::RightOnly => (&right, &right),
    };
    let control_points = compute_centerline_with(a, b, config.dedup_epsilon, warnings)?;
    let spline_points =
        catmull_rom_spline(&control_points, config.alpha, config.points_per_segment)?;

    Ok(SplineResult {
        control_points,
        spline_points,
        alpha: config.alpha,
        points_per_segment: config.points_per_segment,
        source_road_id,
    })
}

/// Outcome of converting one road of a network.
#[derive(Debug, Clone)]
pub struct RoadConversion {
    pub road_id: String,
    pub outcome: Result<SplineResult, ConvertError>,
    pub warnings: ConversionWarnings,
}

/// Convert every road of a network independently, ordered by road id.
pub fn convert_roads(network: &RoadNetwork, config: &SplineConfig) -> Vec<RoadConversion> {
    let mut conversions: Vec<RoadConversion> = network
        .roads
        .iter()
        .map(|road| {
            let sub = RoadNetwork {
                source_id: network.source_id.clone(),
                roads: vec![road.clone()],
            };
            let mut warnings = ConversionWarnings::default();
            let outcome =
                generate_from_boundaries(&sub, config, road.id.clone(), &mut warnings);
            RoadConversion {
                road_id: road.id.clone(),
                outcome,
                warnings,
            }
        })
        .collect();
    conversions.sort_by(|a, b| a.road_id.cmp(&b.road_id));
    conversions
}

//! Evaluation of reference-line primitives and road cross-sections.
//!
//! Everything here is a pure function of immutable road data: position and
//! heading at arbitrary arc length, elevation, total road width, and the
//! accumulated lane offsets that boundary extraction needs.

use crate::ingest::{GeometrySegment, Lane, LaneSection, ParamRange, Road, SegmentShape};
use thiserror::Error;

/// Position and heading on the reference line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in radians, normalized to (-pi, pi] on output.
    pub hdg: f64,
}

/// Elevation and total road width at one arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElevationWidth {
    pub z: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Which lanes count toward widths and offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaneFilter {
    /// Every non-center lane regardless of type.
    #[default]
    All,
    /// Only lanes with type "driving".
    Driving,
}

impl LaneFilter {
    fn counts(&self, lane: &Lane) -> bool {
        match self {
            LaneFilter::All => true,
            LaneFilter::Driving => lane.lane_type == "driving",
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("arc length {ds} outside segment range [0, {length}]")]
    OutOfRange { ds: f64, length: f64 },
    #[error("evaluation of {what} produced a non-finite value")]
    NonFinite { what: &'static str },
    #[error("road has no lane sections")]
    NoLaneSection,
}

/// Slack allowed when `ds` slightly exceeds the segment length.
const DS_TOL: f64 = 1e-9;

/// Normalize an angle to (-pi, pi]. Values already in range pass through
/// bit-exact.
pub fn normalize_heading(h: f64) -> f64 {
    use std::f64::consts::PI;
    if h > -PI && h <= PI {
        return h;
    }
    let r = h.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// sin(t)/t with a series fallback near zero.
fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// Evaluate a reference-line primitive at local arc length `ds`.
///
/// At `ds = 0` the stored start pose is returned unchanged (heading
/// normalization aside, which is the identity for headings already in
/// (-pi, pi]).
pub fn eval_reference_line(segment: &GeometrySegment, ds: f64) -> Result<Pose, GeometryError> {
    if !(0.0..=segment.length + DS_TOL).contains(&ds) || !ds.is_finite() {
        return Err(GeometryError::OutOfRange {
            ds,
            length: segment.length,
        });
    }
    let ds = ds.min(segment.length);

    let pose = match &segment.shape {
        SegmentShape::Line => Pose {
            x: segment.x + ds * segment.hdg.cos(),
            y: segment.y + ds * segment.hdg.sin(),
            hdg: normalize_heading(segment.hdg),
        },
        SegmentShape::Arc { curvature } => {
            // Chord form: exact for k -> 0, no cancellation for small k*ds.
            let half = 0.5 * curvature * ds;
            let chord = ds * sinc(half);
            Pose {
                x: segment.x + chord * (segment.hdg + half).cos(),
                y: segment.y + chord * (segment.hdg + half).sin(),
                hdg: normalize_heading(segment.hdg + curvature * ds),
            }
        }
        SegmentShape::Spiral {
            curv_start,
            curv_end,
        } => {
            let rate = (curv_end - curv_start) / segment.length;
            let (dx, dy) = spiral_displacement(segment.hdg, *curv_start, rate, ds);
            let hdg = segment.hdg + curv_start * ds + 0.5 * rate * ds * ds;
            Pose {
                x: segment.x + dx,
                y: segment.y + dy,
                hdg: normalize_heading(hdg),
            }
        }
        SegmentShape::Poly3 { a, b, c, d } => {
            let u = ds;
            let v = a + u * (b + u * (c + u * d));
            let slope = b + u * (2.0 * c + u * 3.0 * d);
            let (sin_h, cos_h) = segment.hdg.sin_cos();
            Pose {
                x: segment.x + u * cos_h - v * sin_h,
                y: segment.y + u * sin_h + v * cos_h,
                hdg: normalize_heading(segment.hdg + slope.atan()),
            }
        }
        SegmentShape::ParamPoly3 {
            au,
            bu,
            cu,
            du,
            av,
            bv,
            cv,
            dv,
            p_range,
        } => {
            let p = match p_range {
                ParamRange::ArcLength => ds,
                ParamRange::Normalized => ds / segment.length,
            };
            let u = au + p * (bu + p * (cu + p * du));
            let v = av + p * (bv + p * (cv + p * dv));
            let du_dp = bu + p * (2.0 * cu + p * 3.0 * du);
            let dv_dp = bv + p * (2.0 * cv + p * 3.0 * dv);
            let (sin_h, cos_h) = segment.hdg.sin_cos();
            Pose {
                x: segment.x + u * cos_h - v * sin_h,
                y: segment.y + u * sin_h + v * cos_h,
                hdg: normalize_heading(segment.hdg + dv_dp.atan2(du_dp)),
            }
        }
    };

    if pose.x.is_finite() && pose.y.is_finite() && pose.hdg.is_finite() {
        Ok(pose)
    } else {
        Err(GeometryError::NonFinite {
            what: "reference line pose",
        })
    }
}

/// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half;
/// nodes are symmetric).
const GL16: [(f64, f64); 8] = [
    (0.09501250983763744, 0.1894506104550685),
    (0.2816035507792589, 0.1826034150449236),
    (0.45801677765722737, 0.16915651939500262),
    (0.6178762444026438, 0.14959598881657676),
    (0.755404408355003, 0.12462897125553403),
    (0.8656312023878318, 0.09515851168249259),
    (0.9445750230732326, 0.06225352393864771),
    (0.9894009349916499, 0.027152459411754037),
];

/// Displacement of a clothoid with heading
/// theta(u) = h0 + k0*u + rate*u^2/2 over [0, ds].
///
/// Fixed-order Gauss-Legendre per sub-interval, doubling the sub-interval
/// count until the endpoint moves by no more than 1e-9 m.
fn spiral_displacement(h0: f64, k0: f64, rate: f64, ds: f64) -> (f64, f64) {
    if ds == 0.0 {
        return (0.0, 0.0);
    }
    let integrate = |n: usize| -> (f64, f64) {
        let step = ds / n as f64;
        let mut x = 0.0;
        let mut y = 0.0;
        for i in 0..n {
            let mid = (i as f64 + 0.5) * step;
            let halfw = 0.5 * step;
            for (node, weight) in GL16 {
                for u in [mid - halfw * node, mid + halfw * node] {
                    let theta = h0 + u * (k0 + 0.5 * rate * u);
                    let (sin_t, cos_t) = theta.sin_cos();
                    x += weight * halfw * cos_t;
                    y += weight * halfw * sin_t;
                }
            }
        }
        (x, y)
    };

    // Scale the initial panel count with the total heading sweep.
    let sweep = (k0.abs() + 0.5 * (rate * ds).abs()) * ds.abs();
    let mut n = ((sweep / 3.0).ceil() as usize).clamp(1, 1024);
    let mut prev = integrate(n);
    while n < (1 << 16) {
        n *= 2;
        let cur = integrate(n);
        let moved = ((cur.0 - prev.0).powi(2) + (cur.1 - prev.1).powi(2)).sqrt();
        prev = cur;
        if moved <= 1e-9 {
            break;
        }
    }
    prev
}

/// Elevation in meters at arc length `s`, per the cubic profile.
///
/// Total function: an empty profile yields 0; queries beyond the last record
/// extrapolate with the last cubic, queries before the first use the first.
pub fn elevation_at(road: &Road, s: f64) -> f64 {
    let profile = &road.elevation_profile;
    if profile.is_empty() {
        return 0.0;
    }
    let idx = profile
        .partition_point(|e| e.s_elev <= s)
        .saturating_sub(1);
    let seg = &profile[idx];
    let ds = s - seg.s_elev;
    seg.a + ds * (seg.b + ds * (seg.c + ds * seg.d))
}

/// Widths and offsets of one road cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection {
    pub elevation: f64,
    /// Total width: sum of all counted lanes on both sides, each clamped at 0.
    pub width: f64,
    /// Accumulated width of counted left lanes.
    pub left_offset: f64,
    /// Accumulated width of counted right lanes.
    pub right_offset: f64,
    /// Number of lanes whose evaluated width was negative and clamped to 0.
    pub clamped_lanes: u32,
}

fn active_section(road: &Road, s: f64) -> Result<&LaneSection, GeometryError> {
    if road.lane_sections.is_empty() {
        return Err(GeometryError::NoLaneSection);
    }
    let idx = road
        .lane_sections
        .partition_point(|sec| sec.s_start <= s)
        .saturating_sub(1);
    Ok(&road.lane_sections[idx])
}

/// Width of one lane at section-local coordinate `u`, clamped at 0.
fn lane_width(lane: &Lane, u: f64) -> (f64, bool) {
    if lane.width_polys.is_empty() {
        return (0.0, false);
    }
    let idx = lane
        .width_polys
        .partition_point(|w| w.s_offset <= u)
        .saturating_sub(1);
    let poly = &lane.width_polys[idx];
    let ds = u - poly.s_offset;
    let w = poly.a + ds * (poly.b + ds * (poly.c + ds * poly.d));
    if w < 0.0 {
        (0.0, true)
    } else {
        (w, false)
    }
}

/// Evaluate elevation, width, and per-side lane offsets at arc length `s`.
pub fn cross_section_at(
    road: &Road,
    s: f64,
    filter: LaneFilter,
) -> Result<CrossSection, GeometryError> {
    let section = active_section(road, s)?;
    let u = s - section.s_start;
    let mut clamped = 0u32;
    let mut sum_side = |lanes: &[Lane]| -> f64 {
        let mut total = 0.0;
        for lane in lanes.iter().filter(|l| filter.counts(l)) {
            let (w, was_clamped) = lane_width(lane, u);
            if was_clamped {
                clamped += 1;
            }
            total += w;
        }
        total
    };
    let left = sum_side(&section.left_lanes);
    let right = sum_side(&section.right_lanes);
    Ok(CrossSection {
        elevation: elevation_at(road, s),
        width: left + right,
        left_offset: left,
        right_offset: right,
        clamped_lanes: clamped,
    })
}

/// Total road width at `s`: the sum of all non-center lane widths.
pub fn road_width_at(road: &Road, s: f64) -> Result<f64, GeometryError> {
    cross_section_at(road, s, LaneFilter::All).map(|c| c.width)
}

/// Accumulated width of the counted lanes on one side at `s`.
pub fn lane_offset_at(road: &Road, s: f64, side: Side) -> Result<f64, GeometryError> {
    lane_offset_at_filtered(road, s, side, LaneFilter::All)
}

pub fn lane_offset_at_filtered(
    road: &Road,
    s: f64,
    side: Side,
    filter: LaneFilter,
) -> Result<f64, GeometryError> {
    cross_section_at(road, s, filter).map(|c| match side {
        Side::Left => c.left_offset,
        Side::Right => c.right_offset,
    })
}

/// Elevation and total width bundled, the pair boundary extraction consumes.
pub fn elevation_and_width(road: &Road, s: f64) -> Result<ElevationWidth, GeometryError> {
    cross_section_at(road, s, LaneFilter::All).map(|c| ElevationWidth {
        z: c.elevation,
        width: c.width,
    })
}

/// Offset a pose laterally by `t` meters. Positive `t` is to the left of the
/// heading (OpenDRIVE t-axis convention).
pub fn lateral_offset_point(pose: &Pose, t: f64) -> (f64, f64) {
    (
        pose.x - t * pose.hdg.sin(),
        pose.y + t * pose.hdg.cos(),
    )
}

/// Tolerances for plan-view endpoint continuity checks.
#[derive(Debug, Clone, Copy)]
pub struct ContinuityTolerance {
    pub position: f64,
    pub heading: f64,
}

impl Default for ContinuityTolerance {
    fn default() -> Self {
        Self {
            position: 1e-3,
            heading: 1e-3,
        }
    }
}

/// A gap between the end of one plan-view segment and the start of the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityBreak {
    /// Index of the earlier segment of the mismatched pair.
    pub segment_index: usize,
    pub position_gap: f64,
    pub heading_gap: f64,
}

/// Check end-pose/start-pose agreement between consecutive plan-view
/// segments. Violations are reported, never treated as errors.
pub fn check_continuity(road: &Road, tol: ContinuityTolerance) -> Vec<ContinuityBreak> {
    let mut breaks = Vec::new();
    for (i, pair) in road.plan_view.windows(2).enumerate() {
        let Ok(end) = eval_reference_line(&pair[0], pair[0].length) else {
            continue;
        };
        let position_gap = ((end.x - pair[1].x).powi(2) + (end.y - pair[1].y).powi(2)).sqrt();
        let heading_gap = normalize_heading(end.hdg - pair[1].hdg).abs();
        if position_gap > tol.position || heading_gap > tol.heading {
            breaks.push(ContinuityBreak {
                segment_index: i,
                position_gap,
                heading_gap,
            });
        }
    }
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ElevationSegment, WidthPoly};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn seg(shape: SegmentShape, length: f64) -> GeometrySegment {
        GeometrySegment {
            s: 0.0,
            x: 0.0,
            y: 0.0,
            hdg: 0.0,
            length,
            shape,
        }
    }

    fn road_with(
        elevation: Vec<ElevationSegment>,
        sections: Vec<LaneSection>,
    ) -> Road {
        Road {
            id: "r".into(),
            length: 100.0,
            plan_view: vec![seg(SegmentShape::Line, 100.0)],
            elevation_profile: elevation,
            lane_sections: sections,
        }
    }

    fn const_lane(id: i32, width: f64) -> Lane {
        Lane {
            id,
            lane_type: "driving".into(),
            width_polys: vec![WidthPoly {
                s_offset: 0.0,
                a: width,
                b: 0.0,
                c: 0.0,
                d: 0.0,
            }],
        }
    }

    #[test]
    fn line_advances_straight() {
        let pose = eval_reference_line(&seg(SegmentShape::Line, 10.0), 5.0).unwrap();
        assert_eq!(pose, Pose { x: 5.0, y: 0.0, hdg: 0.0 });
    }

    #[test]
    fn arc_quarter_unit_circle() {
        let pose =
            eval_reference_line(&seg(SegmentShape::Arc { curvature: 1.0 }, 2.0), FRAC_PI_2)
                .unwrap();
        assert!((pose.x - 1.0).abs() < 1e-12);
        assert!((pose.y - 1.0).abs() < 1e-12);
        assert!((pose.hdg - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn eval_at_zero_returns_start_pose_exactly() {
        let shapes = [
            SegmentShape::Line,
            SegmentShape::Arc { curvature: 0.03 },
            SegmentShape::Spiral {
                curv_start: -0.01,
                curv_end: 0.04,
            },
            SegmentShape::Poly3 {
                a: 0.0,
                b: 0.0,
                c: 0.002,
                d: -0.0001,
            },
        ];
        for shape in shapes {
            let mut segment = seg(shape, 50.0);
            segment.x = 12.25;
            segment.y = -3.5;
            segment.hdg = 1.375;
            let pose = eval_reference_line(&segment, 0.0).unwrap();
            assert_eq!(pose.x, segment.x);
            assert_eq!(pose.y, segment.y);
            assert_eq!(pose.hdg, segment.hdg);
        }
    }

    #[test]
    fn near_zero_curvature_arc_matches_line_over_a_kilometer() {
        let line = seg(SegmentShape::Line, 1000.0);
        let arc = seg(SegmentShape::Arc { curvature: 1e-12 }, 1000.0);
        for ds in [1.0, 250.0, 999.0, 1000.0] {
            let pl = eval_reference_line(&line, ds).unwrap();
            let pa = eval_reference_line(&arc, ds).unwrap();
            let d = ((pl.x - pa.x).powi(2) + (pl.y - pa.y).powi(2)).sqrt();
            assert!(d <= 1e-6, "ds={ds}: arc deviates {d}");
        }
    }

    #[test]
    fn constant_curvature_spiral_matches_arc() {
        for k in [-0.02, 0.001, 0.015] {
            let arc = seg(SegmentShape::Arc { curvature: k }, 500.0);
            let spiral = seg(
                SegmentShape::Spiral {
                    curv_start: k,
                    curv_end: k,
                },
                500.0,
            );
            for ds in [10.0, 123.456, 500.0] {
                let pa = eval_reference_line(&arc, ds).unwrap();
                let ps = eval_reference_line(&spiral, ds).unwrap();
                let d = ((pa.x - ps.x).powi(2) + (pa.y - ps.y).powi(2)).sqrt();
                assert!(d <= 1e-9, "k={k} ds={ds}: spiral deviates {d}");
            }
        }
    }

    #[test]
    fn non_finite_evaluation_is_an_error() {
        let s = seg(
            SegmentShape::Poly3 {
                a: f64::MAX,
                b: f64::MAX,
                c: f64::MAX,
                d: f64::MAX,
            },
            10.0,
        );
        assert!(matches!(
            eval_reference_line(&s, 10.0),
            Err(GeometryError::NonFinite { .. })
        ));
    }

    #[test]
    fn elevation_and_width_bundle() {
        let road = road_with(
            vec![ElevationSegment {
                s_elev: 0.0,
                a: 2.5,
                b: 0.0,
                c: 0.0,
                d: 0.0,
            }],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![const_lane(1, 3.0)],
                right_lanes: vec![const_lane(-1, 3.0)],
            }],
        );
        let ew = elevation_and_width(&road, 10.0).unwrap();
        assert_eq!(ew, ElevationWidth { z: 2.5, width: 6.0 });
    }

    #[test]
    fn out_of_range_ds_rejected() {
        let s = seg(SegmentShape::Line, 10.0);
        assert!(matches!(
            eval_reference_line(&s, -0.5),
            Err(GeometryError::OutOfRange { .. })
        ));
        assert!(matches!(
            eval_reference_line(&s, 10.1),
            Err(GeometryError::OutOfRange { .. })
        ));
        // Within tolerance just above the end is fine.
        assert!(eval_reference_line(&s, 10.0 + 5e-10).is_ok());
    }

    #[test]
    fn elevation_constant_everywhere() {
        let road = road_with(
            vec![ElevationSegment {
                s_elev: 0.0,
                a: 5.0,
                b: 0.0,
                c: 0.0,
                d: 0.0,
            }],
            vec![],
        );
        for s in [0.0, 3.7, 99.0] {
            assert_eq!(elevation_at(&road, s), 5.0);
        }
    }

    #[test]
    fn elevation_direct_substitution() {
        let road = road_with(
            vec![ElevationSegment {
                s_elev: 0.0,
                a: 1.0,
                b: 0.5,
                c: 0.25,
                d: 0.125,
            }],
            vec![],
        );
        assert!((elevation_at(&road, 2.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn elevation_selects_latest_segment() {
        let road = road_with(
            vec![
                ElevationSegment {
                    s_elev: 0.0,
                    a: 0.0,
                    b: 0.0,
                    c: 0.0,
                    d: 0.0,
                },
                ElevationSegment {
                    s_elev: 10.0,
                    a: 3.0,
                    b: 0.0,
                    c: 0.0,
                    d: 0.0,
                },
            ],
            vec![],
        );
        assert_eq!(elevation_at(&road, 12.0), 3.0);
        assert_eq!(elevation_at(&road, 9.999), 0.0);
    }

    #[test]
    fn empty_profile_is_zero() {
        let road = road_with(vec![], vec![]);
        assert_eq!(elevation_at(&road, 42.0), 0.0);
    }

    #[test]
    fn width_sums_both_sides() {
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![const_lane(1, 4.0)],
                right_lanes: vec![const_lane(-1, 4.0)],
            }],
        );
        assert_eq!(road_width_at(&road, 50.0).unwrap(), 8.0);
    }

    #[test]
    fn center_only_road_has_zero_width() {
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![],
                right_lanes: vec![],
            }],
        );
        assert_eq!(road_width_at(&road, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn width_polynomial_evaluated_at_local_offset() {
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![],
                right_lanes: vec![Lane {
                    id: -1,
                    lane_type: "driving".into(),
                    width_polys: vec![WidthPoly {
                        s_offset: 0.0,
                        a: 2.0,
                        b: 0.1,
                        c: 0.0,
                        d: 0.0,
                    }],
                }],
            }],
        );
        assert!((road_width_at(&road, 10.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lane_offset_accumulates_per_side() {
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![],
                right_lanes: vec![const_lane(-1, 3.5), const_lane(-2, 3.0)],
            }],
        );
        assert!((lane_offset_at(&road, 5.0, Side::Right).unwrap() - 6.5).abs() < 1e-12);
        assert_eq!(lane_offset_at(&road, 5.0, Side::Left).unwrap(), 0.0);
    }

    #[test]
    fn lane_offset_linear_growth() {
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![],
                right_lanes: vec![Lane {
                    id: -1,
                    lane_type: "driving".into(),
                    width_polys: vec![WidthPoly {
                        s_offset: 0.0,
                        a: 3.0,
                        b: 0.2,
                        c: 0.0,
                        d: 0.0,
                    }],
                }],
            }],
        );
        assert!((lane_offset_at(&road, 5.0, Side::Right).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn negative_width_clamps_and_counts() {
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![],
                right_lanes: vec![const_lane(-1, -2.0)],
            }],
        );
        let cs = cross_section_at(&road, 1.0, LaneFilter::All).unwrap();
        assert_eq!(cs.width, 0.0);
        assert_eq!(cs.clamped_lanes, 1);
    }

    #[test]
    fn driving_filter_excludes_borders() {
        let mut border = const_lane(-2, 1.0);
        border.lane_type = "border".into();
        let road = road_with(
            vec![],
            vec![LaneSection {
                s_start: 0.0,
                left_lanes: vec![],
                right_lanes: vec![const_lane(-1, 3.5), border],
            }],
        );
        let all = lane_offset_at_filtered(&road, 0.0, Side::Right, LaneFilter::All).unwrap();
        let driving =
            lane_offset_at_filtered(&road, 0.0, Side::Right, LaneFilter::Driving).unwrap();
        assert!((all - 4.5).abs() < 1e-12);
        assert!((driving - 3.5).abs() < 1e-12);
    }

    #[test]
    fn no_lane_section_is_an_error() {
        let road = road_with(vec![], vec![]);
        assert_eq!(
            road_width_at(&road, 0.0).unwrap_err(),
            GeometryError::NoLaneSection
        );
    }

    #[test]
    fn lateral_offset_examples() {
        let east = Pose { x: 0.0, y: 0.0, hdg: 0.0 };
        assert_eq!(lateral_offset_point(&east, 2.0), (0.0, 2.0));
        let north = Pose { x: 0.0, y: 0.0, hdg: FRAC_PI_2 };
        let (x, y) = lateral_offset_point(&north, -2.0);
        assert!((x - 2.0).abs() < 1e-12);
        assert!(y.abs() < 1e-12);
        let anywhere = Pose { x: 3.5, y: -1.25, hdg: 0.8 };
        assert_eq!(lateral_offset_point(&anywhere, 0.0), (3.5, -1.25));
    }

    #[test]
    fn lateral_offset_preserves_distance() {
        let pose = Pose { x: 1.0, y: 2.0, hdg: 0.7523 };
        for t in [-17.0, -0.001, 0.25, 9.75] {
            let (x, y) = lateral_offset_point(&pose, t);
            let d = ((x - pose.x).powi(2) + (y - pose.y).powi(2)).sqrt();
            assert!((d - t.abs()).abs() <= 1e-12 * t.abs().max(1.0));
        }
    }

    #[test]
    fn normalize_heading_range_and_identity() {
        assert_eq!(normalize_heading(0.5), 0.5);
        assert_eq!(normalize_heading(-3.0), -3.0);
        assert_eq!(normalize_heading(PI), PI);
        assert!((normalize_heading(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_heading(-FRAC_PI_2 - 2.0 * PI) + FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn continuity_break_detected() {
        let road = Road {
            id: "r".into(),
            length: 20.0,
            plan_view: vec![
                GeometrySegment {
                    s: 0.0,
                    x: 0.0,
                    y: 0.0,
                    hdg: 0.0,
                    length: 10.0,
                    shape: SegmentShape::Line,
                },
                GeometrySegment {
                    s: 10.0,
                    x: 10.0,
                    y: 0.5, // 0.5 m lateral jump
                    hdg: 0.0,
                    length: 10.0,
                    shape: SegmentShape::Line,
                },
            ],
            elevation_profile: vec![],
            lane_sections: vec![],
        };
        let breaks = check_continuity(&road, ContinuityTolerance::default());
        assert_eq!(breaks.len(), 1);
        assert_eq!(breaks[0].segment_index, 0);
        assert!((breaks[0].position_gap - 0.5).abs() < 1e-12);

        let mut aligned = road;
        aligned.plan_view[1].y = 0.0;
        assert!(check_continuity(&aligned, ContinuityTolerance::default()).is_empty());
    }
}

//! Re-simulation of a converted road with a geometric path follower.
//!
//! A kinematic bicycle drives the spline with pure-pursuit steering clamped
//! to the ADAS steering range. The run passes when arc-length progress
//! reaches the final control point and fails when the vehicle leaves the
//! drivable band around the lane center. Everything is fixed-step and free
//! of randomness, so identical inputs produce bit-identical traces.

use crate::converter::SplineResult;
use crate::validate::{check_validity, ValidityConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneChoice {
    /// Track the spline itself (the road centerline).
    Center,
    /// Track the right lane, approximated by offsetting the centerline by a
    /// quarter of the road width.
    Right,
}

#[derive(Debug, Clone, Copy)]
pub struct VehicleConfig {
    pub wheelbase: f64,
    pub speed: f64,
    pub lookahead: f64,
    /// Steering limit in degrees; capped at 25 regardless of the value set.
    pub max_steer_deg: f64,
    /// Lower bound on the drivable half-width.
    pub track_half_width: f64,
    pub dt: f64,
    pub lane: LaneChoice,
}

impl Default for VehicleConfig {
    fn default() -> Self {
        Self {
            wheelbase: 2.5,
            speed: 8.0,
            lookahead: 6.0,
            max_steer_deg: 25.0,
            track_half_width: 1.0,
            dt: 0.05,
            lane: LaneChoice::Center,
        }
    }
}

/// Hard ceiling on the steering range, matching the ADAS output interval.
pub const STEER_LIMIT_DEG: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeReason {
    ReachedEnd,
    OutOfBounds,
    Stalled,
    InvalidRoad,
}

impl OutcomeReason {
    pub fn name(&self) -> &'static str {
        match self {
            OutcomeReason::ReachedEnd => "ReachedEnd",
            OutcomeReason::OutOfBounds => "OutOfBounds",
            OutcomeReason::Stalled => "Stalled",
            OutcomeReason::InvalidRoad => "InvalidRoad",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub passed: bool,
    pub reason: OutcomeReason,
    pub oob_position: Option<(f64, f64)>,
    pub steps: usize,
    pub max_lateral_deviation: f64,
}

impl SimOutcome {
    fn finished(
        reason: OutcomeReason,
        oob_position: Option<(f64, f64)>,
        steps: usize,
        max_lateral_deviation: f64,
    ) -> Self {
        Self {
            passed: reason == OutcomeReason::ReachedEnd,
            reason,
            oob_position,
            steps,
            max_lateral_deviation,
        }
    }
}

/// One logged simulation step, taken before the state advances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub steer_deg: f64,
    pub lateral_dev: f64,
    /// Monotone arc-length progress along the reference path.
    pub progress: f64,
}

/// Steps without measurable progress before the run counts as stalled.
const STALL_STEPS: usize = 200;
const STALL_EPS: f64 = 1e-6;

pub fn simulate(result: &SplineResult, cfg: &VehicleConfig) -> SimOutcome {
    simulate_with_trace(result, cfg).0
}

pub fn simulate_with_trace(
    result: &SplineResult,
    cfg: &VehicleConfig,
) -> (SimOutcome, Vec<TraceRow>) {
    let valid = match check_validity(result, &ValidityConfig::default()) {
        Ok(report) => report.valid,
        Err(_) => false,
    };
    if !valid {
        return (
            SimOutcome::finished(OutcomeReason::InvalidRoad, None, 0, 0.0),
            Vec::new(),
        );
    }

    let Some(path) = RefPath::build(result, cfg) else {
        return (
            SimOutcome::finished(OutcomeReason::InvalidRoad, None, 0, 0.0),
            Vec::new(),
        );
    };

    assert!(
        cfg.wheelbase > 0.0
            && cfg.speed > 0.0
            && cfg.lookahead > 0.0
            && cfg.max_steer_deg > 0.0
            && cfg.track_half_width > 0.0
            && cfg.dt > 0.0,
        "vehicle config values must be positive"
    );
    let max_steer = cfg.max_steer_deg.min(STEER_LIMIT_DEG).to_radians();

    // Start at the first path point, oriented along the road.
    let mut x = path.pts[0].0;
    let mut y = path.pts[0].1;
    let mut heading = {
        let (x1, y1) = path.pts[1];
        (y1 - y).atan2(x1 - x)
    };

    let total = path.total();
    // How far beyond the current projection to look for the nearest segment;
    // keeps projection local on roads that fold back near themselves.
    let window = 2.0 * cfg.lookahead + 10.0 * cfg.speed * cfg.dt;
    let max_steps = ((total / (cfg.speed * cfg.dt)).ceil() as usize) * 20 + 10_000;

    let mut progress = 0.0_f64;
    let mut seg_hint = 0usize;
    let mut stall_count = 0usize;
    let mut max_dev = 0.0_f64;
    let mut steps = 0usize;
    let mut trace = Vec::new();

    loop {
        let proj = path.project((x, y), seg_hint, progress, window);
        seg_hint = proj.segment;
        let new_progress = progress.max(proj.s);
        if new_progress - progress < STALL_EPS {
            stall_count += 1;
        } else {
            stall_count = 0;
        }
        progress = new_progress;

        let dev = proj.distance;
        max_dev = max_dev.max(dev);

        // Steering toward the lookahead point, for the log and the update.
        let target = path.point_at((progress + cfg.lookahead).min(total));
        let steer = pure_pursuit_steer((x, y), heading, target, cfg.wheelbase, max_steer);

        trace.push(TraceRow {
            t: steps as f64 * cfg.dt,
            x,
            y,
            heading,
            steer_deg: steer.to_degrees(),
            lateral_dev: dev,
            progress,
        });

        if dev > path.half_width_at(proj.segment, proj.t, cfg.track_half_width) {
            return (
                SimOutcome::finished(OutcomeReason::OutOfBounds, Some((x, y)), steps, max_dev),
                trace,
            );
        }
        if progress >= total - 1e-9 {
            return (
                SimOutcome::finished(OutcomeReason::ReachedEnd, None, steps, max_dev),
                trace,
            );
        }
        if stall_count >= STALL_STEPS || steps >= max_steps {
            return (
                SimOutcome::finished(OutcomeReason::Stalled, None, steps, max_dev),
                trace,
            );
        }

        // Kinematic bicycle, explicit Euler.
        x += cfg.speed * heading.cos() * cfg.dt;
        y += cfg.speed * heading.sin() * cfg.dt;
        heading += cfg.speed / cfg.wheelbase * steer.tan() * cfg.dt;
        steps += 1;
    }
}

fn pure_pursuit_steer(
    pos: (f64, f64),
    heading: f64,
    target: (f64, f64),
    wheelbase: f64,
    max_steer: f64,
) -> f64 {
    let dx = target.0 - pos.0;
    let dy = target.1 - pos.1;
    let (sin_h, cos_h) = heading.sin_cos();
    let local_x = cos_h * dx + sin_h * dy;
    let local_y = -sin_h * dx + cos_h * dy;
    let d2 = local_x * local_x + local_y * local_y;
    if d2 < 1e-12 {
        return 0.0;
    }
    let curvature = 2.0 * local_y / d2;
    (wheelbase * curvature).atan().clamp(-max_steer, max_steer)
}

struct Projection {
    segment: usize,
    /// Parameter within the segment, in [0, 1].
    t: f64,
    /// Arc length of the projected point.
    s: f64,
    distance: f64,
}

struct RefPath {
    pts: Vec<(f64, f64)>,
    /// Cumulative arc length per vertex.
    cum: Vec<f64>,
    /// Full road width per vertex.
    widths: Vec<f64>,
}

impl RefPath {
    fn build(result: &SplineResult, cfg: &VehicleConfig) -> Option<RefPath> {
        let raw: Vec<(f64, f64)> = result.spline_points.iter().map(|p| (p[0], p[1])).collect();
        let raw_widths = per_point_widths(result);

        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        let mut widths: Vec<f64> = Vec::with_capacity(raw.len());
        for (p, w) in raw.into_iter().zip(raw_widths) {
            if let Some(&prev) = pts.last() {
                if (p.0 - prev.0).powi(2) + (p.1 - prev.1).powi(2) < 1e-18 {
                    continue;
                }
            }
            pts.push(p);
            widths.push(w);
        }
        if pts.len() < 2 {
            return None;
        }

        if cfg.lane == LaneChoice::Right {
            pts = offset_right(&pts, &widths);
        }

        let mut cum = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for pair in pts.windows(2) {
            acc += ((pair[1].0 - pair[0].0).powi(2) + (pair[1].1 - pair[0].1).powi(2)).sqrt();
            cum.push(acc);
        }
        Some(RefPath { pts, cum, widths })
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn half_width_at(&self, segment: usize, t: f64, floor: f64) -> f64 {
        let w = self.widths[segment] * (1.0 - t) + self.widths[segment + 1] * t;
        (0.5 * w).max(floor)
    }

    /// Nearest point on the path, searching from segment `from` up to
    /// `window` meters of arc length past the current progress `s_cur`.
    fn project(&self, pos: (f64, f64), from: usize, s_cur: f64, window: f64) -> Projection {
        let mut best = Projection {
            segment: from,
            t: 0.0,
            s: self.cum[from],
            distance: f64::INFINITY,
        };
        for i in from..self.pts.len() - 1 {
            if self.cum[i] > s_cur + window {
                break;
            }
            let a = self.pts[i];
            let b = self.pts[i + 1];
            let abx = b.0 - a.0;
            let aby = b.1 - a.1;
            let len2 = abx * abx + aby * aby;
            let t = if len2 > 0.0 {
                (((pos.0 - a.0) * abx + (pos.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let px = a.0 + t * abx;
            let py = a.1 + t * aby;
            let d = ((pos.0 - px).powi(2) + (pos.1 - py).powi(2)).sqrt();
            if d < best.distance {
                best = Projection {
                    segment: i,
                    t,
                    s: self.cum[i] + t * (self.cum[i + 1] - self.cum[i]),
                    distance: d,
                };
            }
        }
        best
    }

    /// Position at arc length `s` (clamped to the path range).
    fn point_at(&self, s: f64) -> (f64, f64) {
        if s <= 0.0 {
            return self.pts[0];
        }
        if s >= self.total() {
            return *self.pts.last().unwrap();
        }
        let idx = self.cum.partition_point(|&c| c <= s).saturating_sub(1);
        let idx = idx.min(self.pts.len() - 2);
        let span = self.cum[idx + 1] - self.cum[idx];
        let t = if span > 0.0 { (s - self.cum[idx]) / span } else { 0.0 };
        let a = self.pts[idx];
        let b = self.pts[idx + 1];
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    }
}

/// Full road width carried by each spline point.
///
/// When the spline layout matches its control points (n = 1 + (m-1) *
/// points_per_segment) widths interpolate linearly between control points;
/// otherwise each spline point takes the width of its nearest control point.
fn per_point_widths(result: &SplineResult) -> Vec<f64> {
    let m = result.control_points.len();
    let n = result.spline_points.len();
    let pps = result.points_per_segment as usize;
    if m >= 2 && pps >= 1 && n == 1 + (m - 1) * pps {
        let mut widths = Vec::with_capacity(n);
        widths.push(result.control_points[0].width);
        for q in 1..n {
            let seg = (q - 1) / pps;
            let t = ((q - 1) % pps + 1) as f64 / pps as f64;
            let w0 = result.control_points[seg].width;
            let w1 = result.control_points[seg + 1].width;
            widths.push(w0 * (1.0 - t) + w1 * t);
        }
        widths
    } else {
        result
            .spline_points
            .iter()
            .map(|p| {
                let mut best = 0.0;
                let mut best_d2 = f64::INFINITY;
                for c in &result.control_points {
                    let d2 = (p[0] - c.x).powi(2) + (p[1] - c.y).powi(2);
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = c.width;
                    }
                }
                best
            })
            .collect()
    }
}

/// Offset a polyline to the right by a quarter of the local road width.
fn offset_right(pts: &[(f64, f64)], widths: &[f64]) -> Vec<(f64, f64)> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (dx, dy) = if i == 0 {
                (pts[1].0 - pts[0].0, pts[1].1 - pts[0].1)
            } else if i == n - 1 {
                (pts[n - 1].0 - pts[n - 2].0, pts[n - 1].1 - pts[n - 2].1)
            } else {
                (pts[i + 1].0 - pts[i - 1].0, pts[i + 1].1 - pts[i - 1].1)
            };
            let len = (dx * dx + dy * dy).sqrt();
            if len == 0.0 {
                return pts[i];
            }
            // Right normal is (dy, -dx) / len.
            let off = widths[i] / 4.0;
            (pts[i].0 + dy / len * off, pts[i].1 - dx / len * off)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converter::{ControlPoint, SplineResult};

    fn road(points: &[(f64, f64)], width: f64) -> SplineResult {
        SplineResult {
            control_points: points
                .iter()
                .map(|&(x, y)| ControlPoint { x, y, z: 0.0, width })
                .collect(),
            spline_points: points.iter().map(|&(x, y)| [x, y, 0.0]).collect(),
            alpha: 0.5,
            points_per_segment: 1,
            source_road_id: "sim".into(),
        }
    }

    fn straight(len: f64, spacing: f64, width: f64) -> SplineResult {
        let n = (len / spacing) as usize;
        let pts: Vec<(f64, f64)> = (0..=n).map(|i| (i as f64 * spacing, 0.0)).collect();
        road(&pts, width)
    }

    /// Dense arc polyline after a straight lead-in; curvature tighter than
    /// the vehicle can steer.
    fn hairpin(radius: f64, sweep_deg: f64, width: f64) -> SplineResult {
        let mut pts = vec![(0.0, 0.0), (10.0, 0.0), (20.0, 0.0), (30.0, 0.0)];
        let steps = (sweep_deg / 5.0) as usize;
        for i in 1..=steps {
            let ang = (i as f64) * sweep_deg.to_radians() / steps as f64;
            pts.push((30.0 + radius * ang.sin(), radius * (1.0 - ang.cos())));
        }
        road(&pts, width)
    }

    #[test]
    fn straight_wide_road_passes_with_tiny_deviation() {
        let outcome = simulate(&straight(200.0, 10.0, 8.0), &VehicleConfig::default());
        assert!(outcome.passed);
        assert_eq!(outcome.reason, OutcomeReason::ReachedEnd);
        assert!(outcome.max_lateral_deviation < 0.1);
    }

    #[test]
    fn over_curvature_hairpin_goes_out_of_bounds() {
        // tan(25 deg)/2.5 ~ 0.1865 1/m: radius 3 m is far beyond the limit.
        let outcome = simulate(&hairpin(3.0, 300.0, 4.0), &VehicleConfig::default());
        assert!(!outcome.passed);
        assert_eq!(outcome.reason, OutcomeReason::OutOfBounds);
        assert!(outcome.oob_position.is_some());
    }

    #[test]
    fn looped_road_is_invalid() {
        let pts = vec![(0.0, 0.0), (50.0, 0.0), (50.0, 50.0), (0.0, 50.0), (0.0, 0.5)];
        let outcome = simulate(&road(&pts, 8.0), &VehicleConfig::default());
        assert!(!outcome.passed);
        assert_eq!(outcome.reason, OutcomeReason::InvalidRoad);
        assert_eq!(outcome.steps, 0);
    }

    #[test]
    fn steering_clamp_holds_on_every_step() {
        let (_, trace) = simulate_with_trace(&hairpin(3.0, 300.0, 6.0), &VehicleConfig::default());
        assert!(!trace.is_empty());
        for row in &trace {
            assert!(row.steer_deg.abs() <= STEER_LIMIT_DEG + 1e-9);
        }
    }

    #[test]
    fn configured_steer_above_limit_is_capped() {
        let cfg = VehicleConfig {
            max_steer_deg: 60.0,
            ..VehicleConfig::default()
        };
        let (_, trace) = simulate_with_trace(&hairpin(3.0, 300.0, 6.0), &cfg);
        for row in &trace {
            assert!(row.steer_deg.abs() <= STEER_LIMIT_DEG + 1e-9);
        }
    }

    #[test]
    fn progress_is_monotone() {
        let (_, trace) = simulate_with_trace(&straight(150.0, 5.0, 8.0), &VehicleConfig::default());
        for pair in trace.windows(2) {
            assert!(pair[1].progress >= pair[0].progress);
        }
    }

    #[test]
    fn identical_runs_are_bit_identical() {
        let result = hairpin(4.0, 200.0, 6.0);
        let cfg = VehicleConfig::default();
        let (o1, t1) = simulate_with_trace(&result, &cfg);
        let (o2, t2) = simulate_with_trace(&result, &cfg);
        assert_eq!(o1, o2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn point_u_turn_in_a_narrow_corridor_leaves_the_road() {
        // A 180-degree point turn cannot be taken at the steering limit
        // without swinging far outside a narrow corridor.
        let pts = vec![
            (0.0, 0.0),
            (30.0, 0.0),
            (60.0, 0.0),
            (60.0, 2.0),
            (30.0, 2.0),
            (0.0, 2.0),
        ];
        let outcome = simulate(&road(&pts, 3.0), &VehicleConfig::default());
        assert!(!outcome.passed);
        assert_eq!(outcome.reason, OutcomeReason::OutOfBounds);
    }

    #[test]
    fn crawling_configuration_trips_the_stall_guard() {
        // Per-step advance below the progress epsilon: the watchdog ends the
        // run instead of looping forever.
        let cfg = VehicleConfig {
            speed: 1e-6,
            ..VehicleConfig::default()
        };
        let outcome = simulate(&straight(150.0, 10.0, 8.0), &cfg);
        assert!(!outcome.passed);
        assert_eq!(outcome.reason, OutcomeReason::Stalled);
    }

    #[test]
    fn right_lane_tracking_still_passes_straight_roads() {
        let cfg = VehicleConfig {
            lane: LaneChoice::Right,
            ..VehicleConfig::default()
        };
        let outcome = simulate(&straight(200.0, 10.0, 8.0), &cfg);
        assert!(outcome.passed);
    }
}

//! Catmull-Rom spline evaluation.
//!
//! The engine implements the alpha-parameterized family: knot spacing
//! t_{i+1} = t_i + |P_{i+1} - P_i|^alpha with the three-level pyramidal
//! (Barry-Goldman) interpolation. alpha = 0 gives the uniform spline,
//! alpha = 0.5 the centripetal one. Knot distances use xy only; z rides
//! along with the same basis weights.

use super::{ControlPoint, ConvertError, Point3};

/// Minimum control points for spline generation.
pub const MIN_CONTROL_POINTS: usize = 4;

fn planar_dist(a: &Point3, b: &Point3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Local knots for one window. t0 is pinned to 0 so evaluation depends only
/// on the window itself, never on upstream control points.
fn window_knots(window: &[Point3; 4], alpha: f64) -> [f64; 4] {
    let t0 = 0.0;
    let t1 = t0 + planar_dist(&window[0], &window[1]).powf(alpha);
    let t2 = t1 + planar_dist(&window[1], &window[2]).powf(alpha);
    let t3 = t2 + planar_dist(&window[2], &window[3]).powf(alpha);
    [t0, t1, t2, t3]
}

fn lerp3(a: &Point3, b: &Point3, wa: f64, wb: f64) -> Point3 {
    [
        wa * a[0] + wb * b[0],
        wa * a[1] + wb * b[1],
        wa * a[2] + wb * b[2],
    ]
}

/// Evaluate one window [P0, P1, P2, P3] at parameter `t` in [0, 1], which
/// spans the P1..P2 segment. `t = 0` yields P1 and `t = 1` yields P2.
pub fn catmull_rom_point(window: &[Point3; 4], alpha: f64, t: f64) -> Point3 {
    let knots = window_knots(window, alpha);
    // Map to the knot interval; hit the exact knot at the ends so the
    // endpoint identities are as tight as the arithmetic allows.
    let tau = if t <= 0.0 {
        knots[1]
    } else if t >= 1.0 {
        knots[2]
    } else {
        knots[1] + t * (knots[2] - knots[1])
    };
    eval_at_knot(window, &knots, tau)
}

fn eval_at_knot(window: &[Point3; 4], knots: &[f64; 4], tau: f64) -> Point3 {
    let [t0, t1, t2, t3] = *knots;
    let a1 = lerp3(
        &window[0],
        &window[1],
        (t1 - tau) / (t1 - t0),
        (tau - t0) / (t1 - t0),
    );
    let a2 = lerp3(
        &window[1],
        &window[2],
        (t2 - tau) / (t2 - t1),
        (tau - t1) / (t2 - t1),
    );
    let a3 = lerp3(
        &window[2],
        &window[3],
        (t3 - tau) / (t3 - t2),
        (tau - t2) / (t3 - t2),
    );
    let b1 = lerp3(&a1, &a2, (t2 - tau) / (t2 - t0), (tau - t0) / (t2 - t0));
    let b2 = lerp3(&a2, &a3, (t3 - tau) / (t3 - t1), (tau - t1) / (t3 - t1));
    lerp3(&b1, &b2, (t2 - tau) / (t2 - t1), (tau - t1) / (t2 - t1))
}

/// Window for segment `i` of the control polyline, with linear-reflection
/// phantom points at both ends so the spline spans every control segment.
pub(super) fn segment_window(points: &[Point3], i: usize) -> [Point3; 4] {
    let m = points.len();
    let p0 = if i == 0 {
        reflect(&points[0], &points[1])
    } else {
        points[i - 1]
    };
    let p3 = if i + 2 >= m {
        reflect(&points[m - 1], &points[m - 2])
    } else {
        points[i + 2]
    };
    [p0, points[i], points[i + 1], p3]
}

fn reflect(anchor: &Point3, other: &Point3) -> Point3 {
    [
        2.0 * anchor[0] - other[0],
        2.0 * anchor[1] - other[1],
        2.0 * anchor[2] - other[2],
    ]
}

/// Interpolate a Catmull-Rom spline through `points`.
///
/// Emits the first control point once, then `points_per_segment` samples per
/// control segment at t = j/points_per_segment, so segment endpoints (the
/// control points themselves) are always included.
pub fn catmull_rom_spline(
    points: &[ControlPoint],
    alpha: f64,
    points_per_segment: u32,
) -> Result<Vec<Point3>, ConvertError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ConvertError::InvalidAlpha { alpha });
    }
    if points_per_segment == 0 {
        return Err(ConvertError::InvalidPointsPerSegment);
    }
    if points.len() < MIN_CONTROL_POINTS {
        return Err(ConvertError::TooFewPoints {
            needed: MIN_CONTROL_POINTS,
            got: points.len(),
        });
    }
    let pts: Vec<Point3> = points.iter().map(|p| [p.x, p.y, p.z]).collect();
    if alpha > 0.0 {
        for pair in pts.windows(2) {
            if planar_dist(&pair[0], &pair[1]) == 0.0 {
                return Err(ConvertError::DegenerateKnots);
            }
        }
    }

    let segments = pts.len() - 1;
    let mut out = Vec::with_capacity(1 + segments * points_per_segment as usize);
    out.push(pts[0]);
    for i in 0..segments {
        let window = segment_window(&pts, i);
        for j in 1..=points_per_segment {
            let t = j as f64 / points_per_segment as f64;
            out.push(catmull_rom_point(&window, alpha, t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(x: f64, y: f64) -> ControlPoint {
        ControlPoint {
            x,
            y,
            z: 0.0,
            width: 0.0,
        }
    }

    #[test]
    fn collinear_controls_give_a_straight_spline() {
        let pts = vec![cp(0.0, 0.0), cp(1.0, 0.0), cp(2.0, 0.0), cp(3.0, 0.0)];
        let window = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]];
        let mid = catmull_rom_point(&window, 0.0, 0.5);
        assert!((mid[0] - 1.5).abs() < 1e-12);
        assert!(mid[1].abs() < 1e-12);
        let spline = catmull_rom_spline(&pts, 0.5, 8).unwrap();
        for p in &spline {
            assert!(p[1].abs() < 1e-12);
        }
    }

    #[test]
    fn hand_evaluated_uniform_midpoint() {
        // P0=(0,0) P1=(1,0) P2=(2,1) P3=(3,1), alpha=0, t=0.5 -> (1.5, 0.5)
        let window = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [3.0, 1.0, 0.0]];
        let p = catmull_rom_point(&window, 0.0, 0.5);
        assert!((p[0] - 1.5).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn endpoint_identities() {
        let window = [[0.0, 0.0, 1.0], [1.3, 0.2, 2.0], [2.9, 1.7, 3.0], [3.1, 2.2, 4.0]];
        for alpha in [0.0, 0.5, 1.0] {
            let start = catmull_rom_point(&window, alpha, 0.0);
            let end = catmull_rom_point(&window, alpha, 1.0);
            for c in 0..3 {
                assert!((start[c] - window[1][c]).abs() <= 1e-12);
                assert!((end[c] - window[2][c]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![cp(0.0, 0.0), cp(1.0, 0.0), cp(2.0, 0.0)];
        assert!(matches!(
            catmull_rom_spline(&pts, 0.5, 1),
            Err(ConvertError::TooFewPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn coincident_points_degenerate_for_positive_alpha_only() {
        let pts = vec![cp(0.0, 0.0), cp(1.0, 0.0), cp(1.0, 0.0), cp(2.0, 0.0)];
        assert!(matches!(
            catmull_rom_spline(&pts, 0.5, 1),
            Err(ConvertError::DegenerateKnots)
        ));
        assert!(catmull_rom_spline(&pts, 0.0, 1).is_ok());
    }

    #[test]
    fn sample_count_is_one_plus_segments_times_density() {
        let pts = vec![cp(0.0, 0.0), cp(1.0, 0.3), cp(2.0, -0.1), cp(3.0, 0.4), cp(4.0, 0.0)];
        let spline = catmull_rom_spline(&pts, 0.5, 7).unwrap();
        assert_eq!(spline.len(), 1 + 4 * 7);
    }

    #[test]
    fn density_one_reproduces_control_points() {
        let pts = vec![cp(0.0, 0.0), cp(1.0, 0.5), cp(2.3, 0.9), cp(3.1, 0.4)];
        let spline = catmull_rom_spline(&pts, 0.5, 1).unwrap();
        assert_eq!(spline.len(), pts.len());
        for (s, p) in spline.iter().zip(&pts) {
            assert!((s[0] - p.x).abs() <= 1e-12);
            assert!((s[1] - p.y).abs() <= 1e-12);
        }
    }

    #[test]
    fn invalid_alpha_rejected() {
        let pts = vec![cp(0.0, 0.0), cp(1.0, 0.0), cp(2.0, 0.0), cp(3.0, 0.0)];
        assert!(matches!(
            catmull_rom_spline(&pts, 1.5, 1),
            Err(ConvertError::InvalidAlpha { .. })
        ));
    }
}

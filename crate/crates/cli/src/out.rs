//! Report schemas and float policy for everything the batch driver writes.
//!
//! All floating-point numbers in emitted JSON/CSV/SVG are rounded to 9
//! significant digits first, so re-runs diff byte-identically.

use roadspline::converter::SplineResult;
use roadspline::fidelity::FidelityReport;
use roadspline::resim::{SimOutcome, TraceRow};
use roadspline::validate::ValidityReport;
use serde::Serialize;

/// Round to 9 significant digits. Rounding goes through a decimal literal so
/// the result is the double nearest that literal and its shortest round-trip
/// printing carries at most 9 digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.8e}").parse().expect("9-digit literal parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `<road_id>.spline.json` payload.
#[derive(Debug, Serialize)]
pub struct SplineJson {
    pub road_id: String,
    pub alpha: f64,
    pub points_per_segment: u32,
    pub control_points: Vec<[f64; 4]>,
    pub spline_points: Vec<[f64; 3]>,
}

impl SplineJson {
    pub fn from_result(result: &SplineResult) -> Self {
        Self {
            road_id: result.source_road_id.clone(),
            alpha: sig9(result.alpha),
            points_per_segment: result.points_per_segment,
            control_points: result
                .control_points
                .iter()
                .map(|p| [sig9(p.x), sig9(p.y), sig9(p.z), sig9(p.width)])
                .collect(),
            spline_points: result
                .spline_points
                .iter()
                .map(|p| [sig9(p[0]), sig9(p[1]), sig9(p[2])])
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FidelityJson {
    pub accuracy_percent: f64,
    pub r_squared: Option<f64>,
    pub avg_distance: f64,
    pub max_possible_error: f64,
    pub n_original: usize,
    pub n_spline: usize,
}

impl FidelityJson {
    pub fn from_report(report: &FidelityReport) -> Self {
        Self {
            accuracy_percent: sig9(report.accuracy_percent),
            r_squared: report.r_squared.map(sig9),
            avg_distance: sig9(report.avg_distance),
            max_possible_error: sig9(report.max_possible_error),
            n_original: report.n_original,
            n_spline: report.n_spline,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValidityJson {
    pub valid: bool,
    pub endpoint_distance: f64,
    pub bbox_width: f64,
    pub bbox_height: f64,
    pub self_intersections: usize,
    pub failed_criteria: Vec<String>,
}

impl ValidityJson {
    pub fn from_report(report: &ValidityReport) -> Self {
        Self {
            valid: report.valid,
            endpoint_distance: sig9(report.endpoint_distance),
            bbox_width: sig9(report.bbox_width),
            bbox_height: sig9(report.bbox_height),
            self_intersections: report.self_intersections,
            failed_criteria: report
                .failed_criteria
                .iter()
                .map(|c| c.name().to_string())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimJson {
    pub passed: bool,
    pub reason: String,
    pub oob_position: Option<[f64; 2]>,
    pub steps: usize,
    pub max_lateral_deviation: f64,
}

impl SimJson {
    pub fn from_outcome(outcome: &SimOutcome) -> Self {
        Self {
            passed: outcome.passed,
            reason: outcome.reason.name().to_string(),
            oob_position: outcome.oob_position.map(|(x, y)| [sig9(x), sig9(y)]),
            steps: outcome.steps,
            max_lateral_deviation: sig9(outcome.max_lateral_deviation),
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct WarningsJson {
    pub parse_skipped_elements: usize,
    pub truncated_pairs: usize,
    pub clamped_widths: u32,
    pub deduped_points: usize,
    pub continuity_breaks: usize,
}

/// `<road_id>.report.json` payload.
#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub road_id: String,
    pub campaign: String,
    pub source: String,
    pub converted: bool,
    pub error: Option<String>,
    pub fidelity: Option<FidelityJson>,
    pub validity: Option<ValidityJson>,
    pub sim: Option<SimJson>,
    pub warnings: WarningsJson,
}

pub fn to_json_file(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    text
}

/// Trace CSV with the columns (t, x, y, heading, steer_deg, lateral_dev).
pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("t,x,y,heading,steer_deg,lateral_dev\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig9(row.t),
            sig9(row.x),
            sig9(row.y),
            sig9(row.heading),
            sig9(row.steer_deg),
            sig9(row.lateral_dev)
        ));
    }
    out
}

/// Quote a CSV field only when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

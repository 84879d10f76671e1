//! SVG rendering of a converted road: the spline polyline with its control
//! points, plus an optional out-of-bounds marker.

use crate::out::sig9;
use roadspline::converter::SplineResult;
use thiserror::Error;

#[derive(Debug, Default, Clone, Copy)]
pub struct Overlays {
    pub oob_position: Option<(f64, f64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("need at least 2 spline points to render, got {points}")]
    TooShort { points: usize },
}

/// Render a deterministic standalone SVG document. The viewBox fits the
/// bounding box of all drawn geometry plus a 5% margin; y is flipped so the
/// road appears in conventional orientation.
pub fn render_svg(result: &SplineResult, overlays: &Overlays) -> Result<String, RenderError> {
    if result.spline_points.len() < 2 {
        return Err(RenderError::TooShort {
            points: result.spline_points.len(),
        });
    }

    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |x: f64, y: f64| {
        min.0 = min.0.min(x);
        min.1 = min.1.min(y);
        max.0 = max.0.max(x);
        max.1 = max.1.max(y);
    };
    for p in &result.spline_points {
        grow(p[0], -p[1]);
    }
    for p in &result.control_points {
        grow(p.x, -p.y);
    }
    if let Some((x, y)) = overlays.oob_position {
        grow(x, -y);
    }

    let span = (max.0 - min.0).max(max.1 - min.1).max(1.0);
    let margin = 0.05 * span;
    let view = (
        sig9(min.0 - margin),
        sig9(min.1 - margin),
        sig9(max.0 - min.0 + 2.0 * margin),
        sig9(max.1 - min.1 + 2.0 * margin),
    );
    let stroke = sig9((0.004 * span).max(0.05));
    let dot = sig9((0.008 * span).max(0.1));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\">\n",
        view.0, view.1, view.2, view.3
    ));

    let points: Vec<String> = result
        .spline_points
        .iter()
        .map(|p| format!("{},{}", sig9(p[0]), sig9(-p[1])))
        .collect();
    svg.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"#e6b412\" stroke-width=\"{}\" points=\"{}\"/>\n",
        stroke,
        points.join(" ")
    ));

    for p in &result.control_points {
        svg.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#c0392b\"/>\n",
            sig9(p.x),
            sig9(-p.y),
            dot
        ));
    }

    if let Some((x, y)) = overlays.oob_position {
        let (x, y) = (sig9(x), sig9(-y));
        let arm = sig9(2.0 * dot);
        svg.push_str(&format!(
            "  <path stroke=\"#000000\" stroke-width=\"{stroke}\" d=\"M {} {} L {} {} M {} {} L {} {}\"/>\n",
            sig9(x - arm),
            sig9(y - arm),
            sig9(x + arm),
            sig9(y + arm),
            sig9(x - arm),
            sig9(y + arm),
            sig9(x + arm),
            sig9(y - arm),
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

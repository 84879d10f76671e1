//! Scenario loading and OpenDRIVE (.xodr) parsing.
//!
//! Inputs are either standalone `.xodr` files or JSON scenario files that
//! embed the OpenDRIVE document as a string field. Parsing targets the
//! road-geometry subset of OpenDRIVE 1.4/1.6: plan-view geometry, elevation
//! profiles, and lane-section widths. Everything else (objects, signals,
//! junctions, road marks, ...) is skipped and counted as a warning.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// A parsed OpenDRIVE document reduced to the supported subset.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    /// File name or scenario/road identifier the network came from.
    pub source_id: String,
    pub roads: Vec<Road>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Road {
    pub id: String,
    /// Total length in meters. Reconstructed from the plan view when the
    /// attribute is missing.
    pub length: f64,
    /// Reference-line primitives ordered by strictly increasing `s`.
    pub plan_view: Vec<GeometrySegment>,
    /// Elevation records ordered by strictly increasing `s_elev`. May be empty.
    pub elevation_profile: Vec<ElevationSegment>,
    /// Lane sections ordered by strictly increasing `s_start`. Never empty
    /// after a successful parse.
    pub lane_sections: Vec<LaneSection>,
}

/// One reference-line primitive with its start pose and arc-length range.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySegment {
    /// Arc length along the road at which this segment starts.
    pub s: f64,
    pub x: f64,
    pub y: f64,
    /// Start heading in radians. Stored as given; normalized only on output.
    pub hdg: f64,
    pub length: f64,
    pub shape: SegmentShape,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentShape {
    Line,
    Arc {
        curvature: f64,
    },
    /// Clothoid: curvature ramps linearly from `curv_start` to `curv_end`.
    Spiral {
        curv_start: f64,
        curv_end: f64,
    },
    Poly3 {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    ParamPoly3 {
        au: f64,
        bu: f64,
        cu: f64,
        du: f64,
        av: f64,
        bv: f64,
        cv: f64,
        dv: f64,
        p_range: ParamRange,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRange {
    ArcLength,
    Normalized,
}

/// Cubic elevation record: z = a + b*ds + c*ds^2 + d*ds^3 with ds = s - s_elev.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationSegment {
    pub s_elev: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneSection {
    pub s_start: f64,
    /// Lanes with positive IDs, as listed in the document.
    pub left_lanes: Vec<Lane>,
    /// Lanes with negative IDs, as listed in the document.
    pub right_lanes: Vec<Lane>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    /// Signed lane ID; 0 is the implicit center lane and never stored here.
    pub id: i32,
    pub lane_type: String,
    /// Width records ordered by strictly increasing `s_offset`.
    pub width_polys: Vec<WidthPoly>,
}

/// Cubic lane-width record, evaluated at ds = (s - section start) - s_offset.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthPoly {
    pub s_offset: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// How `load_scenario` should interpret its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceFormat {
    /// Decide from the file extension, falling back to content sniffing.
    #[default]
    Auto,
    Xodr,
    Json,
}

/// Default JSON pointer to the embedded OpenDRIVE text in scenario files.
pub const DEFAULT_JSON_POINTER: &str = "/OpenDRIVE";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("invalid JSON: {0}")]
    BadJson(#[from] serde_json::Error),
    #[error("JSON pointer {pointer:?} did not resolve to a field")]
    MissingField { pointer: String },
    #[error("JSON pointer {pointer:?} resolved to a non-string value")]
    NotText { pointer: String },
}

/// Line/column position inside the source document, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextAt {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for TextAt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed XML: {detail}")]
    MalformedXml { detail: String },
    #[error("document contains no road elements")]
    NoRoads,
    #[error("duplicate road id {road:?}")]
    DuplicateRoadId { road: String },
    #[error("road {road:?} has no planView")]
    MissingPlanView { road: String },
    #[error("road {road:?}: geometry at {at} has no recognized shape child")]
    UnknownGeometry { road: String, at: TextAt },
    #[error("road {road:?}: <{element}> at {at}: attribute {attribute:?} is {value:?} (expected a finite number)")]
    BadAttribute {
        road: String,
        element: String,
        attribute: String,
        value: String,
        at: TextAt,
    },
    #[error("road {road:?}: <{element}> at {at} is missing attribute {attribute:?}")]
    MissingAttribute {
        road: String,
        element: String,
        attribute: String,
        at: TextAt,
    },
    #[error("road {road:?}: <{element}> entries must have strictly increasing {attribute} (violated at {at})")]
    UnorderedEntries {
        road: String,
        element: String,
        attribute: String,
        at: TextAt,
    },
    #[error("road {road:?}: geometry at s={s} ends at {s_end} which exceeds road length {road_length}")]
    SegmentOverrun {
        road: String,
        s: f64,
        s_end: f64,
        road_length: f64,
    },
    #[error("road {road:?}: lane id {lane} is not valid for the {side} side (at {at})")]
    BadLaneId {
        road: String,
        lane: i32,
        side: &'static str,
        at: TextAt,
    },
}

/// Counts of document content that was recognized but intentionally skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseWarnings {
    /// Total number of skipped XML elements.
    pub skipped_elements: usize,
    /// Skipped element occurrences keyed by tag name.
    pub skipped_by_name: BTreeMap<String, usize>,
}

impl ParseWarnings {
    fn skip(&mut self, name: &str) {
        self.skipped_elements += 1;
        *self.skipped_by_name.entry(name.to_string()).or_insert(0) += 1;
    }
}

/// Result of `parse_xodr`: the network plus skip-warning counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseOutput {
    pub network: RoadNetwork,
    pub warnings: ParseWarnings,
}

/// Load a scenario file and return the embedded OpenDRIVE XML text.
///
/// `.xodr` inputs pass through unchanged; JSON inputs are resolved with
/// `json_pointer` which must point at a string value.
pub fn load_scenario(
    path: &Path,
    format: SourceFormat,
    json_pointer: &str,
) -> Result<String, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let format = match format {
        SourceFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("xodr") || ext.eq_ignore_ascii_case("xml") => {
                SourceFormat::Xodr
            }
            Some(ext) if ext.eq_ignore_ascii_case("json") => SourceFormat::Json,
            _ => SourceFormat::Auto,
        },
        other => other,
    };
    load_scenario_bytes(&bytes, format, json_pointer)
}

/// In-memory variant of [`load_scenario`]. With `SourceFormat::Auto` the
/// content is sniffed: a leading `<` means raw XML, anything else is JSON.
pub fn load_scenario_bytes(
    bytes: &[u8],
    format: SourceFormat,
    json_pointer: &str,
) -> Result<String, LoadError> {
    let text = std::str::from_utf8(bytes).map_err(|_| LoadError::NotUtf8)?;
    let format = match format {
        SourceFormat::Auto => {
            let first = text.trim_start_matches('\u{feff}').trim_start();
            if first.starts_with('<') {
                SourceFormat::Xodr
            } else {
                SourceFormat::Json
            }
        }
        other => other,
    };
    match format {
        SourceFormat::Xodr => Ok(text.to_string()),
        SourceFormat::Json => {
            let value: serde_json::Value = serde_json::from_str(text)?;
            let field = value
                .pointer(json_pointer)
                .ok_or_else(|| LoadError::MissingField {
                    pointer: json_pointer.to_string(),
                })?;
            match field.as_str() {
                Some(s) => Ok(s.to_string()),
                None => Err(LoadError::NotText {
                    pointer: json_pointer.to_string(),
                }),
            }
        }
        SourceFormat::Auto => unreachable!(),
    }
}

/// Tolerance for a segment end overshooting the declared road length.
const LENGTH_TOL: f64 = 1e-6;

/// Parse OpenDRIVE XML into the supported road-geometry subset.
pub fn parse_xodr(xml: &str, source_id: impl Into<String>) -> Result<ParseOutput, ParseError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| ParseError::MalformedXml {
        detail: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "OpenDRIVE" {
        return Err(ParseError::MalformedXml {
            detail: format!(
                "root element is <{}>, expected <OpenDRIVE>",
                root.tag_name().name()
            ),
        });
    }

    let cx = Cx { doc: &doc };
    let mut warnings = ParseWarnings::default();
    let mut roads = Vec::new();
    for child in root.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "header" => {} // recognized, intentionally ignored
            "road" => roads.push(parse_road(&cx, child, &mut warnings)?),
            other => warnings.skip(other),
        }
    }
    if roads.is_empty() {
        return Err(ParseError::NoRoads);
    }
    for i in 1..roads.len() {
        if roads[..i].iter().any(|r: &Road| r.id == roads[i].id) {
            return Err(ParseError::DuplicateRoadId {
                road: roads[i].id.clone(),
            });
        }
    }

    Ok(ParseOutput {
        network: RoadNetwork {
            source_id: source_id.into(),
            roads,
        },
        warnings,
    })
}

struct Cx<'a> {
    doc: &'a roxmltree::Document<'a>,
}

impl Cx<'_> {
    fn at(&self, node: roxmltree::Node) -> TextAt {
        let pos = self.doc.text_pos_at(node.range().start);
        TextAt {
            line: pos.row,
            col: pos.col,
        }
    }

    fn req_f64(&self, node: roxmltree::Node, road: &str, attr: &str) -> Result<f64, ParseError> {
        match node.attribute(attr) {
            None => Err(ParseError::MissingAttribute {
                road: road.to_string(),
                element: node.tag_name().name().to_string(),
                attribute: attr.to_string(),
                at: self.at(node),
            }),
            Some(raw) => match raw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(ParseError::BadAttribute {
                    road: road.to_string(),
                    element: node.tag_name().name().to_string(),
                    attribute: attr.to_string(),
                    value: raw.to_string(),
                    at: self.at(node),
                }),
            },
        }
    }

    fn opt_f64(
        &self,
        node: roxmltree::Node,
        road: &str,
        attr: &str,
    ) -> Result<Option<f64>, ParseError> {
        if node.attribute(attr).is_none() {
            return Ok(None);
        }
        self.req_f64(node, road, attr).map(Some)
    }

    fn req_i32(&self, node: roxmltree::Node, road: &str, attr: &str) -> Result<i32, ParseError> {
        let raw = node
            .attribute(attr)
            .ok_or_else(|| ParseError::MissingAttribute {
                road: road.to_string(),
                element: node.tag_name().name().to_string(),
                attribute: attr.to_string(),
                at: self.at(node),
            })?;
        raw.trim()
            .parse::<i32>()
            .map_err(|_| ParseError::BadAttribute {
                road: road.to_string(),
                element: node.tag_name().name().to_string(),
                attribute: attr.to_string(),
                value: raw.to_string(),
                at: self.at(node),
            })
    }
}

fn parse_road(
    cx: &Cx,
    node: roxmltree::Node,
    warnings: &mut ParseWarnings,
) -> Result<Road, ParseError> {
    let id = node.attribute("id").unwrap_or("").to_string();
    let declared_length = cx.opt_f64(node, &id, "length")?;

    let mut plan_view: Option<Vec<GeometrySegment>> = None;
    let mut elevation_profile = Vec::new();
    let mut lane_sections = Vec::new();

    for child in node.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "planView" => plan_view = Some(parse_plan_view(cx, child, &id, warnings)?),
            "elevationProfile" => {
                elevation_profile = parse_elevation_profile(cx, child, &id, warnings)?
            }
            "lanes" => lane_sections = parse_lanes(cx, child, &id, warnings)?,
            other => warnings.skip(other),
        }
    }

    let plan_view = plan_view.ok_or_else(|| ParseError::MissingPlanView { road: id.clone() })?;

    check_strictly_increasing(&id, "geometry", "s", plan_view.iter().map(|g| g.s), || {
        cx.at(node)
    })?;
    check_strictly_increasing(
        &id,
        "elevation",
        "s",
        elevation_profile.iter().map(|e| e.s_elev),
        || cx.at(node),
    )?;
    check_strictly_increasing(
        &id,
        "laneSection",
        "s",
        lane_sections.iter().map(|l| l.s_start),
        || cx.at(node),
    )?;

    // Reconstruct a missing length from the plan-view extent.
    let geometric_end = plan_view
        .iter()
        .map(|g| g.s + g.length)
        .fold(0.0_f64, f64::max);
    let length = declared_length.unwrap_or(geometric_end);

    for seg in &plan_view {
        let s_end = seg.s + seg.length;
        if s_end > length + LENGTH_TOL {
            return Err(ParseError::SegmentOverrun {
                road: id,
                s: seg.s,
                s_end,
                road_length: length,
            });
        }
    }

    Ok(Road {
        id,
        length,
        plan_view,
        elevation_profile,
        lane_sections,
    })
}

fn check_strictly_increasing(
    road: &str,
    element: &str,
    attribute: &str,
    values: impl Iterator<Item = f64>,
    at: impl Fn() -> TextAt,
) -> Result<(), ParseError> {
    let mut prev: Option<f64> = None;
    for v in values {
        if let Some(p) = prev {
            if v <= p {
                return Err(ParseError::UnorderedEntries {
                    road: road.to_string(),
                    element: element.to_string(),
                    attribute: attribute.to_string(),
                    at: at(),
                });
            }
        }
        prev = Some(v);
    }
    Ok(())
}

fn parse_plan_view(
    cx: &Cx,
    node: roxmltree::Node,
    road: &str,
    warnings: &mut ParseWarnings,
) -> Result<Vec<GeometrySegment>, ParseError> {
    let mut segments = Vec::new();
    for child in node.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "geometry" => segments.push(parse_geometry(cx, child, road, warnings)?),
            other => warnings.skip(other),
        }
    }
    Ok(segments)
}

fn parse_geometry(
    cx: &Cx,
    node: roxmltree::Node,
    road: &str,
    warnings: &mut ParseWarnings,
) -> Result<GeometrySegment, ParseError> {
    let s = cx.req_f64(node, road, "s")?;
    let x = cx.req_f64(node, road, "x")?;
    let y = cx.req_f64(node, road, "y")?;
    let hdg = cx.req_f64(node, road, "hdg")?;
    let length = cx.req_f64(node, road, "length")?;
    if length <= 0.0 {
        return Err(ParseError::BadAttribute {
            road: road.to_string(),
            element: "geometry".to_string(),
            attribute: "length".to_string(),
            value: length.to_string(),
            at: cx.at(node),
        });
    }

    let mut shape = None;
    for child in node.children().filter(|n| n.is_element()) {
        let parsed = match child.tag_name().name() {
            "line" => Some(SegmentShape::Line),
            "arc" => Some(SegmentShape::Arc {
                curvature: cx.req_f64(child, road, "curvature")?,
            }),
            "spiral" => Some(SegmentShape::Spiral {
                curv_start: cx.req_f64(child, road, "curvStart")?,
                curv_end: cx.req_f64(child, road, "curvEnd")?,
            }),
            "poly3" => Some(SegmentShape::Poly3 {
                a: cx.req_f64(child, road, "a")?,
                b: cx.req_f64(child, road, "b")?,
                c: cx.req_f64(child, road, "c")?,
                d: cx.req_f64(child, road, "d")?,
            }),
            "paramPoly3" => Some(SegmentShape::ParamPoly3 {
                au: cx.req_f64(child, road, "aU")?,
                bu: cx.req_f64(child, road, "bU")?,
                cu: cx.req_f64(child, road, "cU")?,
                du: cx.req_f64(child, road, "dU")?,
                av: cx.req_f64(child, road, "aV")?,
                bv: cx.req_f64(child, road, "bV")?,
                cv: cx.req_f64(child, road, "cV")?,
                dv: cx.req_f64(child, road, "dV")?,
                p_range: match child.attribute("pRange") {
                    Some("normalized") => ParamRange::Normalized,
                    _ => ParamRange::ArcLength,
                },
            }),
            other => {
                warnings.skip(other);
                None
            }
        };
        if let Some(parsed) = parsed {
            if shape.is_none() {
                shape = Some(parsed);
            } else {
                warnings.skip(child.tag_name().name());
            }
        }
    }

    let shape = shape.ok_or_else(|| ParseError::UnknownGeometry {
        road: road.to_string(),
        at: cx.at(node),
    })?;

    Ok(GeometrySegment {
        s,
        x,
        y,
        hdg,
        length,
        shape,
    })
}

fn parse_elevation_profile(
    cx: &Cx,
    node: roxmltree::Node,
    road: &str,
    warnings: &mut ParseWarnings,
) -> Result<Vec<ElevationSegment>, ParseError> {
    let mut segments = Vec::new();
    for child in node.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "elevation" => segments.push(ElevationSegment {
                s_elev: cx.req_f64(child, road, "s")?,
                a: cx.req_f64(child, road, "a")?,
                b: cx.req_f64(child, road, "b")?,
                c: cx.req_f64(child, road, "c")?,
                d: cx.req_f64(child, road, "d")?,
            }),
            other => warnings.skip(other),
        }
    }
    Ok(segments)
}

fn parse_lanes(
    cx: &Cx,
    node: roxmltree::Node,
    road: &str,
    warnings: &mut ParseWarnings,
) -> Result<Vec<LaneSection>, ParseError> {
    let mut sections = Vec::new();
    for child in node.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "laneSection" => sections.push(parse_lane_section(cx, child, road, warnings)?),
            other => warnings.skip(other),
        }
    }
    Ok(sections)
}

fn parse_lane_section(
    cx: &Cx,
    node: roxmltree::Node,
    road: &str,
    warnings: &mut ParseWarnings,
) -> Result<LaneSection, ParseError> {
    let s_start = cx.req_f64(node, road, "s")?;
    let mut left_lanes = Vec::new();
    let mut right_lanes = Vec::new();

    for group in node.children().filter(|n| n.is_element()) {
        let side = group.tag_name().name();
        match side {
            "left" | "center" | "right" => {
                for lane_node in group.children().filter(|n| n.is_element()) {
                    if lane_node.tag_name().name() != "lane" {
                        warnings.skip(lane_node.tag_name().name());
                        continue;
                    }
                    let lane = parse_lane(cx, lane_node, road, warnings)?;
                    match side {
                        "left" => {
                            if lane.id <= 0 {
                                return Err(ParseError::BadLaneId {
                                    road: road.to_string(),
                                    lane: lane.id,
                                    side: "left",
                                    at: cx.at(lane_node),
                                });
                            }
                            if left_lanes.iter().any(|l: &Lane| l.id == lane.id) {
                                return Err(ParseError::BadLaneId {
                                    road: road.to_string(),
                                    lane: lane.id,
                                    side: "left",
                                    at: cx.at(lane_node),
                                });
                            }
                            left_lanes.push(lane);
                        }
                        "right" => {
                            if lane.id >= 0 {
                                return Err(ParseError::BadLaneId {
                                    road: road.to_string(),
                                    lane: lane.id,
                                    side: "right",
                                    at: cx.at(lane_node),
                                });
                            }
                            if right_lanes.iter().any(|l: &Lane| l.id == lane.id) {
                                return Err(ParseError::BadLaneId {
                                    road: road.to_string(),
                                    lane: lane.id,
                                    side: "right",
                                    at: cx.at(lane_node),
                                });
                            }
                            right_lanes.push(lane);
                        }
                        // The center lane is implicit in the model; its width
                        // never contributes, so the record is dropped.
                        _ => {
                            if lane.id != 0 {
                                return Err(ParseError::BadLaneId {
                                    road: road.to_string(),
                                    lane: lane.id,
                                    side: "center",
                                    at: cx.at(lane_node),
                                });
                            }
                        }
                    }
                }
            }
            other => warnings.skip(other),
        }
    }

    Ok(LaneSection {
        s_start,
        left_lanes,
        right_lanes,
    })
}

fn parse_lane(
    cx: &Cx,
    node: roxmltree::Node,
    road: &str,
    warnings: &mut ParseWarnings,
) -> Result<Lane, ParseError> {
    let id = cx.req_i32(node, road, "id")?;
    let lane_type = node.attribute("type").unwrap_or("driving").to_string();
    let mut width_polys = Vec::new();
    for child in node.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "width" => width_polys.push(WidthPoly {
                s_offset: cx.req_f64(child, road, "sOffset")?,
                a: cx.req_f64(child, road, "a")?,
                b: cx.req_f64(child, road, "b")?,
                c: cx.req_f64(child, road, "c")?,
                d: cx.req_f64(child, road, "d")?,
            }),
            other => warnings.skip(other),
        }
    }
    check_strictly_increasing(
        road,
        "width",
        "sOffset",
        width_polys.iter().map(|w| w.s_offset),
        || cx.at(node),
    )?;
    Ok(Lane {
        id,
        lane_type,
        width_polys,
    })
}

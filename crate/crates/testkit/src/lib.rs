//! Synthetic roads and labeled fixtures for tests and benchmarks.
//!
//! Everything here is deterministic: corpora are seeded, fixture sets are
//! hand-constructed, and the xodr writer emits shortest round-trip floats so
//! parsing a generated document recovers the exact values.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use roadspline::converter::{ControlPoint, SplineResult};
use roadspline::geometry::eval_reference_line;
use roadspline::ingest::{
    ElevationSegment, GeometrySegment, Lane, LaneSection, ParamRange, Road, RoadNetwork,
    SegmentShape, WidthPoly,
};

/// Serialize a network back to OpenDRIVE XML, covering exactly the subset
/// the parser understands.
pub fn network_to_xodr(network: &RoadNetwork) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" standalone=\"yes\"?>\n<OpenDRIVE>\n");
    out.push_str("  <header revMajor=\"1\" revMinor=\"6\"/>\n");
    for road in &network.roads {
        out.push_str(&format!(
            "  <road id=\"{}\" length=\"{}\">\n    <planView>\n",
            xml_escape(&road.id),
            road.length
        ));
        for seg in &road.plan_view {
            out.push_str(&format!(
                "      <geometry s=\"{}\" x=\"{}\" y=\"{}\" hdg=\"{}\" length=\"{}\">",
                seg.s, seg.x, seg.y, seg.hdg, seg.length
            ));
            match &seg.shape {
                SegmentShape::Line => out.push_str("<line/>"),
                SegmentShape::Arc { curvature } => {
                    out.push_str(&format!("<arc curvature=\"{curvature}\"/>"))
                }
                SegmentShape::Spiral {
                    curv_start,
                    curv_end,
                } => out.push_str(&format!(
                    "<spiral curvStart=\"{curv_start}\" curvEnd=\"{curv_end}\"/>"
                )),
                SegmentShape::Poly3 { a, b, c, d } => out.push_str(&format!(
                    "<poly3 a=\"{a}\" b=\"{b}\" c=\"{c}\" d=\"{d}\"/>"
                )),
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
                    let range = match p_range {
                        ParamRange::ArcLength => "arcLength",
                        ParamRange::Normalized => "normalized",
                    };
                    out.push_str(&format!(
                        "<paramPoly3 aU=\"{au}\" bU=\"{bu}\" cU=\"{cu}\" dU=\"{du}\" aV=\"{av}\" bV=\"{bv}\" cV=\"{cv}\" dV=\"{dv}\" pRange=\"{range}\"/>"
                    ))
                }
            }
            out.push_str("</geometry>\n");
        }
        out.push_str("    </planView>\n");
        if !road.elevation_profile.is_empty() {
            out.push_str("    <elevationProfile>\n");
            for e in &road.elevation_profile {
                out.push_str(&format!(
                    "      <elevation s=\"{}\" a=\"{}\" b=\"{}\" c=\"{}\" d=\"{}\"/>\n",
                    e.s_elev, e.a, e.b, e.c, e.d
                ));
            }
            out.push_str("    </elevationProfile>\n");
        }
        out.push_str("    <lanes>\n");
        for section in &road.lane_sections {
            out.push_str(&format!(
                "      <laneSection s=\"{}\">\n",
                section.s_start
            ));
            if !section.left_lanes.is_empty() {
                out.push_str("        <left>\n");
                for lane in &section.left_lanes {
                    write_lane(&mut out, lane);
                }
                out.push_str("        </left>\n");
            }
            out.push_str("        <center>\n          <lane id=\"0\" type=\"none\"/>\n        </center>\n");
            if !section.right_lanes.is_empty() {
                out.push_str("        <right>\n");
                for lane in &section.right_lanes {
                    write_lane(&mut out, lane);
                }
                out.push_str("        </right>\n");
            }
            out.push_str("      </laneSection>\n");
        }
        out.push_str("    </lanes>\n  </road>\n");
    }
    out.push_str("</OpenDRIVE>\n");
    out
}

fn write_lane(out: &mut String, lane: &Lane) {
    out.push_str(&format!(
        "          <lane id=\"{}\" type=\"{}\">\n",
        lane.id,
        xml_escape(&lane.lane_type)
    ));
    for w in &lane.width_polys {
        out.push_str(&format!(
            "            <width sOffset=\"{}\" a=\"{}\" b=\"{}\" c=\"{}\" d=\"{}\"/>\n",
            w.s_offset, w.a, w.b, w.c, w.d
        ));
    }
    out.push_str("          </lane>\n");
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Wrap an OpenDRIVE document in a scenario JSON file under `/OpenDRIVE`.
pub fn as_scenario_json(road_id: &str, xodr: &str) -> String {
    let mut obj = String::from("{");
    obj.push_str(&format!("\"road_id\":{},", json_string(road_id)));
    obj.push_str(&format!("\"OpenDRIVE\":{}", json_string(xodr)));
    obj.push('}');
    obj
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Chainable synthetic road builder. Segment start poses are propagated from
/// the previous segment's end, so the plan view is always continuous.
pub struct RoadBuilder {
    id: String,
    segments: Vec<GeometrySegment>,
    cursor: (f64, f64, f64), // x, y, hdg
    s: f64,
    left_lanes: Vec<Lane>,
    right_lanes: Vec<Lane>,
    elevation: Vec<ElevationSegment>,
}

impl RoadBuilder {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            segments: Vec::new(),
            cursor: (0.0, 0.0, 0.0),
            s: 0.0,
            left_lanes: Vec::new(),
            right_lanes: Vec::new(),
            elevation: Vec::new(),
        }
    }

    pub fn start_at(mut self, x: f64, y: f64, hdg: f64) -> Self {
        assert!(self.segments.is_empty(), "set the start before any segment");
        self.cursor = (x, y, hdg);
        self
    }

    fn push(mut self, shape: SegmentShape, length: f64) -> Self {
        let seg = GeometrySegment {
            s: self.s,
            x: self.cursor.0,
            y: self.cursor.1,
            hdg: self.cursor.2,
            length,
            shape,
        };
        let end = eval_reference_line(&seg, length).expect("builder segment evaluates");
        self.cursor = (end.x, end.y, end.hdg);
        self.s += length;
        self.segments.push(seg);
        self
    }

    pub fn line(self, length: f64) -> Self {
        self.push(SegmentShape::Line, length)
    }

    pub fn arc(self, length: f64, curvature: f64) -> Self {
        self.push(SegmentShape::Arc { curvature }, length)
    }

    pub fn spiral(self, length: f64, curv_start: f64, curv_end: f64) -> Self {
        self.push(
            SegmentShape::Spiral {
                curv_start,
                curv_end,
            },
            length,
        )
    }

    pub fn left_lane(mut self, width: f64) -> Self {
        let id = self.left_lanes.len() as i32 + 1;
        self.left_lanes.push(const_lane(id, width));
        self
    }

    pub fn right_lane(mut self, width: f64) -> Self {
        let id = -(self.right_lanes.len() as i32 + 1);
        self.right_lanes.push(const_lane(id, width));
        self
    }

    pub fn elevation(mut self, s_elev: f64, a: f64, b: f64, c: f64, d: f64) -> Self {
        self.elevation.push(ElevationSegment { s_elev, a, b, c, d });
        self
    }

    pub fn build_road(self) -> Road {
        Road {
            id: self.id,
            length: self.s,
            plan_view: self.segments,
            elevation_profile: self.elevation,
            lane_sections: vec![LaneSection {
                s_start: 0.0,
                left_lanes: self.left_lanes,
                right_lanes: self.right_lanes,
            }],
        }
    }

    pub fn build_network(self) -> RoadNetwork {
        let id = self.id.clone();
        RoadNetwork {
            source_id: id,
            roads: vec![self.build_road()],
        }
    }

    pub fn build_xodr(self) -> String {
        network_to_xodr(&self.build_network())
    }
}

fn const_lane(id: i32, width: f64) -> Lane {
    Lane {
        id,
        lane_type: "driving".to_string(),
        width_polys: vec![WidthPoly {
            s_offset: 0.0,
            a: width,
            b: 0.0,
            c: 0.0,
            d: 0.0,
        }],
    }
}

/// A named synthetic road document.
#[derive(Debug, Clone)]
pub struct NamedRoad {
    pub name: String,
    pub xodr: String,
}

/// Deterministic corpus of well-formed synthetic roads mixing line, arc, and
/// spiral segments with 1-3 lanes per side and optional elevation.
pub fn synthetic_corpus(seed: u64, count: usize) -> Vec<NamedRoad> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64));
            let name = format!("synthetic_{i:04}");
            let mut builder = RoadBuilder::new(&name);

            let segments = rng.random_range(4..=10);
            let mut curvature: f64 = 0.0;
            for _ in 0..segments {
                let length = rng.random_range(20.0..80.0);
                match rng.random_range(0..10) {
                    0..=3 => {
                        builder = builder.line(length);
                        curvature = 0.0;
                    }
                    4..=6 => {
                        curvature = rng.random_range(-0.02..0.02);
                        builder = builder.arc(length, curvature);
                    }
                    _ => {
                        let target = rng.random_range(-0.02..0.02);
                        builder = builder.spiral(length, curvature, target);
                        curvature = target;
                    }
                }
            }

            for _ in 0..rng.random_range(1..=3) {
                builder = builder.left_lane(rng.random_range(3.0..4.5));
            }
            for _ in 0..rng.random_range(1..=3) {
                builder = builder.right_lane(rng.random_range(3.0..4.5));
            }
            if rng.random_bool(0.5) {
                builder = builder.elevation(
                    0.0,
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-0.02..0.02),
                    rng.random_range(-1e-4..1e-4),
                    0.0,
                );
            }

            NamedRoad {
                name,
                xodr: builder.build_xodr(),
            }
        })
        .collect()
}

/// Build a spline result directly from a polyline, one spline point per
/// control point.
pub fn polyline_spline(id: &str, points: &[(f64, f64)], width: f64) -> SplineResult {
    SplineResult {
        control_points: points
            .iter()
            .map(|&(x, y)| ControlPoint {
                x,
                y,
                z: 0.0,
                width,
            })
            .collect(),
        spline_points: points.iter().map(|&(x, y)| [x, y, 0.0]).collect(),
        alpha: 0.5,
        points_per_segment: 1,
        source_road_id: id.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedValidity {
    Valid,
    FailsEndpoints,
    FailsBbox,
    FailsSelfIntersection,
}

#[derive(Debug, Clone)]
pub struct ValidityFixture {
    pub name: String,
    pub spline: SplineResult,
    pub expected: ExpectedValidity,
}

/// Labeled validity fixtures: 10 valid controls plus 10 roads per failure
/// mode, each failing exactly one criterion.
pub fn validity_fixtures() -> Vec<ValidityFixture> {
    let mut fixtures = Vec::new();

    for k in 0..10 {
        // Gentle sine road, well inside the box, endpoints far apart.
        let amp = 5.0 + 2.0 * k as f64;
        let pts: Vec<(f64, f64)> = (0..=60)
            .map(|j| {
                let x = 3.0 * j as f64;
                (x, amp * (x / 40.0).sin())
            })
            .collect();
        fixtures.push(ValidityFixture {
            name: format!("valid_{k:02}"),
            spline: polyline_spline(&format!("valid_{k:02}"), &pts, 8.0),
            expected: ExpectedValidity::Valid,
        });
    }

    for k in 0..10 {
        // Closed circle: first and last point coincide.
        let r = 12.0 + 3.0 * k as f64;
        let n = 36;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|j| {
                let ang = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                (r * ang.cos(), r * ang.sin())
            })
            .collect();
        fixtures.push(ValidityFixture {
            name: format!("loop_{k:02}"),
            spline: polyline_spline(&format!("loop_{k:02}"), &pts, 8.0),
            expected: ExpectedValidity::FailsEndpoints,
        });
    }

    for k in 0..10 {
        // Straight road longer than the box limit.
        let len = 260.0 + 15.0 * k as f64;
        let n = 20;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|j| {
                let d = len * j as f64 / n as f64;
                if k % 2 == 0 {
                    (d, 0.3 * j as f64)
                } else {
                    (0.3 * j as f64, d)
                }
            })
            .collect();
        fixtures.push(ValidityFixture {
            name: format!("oversize_{k:02}"),
            spline: polyline_spline(&format!("oversize_{k:02}"), &pts, 8.0),
            expected: ExpectedValidity::FailsBbox,
        });
    }

    for k in 0..10 {
        // Figure eight: one proper crossing, inside the box, open ends.
        let l = 40.0 + 5.0 * k as f64;
        let pts = vec![(0.0, 0.0), (l, l), (l, 0.0), (0.0, l)];
        fixtures.push(ValidityFixture {
            name: format!("crossing_{k:02}"),
            spline: polyline_spline(&format!("crossing_{k:02}"), &pts, 8.0),
            expected: ExpectedValidity::FailsSelfIntersection,
        });
    }

    fixtures
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedSim {
    Pass,
    OutOfBounds,
    InvalidRoad,
}

#[derive(Debug, Clone)]
pub struct SimFixture {
    pub name: String,
    pub spline: SplineResult,
    pub expected: ExpectedSim,
}

/// Labeled re-simulation fixtures: wide straights that must pass, hairpins
/// beyond the steering limit that must leave the road, and loops rejected by
/// the validity gate.
pub fn resim_fixtures() -> Vec<SimFixture> {
    let mut fixtures = Vec::new();

    for k in 0..8 {
        // Lengths stay under the 250 m validity box.
        let len = 150.0 + 10.0 * k as f64;
        let n = (len / 10.0) as usize;
        let pts: Vec<(f64, f64)> = (0..=n).map(|j| (len * j as f64 / n as f64, 0.0)).collect();
        fixtures.push(SimFixture {
            name: format!("straight_{k:02}"),
            spline: polyline_spline(&format!("straight_{k:02}"), &pts, 8.0 + 0.5 * k as f64),
            expected: ExpectedSim::Pass,
        });
    }

    for k in 0..6 {
        // Lead-in straight, then an arc far tighter than tan(25 deg)/2.5
        // allows (minimum turn radius ~5.36 m at full steering lock).
        let radius = 2.5 + 0.3 * k as f64;
        let sweep: f64 = 300.0;
        let mut pts = vec![(0.0, 0.0), (10.0, 0.0), (20.0, 0.0), (30.0, 0.0)];
        let steps = 60;
        for j in 1..=steps {
            let ang = sweep.to_radians() * j as f64 / steps as f64;
            pts.push((30.0 + radius * ang.sin(), radius * (1.0 - ang.cos())));
        }
        fixtures.push(SimFixture {
            name: format!("hairpin_{k:02}"),
            spline: polyline_spline(&format!("hairpin_{k:02}"), &pts, 4.0),
            expected: ExpectedSim::OutOfBounds,
        });
    }

    for k in 0..6 {
        let r = 15.0 + 2.0 * k as f64;
        let n = 36;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|j| {
                let ang = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                (r * ang.cos(), r * ang.sin())
            })
            .collect();
        fixtures.push(SimFixture {
            name: format!("circuit_{k:02}"),
            spline: polyline_spline(&format!("circuit_{k:02}"), &pts, 8.0),
            expected: ExpectedSim::InvalidRoad,
        });
    }

    fixtures
}

/// Random open polylines for intersection-count oracle comparisons.
pub fn random_polyline(rng: &mut ChaCha8Rng, max_points: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(4..=max_points.max(4));
    (0..n)
        .map(|_| {
            (
                rng.random_range(0.0..100.0),
                rng.random_range(0.0..100.0),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use roadspline::ingest::parse_xodr;

    #[test]
    fn builder_emits_parseable_xodr() {
        let xodr = RoadBuilder::new("demo")
            .line(50.0)
            .arc(40.0, 0.01)
            .spiral(30.0, 0.01, -0.005)
            .line(50.0)
            .left_lane(3.5)
            .right_lane(3.5)
            .elevation(0.0, 1.0, 0.01, 0.0, 0.0)
            .build_xodr();
        let out = parse_xodr(&xodr, "demo").unwrap();
        assert_eq!(out.network.roads.len(), 1);
        assert_eq!(out.network.roads[0].plan_view.len(), 4);
        assert_eq!(out.network.roads[0].length, 170.0);
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = synthetic_corpus(7, 5);
        let b = synthetic_corpus(7, 5);
        assert_eq!(a.len(), 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.xodr, y.xodr);
        }
    }

    #[test]
    fn fixture_counts() {
        assert_eq!(validity_fixtures().len(), 40);
        assert_eq!(resim_fixtures().len(), 20);
    }

    #[test]
    fn scenario_json_embeds_the_document() {
        let json = as_scenario_json("r1", "<OpenDRIVE>\"x\"</OpenDRIVE>");
        let value: serde_json_value_check::Value = serde_json_value_check::parse(&json);
        assert_eq!(value.pointer_str("/road_id").as_deref(), Some("r1"));
        assert_eq!(
            value.pointer_str("/OpenDRIVE").as_deref(),
            Some("<OpenDRIVE>\"x\"</OpenDRIVE>")
        );
    }

    // Tiny JSON sanity check without pulling serde_json into the testkit:
    // reuse the loader from the core crate, which already parses JSON.
    mod serde_json_value_check {
        pub struct Value(String);

        pub fn parse(s: &str) -> Value {
            Value(s.to_string())
        }

        impl Value {
            pub fn pointer_str(&self, pointer: &str) -> Option<String> {
                roadspline::ingest::load_scenario_bytes(
                    self.0.as_bytes(),
                    roadspline::ingest::SourceFormat::Json,
                    pointer,
                )
                .ok()
            }
        }
    }

    #[test]
    fn polyline_spline_shape() {
        let s = polyline_spline("p", &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)], 6.0);
        assert_eq!(s.control_points.len(), 4);
        assert_eq!(s.spline_points.len(), 4);
        assert_eq!(s.control_points[0].width, 6.0);
    }
}

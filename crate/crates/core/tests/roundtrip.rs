//! Parse/serialize round-trip properties on the supported OpenDRIVE subset.

use proptest::prelude::*;
use roadspline::ingest::{
    parse_xodr, ElevationSegment, GeometrySegment, Lane, LaneSection, ParamRange, Road,
    RoadNetwork, SegmentShape, WidthPoly,
};
use roadspline_testkit::network_to_xodr;

fn shape_strategy() -> impl Strategy<Value = SegmentShape> {
    prop_oneof![
        Just(SegmentShape::Line),
        (-0.05..0.05f64).prop_map(|curvature| SegmentShape::Arc { curvature }),
        ((-0.05..0.05f64), (-0.05..0.05f64)).prop_map(|(curv_start, curv_end)| {
            SegmentShape::Spiral {
                curv_start,
                curv_end,
            }
        }),
        ((-2.0..2.0f64), (-0.1..0.1f64), (-0.01..0.01f64), (-0.001..0.001f64))
            .prop_map(|(a, b, c, d)| SegmentShape::Poly3 { a, b, c, d }),
        (
            (-1.0..1.0f64),
            (0.5..1.5f64),
            (-0.01..0.01f64),
            (-0.001..0.001f64),
            (-1.0..1.0f64),
            (-0.1..0.1f64),
            (-0.01..0.01f64),
            (-0.001..0.001f64),
            prop::bool::ANY,
        )
            .prop_map(|(au, bu, cu, du, av, bv, cv, dv, arc)| SegmentShape::ParamPoly3 {
                au,
                bu,
                cu,
                du,
                av,
                bv,
                cv,
                dv,
                p_range: if arc {
                    ParamRange::ArcLength
                } else {
                    ParamRange::Normalized
                },
            }),
    ]
}

fn lane_strategy(id: i32) -> impl Strategy<Value = Lane> {
    (
        prop::sample::select(vec!["driving", "border", "shoulder"]),
        prop::collection::vec((0.1..30.0f64, 2.5..4.5f64, -0.05..0.05f64), 0..2),
    )
        .prop_map(move |(lane_type, extra)| {
            let mut width_polys = vec![WidthPoly {
                s_offset: 0.0,
                a: 3.5,
                b: 0.0,
                c: 0.0,
                d: 0.0,
            }];
            let mut offset = 0.0;
            for (gap, a, b) in extra {
                offset += gap;
                width_polys.push(WidthPoly {
                    s_offset: offset,
                    a,
                    b,
                    c: 0.0,
                    d: 0.0,
                });
            }
            Lane {
                id,
                lane_type: lane_type.to_string(),
                width_polys,
            }
        })
}

fn road_strategy(index: usize) -> impl Strategy<Value = Road> {
    let segments = prop::collection::vec(((10.0..80.0f64), shape_strategy()), 1..5);
    let start = ((-50.0..50.0f64), (-50.0..50.0f64), (-3.0..3.0f64));
    let elevation = prop::collection::vec(
        ((1.0..40.0f64), (-5.0..5.0f64), (-0.1..0.1f64)),
        0..3,
    );
    let left = prop::collection::vec(Just(()), 0..3);
    let right = prop::collection::vec(Just(()), 0..3);
    (segments, start, elevation, left, right).prop_flat_map(
        move |(segs, (x0, y0, h0), elev, left, right)| {
            let left_lanes: Vec<_> = (1..=left.len() as i32).collect();
            let right_lanes: Vec<_> = (1..=right.len() as i32).map(|i| -i).collect();
            let left_strats: Vec<_> = left_lanes.into_iter().map(lane_strategy).collect();
            let right_strats: Vec<_> = right_lanes.into_iter().map(lane_strategy).collect();
            (left_strats, right_strats).prop_map(move |(left_lanes, right_lanes)| {
                let mut plan_view = Vec::new();
                let mut s = 0.0;
                for (length, shape) in segs.clone() {
                    plan_view.push(GeometrySegment {
                        s,
                        x: x0,
                        y: y0,
                        hdg: h0,
                        length,
                        shape,
                    });
                    s += length;
                }
                let mut profile = Vec::new();
                let mut s_elev = 0.0;
                for (gap, a, b) in elev.clone() {
                    profile.push(ElevationSegment {
                        s_elev,
                        a,
                        b,
                        c: 0.0,
                        d: 0.0,
                    });
                    s_elev += gap;
                }
                Road {
                    id: format!("road_{index}"),
                    length: s,
                    plan_view,
                    elevation_profile: profile,
                    lane_sections: vec![LaneSection {
                        s_start: 0.0,
                        left_lanes: left_lanes.clone(),
                        right_lanes: right_lanes.clone(),
                    }],
                }
            })
        },
    )
}

fn network_strategy() -> impl Strategy<Value = RoadNetwork> {
    prop::collection::vec(Just(()), 1..3).prop_flat_map(|roads| {
        let strategies: Vec<_> = (0..roads.len()).map(road_strategy).collect();
        strategies.prop_map(|roads| RoadNetwork {
            source_id: "prop".to_string(),
            roads,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Parse-serialize-parse is a fixed point on the supported subset.
    #[test]
    fn parse_serialize_parse_fixed_point(network in network_strategy()) {
        let first_doc = network_to_xodr(&network);
        let first = parse_xodr(&first_doc, "prop").unwrap();
        let second_doc = network_to_xodr(&first.network);
        let second = parse_xodr(&second_doc, "prop").unwrap();
        prop_assert_eq!(&first.network, &second.network);
        // The writer covers every parsed field, so one round already
        // reproduces the original structs.
        prop_assert_eq!(&network.roads, &first.network.roads);
    }

    /// No geometry element is ever silently dropped.
    #[test]
    fn geometry_elements_are_all_kept(network in network_strategy()) {
        let doc = network_to_xodr(&network);
        let parsed = parse_xodr(&doc, "prop").unwrap();
        let expected: usize = network.roads.iter().map(|r| r.plan_view.len()).sum();
        let got: usize = parsed.network.roads.iter().map(|r| r.plan_view.len()).sum();
        prop_assert_eq!(expected, got);
        prop_assert_eq!(doc.matches("<geometry ").count(), expected);
    }
}

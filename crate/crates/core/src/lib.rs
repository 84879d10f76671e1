//! Road conversion toolkit: OpenDRIVE in, Catmull-Rom spline roads out.
//!
//! The pipeline has five stages, one module each:
//!
//! - [`ingest`]: load `.xodr` files or JSON scenario wrappers and parse the
//!   road-geometry subset of OpenDRIVE.
//! - [`geometry`]: evaluate reference-line primitives, elevation, widths,
//!   and lane offsets at arbitrary arc length.
//! - [`converter`]: sample lane boundaries, average them into a centerline,
//!   and interpolate a Catmull-Rom spline through it.
//! - [`fidelity`]: score how closely the spline matches the source points.
//! - [`validate`] / [`resim`]: check the spline against road-validity
//!   criteria and re-drive it with a pure-pursuit vehicle for a pass/fail
//!   verdict.
//!
//! All stages are pure transformations over immutable data and safe to run
//! in parallel across roads.

pub mod converter;
pub mod fidelity;
pub mod geometry;
pub mod ingest;
pub mod resim;
pub mod validate;

pub use converter::{
    catmull_rom_point, catmull_rom_spline, compute_centerline, convert_roads,
    extract_road_geometry, generate_spline, BoundaryPoint, BoundarySelection, ControlPoint,
    ConvertError, ConversionWarnings, Point3, RoadConversion, SamplingStrategy, SplineConfig,
    SplineResult,
};
pub use fidelity::{accuracy, r_squared, FidelityError, FidelityReport, Pairing};
pub use geometry::{
    elevation_at, eval_reference_line, lane_offset_at, lateral_offset_point, road_width_at,
    ElevationWidth, GeometryError, LaneFilter, Pose, Side,
};
pub use ingest::{
    load_scenario, parse_xodr, GeometrySegment, Lane, LaneSection, LoadError, ParamRange,
    ParseError, ParseOutput, Road, RoadNetwork, SegmentShape, SourceFormat, WidthPoly,
};
pub use resim::{simulate, LaneChoice, OutcomeReason, SimOutcome, TraceRow, VehicleConfig};
pub use validate::{check_validity, self_intersects, Criterion, ValidateError, ValidityConfig, ValidityReport};

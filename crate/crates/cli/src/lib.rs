//! Library side of the batch CLI: directory driver, report schemas, and SVG
//! rendering. The `roadspline` binary is a thin argument parser over
//! [`batch::convert_batch`].

pub mod batch;
pub mod out;
pub mod svg;

pub use batch::{convert_batch, BatchConfig, BatchOutcome, CampaignSummary, DEFAULT_CAMPAIGN};
pub use svg::{render_svg, Overlays, RenderError};

//! Sliding-line point regression (SLPR) for arbitrary-shape text regions.
//!
//! A text region is described by its minimal axis-aligned rectangle plus the
//! boundary intersections of `n` equidistant horizontal and `n` equidistant
//! vertical sliding lines. Only the free coordinate of each intersection is
//! stored; the other one follows from the rectangle. With the default
//! `n = 7` this gives a 32-parameter code (4 rectangle values and 28
//! coordinates).
//!
//! Modules:
//!
//! - [`geom`]: points, polygons, rectangles, area and IoU.
//! - [`codec`]: polygon to sliding-line target and back to boundary points.
//! - [`restore`]: turn a target into a polygon (long-side chains, or a
//!   quadrilateral fit through all points).
//! - [`suppress`]: rectangle and polygon non-maximum suppression.
//! - [`loss`]: smooth-L1 regression losses and their gradients.
//! - [`eval`]: ICDAR-style precision / recall / Hmean.
//! - [`dataio`]: ICDAR2015, CTW1500 and JSON-lines region files.
//! - [`synth`]: seeded synthetic shapes with analytic intersection oracles.
//! - [`cli`]: the `slpr` command-line frontend.

pub mod cli;
pub mod codec;
pub mod dataio;
pub mod error;
pub mod eval;
pub mod geom;
pub mod loss;
pub mod restore;
pub mod suppress;
pub mod synth;

pub use codec::{
    decode, encode, sliding_positions, PointChains, SlideDirection, SlprTarget, TextAxis,
};
pub use error::{Error, Result};
pub use eval::{aggregate, match_image, EvalReport, GroundTruth, ImageStats};
pub use geom::{
    polygon_area, polygon_bbox, polygon_intersection_area, polygon_iou, rect_iou, AxisRect, Point,
    Polygon,
};
pub use restore::{restore, restore_bhvp, restore_pls, RestoreConfig, RestoreMethod};
pub use suppress::{nms, pnms, Detection};

//! Spatial fall-risk evaluation of patient-room layouts.
//!
//! A room layout is rasterized into grid cells. Each free cell gets a static
//! risk factor from flooring, lighting, nearby supports and door swings; their
//! product is the room baseline. Patient trajectories for everyday transfers
//! (bed to toilet, chair to bed, ...) are predicted by trajectory
//! optimization, tagged by activity and turning, and scored against the
//! baseline. The final evaluation averages those scores per cell.
//!
//! ```
//! use fallrisk::{examples, pipeline, room::LightingMode};
//!
//! let layout = examples::load("fig3_golden")?;
//! let settings = pipeline::EvaluationSettings::default();
//! let result = pipeline::evaluate_room(&layout, &settings, LightingMode::Day)?;
//! assert_eq!((result.rows, result.cols), (30, 30));
//! # Ok::<(), fallrisk::Error>(())
//! ```

// Validation uses `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod config;
pub mod error;
pub mod examples;
pub mod field;
pub mod geometry;
pub mod motion;
pub mod pipeline;
pub mod planner;
pub mod render;
pub mod room;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/layout-format.md")]
    mod layout_format {}
    #[doc = include_str!("../../../book/src/static-factors.md")]
    mod static_factors {}
    #[doc = include_str!("../../../book/src/planner.md")]
    mod planner {}
    #[doc = include_str!("../../../book/src/motion.md")]
    mod motion {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/output.md")]
    mod output {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
}

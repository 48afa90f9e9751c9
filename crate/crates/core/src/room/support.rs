use super::{RoomLayout, SupportObject};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const MIN_DERIVED_LEVEL: f64 = 0.6;
pub const MAX_DERIVED_LEVEL: f64 = 1.3;

/// Grasp height that scores best; the score falls off linearly to zero at 0 m and 1.8 m.
const IDEAL_GRASP_HEIGHT: f64 = 0.9;

/// Support level from the three object characteristics, weighted equally and
/// mapped linearly onto `[0.6, 1.3]`.
pub fn derive_support_level(grasp_height: f64, movability: f64, graspability: f64) -> Result<f64> {
    if !(grasp_height.is_finite() && grasp_height >= 0.0) {
        return Err(Error::OutOfRange {
            field: "grasp_height",
            value: grasp_height,
            expected: "a finite height >= 0 m",
        });
    }
    for (field, value) in [("movability", movability), ("graspability", graspability)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                field,
                value,
                expected: "[0, 1]",
            });
        }
    }
    let height_score =
        (1.0 - (grasp_height - IDEAL_GRASP_HEIGHT).abs() / IDEAL_GRASP_HEIGHT).clamp(0.0, 1.0);
    let score = (height_score + (1.0 - movability) + graspability) / 3.0;
    Ok(MIN_DERIVED_LEVEL + (MAX_DERIVED_LEVEL - MIN_DERIVED_LEVEL) * score)
}

/// Closest support object to `point` and the distance to its graspable outline.
/// Ties go to the object listed first.
pub fn nearest_support(point: Point, layout: &RoomLayout) -> Result<(&SupportObject, f64)> {
    let mut best: Option<(&SupportObject, f64)> = None;
    for obj in &layout.support_objects {
        let d = obj.geometry.distance_to(point);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((obj, d));
        }
    }
    best.ok_or(Error::NoSupportObjects)
}

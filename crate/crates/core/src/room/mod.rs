//! Declarative room description and the geometric queries every other module
//! builds on.
//!
//! A [`RoomLayout`] is immutable once validated. The evaluation grid is
//! derived from it by [`Raster::new`]; cell membership is always decided by
//! the cell center.

mod raster;
mod schema;
mod sdf;
mod support;

pub use raster::{GridIndex, GridSpec, Raster};
pub use schema::{parse_document, parse_layout, parse_layout_value, LayoutDocument, ParseOptions, Parsed};
pub use sdf::DistanceField;
pub use support::{derive_support_level, nearest_support, MAX_DERIVED_LEVEL, MIN_DERIVED_LEVEL};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::geometry::{Point, Polygon, Region, Segment, Shape};

/// Door openings at or below this width (36 in) count as narrow.
pub const NARROW_DOOR_MAX_WIDTH: f64 = 0.9144;

/// Half-depth of the doorway rectangle used to build default door effect zones.
pub const DOORWAY_HALF_DEPTH: f64 = 0.05;

/// How far a sliding door's default effect zone reaches on each side.
pub const SLIDING_DOOR_REACH: f64 = 0.3;

pub const DEFAULT_WALL_THICKNESS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Resilient,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    Bed,
    Toilet,
    Sink,
    PatientChair,
    Sofa,
    EntranceDoor,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 6] = [
        FixtureKind::Bed,
        FixtureKind::Toilet,
        FixtureKind::Sink,
        FixtureKind::PatientChair,
        FixtureKind::Sofa,
        FixtureKind::EntranceDoor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureKind::Bed => "bed",
            FixtureKind::Toilet => "toilet",
            FixtureKind::Sink => "sink",
            FixtureKind::PatientChair => "patient_chair",
            FixtureKind::Sofa => "sofa",
            FixtureKind::EntranceDoor => "entrance_door",
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoorOperation {
    Swing,
    Slide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthClass {
    Narrow,
    Wide,
}

impl WidthClass {
    pub fn from_width(width: f64) -> Self {
        if width <= NARROW_DOOR_MAX_WIDTH {
            WidthClass::Narrow
        } else {
            WidthClass::Wide
        }
    }
}

/// Swing side relative to the doorway centerline `from → to`:
/// `Inward` opens toward the left-hand side, `Outward` toward the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwingDirection {
    Inward,
    Outward,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    pub segment: Segment,
    pub thickness: f64,
}

impl Wall {
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.segment.distance_to(p) - 0.5 * self.thickness
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorRegion {
    pub name: Option<String>,
    pub polygon: Polygon,
    pub surface: Surface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LightSource {
    pub position: Point,
    /// Lumens.
    pub luminous_flux: f64,
    pub active_day: bool,
    pub active_night: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Door {
    pub centerline: Segment,
    pub operation: DoorOperation,
    pub width_class: WidthClass,
    pub swing_direction: SwingDirection,
    pub effect_zone: Polygon,
}

impl Door {
    /// Doorway rectangle grown toward the swing side (swing doors) or by
    /// [`SLIDING_DOOR_REACH`] on both sides (sliders).
    pub fn default_effect_zone(
        centerline: Segment,
        operation: DoorOperation,
        swing: SwingDirection,
    ) -> Polygon {
        let width = centerline.length();
        let dir = (centerline.b - centerline.a) * (1.0 / width.max(f64::MIN_POSITIVE));
        let normal = dir.perp();
        let (left, right) = match (operation, swing) {
            (DoorOperation::Slide, _) => (SLIDING_DOOR_REACH, SLIDING_DOOR_REACH),
            (DoorOperation::Swing, SwingDirection::Inward) => (width, 0.0),
            (DoorOperation::Swing, SwingDirection::Outward) => (0.0, width),
            (DoorOperation::Swing, SwingDirection::None) => (width, width),
        };
        let up = DOORWAY_HALF_DEPTH + left;
        let down = DOORWAY_HALF_DEPTH + right;
        Polygon::new(vec![
            centerline.a - normal * down,
            centerline.b - normal * down,
            centerline.b + normal * up,
            centerline.a + normal * up,
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportObject {
    pub name: String,
    pub geometry: Shape,
    pub support_level: f64,
    pub grasp_height: Option<f64>,
    pub movability: Option<f64>,
    pub graspability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub kind: FixtureKind,
    pub anchor: Point,
    pub sitting_zone: Region,
    pub footprint: Polygon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub name: Option<String>,
    pub polygon: Polygon,
}

/// Lighting condition for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightingMode {
    Day,
    Night,
}

impl LightingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LightingMode::Day => "day",
            LightingMode::Night => "night",
        }
    }
}

impl fmt::Display for LightingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl LightSource {
    pub fn is_active(&self, mode: LightingMode) -> bool {
        match mode {
            LightingMode::Day => self.active_day,
            LightingMode::Night => self.active_night,
        }
    }
}

/// A validated room description. Construct with [`parse_layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoomLayout {
    pub width: f64,
    pub depth: f64,
    pub grid_resolution: f64,
    pub walls: Vec<Wall>,
    pub floor_regions: Vec<FloorRegion>,
    pub lights: Vec<LightSource>,
    pub doors: Vec<Door>,
    pub support_objects: Vec<SupportObject>,
    pub fixtures: Vec<Fixture>,
    pub obstacles: Vec<Obstacle>,
}

impl RoomLayout {
    pub fn grid(&self) -> GridSpec {
        GridSpec::for_room(self.width, self.depth, self.grid_resolution)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.depth
    }

    /// Surface of the first floor region containing `p`.
    pub fn surface_at(&self, p: Point) -> Option<Surface> {
        self.floor_regions
            .iter()
            .find(|r| r.polygon.contains(p))
            .map(|r| r.surface)
    }

    /// Inside a wall band, an obstacle or a fixture footprint.
    pub fn is_occupied(&self, p: Point) -> bool {
        self.walls.iter().any(|w| w.signed_distance(p) <= 0.0)
            || self.obstacles.iter().any(|o| o.polygon.contains(p))
            || self.fixtures.iter().any(|f| f.footprint.contains(p))
    }

    /// Exact signed distance to the nearest obstacle boundary, treating the
    /// room outline as a wall. Overlapping obstacles combine by minimum.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let mut d = p.x.min(self.width - p.x).min(p.y).min(self.depth - p.y);
        for w in &self.walls {
            d = d.min(w.signed_distance(p));
        }
        for o in &self.obstacles {
            d = d.min(o.polygon.signed_distance(p));
        }
        for f in &self.fixtures {
            d = d.min(f.footprint.signed_distance(p));
        }
        d
    }

    pub fn fixture(&self, kind: FixtureKind) -> Option<&Fixture> {
        self.fixtures.iter().find(|f| f.kind == kind)
    }

    pub fn has_fixture(&self, kind: FixtureKind) -> bool {
        self.fixture(kind).is_some()
    }

    pub fn floor_region(&self, name: &str) -> Option<&FloorRegion> {
        self.floor_regions
            .iter()
            .find(|r| r.name.as_deref() == Some(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_class_threshold_is_36_inches() {
        assert_eq!(WidthClass::from_width(0.9144), WidthClass::Narrow);
        assert_eq!(WidthClass::from_width(0.92), WidthClass::Wide);
    }

    #[test]
    fn inward_swing_zone_grows_left() {
        let line = Segment::new(Point::new(1.0, 0.0), Point::new(1.0, 0.8));
        let zone = Door::default_effect_zone(line, DoorOperation::Swing, SwingDirection::Inward);
        // left of an upward segment is -x
        assert!(zone.contains(Point::new(0.4, 0.4)));
        assert!(!zone.contains(Point::new(1.2, 0.4)));
        let slide = Door::default_effect_zone(line, DoorOperation::Slide, SwingDirection::None);
        assert!(slide.contains(Point::new(1.3, 0.4)));
        assert!(slide.contains(Point::new(0.7, 0.4)));
        assert!(!slide.contains(Point::new(1.4, 0.4)));
    }
}

//! Layout documents: the on-disk (TOML) and over-the-wire (JSON) form of a
//! [`RoomLayout`], and their validation.
//!
//! Field names are described in `docs/schema/layout.schema.json` and the
//! guide's layout chapter. Unknown fields are an error unless
//! [`ParseOptions::lenient`] is set, in which case they become warnings.

use serde::{Deserialize, Serialize};

use super::{
    derive_support_level, Door, DoorOperation, Fixture, FixtureKind, FloorRegion, LightSource,
    Obstacle, RoomLayout, Surface, SupportObject, SwingDirection, Wall, WidthClass,
    DEFAULT_WALL_THICKNESS,
};
use crate::error::{Error, Result};
use crate::geometry::{segments_intersect, Point, Polygon, Region, Segment, Shape};

const BOUNDS_EPS: f64 = 1e-9;

fn default_resolution() -> f64 {
    0.1
}

fn default_wall_thickness() -> f64 {
    DEFAULT_WALL_THICKNESS
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub room: RoomDoc,
    #[serde(default)]
    pub walls: Vec<WallDoc>,
    #[serde(default)]
    pub floors: Vec<FloorDoc>,
    #[serde(default)]
    pub lights: Vec<LightDoc>,
    #[serde(default)]
    pub doors: Vec<DoorDoc>,
    #[serde(default)]
    pub supports: Vec<SupportDoc>,
    #[serde(default)]
    pub fixtures: Vec<FixtureDoc>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomDoc {
    pub width: f64,
    pub depth: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallDoc {
    pub from: Point,
    pub to: Point,
    #[serde(default = "default_wall_thickness")]
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub surface: Surface,
    pub polygon: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightDoc {
    pub position: Point,
    pub flux: f64,
    #[serde(default = "yes")]
    pub day: bool,
    #[serde(default = "yes")]
    pub night: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorDoc {
    pub from: Point,
    pub to: Point,
    pub operation: DoorOperation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_class: Option<WidthClass>,
    #[serde(default)]
    pub swing: SwingDirection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect_zone: Option<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grasp_height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub movability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graspability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureDoc {
    pub kind: FixtureKind,
    pub anchor: Point,
    pub footprint: Vec<Point>,
    pub sitting_zone: ZoneDoc,
}

/// Either a disc (`radius`, optional `center` defaulting to the anchor) or a `polygon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub polygon: Vec<Point>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Downgrade unknown fields from errors to warnings.
    pub lenient: bool,
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub layout: RoomLayout,
    pub warnings: Vec<String>,
}

/// Parse and validate a TOML layout document.
pub fn parse_layout(text: &str, options: ParseOptions) -> Result<Parsed> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::schema("<document>", toml_message(&e)))?;
    let mut ignored = Vec::new();
    let doc: LayoutDocument = deserialize_tracked(de, &mut ignored)
        .map_err(|e| Error::schema(display_path(&e), toml_message(e.inner())))?;
    finish(doc, ignored, options)
}

/// Parse a TOML layout into its document form without validating geometry.
pub fn parse_document(text: &str) -> Result<LayoutDocument> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::schema("<document>", toml_message(&e)))?;
    serde_path_to_error::deserialize(de).map_err(|e| Error::schema(display_path(&e), toml_message(e.inner())))
}

/// Parse and validate a layout given as a JSON value with the same schema.
pub fn parse_layout_value(value: serde_json::Value, options: ParseOptions) -> Result<Parsed> {
    let mut ignored = Vec::new();
    let doc: LayoutDocument = deserialize_tracked(value, &mut ignored)
        .map_err(|e| Error::schema(display_path(&e), e.inner().to_string()))?;
    finish(doc, ignored, options)
}

fn deserialize_tracked<'de, D>(
    de: D,
    ignored: &mut Vec<String>,
) -> std::result::Result<LayoutDocument, serde_path_to_error::Error<D::Error>>
where
    D: serde::Deserializer<'de>,
{
    let mut record = |path: serde_ignored::Path<'_>| ignored.push(path.to_string());
    serde_path_to_error::deserialize(serde_ignored::Deserializer::new(de, &mut record))
}

fn display_path<E>(e: &serde_path_to_error::Error<E>) -> String {
    let p = e.path().to_string();
    if p == "." {
        "<document>".to_string()
    } else {
        p
    }
}

fn toml_message(e: &toml::de::Error) -> String {
    e.message().to_string()
}

fn finish(doc: LayoutDocument, ignored: Vec<String>, options: ParseOptions) -> Result<Parsed> {
    if let Some(first) = ignored.first() {
        if !options.lenient {
            return Err(Error::UnknownField {
                path: first.clone(),
            });
        }
    }
    let warnings = ignored
        .into_iter()
        .map(|p| format!("ignored unknown field `{p}`"))
        .collect();
    let layout = doc.into_layout()?;
    Ok(Parsed { layout, warnings })
}

impl LayoutDocument {
    /// Validate and convert into a [`RoomLayout`].
    pub fn into_layout(self) -> Result<RoomLayout> {
        let room = &self.room;
        for (name, v) in [
            ("room.width", room.width),
            ("room.depth", room.depth),
            ("room.resolution", room.resolution),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::schema(name, format!("must be a positive number, got {v}")));
            }
        }
        let ctx = Bounds {
            width: room.width,
            depth: room.depth,
        };

        let mut walls = Vec::with_capacity(self.walls.len());
        for (i, w) in self.walls.iter().enumerate() {
            let path = format!("walls[{i}]");
            ctx.check_points(&path, [w.from, w.to])?;
            if !(w.thickness.is_finite() && w.thickness > 0.0) {
                return Err(Error::schema(format!("{path}.thickness"), "must be positive"));
            }
            walls.push(Wall {
                segment: Segment::new(w.from, w.to),
                thickness: w.thickness,
            });
        }

        let mut floor_regions = Vec::with_capacity(self.floors.len());
        for (i, f) in self.floors.iter().enumerate() {
            let path = format!("floors[{i}].polygon");
            let polygon = simple_polygon(&path, &f.polygon)?;
            ctx.check_points(&path, f.polygon.iter().copied())?;
            floor_regions.push(FloorRegion {
                name: f.name.clone(),
                polygon,
                surface: f.surface,
            });
        }
        if floor_regions.is_empty() {
            return Err(Error::schema("floors", "at least one floor region is required"));
        }

        let mut lights = Vec::with_capacity(self.lights.len());
        for (i, l) in self.lights.iter().enumerate() {
            let path = format!("lights[{i}]");
            ctx.check_points(&format!("{path}.position"), [l.position])?;
            if !(l.flux.is_finite() && l.flux > 0.0) {
                return Err(Error::schema(format!("{path}.flux"), "luminous flux must be positive"));
            }
            lights.push(LightSource {
                position: l.position,
                luminous_flux: l.flux,
                active_day: l.day,
                active_night: l.night,
            });
        }

        let mut doors = Vec::with_capacity(self.doors.len());
        for (i, d) in self.doors.iter().enumerate() {
            let path = format!("doors[{i}]");
            ctx.check_points(&path, [d.from, d.to])?;
            let centerline = Segment::new(d.from, d.to);
            if centerline.length() <= 0.0 {
                return Err(Error::geometry(path, "doorway centerline has zero length"));
            }
            let effect_zone = match &d.effect_zone {
                Some(pts) => {
                    let zpath = format!("{path}.effect_zone");
                    ctx.check_points(&zpath, pts.iter().copied())?;
                    simple_polygon(&zpath, pts)?
                }
                None => Door::default_effect_zone(centerline, d.operation, d.swing),
            };
            let on_or_inside = |p: Point| effect_zone.signed_distance(p) <= 1e-9;
            if !(on_or_inside(centerline.a) && on_or_inside(centerline.b)) {
                return Err(Error::geometry(
                    format!("{path}.effect_zone"),
                    "effect zone must contain the doorway centerline",
                ));
            }
            doors.push(Door {
                centerline,
                operation: d.operation,
                width_class: d
                    .width_class
                    .unwrap_or_else(|| WidthClass::from_width(centerline.length())),
                swing_direction: d.swing,
                effect_zone,
            });
        }

        let mut support_objects = Vec::with_capacity(self.supports.len());
        for (i, s) in self.supports.iter().enumerate() {
            support_objects.push(s.to_support(&format!("supports[{i}]"), &ctx)?);
        }

        let mut fixtures: Vec<Fixture> = Vec::with_capacity(self.fixtures.len());
        for (i, f) in self.fixtures.iter().enumerate() {
            let path = format!("fixtures[{i}]");
            if fixtures.iter().any(|g| g.kind == f.kind) {
                return Err(Error::schema(
                    format!("{path}.kind"),
                    format!("duplicate fixture `{}`", f.kind),
                ));
            }
            fixtures.push(f.to_fixture(&path, &ctx)?);
        }

        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, o) in self.obstacles.iter().enumerate() {
            let path = format!("obstacles[{i}].polygon");
            ctx.check_points(&path, o.polygon.iter().copied())?;
            obstacles.push(Obstacle {
                name: o.name.clone(),
                polygon: simple_polygon(&path, &o.polygon)?,
            });
        }

        let layout = RoomLayout {
            width: room.width,
            depth: room.depth,
            grid_resolution: room.resolution,
            walls,
            floor_regions,
            lights,
            doors,
            support_objects,
            fixtures,
            obstacles,
        };
        check_partition(&layout)?;
        Ok(layout)
    }
}

impl SupportDoc {
    fn to_support(&self, path: &str, ctx: &Bounds) -> Result<SupportObject> {
        let geometry = match (&self.polygon, &self.polyline) {
            (Some(pts), None) => {
                let p = format!("{path}.polygon");
                ctx.check_points(&p, pts.iter().copied())?;
                Shape::Polygon(simple_polygon(&p, pts)?)
            }
            (None, Some(pts)) => {
                let p = format!("{path}.polyline");
                ctx.check_points(&p, pts.iter().copied())?;
                if pts.is_empty() {
                    return Err(Error::schema(p, "polyline needs at least one point"));
                }
                Shape::Polyline(pts.clone())
            }
            _ => {
                return Err(Error::schema(
                    path,
                    "exactly one of `polygon` or `polyline` is required",
                ))
            }
        };
        let support_level = match self.support_level {
            Some(level) => {
                if !(0.5..=1.5).contains(&level) {
                    return Err(Error::schema(
                        format!("{path}.support_level"),
                        format!("must lie in [0.5, 1.5], got {level}"),
                    ));
                }
                level
            }
            None => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| {
                        Error::schema(
                            format!("{path}.{name}"),
                            "required when support_level is absent",
                        )
                    })
                };
                let h = need(self.grasp_height, "grasp_height")?;
                let m = need(self.movability, "movability")?;
                let g = need(self.graspability, "graspability")?;
                derive_support_level(h, m, g).map_err(|e| match e {
                    Error::OutOfRange {
                        field,
                        value,
                        expected,
                    } => Error::schema(
                        format!("{path}.{field}"),
                        format!("{value} is out of range, expected {expected}"),
                    ),
                    other => other,
                })?
            }
        };
        Ok(SupportObject {
            name: self.name.clone(),
            geometry,
            support_level,
            grasp_height: self.grasp_height,
            movability: self.movability,
            graspability: self.graspability,
        })
    }
}

impl FixtureDoc {
    fn to_fixture(&self, path: &str, ctx: &Bounds) -> Result<Fixture> {
        ctx.check_points(&format!("{path}.anchor"), [self.anchor])?;
        let fpath = format!("{path}.footprint");
        ctx.check_points(&fpath, self.footprint.iter().copied())?;
        let footprint = simple_polygon(&fpath, &self.footprint)?;
        if !footprint.contains(self.anchor) {
            return Err(Error::geometry(
                format!("{path}.anchor"),
                "anchor must lie inside the footprint",
            ));
        }
        let zpath = format!("{path}.sitting_zone");
        let z = &self.sitting_zone;
        let zone = match (&z.polygon, z.radius) {
            (Some(pts), None) if z.center.is_none() => {
                ctx.check_points(&zpath, pts.iter().copied())?;
                Region::Polygon(simple_polygon(&zpath, pts)?)
            }
            (None, Some(radius)) => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::schema(format!("{zpath}.radius"), "must be positive"));
                }
                let center = z.center.unwrap_or(self.anchor);
                ctx.check_points(&format!("{zpath}.center"), [center])?;
                Region::Disc { center, radius }
            }
            _ => {
                return Err(Error::schema(
                    zpath,
                    "give either `radius` (with optional `center`) or `polygon`",
                ))
            }
        };
        if !zone_touches_boundary(&zone, &footprint) {
            return Err(Error::geometry(
                zpath,
                "sitting zone must overlap the footprint boundary",
            ));
        }
        Ok(Fixture {
            kind: self.kind,
            anchor: self.anchor,
            sitting_zone: zone,
            footprint,
        })
    }
}

fn zone_touches_boundary(zone: &Region, footprint: &Polygon) -> bool {
    match zone {
        Region::Disc { center, radius } => footprint.boundary_distance(*center) <= *radius,
        Region::Polygon(z) => {
            footprint.vertices.iter().any(|&v| z.contains(v))
                || z.vertices.iter().any(|&v| footprint.contains(v))
                || z.edges()
                    .any(|e| footprint.edges().any(|f| segments_intersect(&e, &f)))
        }
    }
}

struct Bounds {
    width: f64,
    depth: f64,
}

impl Bounds {
    fn check_points(&self, path: &str, pts: impl IntoIterator<Item = Point>) -> Result<()> {
        for p in pts {
            if !p.is_finite() {
                return Err(Error::schema(path, "coordinates must be finite"));
            }
            let inside = p.x >= -BOUNDS_EPS
                && p.y >= -BOUNDS_EPS
                && p.x <= self.width + BOUNDS_EPS
                && p.y <= self.depth + BOUNDS_EPS;
            if !inside {
                return Err(Error::OutOfRoom {
                    path: path.to_string(),
                    message: format!(
                        "point ({}, {}) not in [0, {}] x [0, {}]",
                        p.x, p.y, self.width, self.depth
                    ),
                });
            }
        }
        Ok(())
    }
}

fn simple_polygon(path: &str, pts: &[Point]) -> Result<Polygon> {
    if pts.len() < 3 {
        return Err(Error::schema(path, "a polygon needs at least three vertices"));
    }
    let poly = Polygon::new(pts.to_vec());
    if !poly.is_simple() {
        return Err(Error::geometry(path, "polygon is not simple"));
    }
    Ok(poly)
}

fn check_partition(layout: &RoomLayout) -> Result<()> {
    let grid = layout.grid();
    for idx in grid.indices() {
        let c = grid.center(idx);
        let count = layout
            .floor_regions
            .iter()
            .filter(|r| r.polygon.contains(c))
            .count();
        if count != 1 {
            return Err(Error::FloorPartition {
                row: idx.row,
                col: idx.col,
                count,
            });
        }
    }
    Ok(())
}

//! Heat-map images of risk fields in binary PPM (P6).
//!
//! Image rows run top to bottom, so the room's `y` axis points up in the
//! picture: grid row `rows - 1` is the first pixel row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RiskField;
use crate::geometry::{Point, Polygon};
use crate::motion::ActivityTag;
use crate::pipeline::EvaluationResult;
use crate::room::RoomLayout;

pub type Rgb = [u8; 3];

pub const OUTLINE: Rgb = [40, 40, 40];
pub const PATH: Rgb = [90, 90, 90];

/// Marker colors for the three activities.
pub fn activity_color(tag: ActivityTag) -> Rgb {
    match tag {
        ActivityTag::SitToStand => [0, 170, 70],
        ActivityTag::Walking => [30, 60, 230],
        ActivityTag::StandToSit => [240, 90, 190],
    }
}

/// Piecewise-linear map from factor to color: blue at or below `low`,
/// yellow at exactly 1.0 and red at or above `high`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorScale {
    pub low: f64,
    pub high: f64,
    pub low_color: Rgb,
    pub neutral_color: Rgb,
    pub high_color: Rgb,
    pub occupied_color: Rgb,
}

impl Default for ColorScale {
    fn default() -> Self {
        Self {
            low: 0.7,
            high: 1.5,
            low_color: [33, 102, 172],
            neutral_color: [255, 237, 111],
            high_color: [215, 25, 28],
            occupied_color: [128, 128, 128],
        }
    }
}

impl ColorScale {
    pub fn color(&self, value: Option<f64>) -> Rgb {
        let Some(v) = value else {
            return self.occupied_color;
        };
        let (from, to, t) = if v <= 1.0 {
            (self.low_color, self.neutral_color, ((v - self.low) / (1.0 - self.low)).clamp(0.0, 1.0))
        } else {
            (self.neutral_color, self.high_color, ((v - 1.0) / (self.high - 1.0)).clamp(0.0, 1.0))
        };
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        [mix(from[0], to[0]), mix(from[1], to[1]), mix(from[2], to[2])]
    }
}

/// Owned RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width * height * 3],
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: isize, y: isize, c: Rgb) {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return;
        }
        let i = (y as usize * self.width + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&c);
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Option<Self> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while bytes.get(pos)?.is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while !bytes.get(pos)?.is_ascii_whitespace() {
                pos += 1;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
        }
        pos += 1;
        if fields[0] != "P6" || fields[3] != "255" {
            return None;
        }
        let width = fields[1].parse().ok()?;
        let height: usize = fields[2].parse().ok()?;
        let pixels = bytes.get(pos..)?.to_vec();
        (pixels.len() == width * height * 3).then_some(Self {
            width,
            height,
            pixels,
        })
    }
}

struct Canvas {
    image: Image,
    /// Pixels per meter.
    scale: f64,
}

impl Canvas {
    fn to_pixel(&self, p: Point) -> (f64, f64) {
        (p.x * self.scale, self.image.height as f64 - p.y * self.scale)
    }

    fn line(&mut self, a: Point, b: Point, color: Rgb) {
        let (x0, y0) = self.to_pixel(a);
        let (x1, y1) = self.to_pixel(b);
        let steps = ((x1 - x0).abs().max((y1 - y0).abs()) * 2.0).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let x = (x0 + (x1 - x0) * t).floor() as isize;
            let y = (y0 + (y1 - y0) * t).floor() as isize;
            self.image.set(x, y, color);
        }
    }

    fn outline(&mut self, poly: &Polygon, color: Rgb) {
        for e in poly.edges() {
            self.line(e.a, e.b, color);
        }
    }

    fn marker(&mut self, p: Point, radius: isize, color: Rgb) {
        let (x, y) = self.to_pixel(p);
        let (x, y) = (x.floor() as isize, y.floor() as isize);
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                self.image.set(x + dx, y + dy, color);
            }
        }
    }
}

fn field_canvas(
    field: &RiskField,
    layout: &RoomLayout,
    scale: &ColorScale,
    cell_pixels: usize,
) -> Result<Canvas> {
    let grid = layout.grid();
    field.check_dims(grid.rows, grid.cols)?;
    let cp = cell_pixels.max(1);
    let mut image = Image::new(grid.cols * cp, grid.rows * cp);
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let c = scale.color(field.values[row * grid.cols + col]);
            let top = (grid.rows - 1 - row) * cp;
            for y in top..top + cp {
                for x in col * cp..(col + 1) * cp {
                    image.set(x as isize, y as isize, c);
                }
            }
        }
    }
    let mut canvas = Canvas {
        image,
        scale: cp as f64 / grid.resolution,
    };
    for f in &layout.fixtures {
        canvas.outline(&f.footprint, OUTLINE);
    }
    for o in &layout.obstacles {
        canvas.outline(&o.polygon, OUTLINE);
    }
    Ok(canvas)
}

/// One square of `cell_pixels` per cell with fixture and obstacle outlines.
pub fn render_field(
    field: &RiskField,
    layout: &RoomLayout,
    scale: &ColorScale,
    cell_pixels: usize,
) -> Result<Image> {
    Ok(field_canvas(field, layout, scale, cell_pixels)?.image)
}

/// The baseline image with every trajectory drawn as a gray polyline and its
/// waypoints marked by activity color.
pub fn render_trajectories(
    result: &EvaluationResult,
    layout: &RoomLayout,
    scale: &ColorScale,
    cell_pixels: usize,
) -> Result<Image> {
    let mut canvas = field_canvas(&result.baseline, layout, scale, cell_pixels)?;
    for traj in &result.trajectories {
        for w in traj.points.windows(2) {
            canvas.line(w[0].position, w[1].position, PATH);
        }
    }
    let radius = (cell_pixels / 6).max(1) as isize;
    for traj in &result.trajectories {
        for p in &traj.points {
            canvas.marker(p.position, radius, activity_color(p.activity));
        }
    }
    Ok(canvas.image)
}

/// Comma-separated matrix, grid row 0 first, shortest round-trip decimal
/// form for values and `NA` for occupied cells.
pub fn export_grid(field: &RiskField) -> String {
    let mut out = String::new();
    for row in 0..field.rows {
        let line: Vec<String> = field.values[row * field.cols..(row + 1) * field.cols]
            .iter()
            .map(|v| match v {
                Some(x) => format!("{x:?}"),
                None => "NA".to_owned(),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Inverse of [`export_grid`].
pub fn import_grid(text: &str, label: crate::field::FieldLabel) -> Result<RiskField> {
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let before = values.len();
        for tok in line.split(',') {
            let tok = tok.trim();
            values.push(if tok == "NA" {
                None
            } else {
                Some(tok.parse::<f64>().map_err(|e| Error::GridParse {
                    line: i + 1,
                    message: format!("`{tok}`: {e}"),
                })?)
            });
        }
        let n = values.len() - before;
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(Error::GridParse {
                    line: i + 1,
                    message: format!("expected {c} values, found {n}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    Ok(RiskField::new(label, rows, cols.unwrap_or(0), values))
}

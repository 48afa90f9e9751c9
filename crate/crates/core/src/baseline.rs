//! Static risk factors and their product, the room baseline.
//!
//! Each factor is a multiplier around 1.0: above 1 raises fall risk, below 1
//! lowers it, and exactly 1.0 means the factor does not apply at that cell.
//! The baseline at a free cell is `floor · light · support · door`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{FieldLabel, RiskField};
use crate::geometry::Point;
use crate::room::{
    nearest_support, DoorOperation, GridIndex, LightingMode, Raster, RoomLayout, Surface,
    WidthClass,
};

/// Distances below this are clamped when computing illuminance, so a cell
/// sitting under a source does not see unbounded lux.
pub const MIN_LIGHT_DISTANCE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceCoefficients {
    pub resilient: f64,
    pub hard: f64,
}

impl Default for SurfaceCoefficients {
    fn default() -> Self {
        Self {
            resilient: 0.0,
            hard: 0.05,
        }
    }
}

/// Additive risk per neighboring cell of a different surface, keyed by
/// (this cell's surface → neighbor's surface).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransitionCoefficients {
    pub resilient_to_hard: f64,
    pub hard_to_resilient: f64,
}

impl Default for TransitionCoefficients {
    fn default() -> Self {
        Self {
            resilient_to_hard: 0.05,
            hard_to_resilient: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoorCoefficients {
    pub swing_narrow: f64,
    pub swing_wide: f64,
    pub slide_narrow: f64,
    pub slide_wide: f64,
}

impl Default for DoorCoefficients {
    fn default() -> Self {
        Self {
            swing_narrow: 1.20,
            swing_wide: 1.10,
            slide_narrow: 1.07,
            slide_wide: 1.04,
        }
    }
}

impl DoorCoefficients {
    pub fn factor(&self, operation: DoorOperation, width: WidthClass) -> f64 {
        match (operation, width) {
            (DoorOperation::Swing, WidthClass::Narrow) => self.swing_narrow,
            (DoorOperation::Swing, WidthClass::Wide) => self.swing_wide,
            (DoorOperation::Slide, WidthClass::Narrow) => self.slide_narrow,
            (DoorOperation::Slide, WidthClass::Wide) => self.slide_wide,
        }
    }
}

/// Coefficients of the static factor functions. Defaults are the published
/// coefficient table; `config/table1_defaults.toml` lists them row by row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorCoefficients {
    pub floor_surface: SurfaceCoefficients,
    pub floor_transition: TransitionCoefficients,
    pub light_low: f64,
    pub light_mid: f64,
    /// `(l1, l2)` in lux.
    pub lux_thresholds: [f64; 2],
    /// Numerator within arm's length.
    pub support_close_numerator: f64,
    /// Numerator at the edge of reach.
    pub support_far_numerator: f64,
    /// `(d1, d2)` in meters: arm's length and maximum reach.
    pub reach_distances: [f64; 2],
    pub door: DoorCoefficients,
}

impl Default for FactorCoefficients {
    fn default() -> Self {
        Self {
            floor_surface: SurfaceCoefficients::default(),
            floor_transition: TransitionCoefficients::default(),
            light_low: 1.07,
            light_mid: 1.03,
            lux_thresholds: [100.0, 500.0],
            support_close_numerator: 0.8,
            support_far_numerator: 1.0,
            reach_distances: [0.8, 1.5],
            door: DoorCoefficients::default(),
        }
    }
}

impl FactorCoefficients {
    /// Every coefficient at its no-effect value.
    pub fn neutral() -> Self {
        Self {
            floor_surface: SurfaceCoefficients {
                resilient: 0.0,
                hard: 0.0,
            },
            floor_transition: TransitionCoefficients {
                resilient_to_hard: 0.0,
                hard_to_resilient: 0.0,
            },
            light_low: 1.0,
            light_mid: 1.0,
            support_close_numerator: 1.0,
            support_far_numerator: 1.0,
            door: DoorCoefficients {
                swing_narrow: 1.0,
                swing_wide: 1.0,
                slide_narrow: 1.0,
                slide_wide: 1.0,
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [l1, l2] = self.lux_thresholds;
        if !(l1 >= 0.0 && l2 >= l1) {
            return Err(Error::schema(
                "coefficients.lux_thresholds",
                "need 0 <= l1 <= l2",
            ));
        }
        let [d1, d2] = self.reach_distances;
        if !(d1 >= 0.0 && d2 > d1) {
            return Err(Error::schema(
                "coefficients.reach_distances",
                "need 0 <= d1 < d2",
            ));
        }
        let positive = [
            ("coefficients.light_low", self.light_low),
            ("coefficients.light_mid", self.light_mid),
            ("coefficients.support_close_numerator", self.support_close_numerator),
            ("coefficients.support_far_numerator", self.support_far_numerator),
            ("coefficients.door.swing_narrow", self.door.swing_narrow),
            ("coefficients.door.swing_wide", self.door.swing_wide),
            ("coefficients.door.slide_narrow", self.door.slide_narrow),
            ("coefficients.door.slide_wide", self.door.slide_wide),
        ];
        for (path, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::schema(path, "factor must be positive"));
            }
        }
        Ok(())
    }

    fn surface_constant(&self, s: Surface) -> f64 {
        match s {
            Surface::Resilient => self.floor_surface.resilient,
            Surface::Hard => self.floor_surface.hard,
        }
    }

    fn transition_constant(&self, from: Surface, to: Surface) -> f64 {
        match (from, to) {
            (Surface::Resilient, Surface::Hard) => self.floor_transition.resilient_to_hard,
            (Surface::Hard, Surface::Resilient) => self.floor_transition.hard_to_resilient,
            _ => 0.0,
        }
    }
}

/// `1 + c_i + Σ_j n_j c_ij` over the axis-aligned neighbors that exist.
pub fn floor_factor(cell: GridIndex, raster: &Raster, coeffs: &FactorCoefficients) -> f64 {
    let own = raster.surface(cell);
    let transitions: f64 = raster
        .grid
        .neighbors4(cell)
        .map(|n| raster.surface(n))
        .filter(|&s| s != own)
        .map(|s| coeffs.transition_constant(own, s))
        .sum();
    1.0 + (coeffs.surface_constant(own) + transitions)
}

/// Inverse-square illuminance from isotropic point sources active in `mode`.
pub fn illuminance(point: Point, layout: &RoomLayout, mode: LightingMode) -> f64 {
    layout
        .lights
        .iter()
        .filter(|l| l.is_active(mode))
        .map(|l| {
            let d = point.distance(l.position).max(MIN_LIGHT_DISTANCE);
            l.luminous_flux / (4.0 * PI * d * d)
        })
        .sum()
}

pub fn light_factor(lux: f64, coeffs: &FactorCoefficients) -> Result<f64> {
    if !(lux >= 0.0) {
        return Err(Error::OutOfRange {
            field: "lux",
            value: lux,
            expected: "a non-negative illuminance",
        });
    }
    let [l1, l2] = coeffs.lux_thresholds;
    Ok(if lux < l1 {
        coeffs.light_low
    } else if lux <= l2 {
        coeffs.light_mid
    } else {
        1.0
    })
}

/// Support factor for an object of level `support_level` at distance `d`.
///
/// Full effect inside `d1`, a linear fade of the numerator up to `d2`, and
/// no effect at all beyond `d2`.
pub fn support_factor_at(d: f64, support_level: f64, coeffs: &FactorCoefficients) -> f64 {
    let [d1, d2] = coeffs.reach_distances;
    let close = coeffs.support_close_numerator;
    let far = coeffs.support_far_numerator;
    if d < d1 {
        close / support_level
    } else if d <= d2 {
        (close + (far - close) * (d - d1) / (d2 - d1)) / support_level
    } else {
        1.0
    }
}

pub fn support_factor(cell: GridIndex, layout: &RoomLayout, coeffs: &FactorCoefficients) -> f64 {
    let center = layout.grid().center(cell);
    match nearest_support(center, layout) {
        Ok((obj, d)) => support_factor_at(d, obj.support_level, coeffs),
        Err(_) => 1.0,
    }
}

/// Product of the factors of every door whose effect zone holds the cell center.
pub fn door_factor(cell: GridIndex, layout: &RoomLayout, coeffs: &FactorCoefficients) -> f64 {
    let center = layout.grid().center(cell);
    layout
        .doors
        .iter()
        .filter(|d| d.effect_zone.contains(center))
        .map(|d| coeffs.door.factor(d.operation, d.width_class))
        .product()
}

/// Per-factor fields and their product.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub mode: LightingMode,
    pub floor: RiskField,
    pub light: RiskField,
    pub support: RiskField,
    pub door: RiskField,
    pub baseline: RiskField,
}

impl Baseline {
    pub fn factor_fields(&self) -> [&RiskField; 4] {
        [&self.floor, &self.light, &self.support, &self.door]
    }
}

#[derive(Debug, Clone, Copy)]
struct CellFactors {
    floor: f64,
    light: f64,
    support: f64,
    door: f64,
}

/// Evaluate every static factor over the grid. Occupied cells carry `None`.
pub fn baseline(
    layout: &RoomLayout,
    raster: &Raster,
    mode: LightingMode,
    coeffs: &FactorCoefficients,
) -> Baseline {
    let grid = raster.grid;
    let cells: Vec<Option<CellFactors>> = (0..grid.len())
        .into_par_iter()
        .map(|offset| {
            let idx = grid.index_of(offset);
            if raster.is_occupied(idx) {
                return None;
            }
            let lux = illuminance(grid.center(idx), layout, mode);
            Some(CellFactors {
                floor: floor_factor(idx, raster, coeffs),
                light: light_factor(lux, coeffs).expect("illuminance is never negative"),
                support: support_factor(idx, layout, coeffs),
                door: door_factor(idx, layout, coeffs),
            })
        })
        .collect();

    let field = |label: FieldLabel, pick: fn(&CellFactors) -> f64| {
        RiskField::new(
            label,
            grid.rows,
            grid.cols,
            cells.iter().map(|c| c.as_ref().map(pick)).collect(),
        )
    };
    Baseline {
        mode,
        floor: field(FieldLabel::Floor, |c| c.floor),
        light: field(FieldLabel::Light, |c| c.light),
        support: field(FieldLabel::Support, |c| c.support),
        door: field(FieldLabel::Door, |c| c.door),
        baseline: field(FieldLabel::Baseline, |c| {
            c.floor * c.light * c.support * c.door
        }),
    }
}

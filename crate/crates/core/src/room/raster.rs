use serde::{Deserialize, Serialize};

use super::{RoomLayout, Surface};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndex {
    pub row: usize,
    pub col: usize,
}

impl GridIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Cell layout of the evaluation grid. Row 0 is the `y = 0` edge of the room.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub resolution: f64,
}

impl GridSpec {
    pub fn for_room(width: f64, depth: f64, resolution: f64) -> Self {
        // tolerate 4.0 / 0.1 = 40.00000000000001
        let count = |extent: f64| ((extent / resolution) - 1e-9).ceil().max(1.0) as usize;
        Self {
            rows: count(depth),
            cols: count(width),
            resolution,
        }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, idx: GridIndex) -> Point {
        Point::new(
            (idx.col as f64 + 0.5) * self.resolution,
            (idx.row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn offset(&self, idx: GridIndex) -> usize {
        idx.row * self.cols + idx.col
    }

    pub fn index_of(&self, offset: usize) -> GridIndex {
        GridIndex::new(offset / self.cols, offset % self.cols)
    }

    /// Cell containing `p`; points on the far room edge map to the last cell.
    pub fn cell_of(&self, p: Point) -> Option<GridIndex> {
        if !p.is_finite() || p.x < 0.0 || p.y < 0.0 {
            return None;
        }
        let col = (p.x / self.resolution).floor() as usize;
        let row = (p.y / self.resolution).floor() as usize;
        let eps = 1e-9;
        let col = if col == self.cols && p.x <= self.cols as f64 * self.resolution + eps {
            self.cols - 1
        } else {
            col
        };
        let row = if row == self.rows && p.y <= self.rows as f64 * self.resolution + eps {
            self.rows - 1
        } else {
            row
        };
        (row < self.rows && col < self.cols).then_some(GridIndex::new(row, col))
    }

    pub fn indices(&self) -> impl Iterator<Item = GridIndex> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| GridIndex::new(r, c)))
    }

    /// Axis-aligned neighbors that exist on the grid (up to four).
    pub fn neighbors4(&self, idx: GridIndex) -> impl Iterator<Item = GridIndex> {
        let GridIndex { row, col } = idx;
        let (rows, cols) = (self.rows, self.cols);
        [
            (row > 0).then(|| GridIndex::new(row - 1, col)),
            (row + 1 < rows).then(|| GridIndex::new(row + 1, col)),
            (col > 0).then(|| GridIndex::new(row, col - 1)),
            (col + 1 < cols).then(|| GridIndex::new(row, col + 1)),
        ]
        .into_iter()
        .flatten()
    }
}

/// Per-cell floor surface and occupancy.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub grid: GridSpec,
    surface: Vec<Surface>,
    occupied: Vec<bool>,
}

impl Raster {
    /// Assumes a validated layout, where every cell center lies in some floor region.
    pub fn new(layout: &RoomLayout) -> Self {
        let grid = layout.grid();
        let mut surface = Vec::with_capacity(grid.len());
        let mut occupied = Vec::with_capacity(grid.len());
        for idx in grid.indices() {
            let c = grid.center(idx);
            surface.push(layout.surface_at(c).unwrap_or(Surface::Resilient));
            occupied.push(layout.is_occupied(c));
        }
        Self {
            grid,
            surface,
            occupied,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.grid.len()
    }

    pub fn surface(&self, idx: GridIndex) -> Surface {
        self.surface[self.grid.offset(idx)]
    }

    pub fn is_occupied(&self, idx: GridIndex) -> bool {
        self.occupied[self.grid.offset(idx)]
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupied
    }
}

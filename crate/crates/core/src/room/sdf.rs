use super::{GridIndex, GridSpec, RoomLayout};
use crate::geometry::Point;

/// Signed distance to the nearest obstacle boundary, sampled at cell centers.
///
/// Positive in free space, negative inside obstacles. The room outline counts
/// as a wall. Between centers the field is bilinear (linearly extrapolated in
/// the half cell along the room edge).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub grid: GridSpec,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn new(layout: &RoomLayout) -> Self {
        let grid = layout.grid();
        let values = grid
            .indices()
            .map(|idx| layout.signed_distance(grid.center(idx)))
            .collect();
        Self { grid, values }
    }

    pub fn at(&self, idx: GridIndex) -> f64 {
        self.values[self.grid.offset(idx)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.cols + col]
    }

    fn axis(coord: f64, res: f64, n: usize) -> (usize, usize, f64) {
        if n == 1 {
            return (0, 0, 0.0);
        }
        let f = coord / res - 0.5;
        let i0 = (f.floor().max(0.0) as usize).min(n - 2);
        (i0, i0 + 1, f - i0 as f64)
    }

    pub fn sample(&self, p: Point) -> f64 {
        self.sample_with_gradient(p).0
    }

    pub fn gradient(&self, p: Point) -> Point {
        self.sample_with_gradient(p).1
    }

    #[inline]
    pub fn sample_with_gradient(&self, p: Point) -> (f64, Point) {
        let res = self.grid.resolution;
        let (c0, c1, tx) = Self::axis(p.x, res, self.grid.cols);
        let (r0, r1, ty) = Self::axis(p.y, res, self.grid.rows);
        let v00 = self.value(r0, c0);
        let v01 = self.value(r0, c1);
        let v10 = self.value(r1, c0);
        let v11 = self.value(r1, c1);
        let bottom = v00 + (v01 - v00) * tx;
        let top = v10 + (v11 - v10) * tx;
        let value = bottom + (top - bottom) * ty;
        let dx = ((v01 - v00) * (1.0 - ty) + (v11 - v10) * ty) / res;
        let dy = (top - bottom) / res;
        let dx = if self.grid.cols == 1 { 0.0 } else { dx };
        let dy = if self.grid.rows == 1 { 0.0 } else { dy };
        (value, Point::new(dx, dy))
    }
}

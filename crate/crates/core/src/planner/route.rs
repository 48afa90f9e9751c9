//! Grid route used to initialize the planner when the straight line collides.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::PlannerParams;
use crate::geometry::Point;
use crate::room::{DistanceField, GridIndex, RoomLayout};

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    cell: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest 8-connected route over cells whose center clears obstacles,
/// walked at full speed (see [`super::walk`]).
///
/// Returns `None` when the cells are disconnected or the route is longer than
/// the horizon can cover.
pub(super) fn route(
    start: Point,
    goal: Point,
    layout: &RoomLayout,
    field: &DistanceField,
    params: &PlannerParams,
) -> Option<Vec<Point>> {
    let grid = layout.grid();
    let free: Vec<bool> = field.values().iter().map(|&v| v >= params.clearance).collect();
    let entry = nearest_free_cell(start, &grid, &free)?;
    let exit = nearest_free_cell(goal, &grid, &free)?;

    let n = grid.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[entry] = 0.0;
    heap.push(Entry { cost: 0.0, cell: entry });
    while let Some(Entry { cost, cell }) = heap.pop() {
        if cell == exit {
            break;
        }
        if cost > dist[cell] {
            continue;
        }
        let idx = grid.index_of(cell);
        for (dr, dc) in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            let (r, c) = (idx.row as isize + dr, idx.col as isize + dc);
            if r < 0 || c < 0 || r >= grid.rows as isize || c >= grid.cols as isize {
                continue;
            }
            let next = grid.offset(GridIndex::new(r as usize, c as usize));
            if !free[next] {
                continue;
            }
            if dr != 0 && dc != 0 {
                let a = grid.offset(GridIndex::new(r as usize, idx.col));
                let b = grid.offset(GridIndex::new(idx.row, c as usize));
                if !free[a] || !free[b] {
                    continue;
                }
            }
            let step = if dr != 0 && dc != 0 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            };
            let candidate = cost + step * grid.resolution;
            if candidate < dist[next] {
                dist[next] = candidate;
                prev[next] = cell;
                heap.push(Entry {
                    cost: candidate,
                    cell: next,
                });
            }
        }
    }
    if !dist[exit].is_finite() {
        return None;
    }

    let mut cells = vec![exit];
    while let Some(&c) = cells.last() {
        if c == entry {
            break;
        }
        cells.push(prev[c]);
    }
    cells.reverse();
    let mut polyline = vec![start];
    polyline.extend(cells.iter().map(|&c| grid.center(grid.index_of(c))));
    polyline.push(goal);
    polyline.dedup();
    super::walk(&polyline, params.horizon, params.max_step())
}

/// Free cell center nearest to `p`, searched among the cells around it.
fn nearest_free_cell(p: Point, grid: &crate::room::GridSpec, free: &[bool]) -> Option<usize> {
    let home = grid.cell_of(p)?;
    let mut best: Option<(f64, usize)> = None;
    for radius in 0..=2isize {
        for dr in -radius..=radius {
            for dc in -radius..=radius {
                let (r, c) = (home.row as isize + dr, home.col as isize + dc);
                if r < 0 || c < 0 || r >= grid.rows as isize || c >= grid.cols as isize {
                    continue;
                }
                let idx = GridIndex::new(r as usize, c as usize);
                let off = grid.offset(idx);
                if !free[off] {
                    continue;
                }
                let d = grid.center(idx).distance(p);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, off));
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|(_, off)| off)
}

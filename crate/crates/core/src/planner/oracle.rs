//! Exhaustive reference planner on a coarse grid.
//!
//! Interior waypoints are restricted to the centers of coarse cells that
//! clear obstacles (checked against exact geometry). Dynamic programming over
//! (step, cell) then yields the global optimum of the same objective under
//! the same step limit. It is slow and only meant for checking the descent
//! planner on small rooms.

use super::{PlannerParams, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::room::{GridIndex, GridSpec, RoomLayout};

/// Largest `cells × horizon` the oracle will take on.
pub const STATE_LIMIT: usize = 4_000_000;

/// Optimal trajectory with interior waypoints on cell centers of a grid with
/// spacing `cell`. Endpoints are kept exact.
pub fn oracle_plan(
    start: Point,
    goal: Point,
    layout: &RoomLayout,
    params: &PlannerParams,
    cell: f64,
) -> Result<Trajectory> {
    params.validate()?;
    let h = params.horizon;
    let grid = GridSpec::for_room(layout.width, layout.depth, cell);
    let states = grid.len() * h;
    if states > STATE_LIMIT {
        return Err(Error::StateSpaceTooLarge {
            states,
            limit: STATE_LIMIT,
        });
    }
    let step = params.max_step() + 1e-12;
    let esp = super::support_points(layout, params.support_spacing);
    let reach_sq = params.support_reach * params.support_reach;
    let cost = |p: Point| -> f64 {
        let goal_term = params.lambda * (p - goal).norm_sq();
        let support = if esp.is_empty() {
            0.0
        } else {
            esp.iter()
                .map(|&e| (p - e).norm_sq())
                .fold(reach_sq, f64::min)
        };
        goal_term + support
    };

    if h == 2 {
        if start.distance(goal) > step {
            return Err(Error::Infeasible("goal is out of reach in one step".into()));
        }
        return Ok(finish(vec![start, goal], cost(start) + cost(goal)));
    }

    let cells: Vec<Point> = grid
        .indices()
        .map(|idx| grid.center(idx))
        .filter(|&c| layout.signed_distance(c) >= params.clearance)
        .collect();
    let index: std::collections::HashMap<GridIndex, usize> = grid
        .indices()
        .filter(|&idx| layout.signed_distance(grid.center(idx)) >= params.clearance)
        .enumerate()
        .map(|(i, idx)| (idx, i))
        .collect();
    let ids: Vec<GridIndex> = {
        let mut v: Vec<(GridIndex, usize)> = index.iter().map(|(&k, &i)| (k, i)).collect();
        v.sort_by_key(|&(_, i)| i);
        v.into_iter().map(|(k, _)| k).collect()
    };
    let local_cost: Vec<f64> = cells.iter().map(|&c| cost(c)).collect();

    let span = (step / cell).floor() as isize;
    let offsets: Vec<(isize, isize)> = (-span..=span)
        .flat_map(|dr| (-span..=span).map(move |dc| (dr, dc)))
        .filter(|&(dr, dc)| ((dr * dr + dc * dc) as f64).sqrt() * cell <= step)
        .collect();

    let n = cells.len();
    let inf = f64::INFINITY;
    // value[i]: best cost of waypoints 0..=t ending at cell i
    let mut value: Vec<f64> = cells
        .iter()
        .zip(&local_cost)
        .map(|(&c, &lc)| {
            if start.distance(c) <= step {
                cost(start) + lc
            } else {
                inf
            }
        })
        .collect();
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(h - 3);

    for _ in 2..h - 1 {
        let mut next = vec![inf; n];
        let mut parent = vec![usize::MAX; n];
        for (i, id) in ids.iter().enumerate() {
            let mut best = inf;
            let mut arg = usize::MAX;
            for &(dr, dc) in &offsets {
                let (r, c) = (id.row as isize + dr, id.col as isize + dc);
                if r < 0 || c < 0 {
                    continue;
                }
                if let Some(&j) = index.get(&GridIndex::new(r as usize, c as usize)) {
                    if value[j] < best || (value[j] == best && j < arg) {
                        best = value[j];
                        arg = j;
                    }
                }
            }
            if best.is_finite() {
                next[i] = best + local_cost[i];
                parent[i] = arg;
            }
        }
        value = next;
        parents.push(parent);
    }

    let mut best = inf;
    let mut last = usize::MAX;
    for (i, &c) in cells.iter().enumerate() {
        if goal.distance(c) <= step && value[i] < best {
            best = value[i];
            last = i;
        }
    }
    if !best.is_finite() {
        return Err(Error::Infeasible(
            "no collision-free coarse path within the horizon".into(),
        ));
    }

    let mut chain = vec![last];
    for parent in parents.iter().rev() {
        let here = *chain.last().expect("chain starts non-empty");
        chain.push(parent[here]);
    }
    chain.reverse();
    let mut points = vec![start];
    points.extend(chain.iter().map(|&i| cells[i]));
    points.push(goal);
    Ok(finish(points, best + cost(goal)))
}

fn finish(points: Vec<Point>, value: f64) -> Trajectory {
    Trajectory {
        points,
        start_fixture: None,
        goal_fixture: None,
        converged: true,
        objective_value: value,
        iterations: 0,
    }
}

/// Bound on how much snapping each interior waypoint to a cell center can
/// raise the objective above the continuous optimum. `e` is the largest
/// snapping distance (half the cell diagonal); for each waypoint at distance
/// `g` from the goal and `s` from the nearest support the bound adds
/// `λ(2ge + e²) + 2se + e²`.
pub fn discretization_slack(traj: &Trajectory, layout: &RoomLayout, params: &PlannerParams, cell: f64) -> f64 {
    let e = cell * std::f64::consts::SQRT_2 / 2.0;
    let esp = super::support_points(layout, params.support_spacing);
    let goal = traj.goal();
    let n = traj.points.len();
    traj.points[1..n - 1]
        .iter()
        .map(|&p| {
            let g = p.distance(goal);
            let s = esp
                .iter()
                .map(|&q| p.distance(q))
                .fold(params.support_reach, f64::min);
            let support = if esp.is_empty() { 0.0 } else { 2.0 * s * e + e * e };
            params.lambda * (2.0 * g * e + e * e) + support
        })
        .sum()
}

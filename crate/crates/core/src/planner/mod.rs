//! Patient trajectory prediction.
//!
//! A trajectory is `h` waypoints one time step `dt` apart. The planner
//! minimizes
//!
//! ```text
//! J = Σ_t  λ‖p_t − goal‖² + min_i ‖p_t − esp_i‖²
//! ```
//!
//! subject to every waypoint keeping `clearance` from obstacles and every step
//! being at most `v_max · dt` long. The support term is capped at the squared
//! reach distance, so supports out of reach exert no pull.
//!
//! The solver is projected gradient descent on the waypoints with fixed
//! endpoints. Each trial step is followed by a projection onto the velocity
//! limit and a push out of obstacles; a step is accepted only if the result is
//! feasible and lowers the penalized objective.

mod endpoints;
pub mod oracle;
mod route;

pub use endpoints::{sample_endpoints, sample_in_zone, MAX_SAMPLE_ATTEMPTS};
pub use oracle::oracle_plan;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::room::{DistanceField, FixtureKind, RoomLayout};

pub const DEFAULT_SEED: u64 = 20_200_715;

/// Number of jittered restarts tried when no clean initialization is feasible.
pub const RESTARTS: usize = 5;

const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerParams {
    /// Weight of the goal term against the support term.
    pub lambda: f64,
    /// Number of waypoints, endpoints included.
    pub horizon: usize,
    /// Seconds per step.
    pub dt: f64,
    /// Meters per second.
    pub v_max: f64,
    /// Minimum signed distance from obstacles for every waypoint.
    pub clearance: f64,
    /// Maximum spacing of external support points along support geometry.
    pub support_spacing: f64,
    /// Supports farther than this exert no pull.
    pub support_reach: f64,
    pub max_iterations: usize,
    /// Relative objective change below which descent stops.
    pub convergence_tol: f64,
    pub obstacle_penalty_weight: f64,
    pub seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            horizon: 50,
            dt: 0.5,
            v_max: 0.856,
            clearance: 0.15,
            support_spacing: 0.2,
            support_reach: 1.5,
            max_iterations: 2000,
            convergence_tol: 1e-6,
            obstacle_penalty_weight: 50.0,
            seed: DEFAULT_SEED,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, msg: &str| Err(Error::schema(format!("planner.{path}"), msg));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda", "must be >= 0");
        }
        if self.horizon < 2 {
            return bad("horizon", "must be >= 2");
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return bad("v_max", "must be > 0");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be > 0");
        }
        if !(self.clearance >= 0.0) {
            return bad("clearance", "must be >= 0");
        }
        if !(self.support_spacing > 0.0) {
            return bad("support_spacing", "must be > 0");
        }
        if !(self.support_reach > 0.0) {
            return bad("support_reach", "must be > 0");
        }
        if !(self.convergence_tol >= 0.0) {
            return bad("convergence_tol", "must be >= 0");
        }
        if !(self.obstacle_penalty_weight >= 0.0) {
            return bad("obstacle_penalty_weight", "must be >= 0");
        }
        Ok(())
    }

    /// Longest allowed step between consecutive waypoints.
    pub fn max_step(&self) -> f64 {
        self.v_max * self.dt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Waypoint `t` is `points[t]`.
    pub points: Vec<Point>,
    pub start_fixture: Option<FixtureKind>,
    pub goal_fixture: Option<FixtureKind>,
    /// Both hard constraints hold on the returned waypoints.
    pub converged: bool,
    pub objective_value: f64,
    pub iterations: usize,
}

impl Trajectory {
    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn goal(&self) -> Point {
        *self.points.last().expect("trajectory is never empty")
    }

    pub fn path_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .fold(0.0, f64::max)
    }

    pub fn with_fixtures(mut self, start: FixtureKind, goal: FixtureKind) -> Self {
        self.start_fixture = Some(start);
        self.goal_fixture = Some(goal);
        self
    }
}

/// External support points: every support object's outline sampled at no
/// more than `spacing`, in layout order.
pub fn support_points(layout: &RoomLayout, spacing: f64) -> Vec<Point> {
    layout
        .support_objects
        .iter()
        .flat_map(|s| s.geometry.sample(spacing))
        .collect()
}

/// Nearest support point and squared distance, capped at `reach²`.
fn support_term(p: Point, esp: &[Point], reach: f64) -> (f64, Option<Point>) {
    let cap = reach * reach;
    let mut best = cap;
    let mut best_point = None;
    for &e in esp {
        let d = p.distance_sq(e);
        if d < best {
            best = d;
            best_point = Some(e);
        }
    }
    if esp.is_empty() {
        (0.0, None)
    } else {
        (best, best_point)
    }
}

/// Unpenalized objective of a waypoint sequence.
pub fn objective(points: &[Point], goal: Point, esp: &[Point], params: &PlannerParams) -> f64 {
    points
        .iter()
        .map(|&p| {
            params.lambda * p.distance_sq(goal) + support_term(p, esp, params.support_reach).0
        })
        .sum()
}

/// Objective of a trajectory against its own final waypoint as goal.
pub fn trajectory_objective(traj: &Trajectory, esp: &[Point], params: &PlannerParams) -> f64 {
    objective(&traj.points, traj.goal(), esp, params)
}

struct Problem<'a> {
    start: Point,
    goal: Point,
    esp: Vec<Point>,
    field: &'a DistanceField,
    params: &'a PlannerParams,
    step: f64,
}

impl Problem<'_> {
    fn penalty(&self, p: Point) -> f64 {
        let gap = (self.params.clearance - self.field.sample(p)).max(0.0);
        gap * gap
    }

    fn penalized(&self, x: &[Point]) -> f64 {
        objective(x, self.goal, &self.esp, self.params)
            + self.params.obstacle_penalty_weight * x.iter().map(|&p| self.penalty(p)).sum::<f64>()
    }

    fn gradient(&self, x: &[Point]) -> Vec<Point> {
        let last = x.len() - 1;
        x.iter()
            .enumerate()
            .map(|(t, &p)| {
                if t == 0 || t == last {
                    return Point::default();
                }
                let mut g = (p - self.goal) * (2.0 * self.params.lambda);
                if let (_, Some(e)) = support_term(p, &self.esp, self.params.support_reach) {
                    g = g + (p - e) * 2.0;
                }
                let (sd, grad) = self.field.sample_with_gradient(p);
                let gap = self.params.clearance - sd;
                if gap > 0.0 {
                    g = g - grad * (2.0 * self.params.obstacle_penalty_weight * gap);
                }
                g
            })
            .collect()
    }

    fn is_free(&self, p: Point) -> bool {
        self.field.sample(p) >= self.params.clearance - FEASIBILITY_SLACK
    }

    fn feasible(&self, x: &[Point]) -> bool {
        let last = x.len() - 1;
        x.iter()
            .enumerate()
            .all(|(t, &p)| t == 0 || t == last || self.is_free(p))
            && x.windows(2)
                .all(|w| w[0].distance(w[1]) <= self.step + FEASIBILITY_SLACK)
    }

    /// Alternating projections onto the step-length limit and free space.
    fn project(&self, x: &mut [Point]) {
        let last = x.len() - 1;
        x[0] = self.start;
        x[last] = self.goal;
        for _ in 0..4 {
            limit_steps(x, self.step, 200);
            for p in x[1..last].iter_mut() {
                self.push_out(p);
            }
        }
        limit_steps(x, self.step, 200);
    }

    fn push_out(&self, p: &mut Point) {
        for _ in 0..4 {
            let (sd, grad) = self.field.sample_with_gradient(*p);
            let gap = self.params.clearance - sd;
            if gap <= 0.0 {
                return;
            }
            let g2 = grad.norm_sq();
            if g2 < 1e-12 {
                return;
            }
            *p = *p + grad * ((gap + 1e-6) / g2);
        }
    }
}

/// Cyclic projection of consecutive displacements onto `‖Δ‖ ≤ max_step`,
/// keeping both endpoints fixed.
fn limit_steps(x: &mut [Point], max_step: f64, sweeps: usize) {
    let last = x.len() - 1;
    for _ in 0..sweeps {
        let mut worst: f64 = 0.0;
        for t in 0..last {
            let d = x[t + 1] - x[t];
            let n = d.norm();
            if n <= max_step {
                continue;
            }
            let excess = n - max_step;
            worst = worst.max(excess);
            let u = d * (1.0 / n);
            match (t == 0, t + 1 == last) {
                (true, true) => {}
                (true, false) => x[t + 1] = x[t + 1] - u * excess,
                (false, true) => x[t] = x[t] + u * excess,
                (false, false) => {
                    x[t] = x[t] + u * (0.5 * excess);
                    x[t + 1] = x[t + 1] - u * (0.5 * excess);
                }
            }
        }
        if worst <= 1e-13 {
            break;
        }
    }
}

/// Waypoints that follow `polyline` at `max_step` per step and then wait at
/// its end. `None` if the polyline is too long for the horizon.
pub fn walk(polyline: &[Point], horizon: usize, max_step: f64) -> Option<Vec<Point>> {
    let lengths: Vec<f64> = polyline.windows(2).map(|w| w[0].distance(w[1])).collect();
    let total: f64 = lengths.iter().sum();
    let end = *polyline.last()?;
    if total > max_step * (horizon - 1) as f64 + FEASIBILITY_SLACK {
        return None;
    }
    let mut out = Vec::with_capacity(horizon);
    let mut seg = 0;
    let mut walked = 0.0;
    for t in 0..horizon {
        let target = t as f64 * max_step;
        if target >= total {
            out.push(end);
            continue;
        }
        while walked + lengths[seg] < target {
            walked += lengths[seg];
            seg += 1;
        }
        let s = (target - walked) / lengths[seg];
        out.push(polyline[seg] + (polyline[seg + 1] - polyline[seg]) * s);
    }
    Some(out)
}

/// Result of [`plan_traced`]: the trajectory plus the penalized objective
/// after every accepted iteration (entry 0 is the initialization).
#[derive(Debug, Clone)]
pub struct PlanTrace {
    pub trajectory: Trajectory,
    pub history: Vec<f64>,
}

pub fn plan(
    start: Point,
    goal: Point,
    layout: &RoomLayout,
    field: &DistanceField,
    params: &PlannerParams,
) -> Result<Trajectory> {
    plan_traced(start, goal, layout, field, params).map(|t| t.trajectory)
}

pub fn plan_traced(
    start: Point,
    goal: Point,
    layout: &RoomLayout,
    field: &DistanceField,
    params: &PlannerParams,
) -> Result<PlanTrace> {
    params.validate()?;
    let h = params.horizon;
    let problem = Problem {
        start,
        goal,
        esp: support_points(layout, params.support_spacing),
        field,
        params,
        step: params.max_step(),
    };
    for (name, p) in [("start", start), ("goal", goal)] {
        if !layout.contains(p) || !problem.is_free(p) {
            return Err(Error::Infeasible(format!(
                "{name} ({:.3}, {:.3}) is not in free space",
                p.x, p.y
            )));
        }
    }

    if start == goal {
        let points = vec![start; h];
        let value = objective(&points, goal, &problem.esp, params);
        return Ok(PlanTrace {
            trajectory: Trajectory {
                points,
                start_fixture: None,
                goal_fixture: None,
                converged: true,
                objective_value: value,
                iterations: 0,
            },
            history: vec![value],
        });
    }

    let reach = problem.step * (h - 1) as f64;
    if start.distance(goal) > reach + FEASIBILITY_SLACK {
        return Err(Error::Infeasible(format!(
            "goal is {:.2} m away but {h} steps cover at most {reach:.2} m",
            start.distance(goal)
        )));
    }

    let init = initialize(&problem, layout)?;
    Ok(descend(&problem, init))
}

fn initialize(problem: &Problem<'_>, layout: &RoomLayout) -> Result<Vec<Point>> {
    let h = problem.params.horizon;
    let straight = walk(&[problem.start, problem.goal], h, problem.step)
        .expect("reach was checked before initialization");
    if problem.feasible(&straight) {
        return Ok(straight);
    }
    let routed = route::route(problem.start, problem.goal, layout, problem.field, problem.params);
    let base = match routed {
        Some(mut r) => {
            if problem.feasible(&r) {
                return Ok(r);
            }
            problem.project(&mut r);
            if problem.feasible(&r) {
                return Ok(r);
            }
            r
        }
        None => straight,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(problem.params.seed);
    let jitter = 2.0 * layout.grid_resolution;
    for _ in 0..RESTARTS {
        let mut x = base.clone();
        let last = x.len() - 1;
        for p in x[1..last].iter_mut() {
            *p = *p
                + Point::new(
                    rng.random_range(-jitter..=jitter),
                    rng.random_range(-jitter..=jitter),
                );
        }
        problem.project(&mut x);
        if problem.feasible(&x) {
            return Ok(x);
        }
    }
    Err(Error::Infeasible(format!(
        "no collision-free initialization between ({:.3}, {:.3}) and ({:.3}, {:.3}) after {RESTARTS} restarts",
        problem.start.x, problem.start.y, problem.goal.x, problem.goal.y
    )))
}

fn descend(problem: &Problem<'_>, mut x: Vec<Point>) -> PlanTrace {
    let params = problem.params;
    let alpha_max = 0.5 / (params.lambda + 1.0);
    let mut alpha = alpha_max;
    let mut value = problem.penalized(&x);
    let mut history = vec![value];
    let mut iterations = 0;

    while iterations < params.max_iterations {
        let grad = problem.gradient(&x);
        let mut accepted = None;
        for _ in 0..40 {
            let mut y: Vec<Point> = x.iter().zip(&grad).map(|(&p, &g)| p - g * alpha).collect();
            problem.project(&mut y);
            if problem.feasible(&y) {
                let v = problem.penalized(&y);
                if v < value {
                    accepted = Some((y, v));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((y, v)) = accepted else { break };
        iterations += 1;
        let change = (value - v) / value.abs().max(1e-12);
        x = y;
        value = v;
        history.push(value);
        if change < params.convergence_tol {
            break;
        }
        alpha = (alpha * 2.0).min(alpha_max);
    }

    let penalty: f64 = x.iter().map(|&p| problem.penalty(p)).sum();
    let converged = penalty <= 0.0 && problem.feasible(&x);
    let objective_value = objective(&x, problem.goal, &problem.esp, params);
    PlanTrace {
        trajectory: Trajectory {
            points: x,
            start_fixture: None,
            goal_fixture: None,
            converged,
            objective_value,
            iterations,
        },
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::room::{parse_layout, ParseOptions};

    fn open_room(extra: &str) -> RoomLayout {
        let doc = format!(
            "[room]\nwidth = 4.0\ndepth = 3.0\n[[floors]]\nsurface = \"resilient\"\npolygon = [[0,0],[4,0],[4,3],[0,3]]\n{extra}"
        );
        parse_layout(&doc, ParseOptions::default()).unwrap().layout
    }

    #[test]
    fn objective_zero_at_goal_with_goal_support() {
        let goal = Point::new(1.0, 1.0);
        let params = PlannerParams::default();
        assert_eq!(objective(&[goal; 5], goal, &[goal], &params), 0.0);
    }

    #[test]
    fn objective_hand_computed() {
        // points (0,0), (1,0), (2,1); goal (2,1); one support at (1,1); λ = 0.5
        // goal term: 0.5 * (5 + 2 + 0) = 3.5
        // support term: 2 + 1 + 1 = 4
        let params = PlannerParams {
            lambda: 0.5,
            ..PlannerParams::default()
        };
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 1.0)];
        let j = objective(&pts, Point::new(2.0, 1.0), &[Point::new(1.0, 1.0)], &params);
        assert!((j - 7.5).abs() < 1e-12, "{j}");
    }

    #[test]
    fn objective_lambda_zero_is_support_only() {
        let params = PlannerParams {
            lambda: 0.0,
            ..PlannerParams::default()
        };
        let pts = [Point::new(0.0, 0.0), Point::new(0.3, 0.4)];
        let j = objective(&pts, Point::new(9.0, 9.0), &[Point::new(0.0, 0.0)], &params);
        assert!((j - 0.25).abs() < 1e-12);
        assert_eq!(objective(&pts, Point::new(0.3, 0.4), &[], &params), 0.0);
    }

    #[test]
    fn support_term_capped_at_reach() {
        let params = PlannerParams::default();
        let j = objective(&[Point::new(0.0, 0.0)], Point::new(0.0, 0.0), &[Point::new(3.0, 0.0)], &params);
        assert!((j - 2.25).abs() < 1e-12);
    }

    #[test]
    fn limit_steps_reaches_feasibility() {
        let mut x = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
        ];
        limit_steps(&mut x, 0.5, 500);
        for w in x.windows(2) {
            assert!(w[0].distance(w[1]) <= 0.5 + 1e-9);
        }
        assert_eq!(x[0], Point::new(0.0, 0.0));
        assert_eq!(x[3], Point::new(1.0, 0.0));
    }

    #[test]
    fn walk_moves_at_full_speed_then_waits() {
        let line = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)];
        let out = walk(&line, 6, 0.5).unwrap();
        assert_eq!(out.len(), 6);
        assert_eq!(out[2], Point::new(1.0, 0.0));
        assert_eq!(out[3], Point::new(1.0, 0.5));
        assert_eq!(out[4], Point::new(1.0, 1.0));
        assert_eq!(out[5], Point::new(1.0, 1.0));
        assert!(walk(&line, 4, 0.5).is_none());
    }

    #[test]
    fn straight_in_open_room_with_large_lambda() {
        let layout = open_room("");
        let field = DistanceField::new(&layout);
        let params = PlannerParams {
            lambda: 100.0,
            horizon: 20,
            ..PlannerParams::default()
        };
        let (s, g) = (Point::new(0.5, 0.5), Point::new(3.5, 2.5));
        let traj = plan(s, g, &layout, &field, &params).unwrap();
        assert!(traj.converged);
        let seg = crate::geometry::Segment::new(s, g);
        for p in &traj.points {
            assert!(seg.distance_to(*p) <= layout.grid_resolution, "{p:?}");
        }
    }

    #[test]
    fn start_equals_goal_is_stationary() {
        let layout = open_room(
            "[[supports]]\nname = \"rail\"\npolyline = [[0.5, 2.0], [3.5, 2.0]]\nsupport_level = 1.3\n",
        );
        let field = DistanceField::new(&layout);
        let params = PlannerParams {
            horizon: 10,
            ..PlannerParams::default()
        };
        let p = Point::new(2.1, 1.0);
        let traj = plan(p, p, &layout, &field, &params).unwrap();
        assert!(traj.points.iter().all(|&q| q == p));
        // rail sample at (2.1, 2.0) is 1.0 away, ten points
        assert!((traj.objective_value - 10.0).abs() < 1e-9);
    }

    #[test]
    fn unreachable_goal_is_infeasible() {
        let layout = open_room("");
        let field = DistanceField::new(&layout);
        let params = PlannerParams {
            horizon: 3,
            ..PlannerParams::default()
        };
        let err = plan(Point::new(0.5, 0.5), Point::new(3.5, 2.5), &layout, &field, &params)
            .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn start_inside_obstacle_is_infeasible() {
        let layout = open_room("[[obstacles]]\npolygon = [[1,1],[2,1],[2,2],[1,2]]\n");
        let field = DistanceField::new(&layout);
        let err = plan(
            Point::new(1.5, 1.5),
            Point::new(3.5, 2.5),
            &layout,
            &field,
            &PlannerParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn routes_around_a_blocking_wall() {
        // wall across the room with a gap at the top
        let layout = open_room("[[walls]]\nfrom = [2.0, 0.0]\nto = [2.0, 2.1]\nthickness = 0.1\n");
        let field = DistanceField::new(&layout);
        let params = PlannerParams::default();
        let traj = plan(Point::new(1.0, 0.5), Point::new(3.0, 0.5), &layout, &field, &params).unwrap();
        assert!(traj.converged);
        for p in &traj.points {
            assert!(field.sample(*p) >= params.clearance - 1e-9);
            assert!(layout.signed_distance(*p) > 0.0);
        }
        assert!(traj.points.iter().any(|p| p.y > 2.1));
        assert!(traj.max_step() <= params.max_step() + 1e-9);
    }

    #[test]
    fn descent_is_monotone_and_deterministic() {
        let layout = open_room(
            "[[supports]]\nname = \"rail\"\npolyline = [[0.5, 2.0], [3.5, 2.0]]\nsupport_level = 1.3\n[[obstacles]]\npolygon = [[1.6,0.8],[2.4,0.8],[2.4,1.4],[1.6,1.4]]\n",
        );
        let field = DistanceField::new(&layout);
        let params = PlannerParams {
            horizon: 30,
            ..PlannerParams::default()
        };
        let (s, g) = (Point::new(0.5, 1.0), Point::new(3.5, 1.0));
        let a = plan_traced(s, g, &layout, &field, &params).unwrap();
        for w in a.history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let b = plan_traced(s, g, &layout, &field, &params).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
    }
}

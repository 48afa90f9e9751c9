//! Per-point evaluation of predicted trajectories.
//!
//! Each waypoint gets an activity (from the sitting zones it lies in) and a
//! turning category (from the heading change at it). Its risk is the baseline
//! of the cell it falls in, scaled by both factors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RiskField;
use crate::geometry::Point;
use crate::planner::Trajectory;
use crate::room::{GridIndex, RoomLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityTag {
    SitToStand,
    StandToSit,
    Walking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurningCategory {
    None,
    #[serde(rename = "up_to_45")]
    UpTo45,
    #[serde(rename = "over_45")]
    Over45,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionFactors {
    pub sit_to_stand: f64,
    pub stand_to_sit: f64,
    pub walking: f64,
    pub turn_none: f64,
    pub turn_up_to_45: f64,
    pub turn_over_45: f64,
    /// Heading changes at or below this many degrees count as no turn.
    pub deadband_degrees: f64,
    /// Segments shorter than this (meters) carry no heading.
    pub min_segment: f64,
}

impl Default for MotionFactors {
    fn default() -> Self {
        Self {
            sit_to_stand: 1.05,
            stand_to_sit: 1.10,
            walking: 1.20,
            turn_none: 1.0,
            turn_up_to_45: 1.2,
            turn_over_45: 1.4,
            deadband_degrees: 5.0,
            min_segment: 0.01,
        }
    }
}

impl MotionFactors {
    pub fn activity(&self, tag: ActivityTag) -> f64 {
        match tag {
            ActivityTag::SitToStand => self.sit_to_stand,
            ActivityTag::StandToSit => self.stand_to_sit,
            ActivityTag::Walking => self.walking,
        }
    }

    pub fn turning(&self, cat: TurningCategory) -> f64 {
        match cat {
            TurningCategory::None => self.turn_none,
            TurningCategory::UpTo45 => self.turn_up_to_45,
            TurningCategory::Over45 => self.turn_over_45,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let factors = [
            ("sit_to_stand", self.sit_to_stand),
            ("stand_to_sit", self.stand_to_sit),
            ("walking", self.walking),
            ("turn_none", self.turn_none),
            ("turn_up_to_45", self.turn_up_to_45),
            ("turn_over_45", self.turn_over_45),
        ];
        for (name, v) in factors {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::schema(format!("motion.{name}"), "must be a positive factor"));
            }
        }
        if !(0.0..45.0).contains(&self.deadband_degrees) {
            return Err(Error::schema("motion.deadband_degrees", "must be in [0, 45)"));
        }
        if !(self.min_segment >= 0.0) {
            return Err(Error::schema("motion.min_segment", "must be >= 0"));
        }
        Ok(())
    }
}

/// Activity at waypoint `t`. Inside both sitting zones, the start zone wins
/// during the first half of the horizon.
pub fn tag_activity(t: usize, traj: &Trajectory, layout: &RoomLayout) -> ActivityTag {
    let p = traj.points[t];
    let inside = |kind: Option<crate::room::FixtureKind>| {
        kind.and_then(|k| layout.fixture(k))
            .is_some_and(|f| f.sitting_zone.contains(p))
    };
    let in_start = inside(traj.start_fixture);
    let in_goal = inside(traj.goal_fixture);
    match (in_start, in_goal) {
        (true, true) if 2 * t < traj.points.len() => ActivityTag::SitToStand,
        (true, true) => ActivityTag::StandToSit,
        (true, false) => ActivityTag::SitToStand,
        (false, true) => ActivityTag::StandToSit,
        (false, false) => ActivityTag::Walking,
    }
}

/// Unsigned heading change in degrees at `b` between `a→b` and `b→c`, or
/// `None` if either segment is shorter than `min_segment`.
pub fn heading_change(a: Point, b: Point, c: Point, min_segment: f64) -> Option<f64> {
    let u = b - a;
    let v = c - b;
    let (nu, nv) = (u.norm(), v.norm());
    if nu <= min_segment || nv <= min_segment || nu == 0.0 || nv == 0.0 {
        return None;
    }
    Some(u.cross(v).atan2(u.dot(v)).abs().to_degrees())
}

pub fn tag_turning(t: usize, traj: &Trajectory, factors: &MotionFactors) -> TurningCategory {
    let n = traj.points.len();
    if t == 0 || t + 1 >= n {
        return TurningCategory::None;
    }
    let p = &traj.points;
    match heading_change(p[t - 1], p[t], p[t + 1], factors.min_segment) {
        None => TurningCategory::None,
        Some(a) if a <= factors.deadband_degrees => TurningCategory::None,
        Some(a) if a <= 45.0 => TurningCategory::UpTo45,
        Some(_) => TurningCategory::Over45,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedPoint {
    pub t: usize,
    pub position: Point,
    pub cell: GridIndex,
    pub activity: ActivityTag,
    pub turning: TurningCategory,
    /// Baseline factor of `cell`; `None` if the cell is occupied.
    pub baseline: Option<f64>,
    /// `baseline × activity factor × turning factor`; `None` if the cell is
    /// occupied, in which case the point is left out of aggregation.
    pub risk: Option<f64>,
}

pub fn evaluate_trajectory(
    traj: &Trajectory,
    baseline: &RiskField,
    layout: &RoomLayout,
    factors: &MotionFactors,
) -> Result<Vec<EvaluatedPoint>> {
    let grid = layout.grid();
    baseline.check_dims(grid.rows, grid.cols)?;
    traj.points
        .iter()
        .enumerate()
        .map(|(t, &p)| {
            let cell = grid.cell_of(p).ok_or(Error::OutsideGrid(p))?;
            let activity = tag_activity(t, traj, layout);
            let turning = tag_turning(t, traj, factors);
            let base = baseline.get(cell);
            Ok(EvaluatedPoint {
                t,
                position: p,
                cell,
                activity,
                turning,
                baseline: base,
                risk: base.map(|b| b * factors.activity(activity) * factors.turning(turning)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldLabel;
    use crate::room::{parse_layout, FixtureKind, ParseOptions};
    use proptest::prelude::*;

    fn traj(points: Vec<Point>) -> Trajectory {
        Trajectory {
            points,
            start_fixture: None,
            goal_fixture: None,
            converged: true,
            objective_value: 0.0,
            iterations: 0,
        }
    }

    fn polar(deg: f64) -> Point {
        let r = deg.to_radians();
        Point::new(r.cos(), r.sin())
    }

    fn turn_at(deg: f64) -> TurningCategory {
        let b = Point::new(1.0, 0.0);
        let t = traj(vec![Point::new(0.0, 0.0), b, b + polar(deg)]);
        tag_turning(1, &t, &MotionFactors::default())
    }

    #[test]
    fn turning_categories() {
        assert_eq!(turn_at(0.0), TurningCategory::None);
        assert_eq!(turn_at(5.0), TurningCategory::None);
        assert_eq!(turn_at(30.0), TurningCategory::UpTo45);
        assert_eq!(turn_at(-30.0), TurningCategory::UpTo45);
        assert_eq!(turn_at(90.0), TurningCategory::Over45);
        assert_eq!(turn_at(179.0), TurningCategory::Over45);
        let f = MotionFactors::default();
        assert_eq!(f.turning(turn_at(90.0)), 1.4);
        assert_eq!(f.turning(turn_at(30.0)), 1.2);
    }

    #[test]
    fn exactly_45_is_up_to_45() {
        let b = Point::new(1.0, 0.0);
        let t = traj(vec![Point::new(0.0, 0.0), b, Point::new(2.0, 1.0)]);
        assert_eq!(tag_turning(1, &t, &MotionFactors::default()), TurningCategory::UpTo45);
    }

    #[test]
    fn endpoints_and_zero_segments_do_not_turn() {
        let t = traj(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)]);
        let f = MotionFactors::default();
        assert_eq!(tag_turning(0, &t, &f), TurningCategory::None);
        assert_eq!(tag_turning(1, &t, &f), TurningCategory::None);
        assert_eq!(tag_turning(2, &t, &f), TurningCategory::None);
        assert_eq!(tag_turning(3, &t, &f), TurningCategory::None);
    }

    fn two_zone_room(overlap: bool) -> RoomLayout {
        let goal_zone = if overlap { "center = [1.2, 1.0], radius = 1.4" } else { "center = [2.6, 1.0], radius = 0.4" };
        let doc = format!(
            r#"
[room]
width = 3.0
depth = 2.0
resolution = 0.5
[[floors]]
surface = "resilient"
polygon = [[0,0],[3,0],[3,2],[0,2]]
[[fixtures]]
kind = "bed"
anchor = [0.25, 1.0]
footprint = [[0,0.5],[0.5,0.5],[0.5,1.5],[0,1.5]]
sitting_zone = {{ center = [0.8, 1.0], radius = 0.4 }}
[[fixtures]]
kind = "toilet"
anchor = [2.75, 1.0]
footprint = [[2.5,0.75],[3,0.75],[3,1.25],[2.5,1.25]]
sitting_zone = {{ {goal_zone} }}
"#
        );
        parse_layout(&doc, ParseOptions::default()).unwrap().layout
    }

    #[test]
    fn activity_from_zones() {
        let layout = two_zone_room(false);
        let mut t = traj(vec![
            Point::new(0.75, 1.0),
            Point::new(1.25, 0.25),
            Point::new(1.75, 0.25),
            Point::new(2.25, 1.0),
        ]);
        t.start_fixture = Some(FixtureKind::Bed);
        t.goal_fixture = Some(FixtureKind::Toilet);
        let tags: Vec<_> = (0..4).map(|i| tag_activity(i, &t, &layout)).collect();
        assert_eq!(
            tags,
            [ActivityTag::SitToStand, ActivityTag::Walking, ActivityTag::Walking, ActivityTag::StandToSit]
        );
    }

    #[test]
    fn overlapping_zones_split_by_time() {
        let layout = two_zone_room(true);
        let mut t = traj(vec![Point::new(0.9, 1.0); 4]);
        t.start_fixture = Some(FixtureKind::Bed);
        t.goal_fixture = Some(FixtureKind::Toilet);
        let tags: Vec<_> = (0..4).map(|i| tag_activity(i, &t, &layout)).collect();
        assert_eq!(
            tags,
            [ActivityTag::SitToStand, ActivityTag::SitToStand, ActivityTag::StandToSit, ActivityTag::StandToSit]
        );
    }

    #[test]
    fn risk_composition_examples() {
        let layout = two_zone_room(false);
        let grid = layout.grid();
        let mut values = vec![Some(1.0); grid.len()];
        let walk_cell = grid.cell_of(Point::new(1.25, 0.25)).unwrap();
        values[grid.offset(walk_cell)] = Some(1.15);
        let goal_cell = grid.cell_of(Point::new(2.25, 1.0)).unwrap();
        values[grid.offset(goal_cell)] = Some(0.9);
        let baseline = RiskField::new(FieldLabel::Baseline, grid.rows, grid.cols, values);
        let mut t = traj(vec![
            Point::new(0.75, 1.0),
            Point::new(1.25, 0.25),
            Point::new(1.75, 0.25),
            Point::new(2.25, 1.0),
            Point::new(2.25, 0.3),
        ]);
        t.start_fixture = Some(FixtureKind::Bed);
        t.goal_fixture = Some(FixtureKind::Toilet);
        let pts = evaluate_trajectory(&t, &baseline, &layout, &MotionFactors::default()).unwrap();
        assert_eq!(pts[0].risk, Some(1.05));
        assert_eq!(pts[2].turning, TurningCategory::Over45);
        assert!((pts[2].risk.unwrap() - 1.2 * 1.4).abs() < 1e-12);
        assert!((pts[3].risk.unwrap() - 1.386).abs() < 1e-12);
        let straight = traj(vec![Point::new(1.0, 0.25), Point::new(1.25, 0.25), Point::new(1.5, 0.25)]);
        let pts = evaluate_trajectory(&straight, &baseline, &layout, &MotionFactors::default()).unwrap();
        assert!((pts[1].risk.unwrap() - 1.38).abs() < 1e-12);
    }

    #[test]
    fn outside_grid_is_an_error() {
        let layout = two_zone_room(false);
        let grid = layout.grid();
        let baseline = RiskField::uniform(FieldLabel::Baseline, &grid, 1.0);
        let t = traj(vec![Point::new(1.0, 1.0), Point::new(5.0, 1.0)]);
        assert!(matches!(
            evaluate_trajectory(&t, &baseline, &layout, &MotionFactors::default()),
            Err(Error::OutsideGrid(_))
        ));
    }

    proptest! {
        #[test]
        fn turning_invariant_under_rigid_motion(
            pts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..12),
            angle in -3.2f64..3.2,
            dx in -5.0f64..5.0,
            dy in -5.0f64..5.0,
        ) {
            let f = MotionFactors::default();
            let orig: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let (s, c) = angle.sin_cos();
            let moved: Vec<Point> = orig
                .iter()
                .map(|p| Point::new(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy))
                .collect();
            let a = traj(orig);
            let b = traj(moved);
            for t in 0..a.points.len() {
                let (ha, hb) = (
                    heading_change(a.points[t.saturating_sub(1)], a.points[t], a.points[(t + 1).min(a.points.len() - 1)], f.min_segment),
                    heading_change(b.points[t.saturating_sub(1)], b.points[t], b.points[(t + 1).min(b.points.len() - 1)], f.min_segment),
                );
                // skip points sitting on a category boundary where rounding may flip the tag
                let near_edge = |h: Option<f64>| h.is_some_and(|h| (h - 5.0).abs() < 1e-6 || (h - 45.0).abs() < 1e-6);
                if near_edge(ha) || near_edge(hb) {
                    continue;
                }
                prop_assert_eq!(tag_turning(t, &a, &f), tag_turning(t, &b, &f));
            }
        }
    }
}

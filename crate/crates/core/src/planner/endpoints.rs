use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::room::{DistanceField, FixtureKind, RoomLayout};

/// Rejection-sampling budget per endpoint.
pub const MAX_SAMPLE_ATTEMPTS: usize = 100;

/// Uniform point in the fixture's sitting zone that lies inside the room and
/// keeps `clearance` from obstacles.
pub fn sample_in_zone<R: Rng + ?Sized>(
    kind: FixtureKind,
    layout: &RoomLayout,
    field: &DistanceField,
    clearance: f64,
    rng: &mut R,
) -> Result<Point> {
    let fixture = layout
        .fixture(kind)
        .ok_or_else(|| Error::MissingFixture(kind.as_str().to_owned()))?;
    let (lo, hi) = fixture.sitting_zone.bounds();
    let (x0, x1) = (lo.x.max(0.0), hi.x.min(layout.width));
    let (y0, y1) = (lo.y.max(0.0), hi.y.min(layout.depth));
    if x0 < x1 && y0 < y1 {
        for _ in 0..MAX_SAMPLE_ATTEMPTS {
            let p = Point::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
            if fixture.sitting_zone.contains(p) && field.sample(p) >= clearance {
                return Ok(p);
            }
        }
    }
    Err(Error::Sampling {
        fixture: kind.as_str().to_owned(),
        attempts: MAX_SAMPLE_ATTEMPTS,
    })
}

/// Start in the first fixture's zone, goal in the second's.
pub fn sample_endpoints<R: Rng + ?Sized>(
    start: FixtureKind,
    goal: FixtureKind,
    layout: &RoomLayout,
    field: &DistanceField,
    clearance: f64,
    rng: &mut R,
) -> Result<(Point, Point)> {
    let s = sample_in_zone(start, layout, field, clearance, rng)?;
    let g = sample_in_zone(goal, layout, field, clearance, rng)?;
    Ok((s, g))
}

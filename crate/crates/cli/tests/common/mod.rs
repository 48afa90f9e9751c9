#![allow(dead_code)]

/// Bed and toilet on either side of a wall with no opening.
pub const WALLED_OFF: &str = r#"
[room]
width = 4.0
depth = 2.0

[[walls]]
from = [2.0, 0.0]
to = [2.0, 2.0]

[[floors]]
surface = "resilient"
polygon = [[0, 0], [4, 0], [4, 2], [0, 2]]

[[fixtures]]
kind = "bed"
anchor = [0.25, 1.0]
footprint = [[0, 0.5], [0.5, 0.5], [0.5, 1.5], [0, 1.5]]
sitting_zone = { center = [0.8, 1.0], radius = 0.4 }

[[fixtures]]
kind = "toilet"
anchor = [3.75, 1.0]
footprint = [[3.5, 0.75], [4, 0.75], [4, 1.25], [3.5, 1.25]]
sitting_zone = { center = [3.2, 1.0], radius = 0.4 }
"#;

/// A short scenario list keeps full-pipeline tests quick.
pub const SHORT_CONFIG: &str = r#"
seed = 7

[[scenarios]]
start = "bed"
goal = "toilet"
frequency = 2

[[scenarios]]
start = "toilet"
goal = "sink"
frequency = 1
"#;

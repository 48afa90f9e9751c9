//! Layouts bundled with the library.

use crate::error::{Error, Result};
use crate::room::{parse_layout, ParseOptions, RoomLayout};

/// The four room configurations, in presentation order.
pub const ROOMS: [&str; 4] = ["outboard_footwall", "inboard_footwall", "inboard_headwall", "nested"];

/// Every bundled layout as `(name, TOML source)`.
pub const BUNDLED: [(&str, &str); 7] = [
    ("outboard_footwall", include_str!("../layouts/outboard_footwall.room")),
    ("inboard_footwall", include_str!("../layouts/inboard_footwall.room")),
    ("inboard_headwall", include_str!("../layouts/inboard_headwall.room")),
    ("nested", include_str!("../layouts/nested.room")),
    (
        "outboard_footwall_bilateral",
        include_str!("../layouts/outboard_footwall_bilateral.room"),
    ),
    ("fig3_golden", include_str!("../layouts/fig3_golden.room")),
    ("planner_test", include_str!("../layouts/planner_test.room")),
];

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<RoomLayout> {
    let text = source(name).ok_or_else(|| Error::schema("example", format!("no bundled layout named `{name}`")))?;
    Ok(parse_layout(text, ParseOptions::default())?.layout)
}

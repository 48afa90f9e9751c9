//! Output directory layout shared by the CLI and tests.
//!
//! ```text
//! <out>/<mode>/result.json         serialized evaluation
//! <out>/<mode>/<field>.ppm         heat maps (images, all)
//! <out>/<mode>/trajectories.ppm    trajectory overlay (images, all)
//! <out>/<mode>/<field>.csv         grids (grids, all)
//! ```
//!
//! `<field>` is one of floor, light, support, door, baseline, final.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use fallrisk::pipeline::EvaluationResult;
use fallrisk::render::{export_grid, render_field, render_trajectories, ColorScale};
use fallrisk::room::RoomLayout;

/// Pixels per grid cell in rendered images.
pub const CELL_PIXELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Images,
    Grids,
    #[default]
    All,
}

impl OutputFormat {
    fn images(self) -> bool {
        matches!(self, OutputFormat::Images | OutputFormat::All)
    }

    fn grids(self) -> bool {
        matches!(self, OutputFormat::Grids | OutputFormat::All)
    }
}

/// Rendered heat maps of every field plus the trajectory overlay, keyed by
/// file stem.
pub fn render_images(result: &EvaluationResult, layout: &RoomLayout) -> fallrisk::Result<Vec<(String, Vec<u8>)>> {
    let scale = ColorScale::default();
    let mut out = Vec::new();
    for field in result.fields() {
        let image = render_field(field, layout, &scale, CELL_PIXELS)?;
        out.push((field.label.as_str().to_owned(), image.to_ppm()));
    }
    let overlay = render_trajectories(result, layout, &scale, CELL_PIXELS)?;
    out.push(("trajectories".to_owned(), overlay.to_ppm()));
    Ok(out)
}

/// Write one mode's results below `out` and return the files written.
pub fn write_result(
    out: &Path,
    result: &EvaluationResult,
    layout: &RoomLayout,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    let dir = out.join(result.mode.as_str());
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    put("result.json".into(), result.to_json()?.as_bytes())?;
    if format.grids() {
        for field in result.fields() {
            put(format!("{}.csv", field.label), export_grid(field).as_bytes())?;
        }
    }
    if format.images() {
        for (stem, bytes) in render_images(result, layout)? {
            put(format!("{stem}.ppm"), &bytes)?;
        }
    }
    Ok(written)
}

//! Evaluation requests as accepted by `POST /evaluate`.

use serde::{Deserialize, Serialize};

use fallrisk::baseline::FactorCoefficients;
use fallrisk::examples;
use fallrisk::motion::MotionFactors;
use fallrisk::pipeline::{Aggregation, EvaluationSettings, Scenario};
use fallrisk::planner::{PlannerParams, DEFAULT_SEED};
use fallrisk::room::{parse_layout, parse_layout_value, LightingMode, ParseOptions, Parsed};
use fallrisk::Error;

/// Largest grid the service will evaluate, per side.
pub const MAX_GRID_SIDE: usize = 500;
/// Largest total number of sampled trajectories per request.
pub const MAX_TRAJECTORIES: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    #[default]
    Day,
    Night,
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> &'static [LightingMode] {
        match self {
            ModeSelection::Day => &[LightingMode::Day],
            ModeSelection::Night => &[LightingMode::Night],
            ModeSelection::Both => &[LightingMode::Day, LightingMode::Night],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Include {
    /// Per-factor and baseline fields (the final field is always returned).
    pub fields: bool,
    pub trajectories: bool,
    /// Base64-encoded PPM heat maps.
    pub images: bool,
}

impl Default for Include {
    fn default() -> Self {
        Self {
            fields: true,
            trajectories: true,
            images: false,
        }
    }
}

/// Exactly one of `layout` (a JSON layout document), `layout_toml` or
/// `example` must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    #[serde(default)]
    pub layout: Option<serde_json::Value>,
    #[serde(default)]
    pub layout_toml: Option<String>,
    #[serde(default)]
    pub example: Option<String>,
    #[serde(default)]
    pub lenient: bool,
    #[serde(default)]
    pub mode: ModeSelection,
    #[serde(default)]
    pub coefficients: FactorCoefficients,
    #[serde(default)]
    pub planner: PlannerParams,
    #[serde(default)]
    pub motion: MotionFactors,
    #[serde(default)]
    pub scenarios: Option<Vec<Scenario>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub include: Include,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl EvaluateRequest {
    pub fn for_example(name: &str) -> Self {
        Self {
            layout: None,
            layout_toml: None,
            example: Some(name.to_owned()),
            lenient: false,
            mode: ModeSelection::default(),
            coefficients: FactorCoefficients::default(),
            planner: PlannerParams::default(),
            motion: MotionFactors::default(),
            scenarios: None,
            seed: DEFAULT_SEED,
            aggregation: Aggregation::default(),
            include: Include::default(),
        }
    }

    pub fn settings(&self) -> EvaluationSettings {
        EvaluationSettings {
            coefficients: self.coefficients,
            planner: self.planner.clone(),
            motion: self.motion.clone(),
            scenarios: self.scenarios.clone(),
            aggregation: self.aggregation,
            seed: self.seed,
        }
    }

    pub fn parse_layout(&self) -> fallrisk::Result<Parsed> {
        let options = ParseOptions {
            lenient: self.lenient,
        };
        match (&self.layout, &self.layout_toml, &self.example) {
            (Some(doc), None, None) => parse_layout_value(doc.clone(), options),
            (None, Some(text), None) => parse_layout(text, options),
            (None, None, Some(name)) => {
                let text = examples::source(name).ok_or_else(|| Error::Schema {
                    path: "example".into(),
                    message: format!("no bundled layout named `{name}`"),
                })?;
                parse_layout(text, options)
            }
            _ => Err(Error::Schema {
                path: "layout".into(),
                message: "give exactly one of `layout`, `layout_toml` or `example`".into(),
            }),
        }
    }
}

/// Request size limits for the service.
pub fn check_limits(parsed: &Parsed, settings: &EvaluationSettings) -> fallrisk::Result<()> {
    let grid = parsed.layout.grid();
    if grid.rows > MAX_GRID_SIDE || grid.cols > MAX_GRID_SIDE {
        return Err(Error::Schema {
            path: "room".into(),
            message: format!(
                "grid of {}x{} cells exceeds the {MAX_GRID_SIDE}x{MAX_GRID_SIDE} service limit",
                grid.cols, grid.rows
            ),
        });
    }
    let total: u32 = settings
        .scenarios_for(&parsed.layout)
        .iter()
        .map(|s| s.frequency)
        .sum();
    if total > MAX_TRAJECTORIES {
        return Err(Error::Schema {
            path: "scenarios".into(),
            message: format!("{total} trajectories requested, limit is {MAX_TRAJECTORIES}"),
        });
    }
    Ok(())
}

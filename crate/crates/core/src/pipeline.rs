//! Full room evaluation: static baseline, scenario trajectories, motion
//! evaluation and per-cell aggregation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{baseline, Baseline, FactorCoefficients};
use crate::error::{Error, Result};
use crate::field::{FieldLabel, FieldSummary, RiskField};
use crate::motion::{evaluate_trajectory, EvaluatedPoint, MotionFactors};
use crate::planner::{plan, sample_endpoints, PlannerParams, Trajectory, DEFAULT_SEED};
use crate::room::{DistanceField, FixtureKind, LightingMode, Raster, RoomLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub start: FixtureKind,
    pub goal: FixtureKind,
    /// Number of sampled trajectories.
    pub frequency: u32,
}

impl Scenario {
    pub const fn new(start: FixtureKind, goal: FixtureKind, frequency: u32) -> Self {
        Self {
            start,
            goal,
            frequency,
        }
    }
}

/// Everyday transfers and their weekly frequencies, one entry per direction
/// or leg.
pub const STANDARD_SCENARIOS: [Scenario; 11] = {
    use FixtureKind::*;
    [
        Scenario::new(Bed, PatientChair, 2),
        Scenario::new(PatientChair, Bed, 2),
        Scenario::new(Bed, Toilet, 6),
        Scenario::new(Toilet, Sink, 6),
        Scenario::new(Sink, Bed, 6),
        Scenario::new(Bed, EntranceDoor, 3),
        Scenario::new(EntranceDoor, Bed, 3),
        Scenario::new(Bed, Sofa, 1),
        Scenario::new(Sofa, Bed, 1),
        Scenario::new(PatientChair, Toilet, 3),
        Scenario::new(Toilet, PatientChair, 3),
    ]
};

/// Standard scenarios whose fixtures are both present in the layout.
pub fn default_scenarios(layout: &RoomLayout) -> Vec<Scenario> {
    STANDARD_SCENARIOS
        .iter()
        .filter(|s| layout.has_fixture(s.start) && layout.has_fixture(s.goal))
        .copied()
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Mean,
    Max,
}

impl std::str::FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "max" => Ok(Aggregation::Max),
            other => Err(format!("unknown aggregation `{other}` (expected mean or max)")),
        }
    }
}

/// Final field: the mean (or max) risk of all points falling in each cell,
/// or the baseline where no point falls.
pub fn aggregate<'a>(
    baseline: &RiskField,
    points: impl IntoIterator<Item = &'a EvaluatedPoint>,
    method: Aggregation,
) -> RiskField {
    let n = baseline.values.len();
    let mut sum = vec![0.0; n];
    let mut max = vec![f64::NEG_INFINITY; n];
    let mut count = vec![0usize; n];
    for p in points {
        let Some(risk) = p.risk else { continue };
        let i = p.cell.row * baseline.cols + p.cell.col;
        sum[i] += risk;
        max[i] = max[i].max(risk);
        count[i] += 1;
    }
    let values = (0..n)
        .map(|i| match (baseline.values[i], count[i]) {
            (None, _) => None,
            (Some(b), 0) => Some(b),
            (Some(_), c) => Some(match method {
                Aggregation::Mean => sum[i] / c as f64,
                Aggregation::Max => max[i],
            }),
        })
        .collect();
    RiskField::new(FieldLabel::Final, baseline.rows, baseline.cols, values)
}

/// Everything that tunes an evaluation besides the layout and lighting mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSettings {
    pub coefficients: FactorCoefficients,
    pub planner: PlannerParams,
    pub motion: MotionFactors,
    /// `None` means the standard scenarios available in the layout.
    pub scenarios: Option<Vec<Scenario>>,
    pub aggregation: Aggregation,
    pub seed: u64,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        Self {
            coefficients: FactorCoefficients::default(),
            planner: PlannerParams::default(),
            motion: MotionFactors::default(),
            scenarios: None,
            aggregation: Aggregation::Mean,
            seed: DEFAULT_SEED,
        }
    }
}

impl EvaluationSettings {
    pub fn validate(&self) -> Result<()> {
        self.coefficients.validate()?;
        self.planner.validate()?;
        self.motion.validate()?;
        if let Some(list) = &self.scenarios {
            for (i, s) in list.iter().enumerate() {
                if s.frequency == 0 {
                    return Err(Error::schema(format!("scenarios[{i}].frequency"), "must be >= 1"));
                }
            }
        }
        Ok(())
    }

    pub fn scenarios_for(&self, layout: &RoomLayout) -> Vec<Scenario> {
        self.scenarios
            .clone()
            .unwrap_or_else(|| default_scenarios(layout))
    }
}

/// A planned trajectory with the scenario and sample it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedTrajectory {
    pub scenario: usize,
    pub sample: u32,
    pub trajectory: Trajectory,
}

/// Trajectories for a scenario list. Samples whose endpoints could not be
/// drawn are skipped and reported in `warnings`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    pub attempted: usize,
    pub trajectories: Vec<PlannedTrajectory>,
    pub warnings: Vec<String>,
}

/// Seed for one sample, independent of evaluation order.
pub fn sample_seed(seed: u64, scenario: usize, sample: u32) -> u64 {
    let mut z = seed ^ (scenario as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((sample as u64) << 32);
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn plan_scenarios(
    layout: &RoomLayout,
    field: &DistanceField,
    params: &PlannerParams,
    scenarios: &[Scenario],
    seed: u64,
) -> Result<TrajectorySet> {
    params.validate()?;
    for s in scenarios {
        for kind in [s.start, s.goal] {
            if !layout.has_fixture(kind) {
                return Err(Error::MissingFixture(kind.as_str().to_owned()));
            }
        }
    }
    let jobs: Vec<(usize, u32)> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..s.frequency).map(move |k| (i, k)))
        .collect();
    let outcomes: Vec<Result<std::result::Result<PlannedTrajectory, String>>> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let s = scenarios[i];
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, i, k));
            let (start, goal) =
                match sample_endpoints(s.start, s.goal, layout, field, params.clearance, &mut rng) {
                    Ok(e) => e,
                    Err(e @ Error::Sampling { .. }) => {
                        return Ok(Err(format!("{} -> {} sample {k} skipped: {e}", s.start, s.goal)))
                    }
                    Err(e) => return Err(e),
                };
            let sample_params = PlannerParams {
                seed: rng.next_u64(),
                ..params.clone()
            };
            let trajectory = plan(start, goal, layout, field, &sample_params).map_err(|e| match e {
                Error::Infeasible(msg) => {
                    Error::Infeasible(format!("{} -> {} sample {k}: {msg}", s.start, s.goal))
                }
                other => other,
            })?;
            Ok(Ok(PlannedTrajectory {
                scenario: i,
                sample: k,
                trajectory: trajectory.with_fixtures(s.start, s.goal),
            }))
        })
        .collect();

    let mut set = TrajectorySet {
        attempted: jobs.len(),
        trajectories: Vec::new(),
        warnings: Vec::new(),
    };
    for outcome in outcomes {
        match outcome? {
            Ok(t) => set.trajectories.push(t),
            Err(w) => set.warnings.push(w),
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedTrajectory {
    pub scenario: usize,
    pub sample: u32,
    pub start_fixture: FixtureKind,
    pub goal_fixture: FixtureKind,
    pub converged: bool,
    pub objective_value: f64,
    pub iterations: usize,
    pub points: Vec<EvaluatedPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorFields {
    pub floor: RiskField,
    pub light: RiskField,
    pub support: RiskField,
    pub door: RiskField,
}

impl FactorFields {
    pub fn iter(&self) -> impl Iterator<Item = &RiskField> {
        [&self.floor, &self.light, &self.support, &self.door].into_iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub mode: LightingMode,
    pub rows: usize,
    pub cols: usize,
    pub resolution: f64,
    pub seed: u64,
    pub aggregation: Aggregation,
    pub scenarios: Vec<Scenario>,
    /// Number of trajectories sampled, including skipped ones.
    pub attempted: usize,
    pub warnings: Vec<String>,
    pub factor_fields: FactorFields,
    pub baseline: RiskField,
    #[serde(rename = "final")]
    pub final_field: RiskField,
    pub trajectories: Vec<EvaluatedTrajectory>,
    pub summary: FieldSummary,
}

impl EvaluationResult {
    /// All six fields in display order.
    pub fn fields(&self) -> impl Iterator<Item = &RiskField> {
        self.factor_fields
            .iter()
            .chain([&self.baseline, &self.final_field])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evaluate one lighting mode against an already planned set of trajectories.
pub fn evaluate_with_trajectories(
    layout: &RoomLayout,
    raster: &Raster,
    mode: LightingMode,
    settings: &EvaluationSettings,
    scenarios: &[Scenario],
    set: &TrajectorySet,
) -> Result<EvaluationResult> {
    let Baseline {
        floor,
        light,
        support,
        door,
        baseline: base,
        ..
    } = baseline(layout, raster, mode, &settings.coefficients);
    let evaluated: Vec<EvaluatedTrajectory> = set
        .trajectories
        .par_iter()
        .map(|p| {
            let t = &p.trajectory;
            let s = scenarios[p.scenario];
            Ok(EvaluatedTrajectory {
                scenario: p.scenario,
                sample: p.sample,
                start_fixture: s.start,
                goal_fixture: s.goal,
                converged: t.converged,
                objective_value: t.objective_value,
                iterations: t.iterations,
                points: evaluate_trajectory(t, &base, layout, &settings.motion)?,
            })
        })
        .collect::<Result<_>>()?;
    let final_field = aggregate(
        &base,
        evaluated.iter().flat_map(|t| &t.points),
        settings.aggregation,
    );
    let mut warnings = set.warnings.clone();
    for t in &evaluated {
        if !t.converged {
            warnings.push(format!(
                "{} -> {} sample {} did not satisfy all constraints",
                t.start_fixture, t.goal_fixture, t.sample
            ));
        }
    }
    let grid = raster.grid;
    Ok(EvaluationResult {
        mode,
        rows: grid.rows,
        cols: grid.cols,
        resolution: grid.resolution,
        seed: settings.seed,
        aggregation: settings.aggregation,
        scenarios: scenarios.to_vec(),
        attempted: set.attempted,
        warnings,
        summary: final_field.summary(),
        factor_fields: FactorFields {
            floor,
            light,
            support,
            door,
        },
        baseline: base,
        final_field,
        trajectories: evaluated,
    })
}

/// Evaluate several lighting modes. Trajectories are planned once and shared,
/// so modes differ only through their static fields.
pub fn evaluate_modes(
    layout: &RoomLayout,
    settings: &EvaluationSettings,
    modes: &[LightingMode],
) -> Result<Vec<EvaluationResult>> {
    settings.validate()?;
    let raster = Raster::new(layout);
    let field = DistanceField::new(layout);
    let scenarios = settings.scenarios_for(layout);
    let set = plan_scenarios(layout, &field, &settings.planner, &scenarios, settings.seed)?;
    modes
        .iter()
        .map(|&mode| evaluate_with_trajectories(layout, &raster, mode, settings, &scenarios, &set))
        .collect()
}

pub fn evaluate_room(
    layout: &RoomLayout,
    settings: &EvaluationSettings,
    mode: LightingMode,
) -> Result<EvaluationResult> {
    Ok(evaluate_modes(layout, settings, &[mode])?.remove(0))
}

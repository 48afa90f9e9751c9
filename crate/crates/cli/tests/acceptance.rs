//! Acceptance suite: prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `cargo test --test acceptance -- --nocapture`
//! to see the report.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fallrisk::baseline::{baseline, floor_factor, light_factor, support_factor_at, FactorCoefficients};
use fallrisk::examples;
use fallrisk::field::RiskField;
use fallrisk::geometry::Point;
use fallrisk::pipeline::{evaluate_modes, evaluate_room, EvaluationResult, EvaluationSettings};
use fallrisk::planner::oracle::discretization_slack;
use fallrisk::planner::{oracle_plan, plan, walk, PlannerParams};
use fallrisk::room::{
    parse_layout, DistanceField, DoorOperation, GridIndex, LightingMode, ParseOptions, Raster, RoomLayout, WidthClass,
};

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, name: &str, elapsed: Duration, outcome: Result<String, String>) {
        let (ok, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let line = format!(
            "{} {name}: {detail} ({:.2} s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_cell() -> Result<String, String> {
    let layout = examples::load("fig3_golden").map_err(|e| e.to_string())?;
    let raster = Raster::new(&layout);
    let b = baseline(&layout, &raster, LightingMode::Day, &FactorCoefficients::default());
    let cell = GridIndex::new(19, 19);
    let get = |f: &RiskField| f.get(cell).unwrap_or(f64::NAN);
    let (light, floor, support, door, product) = (get(&b.light), get(&b.floor), get(&b.support), get(&b.door), get(&b.baseline));
    let within = |v: f64, target: f64, tol: f64| (v - target).abs() <= tol;
    check(
        within(light, 1.0, 1e-12)
            && within(floor, 1.15, 1e-12)
            && within(support, 0.727, 0.01)
            && within(door, 1.20, 1e-12)
            && within(product, 0.99, 0.015),
        || format!("light {light} floor {floor} support {support} door {door} product {product}"),
    )?;
    Ok(format!(
        "light {light} x floor {floor:.2} x support {support:.4} x door {door} = {product:.4}"
    ))
}

fn coefficient_table() -> Result<String, String> {
    let c = FactorCoefficients::default();
    let doc = "[room]\nwidth = 2.0\ndepth = 1.0\n\
        [[floors]]\nsurface = \"hard\"\npolygon = [[0,0],[1,0],[1,1],[0,1]]\n\
        [[floors]]\nsurface = \"resilient\"\npolygon = [[1,0],[2,0],[2,1],[1,1]]\n";
    let layout = parse_layout(doc, ParseOptions::default()).map_err(|e| e.to_string())?.layout;
    let r = Raster::new(&layout);
    let floor = |row, col| floor_factor(GridIndex::new(row, col), &r, &c);
    let light = |lux| light_factor(lux, &c).unwrap();
    let rows: [(&str, f64, f64); 14] = [
        ("resilient surface", floor(5, 15), 1.0),
        ("hard surface", floor(5, 5), 1.05),
        ("resilient to hard transition", floor(5, 10) - 1.0, 0.05),
        ("hard to resilient transition", floor(5, 9) - floor(5, 5), 0.05),
        ("below 100 lux", light(40.0), 1.07),
        ("100 to 500 lux", light(300.0), 1.03),
        ("above 500 lux", light(800.0), 1.0),
        ("support within 0.8 m", support_factor_at(0.5, 1.0, &c), 0.80),
        ("support 0.8 to 1.5 m", support_factor_at(1.15, 1.0, &c), 0.9),
        ("support beyond 1.5 m", support_factor_at(2.0, 1.0, &c), 1.0),
        ("swing narrow door", c.door.factor(DoorOperation::Swing, WidthClass::Narrow), 1.20),
        ("swing wide door", c.door.factor(DoorOperation::Swing, WidthClass::Wide), 1.10),
        ("slide narrow door", c.door.factor(DoorOperation::Slide, WidthClass::Narrow), 1.07),
        ("slide wide door", c.door.factor(DoorOperation::Slide, WidthClass::Wide), 1.04),
    ];
    let bad: Vec<String> = rows
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-12)
        .map(|(name, got, want)| format!("{name}: {got} != {want}"))
        .collect();
    check(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("{}/{} rows", rows.len(), rows.len()))
}

fn support_shape() -> Result<String, String> {
    let c = FactorCoefficients::default();
    let oracle = |d: f64| {
        if d < 0.8 {
            0.8
        } else if d <= 1.5 {
            0.8 + 0.2 * (d - 0.8) / 0.7
        } else {
            1.0
        }
    };
    let mut worst = 0.0f64;
    for i in 0..20 {
        let d = 2.4 * i as f64 / 19.0;
        worst = worst.max((support_factor_at(d, 1.0, &c) - oracle(d)).abs());
    }
    check(worst <= 1e-9, || format!("max deviation {worst}"))?;
    let mut pp = 0.0f64;
    for i in 1..100 {
        let d = 0.8 + 0.7 * i as f64 / 100.0;
        let percent = 1.0 - (44.0 - 30.0 * d) / 100.0;
        pp = pp.max((support_factor_at(d, 1.0, &c) - percent).abs() * 100.0);
    }
    check(pp <= 1.5, || format!("percent form differs by {pp:.3} pp"))?;
    Ok(format!("20 distances within {worst:.1e}, percent form within {pp:.2} pp"))
}

fn bathroom_mean(result: &EvaluationResult, layout: &RoomLayout) -> f64 {
    let bath = &layout.floor_region("bathroom").expect("bathroom region").polygon;
    let grid = layout.grid();
    result.final_field.summary_where(|i| bath.contains(grid.center(i))).mean
}

struct RoomRun {
    day: EvaluationResult,
    night: EvaluationResult,
    elapsed: Duration,
}

fn day_night(runs: &BTreeMap<&str, RoomRun>) -> Result<String, String> {
    let mut parts = Vec::new();
    for (name, run) in runs {
        let layout = examples::load(name).unwrap();
        let violations = layout
            .grid()
            .indices()
            .filter(|&i| match (run.day.baseline.get(i), run.night.baseline.get(i)) {
                (Some(d), Some(n)) => n < d,
                _ => false,
            })
            .count();
        let (d, n) = (run.day.summary.mean, run.night.summary.mean);
        let shared = run.day.trajectories.iter().zip(&run.night.trajectories).all(|(a, b)| {
            a.points.iter().zip(&b.points).all(|(p, q)| p.position == q.position)
        });
        check(violations == 0, || format!("{name}: {violations} cells darker at night"))?;
        check(n > d, || format!("{name}: night mean {n} <= day mean {d}"))?;
        check(shared, || format!("{name}: trajectories differ between modes"))?;
        check(run.elapsed < Duration::from_secs(10), || {
            format!("{name}: {:.1} s", run.elapsed.as_secs_f64())
        })?;
        parts.push(format!("{name} {d:.4}<{n:.4} in {:.1}s", run.elapsed.as_secs_f64()));
    }
    Ok(parts.join(", "))
}

fn open_room(w: f64, d: f64, extra: &str) -> RoomLayout {
    let doc = format!(
        "[room]\nwidth = {w}\ndepth = {d}\n[[floors]]\nsurface = \"resilient\"\npolygon = [[0,0],[{w},0],[{w},{d}],[0,{d}]]\n{extra}"
    );
    parse_layout(&doc, ParseOptions::default()).unwrap().layout
}

fn planner_vs_oracle() -> Result<String, String> {
    let test_room = examples::load("planner_test").unwrap();
    let block = open_room(
        4.0,
        4.0,
        "[[obstacles]]\npolygon = [[1.5,1.2],[2.5,1.2],[2.5,2.8],[1.5,2.8]]\n\
         [[supports]]\nname = \"rail\"\npolyline = [[0.5,0.1],[3.5,0.1]]\nsupport_level = 1.3\n",
    );
    let gap = open_room(
        3.0,
        3.0,
        "[[walls]]\nfrom = [1.5, 0.0]\nto = [1.5, 2.0]\n\
         [[supports]]\nname = \"bar\"\npolyline = [[2.9,0.5],[2.9,2.5]]\nsupport_level = 1.2\n",
    );
    let cases = [
        ("rail", &test_room, Point::new(0.5, 1.0), Point::new(3.5, 1.0), 1.0),
        ("rail lambda 0", &test_room, Point::new(0.5, 1.0), Point::new(3.5, 1.0), 0.0),
        ("rail lambda 10", &test_room, Point::new(0.5, 0.5), Point::new(3.5, 2.0), 10.0),
        ("block", &block, Point::new(0.5, 2.0), Point::new(3.5, 2.0), 1.0),
        ("gap", &gap, Point::new(0.5, 0.5), Point::new(2.5, 0.5), 1.0),
    ];
    let mut parts = Vec::new();
    for (name, layout, s, g, lambda) in cases {
        let params = PlannerParams {
            lambda,
            horizon: 30,
            ..PlannerParams::default()
        };
        let field = DistanceField::new(layout);
        let t = plan(s, g, layout, &field, &params).map_err(|e| format!("{name}: {e}"))?;
        let o = oracle_plan(s, g, layout, &params, 0.2).map_err(|e| format!("{name}: {e}"))?;
        let slack = discretization_slack(&o, layout, &params, 0.2);
        let bound = 1.1 * o.objective_value + slack;
        check(t.converged, || format!("{name}: not converged"))?;
        check(t.objective_value <= bound, || {
            format!("{name}: {} > 1.1 x {} + {slack}", t.objective_value, o.objective_value)
        })?;
        let step_ok = t.points.windows(2).all(|w| w[0].distance(w[1]) <= params.max_step() + 1e-9);
        let free = t.points.iter().all(|&p| layout.signed_distance(p) > 0.0);
        check(step_ok && free, || format!("{name}: constraint violated"))?;
        parts.push(format!("{name} {:.2}", t.objective_value / o.objective_value));
    }
    Ok(format!("planner/oracle ratios: {}", parts.join(", ")))
}

fn lambda_behavior() -> Result<String, String> {
    let layout = examples::load("planner_test").unwrap();
    let field = DistanceField::new(&layout);
    let (s, g) = (Point::new(0.5, 1.0), Point::new(3.5, 1.0));
    let mut lengths = Vec::new();
    let mut rail_gap = (0.0, 0.0);
    for lambda in [0.0, 1.0, 10.0, 100.0] {
        let params = PlannerParams {
            lambda,
            ..PlannerParams::default()
        };
        let t = plan(s, g, &layout, &field, &params).map_err(|e| e.to_string())?;
        lengths.push(t.path_length());
        if lambda == 0.0 {
            let mean = |pts: &[Point]| pts.iter().map(|q| (2.35 - q.y).abs()).sum::<f64>() / pts.len() as f64;
            let straight = walk(&[s, g], params.horizon, params.max_step()).unwrap();
            rail_gap = (mean(&t.points), mean(&straight));
        }
    }
    check(lengths.windows(2).all(|w| w[1] <= w[0] + 1e-9), || {
        format!("lengths {lengths:?}")
    })?;
    check(rail_gap.0 < rail_gap.1, || format!("rail distance {rail_gap:?}"))?;
    let lengths: Vec<String> = lengths.iter().map(|l| format!("{l:.2}")).collect();
    Ok(format!(
        "lengths {} m; rail distance {:.2} vs straight {:.2}",
        lengths.join(" >= "),
        rail_gap.0,
        rail_gap.1
    ))
}

fn pass_through(runs: &BTreeMap<&str, RoomRun>) -> Result<String, String> {
    let layout = examples::load("outboard_footwall").unwrap();
    let settings = EvaluationSettings {
        scenarios: Some(Vec::new()),
        ..EvaluationSettings::default()
    };
    let r = evaluate_room(&layout, &settings, LightingMode::Day).map_err(|e| e.to_string())?;
    check(r.final_field.values == r.baseline.values, || "final differs from baseline".into())?;
    for (name, run) in runs {
        check(run.day.attempted == 36, || format!("{name}: {} attempted", run.day.attempted))?;
    }
    Ok("final == baseline with no scenarios; 36 attempted in every room".into())
}

fn grab_bars() -> Result<String, String> {
    let settings = EvaluationSettings::default();
    let modes = [LightingMode::Day, LightingMode::Night];
    let mut means = Vec::new();
    for name in ["outboard_footwall", "outboard_footwall_bilateral"] {
        let layout = examples::load(name).unwrap();
        let results = evaluate_modes(&layout, &settings, &modes).map_err(|e| e.to_string())?;
        means.push(results.iter().map(|r| bathroom_mean(r, &layout)).collect::<Vec<_>>());
    }
    let mut parts = Vec::new();
    for (i, mode) in modes.iter().enumerate() {
        let (single, bilateral) = (means[0][i], means[1][i]);
        check(bilateral < single, || {
            format!("{mode}: bilateral {bilateral} >= single {single}")
        })?;
        parts.push(format!("{mode} {bilateral:.4} < {single:.4}"));
    }
    Ok(format!("bathroom mean, bilateral vs single: {}", parts.join(", ")))
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn cli_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for room in examples::ROOMS {
        let mut trees = Vec::new();
        for run in ["a", "b"] {
            let out = dir.path().join(format!("{room}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_fallrisk"))
                .args(["evaluate", "--example", room, "--seed", "20200715", "--out"])
                .arg(&out)
                .env_remove("FALLRISK_CONFIG")
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.success(), || {
                format!("{room}: {}", String::from_utf8_lossy(&status.stderr))
            })?;
            trees.push(read_tree(&out));
        }
        check(trees[0] == trees[1], || format!("{room}: output trees differ"))?;
        check(!trees[0].is_empty(), || format!("{room}: nothing written"))?;
        files += trees[0].len();
    }
    Ok(format!("4 rooms, {files} files byte-identical across runs"))
}

#[test]
fn acceptance() {
    let mut report = Report { lines: Vec::new() };
    println!();

    let (out, t) = timed(golden_cell);
    report.record("golden cell", t, out);
    let (out, t) = timed(coefficient_table);
    report.record("coefficient table", t, out);
    let (out, t) = timed(support_shape);
    report.record("support shape", t, out);

    let settings = EvaluationSettings::default();
    let mut runs = BTreeMap::new();
    for name in examples::ROOMS {
        let layout = examples::load(name).unwrap();
        let (results, elapsed) = timed(|| evaluate_modes(&layout, &settings, &[LightingMode::Day, LightingMode::Night]));
        let mut results = results.unwrap();
        let night = results.pop().unwrap();
        let day = results.pop().unwrap();
        runs.insert(name, RoomRun { day, night, elapsed });
    }
    let total: Duration = runs.values().map(|r| r.elapsed).sum();
    report.record("day/night monotonicity", total, day_night(&runs));

    let (out, t) = timed(planner_vs_oracle);
    report.record("planner vs oracle", t, out.and_then(|s| {
        check(t < Duration::from_secs(60), || format!("took {:.1} s", t.as_secs_f64()))?;
        Ok(s)
    }));
    let (out, t) = timed(lambda_behavior);
    report.record("lambda behavior", t, out);
    let (out, t) = timed(|| pass_through(&runs));
    report.record("pipeline pass-through", t, out);
    let (out, t) = timed(grab_bars);
    report.record("bilateral grab bars", t, out);
    let (out, t) = timed(cli_determinism);
    report.record("cli determinism", t, out);

    let failed: Vec<&String> = report.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}

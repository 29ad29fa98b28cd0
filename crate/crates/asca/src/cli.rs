//! Command implementations behind the `asca` binary: scenario resolution,
//! run orchestration, and report files. Kept in the library so tests can
//! drive commands directly.

use crate::error::{Error, Result};
use crate::files::{self, AnyScenario, SummaryDoc, SCHEMA_VERSION};
use crate::metrics::{self, Distribution, LinearFit, RunMetrics};
use crate::planner::{ActivationMode, Plannable, SimParams};
use crate::scenario::{self, Scenario};
use crate::sim::{self, SimOutcome};
use crate::vec::Vec2;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable that overrides the default output directory (the
/// `--out` flag still wins).
pub const OUT_DIR_ENV: &str = "ASCA_OUT_DIR";

pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Exit codes: 0 success, 2 configuration error, 3 invalid scenario,
/// 4 non-convergence, 5 separation-audit violation.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::FileFormat { .. } | Error::Io(_) => 2,
        Error::InvalidScenario(_) | Error::SamplingExhausted { .. } => 3,
        _ => 1,
    }
}

pub const EXIT_NON_CONVERGED: i32 = 4;
pub const EXIT_AUDIT_VIOLATION: i32 = 5;

/// CLI-level parameter overrides layered over a base parameter set.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParamOverrides {
    pub d_min: Option<f64>,
    pub v_max: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub d_final: Option<f64>,
    pub activation: Option<ActivationMode>,
}

impl ParamOverrides {
    pub fn apply(&self, mut base: SimParams) -> SimParams {
        if let Some(v) = self.d_min {
            base.d_min = v;
        }
        if let Some(v) = self.v_max {
            base.v_max = v;
        }
        if let Some(v) = self.dt {
            base.dt = v;
        }
        if let Some(v) = self.t_final {
            base.t_final = v;
        }
        if let Some(v) = self.d_final {
            base.d_final = v;
        }
        if let Some(v) = self.activation {
            base.activation = v;
        }
        base
    }
}

/// Where a run's scenario comes from: a scenario file on disk, or one of
/// the built-in generators written as `name:key=value,key=value`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioSpec {
    File(PathBuf),
    Generator {
        name: String,
        args: BTreeMap<String, String>,
    },
}

impl ScenarioSpec {
    /// A spec naming an existing file (or anything ending in `.toml`) is
    /// a file; everything else is parsed as a generator spec.
    pub fn parse(text: &str) -> Result<ScenarioSpec> {
        let path = Path::new(text);
        if path.exists() || text.ends_with(".toml") {
            return Ok(ScenarioSpec::File(path.to_path_buf()));
        }
        let (name, rest) = match text.split_once(':') {
            Some((name, rest)) => (name, rest),
            None => (text, ""),
        };
        let mut args = BTreeMap::new();
        for piece in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = piece.split_once('=').ok_or_else(|| {
                Error::Config(format!("generator argument '{piece}' is not key=value"))
            })?;
            if args
                .insert(key.trim().to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::Config(format!(
                    "duplicate generator argument '{key}'"
                )));
            }
        }
        Ok(ScenarioSpec::Generator {
            name: name.trim().to_string(),
            args,
        })
    }
}

struct ArgMap(BTreeMap<String, String>);

impl ArgMap {
    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(text) => text
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("argument {key}='{text}' is not a number"))),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(text) => text
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::Config(format!("argument {key}='{text}' is not a count"))),
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(text) => text
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("argument {key}='{text}' is not an integer"))),
        }
    }

    fn finish(self, generator: &str) -> Result<()> {
        if let Some(key) = self.0.keys().next() {
            return Err(Error::Config(format!(
                "unknown argument '{key}' for generator '{generator}'"
            )));
        }
        Ok(())
    }
}

/// Resolves a scenario spec plus overrides into a concrete scenario and
/// parameter set, validating both before any simulation starts.
pub fn resolve_scenario(
    spec: &ScenarioSpec,
    overrides: &ParamOverrides,
) -> Result<(AnyScenario, SimParams)> {
    match spec {
        ScenarioSpec::File(path) => {
            let (scenario, file_params) = files::read_scenario(path)?;
            let params = overrides.apply(file_params);
            params.validate()?;
            match &scenario {
                AnyScenario::D2(s) => scenario::validate(s, &params)?,
                AnyScenario::D3(s) => scenario::validate(s, &params)?,
            }
            Ok((scenario, params))
        }
        ScenarioSpec::Generator { name, args } => {
            let mut map = ArgMap(args.clone());
            let base = overrides.apply(SimParams::default());
            match name.as_str() {
                "mirror" | "mirror_swap" => {
                    let params = base.with_dims(2);
                    params.validate()?;
                    let n = require(map.take_usize("n")?, name, "n")?;
                    let spacing = map.take_f64("spacing")?.unwrap_or(15.0);
                    map.finish(name)?;
                    Ok((
                        AnyScenario::D2(scenario::mirror_swap(n, spacing, &params)?),
                        params,
                    ))
                }
                "diagonal" | "diagonal_swap" => {
                    let params = base.with_dims(2);
                    params.validate()?;
                    let n = require(map.take_usize("n")?, name, "n")?;
                    let spacing = map.take_f64("spacing")?.unwrap_or(16.0);
                    map.finish(name)?;
                    Ok((
                        AnyScenario::D2(scenario::diagonal_swap(n, spacing, &params)?),
                        params,
                    ))
                }
                "circle" | "circle_swap" => {
                    let params = base.with_dims(2);
                    params.validate()?;
                    let n = require(map.take_usize("n")?, name, "n")?;
                    let radius = map
                        .take_f64("radius")?
                        .unwrap_or_else(|| scenario::circle_radius_default(n, &params));
                    map.finish(name)?;
                    Ok((
                        AnyScenario::D2(scenario::circle_swap(n, radius, &params)?),
                        params,
                    ))
                }
                "disk" | "disk_swap" => {
                    let params = base.with_dims(2);
                    params.validate()?;
                    let n = require(map.take_usize("n")?, name, "n")?;
                    let inner = map.take_f64("inner")?.unwrap_or(60.0);
                    let ring = map.take_f64("ring")?.unwrap_or(15.0);
                    map.finish(name)?;
                    Ok((
                        AnyScenario::D2(scenario::disk_swap(n, inner, ring, &params)?),
                        params,
                    ))
                }
                "sphere" | "sphere_swap" => {
                    let params = base.with_dims(3);
                    params.validate()?;
                    let n = require(map.take_usize("n")?, name, "n")?;
                    let radius = map.take_f64("radius")?.unwrap_or(60.0);
                    map.finish(name)?;
                    Ok((
                        AnyScenario::D3(scenario::sphere_swap(n, radius, &params)?),
                        params,
                    ))
                }
                "random" => {
                    let params = base.with_dims(2);
                    params.validate()?;
                    let n = map.take_usize("n")?.unwrap_or(100);
                    let side = map.take_f64("box")?.unwrap_or(500.0);
                    let seed = map.take_u64("seed")?.unwrap_or(0);
                    map.finish(name)?;
                    let bounds = (Vec2::ZERO, Vec2::new(side, side));
                    Ok((
                        AnyScenario::D2(scenario::random_scenario(n, bounds, seed, &params)?),
                        params,
                    ))
                }
                other => Err(Error::Config(format!(
                    "unknown generator '{other}' (expected mirror, diagonal, circle, disk, \
                     sphere, or random)"
                ))),
            }
        }
    }
}

fn require<T>(value: Option<T>, generator: &str, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("generator '{generator}' requires argument '{key}'")))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: ScenarioSpec,
    pub overrides: ParamOverrides,
    pub out_dir: PathBuf,
    pub decimate: u32,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub label: String,
    pub outcome: SimOutcome,
    pub metrics: RunMetrics,
    pub audit_violations: usize,
}

fn write_audit_csv(path: &Path, report: &metrics::CollisionReport) -> Result<()> {
    let mut out =
        String::from("step,time,first_kind,first_id,second_kind,second_id,distance,threshold\n");
    for v in &report.violations {
        let body = |b: metrics::BodyRef| match b {
            metrics::BodyRef::Agent(i) => ("agent", i),
            metrics::BodyRef::Obstacle(i) => ("obstacle", i),
        };
        let (fk, fi) = body(v.first);
        let (sk, si) = body(v.second);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            v.step,
            files::fmt_g9(v.time),
            fk,
            fi,
            sk,
            si,
            files::fmt_g9(v.distance),
            files::fmt_g9(v.threshold)
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

fn run_and_write<V: Plannable>(
    scenario: &Scenario<V>,
    params: &SimParams,
    out_dir: &Path,
    decimate: u32,
    write_trajectory: bool,
) -> Result<RunReport> {
    fs::create_dir_all(out_dir)?;
    files::write_scenario(&out_dir.join("scenario.toml"), scenario, params)?;
    let (log, outcome) = sim::run(scenario, params)?;
    let run_metrics = metrics::compute_run_metrics(&log, &outcome, params);
    let audit = metrics::collision_audit(&log, params);
    if write_trajectory {
        files::write_trajectory(&out_dir.join("trajectory.csv"), &log, decimate)?;
    }
    write_audit_csv(&out_dir.join("audit.csv"), &audit)?;
    files::write_summary(
        &out_dir.join("summary.toml"),
        &SummaryDoc {
            schema: SCHEMA_VERSION,
            label: scenario.label.clone(),
            converged: outcome.converged,
            steps: outcome.steps,
            travel_time: run_metrics.travel_time,
            avg_trajectory_length: run_metrics.avg_trajectory_length,
            min_separation: run_metrics.min_separation,
            d_max_final: outcome.d_max_final,
            audit_violations: audit.len(),
            params: *params,
        },
    )?;
    Ok(RunReport {
        label: scenario.label.clone(),
        outcome,
        metrics: run_metrics,
        audit_violations: audit.len(),
    })
}

/// `run`: simulate one scenario and write scenario.toml, trajectory.csv,
/// audit.csv, and summary.toml into the output directory.
pub fn cmd_run(config: &RunConfig) -> Result<RunReport> {
    let (scenario, params) = resolve_scenario(&config.spec, &config.overrides)?;
    let report = match &scenario {
        AnyScenario::D2(s) => run_and_write(s, &params, &config.out_dir, config.decimate, true)?,
        AnyScenario::D3(s) => run_and_write(s, &params, &config.out_dir, config.decimate, true)?,
    };
    println!(
        "{}: converged={} travel_time={:.2}s avg_length={:.1}m min_sep={} audit_violations={}",
        report.label,
        report.outcome.converged,
        report.metrics.travel_time,
        report.metrics.avg_trajectory_length,
        report
            .metrics
            .min_separation
            .map_or("n/a".to_string(), |v| format!("{v:.2}m")),
        report.audit_violations,
    );
    Ok(report)
}

/// The five standard benchmarks at the default parameter set, in a fixed
/// order.
pub const BENCHMARKS: [&str; 5] = ["mirror", "diagonal", "circle", "disk", "sphere"];

fn benchmark_spec(name: &str) -> ScenarioSpec {
    ScenarioSpec::Generator {
        name: name.to_string(),
        args: BTreeMap::from([("n".to_string(), "100".to_string())]),
    }
}

fn map_runs<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    if parallel {
        items.into_par_iter().map(f).collect()
    } else {
        items.into_iter().map(f).collect()
    }
}

/// `bench`: all five benchmarks at N = 100; writes a per-benchmark
/// summary/audit under `<out>/<name>/` and the combined `bench.csv`
/// table. Trajectories are omitted here; use `run` to capture one.
pub fn cmd_bench(
    out_dir: &Path,
    overrides: &ParamOverrides,
    parallel: bool,
) -> Result<Vec<RunReport>> {
    fs::create_dir_all(out_dir)?;
    let jobs: Vec<&str> = BENCHMARKS.to_vec();
    let results = map_runs(jobs, parallel, |name| -> Result<RunReport> {
        let (scenario, params) = resolve_scenario(&benchmark_spec(name), overrides)?;
        let sub_dir = out_dir.join(name);
        match &scenario {
            AnyScenario::D2(s) => run_and_write(s, &params, &sub_dir, 1, false),
            AnyScenario::D3(s) => run_and_write(s, &params, &sub_dir, 1, false),
        }
    });
    let mut reports = Vec::with_capacity(results.len());
    for result in results {
        reports.push(result?);
    }

    let mut table = String::from("benchmark,travel_time,avg_trajectory_length,min_separation\n");
    for (name, report) in BENCHMARKS.iter().zip(&reports) {
        table.push_str(&format!(
            "{},{},{},{}\n",
            name,
            files::fmt_g9(report.metrics.travel_time),
            files::fmt_g9(report.metrics.avg_trajectory_length),
            report
                .metrics
                .min_separation
                .map_or(String::new(), files::fmt_g9),
        ));
        println!(
            "{}: travel_time={:.2}s avg_length={:.1}m min_sep={:.2}m converged={}",
            name,
            report.metrics.travel_time,
            report.metrics.avg_trajectory_length,
            report.metrics.min_separation.unwrap_or(f64::NAN),
            report.outcome.converged,
        );
    }
    fs::write(out_dir.join("bench.csv"), table)?;
    Ok(reports)
}

#[derive(Clone, Debug)]
pub struct ScaleRow {
    pub n: usize,
    pub travel_time: Option<f64>,
    pub converged: bool,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScaleReport {
    pub rows: Vec<ScaleRow>,
    pub fit: Option<LinearFit>,
}

#[derive(Serialize)]
struct ScaleFitDoc {
    schema: u32,
    inner_radius: f64,
    ring_spacing: f64,
    points_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_squared: Option<f64>,
}

/// `scale`: disk swaps with a fixed inner radius and growing agent count;
/// emits `(N, travel_time)` pairs plus a least-squares line and its R².
pub fn cmd_scale(
    counts: &[usize],
    inner_radius: f64,
    ring_spacing: f64,
    overrides: &ParamOverrides,
    out_dir: &Path,
    parallel: bool,
) -> Result<ScaleReport> {
    if counts.is_empty() {
        return Err(Error::Config("scale needs at least one agent count".into()));
    }
    fs::create_dir_all(out_dir)?;
    let params = overrides.apply(SimParams::default()).with_dims(2);
    params.validate()?;

    let rows = map_runs(counts.to_vec(), parallel, |n| {
        match scenario::disk_swap(n, inner_radius, ring_spacing, &params)
            .and_then(|s| sim::run(&s, &params))
        {
            Ok((_, outcome)) => ScaleRow {
                n,
                travel_time: Some(outcome.elapsed_sim_time),
                converged: outcome.converged,
                skipped: None,
            },
            Err(e) => ScaleRow {
                n,
                travel_time: None,
                converged: false,
                skipped: Some(e.to_string()),
            },
        }
    });

    let mut csv = String::from("n,travel_time,status\n");
    for row in &rows {
        let status = if row.skipped.is_some() {
            "skipped"
        } else if row.converged {
            "ok"
        } else {
            "nonconverged"
        };
        csv.push_str(&format!(
            "{},{},{}\n",
            row.n,
            row.travel_time.map_or(String::new(), files::fmt_g9),
            status
        ));
        println!(
            "n={}: {}",
            row.n,
            row.skipped.clone().unwrap_or_else(|| format!(
                "travel_time={:.2}s converged={}",
                row.travel_time.unwrap_or(f64::NAN),
                row.converged
            ))
        );
    }
    fs::write(out_dir.join("scale.csv"), csv)?;

    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.converged)
        .filter_map(|r| r.travel_time.map(|t| (r.n as f64, t)))
        .collect();
    let fit = metrics::linear_fit(&points);
    files::write_toml(
        &out_dir.join("scale_fit.toml"),
        &ScaleFitDoc {
            schema: SCHEMA_VERSION,
            inner_radius,
            ring_spacing,
            points_used: points.len(),
            slope: fit.map(|f| f.slope),
            intercept: fit.map(|f| f.intercept),
            r_squared: fit.map(|f| f.r_squared),
        },
    )?;
    if let Some(fit) = fit {
        println!(
            "linear fit over {} points: travel_time ≈ {:.4}·N + {:.2}, R² = {:.4}",
            points.len(),
            fit.slope,
            fit.intercept,
            fit.r_squared
        );
    }
    Ok(ScaleReport { rows, fit })
}

#[derive(Clone, Debug)]
pub struct RandomReport {
    pub travel_times: Vec<f64>,
    pub aspect_ratio: f64,
    pub distribution: Distribution,
    pub nonconverged: usize,
    pub min_separation: f64,
}

#[derive(Serialize)]
struct RandomStatsDoc {
    schema: u32,
    scenarios: usize,
    agents: usize,
    base_seed: u64,
    box_side: f64,
    rng: &'static str,
    nonconverged: usize,
    aspect_ratio: f64,
    travel_time: Distribution,
}

/// `random`: seeded random scenarios `base_seed..base_seed+count`; emits
/// per-run travel times and box-plot statistics plus the aspect ratio.
pub fn cmd_random(
    num_scenarios: usize,
    agents: usize,
    base_seed: u64,
    box_side: f64,
    overrides: &ParamOverrides,
    out_dir: &Path,
    parallel: bool,
) -> Result<RandomReport> {
    if num_scenarios == 0 {
        return Err(Error::Config("random needs at least one scenario".into()));
    }
    fs::create_dir_all(out_dir)?;
    let params = overrides.apply(SimParams::default()).with_dims(2);
    params.validate()?;
    let bounds = (Vec2::ZERO, Vec2::new(box_side, box_side));

    let results = map_runs(
        (0..num_scenarios as u64).collect::<Vec<_>>(),
        parallel,
        |i| -> Result<(u64, SimOutcome, Option<f64>)> {
            let seed = base_seed + i;
            let s = scenario::random_scenario(agents, bounds, seed, &params)?;
            let (log, outcome) = sim::run(&s, &params)?;
            let min_sep = metrics::minimum_separation(&log).ok();
            Ok((seed, outcome, min_sep))
        },
    );

    let mut csv = String::from("index,seed,travel_time,converged,min_separation\n");
    let mut travel_times = Vec::with_capacity(num_scenarios);
    let mut nonconverged = 0usize;
    let mut min_separation = f64::INFINITY;
    for (i, result) in results.into_iter().enumerate() {
        let (seed, outcome, min_sep) = result?;
        travel_times.push(outcome.elapsed_sim_time);
        if !outcome.converged {
            nonconverged += 1;
        }
        if let Some(m) = min_sep {
            min_separation = min_separation.min(m);
        }
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            i,
            seed,
            files::fmt_g9(outcome.elapsed_sim_time),
            outcome.converged,
            min_sep.map_or(String::new(), files::fmt_g9)
        ));
    }
    fs::write(out_dir.join("random_runs.csv"), csv)?;

    let distribution = metrics::five_number_summary(&travel_times)?;
    let aspect = metrics::aspect_ratio(&travel_times)?;
    files::write_toml(
        &out_dir.join("random_stats.toml"),
        &RandomStatsDoc {
            schema: SCHEMA_VERSION,
            scenarios: num_scenarios,
            agents,
            base_seed,
            box_side,
            rng: "chacha20",
            nonconverged,
            aspect_ratio: aspect,
            travel_time: distribution.clone(),
        },
    )?;
    println!(
        "{} runs: median={:.2}s iqr=[{:.2}, {:.2}] aspect_ratio={:.1}% nonconverged={}",
        num_scenarios, distribution.median, distribution.q1, distribution.q3, aspect, nonconverged
    );
    let _ = std::io::stdout().flush();
    Ok(RandomReport {
        travel_times,
        aspect_ratio: aspect,
        distribution,
        nonconverged,
        min_separation,
    })
}

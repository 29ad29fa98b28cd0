//! On-disk formats: scenario files (TOML), trajectory files (CSV), and
//! summary documents (TOML).
//!
//! Data files never contain timestamps or other environment-dependent
//! content, so rerunning a command with identical inputs reproduces them
//! byte for byte. Trajectory numbers are printed with 9 significant
//! digits (`%.8e`); scenario and summary TOML floats use the shortest
//! exact representation.

use crate::error::{Error, Result};
use crate::planner::{avoidance_radius, SimParams};
use crate::scenario::{Provenance, Scenario};
use crate::sim::{BodyRecord, Obstacle, ObstacleMotion, StepRecord, TrajectoryLog};
use crate::vec::{Coord, Vec2, Vec3};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// 9-significant-digit representation used in trajectory and table files.
pub fn fmt_g9(x: f64) -> String {
    format!("{x:.8e}")
}

fn format_error(what: &'static str, path: &Path, detail: impl Into<String>) -> Error {
    Error::FileFormat {
        what,
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    schema: u32,
    label: String,
    dims: usize,
    generator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<String>,
    starts: Vec<Vec<f64>>,
    goals: Vec<Vec<f64>>,
    params: SimParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    obstacles: Vec<ObstacleDoc>,
}

#[derive(Serialize, Deserialize)]
struct ObstacleDoc {
    position: Vec<f64>,
    radius: f64,
    /// Omitted for static obstacles.
    #[serde(skip_serializing_if = "Option::is_none")]
    velocity: Option<Vec<f64>>,
}

fn point_to_row<V: Coord>(p: V) -> Vec<f64> {
    p.coords()[..V::DIMS].to_vec()
}

fn row_to_point<V: Coord>(row: &[f64]) -> Option<V> {
    if row.len() != V::DIMS {
        return None;
    }
    let mut c = [0.0; 3];
    c[..V::DIMS].copy_from_slice(row);
    Some(V::from_coords(c))
}

pub fn write_scenario<V: Coord>(
    path: &Path,
    scenario: &Scenario<V>,
    params: &SimParams,
) -> Result<()> {
    let doc = ScenarioDoc {
        schema: SCHEMA_VERSION,
        label: scenario.label.clone(),
        dims: V::DIMS,
        generator: scenario.provenance.generator.clone(),
        seed: scenario.provenance.seed,
        rng: scenario.provenance.rng.clone(),
        starts: scenario.starts.iter().map(|&p| point_to_row(p)).collect(),
        goals: scenario.goals.iter().map(|&p| point_to_row(p)).collect(),
        params: *params,
        obstacles: scenario
            .obstacles
            .iter()
            .map(|o| ObstacleDoc {
                position: point_to_row(o.initial_position),
                radius: o.radius,
                velocity: match o.motion {
                    ObstacleMotion::Static => None,
                    ObstacleMotion::Linear { velocity } => Some(point_to_row(velocity)),
                },
            })
            .collect(),
    };
    let text = toml::to_string(&doc).map_err(|e| format_error("scenario", path, e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

/// A scenario of either dimensionality, as read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyScenario {
    D2(Scenario<Vec2>),
    D3(Scenario<Vec3>),
}

impl AnyScenario {
    pub fn dims(&self) -> usize {
        match self {
            AnyScenario::D2(_) => 2,
            AnyScenario::D3(_) => 3,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            AnyScenario::D2(s) => &s.label,
            AnyScenario::D3(s) => &s.label,
        }
    }
}

fn doc_to_scenario<V: Coord>(doc: &ScenarioDoc, path: &Path) -> Result<Scenario<V>> {
    let convert = |rows: &[Vec<f64>], what: &str| -> Result<Vec<V>> {
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                row_to_point(row).ok_or_else(|| {
                    format_error(
                        "scenario",
                        path,
                        format!(
                            "{what} {i} has {} coordinates, expected {}",
                            row.len(),
                            V::DIMS
                        ),
                    )
                })
            })
            .collect()
    };
    let obstacles = doc
        .obstacles
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let position = row_to_point(&o.position).ok_or_else(|| {
                format_error("scenario", path, format!("obstacle {i} position size"))
            })?;
            let motion = match &o.velocity {
                None => ObstacleMotion::Static,
                Some(v) => ObstacleMotion::Linear {
                    velocity: row_to_point(v).ok_or_else(|| {
                        format_error("scenario", path, format!("obstacle {i} velocity size"))
                    })?,
                },
            };
            Ok(Obstacle {
                initial_position: position,
                radius: o.radius,
                motion,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        label: doc.label.clone(),
        starts: convert(&doc.starts, "start")?,
        goals: convert(&doc.goals, "goal")?,
        obstacles,
        provenance: Provenance {
            generator: doc.generator.clone(),
            seed: doc.seed,
            rng: doc.rng.clone(),
        },
    })
}

pub fn read_scenario(path: &Path) -> Result<(AnyScenario, SimParams)> {
    let text = fs::read_to_string(path)?;
    let doc: ScenarioDoc =
        toml::from_str(&text).map_err(|e| format_error("scenario", path, e.to_string()))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(format_error(
            "scenario",
            path,
            format!("unsupported schema version {}", doc.schema),
        ));
    }
    if doc.params.dims != doc.dims {
        return Err(format_error(
            "scenario",
            path,
            format!(
                "dims {} disagrees with params.dims {}",
                doc.dims, doc.params.dims
            ),
        ));
    }
    let scenario = match doc.dims {
        2 => AnyScenario::D2(doc_to_scenario(&doc, path)?),
        3 => AnyScenario::D3(doc_to_scenario(&doc, path)?),
        other => {
            return Err(format_error(
                "scenario",
                path,
                format!("dims must be 2 or 3, got {other}"),
            ))
        }
    };
    Ok((scenario, doc.params))
}

// ---------------------------------------------------------------------------
// Trajectory files
// ---------------------------------------------------------------------------

pub const TRAJECTORY_HEADER: &str = "t,body_id,kind,x,y,z,vx,vy,vz";

fn write_body_row<V: Coord, W: Write>(
    out: &mut W,
    time: f64,
    body_id: usize,
    kind: &str,
    body: &BodyRecord<V>,
) -> std::io::Result<()> {
    let p = body.position.coords();
    let v = body.velocity.coords();
    let (z, vz) = if V::DIMS == 3 {
        (fmt_g9(p[2]), fmt_g9(v[2]))
    } else {
        (String::new(), String::new())
    };
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        fmt_g9(time),
        body_id,
        kind,
        fmt_g9(p[0]),
        fmt_g9(p[1]),
        z,
        fmt_g9(v[0]),
        fmt_g9(v[1]),
        vz
    )
}

/// Writes one record per (step, body). `decimate = k` keeps every k-th
/// step; the initial and final steps are always kept. Metrics are always
/// computed from the in-memory undecimated log, never from this file.
pub fn write_trajectory<V: Coord>(
    path: &Path,
    log: &TrajectoryLog<V>,
    decimate: u32,
) -> Result<()> {
    let decimate = decimate.max(1) as usize;
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    let last = log.steps.len().saturating_sub(1);
    let n = log.agent_count();
    for (k, record) in log.steps.iter().enumerate() {
        if k % decimate != 0 && k != last {
            continue;
        }
        for (i, agent) in record.agents.iter().enumerate() {
            write_body_row(&mut out, record.time, i, "agent", agent)?;
        }
        for (i, obstacle) in record.obstacles.iter().enumerate() {
            write_body_row(&mut out, record.time, n + i, "obstacle", obstacle)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// A trajectory log of either dimensionality, as read back from disk.
pub enum AnyLog {
    D2(TrajectoryLog<Vec2>),
    D3(TrajectoryLog<Vec3>),
}

struct RawRow {
    time: f64,
    kind: u8, // 0 agent, 1 obstacle
    coords: [f64; 3],
    velocity: [f64; 3],
    dims: usize,
}

fn parse_row(line: &str, path: &Path, lineno: usize) -> Result<RawRow> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 9 {
        return Err(format_error(
            "trajectory",
            path,
            format!("line {lineno}: expected 9 fields, found {}", fields.len()),
        ));
    }
    let num = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| {
            format_error(
                "trajectory",
                path,
                format!("line {lineno}: bad {what} '{s}'"),
            )
        })
    };
    let time = num(fields[0], "time")?;
    let kind = match fields[2] {
        "agent" => 0,
        "obstacle" => 1,
        other => {
            return Err(format_error(
                "trajectory",
                path,
                format!("line {lineno}: unknown body kind '{other}'"),
            ))
        }
    };
    let dims = if fields[5].is_empty() { 2 } else { 3 };
    let mut coords = [0.0; 3];
    let mut velocity = [0.0; 3];
    coords[0] = num(fields[3], "x")?;
    coords[1] = num(fields[4], "y")?;
    velocity[0] = num(fields[6], "vx")?;
    velocity[1] = num(fields[7], "vy")?;
    if dims == 3 {
        coords[2] = num(fields[5], "z")?;
        velocity[2] = num(fields[8], "vz")?;
    } else if !fields[8].is_empty() {
        return Err(format_error(
            "trajectory",
            path,
            format!("line {lineno}: vz present but z empty"),
        ));
    }
    Ok(RawRow {
        time,
        kind,
        coords,
        velocity,
        dims,
    })
}

fn rows_to_log<V: Coord>(rows: &[RawRow], params: &SimParams) -> TrajectoryLog<V> {
    let mut steps: Vec<StepRecord<V>> = Vec::new();
    for row in rows {
        let body = BodyRecord {
            position: V::from_coords(row.coords),
            velocity: V::from_coords(row.velocity),
        };
        let fresh = match steps.last() {
            None => true,
            Some(last) => last.time != row.time,
        };
        if fresh {
            steps.push(StepRecord {
                time: row.time,
                agents: vec![],
                obstacles: vec![],
            });
        }
        let record = steps.last_mut().expect("just pushed");
        if row.kind == 0 {
            record.agents.push(body);
        } else {
            record.obstacles.push(body);
        }
    }
    let obstacle_count = steps.first().map_or(0, |r| r.obstacles.len());
    TrajectoryLog {
        params: *params,
        agent_radius: avoidance_radius(params),
        // Obstacle radii are not stored in trajectory files.
        obstacle_radii: vec![0.0; obstacle_count],
        steps,
    }
}

/// Reads a trajectory file back. Obstacle radii are not part of the
/// format, so the reloaded log carries zero radii; position-based metrics
/// (separation, trajectory length) are unaffected.
pub fn read_trajectory(path: &Path, params: &SimParams) -> Result<AnyLog> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRAJECTORY_HEADER => {}
        _ => return Err(format_error("trajectory", path, "missing header row")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        rows.push(parse_row(line, path, idx + 1)?);
    }
    let dims = match rows.first() {
        None => return Err(format_error("trajectory", path, "no data rows")),
        Some(r) => r.dims,
    };
    if rows.iter().any(|r| r.dims != dims) {
        return Err(format_error("trajectory", path, "mixed 2D and 3D rows"));
    }
    Ok(match dims {
        2 => AnyLog::D2(rows_to_log(&rows, params)),
        _ => AnyLog::D3(rows_to_log(&rows, params)),
    })
}

// ---------------------------------------------------------------------------
// Summary files
// ---------------------------------------------------------------------------

/// Per-run summary document, serialized as TOML.
#[derive(Serialize, Deserialize)]
pub struct SummaryDoc {
    pub schema: u32,
    pub label: String,
    pub converged: bool,
    pub steps: u64,
    pub travel_time: f64,
    pub avg_trajectory_length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
    pub d_max_final: f64,
    pub audit_violations: usize,
    pub params: SimParams,
}

pub fn write_summary(path: &Path, doc: &SummaryDoc) -> Result<()> {
    write_toml(path, doc)
}

/// Serializes any report document as TOML.
pub fn write_toml<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let text = toml::to_string(doc).map_err(|e| format_error("summary", path, e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

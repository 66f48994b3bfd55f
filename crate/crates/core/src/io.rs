//! File formats: tube-spec JSON, point and joint CSVs, comparison reports
//! and synthetic dataset bundles.
//!
//! Numbers are written with Rust's shortest round-trip formatting so a file
//! read back reproduces the in-memory values exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::{MarkerSample, MarkerTrack, TrajectoryComparison};
use crate::geometry::{TendonSpec, TubeSpec};
use crate::kinematics::{BackboneCurve, JointState, KinematicsError, Point3, TipTrajectory};
use crate::simulation::{MarkerChannel, NoiseSpec, SyntheticDataset};

/// The prototype tube and tendon as a spec document.
pub const PROTOTYPE_SPEC_JSON: &str = include_str!("../data/prototype.json");

pub const CURVE_HEADER: [&str; 4] = ["s_mm", "x_mm", "y_mm", "z_mm"];
pub const TRACK_HEADER: [&str; 6] = ["eta", "x_mm", "y_mm", "z_mm", "dl_t_mm", "T_N"];
pub const JOINT_HEADER: [&str; 6] = ["dl_t_mm", "T_N", "R_mm", "H_mm", "phi_rad", "theta_rad"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl IoError {
    /// True when the file was read but its contents are malformed.
    pub fn is_malformed(&self) -> bool {
        !matches!(self, IoError::Io { .. })
    }

    fn format(path: &Path, message: impl Into<String>) -> Self {
        IoError::Format {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| IoError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Tube and tendon as read from JSON. Other top-level keys are ignored, so
/// a dataset bundle's `spec.json` is accepted too.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub tube: TubeSpec,
    #[serde(default)]
    pub tendon: TendonSpec,
}

impl SpecDocument {
    pub fn prototype() -> Self {
        serde_json::from_str(PROTOTYPE_SPEC_JSON).expect("bundled spec parses")
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_atomic(path, to_json_pretty(value).as_bytes())
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn push_row(out: &mut String, fields: &[f64]) {
    let row: Vec<String> = fields.iter().map(|&x| num(x)).collect();
    let _ = writeln!(out, "{}", row.join(","));
}

pub fn curve_csv(curve: &BackboneCurve) -> String {
    let mut out = CURVE_HEADER.join(",") + "\n";
    for c in curve.samples() {
        push_row(&mut out, &[c.s, c.point.x, c.point.y, c.point.z]);
    }
    out
}

pub fn tip_csv(tip: &TipTrajectory) -> String {
    let mut out = TRACK_HEADER[..4].join(",") + "\n";
    for t in &tip.samples {
        push_row(&mut out, &[t.eta, t.point.x, t.point.y, t.point.z]);
    }
    out
}

/// Six columns when every sample carries stroke and tension, four otherwise.
pub fn track_csv(track: &MarkerTrack) -> String {
    let with_actuation = track.actuation();
    let width = if with_actuation.is_some() { 6 } else { 4 };
    let mut out = TRACK_HEADER[..width].join(",") + "\n";
    for (i, m) in track.samples.iter().enumerate() {
        let mut row = vec![m.eta, m.point.x, m.point.y, m.point.z];
        if let Some(act) = &with_actuation {
            row.extend([act[i].0, act[i].1]);
        }
        push_row(&mut out, &row);
    }
    out
}

/// One row of a joint CSV. Samples the model could not realize carry NaN in
/// the joint columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointRow {
    pub stroke: f64,
    pub tension: f64,
    pub radius: f64,
    pub height: f64,
    pub phi: f64,
    pub theta: f64,
}

impl JointRow {
    pub fn new(stroke: f64, tension: f64, joint: Result<&JointState, &KinematicsError>, theta: f64) -> Self {
        match joint {
            Ok(j) => Self {
                stroke,
                tension,
                radius: j.radius(),
                height: j.height(),
                phi: j.deflection_angle(),
                theta: j.actuation_angle(),
            },
            Err(_) => Self {
                stroke,
                tension,
                radius: f64::NAN,
                height: f64::NAN,
                phi: f64::NAN,
                theta,
            },
        }
    }

    pub fn is_valid(&self) -> bool {
        self.radius.is_finite() && self.height.is_finite() && self.phi.is_finite()
    }
}

pub fn joints_csv(rows: &[JointRow]) -> String {
    let mut out = JOINT_HEADER.join(",") + "\n";
    for r in rows {
        push_row(&mut out, &[r.stroke, r.tension, r.radius, r.height, r.phi, r.theta]);
    }
    out
}

fn read_records(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let header: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    IoError::format(path, format!("row {}: `{field}` is not a number", line + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Points keyed by progression or arc length, as read from any of the
/// point CSVs this crate writes.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTable {
    /// `eta` or `s_mm`.
    pub key: String,
    pub samples: Vec<MarkerSample>,
}

impl PointTable {
    pub fn points(&self) -> Vec<Point3> {
        self.samples.iter().map(|m| m.point).collect()
    }

    pub fn keys(&self) -> Vec<f64> {
        self.samples.iter().map(|m| m.eta).collect()
    }

    pub fn to_track(&self, arc_length: f64) -> MarkerTrack {
        MarkerTrack {
            arc_length,
            samples: self.samples.clone(),
        }
    }

    pub fn to_tip_trajectory(&self) -> TipTrajectory {
        TipTrajectory {
            samples: self
                .samples
                .iter()
                .map(|m| crate::kinematics::TipSample {
                    eta: m.eta,
                    point: m.point,
                })
                .collect(),
        }
    }
}

pub fn read_points(path: &Path) -> Result<PointTable, IoError> {
    let (header, rows) = read_records(path)?;
    let key = header.first().cloned().unwrap_or_default();
    let expected_tail = &TRACK_HEADER[1..4];
    let ok_key = key == "eta" || key == "s_mm";
    if !ok_key || header.len() < 4 || header[1..4] != *expected_tail {
        return Err(IoError::format(
            path,
            format!("expected header `eta|s_mm,x_mm,y_mm,z_mm[,dl_t_mm,T_N]`, got `{}`", header.join(",")),
        ));
    }
    let actuation = match header.len() {
        4 => false,
        6 if header[4..] == TRACK_HEADER[4..] => true,
        _ => {
            return Err(IoError::format(path, format!("unexpected columns `{}`", header[4..].join(","))));
        }
    };
    let samples = rows
        .into_iter()
        .map(|r| {
            let (stroke, tension) = if actuation { (Some(r[4]), Some(r[5])) } else { (None, None) };
            if r[..4].iter().any(|v| !v.is_finite()) {
                return Err(IoError::format(path, "non-finite coordinate"));
            }
            Ok(MarkerSample {
                eta: r[0],
                point: Point3::new(r[1], r[2], r[3]),
                stroke,
                tension,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(PointTable { key, samples })
}

pub fn read_joints(path: &Path) -> Result<Vec<JointRow>, IoError> {
    let (header, rows) = read_records(path)?;
    if header != JOINT_HEADER {
        return Err(IoError::format(
            path,
            format!("expected header `{}`, got `{}`", JOINT_HEADER.join(","), header.join(",")),
        ));
    }
    Ok(rows
        .into_iter()
        .map(|r| JointRow {
            stroke: r[0],
            tension: r[1],
            radius: r[2],
            height: r[3],
            phi: r[4],
            theta: r[5],
        })
        .collect())
}

/// Comparison summary as printed by `compare`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub max_de_mm: f64,
    pub rmse_mm: f64,
    pub n_samples: usize,
}

impl From<&TrajectoryComparison> for ComparisonReport {
    fn from(c: &TrajectoryComparison) -> Self {
        Self {
            max_de_mm: c.max_euclidean,
            rmse_mm: c.rmse,
            n_samples: c.len(),
        }
    }
}

pub fn distances_csv(keys: &[f64], key_label: &str, distances: &[f64]) -> String {
    let mut out = format!("index,{key_label},distance_mm\n");
    for (i, (k, d)) in keys.iter().zip(distances).enumerate() {
        let _ = writeln!(out, "{i},{},{}", num(*k), num(*d));
    }
    out
}

/// Metadata written as `spec.json` in a dataset bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub tube: TubeSpec,
    pub tendon: TendonSpec,
    pub noise: NoiseSpec,
    pub theta_deg: f64,
    pub markers_mm: Vec<f64>,
    pub n_samples: usize,
}

/// File name for a marker at arc length `s`.
pub fn marker_file_name(s: f64, truth: bool) -> String {
    if truth {
        format!("marker_{s}_truth.csv")
    } else {
        format!("marker_{s}.csv")
    }
}

/// Writes `spec.json`, `joints.csv`, `marker_<s>.csv`, `marker_<s>_truth.csv`,
/// `tip.csv` and `tip_truth.csv` into `dir`.
pub fn write_bundle(dataset: &SyntheticDataset, dir: &Path) -> Result<Vec<PathBuf>, IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> Result<(), IoError> {
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
        Ok(())
    };

    let meta = BundleMeta {
        tube: dataset.spec,
        tendon: dataset.tendon,
        noise: dataset.noise,
        theta_deg: dataset.theta.to_degrees(),
        markers_mm: dataset.markers.iter().map(|m| m.arc_length).collect(),
        n_samples: dataset.actuation.len(),
    };
    put("spec.json".into(), to_json_pretty(&meta))?;

    let rows: Vec<JointRow> = dataset
        .actuation
        .iter()
        .zip(&dataset.joints)
        .map(|(&(stroke, tension), j)| JointRow::new(stroke, tension, j.as_ref(), dataset.theta))
        .collect();
    put("joints.csv".into(), joints_csv(&rows))?;

    let channel = |ch: &MarkerChannel, put: &mut dyn FnMut(String, String) -> Result<(), IoError>, stem: Option<&str>| {
        let (noisy, truth) = match stem {
            Some(stem) => (format!("{stem}.csv"), format!("{stem}_truth.csv")),
            None => (marker_file_name(ch.arc_length, false), marker_file_name(ch.arc_length, true)),
        };
        put(noisy, track_csv(&ch.noisy))?;
        put(truth, track_csv(&ch.truth))
    };
    for ch in &dataset.markers {
        channel(ch, &mut put, None)?;
    }
    channel(&dataset.tip, &mut put, Some("tip"))?;
    Ok(written)
}

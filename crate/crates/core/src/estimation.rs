//! Joint-state estimation from tendon data or from a tracked tip, and the
//! distance metrics used to score estimated against measured positions.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::DerivedGeometry;
use crate::kinematics::{deflection_angle, HelixModel, JointState, KinematicsError, Point3, TipTrajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("sequences differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cannot compare empty sequences")]
    Empty,
    #[error("progression ranges do not overlap")]
    NoOverlap,
    #[error("progression values must be distinct and finite")]
    BadGrid,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// A marker at fixed arc length tracked over a series of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerTrack {
    pub arc_length: f64,
    pub samples: Vec<MarkerSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerSample {
    /// Progression factor, or a time-like index when the tube is fully exposed.
    pub eta: f64,
    pub point: Point3,
    pub stroke: Option<f64>,
    pub tension: Option<f64>,
}

impl MarkerTrack {
    pub fn points(&self) -> Vec<Point3> {
        self.samples.iter().map(|m| m.point).collect()
    }

    /// `(stroke, tension)` pairs, if every sample carries them.
    pub fn actuation(&self) -> Option<Vec<(f64, f64)>> {
        self.samples
            .iter()
            .map(|m| Some((m.stroke?, m.tension?)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    StrokeBased,
    PositionBased,
}

/// Per-sample joint estimates. Failed samples keep their slot so indices
/// stay aligned with the input.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub method: Method,
    pub joints: Vec<Result<JointState, KinematicsError>>,
    /// Deflection angle per sample: the model prediction for the stroke
    /// method, the measured tip angle for the position method.
    pub per_sample_phi: Vec<Option<f64>>,
}

impl EstimateResult {
    pub fn successes(&self) -> impl Iterator<Item = (usize, &JointState)> + '_ {
        self.joints
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.as_ref().ok().map(|j| (i, j)))
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &KinematicsError)> + '_ {
        self.joints
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.as_ref().err().map(|e| (i, e)))
    }
}

/// Joint states from `(stroke, tension)` samples and a fixed actuation angle.
pub fn stroke_based_estimate(actuation: &[(f64, f64)], model: &HelixModel, theta: f64) -> EstimateResult {
    let joints: Vec<_> = actuation
        .iter()
        .map(|&(stroke, tension)| model.joint_from_stroke(stroke, tension, theta))
        .collect();
    let per_sample_phi = joints
        .iter()
        .map(|j| j.as_ref().ok().map(JointState::deflection_angle))
        .collect();
    EstimateResult {
        method: Method::StrokeBased,
        joints,
        per_sample_phi,
    }
}

/// What a tracked tip says about the joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositionEstimate {
    pub height: f64,
    /// Angle between the tip vector and `+X_0`.
    pub phi_truth: f64,
    pub radius: f64,
    /// Deflection angle predicted from `(radius, height)`.
    pub phi_model: f64,
}

pub fn position_based_estimate(
    tip: &Point3,
    geom: &DerivedGeometry,
    turns: u32,
) -> Result<PositionEstimate, KinematicsError> {
    let height = tip.coords.norm();
    if !(height > 0.0) {
        return Err(KinematicsError::DegenerateTip);
    }
    if height > geom.na_length {
        return Err(KinematicsError::TipBeyondReach {
            distance: height,
            na_length: geom.na_length,
        });
    }
    let phi_truth = (tip.x / height).clamp(-1.0, 1.0).acos();
    let radius = ((geom.na_length - height) * (geom.na_length + height)).sqrt()
        / (std::f64::consts::TAU * f64::from(turns));
    let phi_model = deflection_angle(radius, height, geom.composite_na_offset, turns);
    Ok(PositionEstimate {
        height,
        phi_truth,
        radius,
        phi_model,
    })
}

/// Position method over a tip series. Joints use the model deflection angle;
/// `per_sample_phi` holds the measured one.
pub fn position_based_series(tips: &[Point3], model: &HelixModel, theta: f64) -> EstimateResult {
    let (joints, per_sample_phi) = tips
        .iter()
        .map(|tip| {
            match position_based_estimate(tip, model.geometry(), model.turns()).and_then(|est| {
                JointState::from_height(est.height, theta, model.geometry(), model.turns())
                    .map(|j| (j, est.phi_truth))
            }) {
                Ok((joint, phi)) => (Ok(joint), Some(phi)),
                Err(e) => (Err(e), None),
            }
        })
        .unzip();
    EstimateResult {
        method: Method::PositionBased,
        joints,
        per_sample_phi,
    }
}

/// Predicted position of a marker at arc length `s` for each estimated joint.
pub fn predict_marker(result: &EstimateResult, model: &HelixModel, s: f64) -> Vec<Option<Point3>> {
    result
        .joints
        .iter()
        .map(|j| j.as_ref().ok().and_then(|j| model.point(j, s).ok()))
        .collect()
}

fn distances(a: &[Point3], b: &[Point3]) -> Result<Vec<f64>, EstimationError> {
    if a.len() != b.len() {
        return Err(EstimationError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EstimationError::Empty);
    }
    Ok(a.iter().zip(b).map(|(p, q)| (p - q).norm()).collect())
}

pub fn max_euclidean_distance(a: &[Point3], b: &[Point3]) -> Result<f64, EstimationError> {
    Ok(distances(a, b)?.into_iter().fold(0.0, f64::max))
}

pub fn rmse(a: &[Point3], b: &[Point3]) -> Result<f64, EstimationError> {
    Ok(root_mean_square(&distances(a, b)?))
}

fn root_mean_square(d: &[f64]) -> f64 {
    (d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryComparison {
    pub max_euclidean: f64,
    pub rmse: f64,
    pub per_sample_distances: Vec<f64>,
}

impl TrajectoryComparison {
    pub fn from_distances(per_sample_distances: Vec<f64>) -> Result<Self, EstimationError> {
        if per_sample_distances.is_empty() {
            return Err(EstimationError::Empty);
        }
        Ok(Self {
            max_euclidean: per_sample_distances.iter().copied().fold(0.0, f64::max),
            rmse: root_mean_square(&per_sample_distances),
            per_sample_distances,
        })
    }

    pub fn len(&self) -> usize {
        self.per_sample_distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_sample_distances.is_empty()
    }
}

/// Index-aligned comparison.
pub fn compare(a: &[Point3], b: &[Point3]) -> Result<TrajectoryComparison, EstimationError> {
    TrajectoryComparison::from_distances(distances(a, b)?)
}

/// Distances between two trials as a function of progression.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub etas: Vec<f64>,
    pub comparison: TrajectoryComparison,
}

fn sorted_by_eta(t: &TipTrajectory) -> Result<Vec<(f64, Point3)>, EstimationError> {
    let mut v: Vec<_> = t.samples.iter().map(|s| (s.eta, s.point)).collect();
    if v.iter().any(|(e, _)| !e.is_finite()) {
        return Err(EstimationError::BadGrid);
    }
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    if v.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(EstimationError::BadGrid);
    }
    Ok(v)
}

/// Piecewise-linear interpolation in eta; `grid` must be sorted.
fn interpolate(grid: &[(f64, Point3)], eta: f64) -> Point3 {
    let hi = grid.partition_point(|(e, _)| *e < eta);
    if hi == 0 {
        return grid[0].1;
    }
    if hi == grid.len() {
        return grid[hi - 1].1;
    }
    let (e1, p1) = grid[hi];
    if e1 == eta {
        return p1;
    }
    let (e0, p0) = grid[hi - 1];
    let t = (eta - e0) / (e1 - e0);
    p0 + (p1 - p0) * t
}

/// Compares two trials matched on progression. The second trial is
/// linearly interpolated onto the first trial's values that fall inside its
/// range. Sample order (extension or retraction) does not matter.
pub fn repeatability_compare(
    trial1: &TipTrajectory,
    trial2: &TipTrajectory,
) -> Result<DistanceProfile, EstimationError> {
    let first = sorted_by_eta(trial1)?;
    let second = sorted_by_eta(trial2)?;
    if first.is_empty() || second.is_empty() {
        return Err(EstimationError::Empty);
    }
    let (lo, hi) = (second[0].0, second[second.len() - 1].0);
    let (etas, dists): (Vec<f64>, Vec<f64>) = first
        .iter()
        .filter(|(e, _)| (lo..=hi).contains(e))
        .map(|(e, p)| (*e, (p - interpolate(&second, *e)).norm()))
        .unzip();
    if etas.is_empty() {
        return Err(EstimationError::NoOverlap);
    }
    Ok(DistanceProfile {
        etas,
        comparison: TrajectoryComparison::from_distances(dists)?,
    })
}

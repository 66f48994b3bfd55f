//! Synthetic experiments: stroke sweeps with tracked markers, follow-the-leader
//! runs, and clearance against a cylindrical obstacle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::{EstimationError, MarkerSample, MarkerTrack, TrajectoryComparison};
use crate::geometry::{TendonSpec, TubeSpec};
use crate::kinematics::{
    BackboneCurve, CurveSample, HelixModel, JointState, KinematicsError, Point3, TipSample,
    TipTrajectory, Vector3,
};

/// Marker arc lengths used on the prototype, in mm.
pub const PROTOTYPE_MARKERS: [f64; 4] = [18.24, 33.20, 48.05, 63.61];

pub const DEFAULT_ETA_STEPS: usize = 101;

const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("noise sigma `{0}` must be finite and non-negative")]
    Sigma(&'static str),
    #[error("marker arc length {s} mm outside [0, {max}] mm")]
    MarkerOutOfRange { s: f64, max: f64 },
    #[error("progression grid must be strictly monotone within [0, 1]")]
    BadEtaGrid,
    #[error("tip and backbone grids do not match")]
    GridMismatch,
    #[error("phantom axis direction has norm {0}, expected 1")]
    DegenerateAxis(f64),
    #[error("phantom radius {0} mm must be non-negative")]
    PhantomRadius(f64),
    #[error("curve has no samples")]
    EmptyCurve,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

/// Zero-mean Gaussian measurement noise, i.i.d. per axis for positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub position_sigma: f64,
    pub stroke_sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            position_sigma: 0.0,
            stroke_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        for (name, v) in [("position_sigma", self.position_sigma), ("stroke_sigma", self.stroke_sigma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimulationError::Sigma(name));
            }
        }
        Ok(())
    }

    /// Generator for one sample. Each sample index gets its own stream, so
    /// samples can be generated in any order or in parallel.
    fn rng_for(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Infinite cylinder standing in for the spinal cord.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    #[serde(rename = "axis_point_mm", with = "point_array")]
    pub axis_point: Point3,
    #[serde(with = "vector_array")]
    pub axis_direction: Vector3,
    #[serde(rename = "radius_mm")]
    pub radius: f64,
}

mod point_array {
    use super::Point3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Point3, s: S) -> Result<S::Ok, S::Error> {
        [p.x, p.y, p.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point3, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Point3::new(x, y, z))
    }
}

mod vector_array {
    use super::Vector3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector3, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Vector3::new(x, y, z))
    }
}

impl PhantomSpec {
    /// Phantom centred on the imaginary cylinder of `joint`.
    pub fn on_cylinder_axis(joint: &JointState, radius: f64) -> Self {
        let (axis_point, axis_direction) = joint.cylinder_axis();
        Self {
            axis_point,
            axis_direction,
            radius,
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let norm = self.axis_direction.norm();
        if !((norm - 1.0).abs() <= 1e-9) {
            return Err(SimulationError::DegenerateAxis(norm));
        }
        if !(self.radius >= 0.0) {
            return Err(SimulationError::PhantomRadius(self.radius));
        }
        Ok(())
    }

    pub fn distance_to_axis(&self, p: &Point3) -> f64 {
        let rel = p - self.axis_point;
        (rel - self.axis_direction * rel.dot(&self.axis_direction)).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Clearance {
    pub min_clearance: f64,
    pub collides: bool,
    /// Sample index where the minimum occurs.
    pub closest_index: usize,
}

/// Smallest gap between the tube surface and the phantom surface over the
/// curve. Negative means interpenetration.
pub fn phantom_clearance<'a>(
    points: impl IntoIterator<Item = &'a Point3>,
    phantom: &PhantomSpec,
    tube_outer_radius: f64,
) -> Result<Clearance, SimulationError> {
    phantom.validate()?;
    let (closest_index, min_clearance) = points
        .into_iter()
        .map(|p| phantom.distance_to_axis(p) - phantom.radius - tube_outer_radius)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(SimulationError::EmptyCurve)?;
    Ok(Clearance {
        min_clearance,
        collides: min_clearance < 0.0,
        closest_index,
    })
}

/// One tracked marker with its noiseless and noisy channels.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerChannel {
    pub arc_length: f64,
    pub truth: MarkerTrack,
    pub noisy: MarkerTrack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub spec: TubeSpec,
    pub tendon: TendonSpec,
    pub noise: NoiseSpec,
    pub theta: f64,
    /// Commanded `(stroke, tension)` per sample.
    pub actuation: Vec<(f64, f64)>,
    /// What the stroke sensor reports.
    pub recorded_actuation: Vec<(f64, f64)>,
    pub joints: Vec<Result<JointState, KinematicsError>>,
    /// Sample indices with a valid joint; tracks have one entry per index.
    pub valid: Vec<usize>,
    pub markers: Vec<MarkerChannel>,
    pub tip: MarkerChannel,
}

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

fn noisy_point(rng: &mut ChaCha8Rng, p: &Point3, sigma: f64) -> Point3 {
    let dx = gaussian(rng, sigma);
    let dy = gaussian(rng, sigma);
    let dz = gaussian(rng, sigma);
    p + Vector3::new(dx, dy, dz)
}

/// Runs the forward model over a stroke profile, tracking markers at fixed
/// arc lengths and the tip. Samples the model cannot realize are kept in
/// `joints` as errors and skipped in the tracks.
pub fn synthetic_sweep(
    model: &HelixModel,
    profile: &[(f64, f64)],
    markers: &[f64],
    noise: &NoiseSpec,
    theta: f64,
) -> Result<SyntheticDataset, SimulationError> {
    noise.validate()?;
    let l_na = model.na_length();
    if let Some(&s) = markers.iter().find(|&&s| !(0.0..=l_na).contains(&s)) {
        return Err(SimulationError::MarkerOutOfRange { s, max: l_na });
    }

    let joints: Vec<_> = profile
        .iter()
        .map(|&(stroke, tension)| model.joint_from_stroke(stroke, tension, theta))
        .collect();

    let track = |s: f64| MarkerTrack {
        arc_length: s,
        samples: Vec::new(),
    };
    let mut channels: Vec<MarkerChannel> = markers
        .iter()
        .chain(std::iter::once(&l_na))
        .map(|&s| MarkerChannel {
            arc_length: s,
            truth: track(s),
            noisy: track(s),
        })
        .collect();

    let mut recorded_actuation = Vec::with_capacity(profile.len());
    let mut valid = Vec::new();
    for (i, (&(stroke, tension), joint)) in profile.iter().zip(&joints).enumerate() {
        let mut rng = noise.rng_for(i);
        let recorded = (stroke + gaussian(&mut rng, noise.stroke_sigma), tension);
        recorded_actuation.push(recorded);
        let Ok(joint) = joint else { continue };
        valid.push(i);
        for channel in &mut channels {
            let truth = model.point(joint, channel.arc_length)?;
            let measured = noisy_point(&mut rng, &truth, noise.position_sigma);
            let sample = |point| MarkerSample {
                eta: 1.0,
                point,
                stroke: Some(recorded.0),
                tension: Some(recorded.1),
            };
            channel.truth.samples.push(MarkerSample {
                stroke: Some(stroke),
                ..sample(truth)
            });
            channel.noisy.samples.push(sample(measured));
        }
    }
    let tip = channels.pop().expect("tip channel is always present");

    Ok(SyntheticDataset {
        spec: *model.spec(),
        tendon: *model.tendon(),
        noise: *noise,
        theta,
        actuation: profile.to_vec(),
        recorded_actuation,
        joints,
        valid,
        markers: channels,
        tip,
    })
}

/// Linear stroke ramp `0..=max_stroke` at constant tension.
pub fn stroke_ramp(max_stroke: f64, steps: usize, tension: f64) -> Vec<(f64, f64)> {
    match steps {
        0 => Vec::new(),
        1 => vec![(max_stroke, tension)],
        _ => (0..steps)
            .map(|i| (max_stroke * (i as f64 / (steps - 1) as f64), tension))
            .collect(),
    }
}

/// `count` evenly spaced progression values over `[0, 1]`.
pub fn eta_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

fn check_grid(etas: &[f64]) -> Result<(), SimulationError> {
    if etas.is_empty() || etas.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(SimulationError::BadEtaGrid);
    }
    let rising = etas.windows(2).all(|w| w[1] > w[0]);
    let falling = etas.windows(2).all(|w| w[1] < w[0]);
    if rising || falling {
        Ok(())
    } else {
        Err(SimulationError::BadEtaGrid)
    }
}

/// Tip trace and exposed backbones of a follow-the-leader progression.
#[derive(Debug, Clone, PartialEq)]
pub struct FtlRun {
    pub tip: TipTrajectory,
    /// Exposed backbone at each grid value, in grid order. Each one is
    /// sampled at `eta' * l_na` for every grid value `eta' <= eta`.
    pub backbones: Vec<BackboneCurve>,
}

/// Holds the joint fixed while the exposed length follows `etas`, which may
/// run outwards (increasing) or in retraction (decreasing).
pub fn ftl_run(joint: &JointState, model: &HelixModel, etas: &[f64]) -> Result<FtlRun, SimulationError> {
    check_grid(etas)?;
    let l_na = model.na_length();
    let mut ascending = etas.to_vec();
    ascending.sort_by(f64::total_cmp);
    let along: Vec<CurveSample> = ascending
        .iter()
        .map(|&eta| {
            model
                .ftl_tip(eta, joint)
                .map(|point| CurveSample { s: eta * l_na, point })
        })
        .collect::<Result<_, _>>()?;

    let tip = TipTrajectory {
        samples: etas
            .iter()
            .map(|&eta| model.ftl_tip(eta, joint).map(|point| TipSample { eta, point }))
            .collect::<Result<_, _>>()?,
    };
    let backbones = etas
        .iter()
        .map(|&eta| {
            let exposed = ascending.partition_point(|&e| e <= eta);
            BackboneCurve::new(along[..exposed].to_vec())
        })
        .collect::<Result<_, _>>()?;
    Ok(FtlRun { tip, backbones })
}

/// Tip trace when the roll angle creeps by `drift * eta` during progression.
pub fn drifted_tip_trace(
    joint: &JointState,
    model: &HelixModel,
    etas: &[f64],
    drift: f64,
) -> Result<TipTrajectory, SimulationError> {
    check_grid(etas)?;
    let samples = etas
        .iter()
        .map(|&eta| {
            let rolled = joint.with_actuation_angle(joint.actuation_angle() + drift * eta);
            model.ftl_tip(eta, &rolled).map(|point| TipSample { eta, point })
        })
        .collect::<Result<_, _>>()?;
    Ok(TipTrajectory { samples })
}

/// Distance between where the tip went at each progression value and where
/// the final body lies at the matching arc length. Zero for ideal
/// follow-the-leader motion.
pub fn ftl_fidelity(
    tip: &TipTrajectory,
    final_backbone: &BackboneCurve,
    na_length: f64,
) -> Result<TrajectoryComparison, SimulationError> {
    let mut samples = tip.samples.clone();
    samples.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let body = final_backbone.samples();
    if samples.len() != body.len() {
        return Err(SimulationError::GridMismatch);
    }
    let distances = samples
        .iter()
        .zip(body)
        .map(|(t, b)| {
            if (t.eta * na_length - b.s).abs() > GRID_TOLERANCE * na_length {
                Err(SimulationError::GridMismatch)
            } else {
                Ok((t.point - b.point).norm())
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrajectoryComparison::from_distances(distances)?)
}

//! Actuation space -> joint space -> task space.
//!
//! The deformed neutral axis is a helix wound on an imaginary cylinder of
//! radius `R` and height `H`. Tendon stroke fixes `R` (and through the fixed
//! neutral-axis length, `H`); the deflection angle `phi` tilts the cylinder
//! away from the outer tube, and the actuation angle `theta` rolls the whole
//! picture about the outer-tube axis `X_0`.
//!
//! Frames:
//! - `O_c`: cylinder frame, `X_c` along the cylinder axis.
//! - `O_1`: at the outer-tube tip, `Y_1` towards the notches.
//! - `O_0`: fixed, same origin as `O_1`, `X_0` out along the outer tube.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use thiserror::Error;

use crate::geometry::{DerivedGeometry, GeometryError, TendonSpec, TubeSpec};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Default number of arc-length samples for a backbone.
pub const DEFAULT_CURVE_SAMPLES: usize = 129;

/// Relative tolerance on `sqrt(H^2 + (2 pi n R)^2) = l_na`.
pub const CLOSURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("tendon stroke {0} mm must be non-negative")]
    NegativeStroke(f64),
    #[error("tendon tension {0} N must be non-negative")]
    NegativeTension(f64),
    #[error("tendon length {0} mm is not positive")]
    NonPositiveTendonLength(f64),
    #[error("over-actuated: tendon length {tendon_length} mm gives H^2 = {height_squared} mm^2")]
    OverActuated {
        tendon_length: f64,
        height_squared: f64,
    },
    #[error("non-physical: tendon length {tendon_length} mm gives cylinder radius {radius} mm")]
    NonPhysical { tendon_length: f64, radius: f64 },
    #[error("arc length {s} mm outside [0, {max}] mm")]
    ArcLengthOutOfRange { s: f64, max: f64 },
    #[error("progression factor {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("cylinder height {0} mm must be positive")]
    NonPositiveHeight(f64),
    #[error("cylinder radius {0} mm must be non-negative")]
    NegativeRadius(f64),
    #[error("(R, H) misses the neutral-axis length by a relative {0:e}")]
    Closure(f64),
    #[error("tip distance {distance} mm exceeds neutral-axis length {na_length} mm")]
    TipBeyondReach { distance: f64, na_length: f64 },
    #[error("tip coincides with the base")]
    DegenerateTip,
    #[error("arc-length samples must be strictly increasing")]
    UnsortedSamples,
}

fn turns_f(turns: u32) -> f64 {
    f64::from(turns)
}

/// Tendon elongation under tension, in mm.
pub fn tendon_elongation(tension: f64, tendon: &TendonSpec) -> f64 {
    tension / tendon.axial_stiffness()
}

/// Tendon length over the patterned section for a commanded stroke and a
/// measured tension.
pub fn tendon_length_from_stroke(
    stroke: f64,
    tension: f64,
    tendon: &TendonSpec,
    slack_length: f64,
) -> Result<f64, KinematicsError> {
    if stroke < 0.0 || stroke.is_nan() {
        return Err(KinematicsError::NegativeStroke(stroke));
    }
    if tension < 0.0 || tension.is_nan() {
        return Err(KinematicsError::NegativeTension(tension));
    }
    let length = slack_length - stroke + tendon_elongation(tension, tendon);
    if length > 0.0 {
        Ok(length)
    } else {
        Err(KinematicsError::NonPositiveTendonLength(length))
    }
}

/// Inverse of [`tendon_length_from_stroke`].
pub fn stroke_from_tendon_length(
    tendon_length: f64,
    tension: f64,
    tendon: &TendonSpec,
    slack_length: f64,
) -> f64 {
    slack_length + tendon_elongation(tension, tendon) - tendon_length
}

/// Cylinder radius and height for a given tendon length.
///
/// `R` comes from eliminating `H` between the neutral-axis and tendon
/// helices; `H` is then taken from the tendon helix.
pub fn cylinder_from_tendon_length(
    tendon_length: f64,
    geom: &DerivedGeometry,
    turns: u32,
) -> Result<(f64, f64), KinematicsError> {
    if !(tendon_length > 0.0) {
        return Err(KinematicsError::NonPositiveTendonLength(tendon_length));
    }
    let n = turns_f(turns);
    let d = geom.tendon_na_distance;
    let l_na = geom.na_length;
    let radius = (l_na * l_na - tendon_length * tendon_length)
        / (2.0 * TAU * TAU * n * n * d)
        + d / 2.0;
    if !(radius > 0.0) {
        return Err(KinematicsError::NonPhysical {
            tendon_length,
            radius,
        });
    }
    let wrap = TAU * n * (radius - d);
    let height_squared = tendon_length * tendon_length - wrap * wrap;
    if !(height_squared > 0.0) {
        return Err(KinematicsError::OverActuated {
            tendon_length,
            height_squared,
        });
    }
    Ok((radius, height_squared.sqrt()))
}

/// Tendon helix length for a cylinder.
pub fn tendon_length_from_cylinder(radius: f64, height: f64, geom: &DerivedGeometry, turns: u32) -> f64 {
    height.hypot(TAU * turns_f(turns) * (radius - geom.tendon_na_distance))
}

/// Angle between the outer-tube axis and the cylinder axis.
pub fn deflection_angle(radius: f64, height: f64, na_offset: f64, turns: u32) -> f64 {
    debug_assert!(height > 0.0);
    (TAU * turns_f(turns) * (radius - na_offset)).atan2(height)
}

/// Joint-space description of the bent tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    radius: f64,
    height: f64,
    deflection: f64,
    actuation: f64,
}

impl JointState {
    /// Builds a joint from cylinder dimensions, checking that they are
    /// compatible with the neutral-axis length.
    pub fn new(
        radius: f64,
        height: f64,
        actuation_angle: f64,
        geom: &DerivedGeometry,
        turns: u32,
    ) -> Result<Self, KinematicsError> {
        if !(height > 0.0) {
            return Err(KinematicsError::NonPositiveHeight(height));
        }
        if !(radius >= 0.0) {
            return Err(KinematicsError::NegativeRadius(radius));
        }
        let residual = closure_residual(radius, height, geom.na_length, turns);
        if residual > CLOSURE_TOLERANCE {
            return Err(KinematicsError::Closure(residual));
        }
        Ok(Self {
            radius,
            height,
            deflection: deflection_angle(radius, height, geom.composite_na_offset, turns),
            actuation: actuation_angle,
        })
    }

    /// Joint whose radius follows from the height through the neutral-axis
    /// length.
    pub fn from_height(
        height: f64,
        actuation_angle: f64,
        geom: &DerivedGeometry,
        turns: u32,
    ) -> Result<Self, KinematicsError> {
        let l_na = geom.na_length;
        if height > l_na {
            return Err(KinematicsError::TipBeyondReach {
                distance: height,
                na_length: l_na,
            });
        }
        let radius = ((l_na - height) * (l_na + height)).sqrt() / (TAU * turns_f(turns));
        Self::new(radius, height, actuation_angle, geom, turns)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn deflection_angle(&self) -> f64 {
        self.deflection
    }

    pub fn actuation_angle(&self) -> f64 {
        self.actuation
    }

    pub fn with_actuation_angle(self, actuation: f64) -> Self {
        Self { actuation, ..self }
    }

    /// Cylinder axis in `O_0`: a point on it and its unit direction.
    pub fn cylinder_axis(&self) -> (Point3, Vector3) {
        let roll = rot_x(self.actuation);
        let point = roll * Vector3::new(0.0, self.radius, 0.0);
        let dir = roll * Vector3::new(self.deflection.cos(), 0.0, self.deflection.sin());
        (Point3::from(point), dir)
    }
}

/// `|sqrt(H^2 + (2 pi n R)^2) - l_na| / l_na`.
pub fn closure_residual(radius: f64, height: f64, na_length: f64, turns: u32) -> f64 {
    (height.hypot(TAU * turns_f(turns) * radius) - na_length).abs() / na_length
}

fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0, //
        0.0, c, -s, //
        0.0, s, c,
    )
}

/// Rotation by `-phi` about `Y`, written out as used for the cylinder tilt.
fn tilt(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(
        c, 0.0, -s, //
        0.0, 1.0, 0.0, //
        s, 0.0, c,
    )
}

/// Neutral-axis point at arc length `s`, in the cylinder frame.
pub fn helix_point(
    s: f64,
    radius: f64,
    height: f64,
    na_length: f64,
    turns: u32,
) -> Result<Point3, KinematicsError> {
    if !(0.0..=na_length).contains(&s) {
        return Err(KinematicsError::ArcLengthOutOfRange { s, max: na_length });
    }
    let angle = TAU * turns_f(turns) * s / na_length;
    Ok(Point3::new(
        s * height / na_length,
        -radius * angle.cos(),
        radius * angle.sin(),
    ))
}

/// Cylinder frame to `O_1`: shift by `R` along `Y_c`, then tilt by `phi`.
pub fn to_frame1(p_c: &Point3, radius: f64, phi: f64) -> Point3 {
    let shifted = p_c.coords + Vector3::new(0.0, radius, 0.0);
    Point3::from(tilt(phi) * shifted)
}

/// `O_1` to `O_0`: roll by `theta` about `X_1`.
pub fn to_frame0(p_1: &Point3, theta: f64) -> Point3 {
    Point3::from(rot_x(theta) * p_1.coords)
}

/// Neutral-axis point at arc length `s` in `O_0`.
pub fn point_at(
    joint: &JointState,
    geom: &DerivedGeometry,
    turns: u32,
    s: f64,
) -> Result<Point3, KinematicsError> {
    let p_c = helix_point(s, joint.radius, joint.height, geom.na_length, turns)?;
    let p_1 = to_frame1(&p_c, joint.radius, joint.deflection);
    Ok(to_frame0(&p_1, joint.actuation))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub point: Point3,
}

/// Neutral-axis samples in `O_0`, ordered by strictly increasing arc length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BackboneCurve {
    samples: Vec<CurveSample>,
}

impl BackboneCurve {
    pub fn new(samples: Vec<CurveSample>) -> Result<Self, KinematicsError> {
        if samples.windows(2).any(|w| !(w[1].s > w[0].s)) {
            return Err(KinematicsError::UnsortedSamples);
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn points(&self) -> impl Iterator<Item = &Point3> + '_ {
        self.samples.iter().map(|c| &c.point)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&CurveSample> {
        self.samples.last()
    }

    /// Sum of chord lengths between consecutive samples.
    pub fn chord_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].point - w[0].point).norm())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipSample {
    pub eta: f64,
    pub point: Point3,
}

/// Tip positions indexed by the progression factor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TipTrajectory {
    pub samples: Vec<TipSample>,
}

impl TipTrajectory {
    pub fn points(&self) -> Vec<Point3> {
        self.samples.iter().map(|t| t.point).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.samples.iter().map(|t| t.eta).collect()
    }
}

/// `count` evenly spaced arc lengths over `[0, na_length]`, both ends included.
pub fn uniform_arc_lengths(na_length: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| na_length * (i as f64 / (count - 1) as f64))
            .collect(),
    }
}

pub fn forward_kinematics(
    joint: &JointState,
    geom: &DerivedGeometry,
    turns: u32,
    arc_lengths: &[f64],
) -> Result<BackboneCurve, KinematicsError> {
    let samples = arc_lengths
        .iter()
        .map(|&s| point_at(joint, geom, turns, s).map(|point| CurveSample { s, point }))
        .collect::<Result<Vec<_>, _>>()?;
    BackboneCurve::new(samples)
}

/// Actuator set-points during follow-the-leader progression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuationState {
    pub tendon_stroke: f64,
    pub tendon_tension: f64,
    pub progression: f64,
    pub roller_input_angle: f64,
    pub exposed_length: f64,
    pub progressive_tendon_length: f64,
}

fn check_eta(eta: f64) -> Result<(), KinematicsError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(KinematicsError::EtaOutOfRange(eta))
    }
}

/// Set-points at progression `eta` for a joint held fixed. The stroke is the
/// one that realizes the joint at zero tension.
pub fn ftl_actuation(
    eta: f64,
    joint: &JointState,
    geom: &DerivedGeometry,
    turns: u32,
) -> Result<ActuationState, KinematicsError> {
    check_eta(eta)?;
    let tendon_length = tendon_length_from_cylinder(joint.radius, joint.height, geom, turns);
    Ok(ActuationState {
        tendon_stroke: geom.slack_tendon_length - tendon_length,
        tendon_tension: 0.0,
        progression: eta,
        roller_input_angle: TAU * turns_f(turns) * eta,
        exposed_length: eta * geom.na_length,
        progressive_tendon_length: eta * tendon_length,
    })
}

/// Tip of the exposed portion at progression `eta`.
pub fn ftl_tip(
    eta: f64,
    joint: &JointState,
    geom: &DerivedGeometry,
    turns: u32,
) -> Result<Point3, KinematicsError> {
    check_eta(eta)?;
    point_at(joint, geom, turns, eta * geom.na_length)
}

/// A tube together with its tendon and derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixModel {
    spec: TubeSpec,
    tendon: TendonSpec,
    geometry: DerivedGeometry,
}

impl HelixModel {
    pub fn new(spec: TubeSpec, tendon: TendonSpec) -> Result<Self, GeometryError> {
        tendon.validate()?;
        let geometry = DerivedGeometry::from_spec(&spec)?;
        Ok(Self {
            spec,
            tendon,
            geometry,
        })
    }

    pub fn prototype() -> Self {
        Self::new(TubeSpec::prototype(), TendonSpec::prototype())
            .expect("prototype dimensions are valid")
    }

    pub fn spec(&self) -> &TubeSpec {
        &self.spec
    }

    pub fn tendon(&self) -> &TendonSpec {
        &self.tendon
    }

    pub fn geometry(&self) -> &DerivedGeometry {
        &self.geometry
    }

    pub fn turns(&self) -> u32 {
        self.spec.turn_count
    }

    pub fn na_length(&self) -> f64 {
        self.geometry.na_length
    }

    pub fn tendon_length(&self, stroke: f64, tension: f64) -> Result<f64, KinematicsError> {
        tendon_length_from_stroke(stroke, tension, &self.tendon, self.geometry.slack_tendon_length)
    }

    pub fn joint_from_stroke(
        &self,
        stroke: f64,
        tension: f64,
        actuation_angle: f64,
    ) -> Result<JointState, KinematicsError> {
        let l_t = self.tendon_length(stroke, tension)?;
        let (radius, height) = cylinder_from_tendon_length(l_t, &self.geometry, self.turns())?;
        JointState::new(radius, height, actuation_angle, &self.geometry, self.turns())
    }

    /// Stroke that realizes `joint` at the given tension.
    pub fn stroke_for_joint(&self, joint: &JointState, tension: f64) -> f64 {
        let l_t = tendon_length_from_cylinder(joint.radius, joint.height, &self.geometry, self.turns());
        stroke_from_tendon_length(l_t, tension, &self.tendon, self.geometry.slack_tendon_length)
    }

    /// Largest stroke before the cylinder height collapses to zero.
    pub fn max_stroke(&self, tension: f64) -> f64 {
        let g = &self.geometry;
        let shortest = g.na_length - TAU * f64::from(self.turns()) * g.tendon_na_distance;
        stroke_from_tendon_length(shortest, tension, &self.tendon, g.slack_tendon_length)
    }

    pub fn point(&self, joint: &JointState, s: f64) -> Result<Point3, KinematicsError> {
        point_at(joint, &self.geometry, self.turns(), s)
    }

    pub fn tip(&self, joint: &JointState) -> Point3 {
        self.point(joint, self.geometry.na_length)
            .expect("na_length is within range")
    }

    pub fn backbone(&self, joint: &JointState, arc_lengths: &[f64]) -> Result<BackboneCurve, KinematicsError> {
        forward_kinematics(joint, &self.geometry, self.turns(), arc_lengths)
    }

    pub fn uniform_backbone(&self, joint: &JointState, count: usize) -> BackboneCurve {
        self.backbone(joint, &uniform_arc_lengths(self.geometry.na_length, count))
            .expect("uniform samples are sorted and in range")
    }

    pub fn ftl_actuation(&self, eta: f64, joint: &JointState) -> Result<ActuationState, KinematicsError> {
        ftl_actuation(eta, joint, &self.geometry, self.turns())
    }

    pub fn ftl_tip(&self, eta: f64, joint: &JointState) -> Result<Point3, KinematicsError> {
        ftl_tip(eta, joint, &self.geometry, self.turns())
    }
}

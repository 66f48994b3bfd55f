//! Configuration-independent constants of a helically notched tube.
//!
//! Everything here is a pure function of the machined dimensions: where the
//! neutral axis sits inside the wall, how long it is once it winds into a
//! helix, how far the tendon rides from it, and the tendon length that leaves
//! the tube straight when nothing pulls on it.
//!
//! Lengths are millimetres and angles radians throughout. The only exception
//! is the serialized [`TubeSpec`], which carries the remaining half angle in
//! degrees.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("inner radius {inner} mm must be non-negative and below outer radius {outer} mm")]
    Radii { inner: f64, outer: f64 },
    #[error("remaining half angle {0} rad must lie in (0, pi]")]
    HalfAngle(f64),
    #[error("field `{field}` must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("turn_count must be at least 1")]
    TurnCount,
    #[error("tendon radius {tendon} mm must be below inner radius {inner} mm")]
    TendonTooThick { tendon: f64, inner: f64 },
    #[error("notch plus bridge width is zero")]
    ZeroPitch,
    #[error("tendon-to-neutral-axis distance {0} mm is not positive")]
    TendonOffset(f64),
}

/// As-machined dimensions of the notched inner tube.
///
/// `remaining_half_angle` is the half angle of wall material left standing
/// at a notch; it is stored in radians but read from and written to JSON in
/// degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeSpec {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub notch_axial_width: f64,
    pub notch_circumferential_extent: f64,
    pub bridge_length: f64,
    pub circumferential_offset: f64,
    pub patterned_length: f64,
    #[serde(with = "degrees")]
    pub remaining_half_angle: f64,
    #[serde(default = "one")]
    pub turn_count: u32,
    pub tendon_radius: f64,
}

fn one() -> u32 {
    1
}

mod degrees {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rad: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(rad.to_degrees())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d).map(f64::to_radians)
    }
}

impl TubeSpec {
    /// The nitinol prototype: 64 mm patterned, one helical turn, +/-63 deg of
    /// material left at each notch.
    pub fn prototype() -> Self {
        Self {
            inner_radius: 0.851,
            outer_radius: 0.953,
            notch_axial_width: 0.5,
            notch_circumferential_extent: 3.892,
            bridge_length: 0.3,
            circumferential_offset: 0.075,
            patterned_length: 64.0,
            remaining_half_angle: 63f64.to_radians(),
            turn_count: 1,
            tendon_radius: 0.115,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let positive = [
            ("inner_radius", self.inner_radius),
            ("outer_radius", self.outer_radius),
            ("notch_axial_width", self.notch_axial_width),
            ("notch_circumferential_extent", self.notch_circumferential_extent),
            ("bridge_length", self.bridge_length),
            ("circumferential_offset", self.circumferential_offset),
            ("patterned_length", self.patterned_length),
            ("tendon_radius", self.tendon_radius),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GeometryError::NonPositive { field, value });
            }
        }
        if self.inner_radius >= self.outer_radius {
            return Err(GeometryError::Radii {
                inner: self.inner_radius,
                outer: self.outer_radius,
            });
        }
        check_half_angle(self.remaining_half_angle)?;
        if self.turn_count == 0 {
            return Err(GeometryError::TurnCount);
        }
        if self.tendon_radius >= self.inner_radius {
            return Err(GeometryError::TendonTooThick {
                tendon: self.tendon_radius,
                inner: self.inner_radius,
            });
        }
        Ok(())
    }

    /// Half angle of remaining material implied by the notch chord `h`.
    pub fn half_angle_from_extent(&self) -> f64 {
        (TAU - self.notch_circumferential_extent / self.outer_radius) / 2.0
    }
}

/// Actuation tendon properties, kept in the units they are usually quoted
/// in: length in mm, cross-section in m^2, modulus in GPa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TendonSpec {
    pub total_length: f64,
    pub cross_section_area: f64,
    pub elastic_modulus: f64,
}

impl TendonSpec {
    /// 475 mm nitinol wire. The area is the quoted 1.135e-6 m^2 even though
    /// it does not match a 0.115 mm radius wire; override it if needed.
    pub fn prototype() -> Self {
        Self {
            total_length: 475.0,
            cross_section_area: 1.135e-6,
            elastic_modulus: 53.97,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (field, value) in [
            ("total_length", self.total_length),
            ("cross_section_area", self.cross_section_area),
            ("elastic_modulus", self.elastic_modulus),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GeometryError::NonPositive { field, value });
            }
        }
        Ok(())
    }

    /// Axial stiffness `A E / L` in N/mm.
    pub fn axial_stiffness(&self) -> f64 {
        // m^2 * GPa = 1e9 N; divided by mm gives N/mm.
        self.cross_section_area * self.elastic_modulus * 1e9 / self.total_length
    }
}

impl Default for TendonSpec {
    fn default() -> Self {
        Self::prototype()
    }
}

/// Derived constants of a tube, all in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    pub notch_na_offset: f64,
    pub composite_na_offset: f64,
    pub na_length: f64,
    pub tendon_na_distance: f64,
    pub slack_tendon_length: f64,
}

impl DerivedGeometry {
    pub fn from_spec(spec: &TubeSpec) -> Result<Self, GeometryError> {
        spec.validate()?;
        let notch_na_offset = notch_neutral_axis_offset(spec)?;
        let composite_na_offset = composite_neutral_axis_offset(
            notch_na_offset,
            spec.notch_axial_width,
            spec.bridge_length,
        )?;
        let na_length =
            neutral_axis_length(spec.patterned_length, composite_na_offset, spec.turn_count);
        let tendon_na_distance = tendon_neutral_axis_distance(
            composite_na_offset,
            spec.inner_radius,
            spec.tendon_radius,
        )?;
        Ok(Self {
            notch_na_offset,
            composite_na_offset,
            na_length,
            tendon_na_distance,
            slack_tendon_length: slack_tendon_length(spec),
        })
    }
}

/// Half angles this close to pi are treated as the full annulus.
const FULL_ANNULUS_SLACK: f64 = 1e-12;

fn check_half_angle(half_angle: f64) -> Result<(), GeometryError> {
    if half_angle > 0.0 && half_angle <= PI + FULL_ANNULUS_SLACK {
        Ok(())
    } else {
        Err(GeometryError::HalfAngle(half_angle))
    }
}

/// Centroid distance of an annular sector `[-half_angle, half_angle]` x
/// `[inner, outer]` from the tube axis.
///
/// A half angle of exactly pi is the full annulus and returns 0.
pub fn sector_centroid_offset(inner: f64, outer: f64, half_angle: f64) -> Result<f64, GeometryError> {
    if !(inner >= 0.0 && inner < outer) {
        return Err(GeometryError::Radii { inner, outer });
    }
    check_half_angle(half_angle)?;
    if (PI - half_angle).abs() <= FULL_ANNULUS_SLACK {
        return Ok(0.0);
    }
    let first_moment = 2.0 * half_angle.sin() * (outer.powi(3) - inner.powi(3)) / 3.0;
    let area = 2.0 * half_angle * (outer.powi(2) - inner.powi(2)) / 2.0;
    Ok(first_moment / area)
}

/// Neutral axis offset of a notched cross-section.
pub fn notch_neutral_axis_offset(spec: &TubeSpec) -> Result<f64, GeometryError> {
    sector_centroid_offset(spec.inner_radius, spec.outer_radius, spec.remaining_half_angle)
}

/// Length-weighted average of the notch offset and the bridge offset (zero,
/// the bridge is a full annulus).
pub fn composite_neutral_axis_offset(
    notch_offset: f64,
    notch_width: f64,
    bridge_length: f64,
) -> Result<f64, GeometryError> {
    if !(notch_width > 0.0) {
        return Err(GeometryError::NonPositive {
            field: "notch_axial_width",
            value: notch_width,
        });
    }
    if bridge_length < 0.0 {
        return Err(GeometryError::NonPositive {
            field: "bridge_length",
            value: bridge_length,
        });
    }
    let pitch = notch_width + bridge_length;
    if pitch == 0.0 {
        return Err(GeometryError::ZeroPitch);
    }
    Ok((notch_width * notch_offset + bridge_length * 0.0) / pitch)
}

/// Arc length of a helix of axial length `patterned_length` and radius
/// `offset` making `turns` turns.
pub fn neutral_axis_length(patterned_length: f64, offset: f64, turns: u32) -> f64 {
    patterned_length.hypot(TAU * f64::from(turns) * offset)
}

pub fn tendon_neutral_axis_distance(
    na_offset: f64,
    inner_radius: f64,
    tendon_radius: f64,
) -> Result<f64, GeometryError> {
    let d = na_offset + inner_radius - tendon_radius;
    if d > 0.0 {
        Ok(d)
    } else {
        Err(GeometryError::TendonOffset(d))
    }
}

/// Unloaded tendon length over the patterned section.
///
/// Chosen so that zero stroke and zero tension put the cylinder radius at the
/// neutral-axis offset and the cylinder height at the patterned length, i.e.
/// the tube is unbent.
pub fn slack_tendon_length(spec: &TubeSpec) -> f64 {
    spec.patterned_length
        .hypot(TAU * f64::from(spec.turn_count) * (spec.inner_radius - spec.tendon_radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternFlag {
    /// Notch pitch does not divide the patterned length.
    FractionalNotchCount,
    /// Accumulated circumferential offset misses `turn_count` full turns by more than 2 %.
    ClosureMismatch,
    /// Half angle derived from the notch extent differs from the stated one by more than 1 deg.
    HalfAngleMismatch,
}

/// Self-consistency of the machined pattern numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternReport {
    pub notch_count: f64,
    pub closure_ratio: f64,
    pub half_angle_residual: f64,
    pub flags: Vec<PatternFlag>,
}

impl PatternReport {
    pub fn is_consistent(&self) -> bool {
        self.flags.is_empty()
    }
}

const CLOSURE_TOLERANCE: f64 = 0.02;
const NOTCH_COUNT_TOLERANCE: f64 = 1e-6;

pub fn pattern_consistency(spec: &TubeSpec) -> PatternReport {
    let notch_count = spec.patterned_length / (spec.notch_axial_width + spec.bridge_length);
    let closure_ratio = notch_count * spec.circumferential_offset / (TAU * spec.outer_radius);
    let half_angle_residual = (spec.remaining_half_angle - spec.half_angle_from_extent()).abs();
    let turns = f64::from(spec.turn_count);

    let mut flags = Vec::new();
    if (notch_count - notch_count.round()).abs() > NOTCH_COUNT_TOLERANCE * notch_count.max(1.0) {
        flags.push(PatternFlag::FractionalNotchCount);
    }
    if (closure_ratio - turns).abs() > CLOSURE_TOLERANCE * turns {
        flags.push(PatternFlag::ClosureMismatch);
    }
    if half_angle_residual > 1f64.to_radians() {
        flags.push(PatternFlag::HalfAngleMismatch);
    }
    PatternReport {
        notch_count,
        closure_ratio,
        half_angle_residual,
        flags,
    }
}

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod estimation;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod plot;
pub mod simulation;

pub use geometry::{DerivedGeometry, GeometryError, TendonSpec, TubeSpec};
pub use kinematics::{BackboneCurve, HelixModel, JointState, KinematicsError, Point3, Vector3};

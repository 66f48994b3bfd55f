use std::f64::consts::{PI, TAU};

use helikin::estimation::compare;
use helikin::geometry::{
    composite_neutral_axis_offset, notch_neutral_axis_offset, sector_centroid_offset, TubeSpec,
};
use helikin::kinematics::{closure_residual, HelixModel, Point3, Vector3};
use helikin::simulation::{drifted_tip_trace, eta_grid, ftl_fidelity, ftl_run, phantom_clearance, PhantomSpec};
use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;

fn model() -> HelixModel {
    HelixModel::prototype()
}

// Tensor midpoint rule; the integrand r^2 cos(alpha) separates.
fn quadrature_offset(inner: f64, outer: f64, psi: f64) -> f64 {
    let (na, nr) = (20_000, 2_000);
    let (da, dr) = (2.0 * psi / na as f64, (outer - inner) / nr as f64);
    let cos_mean = (0..na).map(|i| (-psi + (i as f64 + 0.5) * da).cos()).sum::<f64>() / na as f64;
    let (mut m, mut a) = (0.0, 0.0);
    for j in 0..nr {
        let r = inner + (j as f64 + 0.5) * dr;
        m += r * r;
        a += r;
    }
    m / a * cos_mean
}

fn point() -> impl Strategy<Value = Point3> {
    (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn trajectory_pair() -> impl Strategy<Value = (Vec<Point3>, Vec<Point3>)> {
    (1usize..40).prop_flat_map(|n| (prop::collection::vec(point(), n), prop::collection::vec(point(), n)))
}

/// Stroke strictly inside the realizable range for the given tension.
fn stroke_fraction() -> impl Strategy<Value = f64> {
    0.0..0.995f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_offset_matches_quadrature(
        inner in 0.1..3.0f64,
        wall in 0.02..1.0f64,
        psi_deg in 2.0..178.0f64,
    ) {
        let psi = psi_deg.to_radians();
        let closed = sector_centroid_offset(inner, inner + wall, psi).unwrap();
        let numeric = quadrature_offset(inner, inner + wall, psi);
        prop_assert!(((closed - numeric) / numeric).abs() < 1e-6, "{closed} vs {numeric}");
    }

    #[test]
    fn offset_shrinks_as_half_angle_grows(a in 1.0..179.0f64, b in 1.0..179.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let at = |deg: f64| notch_neutral_axis_offset(&TubeSpec {
            remaining_half_angle: deg.to_radians(),
            ..TubeSpec::prototype()
        }).unwrap();
        prop_assert!(at(lo) > at(hi));
    }

    #[test]
    fn composite_offset_between_zero_and_notch(w in 0.01..5.0f64, d in 0.01..5.0f64) {
        let y = composite_neutral_axis_offset(0.73, w, d).unwrap();
        prop_assert!(y > 0.0 && y < 0.73);
        prop_assert!(composite_neutral_axis_offset(0.73, w * 1.5, d).unwrap() > y);
    }

    #[test]
    fn stroke_round_trip(frac in stroke_fraction(), tension in 0.0..10.0f64, theta in -PI..PI) {
        let m = model();
        let stroke = frac * m.max_stroke(tension);
        let joint = m.joint_from_stroke(stroke, tension, theta).unwrap();
        prop_assert!(closure_residual(joint.radius(), joint.height(), m.na_length(), 1) < 1e-12);
        prop_assert!((m.stroke_for_joint(&joint, tension) - stroke).abs() < 1e-9);
    }

    #[test]
    fn roll_preserves_distances_from_origin(frac in stroke_fraction(), theta in -PI..PI, t in 0.0..=1.0f64) {
        let m = model();
        let joint = m.joint_from_stroke(frac * m.max_stroke(0.0), 0.0, 0.0).unwrap();
        let s = t * m.na_length();
        let base = m.point(&joint, s).unwrap();
        let rolled = m.point(&joint.with_actuation_angle(theta), s).unwrap();
        prop_assert!((base.coords.norm() - rolled.coords.norm()).abs() < 1e-9);
        prop_assert!((base.x - rolled.x).abs() < 1e-9);
    }

    #[test]
    fn backbone_keeps_constant_distance_from_cylinder_axis(frac in stroke_fraction(), theta in -PI..PI) {
        let m = model();
        let joint = m.joint_from_stroke(frac * m.max_stroke(0.0), 0.0, theta).unwrap();
        let phantom = PhantomSpec::on_cylinder_axis(&joint, 0.0);
        for p in m.uniform_backbone(&joint, 33).points() {
            prop_assert!((phantom.distance_to_axis(p) - joint.radius()).abs() < 1e-9);
        }
    }

    #[test]
    fn metric_axioms((a, b) in trajectory_pair(), k in 0.01..100.0f64) {
        let ab = compare(&a, &b).unwrap();
        let ba = compare(&b, &a).unwrap();
        prop_assert_eq!(ab.max_euclidean, ba.max_euclidean);
        prop_assert!((ab.rmse - ba.rmse).abs() <= 1e-12 * ab.rmse.max(1.0));
        prop_assert!(ab.rmse <= ab.max_euclidean * (1.0 + 1e-12));
        let aa = compare(&a, &a).unwrap();
        prop_assert_eq!((aa.max_euclidean, aa.rmse), (0.0, 0.0));

        let scale = |v: &[Point3]| v.iter().map(|p| Point3::from(p.coords * k)).collect::<Vec<_>>();
        let scaled = compare(&scale(&a), &scale(&b)).unwrap();
        prop_assert!((scaled.max_euclidean - k * ab.max_euclidean).abs() <= 1e-9 * k * ab.max_euclidean.max(1.0));
        prop_assert!((scaled.rmse - k * ab.rmse).abs() <= 1e-9 * k * ab.rmse.max(1.0));
    }

    #[test]
    fn clearance_is_invariant_under_rigid_motion(
        pts in prop::collection::vec(point(), 1..30),
        axis_point in point(),
        dir in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        radius in 0.0..10.0f64,
        rot in (-PI..PI, -PI..PI, -PI..PI),
        shift in point(),
    ) {
        let dir = Vector3::new(dir.0, dir.1, dir.2);
        prop_assume!(dir.norm() > 1e-3);
        let phantom = PhantomSpec { axis_point, axis_direction: dir.normalize(), radius };
        let r = Rotation3::from_euler_angles(rot.0, rot.1, rot.2);
        let moved: Vec<Point3> = pts.iter().map(|p| r * p + shift.coords).collect();
        let moved_phantom = PhantomSpec {
            axis_point: r * axis_point + shift.coords,
            axis_direction: Unit::new_normalize(r * dir).into_inner(),
            radius,
        };
        let before = phantom_clearance(&pts, &phantom, 0.953).unwrap();
        let after = phantom_clearance(&moved, &moved_phantom, 0.953).unwrap();
        prop_assert!((before.min_clearance - after.min_clearance).abs() < 1e-9);
    }

    #[test]
    fn every_exposed_body_is_a_prefix_of_later_ones(
        frac in stroke_fraction(),
        theta in -PI..PI,
        count in 2usize..60,
        reversed in any::<bool>(),
    ) {
        let m = model();
        let joint = m.joint_from_stroke(frac * m.max_stroke(0.0), 0.0, theta).unwrap();
        let mut grid = eta_grid(count);
        if reversed {
            grid.reverse();
        }
        let run = ftl_run(&joint, &m, &grid).unwrap();
        for (i, a) in run.backbones.iter().enumerate() {
            for (j, b) in run.backbones.iter().enumerate() {
                if grid[i] <= grid[j] {
                    prop_assert!(a.len() <= b.len());
                    prop_assert_eq!(a.samples(), &b.samples()[..a.len()]);
                }
            }
        }
        let body = run.backbones.iter().max_by_key(|b| b.len()).unwrap();
        prop_assert!(ftl_fidelity(&run.tip, body, m.na_length()).unwrap().max_euclidean < 1e-9);
    }

    #[test]
    fn roll_drift_degrades_fidelity_monotonically(frac in 0.05..0.995f64, theta in -PI..PI) {
        let m = model();
        let joint = m.joint_from_stroke(frac * m.max_stroke(0.0), 0.0, theta).unwrap();
        let grid = eta_grid(101);
        let body = ftl_run(&joint, &m, &grid).unwrap().backbones.pop().unwrap();
        let errors: Vec<f64> = [0.0, 0.01, 0.05, 0.1]
            .iter()
            .map(|&d| {
                let trace = drifted_tip_trace(&joint, &m, &grid, d).unwrap();
                ftl_fidelity(&trace, &body, m.na_length()).unwrap().max_euclidean
            })
            .collect();
        prop_assert!(errors[0] < 1e-9);
        prop_assert!(errors.windows(2).all(|w| w[1] > w[0]), "{errors:?}");
    }
}

#[test]
fn chord_length_converges_to_neutral_axis_length() {
    let m = model();
    let joint = m.joint_from_stroke(5.0, 0.0, 0.4).unwrap();
    let mut previous = 0.0;
    for count in [9, 17, 33, 65, 129, 257, 513] {
        let chord = m.uniform_backbone(&joint, count).chord_length();
        assert!(chord > previous && chord <= m.na_length());
        previous = chord;
    }
    assert!((m.na_length() - previous) / m.na_length() < 1e-5);
}

#[test]
fn helix_tip_winds_once_around_the_cylinder() {
    let m = model();
    let joint = m.joint_from_stroke(3.0, 0.0, 0.0).unwrap();
    let phantom = PhantomSpec::on_cylinder_axis(&joint, 0.0);
    let samples = m.uniform_backbone(&joint, 257);
    // Angle swept around the cylinder axis, unwrapped.
    let (_, axis) = joint.cylinder_axis();
    let u = Vector3::new(0.0, -1.0, 0.0);
    let v = axis.cross(&u);
    let mut total = 0.0;
    let mut last: Option<f64> = None;
    for p in samples.points() {
        let rel = p - phantom.axis_point;
        let a = rel.dot(&v).atan2(rel.dot(&u));
        if let Some(prev) = last {
            let mut d = a - prev;
            if d > PI {
                d -= TAU;
            } else if d < -PI {
                d += TAU;
            }
            total += d;
        }
        last = Some(a);
    }
    assert!((total.abs() - TAU).abs() < 1e-9, "{total}");
}

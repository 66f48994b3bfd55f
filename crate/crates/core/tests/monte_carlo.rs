// Statistical oracles: with i.i.d. N(0, sigma^2) noise per axis the squared
// distance between a noisy point and its truth has mean 3 sigma^2, and
// between two independently noisy copies 6 sigma^2.

use helikin::estimation::{compare, predict_marker, repeatability_compare, stroke_based_estimate};
use helikin::kinematics::{HelixModel, Point3, TipSample, TipTrajectory, Vector3};
use helikin::simulation::{eta_grid, stroke_ramp, synthetic_sweep, NoiseSpec, PROTOTYPE_MARKERS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn jitter(tip: &TipTrajectory, sigma: f64, seed: u64) -> TipTrajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut draw = || normal.sample(&mut rng);
    TipTrajectory {
        samples: tip
            .samples
            .iter()
            .map(|s| TipSample {
                eta: s.eta,
                point: s.point + Vector3::new(draw(), draw(), draw()),
            })
            .collect(),
    }
}

#[test]
fn repeatability_rmse_of_two_noisy_trials() {
    let model = HelixModel::prototype();
    let joint = model.joint_from_stroke(5.0, 0.0, 0.2).unwrap();
    let tip = TipTrajectory {
        samples: eta_grid(20_001)
            .into_iter()
            .map(|eta| TipSample { eta, point: model.ftl_tip(eta, &joint).unwrap() })
            .collect(),
    };
    let sigma = 0.5;
    let mut second = jitter(&tip, sigma, 2);
    second.samples.reverse();
    let profile = repeatability_compare(&jitter(&tip, sigma, 1), &second).unwrap();
    let expected = (6.0f64).sqrt() * sigma;
    let got = profile.comparison.rmse;
    assert_eq!(profile.etas.len(), 20_001);
    assert!((got - expected).abs() / expected < 0.02, "{got} vs {expected}");
}

#[test]
fn stroke_estimates_against_noisy_markers() {
    let model = HelixModel::prototype();
    let profile = stroke_ramp(6.0, 4001, 0.0);
    for sigma in [0.1, 0.5, 1.0] {
        let noise = NoiseSpec {
            position_sigma: sigma,
            stroke_sigma: 0.0,
            seed: 11,
        };
        let data = synthetic_sweep(&model, &profile, &PROTOTYPE_MARKERS, &noise, -0.8).unwrap();
        let estimate = stroke_based_estimate(&data.recorded_actuation, &model, -0.8);
        for channel in &data.markers {
            let predicted: Vec<Point3> = predict_marker(&estimate, &model, channel.arc_length)
                .into_iter()
                .map(Option::unwrap)
                .collect();
            let noiseless = compare(&predicted, &channel.truth.points()).unwrap();
            assert!(noiseless.max_euclidean < 1e-9);
            let noisy = compare(&predicted, &channel.noisy.points()).unwrap();
            let expected = (3.0f64).sqrt() * sigma;
            assert!((noisy.rmse - expected).abs() / expected < 0.04, "sigma {sigma}: {}", noisy.rmse);
        }
    }
}

#[test]
fn stroke_noise_has_the_requested_spread() {
    let model = HelixModel::prototype();
    let profile = stroke_ramp(4.0, 5001, 0.0);
    let noise = NoiseSpec {
        position_sigma: 0.0,
        stroke_sigma: 0.2,
        seed: 3,
    };
    let data = synthetic_sweep(&model, &profile, &[], &noise, 0.0).unwrap();
    let n = profile.len() as f64;
    let errors: Vec<f64> = data
        .recorded_actuation
        .iter()
        .zip(&profile)
        .map(|(r, c)| r.0 - c.0)
        .collect();
    let mean = errors.iter().sum::<f64>() / n;
    let sd = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 4.0 * 0.2 / n.sqrt());
    assert!((sd - 0.2).abs() < 0.01, "{sd}");
}

#[test]
fn fixed_seed_reproduces_and_new_seed_differs() {
    let model = HelixModel::prototype();
    let profile = stroke_ramp(5.0, 50, 0.0);
    let noise = |seed| NoiseSpec {
        position_sigma: 0.3,
        stroke_sigma: 0.05,
        seed,
    };
    let a = synthetic_sweep(&model, &profile, &PROTOTYPE_MARKERS, &noise(7), 0.0).unwrap();
    let b = synthetic_sweep(&model, &profile, &PROTOTYPE_MARKERS, &noise(7), 0.0).unwrap();
    let c = synthetic_sweep(&model, &profile, &PROTOTYPE_MARKERS, &noise(8), 0.0).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.tip.noisy, c.tip.noisy);
    assert_eq!(a.tip.truth, c.tip.truth);
}

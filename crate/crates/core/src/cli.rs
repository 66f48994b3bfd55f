//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure (for
//! example an over-actuated stroke), 4 file-system error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::estimation::{
    compare, position_based_series, predict_marker, repeatability_compare, stroke_based_estimate,
    EstimateResult, EstimationError, Method,
};
use crate::geometry::{pattern_consistency, GeometryError, PatternFlag};
use crate::io::{
    curve_csv, distances_csv, joints_csv, read_joints, read_json, read_points, tip_csv, to_json_pretty,
    write_atomic, write_bundle, write_json, ComparisonReport, IoError, JointRow, SpecDocument,
};
use crate::kinematics::{HelixModel, JointState, KinematicsError, DEFAULT_CURVE_SAMPLES};
use crate::plot::{render_svg, Series};
use crate::simulation::{
    eta_grid, ftl_fidelity, ftl_run, phantom_clearance, stroke_ramp, synthetic_sweep, NoiseSpec,
    PhantomSpec, SimulationError, DEFAULT_ETA_STEPS, PROTOTYPE_MARKERS,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Validation(format!("invalid tube spec: {e}"))
    }
}

impl From<KinematicsError> for CliError {
    fn from(e: KinematicsError) -> Self {
        use KinematicsError::*;
        match e {
            OverActuated { .. } | NonPhysical { .. } | NonPositiveTendonLength(_) | Closure(_)
            | TipBeyondReach { .. } | DegenerateTip => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Kinematics(k) => k.into(),
            SimulationError::Estimation(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Kinematics(k) => k.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        if e.is_malformed() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

/// Helical continuum tube kinematics: geometry, shape, follow-the-leader
/// progression, estimation and clearance. Lengths in mm, forces in N,
/// angles in degrees on the command line.
#[derive(Debug, Parser)]
#[command(name = "helikin", version)]
pub struct Cli {
    /// Tube/tendon spec JSON (lengths mm, remaining_half_angle deg, modulus GPa,
    /// area m^2). Defaults to the bundled prototype.
    #[arg(long, global = true, env = "HELIKIN_SPEC")]
    pub spec: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived geometry (neutral-axis offsets and lengths, mm) and pattern diagnostics.
    Geometry {
        /// Write the derived geometry JSON here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Backbone of one actuation state as CSV `s_mm,x_mm,y_mm,z_mm`.
    Shape {
        #[command(flatten)]
        joint: JointArgs,
        /// Number of arc-length samples.
        #[arg(long, default_value_t = DEFAULT_CURVE_SAMPLES)]
        samples: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Synthetic stroke sweep with tracked markers, written as a dataset directory.
    Sweep {
        /// Final stroke of the linear ramp, mm.
        #[arg(long, default_value_t = 5.0)]
        max_stroke_mm: f64,
        /// Number of samples in the ramp.
        #[arg(long, default_value_t = 51)]
        steps: usize,
        /// Constant tendon tension, N.
        #[arg(long, default_value_t = 0.0)]
        tension_n: f64,
        /// Actuation (roll) angle, degrees.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_deg: f64,
        /// Marker arc lengths, mm.
        #[arg(long, value_delimiter = ',', default_values_t = PROTOTYPE_MARKERS)]
        markers: Vec<f64>,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Follow-the-leader run at a fixed joint state: tip trace, final backbone, set-points.
    Ftl {
        #[command(flatten)]
        joint: JointArgs,
        /// Number of progression values over [0, 1].
        #[arg(long, default_value_t = DEFAULT_ETA_STEPS)]
        eta_steps: usize,
        /// Also write the exposed backbone at every progression value.
        #[arg(long)]
        all_backbones: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Joint estimates from stroke data or tracked tip positions.
    Estimate {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Point CSV `eta,x_mm,y_mm,z_mm[,dl_t_mm,T_N]`; stroke method needs the last two columns.
        #[arg(short, long)]
        input: PathBuf,
        /// Fixed actuation angle, degrees.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_deg: f64,
        /// Joint CSV `dl_t_mm,T_N,R_mm,H_mm,phi_rad,theta_rad`.
        #[arg(short, long)]
        output: PathBuf,
        /// Per-sample deflection angles `index,phi_truth_rad,phi_model_rad`.
        #[arg(long)]
        phi_output: Option<PathBuf>,
        /// Predict the marker at this arc length (mm) for every sample...
        #[arg(long, requires = "predict_output")]
        predict_s_mm: Option<f64>,
        /// ...and write the predictions here as `eta,x_mm,y_mm,z_mm`.
        #[arg(long, requires = "predict_s_mm")]
        predict_output: Option<PathBuf>,
    },
    /// Maximum Euclidean distance and RMSE (mm) between two point CSVs, as JSON on stdout.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Align::Auto)]
        align: Align,
        /// Per-sample distance CSV.
        #[arg(long)]
        per_sample: Option<PathBuf>,
    },
    /// Minimum clearance (mm) between a backbone CSV and a cylindrical phantom.
    Clearance {
        /// Curve CSV (`s_mm,...` or `eta,...`).
        #[arg(long)]
        curve: PathBuf,
        /// Phantom JSON `{axis_point_mm, axis_direction, radius_mm}`.
        #[arg(long)]
        phantom: PathBuf,
        /// Tube outer radius, mm. Defaults to the spec's outer radius.
        #[arg(long)]
        tube_radius_mm: Option<f64>,
    },
    /// XY, XZ and isometric SVG projections (axes in mm) of point CSVs.
    Plot {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "backbone")]
        title: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Geometry, stroke sweep, follow-the-leader run and phantom clearance in one go.
    Demo {
        /// Final stroke of the sweep and stroke held during progression, mm.
        #[arg(long, default_value_t = 5.0)]
        stroke_mm: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_deg: f64,
        #[arg(long, default_value_t = DEFAULT_ETA_STEPS)]
        eta_steps: usize,
        /// Radius of the phantom placed on the imaginary cylinder axis, mm.
        #[arg(long, default_value_t = 4.0)]
        phantom_radius_mm: f64,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Where the joint state comes from: a stroke, or a row of a joint CSV.
#[derive(Debug, Args)]
pub struct JointArgs {
    /// Tendon stroke, mm.
    #[arg(long, default_value_t = 0.0)]
    pub stroke_mm: f64,
    /// Tendon tension, N.
    #[arg(long, default_value_t = 0.0)]
    pub tension_n: f64,
    /// Actuation (roll) angle, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_deg: f64,
    /// Take (R, H, theta) from this joint CSV instead of the stroke.
    #[arg(long)]
    pub joint_file: Option<PathBuf>,
    /// Row of the joint CSV, 0-based.
    #[arg(long, default_value_t = 0, requires = "joint_file")]
    pub row: usize,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Per-axis position noise, mm.
    #[arg(long, default_value_t = 0.0)]
    pub position_sigma_mm: f64,
    /// Stroke sensor noise, mm.
    #[arg(long, default_value_t = 0.0)]
    pub stroke_sigma_mm: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl NoiseArgs {
    fn spec(&self) -> NoiseSpec {
        NoiseSpec {
            position_sigma: self.position_sigma_mm,
            stroke_sigma: self.stroke_sigma_mm,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Stroke,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Align {
    /// Index alignment when both key columns agree, progression matching otherwise.
    Auto,
    Index,
    Eta,
}

fn load_model(spec: Option<&Path>) -> Result<HelixModel, CliError> {
    let doc = match spec {
        Some(path) => read_json::<SpecDocument>(path)?,
        None => SpecDocument::prototype(),
    };
    Ok(HelixModel::new(doc.tube, doc.tendon)?)
}

fn print_json<T: Serialize>(value: &T) {
    print!("{}", to_json_pretty(value));
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    Ok(write_atomic(path, text.as_bytes())?)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn resolve_joint(model: &HelixModel, args: &JointArgs) -> Result<JointState, CliError> {
    match &args.joint_file {
        None => Ok(model.joint_from_stroke(args.stroke_mm, args.tension_n, args.theta_deg.to_radians())?),
        Some(path) => {
            let rows = read_joints(path)?;
            let row = rows.get(args.row).ok_or_else(|| {
                CliError::Validation(format!("{}: no row {}", path.display(), args.row))
            })?;
            if !row.is_valid() {
                return Err(CliError::Numerical(format!(
                    "{}: row {} holds no valid joint",
                    path.display(),
                    args.row
                )));
            }
            Ok(JointState::new(row.radius, row.height, row.theta, model.geometry(), model.turns())?)
        }
    }
}

#[derive(Serialize)]
struct JointSummary {
    r_mm: f64,
    h_mm: f64,
    phi_rad: f64,
    theta_rad: f64,
    dl_t_mm: f64,
}

impl JointSummary {
    fn new(model: &HelixModel, joint: &JointState) -> Self {
        Self {
            r_mm: joint.radius(),
            h_mm: joint.height(),
            phi_rad: joint.deflection_angle(),
            theta_rad: joint.actuation_angle(),
            dl_t_mm: model.stroke_for_joint(joint, 0.0),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let model = load_model(cli.spec.as_deref())?;
    match cli.command {
        Command::Geometry { output } => cmd_geometry(&model, output.as_deref()),
        Command::Shape { joint, samples, output } => {
            if samples < 2 {
                return Err(CliError::Validation("--samples must be at least 2".into()));
            }
            let joint = resolve_joint(&model, &joint)?;
            write_text(&output, &curve_csv(&model.uniform_backbone(&joint, samples)))?;
            print_json(&JointSummary::new(&model, &joint));
            Ok(())
        }
        Command::Sweep {
            max_stroke_mm,
            steps,
            tension_n,
            theta_deg,
            markers,
            noise,
            output,
        } => {
            let profile = stroke_ramp(max_stroke_mm, steps, tension_n);
            let dataset = synthetic_sweep(&model, &profile, &markers, &noise.spec(), theta_deg.to_radians())?;
            write_bundle(&dataset, &output)?;
            let failed = dataset.joints.len() - dataset.valid.len();
            if failed > 0 {
                eprintln!("warning: {failed} of {} samples could not be realized", dataset.joints.len());
            }
            if dataset.valid.is_empty() {
                return Err(CliError::Numerical("no sample in the sweep is realizable".into()));
            }
            Ok(())
        }
        Command::Ftl {
            joint,
            eta_steps,
            all_backbones,
            output,
        } => {
            let joint = resolve_joint(&model, &joint)?;
            cmd_ftl(&model, &joint, eta_steps, all_backbones, &output)
        }
        Command::Estimate {
            method,
            input,
            theta_deg,
            output,
            phi_output,
            predict_s_mm,
            predict_output,
        } => cmd_estimate(
            &model,
            method,
            &input,
            theta_deg.to_radians(),
            &output,
            phi_output.as_deref(),
            predict_s_mm.zip(predict_output),
        ),
        Command::Compare { a, b, align, per_sample } => cmd_compare(&a, &b, align, per_sample.as_deref()),
        Command::Clearance {
            curve,
            phantom,
            tube_radius_mm,
        } => {
            let table = read_points(&curve)?;
            let phantom: PhantomSpec = read_json(&phantom)?;
            let radius = tube_radius_mm.unwrap_or(model.spec().outer_radius);
            let c = phantom_clearance(&table.points(), &phantom, radius)?;
            print_json(&serde_json::json!({
                "min_clearance_mm": c.min_clearance,
                "collides": c.collides,
                "closest_index": c.closest_index,
            }));
            Ok(())
        }
        Command::Plot { inputs, title, output } => {
            let series = inputs
                .iter()
                .map(|path| {
                    Ok(Series {
                        label: path.display().to_string(),
                        points: read_points(path)?.points(),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            write_text(&output, &render_svg(&series, &title))
        }
        Command::Demo {
            stroke_mm,
            theta_deg,
            eta_steps,
            phantom_radius_mm,
            noise,
            output,
        } => {
            let report = demo(
                &model,
                &DemoConfig {
                    stroke: stroke_mm,
                    theta: theta_deg.to_radians(),
                    eta_steps,
                    phantom_radius: phantom_radius_mm,
                    noise: noise.spec(),
                },
                &output,
            )?;
            print_json(&report);
            Ok(())
        }
    }
}

fn cmd_geometry(model: &HelixModel, output: Option<&Path>) -> Result<(), CliError> {
    let spec = model.spec();
    let geom = model.geometry();
    let report = pattern_consistency(spec);
    let table = format!(
        "notch neutral axis offset   {:>12.6} mm\n\
         composite neutral axis      {:>12.6} mm\n\
         neutral axis length         {:>12.6} mm\n\
         tendon to neutral axis      {:>12.6} mm\n\
         slack tendon length         {:>12.6} mm\n\
         notch count                 {:>12.6}\n\
         closure ratio (turns)       {:>12.6}\n\
         half-angle residual         {:>12.6} deg\n",
        geom.notch_na_offset,
        geom.composite_na_offset,
        geom.na_length,
        geom.tendon_na_distance,
        geom.slack_tendon_length,
        report.notch_count,
        report.closure_ratio,
        report.half_angle_residual.to_degrees(),
    );
    match output {
        Some(path) => {
            write_json(path, geom)?;
            print!("{table}");
        }
        None => {
            print_json(geom);
            eprint!("{table}");
        }
    }
    if geom.notch_na_offset == 0.0 {
        eprintln!("warning: notch leaves the full annulus; the neutral axis is on the tube axis and the tube will not wind");
    }
    for flag in &report.flags {
        let msg = match flag {
            PatternFlag::FractionalNotchCount => "notch pitch does not divide the patterned length",
            PatternFlag::ClosureMismatch => "circumferential offsets do not close the stated number of turns",
            PatternFlag::HalfAngleMismatch => "remaining half angle disagrees with the notch extent by more than 1 deg",
        };
        eprintln!("warning: {msg}");
    }
    Ok(())
}

fn cmd_ftl(
    model: &HelixModel,
    joint: &JointState,
    eta_steps: usize,
    all_backbones: bool,
    output: &Path,
) -> Result<(), CliError> {
    if eta_steps < 2 {
        return Err(CliError::Validation("--eta-steps must be at least 2".into()));
    }
    create_dir(output)?;
    let grid = eta_grid(eta_steps);
    let run = ftl_run(joint, model, &grid)?;
    let body = run.backbones.last().expect("grid is non-empty");
    write_text(&output.join("tip.csv"), &tip_csv(&run.tip))?;
    write_text(&output.join("backbone.csv"), &curve_csv(body))?;

    let mut setpoints = String::from("eta,theta_in_rad,exposed_length_mm,progressive_tendon_length_mm\n");
    for &eta in &grid {
        let a = model.ftl_actuation(eta, joint)?;
        setpoints.push_str(&format!(
            "{:?},{:?},{:?},{:?}\n",
            eta, a.roller_input_angle, a.exposed_length, a.progressive_tendon_length
        ));
    }
    write_text(&output.join("actuation.csv"), &setpoints)?;

    if all_backbones {
        for (eta, b) in grid.iter().zip(&run.backbones) {
            write_text(&output.join(format!("backbone_eta_{eta:.4}.csv")), &curve_csv(b))?;
        }
    }
    let fidelity = ftl_fidelity(&run.tip, body, model.na_length())?;
    print_json(&serde_json::json!({
        "joint": JointSummary::new(model, joint),
        "fidelity": ComparisonReport::from(&fidelity),
    }));
    Ok(())
}

fn cmd_estimate(
    model: &HelixModel,
    method: MethodArg,
    input: &Path,
    theta: f64,
    output: &Path,
    phi_output: Option<&Path>,
    predict: Option<(f64, PathBuf)>,
) -> Result<(), CliError> {
    let table = read_points(input)?;
    let actuation = table.to_track(0.0).actuation();
    let result: EstimateResult = match method {
        MethodArg::Stroke => {
            let act = actuation.as_ref().ok_or_else(|| {
                CliError::Validation(format!("{}: stroke method needs dl_t_mm,T_N columns", input.display()))
            })?;
            stroke_based_estimate(act, model, theta)
        }
        MethodArg::Position => position_based_series(&table.points(), model, theta),
    };

    let rows: Vec<JointRow> = result
        .joints
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let (stroke, tension) = actuation.as_ref().map_or((f64::NAN, f64::NAN), |a| a[i]);
            JointRow::new(stroke, tension, j.as_ref(), theta)
        })
        .collect();
    write_text(output, &joints_csv(&rows))?;

    if let Some(path) = phi_output {
        let mut text = String::from("index,phi_truth_rad,phi_model_rad\n");
        for (i, (j, phi)) in result.joints.iter().zip(&result.per_sample_phi).enumerate() {
            let model_phi = j.as_ref().map_or(f64::NAN, JointState::deflection_angle);
            let truth = match result.method {
                Method::PositionBased => phi.unwrap_or(f64::NAN),
                Method::StrokeBased => f64::NAN,
            };
            text.push_str(&format!("{i},{truth:?},{model_phi:?}\n"));
        }
        write_text(path, &text)?;
    }

    if let Some((s, path)) = predict {
        if !(0.0..=model.na_length()).contains(&s) {
            return Err(CliError::Validation(format!(
                "--predict-s-mm {s} outside [0, {}]",
                model.na_length()
            )));
        }
        let mut text = String::from("eta,x_mm,y_mm,z_mm\n");
        for (sample, p) in table.samples.iter().zip(predict_marker(&result, model, s)) {
            if let Some(p) = p {
                text.push_str(&format!("{:?},{:?},{:?},{:?}\n", sample.eta, p.x, p.y, p.z));
            }
        }
        write_text(&path, &text)?;
    }

    let failures: Vec<_> = result.failures().collect();
    for (i, e) in &failures {
        eprintln!("warning: sample {i}: {e}");
    }
    if failures.len() == result.joints.len() {
        return Err(CliError::Numerical("no sample could be estimated".into()));
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, align: Align, per_sample: Option<&Path>) -> Result<(), CliError> {
    let ta = read_points(a)?;
    let tb = read_points(b)?;
    let by_eta = match align {
        Align::Index => false,
        Align::Eta => true,
        Align::Auto => ta.keys() != tb.keys(),
    };
    let (keys, comparison) = if by_eta {
        let profile = repeatability_compare(&ta.to_tip_trajectory(), &tb.to_tip_trajectory())?;
        (profile.etas, profile.comparison)
    } else {
        (ta.keys(), compare(&ta.points(), &tb.points())?)
    };
    if let Some(path) = per_sample {
        write_text(path, &distances_csv(&keys, &ta.key, &comparison.per_sample_distances))?;
    }
    print_json(&ComparisonReport::from(&comparison));
    Ok(())
}

/// Parameters of the end-to-end demo.
#[derive(Debug, Clone, Copy)]
pub struct DemoConfig {
    pub stroke: f64,
    pub theta: f64,
    pub eta_steps: usize,
    pub phantom_radius: f64,
    pub noise: NoiseSpec,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            stroke: 5.0,
            theta: 0.0,
            eta_steps: DEFAULT_ETA_STEPS,
            phantom_radius: 4.0,
            noise: NoiseSpec::none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub na_length_mm: f64,
    pub composite_na_offset_mm: f64,
    pub joint_r_mm: f64,
    pub joint_h_mm: f64,
    pub joint_phi_rad: f64,
    pub phantom: PhantomSpec,
    pub fidelity: ComparisonReport,
    /// Minimum clearance of the exposed body at each progression value.
    pub clearance_mm: Vec<f64>,
    pub min_clearance_mm: f64,
    pub collides: bool,
}

/// Geometry, a stroke sweep up to the demo stroke, a follow-the-leader run
/// at the final joint, and clearance of every exposed body against a
/// phantom on the cylinder axis. Writes its artifacts into `output`.
pub fn demo(model: &HelixModel, cfg: &DemoConfig, output: &Path) -> Result<DemoReport, CliError> {
    if cfg.eta_steps < 2 {
        return Err(CliError::Validation("--eta-steps must be at least 2".into()));
    }
    create_dir(output)?;
    write_json(&output.join("geometry.json"), model.geometry())?;

    let profile = stroke_ramp(cfg.stroke, 51, 0.0);
    let dataset = synthetic_sweep(model, &profile, &PROTOTYPE_MARKERS, &cfg.noise, cfg.theta)?;
    write_bundle(&dataset, &output.join("sweep"))?;
    let joint = match dataset.joints.last() {
        Some(Ok(j)) => *j,
        Some(Err(e)) => return Err(e.clone().into()),
        None => return Err(CliError::Validation("empty sweep".into())),
    };

    let grid = eta_grid(cfg.eta_steps);
    let run = ftl_run(&joint, model, &grid)?;
    let body = run.backbones.last().expect("grid is non-empty");
    let fidelity = ftl_fidelity(&run.tip, body, model.na_length())?;
    write_text(&output.join("tip.csv"), &tip_csv(&run.tip))?;
    write_text(&output.join("backbone.csv"), &curve_csv(body))?;

    let phantom = PhantomSpec::on_cylinder_axis(&joint, cfg.phantom_radius);
    write_json(&output.join("phantom.json"), &phantom)?;
    let tube_radius = model.spec().outer_radius;
    let clearance_mm = run
        .backbones
        .iter()
        .map(|b| phantom_clearance(b.points(), &phantom, tube_radius).map(|c| c.min_clearance))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::from("eta,min_clearance_mm\n");
    for (eta, c) in grid.iter().zip(&clearance_mm) {
        text.push_str(&format!("{eta:?},{c:?}\n"));
    }
    write_text(&output.join("clearance.csv"), &text)?;

    let axis: Vec<_> = [-10.0, model.na_length() + 10.0]
        .iter()
        .map(|&t| phantom.axis_point + phantom.axis_direction * t)
        .collect();
    let svg = render_svg(
        &[
            Series { label: "backbone (eta = 1)".into(), points: body.points().copied().collect() },
            Series { label: "tip trace".into(), points: run.tip.points() },
            Series { label: "phantom axis".into(), points: axis },
        ],
        "follow-the-leader demo",
    );
    write_text(&output.join("demo.svg"), &svg)?;

    let min_clearance_mm = clearance_mm.iter().copied().fold(f64::INFINITY, f64::min);
    let report = DemoReport {
        na_length_mm: model.na_length(),
        composite_na_offset_mm: model.geometry().composite_na_offset,
        joint_r_mm: joint.radius(),
        joint_h_mm: joint.height(),
        joint_phi_rad: joint.deflection_angle(),
        phantom,
        fidelity: ComparisonReport::from(&fidelity),
        clearance_mm,
        min_clearance_mm,
        collides: min_clearance_mm < 0.0,
    };
    write_json(&output.join("report.json"), &report)?;
    Ok(report)
}

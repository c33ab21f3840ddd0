//! `geobeam run`: integrate a scenario and write its time series.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use geobeam::analysis::{beam_cantilever_frequency, cantilever_mode};
use geobeam::beam::{energies, spatial_momenta, BeamParams, BeamState, Stepper};
use geobeam::rigidbody::{casimirs, spatial_momentum, step_rk4, RigidState};
use geobeam::{CoTwist, Pose, Twist, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{output_dir, Config, Kind, Reconstruction, Shape};
use crate::error::{CliError, Result};
use crate::table::{fmt, CsvWriter};

pub const SERIES: &str = "series.csv";
pub const FIELDS: &str = "fields.csv";
pub const METADATA: &str = "metadata.json";

const TWIST: [&str; 6] = ["ang_x", "ang_y", "ang_z", "lin_x", "lin_y", "lin_z"];
const ROT: [&str; 9] = ["R_xx", "R_xy", "R_xz", "R_yx", "R_yy", "R_yz", "R_zx", "R_zy", "R_zz"];

fn prefixed(prefix: &str, names: &[&str]) -> Vec<String> {
    names.iter().map(|n| format!("{prefix}{n}")).collect()
}

/// `t, chi_*, r_*, R_*, energy, energy_drift, casimir_nn, casimir_mn, pi_s_*`.
pub fn rigid_columns() -> Vec<String> {
    let mut c = vec!["t".to_string()];
    c.extend(prefixed("chi_", &TWIST));
    c.extend(prefixed("r_", &["x", "y", "z"]));
    c.extend(ROT.iter().map(|s| s.to_string()));
    c.extend(["energy", "energy_drift", "casimir_nn", "casimir_mn"].map(String::from));
    c.extend(prefixed("pi_s_", &TWIST));
    c
}

/// `t, tip_*, kinetic, potential, energy_drift, momentum_*`.
pub fn beam_series_columns() -> Vec<String> {
    let mut c = vec!["t".to_string()];
    c.extend(prefixed("tip_", &["x", "y", "z"]));
    c.extend(["kinetic", "potential", "energy_drift"].map(String::from));
    c.extend(prefixed("momentum_", &TWIST));
    c
}

/// `t, node, s, eps_*, chi_*, r_*, R_*`, one row per node and sample.
pub fn beam_field_columns() -> Vec<String> {
    let mut c = vec!["t".to_string(), "node".to_string(), "s".to_string()];
    c.extend(prefixed("eps_", &TWIST));
    c.extend(prefixed("chi_", &TWIST));
    c.extend(prefixed("r_", &["x", "y", "z"]));
    c.extend(ROT.iter().map(|s| s.to_string()));
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub length: f64,
    pub n_s: usize,
    pub ds: f64,
    pub bc: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub samples: usize,
    pub grid: Option<Grid>,
    pub series: String,
    pub fields: Option<String>,
    pub series_columns: Vec<String>,
    pub field_columns: Option<Vec<String>>,
    pub config: Config,
}

impl Metadata {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(METADATA);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::format(&path, format!("cannot read: {e}")))?;
        serde_json::from_str(&text).map_err(|e| CliError::format(&path, e.to_string()))
    }
}

/// Runs the scenario and returns the output directory.
pub fn run(config_path: &Path, dir_override: Option<&Path>, quiet: bool) -> Result<PathBuf> {
    let config = Config::load(config_path)?;
    let dir = output_dir(&config, config_path, dir_override);
    std::fs::create_dir_all(&dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    let bad = |m: String| CliError::config(config_path, m);
    let dt = config.time_step().map_err(bad)?;
    let steps = config.steps().map_err(bad)?;
    if !quiet {
        eprintln!("{:?} scenario: {steps} steps of {dt:e} s into {}", config.kind, dir.display());
    }
    let meta = match config.kind {
        Kind::Rigid => run_rigid(&config, config_path, &dir, dt, steps)?,
        Kind::Beam => run_beam(&config, config_path, &dir, dt, steps)?,
    };
    let path = dir.join(METADATA);
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&path, json + "\n").map_err(CliError::io(format!("writing {}", path.display())))?;
    if !quiet {
        eprintln!("wrote {} samples", meta.samples);
    }
    Ok(dir)
}

fn header(config: &Config, dt: f64, steps: usize, extra: &str) -> Vec<String> {
    vec![
        format!("geobeam {}", env!("CARGO_PKG_VERSION")),
        format!("kind={:?} dt={} steps={steps} stride={} seed={}{extra}", config.kind, fmt(dt), config.output.stride, config.seed),
        "config: ".to_string() + &serde_json::to_string(config).expect("config serializes"),
    ]
}

fn noise(config: &Config) -> impl FnMut() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let size = config.initial.perturbation;
    move || if size > 0.0 { rng.gen_range(-size..=size) } else { 0.0 }
}

fn perturb(chi: Twist, noise: &mut impl FnMut() -> f64) -> Twist {
    let mut a = chi.to_array();
    for x in &mut a {
        *x += noise();
    }
    Twist::from_array(a)
}

fn pose_cells(h: &Pose) -> impl Iterator<Item = f64> + '_ {
    let r = h.trans;
    [r.x, r.y, r.z].into_iter().chain((0..3).flat_map(move |i| (0..3).map(move |j| h.rot[(i, j)])))
}

fn run_rigid(config: &Config, path: &Path, dir: &Path, dt: f64, steps: usize) -> Result<Metadata> {
    let rigid = config.rigid.as_ref().expect("validated");
    let inertia = config.rigid_inertia().map_err(|m| CliError::config(path, m))?;
    let chi = Twist::new(Vec3::from(rigid.omega), Vec3::from(rigid.velocity));
    let mut state = RigidState::new(Pose::identity(), perturb(chi, &mut noise(config)));
    let e0 = state.energy(&inertia);

    let columns = rigid_columns();
    let mut out = CsvWriter::create(&dir.join(SERIES), &header(config, dt, steps, ""), &columns)?;
    let stride = config.output.stride;
    let mut samples = 0;
    for k in 0..=steps {
        if k > 0 {
            state = step_rk4(&state, &inertia, dt)?;
        }
        if k % stride == 0 {
            let e = state.energy(&inertia);
            let (nn, mn) = casimirs(&inertia.apply(&state.chi));
            let mut row = vec![k as f64 * dt];
            row.extend(state.chi.to_array());
            row.extend(pose_cells(&state.pose));
            row.extend([e, relative(e, e0), nn, mn]);
            row.extend(spatial_momentum(&state, &inertia).to_array());
            out.row(&row)?;
            samples += 1;
        }
    }
    out.finish()?;
    Ok(Metadata {
        tool: "geobeam".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind: Kind::Rigid,
        dt,
        steps,
        stride,
        samples,
        grid: None,
        series: SERIES.into(),
        fields: None,
        series_columns: columns,
        field_columns: None,
        config: config.clone(),
    })
}

fn relative(x: f64, x0: f64) -> f64 {
    if x0 != 0.0 {
        (x - x0) / x0.abs()
    } else {
        x - x0
    }
}

/// Initial beam velocity for the configured shape.
pub fn initial_beam(config: &Config, p: &BeamParams) -> Result<BeamState> {
    let amp = config.initial.amplitude;
    let mut noise = noise(config);
    let chi: Vec<Twist> = (0..p.n_s)
        .map(|i| {
            let x = p.s(i) / p.length;
            let base = match config.initial.shape {
                Shape::Rest => Twist::zero(),
                Shape::CantileverMode => {
                    let v = amp * 2.0 * PI * beam_cantilever_frequency(p);
                    let (y, dy) = cantilever_mode(x);
                    Twist::new(Vec3::new(0.0, 0.0, v * dy / p.length), Vec3::new(0.0, v * y, 0.0))
                }
                Shape::Bump => {
                    let b = amp * (PI * x).sin().powi(4);
                    Twist::new(Vec3::new(0.2, 0.3, 1.0) * b, Vec3::new(0.1, 1.0, 0.5) * b)
                }
            };
            perturb(base, &mut noise)
        })
        .collect();
    Ok(BeamState::with_velocity(p, chi)?)
}

/// `∫ π_s ds` by the trapezoidal rule.
pub fn total_momentum(state: &BeamState, p: &BeamParams) -> CoTwist {
    let (pi, _) = spatial_momenta(state, p);
    p.weights().iter().zip(&pi).fold(CoTwist::zero(), |acc, (w, x)| acc + *x * *w)
}

fn run_beam(config: &Config, path: &Path, dir: &Path, dt: f64, steps: usize) -> Result<Metadata> {
    let beam = config.beam.as_ref().expect("validated");
    let p = config.beam_params().map_err(|m| CliError::config(path, m))?;
    let mut state = initial_beam(config, &p)?;
    let (k0, u0) = energies(&state, &p);
    let e0 = k0 + u0;

    let extra = format!(" n_s={} ds={} bc={}", p.n_s, fmt(p.ds()), p.bc.name());
    let comments = header(config, dt, steps, &extra);
    let series_columns = beam_series_columns();
    let mut series = CsvWriter::create(&dir.join(SERIES), &comments, &series_columns)?;
    let field_columns = beam_field_columns();
    let mut fields = if config.output.fields {
        Some(CsvWriter::create(&dir.join(FIELDS), &comments, &field_columns)?)
    } else {
        None
    };

    let mut stepper = Stepper::new(&p, dt)?;
    let stride = config.output.stride;
    let mut samples = 0;
    for k in 0..=steps {
        if k > 0 {
            match beam.reconstruction {
                Reconstruction::Group => stepper.advance(&mut state)?,
                Reconstruction::Strain => stepper.advance_fields(&mut state)?,
            }
        }
        if k % stride != 0 {
            continue;
        }
        if beam.reconstruction == Reconstruction::Strain {
            state.rebuild_poses(&p);
        }
        let t = k as f64 * dt;
        let (kin, pot) = energies(&state, &p);
        let tip = state.tip();
        let mut row = vec![t, tip.x, tip.y, tip.z, kin, pot, relative(kin + pot, e0)];
        row.extend(total_momentum(&state, &p).to_array());
        series.row(&row)?;
        if let Some(out) = fields.as_mut() {
            for i in 0..p.n_s {
                let mut cells = vec![fmt(t), i.to_string(), fmt(p.s(i))];
                let values = state.eps[i].to_array().into_iter().chain(state.chi[i].to_array()).chain(pose_cells(&state.poses[i]));
                cells.extend(values.map(fmt));
                out.record(&cells)?;
            }
        }
        samples += 1;
    }
    series.finish()?;
    if let Some(out) = fields {
        out.finish()?;
    }
    Ok(Metadata {
        tool: "geobeam".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind: Kind::Beam,
        dt,
        steps,
        stride,
        samples,
        grid: Some(Grid { length: p.length, n_s: p.n_s, ds: p.ds(), bc: p.bc.name().into() }),
        series: SERIES.into(),
        fields: config.output.fields.then(|| FIELDS.to_string()),
        series_columns,
        field_columns: config.output.fields.then_some(field_columns),
        config: config.clone(),
    })
}

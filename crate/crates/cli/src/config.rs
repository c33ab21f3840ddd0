//! Scenario files.
//!
//! A scenario is a TOML document. Top-level keys select the model and the
//! time span; the `[output]`, `[rigid]`, `[beam]` and `[initial]` sections
//! hold the rest. Relative paths are resolved against the directory of the
//! scenario file. See `scenarios/` for annotated examples.

use std::path::{Path, PathBuf};

use geobeam::beam::{BeamParams, BoundaryCondition, Material, Section, CFL};
use geobeam::Metric6;
use nalgebra::Matrix6;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Rigid,
    Beam,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kind: Kind,
    /// Simulated time span (s).
    pub duration: f64,
    /// Time step (s). Beams default to `cfl · ds / c_max`, rigid bodies to 1e-3.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Courant number used when `dt` is not given (beams only).
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Seed for the optional initial perturbation.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub rigid: Option<RigidConfig>,
    #[serde(default)]
    pub beam: Option<BeamConfig>,
    #[serde(default)]
    pub initial: InitialConfig,
}

fn default_cfl() -> f64 {
    CFL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Keep every `stride`-th step.
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Also write the full fields (beams only).
    #[serde(default = "yes")]
    pub fields: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { stride: 1, dir: None, fields: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidConfig {
    /// Six diagonal entries or 36 entries in row-major order.
    pub inertia: Vec<f64>,
    pub omega: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reconstruction {
    /// Every pose is advanced on the group at every step.
    #[default]
    Group,
    /// Poses are integrated from the strain at output times only; needs a
    /// clamped end at `s = 0`.
    Strain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub length: f64,
    pub n_s: usize,
    #[serde(default = "default_bc")]
    pub bc: String,
    /// Material and solid circular section...
    #[serde(default)]
    pub young: Option<f64>,
    #[serde(default)]
    pub poisson: Option<f64>,
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub radius: Option<f64>,
    /// ...or explicit inertia and Hooke operators (6 diagonal or 36 entries).
    #[serde(default)]
    pub inertia: Option<Vec<f64>>,
    #[serde(default)]
    pub stiffness: Option<Vec<f64>>,
    #[serde(default)]
    pub reconstruction: Reconstruction,
}

fn default_bc() -> String {
    BoundaryCondition::default().name().to_string()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    #[default]
    Rest,
    /// Velocity in the first cantilever bending mode; `amplitude` is the
    /// resulting tip deflection (m).
    CantileverMode,
    /// Smooth `sin⁴(πs/L)` velocity bump mixing bending, torsion and
    /// stretching; `amplitude` scales the velocity.
    Bump,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub shape: Shape,
    #[serde(default)]
    pub amplitude: f64,
    /// Uniform noise of this size added to every velocity component.
    #[serde(default)]
    pub perturbation: f64,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(path, format!("cannot read file: {e}")))?;
        let config: Config = toml::from_str(&text).map_err(|e| CliError::config(path, e.to_string().trim_end()))?;
        config.validate().map_err(|m| CliError::config(path, m))?;
        Ok(config)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(format!("`duration` must be positive, got {}", self.duration));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(format!("`dt` must be positive, got {dt}"));
            }
            if dt > self.duration {
                return Err(format!("`dt` = {dt} exceeds `duration` = {}", self.duration));
            }
        }
        if !(self.cfl > 0.0 && self.cfl <= CFL) {
            return Err(format!("`cfl` must lie in (0, {CFL}], got {}", self.cfl));
        }
        if self.output.stride == 0 {
            return Err("`output.stride` must be at least 1".into());
        }
        if !(self.initial.perturbation >= 0.0 && self.initial.amplitude.is_finite()) {
            return Err("`initial.perturbation` must be non-negative and `initial.amplitude` finite".into());
        }
        match self.kind {
            Kind::Rigid => {
                let rigid = self.rigid.as_ref().ok_or("missing section `[rigid]` for kind = \"rigid\"")?;
                metric(&rigid.inertia, "rigid.inertia")?;
                if self.initial.shape != Shape::Rest {
                    return Err("`initial.shape` applies to beams only".into());
                }
            }
            Kind::Beam => {
                let beam = self.beam.as_ref().ok_or("missing section `[beam]` for kind = \"beam\"")?;
                let p = beam.params()?;
                if beam.reconstruction == Reconstruction::Strain
                    && p.bc.ends().0 != geobeam::beam::EndCondition::Clamped
                {
                    return Err("`beam.reconstruction = \"strain\"` needs a clamped end at s = 0".into());
                }
                if let Some(dt) = self.dt {
                    let bound = p.max_dt();
                    if dt > bound * (1.0 + 1e-12) {
                        return Err(format!("`dt` = {dt:e} exceeds the stability bound {bound:e}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Time step actually used.
    pub fn time_step(&self) -> std::result::Result<f64, String> {
        match (self.dt, self.kind) {
            (Some(dt), _) => Ok(dt),
            (None, Kind::Rigid) => Ok(1e-3),
            (None, Kind::Beam) => {
                let p = self.beam.as_ref().ok_or("missing section `[beam]`")?.params()?;
                Ok(self.cfl / CFL * p.max_dt())
            }
        }
    }

    pub fn steps(&self) -> std::result::Result<usize, String> {
        let dt = self.time_step()?;
        Ok(((self.duration / dt).round() as usize).max(1))
    }

    pub fn rigid_inertia(&self) -> std::result::Result<Metric6, String> {
        metric(&self.rigid.as_ref().ok_or("missing section `[rigid]`")?.inertia, "rigid.inertia")
    }

    pub fn beam_params(&self) -> std::result::Result<BeamParams, String> {
        self.beam.as_ref().ok_or("missing section `[beam]`")?.params()
    }
}

impl BeamConfig {
    pub fn boundary(&self) -> std::result::Result<BoundaryCondition, String> {
        self.bc.parse().map_err(|e: geobeam::Error| format!("`beam.bc`: {e}"))
    }

    pub fn params(&self) -> std::result::Result<BeamParams, String> {
        let bc = self.boundary()?;
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(format!("`beam.length` must be positive, got {}", self.length));
        }
        if self.n_s < 3 {
            return Err(format!("`beam.n_s` must be at least 3, got {}", self.n_s));
        }
        let material = [self.young, self.poisson, self.density, self.radius];
        let explicit = [&self.inertia, &self.stiffness];
        let result = match (material.iter().any(Option::is_some), explicit.iter().any(|x| x.is_some())) {
            (true, true) => {
                return Err("give either `young`/`poisson`/`density`/`radius` or `inertia`/`stiffness`, not both".into())
            }
            (true, false) => {
                let names = ["beam.young", "beam.poisson", "beam.density", "beam.radius"];
                let mut v = [0.0; 4];
                for k in 0..4 {
                    v[k] = material[k].ok_or_else(|| format!("missing field `{}`", names[k]))?;
                    if !(v[k].is_finite() && (v[k] > 0.0 || k == 1)) {
                        return Err(format!("`{}` must be positive, got {}", names[k], v[k]));
                    }
                }
                if !(-1.0 < v[1] && v[1] < 0.5) {
                    return Err(format!("`beam.poisson` must lie in (-1, 0.5), got {}", v[1]));
                }
                let m = Material { young: v[0], poisson: v[1], density: v[2] };
                BeamParams::from_section(self.length, self.n_s, &m, &Section::circular(v[3], v[1]), bc)
            }
            (false, true) => {
                let j = metric(self.inertia.as_ref().ok_or("missing field `beam.inertia`")?, "beam.inertia")?;
                let c = metric(self.stiffness.as_ref().ok_or("missing field `beam.stiffness`")?, "beam.stiffness")?;
                BeamParams::new(self.length, self.n_s, j, c, bc)
            }
            (false, false) => return Err("missing beam material (`young`, `poisson`, `density`, `radius`)".into()),
        };
        result.map_err(|e| format!("`beam`: {e}"))
    }
}

fn metric(values: &[f64], field: &str) -> std::result::Result<Metric6, String> {
    let m = match values.len() {
        6 => Matrix6::from_diagonal(&nalgebra::Vector6::from_column_slice(values)),
        36 => Matrix6::from_row_slice(values),
        n => return Err(format!("`{field}` needs 6 or 36 entries, got {n}")),
    };
    Metric6::new(m).map_err(|e| format!("`{field}`: {e}"))
}

/// Output directory: the command-line override, else `output.dir` relative
/// to the scenario file, else `out/<scenario name>`.
pub fn output_dir(config: &Config, config_path: &Path, cli_override: Option<&Path>) -> PathBuf {
    if let Some(dir) = cli_override {
        return dir.to_path_buf();
    }
    match &config.output.dir {
        Some(dir) if dir.is_absolute() => dir.clone(),
        Some(dir) => config_path.parent().unwrap_or(Path::new(".")).join(dir),
        None => {
            let stem = config_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
            PathBuf::from("out").join(stem)
        }
    }
}

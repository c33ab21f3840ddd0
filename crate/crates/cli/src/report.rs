//! `geobeam report`: recompute conservation diagnostics from a run directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use geobeam::beam::{conservation_residual, BeamParams, BeamState, BoundaryCondition};
use geobeam::covariant::{curvature, noether_relative_defect, ReducedSection};
use geobeam::liegroup::Mat3;
use geobeam::rigidbody::casimirs;
use geobeam::{CoTwist, Pose, Twist, Vec3};
use serde::{Deserialize, Serialize};

use crate::config::Kind;
use crate::error::{CliError, Result};
use crate::run::{Grid, Metadata};
use crate::table::Table;

pub const DIAGNOSTICS: &str = "diagnostics.json";

/// Relative energy drift allowed for a beam run.
pub const BEAM_ENERGY_TOL: f64 = 1e-6;
/// Relative spatial-momentum balance defect allowed for a free-free beam.
pub const BEAM_MOMENTUM_TOL: f64 = 1e-8;
pub const RIGID_ENERGY_TOL: f64 = 1e-8;
pub const RIGID_CASIMIR_TOL: f64 = 1e-9;
pub const RIGID_MOMENTUM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Reported without a threshold.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub threshold: Option<f64>,
    pub status: Status,
}

impl Check {
    fn against(value: f64, threshold: f64) -> Self {
        let status = if value < threshold { Status::Pass } else { Status::Fail };
        Self { value, threshold: Some(threshold), status }
    }

    fn info(value: f64) -> Self {
        Self { value, threshold: None, status: Status::Info }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    pub dt: f64,
    pub stride: usize,
    pub samples: usize,
    pub grid: Option<Grid>,
    pub checks: BTreeMap<String, Check>,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.status != Status::Fail)
    }
}

pub fn report(dir: &Path, out_dir: Option<&Path>, quiet: bool) -> Result<(Diagnostics, PathBuf)> {
    let meta = Metadata::read(dir)?;
    let series_path = dir.join(&meta.series);
    let series = Table::read(&series_path)?;
    if series.columns != meta.series_columns {
        return Err(CliError::format(&series_path, "header does not match the recorded columns"));
    }
    let checks = match meta.kind {
        Kind::Rigid => rigid_checks(&meta, &series, &series_path)?,
        Kind::Beam => beam_checks(&meta, &series, &series_path, dir)?,
    };
    let diagnostics = Diagnostics {
        tool: "geobeam".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind: meta.kind,
        dt: meta.dt,
        stride: meta.stride,
        samples: series.rows.len(),
        grid: meta.grid.clone(),
        checks,
    };
    let out_dir = out_dir.unwrap_or(dir);
    std::fs::create_dir_all(out_dir).map_err(CliError::io(format!("creating {}", out_dir.display())))?;
    let path = out_dir.join(DIAGNOSTICS);
    let json = serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize");
    std::fs::write(&path, json + "\n").map_err(CliError::io(format!("writing {}", path.display())))?;
    if !quiet {
        for (name, c) in &diagnostics.checks {
            eprintln!("{:<22} {:>12.3e}  {:?}", name, c.value, c.status);
        }
        eprintln!("{}: {}", if diagnostics.passed() { "all checks passed" } else { "some checks failed" }, path.display());
    }
    Ok((diagnostics, path))
}

fn max_abs_column(t: &Table, path: &Path, name: &str) -> Result<f64> {
    let c = t.column(path, name)?;
    Ok(t.rows.iter().map(|r| r[c].abs()).fold(0.0, f64::max))
}

fn six(row: &[f64], start: usize) -> [f64; 6] {
    std::array::from_fn(|k| row[start + k])
}

fn rigid_checks(meta: &Metadata, t: &Table, path: &Path) -> Result<BTreeMap<String, Check>> {
    let inertia = meta.config.rigid_inertia().map_err(|m| CliError::format(path, m))?;
    let mut checks = BTreeMap::new();
    checks.insert("energy_drift".into(), Check::against(max_abs_column(t, path, "energy_drift")?, RIGID_ENERGY_TOL));
    let Some(first) = t.rows.first() else {
        return Err(CliError::format(path, "no records"));
    };

    let chi0 = Twist::from_array(six(first, t.column(path, "chi_ang_x")?));
    let scale = inertia.apply(&chi0).to_vector().norm_squared().max(f64::MIN_POSITIVE);
    let (nn, mn) = (t.column(path, "casimir_nn")?, t.column(path, "casimir_mn")?);
    let casimir = t
        .rows
        .iter()
        .map(|r| (r[nn] - first[nn]).abs().max((r[mn] - first[mn]).abs()) / scale)
        .fold(0.0, f64::max);
    // cross-check the stored Casimirs against the stored velocity
    let (c_nn, c_mn) = casimirs(&inertia.apply(&chi0));
    if (c_nn - first[nn]).abs() > 1e-12 * scale.max(1.0) || (c_mn - first[mn]).abs() > 1e-12 * scale.max(1.0) {
        return Err(CliError::format(path, format!("record 1 (line {}): Casimirs inconsistent with velocity", t.lines[0])));
    }
    checks.insert("casimir_drift".into(), Check::against(casimir, RIGID_CASIMIR_TOL));

    let pi = t.column(path, "pi_s_ang_x")?;
    let pi0 = CoTwist::from_array(six(first, pi));
    let norm = pi0.amax().max(f64::MIN_POSITIVE);
    let defect =
        t.rows.iter().map(|r| (CoTwist::from_array(six(r, pi)) - pi0).amax() / norm).fold(0.0, f64::max);
    checks.insert("momentum_defect".into(), Check::against(defect, RIGID_MOMENTUM_TOL));
    Ok(checks)
}

fn beam_checks(meta: &Metadata, series: &Table, series_path: &Path, dir: &Path) -> Result<BTreeMap<String, Check>> {
    let p = meta.config.beam_params().map_err(|m| CliError::format(dir.join(crate::run::METADATA), m))?;
    let mut checks = BTreeMap::new();
    checks.insert(
        "energy_drift".into(),
        Check::against(max_abs_column(series, series_path, "energy_drift")?, BEAM_ENERGY_TOL),
    );
    let Some(fields) = &meta.fields else {
        return Ok(checks);
    };
    let path = dir.join(fields);
    let traj = read_fields(&path, &p)?;
    if traj.len() < 3 {
        return Ok(checks);
    }
    let defect = noether_relative_defect(&traj, &p)?;
    checks.insert(
        "momentum_defect".into(),
        if p.bc == BoundaryCondition::FreeFree { Check::against(defect, BEAM_MOMENTUM_TOL) } else { Check::info(defect) },
    );
    let k = curvature(&ReducedSection::from_trajectory(&traj, &p)?)?;
    let worst = k[1..k.len() - 1]
        .iter()
        .flat_map(|row| row[1..row.len() - 1].iter().map(Twist::amax))
        .fold(0.0, f64::max);
    checks.insert("curvature_residual".into(), Check::info(worst));
    checks.insert("conservation_residual".into(), Check::info(conservation_residual(&traj, &p)?));
    Ok(checks)
}

/// Rebuilds the sampled beam states from `fields.csv`.
pub fn read_fields(path: &Path, p: &BeamParams) -> Result<Vec<BeamState>> {
    let t = Table::read(path)?;
    let col = |name: &str| t.column(path, name);
    let (ct, cn, ce, cc, cr, crot) = (col("t")?, col("node")?, col("eps_ang_x")?, col("chi_ang_x")?, col("r_x")?, col("R_xx")?);
    let mut states = Vec::new();
    for (k, chunk) in t.rows.chunks(p.n_s).enumerate() {
        let first = k * p.n_s;
        let at = |i: usize| format!("record {} (line {})", first + i + 1, t.lines[first + i]);
        if chunk.len() < p.n_s {
            return Err(CliError::format(
                path,
                format!("{}: slice at t = {} ends after {} of {} nodes", at(chunk.len() - 1), chunk[0][ct], chunk.len(), p.n_s),
            ));
        }
        let mut s = BeamState { eps: vec![], chi: vec![], poses: vec![], t: chunk[0][ct] };
        for (i, row) in chunk.iter().enumerate() {
            if row[cn] != i as f64 || row[ct] != s.t {
                return Err(CliError::format(path, format!("{}: expected node {i} at t = {}", at(i), s.t)));
            }
            s.eps.push(Twist::from_array(six(row, ce)));
            s.chi.push(Twist::from_array(six(row, cc)));
            let rot = Mat3::from_row_slice(&row[crot..crot + 9]);
            let pose = Pose::try_new(rot, Vec3::new(row[cr], row[cr + 1], row[cr + 2]))
                .map_err(|e| CliError::format(path, format!("{}: {e}", at(i))))?;
            s.poses.push(pose);
        }
        states.push(s);
    }
    Ok(states)
}

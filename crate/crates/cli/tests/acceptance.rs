//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use geobeam::beam::{
    beam_rhs, compatibility_residual, conservation_residual, energies, motion_residual, simulate,
    strain_from_poses_centered, BeamParams, BeamState, BoundaryCondition, Material, Section, Stepper,
};
use geobeam::covariant::{covariant_motion_residual, curvature, noether_relative_defect, ReducedSection};
use geobeam::liegroup::{ad, ad_star, adjoint, coadjoint_transport, exp, hat, log, vee};
use geobeam::rigidbody::{casimirs, euler_poincare_rhs, spatial_momentum, step_rk4, RigidState};
use geobeam::{connection::geodesic_residual, CoTwist, Metric6, Pose, Twist, Vec3};
use nalgebra::Matrix6;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn twist(rng: &mut impl Rng, scale: f64) -> Twist {
    Twist::from_array(std::array::from_fn(|_| rng.gen_range(-scale..scale)))
}

fn cotwist(rng: &mut impl Rng, scale: f64) -> CoTwist {
    CoTwist::from_array(std::array::from_fn(|_| rng.gen_range(-scale..scale)))
}

fn pose(rng: &mut impl Rng) -> Pose {
    exp(&twist(rng, 1.5), 1.0)
}

fn spd(rng: &mut impl Rng) -> Metric6 {
    let a = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    Metric6::new(a * a.transpose() + Matrix6::identity() * 0.5).unwrap()
}

fn unit_params(n_s: usize, bc: BoundaryCondition) -> BeamParams {
    let j = Metric6::diagonal([0.02, 0.01, 0.01, 1.0, 1.0, 1.0]).unwrap();
    let c = Metric6::diagonal([0.015, 0.02, 0.02, 2.0, 0.8, 0.8]).unwrap();
    BeamParams::new(1.0, n_s, j, c, bc).unwrap()
}

/// Smooth velocity bump vanishing with its derivatives at both ends.
fn bump(p: &BeamParams, a: f64) -> BeamState {
    let chi = (0..p.n_s)
        .map(|i| {
            let s = p.s(i) / p.length;
            let b = a * (PI * s).sin().powi(4);
            Twist::new(Vec3::new(0.2, 0.3 * (2.0 * PI * s).sin(), (PI * s).cos()) * b, Vec3::new(0.1, (PI * s).cos(), 0.5) * b)
        })
        .collect();
    BeamState::with_velocity(p, chi).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 7];
    for _ in 0..2000 {
        let (x, y, z) = (twist(&mut rng, 1.0), twist(&mut rng, 1.0), twist(&mut rng, 1.0));
        let mu = cotwist(&mut rng, 1.0);
        let h = pose(&mut rng);
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let small = twist(&mut rng, 1.7);
        let errs = [
            (vee(&hat(&x)).unwrap() - x).amax(),
            (log(&exp(&small, 1.0)).unwrap() - small).amax(),
            (ad(&x, &y) + ad(&y, &x)).amax(),
            (ad(&(x * a + y * b), &z) - (ad(&x, &z) * a + ad(&y, &z) * b)).amax(),
            (ad(&x, &ad(&y, &z)) + ad(&y, &ad(&z, &x)) + ad(&z, &ad(&x, &y))).amax(),
            (ad_star(&x, &mu).pair(&y) - mu.pair(&ad(&x, &y))).abs(),
            (coadjoint_transport(&h, &mu).pair(&adjoint(&h, &x)) - mu.pair(&x)).abs(),
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    check(max < 1e-12, format!("2000 samples, worst {max:.2e} (hat/vee, exp/log, antisym, bilinear, Jacobi, ad*, Ad*)"))
}

fn geodesic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let j = spd(&mut rng);
        let chi = twist(&mut rng, 1.0);
        worst = worst.max(geodesic_residual(&chi, &euler_poincare_rhs(&chi, &j), &j).amax());
    }
    check(worst < 1e-12, format!("1000 random J, worst residual {worst:.2e}"))
}

fn rigid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let j = spd(&mut rng);
    let mut s = RigidState::new(Pose::identity(), twist(&mut rng, 1.0));
    let e0 = s.energy(&j);
    let (nn0, mn0) = casimirs(&j.apply(&s.chi));
    let scale = j.apply(&s.chi).norm().powi(2);
    let pi0 = spatial_momentum(&s, &j);
    let (mut de, mut dc, mut dp) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        s = step_rk4(&s, &j, 1e-3).map_err(|e| e.to_string())?;
        let (nn, mn) = casimirs(&j.apply(&s.chi));
        de = de.max(((s.energy(&j) - e0) / e0).abs());
        dc = dc.max((nn - nn0).abs().max((mn - mn0).abs()) / scale);
        dp = dp.max((spatial_momentum(&s, &j) - pi0).amax() / pi0.amax());
    }
    check(
        de < 1e-8 && dc < 1e-9 && dp < 1e-8,
        format!("energy {de:.2e}, Casimirs {dc:.2e}, spatial momentum {dp:.2e}"),
    )
}

fn equilibrium() -> Outcome {
    let mut rest_max = 0.0f64;
    for bc in [BoundaryCondition::ClampedFree, BoundaryCondition::FreeFree, BoundaryCondition::ClampedClamped] {
        let p = unit_params(65, bc);
        let (de, dc) = beam_rhs(&BeamState::at_rest(&p), &p).map_err(|e| e.to_string())?;
        rest_max = de.iter().chain(&dc).map(Twist::amax).fold(rest_max, f64::max);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = unit_params(65, BoundaryCondition::FreeFree);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let eps = p.eps0.iter().map(|e| *e + twist(&mut rng, 0.2)).collect();
        let chi = (0..65).map(|_| twist(&mut rng, 0.5)).collect();
        let s = BeamState::from_fields(&p, eps, chi, pose(&mut rng)).map_err(|e| e.to_string())?;
        let g = pose(&mut rng);
        let mut moved = s.clone();
        for h in &mut moved.poses {
            *h = g.compose(h);
        }
        let a = strain_from_poses_centered(&s.poses, p.ds()).unwrap();
        let b = strain_from_poses_centered(&moved.poses, p.ds()).unwrap();
        worst = a.iter().zip(&b).map(|(x, y)| (*x - *y).amax()).fold(worst, f64::max);
        let (e1, e2) = (energies(&s, &p), energies(&moved, &p));
        worst = worst.max((e1.0 - e2.0).abs()).max((e1.1 - e2.1).abs());
        let (r1, r2) = (beam_rhs(&s, &p).unwrap(), beam_rhs(&moved, &p).unwrap());
        worst = r1.0.iter().zip(&r2.0).chain(r1.1.iter().zip(&r2.1)).map(|(x, y)| (*x - *y).amax()).fold(worst, f64::max);
    }
    check(rest_max == 0.0 && worst < 1e-12, format!("rest rhs max {rest_max:e}, left-translation defect {worst:.2e}"))
}

fn energy() -> Outcome {
    let p = unit_params(129, BoundaryCondition::FreeFree);
    let dt = 0.25 * p.ds() / p.wave_speed();
    let mut s = bump(&p, 0.1);
    let (k0, u0) = energies(&s, &p);
    let mut stepper = Stepper::new(&p, dt).map_err(|e| e.to_string())?;
    let mut drift = 0.0f64;
    for _ in 0..1000 {
        stepper.advance(&mut s).map_err(|e| e.to_string())?;
        let (k, u) = energies(&s, &p);
        drift = drift.max(((k + u) - (k0 + u0)).abs() / (k0 + u0));
    }
    check(drift < 1e-6, format!("n_s = 129, 1000 steps, relative drift {drift:.2e}"))
}

fn convergence() -> Outcome {
    let residual = |n_s: usize| {
        let p = unit_params(n_s, BoundaryCondition::FreeFree);
        // dt halves together with ds
        let dt = 0.25 * 32.0 / (n_s - 1) as f64 * unit_params(33, BoundaryCondition::FreeFree).max_dt();
        let traj = simulate(bump(&p, 0.1), &p, dt, (0.3 / dt).round() as usize, 1).unwrap();
        conservation_residual(&traj, &p).unwrap()
    };
    let (coarse, fine) = (residual(65), residual(129));
    let ratio = coarse / fine;
    check(ratio >= 3.2, format!("residual {coarse:.3e} -> {fine:.3e}, ratio {ratio:.2}"))
}

fn covariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = unit_params(17, BoundaryCondition::FreeFree);
    let traj: Vec<BeamState> = (0..6)
        .map(|k| {
            let eps = p.eps0.iter().map(|e| *e + twist(&mut rng, 0.3)).collect();
            let chi = (0..p.n_s).map(|_| twist(&mut rng, 0.5)).collect();
            let mut s = BeamState::from_fields(&p, eps, chi, Pose::identity()).unwrap();
            s.t = 0.01 * k as f64;
            s
        })
        .collect();
    let section = ReducedSection::from_trajectory(&traj, &p).map_err(|e| e.to_string())?;
    let k = curvature(&section).map_err(|e| e.to_string())?;
    let m = covariant_motion_residual(&section, &p.inertia, &p.stiffness, &p.eps0[0]).map_err(|e| e.to_string())?;
    let (mut dk, mut dm) = (0.0f64, 0.0f64);
    for n in 1..traj.len() - 1 {
        let c = compatibility_residual(&traj, n, &p).unwrap();
        let r = motion_residual(&traj, n, &p).unwrap();
        dk = (1..p.n_s - 1).map(|i| (k[n][i] - c[i]).amax()).fold(dk, f64::max);
        dm = (2..p.n_s - 2).map(|i| (m[n][i] - r[i]).amax()).fold(dm, f64::max);
    }

    let p = unit_params(129, BoundaryCondition::FreeFree);
    let traj = simulate(bump(&p, 1e-3), &p, 0.5 * p.max_dt(), 400, 1).map_err(|e| e.to_string())?;
    let noether = noether_relative_defect(&traj, &p).map_err(|e| e.to_string())?;
    check(
        dk < 1e-13 && dm < 1e-12 && noether < 1e-8,
        format!("curvature {dk:.2e}, motion {dm:.2e}, Noether relative defect {noether:.2e}"),
    )
}

fn frequency() -> Outcome {
    let (young, density, radius, length) = (2e11, 7800.0, 0.02, 1.0);
    let m = Material { young, poisson: 0.3, density };
    let sec = Section::circular(radius, 0.3);
    let p = BeamParams::from_section(length, 129, &m, &sec, BoundaryCondition::ClampedFree).unwrap();
    let area = PI * radius * radius;
    let second_moment = PI * radius.powi(4) / 4.0;
    let f1 = 1.875_104_068_711_961f64.powi(2) / (2.0 * PI) * (young * second_moment / (density * area * length.powi(4))).sqrt();

    let v = 1e-4 * 2.0 * PI * f1;
    let chi = (0..p.n_s)
        .map(|i| {
            let (y, dy) = geobeam::analysis::cantilever_mode(p.s(i) / length);
            Twist::new(Vec3::new(0.0, 0.0, v * dy / length), Vec3::new(0.0, v * y, 0.0))
        })
        .collect();
    let mut s = BeamState::with_velocity(&p, chi).unwrap();
    let dt = p.max_dt();
    let mut stepper = Stepper::new(&p, dt).map_err(|e| e.to_string())?;
    let steps = (20.5 / f1 / dt).ceil() as usize;
    let stride = 50;
    let mut tip = Vec::with_capacity(steps / stride + 1);
    for k in 0..steps {
        if k % stride == 0 {
            s.rebuild_poses(&p);
            tip.push(s.tip().y);
        }
        stepper.advance_fields(&mut s).map_err(|e| e.to_string())?;
    }
    let f = geobeam::analysis::dominant_frequency(&tip, dt * stride as f64).map_err(|e| e.to_string())?;
    let rel = (f - f1).abs() / f1;
    check(rel < 0.02, format!("f1 = {f1:.4} Hz, measured {f:.4} Hz, error {:.3}% over 20 periods", 100.0 * rel))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("pluck.toml");
    std::fs::write(
        &config,
        "kind = \"beam\"\nduration = 0.05\nseed = 11\n[output]\nstride = 10\n\
         [beam]\nlength = 1.0\nn_s = 33\nbc = \"free-free\"\n\
         inertia = [0.02, 0.01, 0.01, 1.0, 1.0, 1.0]\nstiffness = [0.015, 0.02, 0.02, 2.0, 0.8, 0.8]\n\
         [initial]\nshape = \"bump\"\namplitude = 0.1\nperturbation = 1e-4\n",
    )
    .map_err(|e| e.to_string())?;
    let run = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_geobeam"))
            .args(["--quiet", "--output-dir"])
            .arg(out)
            .arg("run")
            .arg(&config)
            .status()
            .map_err(|e| e.to_string())?;
        if status.success() {
            Ok(())
        } else {
            Err(format!("geobeam run exited with {status}"))
        }
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&a)?;
    run(&b)?;
    for file in ["series.csv", "fields.csv", "metadata.json"] {
        let (x, y) = (std::fs::read(a.join(file)), std::fs::read(b.join(file)));
        match (x, y) {
            (Ok(x), Ok(y)) if x == y => {}
            _ => return Err(format!("{file} differs between runs")),
        }
    }
    Ok("series.csv, fields.csv and metadata.json bit-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("algebra suite", algebra, 5),
        ("geodesic correspondence", geodesic, 5),
        ("rigid-body conservation", rigid, 10),
        ("beam equilibrium and objectivity", equilibrium, 5),
        ("beam energy conservation", energy, 60),
        ("conservation-law convergence", convergence, 120),
        ("covariant equivalence", covariant, 30),
        ("linear-limit frequency", frequency, 120),
        ("CLI determinism", determinism, 60),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs(budget);
        let (tag, detail) = match &outcome {
            Ok(d) if !slow => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; took longer than {budget} s")),
            Err(d) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] {}. {name}: {detail} ({:.2} s)", k + 1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

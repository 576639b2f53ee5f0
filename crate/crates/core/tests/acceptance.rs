//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use zigzag_core::dynamics::rng::{stream_rng, StreamRng};
use zigzag_core::dynamics::{weyl_velocity, zigzag_jump_rate, Branch, WeylGuidance};
use zigzag_core::ensemble::{equivariance_checkpoints, h_curve, CellRule, DeterministicMover, EnsembleDynamics, Grid};
use zigzag_core::io::{read_columns, read_trajectory};
use zigzag_core::multiparticle::{
    spin_array_speed_defect, spin_array_velocities, two_weyl_velocities, TwoWeylWavefunction,
};
use zigzag_core::presets::{three_mode_cell, three_mode_octant, three_mode_weyl, three_mode_zigzag};
use zigzag_core::run::run_scenario;
use zigzag_core::scenario::{preset, Scenario};
use zigzag_core::spinor::{minkowski_norm, weyl_current, Handedness, Mat2, ThreeMomentum, Vec3, WeylSpinor};
use zigzag_core::states::{
    dirac_residual, make_zigzag_state, zigzag_coefficients, EnergySign, Mode, WeylWavefunction, ZigzagState,
};

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

fn gauss(rng: &mut StreamRng) -> f64 {
    // Box-Muller; only used to spread test inputs
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn complex(rng: &mut StreamRng) -> Complex64 {
    Complex64::new(gauss(rng), gauss(rng))
}

fn momentum(rng: &mut StreamRng, scale: f64) -> ThreeMomentum {
    loop {
        let p = Vec3::new(gauss(rng), gauss(rng), gauss(rng)) * scale;
        if p.norm() > 1e-3 {
            return ThreeMomentum::from(p);
        }
    }
}

fn point(rng: &mut StreamRng, half: f64) -> Vec3 {
    Vec3::new(rng.random_range(-half..half), rng.random_range(-half..half), rng.random_range(-half..half))
}

fn random_weyl(rng: &mut StreamRng, chi: Handedness) -> WeylWavefunction {
    let n = rng.random_range(1..=6);
    let modes = (0..n)
        .map(|_| {
            let sign = if rng.random_bool(0.3) { EnergySign::Negative } else { EnergySign::Positive };
            Mode::new(momentum(rng, 2.0), complex(rng), sign, chi)
        })
        .collect();
    WeylWavefunction::new(modes).unwrap()
}

fn random_zigzag(rng: &mut StreamRng) -> ZigzagState {
    let n = rng.random_range(1..=5);
    let terms: Vec<_> = (0..n).map(|_| (momentum(rng, 1.5), complex(rng))).collect();
    make_zigzag_state(rng.random_range(0.5..20.0), &terms).unwrap()
}

fn run_preset(name: &str, overrides: &[&str], dir: &Path) -> Result<Scenario, String> {
    let base = preset(name).map_err(|e| e.to_string())?;
    let set: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    let s = Scenario::parse_with_overrides(&base.emit(), &set).map_err(|e| e.to_string())?;
    run_scenario(&s, dir).map_err(|e| e.to_string())?;
    Ok(s)
}

fn luminality() -> Check {
    let mut rng = stream_rng(1, 0);
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    for k in 0..20 {
        let chi = if k % 2 == 0 { Handedness::R } else { Handedness::L };
        let wf = random_weyl(&mut rng, chi);
        for _ in 0..500 {
            let t = rng.random_range(-10.0..10.0);
            let v = weyl_velocity(&wf.evaluate(t, &point(&mut rng, 10.0)), chi).map_err(|e| e.to_string())?;
            worst = worst.max((v.norm() - 1.0).abs());
            evaluated += 1;
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_preset("fig8", &[], dir.path())?;
    let rows = read_trajectory(&dir.path().join("fig8_zigzag_0.dat")).map_err(|e| e.to_string())?;
    let worst_row = rows.iter().map(|s| (s.speed - 1.0).abs()).fold(0.0, f64::max);
    Ok((
        evaluated == 10_000 && worst < 1e-12 && worst_row < 1e-9,
        format!("max ||v|-1| = {worst:.2e} over {evaluated} points (tol 1e-12); fig8 rows {worst_row:.2e} over {} (tol 1e-9)", rows.len()),
    ))
}

fn light_like_currents() -> Check {
    let mut rng = stream_rng(2, 0);
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let psi = WeylSpinor::new(complex(&mut rng), complex(&mut rng));
        let chi = if k % 2 == 0 { Handedness::R } else { Handedness::L };
        worst = worst.max(minkowski_norm(&weyl_current(&psi, chi)).abs());
    }
    Ok((worst < 1e-12, format!("max |j·j| = {worst:.2e} over 10^4 spinors (tol 1e-12)")))
}

fn zigzag_coefficient_check() -> Check {
    let mut rng = stream_rng(3, 0);
    let mut norm_err: f64 = 0.0;
    let mut eig_err: f64 = 0.0;
    let mut vec_err: f64 = 0.0;
    for _ in 0..1000 {
        let p = 10f64.powf(rng.random_range(-3.0..3.0));
        let m = 10f64.powf(rng.random_range(-3.0..3.0));
        let c = zigzag_coefficients(p, m).map_err(|e| e.to_string())?;
        norm_err = norm_err.max((c.n_c * c.n_c + c.n_zeta * c.n_zeta - 1.0).abs());
        let eig = SymmetricEigen::new(Matrix2::new(p, m, m, -p));
        let (hi, lo) = if eig.eigenvalues[0] > eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let scale = p.hypot(m);
        eig_err = eig_err
            .max((eig.eigenvalues[hi] - c.energy).abs() / scale)
            .max((eig.eigenvalues[lo] + c.energy).abs() / scale);
        let v = eig.eigenvectors.column(hi);
        vec_err = vec_err.max((v[0] * c.n_zeta - v[1] * c.n_c).abs());
    }
    Ok((
        norm_err < 1e-12 && eig_err < 1e-12 && vec_err < 1e-12,
        format!("normalization {norm_err:.2e}, eigenvalues {eig_err:.2e}, eigenvector {vec_err:.2e} over 10^3 (p, m) (tol 1e-12)"),
    ))
}

fn dirac_residual_order() -> Check {
    let mut rng = stream_rng(4, 0);
    let mut worst: f64 = 0.0;
    let mut swapped_min = f64::INFINITY;
    let mut swapped_order: f64 = 0.0;
    let mut states = vec![three_mode_zigzag()];
    states.extend((0..19).map(|_| random_zigzag(&mut rng)));
    for z in &states {
        let swapped = z.with_swapped_coefficients();
        for _ in 0..5 {
            let t = rng.random_range(-3.0..3.0);
            let x = point(&mut rng, 3.0);
            let scale = z.evaluate(t, &x).norm();
            let r = |h| dirac_residual(z, z.mass(), t, &x, h).map_err(|e| e.to_string());
            let order = (r(1e-2)? / r(5e-3)?).log2();
            worst = worst.max((order - 2.0).abs());
            let s = |h| dirac_residual(&swapped, z.mass(), t, &x, h).map_err(|e| e.to_string());
            let (s1, s2) = (s(1e-2)?, s(5e-3)?);
            swapped_min = swapped_min.min(s2 / scale);
            swapped_order = swapped_order.max((s1 / s2).log2().abs());
        }
    }
    Ok((
        worst <= 0.1 && swapped_min > 0.1 && swapped_order < 0.1,
        format!(
            "order within 2 ± {worst:.3} over 100 points (tol 0.1); swapped labeling residual ≥ {swapped_min:.3}·|Ψ|, order {swapped_order:.1e}"
        ),
    ))
}

fn zero_rate_eigenstate() -> Check {
    let start = Instant::now();
    let mut rng = stream_rng(5, 0);
    let mut nonzero = 0;
    for _ in 0..100 {
        let z = make_zigzag_state(rng.random_range(0.1..50.0), &[(momentum(&mut rng, 3.0), complex(&mut rng))])
            .map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let t = rng.random_range(-20.0..20.0);
            let x = point(&mut rng, 20.0);
            for b in [Branch::Zig, Branch::Zag] {
                if zigzag_jump_rate(&z, t, &x, b).map_err(|e| e.to_string())? != 0.0 {
                    nonzero += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((nonzero == 0 && secs < 1.0, format!("{nonzero} nonzero rates in 2·10^4 evaluations, {secs:.3} s (limit 1 s)")))
}

fn gaussian_limit() -> Check {
    // |φ|² ∝ exp(-z²/2σ²): momentum amplitudes exp(-(p-p0)²/4δ²), δ = 1/2σ
    let (m, p0, width, modes) = (1000.0, 20.0, 1.0, 2001usize);
    let dp = 1.0 / (2.0 * width);
    let span = 8.0 * dp;
    let step = 2.0 * span / (modes - 1) as f64;
    let terms: Vec<_> = (0..modes)
        .map(|k| {
            let p = p0 - span + k as f64 * step;
            (ThreeMomentum::new(0.0, 0.0, p), Complex64::new((-(p - p0).powi(2) / (4.0 * dp * dp)).exp(), 0.0))
        })
        .collect();
    let z = make_zigzag_state(m, &terms).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut ratio = 0.0;
    for k in 0..=18 {
        let zk = (0.2 + 0.1 * k as f64) * width;
        let x = Vec3::new(0.0, 0.0, zk);
        let rate = zigzag_jump_rate(&z, 0.0, &x, Branch::Zig).map_err(|e| e.to_string())?
            + zigzag_jump_rate(&z, 0.0, &x, Branch::Zag).map_err(|e| e.to_string())?;
        let expected = zk / (4.0 * width * width);
        let err = (rate - expected).abs() / expected;
        if err > worst {
            worst = err;
            ratio = rate / expected;
        }
    }
    Ok((
        worst <= 0.1,
        format!("max relative error {worst:.3} against z/(4σ²) on z ∈ [0.2σ, 2σ] (tol 0.1); rate/expected = {ratio:.3}, p0/m = {}", p0 / m),
    ))
}

fn equivariance() -> Check {
    let s = preset("equivariance").map_err(|e| e.to_string())?;
    let nu = &s.numerics;
    let wf = three_mode_weyl();
    let dynamics = EnsembleDynamics::Weyl(&wf);
    let cell = three_mode_cell();
    let grid = Grid::new(cell, nu.cell_size.unwrap()).map_err(|e| e.to_string())?;
    let frame = dynamics.equilibrium_frame(nu.t0, &cell, nu.n.unwrap(), nu.seed).map_err(|e| e.to_string())?;
    let (reports, _) =
        equivariance_checkpoints(&dynamics, &frame, &grid, &nu.checkpoints, nu.dt, nu.seed, nu.bootstrap)
            .map_err(|e| e.to_string())?;
    let ok = reports.iter().all(|r| r.l1 <= 2.0 * r.floor && r.h.corrected.abs() < 0.01 && r.h.raw < 0.01);
    let last = reports.last().unwrap();
    let detail: Vec<String> = reports
        .iter()
        .map(|r| format!("t={}: L1/floor {:.2}, H {:.1e} (raw {:.1e})", r.t, r.l1 / r.floor, r.h.corrected, r.h.raw))
        .collect();
    Ok((
        ok,
        format!(
            "n = {}, ε = {}, {} excluded; {} (tol L1 ≤ 2 floor, H < 0.01)",
            frame.len(),
            grid.cell_size,
            last.excluded,
            detail.join("; ")
        ),
    ))
}

fn zigzag_equivariance() -> Check {
    let s = preset("zigzag-equivariance").map_err(|e| e.to_string())?;
    let nu = &s.numerics;
    let z = three_mode_zigzag();
    let dynamics = EnsembleDynamics::Zigzag(&z);
    let cell = three_mode_cell();
    let grid = Grid::new(cell, nu.cell_size.unwrap()).map_err(|e| e.to_string())?;
    let frame = dynamics.equilibrium_frame(nu.t0, &cell, nu.n.unwrap(), nu.seed).map_err(|e| e.to_string())?;
    let (reports, _) =
        equivariance_checkpoints(&dynamics, &frame, &grid, &nu.checkpoints, nu.dt, nu.seed, nu.bootstrap)
            .map_err(|e| e.to_string())?;
    let last = reports.last().unwrap();
    let ok =
        last.l1 <= 3.0 * last.floor && last.branches.len() == 2 && last.branches.iter().all(|b| b.l1 <= 3.0 * b.floor);
    let per_branch: Vec<String> =
        last.branches.iter().map(|b| format!("{} ({}) {:.2}", b.branch, b.count, b.l1 / b.floor)).collect();
    Ok((
        ok,
        format!(
            "n = {}, t = {}: L1/floor {:.2}, per branch {} (tol 3)",
            frame.len(),
            last.t,
            last.l1 / last.floor,
            per_branch.join(", ")
        ),
    ))
}

fn relaxation() -> Check {
    let s = preset("relaxation").map_err(|e| e.to_string())?;
    let nu = &s.numerics;
    let wf = three_mode_weyl();
    let grid = Grid::new(three_mode_cell(), nu.cell_size.unwrap()).map_err(|e| e.to_string())?;
    let frame = EnsembleDynamics::Weyl(&wf)
        .equilibrium_frame(nu.t0, &three_mode_octant(), nu.n.unwrap(), nu.seed)
        .map_err(|e| e.to_string())?;
    let mover = DeterministicMover { field: &WeylGuidance(&wf), dt: nu.dt };
    let (curve, _) =
        h_curve(&mover, &frame, &grid, &wf, &s.checkpoints(), CellRule::MidpointCorners, nu.seed, nu.bootstrap)
            .map_err(|e| e.to_string())?;
    let violations = curve.increases_beyond(2.0);
    let values: Vec<String> = curve.points.iter().map(|p| format!("{:.3}", p.h.corrected)).collect();
    Ok((
        violations.len() <= 1 && curve.points.len() == 11,
        format!("H = [{}], {} rises beyond 2 combined std (allowed 1)", values.join(", "), violations.len()),
    ))
}

fn two_particle() -> Check {
    let mut rng = stream_rng(10, 0);
    let mut worst_identity: f64 = 0.0;
    for _ in 0..10_000 {
        let m: Mat2 = Matrix2::new(complex(&mut rng), complex(&mut rng), complex(&mut rng), complex(&mut rng));
        let (v1, _) = spin_array_velocities(&m).map_err(|e| e.to_string())?;
        let closed = spin_array_speed_defect(&m).map_err(|e| e.to_string())?;
        worst_identity = worst_identity.max((closed - (1.0 - v1.norm_squared())).abs());
    }
    let mut worst_product: f64 = 0.0;
    for _ in 0..20 {
        let a = random_weyl(&mut rng, Handedness::R);
        let b = random_weyl(&mut rng, Handedness::R);
        let wf = TwoWeylWavefunction::product(a, b).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let t = rng.random_range(-5.0..5.0);
            let (v1, v2) =
                two_weyl_velocities(&wf, t, &point(&mut rng, 5.0), &point(&mut rng, 5.0)).map_err(|e| e.to_string())?;
            worst_product = worst_product.max((v1.norm() - 1.0).abs()).max((v2.norm() - 1.0).abs());
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_preset("two-particle", &[], dir.path())?;
    let (header, rows) = read_columns(&dir.path().join("two-particle_speed.dat")).map_err(|e| e.to_string())?;
    let columns = header.iter().find_map(|h| h.strip_prefix("columns: ")).ok_or("no column header")?;
    let col = columns.split_whitespace().position(|c| c == "defect").ok_or("no defect column")?;
    let max_defect = rows.iter().map(|r| r[col].parse::<f64>().unwrap_or(f64::NAN)).fold(0.0, f64::max);
    Ok((
        worst_identity < 1e-10 && worst_product < 1e-12 && max_defect > 0.1,
        format!(
            "identity {worst_identity:.2e} over 10^4 arrays (tol 1e-10); products {worst_product:.2e} (tol 1e-12); max antisymmetrized defect {max_defect:.3} over {} points (need > 0.1)",
            rows.len()
        ),
    ))
}

fn determinism() -> Check {
    let runs: [(&str, &[&str]); 5] = [
        ("fig1", &["numerics.t1=5.0"]),
        ("fig8", &["numerics.seed=42"]),
        ("zigzag-equivariance", &["numerics.n=2000", "numerics.seed=7"]),
        ("relaxation", &["numerics.n=2000", "numerics.checkpoints=[0.0, 5.0]"]),
        ("two-particle", &[]),
    ];
    let mut compared = 0;
    let mut differing = Vec::new();
    for (name, set) in runs {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        run_preset(name, set, a.path())?;
        run_preset(name, set, b.path())?;
        let mut files: Vec<_> =
            std::fs::read_dir(a.path()).map_err(|e| e.to_string())?.flatten().map(|e| e.file_name()).collect();
        files.sort();
        for f in files {
            compared += 1;
            let x = std::fs::read(a.path().join(&f)).map_err(|e| e.to_string())?;
            let y = std::fs::read(b.path().join(&f)).map_err(|e| e.to_string())?;
            if x != y {
                differing.push(f.to_string_lossy().into_owned());
            }
        }
    }
    Ok((differing.is_empty(), format!("{compared} files compared over 5 scenarios, differing: {differing:?}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("luminality", luminality),
        ("light-like currents", light_like_currents),
        ("zig-zag coefficients", zigzag_coefficient_check),
        ("Dirac residual order", dirac_residual_order),
        ("zero-rate eigenstate", zero_rate_eigenstate),
        ("Gaussian-limit rate", gaussian_limit),
        ("equivariance", equivariance),
        ("zig-zag equivariance", zigzag_equivariance),
        ("relaxation trend", relaxation),
        ("two-particle identity", two_particle),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!("[{}] {name}: {detail} [{:.1} s]", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Executes a validated [`Scenario`] and writes its output files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::rng::stream_rng;
use crate::dynamics::{
    integrate_deterministic, simulate_zigzag_with_rng, Branch, DiracGuidance, DynamicsError, JumpEvent, Trajectory,
    WeylGuidance,
};
use crate::ensemble::{
    equivariance_checkpoints, h_curve, BoxRegion, CellRule, DeterministicMover, EnsembleDynamics, EnsembleError,
    EnsembleFrame, Grid,
};
use crate::io::{self, IoError};
use crate::multiparticle::{antisymmetrize, two_weyl_velocities, TwoParticleError};
use crate::scenario::{BoxSpec, Scenario, ScenarioError, ScenarioKind};
use crate::spinor::{ThreeMomentum, Vec3};
use crate::states::{make_zigzag_state, Mode, StateError, WeylWavefunction, ZigzagState};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Invalid(#[from] ScenarioError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    TwoParticle(#[from] TwoParticleError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl RunError {
    /// 1 for configuration problems, 2 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) | RunError::State(_) => 1,
            _ => 2,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub excluded: usize,
}

fn mode_amplitude(a: [f64; 2]) -> Complex64 {
    Complex64::from_polar(a[0], a[1])
}

pub fn weyl_state(s: &Scenario) -> Result<WeylWavefunction, StateError> {
    let modes = s
        .state
        .modes
        .iter()
        .map(|m| Mode::new(ThreeMomentum::from(m.p), mode_amplitude(m.amplitude), m.energy, s.state.handedness))
        .collect();
    WeylWavefunction::new(modes)
}

pub fn zigzag_state(s: &Scenario) -> Result<ZigzagState, StateError> {
    let terms: Vec<_> = s.state.modes.iter().map(|m| (ThreeMomentum::from(m.p), mode_amplitude(m.amplitude))).collect();
    make_zigzag_state(s.state.mass.unwrap_or(0.0), &terms)
}

fn region(b: &BoxSpec) -> Result<BoxRegion, EnsembleError> {
    let (lo, hi) = (Vec3::from(b.lo), Vec3::from(b.hi));
    if b.periodic {
        BoxRegion::periodic(lo, hi)
    } else {
        BoxRegion::new(lo, hi)
    }
}

struct Writer<'a> {
    dir: &'a Path,
    meta: String,
    report: RunReport,
}

impl Writer<'_> {
    fn put(&mut self, file: String, text: String) -> Result<(), IoError> {
        let path = self.dir.join(file);
        io::write_text(&path, &text)?;
        self.report.files.push(path);
        Ok(())
    }
}

fn branch_at_start(state: &ZigzagState, t: f64, x: &Vec3, fixed: Option<Branch>, rng: &mut impl Rng) -> Branch {
    let u: f64 = rng.random();
    fixed.unwrap_or_else(|| {
        let psi = state.evaluate(t, x);
        if u < psi.right.norm_sqr() / psi.density() {
            Branch::Zag
        } else {
            Branch::Zig
        }
    })
}

fn run_trajectories(s: &Scenario, w: &mut Writer) -> Result<(), RunError> {
    let nu = &s.numerics;
    let starts: Vec<Vec3> = s.initial.positions.iter().map(|&p| Vec3::from(p)).collect();
    let name = &s.name;
    match s.kind {
        ScenarioKind::WeylTrajectories => {
            let wf = weyl_state(s)?;
            let runs: Result<Vec<Trajectory>, DynamicsError> = starts
                .par_iter()
                .map(|x0| integrate_deterministic(&WeylGuidance(&wf), *x0, nu.t0, nu.t1, nu.dt))
                .collect();
            for (k, tr) in runs?.iter().enumerate() {
                w.put(format!("{name}_traj_{k}.dat"), io::format_trajectory(&w.meta, &tr.samples))?;
            }
        }
        ScenarioKind::ZigzagSingle | ScenarioKind::ZigzagVsDirac => {
            let state = zigzag_state(s)?;
            type Run = (Trajectory, Vec<JumpEvent>, Option<Trajectory>);
            let runs: Result<Vec<Run>, DynamicsError> = starts
                .par_iter()
                .enumerate()
                .map(|(k, x0)| {
                    let mut rng = stream_rng(nu.seed, k as u64);
                    let b0 = branch_at_start(&state, nu.t0, x0, s.initial.branch, &mut rng);
                    let (tr, jumps) = simulate_zigzag_with_rng(&state, *x0, b0, nu.t0, nu.t1, nu.dt, &mut rng)?;
                    let dirac = if s.kind == ScenarioKind::ZigzagVsDirac {
                        Some(integrate_deterministic(&DiracGuidance(&state), *x0, nu.t0, nu.t1, nu.dt)?)
                    } else {
                        None
                    };
                    Ok((tr, jumps, dirac))
                })
                .collect();
            for (k, (tr, jumps, dirac)) in runs?.into_iter().enumerate() {
                for warning in &tr.meta.warnings {
                    w.report.warnings.push(format!("start {k}: {warning}"));
                }
                w.put(format!("{name}_zigzag_{k}.dat"), io::format_trajectory(&w.meta, &tr.samples))?;
                w.put(format!("{name}_jumps_{k}.dat"), io::format_jumps(&w.meta, &jumps))?;
                if let Some(d) = dirac {
                    w.put(format!("{name}_dirac_{k}.dat"), io::format_trajectory(&w.meta, &d.samples))?;
                }
            }
        }
        _ => unreachable!("trajectory kinds only"),
    }
    Ok(())
}

fn ensemble_setup(s: &Scenario) -> Result<(Grid, BoxRegion), RunError> {
    let boxed = region(s.initial.region.as_ref().expect("validated"))?;
    let grid = Grid::new(boxed, s.numerics.cell_size.expect("validated"))?;
    let start = match &s.initial.start_region {
        Some(b) => region(b)?,
        None => boxed,
    };
    Ok((grid, start))
}

fn frame_files(w: &mut Writer, name: &str, frames: &[(usize, &EnsembleFrame)]) -> Result<(), RunError> {
    for (k, f) in frames {
        w.put(format!("{name}_frame_{k}.dat"), io::format_frame(&w.meta, f))?;
    }
    Ok(())
}

fn run_ensemble(s: &Scenario, w: &mut Writer) -> Result<(), RunError> {
    let nu = &s.numerics;
    let name = &s.name;
    let (grid, start) = ensemble_setup(s)?;
    let checkpoints = s.checkpoints();
    let n = nu.n.expect("validated");
    let (weyl, zigzag) = if s.is_zigzag() { (None, Some(zigzag_state(s)?)) } else { (Some(weyl_state(s)?), None) };
    let dynamics = match (&weyl, &zigzag) {
        (Some(wf), _) => EnsembleDynamics::Weyl(wf),
        (_, Some(z)) => EnsembleDynamics::Zigzag(z),
        _ => unreachable!(),
    };
    let frame0 = dynamics.equilibrium_frame(nu.t0, &start, n, nu.seed)?;

    if s.kind == ScenarioKind::EnsembleRelaxation {
        let wf = weyl.as_ref().ok_or_else(|| ScenarioError::Invalid {
            key: "state.mass".into(),
            constraint: "relaxation runs use Weyl states".into(),
        })?;
        let mover = DeterministicMover { field: &WeylGuidance(wf), dt: nu.dt };
        let (curve, last) =
            h_curve(&mover, &frame0, &grid, wf, &checkpoints, CellRule::MidpointCorners, nu.seed, nu.bootstrap)?;
        w.report.excluded = last.excluded;
        w.put(format!("{name}_h.dat"), io::format_h_curve(&w.meta, &curve))?;
        let rows: Vec<Vec<f64>> = curve.points.iter().map(|p| vec![p.t, p.h.corrected, p.h.raw, p.std]).collect();
        w.put(format!("{name}_h_detail.dat"), io::format_table(&w.meta, "t H H_raw H_std", &rows))?;
        frame_files(w, name, &[(0, &frame0), (checkpoints.len() - 1, &last)])?;
        return Ok(());
    }

    let (reports, frames) =
        equivariance_checkpoints(&dynamics, &frame0, &grid, &checkpoints, nu.dt, nu.seed, nu.bootstrap)?;
    w.report.excluded = frames.last().map_or(0, |f| f.excluded);
    let curve = crate::ensemble::HCurve {
        points: reports.iter().map(|r| crate::ensemble::HPoint { t: r.t, h: r.h, std: r.h_std }).collect(),
    };
    w.put(format!("{name}_h.dat"), io::format_h_curve(&w.meta, &curve))?;
    let (columns, rows): (&str, Vec<Vec<f64>>) = if s.is_zigzag() {
        (
            "t L1 floor L1_zig floor_zig L1_zag floor_zag",
            reports
                .iter()
                .map(|r| {
                    let mut row = vec![r.t, r.l1, r.floor];
                    for b in &r.branches {
                        row.extend([b.l1, b.floor]);
                    }
                    row
                })
                .collect(),
        )
    } else {
        ("t L1 floor", reports.iter().map(|r| vec![r.t, r.l1, r.floor]).collect())
    };
    w.put(format!("{name}_l1.dat"), io::format_table(&w.meta, columns, &rows))?;
    let indexed: Vec<(usize, &EnsembleFrame)> = frames.iter().enumerate().collect();
    frame_files(w, name, &indexed)
}

fn run_two_particle(s: &Scenario, w: &mut Writer) -> Result<(), RunError> {
    let to_mode = |m: &crate::scenario::ModeSpec| {
        Mode::new(ThreeMomentum::from(m.p), mode_amplitude(m.amplitude), m.energy, s.state.handedness)
    };
    let wf = antisymmetrize(&to_mode(&s.state.modes[0]), &to_mode(&s.state.modes[1]))?;
    let grid =
        Grid::new(region(s.initial.region.as_ref().expect("validated"))?, s.numerics.cell_size.expect("validated"))?;
    let partner = Vec3::from(s.initial.positions[0]);
    let t = s.numerics.t0;
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .filter_map(|c| {
            let x1 = grid.cell_lo(c) + grid.widths() * 0.5;
            let (v1, v2) = two_weyl_velocities(&wf, t, &x1, &partner).ok()?;
            Some(vec![x1.x, x1.y, x1.z, v1.norm(), v2.norm(), 1.0 - v1.norm_squared()])
        })
        .collect();
    w.put(format!("{}_speed.dat", s.name), io::format_table(&w.meta, "x y z speed1 speed2 defect", &rows))?;
    Ok(())
}

fn manifest(s: &Scenario, report: &RunReport) -> String {
    let mut doc = toml::Table::new();
    doc.insert("program".into(), env!("CARGO_PKG_NAME").into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("seed".into(), toml::Value::Integer(s.numerics.seed as i64));
    let files: Vec<toml::Value> = report
        .files
        .iter()
        .map(|p| p.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned()).into())
        .collect();
    doc.insert("files".into(), toml::Value::Array(files));
    doc.insert("warnings".into(), toml::Value::Array(report.warnings.iter().map(|w| w.clone().into()).collect()));
    doc.insert("excluded".into(), toml::Value::Integer(report.excluded as i64));
    doc.insert("scenario".into(), toml::Value::try_from(s).expect("scenario serializes"));
    toml::to_string(&doc).expect("manifest serializes")
}

/// Validate, run and write `<name>_*` files plus `<name>_manifest.toml`
/// into `out_dir`. Outputs depend only on the scenario, so equal scenarios
/// give byte-identical files.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<RunReport, RunError> {
    s.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| IoError::Io { path: out_dir.display().to_string(), source })?;
    let mut w = Writer { dir: out_dir, meta: s.emit(), report: RunReport::default() };
    match s.kind {
        ScenarioKind::WeylTrajectories | ScenarioKind::ZigzagSingle | ScenarioKind::ZigzagVsDirac => {
            run_trajectories(s, &mut w)?
        }
        ScenarioKind::EnsembleRelaxation | ScenarioKind::Equivariance => run_ensemble(s, &mut w)?,
        ScenarioKind::TwoParticleMap => run_two_particle(s, &mut w)?,
    }
    let text = manifest(s, &w.report);
    let path = out_dir.join(format!("{}_manifest.toml", s.name));
    io::write_text(&path, &text)?;
    w.report.files.push(path);
    Ok(w.report)
}

//! Scenario documents: parsing, validation, dotted-key overrides and the
//! built-in presets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::Branch;
use crate::presets::{
    three_mode_cell, three_mode_octant, RUN_SPAN, THREE_MODE_MOMENTA, THREE_MODE_PHASES, WEYL_STARTS, ZIGZAG_MASS,
    ZIGZAG_START,
};
use crate::spinor::Handedness;
use crate::states::EnergySign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Deterministic Weyl trajectories from each listed start.
    WeylTrajectories,
    /// Zig-zag jump-process trajectories from each listed start.
    ZigzagSingle,
    /// Zig-zag and conventional Dirac trajectories from the same start.
    ZigzagVsDirac,
    /// Coarse-grained H of an ensemble started away from equilibrium.
    EnsembleRelaxation,
    /// Histogram distance to the evolving density for an equilibrium start.
    Equivariance,
    /// Speeds of an antisymmetrized two-particle state over a grid of
    /// first-particle positions.
    TwoParticleMap,
}

impl ScenarioKind {
    fn uses_ensemble(self) -> bool {
        matches!(self, ScenarioKind::EnsembleRelaxation | ScenarioKind::Equivariance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub p: [f64; 3],
    /// `[modulus, phase in radians]`
    pub amplitude: [f64; 2],
    #[serde(default = "positive")]
    pub energy: EnergySign,
}

fn positive() -> EnergySign {
    EnergySign::Positive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    /// Present for zig-zag electrons, absent for Weyl particles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default = "right")]
    pub handedness: Handedness,
    pub modes: Vec<ModeSpec>,
}

fn right() -> Handedness {
    Handedness::R
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    #[serde(default)]
    pub periodic: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub positions: Vec<[f64; 3]>,
    /// Starting zig-zag branch; drawn from the local densities when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    /// Histogram box; periodic boxes wrap positions.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub region: Option<BoxSpec>,
    /// Where the initial ensemble is sampled; defaults to the box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_region: Option<BoxSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Ensemble checkpoints; `[t0, t1]` when empty.
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_bootstrap() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Output file prefix.
    pub name: String,
    pub state: StateSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    pub numerics: Numerics,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid `{key}`: {constraint}")]
    Invalid { key: String, constraint: String },
    #[error("bad override `{0}`: expected dotted.key=value")]
    BadOverride(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

fn invalid(key: impl Into<String>, constraint: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { key: key.into(), constraint: constraint.into() }
}

fn finite3(v: &[f64; 3]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn check_box(key: &str, b: &BoxSpec) -> Result<(), ScenarioError> {
    if !finite3(&b.lo) || !finite3(&b.hi) || (0..3).any(|k| !(b.hi[k] > b.lo[k])) {
        return Err(invalid(key, "lo < hi on every axis"));
    }
    Ok(())
}

impl Scenario {
    /// Parse and validate a TOML document.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Parse, apply `dotted.key=value` overrides, then validate.
    pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<Self, ScenarioError> {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let s: Scenario = doc.try_into().map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn is_zigzag(&self) -> bool {
        self.state.mass.is_some()
    }

    /// Checkpoints with the `[t0, t1]` default applied.
    pub fn checkpoints(&self) -> Vec<f64> {
        if self.numerics.checkpoints.is_empty() {
            vec![self.numerics.t0, self.numerics.t1]
        } else {
            self.numerics.checkpoints.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let kind = self.kind;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name", "nonempty file prefix without path separators"));
        }
        let st = &self.state;
        if st.modes.is_empty() {
            return Err(invalid("state.modes", "at least one mode"));
        }
        for (i, m) in st.modes.iter().enumerate() {
            let key = |f: &str| format!("state.modes[{i}].{f}");
            if !finite3(&m.p) || m.p.iter().all(|&c| c == 0.0) {
                return Err(invalid(key("p"), "finite with |p| > 0"));
            }
            if !(m.amplitude[0] >= 0.0) || !m.amplitude[0].is_finite() || !m.amplitude[1].is_finite() {
                return Err(invalid(key("amplitude"), "[modulus >= 0, finite phase]"));
            }
            if st.mass.is_some() && m.energy != EnergySign::Positive {
                return Err(invalid(key("energy"), "zig-zag modes are positive-energy"));
            }
        }
        if st.modes.iter().all(|m| m.amplitude[0] == 0.0) {
            return Err(invalid("state.modes", "at least one nonzero amplitude"));
        }
        let needs_mass = matches!(kind, ScenarioKind::ZigzagSingle | ScenarioKind::ZigzagVsDirac);
        match st.mass {
            Some(m) if !(m > 0.0) || !m.is_finite() => return Err(invalid("state.mass", "m > 0")),
            None if needs_mass => return Err(invalid("state.mass", "required for zig-zag scenarios, m > 0")),
            Some(_) if matches!(kind, ScenarioKind::WeylTrajectories | ScenarioKind::TwoParticleMap) => {
                return Err(invalid("state.mass", "not used by massless scenarios"))
            }
            _ => {}
        }
        if st.mass.is_some() && st.handedness != Handedness::R {
            return Err(invalid("state.handedness", "zig-zag electrons are right-handed"));
        }

        let nu = &self.numerics;
        if !nu.t0.is_finite() || !nu.t1.is_finite() || !(nu.t1 > nu.t0) {
            return Err(invalid("numerics.t1", "finite with t1 > t0"));
        }
        if !(nu.dt > 0.0) || !nu.dt.is_finite() {
            return Err(invalid("numerics.dt", "dt > 0"));
        }

        let init = &self.initial;
        for (i, x) in init.positions.iter().enumerate() {
            if !finite3(x) {
                return Err(invalid(format!("initial.positions[{i}]"), "finite"));
            }
        }
        if let Some(b) = &init.region {
            check_box("initial.box", b)?;
        }
        if let Some(b) = &init.start_region {
            check_box("initial.start_region", b)?;
        }
        match kind {
            ScenarioKind::WeylTrajectories | ScenarioKind::ZigzagSingle | ScenarioKind::ZigzagVsDirac => {
                if init.positions.is_empty() {
                    return Err(invalid("initial.positions", "at least one start"));
                }
            }
            ScenarioKind::TwoParticleMap => {
                if st.modes.len() != 2 {
                    return Err(invalid("state.modes", "exactly two modes"));
                }
                if st.handedness != Handedness::R {
                    return Err(invalid("state.handedness", "two-particle states are right-handed"));
                }
                if init.positions.len() != 1 {
                    return Err(invalid("initial.positions", "exactly one position, the second particle"));
                }
                if init.region.is_none() {
                    return Err(invalid("initial.box", "required for the first-particle grid"));
                }
                self.check_cell_size()?;
            }
            ScenarioKind::EnsembleRelaxation | ScenarioKind::Equivariance => {
                if init.region.is_none() {
                    return Err(invalid("initial.box", "required for ensembles"));
                }
                self.check_cell_size()?;
                if !nu.n.is_some_and(|n| n >= 1) {
                    return Err(invalid("numerics.n", "ensemble size n >= 1"));
                }
                let cps = self.checkpoints();
                if cps[0] < nu.t0 || cps.iter().any(|t| !t.is_finite()) || cps.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("numerics.checkpoints", "increasing, finite and not before t0"));
                }
                if nu.bootstrap < 2 {
                    return Err(invalid("numerics.bootstrap", "at least 2 replicates"));
                }
            }
        }
        if kind.uses_ensemble() && init.branch.is_some() {
            return Err(invalid("initial.branch", "ensemble branches are drawn from the densities"));
        }
        if init.branch.is_some() && st.mass.is_none() {
            return Err(invalid("initial.branch", "only zig-zag scenarios have branches"));
        }
        Ok(())
    }

    fn check_cell_size(&self) -> Result<(), ScenarioError> {
        match self.numerics.cell_size {
            Some(e) if e > 0.0 && e.is_finite() => Ok(()),
            _ => Err(invalid("numerics.cell_size", "cell_size > 0")),
        }
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&probe) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Set `a.b.c = value` in a TOML table, creating intermediate tables.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<(), ScenarioError> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| ScenarioError::BadOverride(assignment.into()))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ScenarioError::BadOverride(assignment.into()));
    }
    let mut table = doc;
    for k in &keys[..keys.len() - 1] {
        let entry = table.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| ScenarioError::BadOverride(assignment.into()))?;
    }
    table.insert(keys[keys.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

fn three_mode_modes() -> Vec<ModeSpec> {
    THREE_MODE_MOMENTA
        .iter()
        .zip(THREE_MODE_PHASES)
        .map(|(&p, phase)| ModeSpec { p, amplitude: [1.0 / 3f64.sqrt(), phase], energy: EnergySign::Positive })
        .collect()
}

fn box_spec(b: &crate::ensemble::BoxRegion) -> BoxSpec {
    BoxSpec { lo: b.lo.into(), hi: b.hi.into(), periodic: b.periodic }
}

fn numerics(t1: f64) -> Numerics {
    Numerics {
        t0: RUN_SPAN.0,
        t1,
        dt: default_dt(),
        seed: 0,
        cell_size: None,
        n: None,
        checkpoints: Vec::new(),
        bootstrap: default_bootstrap(),
    }
}

/// Names and one-line descriptions of the built-in scenarios.
pub const PRESETS: [(&str, &str); 6] = [
    ("fig1", "seven Weyl trajectories of the three-mode state, t in [0, 50]"),
    ("fig8", "zig-zag electron (m = 10) against the Dirac trajectory from (0, 1, 0), t in [0, 50]"),
    ("equivariance", "10^5 equilibrium Weyl particles of the three-mode state evolved to t = 10"),
    ("zigzag-equivariance", "10^4 equilibrium zig-zag particles (m = 10) evolved to t = 10"),
    ("relaxation", "H-function of an octant-concentrated Weyl ensemble, checkpoints every 5 up to t = 50"),
    ("two-particle", "speed map of an antisymmetrized two-mode Weyl pair"),
];

pub fn preset(name: &str) -> Result<Scenario, ScenarioError> {
    let weyl = StateSpec { mass: None, handedness: Handedness::R, modes: three_mode_modes() };
    let zigzag = StateSpec { mass: Some(ZIGZAG_MASS), ..weyl.clone() };
    let cell = box_spec(&three_mode_cell());
    let s = match name {
        "fig1" => Scenario {
            kind: ScenarioKind::WeylTrajectories,
            name: name.into(),
            state: weyl,
            initial: InitialSpec { positions: WEYL_STARTS.to_vec(), ..Default::default() },
            numerics: numerics(RUN_SPAN.1),
        },
        "fig8" => Scenario {
            kind: ScenarioKind::ZigzagVsDirac,
            name: name.into(),
            state: zigzag,
            initial: InitialSpec { positions: vec![ZIGZAG_START], ..Default::default() },
            numerics: numerics(RUN_SPAN.1),
        },
        "equivariance" => Scenario {
            kind: ScenarioKind::Equivariance,
            name: name.into(),
            state: weyl,
            initial: InitialSpec { region: Some(cell), ..Default::default() },
            numerics: Numerics {
                dt: 0.02,
                cell_size: Some(0.5),
                n: Some(100_000),
                checkpoints: vec![0.0, 5.0, 10.0],
                ..numerics(10.0)
            },
        },
        "zigzag-equivariance" => Scenario {
            kind: ScenarioKind::Equivariance,
            name: name.into(),
            state: zigzag,
            initial: InitialSpec { region: Some(cell), ..Default::default() },
            numerics: Numerics {
                dt: 2e-3,
                cell_size: Some(PI / 3.0),
                n: Some(10_000),
                checkpoints: vec![0.0, 10.0],
                ..numerics(10.0)
            },
        },
        "relaxation" => Scenario {
            kind: ScenarioKind::EnsembleRelaxation,
            name: name.into(),
            state: weyl,
            initial: InitialSpec {
                region: Some(cell),
                start_region: Some(box_spec(&three_mode_octant())),
                ..Default::default()
            },
            numerics: Numerics {
                dt: 0.02,
                cell_size: Some(0.5),
                n: Some(20_000),
                checkpoints: (0..=10).map(|k| 5.0 * k as f64).collect(),
                ..numerics(RUN_SPAN.1)
            },
        },
        "two-particle" => Scenario {
            kind: ScenarioKind::TwoParticleMap,
            name: name.into(),
            state: StateSpec { modes: three_mode_modes()[..2].to_vec(), ..weyl },
            initial: InitialSpec {
                positions: vec![[0.0, 0.0, 0.0]],
                region: Some(BoxSpec { lo: [-2.0; 3], hi: [2.0; 3], periodic: false }),
                ..Default::default()
            },
            numerics: Numerics { cell_size: Some(0.25), ..numerics(1.0) },
        },
        other => return Err(ScenarioError::UnknownPreset(other.into())),
    };
    s.validate()?;
    Ok(s)
}

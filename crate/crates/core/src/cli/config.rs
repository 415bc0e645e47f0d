use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::deturck::mode_for;
use crate::flows::{default_wave_vector, FlowConfig, FlowKind};
use crate::g2_product::AnsatzMode;
use crate::torus_cy::FourierMode;

const PRESETS: [(&str, &str); 4] = [
    ("flat", include_str!("../../presets/flat.json")),
    ("thm12-n2", include_str!("../../presets/thm12-n2.json")),
    ("thm14-n2", include_str!("../../presets/thm14-n2.json")),
    ("thm14-n3", include_str!("../../presets/thm14-n3.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

/// Gate tolerances of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub osc_norm: f64,
    pub limit_residual: f64,
    pub dist_flat: f64,
    pub min_r2: f64,
    pub conservation: f64,
    pub coupled_initial: f64,
    pub coupled: f64,
    pub equivalence: f64,
    pub det_bound: f64,
    pub norm_identity: f64,
    pub torsion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            osc_norm: 1e-6,
            limit_residual: 1e-6,
            dist_flat: 1e-6,
            min_r2: 0.99,
            conservation: 1e-8,
            coupled_initial: 1e-6,
            coupled: 1e-4,
            equivalence: 1e-4,
            det_bound: 10.0,
            norm_identity: 1e-7,
            torsion: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub flow: FlowConfig,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Steps between potential snapshots; 0 disables them.
    #[serde(default = "default_snapshot_stride")]
    pub snapshot_stride: usize,
    /// Steps between stored samples of the diffeomorphism track.
    #[serde(default = "default_track_stride")]
    pub track_stride: usize,
    /// Steps between checkpoints; 0 disables them.
    #[serde(default = "default_checkpoint_stride")]
    pub checkpoint_stride: usize,
    /// Stop after this many steps, leaving a checkpoint.
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_snapshot_stride() -> usize {
    100
}

fn default_track_stride() -> usize {
    10
}

fn default_checkpoint_stride() -> usize {
    50
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let (_, text) = PRESETS.iter().find(|p| p.0 == name).ok_or_else(|| ConfigError::UnknownPreset(name.into()))?;
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn default_single_mode() -> Self {
        Self::from_flow(FlowConfig::single_mode(FlowKind::Ma13, 2, 16, 0.05))
    }

    pub fn from_flow(flow: FlowConfig) -> Self {
        Self {
            flow,
            out: None,
            snapshot_stride: default_snapshot_stride(),
            track_stride: default_track_stride(),
            checkpoint_stride: default_checkpoint_stride(),
            max_steps: None,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }

    /// Ansatz family realized by the flow, if any.
    pub fn mode(&self) -> Option<AnsatzMode> {
        mode_for(self.flow.kind)
    }

    /// `ε` of a single-mode potential `ε/(4π²) cos 2π k·x`.
    pub fn eps(&self) -> f64 {
        self.flow.modes.first().map_or(0.0, |m| m.amplitude * 4.0 * std::f64::consts::PI * std::f64::consts::PI)
    }

    /// Replaces the potential by a single mode on the default wave vector.
    pub fn set_single_mode(&mut self, eps: f64) {
        let amplitude = eps / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        self.flow.modes = if eps == 0.0 {
            Vec::new()
        } else {
            vec![FourierMode { k: default_wave_vector(self.flow.n), amplitude, phase: 0.0 }]
        };
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let f = &self.flow;
        if f.size < 8 || f.size % 2 != 0 {
            return Err(ConfigError::Invalid(format!("grid size must be even and at least 8, got {}", f.size)));
        }
        if !(2..=3).contains(&f.n) {
            return Err(ConfigError::Invalid(format!("n must be 2 or 3, got {}", f.n)));
        }
        if self.track_stride == 0 {
            return Err(ConfigError::Invalid("track_stride must be positive".into()));
        }
        f.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

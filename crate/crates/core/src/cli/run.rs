use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::deturck::{
    cauchy_check, integrate_theta, limit_torsion, pull_back, verify_coupled, verify_coupled_initial,
    verify_g2_equivalence, CauchyReport, CoupledReport, CoupledState, DiffeoTrack, G2EquivalenceReport,
};
use crate::flows::{Advance, DecayFit, Flow, FlowState, FlowTrace};
use crate::torus_cy::snapshot;

/// One pass/fail check of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    /// Non-finite values are written as `null` and read back as NaN.
    #[serde(deserialize_with = "nullable_f64")]
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub(super) fn nullable_f64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl Gate {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance, note: None }
    }

    fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value >= tolerance, note: None }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub kind: String,
    pub mode: Option<String>,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub converged: bool,
    pub steps: usize,
    pub t_final: f64,
    pub complete: bool,
    pub gates: Vec<Gate>,
    pub pass: bool,
}

/// Diagnostics of the gauge track and the coupled system.
#[derive(Clone, Debug, Serialize)]
pub struct Residuals {
    pub coupled: Vec<CoupledReport>,
    pub equivalence: Option<G2EquivalenceReport>,
    pub cauchy: Option<CauchyReport>,
    pub decay: Option<DecayFit>,
    pub det_range: Option<(f64, f64)>,
    pub norm_identity: Option<f64>,
    pub limit_torsion: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] super::config::ConfigError),
    #[error(transparent)]
    Flow(#[from] crate::flows::FlowError),
    #[error(transparent)]
    Deturck(#[from] crate::deturck::DeturckError),
    #[error(transparent)]
    Snapshot(#[from] snapshot::SnapshotError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checkpoint does not match the configuration: {0}")]
    Checkpoint(String),
}

#[derive(Serialize, Deserialize)]
struct CheckpointState {
    t: f64,
    steps: usize,
    config: RunConfig,
}

fn checkpoint_dir(out: &Path) -> PathBuf {
    out.join("checkpoint")
}

fn write_checkpoint(out: &Path, cfg: &RunConfig, state: &FlowState<f64>, trace: &FlowTrace) -> Result<(), RunError> {
    let dir = checkpoint_dir(out);
    fs::create_dir_all(&dir)?;
    snapshot::write(&dir.join("potential"), cfg.flow.grid(), "potential", state.t, &[&state.u])?;
    let mut w = BufWriter::new(fs::File::create(dir.join("trace_full.csv"))?);
    trace.write_full_csv(&mut w)?;
    w.flush()?;
    let st = CheckpointState { t: state.t, steps: state.steps, config: cfg.clone() };
    fs::write(dir.join("state.json"), serde_json::to_string_pretty(&st)?)?;
    Ok(())
}

fn read_checkpoint(out: &Path, cfg: &RunConfig) -> Result<Option<(FlowState<f64>, FlowTrace)>, RunError> {
    let dir = checkpoint_dir(out);
    let sp = dir.join("state.json");
    if !sp.exists() {
        return Ok(None);
    }
    let st: CheckpointState = serde_json::from_str(&fs::read_to_string(sp)?)?;
    if st.config.flow != cfg.flow {
        return Err(RunError::Checkpoint("flow parameters differ".into()));
    }
    let (_, mut comps) = snapshot::read::<f64>(&dir.join("potential"))?;
    let records = FlowTrace::read_csv(BufReader::new(fs::File::open(dir.join("trace_full.csv"))?))?;
    let trace = FlowTrace { kind: Some(cfg.flow.kind), records, converged: false };
    Ok(Some((FlowState::at(st.t, st.steps, comps.remove(0)), trace)))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), RunError> {
    fs::write(path, serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn flow_gates(cfg: &RunConfig, trace: &FlowTrace, gates: &mut Vec<Gate>) -> Option<DecayFit> {
    let tol = &cfg.tolerances;
    let last = trace.last().expect("trace has a record");
    gates.push(Gate {
        name: "converged".into(),
        value: last.dudt_dev,
        tolerance: cfg.flow.conv_tol,
        pass: trace.converged,
        note: None,
    });
    gates.push(Gate::at_most("osc_norm", last.osc_norm, tol.osc_norm));
    gates.push(Gate::at_most("limit_residual", last.limit_residual, tol.limit_residual));
    gates.push(Gate::at_most("dist_flat", last.dist_flat, tol.dist_flat));
    gates.push(Gate::at_most("volume_drift", trace.volume_drift(), tol.conservation));
    let initially_stationary = trace.records[0].dudt_dev <= cfg.flow.conv_tol;
    match trace.decay_fit() {
        Ok(fit) => {
            gates.push(Gate::at_least("decay_rate", fit.lambda, f64::MIN_POSITIVE));
            gates.push(Gate::at_least("decay_r2", fit.r2, tol.min_r2));
            Some(fit)
        }
        Err(e) if initially_stationary => {
            gates.push(Gate::at_most("decay_rate", 0.0, 0.0).note(format!("initial data stationary: {e}")));
            None
        }
        Err(e) => {
            gates.push(Gate { name: "decay_rate".into(), value: f64::NAN, tolerance: 0.0, pass: false, note: Some(e.to_string()) });
            None
        }
    }
}

fn gauge_gates(
    cfg: &RunConfig,
    flow: &Flow<f64>,
    trace: &FlowTrace,
    fit: Option<&DecayFit>,
    out: &Path,
    gates: &mut Vec<Gate>,
    res: &mut Residuals,
) -> Result<(), RunError> {
    let Some(mode) = cfg.mode() else { return Ok(()) };
    let tol = &cfg.tolerances;
    let p = &flow.problem;
    let grid = p.grid();

    let c0 = verify_coupled_initial(p, mode)?;
    gates.push(Gate::at_most("coupled_t0_omega", c0.residual_omega, tol.coupled_initial));
    gates.push(Gate::at_most("coupled_t0_Omega", c0.residual_big_omega, tol.coupled_initial));
    res.coupled.push(c0);

    let eq = verify_g2_equivalence(p, mode, 1e-3)?;
    gates.push(Gate::at_most("g2_equivalence_t0", eq.residual, tol.equivalence));
    res.equivalence = Some(eq);

    let track: DiffeoTrack<f64> = integrate_theta(flow, trace, mode, cfg.track_stride)?;
    if cfg.snapshot_stride > 0 {
        for (k, s) in track.samples.iter().enumerate() {
            let comps: Vec<&[f64]> = s.displacement.iter().map(|c| &c[..]).collect();
            snapshot::write(&out.join(format!("snapshots/displacement_{k:05}")), grid, "displacement", s.t, &comps)?;
        }
    }
    if let Some(s) = track.samples.get(track.samples.len() / 2).filter(|s| s.t > 0.0) {
        let st = CoupledState { t: s.t, u: s.u.clone(), x: s.x.clone() };
        let r = verify_coupled(p, mode, &st, 1e-3)?;
        gates.push(Gate::at_most("coupled_t_omega", r.residual_omega, tol.coupled));
        gates.push(Gate::at_most("coupled_t_Omega", r.residual_big_omega, tol.coupled));
        res.coupled.push(r);
    }

    let (lo, hi) = track.det_range();
    res.det_range = Some((lo, hi));
    gates.push(Gate::at_most("det_jacobian_bound", hi.max(1.0 / lo), tol.det_bound));
    gates.push(Gate::at_most("jacobian_mean_drift", track.det_mean_drift(), tol.conservation));
    if let Some(fit) = fit {
        let c = cauchy_check(&track, fit.lambda);
        gates.push(Gate::at_most("cauchy_ratio", c.worst_ratio, 1.0 + 1e-9));
        res.cauchy = Some(c);
    }

    let last = track.last();
    let pb = pull_back(p, &last.u, &last.x, &last.displacement)?;
    let ni = pb.norm_identity_residual();
    gates.push(Gate::at_most("norm_identity", ni, tol.norm_identity));
    res.norm_identity = Some(ni);
    let vol = pb.volume_ratio.iter().zip(&pb.jac_det).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    gates.push(Gate::at_most("volume_ratio", vol, tol.norm_identity));
    gates.push(Gate::at_most("omega_ratio_drift", (pb.omega_ratio_integral() - 1.0).abs(), tol.conservation));
    let tors = limit_torsion(p, mode, &last.u, &last.x)?;
    gates.push(Gate::at_most("limit_torsion", tors, tol.torsion));
    res.limit_torsion = Some(tors);
    Ok(())
}

/// Runs the flow, the gauge track and every applicable gate; writes the
/// trace, snapshots, residual and summary files under `out`.
pub fn run_experiment(cfg: &RunConfig, out: &Path, resume: bool) -> Result<Summary, RunError> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    write_json(&out.join("config.json"), cfg)?;
    let flow = Flow::<f64>::new(cfg.flow.clone())?;
    let grid = flow.problem.grid();
    let (mut state, mut trace) = match resume.then(|| read_checkpoint(out, cfg)).transpose()?.flatten() {
        Some(x) => x,
        None => (FlowState::initial(grid), FlowTrace { kind: Some(cfg.flow.kind), ..Default::default() }),
    };
    let snap = |state: &FlowState<f64>| -> Result<(), RunError> {
        let stem = out.join(format!("snapshots/potential_{:06}", state.steps));
        Ok(snapshot::write(&stem, grid, "potential", state.t, &[&state.u])?)
    };
    if cfg.snapshot_stride > 0 && state.steps == 0 {
        snap(&state)?;
    }
    let mut complete = false;
    loop {
        if cfg.max_steps.is_some_and(|m| state.steps >= m) {
            break;
        }
        match flow.advance(&mut state, &mut trace)? {
            Advance::Stepped => {
                if cfg.snapshot_stride > 0 && state.steps % cfg.snapshot_stride == 0 {
                    snap(&state)?;
                }
                if cfg.checkpoint_stride > 0 && state.steps % cfg.checkpoint_stride == 0 {
                    write_checkpoint(out, cfg, &state, &trace)?;
                }
            }
            Advance::Converged | Advance::ReachedTmax => {
                complete = true;
                break;
            }
        }
    }
    trace.save_csv(&out.join("trace.csv"))?;
    let mut summary = Summary {
        kind: cfg.flow.kind.to_string(),
        mode: cfg.mode().map(|m| m.to_string()),
        n: cfg.flow.n,
        size: cfg.flow.size,
        converged: trace.converged,
        steps: state.steps,
        t_final: state.t,
        complete,
        gates: Vec::new(),
        pass: false,
    };
    if !complete {
        write_checkpoint(out, cfg, &state, &trace)?;
        write_json(&out.join("summary.json"), &summary)?;
        return Ok(summary);
    }
    if cfg.snapshot_stride > 0 && state.steps % cfg.snapshot_stride != 0 {
        snap(&state)?;
    }
    let mut res = Residuals {
        coupled: Vec::new(),
        equivalence: None,
        cauchy: None,
        decay: None,
        det_range: None,
        norm_identity: None,
        limit_torsion: None,
    };
    let fit = flow_gates(cfg, &trace, &mut summary.gates);
    res.decay = fit;
    gauge_gates(cfg, &flow, &trace, fit.as_ref(), out, &mut summary.gates, &mut res)?;
    summary.pass = summary.gates.iter().all(|g| g.pass);
    write_json(&out.join("residuals.json"), &res)?;
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

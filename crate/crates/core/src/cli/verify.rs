use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::RunConfig;
use crate::flows::FlowConfig;
use crate::forms7::{metric_from_phi, phi0, PhiConvention};
use crate::g2_product::{verify_lemmas_mutated, AnsatzMode, LemmaId, LemmaReport, StarTable};
use crate::linalg::SmallMat;
use crate::torus_cy::{FourierMode, PotentialField, Spectral, TorusGrid};

/// Algebraic self-check reported next to the lemma residuals.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: Option<u64>,
    pub mutation: Option<usize>,
    pub lemmas: Vec<LemmaReport>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub lemmas: Vec<LemmaId>,
    /// Base configuration: restricts the check to its dimension and
    /// supplies the potential and grid.
    pub base: Option<RunConfig>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub mutation: Option<usize>,
}

/// Lemma ids for `all`, a descriptive name or a short alias.
pub fn parse_lemmas(s: &str) -> Result<Vec<LemmaId>, String> {
    if s == "all" {
        return Ok(LemmaId::ALL.to_vec());
    }
    s.split(',')
        .map(|p| LemmaId::parse(p.trim()).ok_or_else(|| format!("unknown lemma `{p}`")))
        .collect()
}

/// Random single mode with entries of the wave vector in `{−1, 0, 1}`.
pub fn random_modes(n: usize, seed: u64, eps: f64) -> Vec<FourierMode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = loop {
        let k: Vec<i64> = (0..2 * n).map(|_| rng.gen_range(-1..=1)).collect();
        if k.iter().any(|&x| x != 0) {
            break k;
        }
    };
    let amplitude = eps / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    vec![FourierMode { k, amplitude, phase: rng.gen_range(0.0..std::f64::consts::TAU) }]
}

fn default_size(n: usize) -> usize {
    if n == 2 {
        16
    } else {
        8
    }
}

fn potential_for(opts: &VerifyOptions, n: usize) -> (TorusGrid, Vec<FourierMode>) {
    let base = opts.base.as_ref().filter(|b| b.flow.n == n);
    let size = opts.grid.or(base.map(|b| b.flow.size)).unwrap_or(default_size(n));
    let eps = base.map_or(0.05, |b| b.eps());
    let modes = match (opts.seed, base) {
        (Some(seed), _) => random_modes(n, seed, if eps == 0.0 { 0.05 } else { eps }),
        (None, Some(b)) => b.flow.modes.clone(),
        (None, None) => FlowConfig::single_mode(crate::flows::FlowKind::Ma13, n, size, 0.05).modes,
    };
    (TorusGrid::new(n, size), modes)
}

fn algebra_checks(mutation: Option<usize>) -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name: &str, residual: f64, tolerance: f64| {
        out.push(Check { name: name.into(), residual, tolerance, pass: residual <= tolerance })
    };
    let g = metric_from_phi(&phi0::<f64>(), PhiConvention::Flow).expect("φ₀ is definite");
    push("metric_of_phi0", g.g.sub(&SmallMat::identity(7)).max_abs(), 1e-12);
    for mode in [AnsatzMode::Flow, AnsatzMode::Coflow] {
        for n in [2, 3] {
            let mut frozen = StarTable::frozen(mode, n);
            if let Some(r) = mutation {
                frozen = frozen.corrupted(r % frozen.rows.len());
            }
            let d = frozen.max_difference(&StarTable::generate(mode, n));
            push(&format!("star_table_{mode}_n{n}"), d, 1e-15);
        }
    }
    out
}

/// Checks the requested identities for the configured (or seeded)
/// potential, plus the algebraic self-checks.
pub fn verify_all(opts: &VerifyOptions) -> Result<VerifyReport, crate::torus_cy::KahlerError> {
    let mut lemmas = Vec::new();
    let dims: Vec<usize> = match &opts.base {
        Some(b) => vec![b.flow.n],
        None => vec![2, 3],
    };
    for n in dims {
        let ids: Vec<LemmaId> = opts.lemmas.iter().copied().filter(|id| id.n() == n).collect();
        if ids.is_empty() {
            continue;
        }
        let (grid, modes) = potential_for(opts, n);
        let sp = Spectral::<f64>::new(grid);
        let w = PotentialField::<f64>::from_modes(grid, &modes).values;
        lemmas.extend(verify_lemmas_mutated(&sp, &w, &ids, opts.mutation)?);
    }
    let checks = algebra_checks(opts.mutation);
    let pass = lemmas.iter().all(|r| r.pass) && checks.iter().all(|c| c.pass);
    Ok(VerifyReport { seed: opts.seed, mutation: opts.mutation, lemmas, checks, pass })
}

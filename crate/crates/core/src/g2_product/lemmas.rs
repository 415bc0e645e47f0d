use rayon::prelude::*;
use serde::Serialize;

use super::ansatz::{lemma_brackets, AnsatzFields};
use super::form_field::FormField;
use super::star::{circles_for, product_weights, ProductStar, StarTable};
use super::AnsatzMode;
use crate::forms7::{metric_from_phi, torsion_with_metric, PhiConvention, PointForm};
use crate::linalg::SmallMat;
use crate::scalar::{abs, Real};
use crate::torus_cy::kahler::real_metric;
use crate::torus_cy::{KahlerError, Spectral};

/// Laplacian and torsion identities of the ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaId {
    FlowLaplacianN2,
    FlowTorsionN2,
    FlowLaplacianN3,
    FlowTorsionN3,
    CoflowLaplacianN2,
    CoflowTorsionN2,
    CoflowLaplacianN3,
    CoflowTorsionN3,
}

const ALIASES: [(&str, LemmaId); 8] = [
    ("3.1", LemmaId::FlowLaplacianN2),
    ("3.2", LemmaId::FlowTorsionN2),
    ("3.3", LemmaId::FlowLaplacianN3),
    ("3.4", LemmaId::FlowTorsionN3),
    ("4.1", LemmaId::CoflowLaplacianN2),
    ("4.2", LemmaId::CoflowTorsionN2),
    ("4.3", LemmaId::CoflowLaplacianN3),
    ("4.4", LemmaId::CoflowTorsionN3),
];

impl LemmaId {
    pub const ALL: [LemmaId; 8] = [
        LemmaId::FlowLaplacianN2,
        LemmaId::FlowTorsionN2,
        LemmaId::FlowLaplacianN3,
        LemmaId::FlowTorsionN3,
        LemmaId::CoflowLaplacianN2,
        LemmaId::CoflowTorsionN2,
        LemmaId::CoflowLaplacianN3,
        LemmaId::CoflowTorsionN3,
    ];

    pub fn mode(self) -> AnsatzMode {
        use LemmaId::*;
        match self {
            FlowLaplacianN2 | FlowTorsionN2 | FlowLaplacianN3 | FlowTorsionN3 => AnsatzMode::Flow,
            _ => AnsatzMode::Coflow,
        }
    }

    pub fn n(self) -> usize {
        use LemmaId::*;
        match self {
            FlowLaplacianN2 | FlowTorsionN2 | CoflowLaplacianN2 | CoflowTorsionN2 => 2,
            _ => 3,
        }
    }

    pub fn is_torsion(self) -> bool {
        use LemmaId::*;
        matches!(self, FlowTorsionN2 | FlowTorsionN3 | CoflowTorsionN2 | CoflowTorsionN3)
    }

    pub fn name(self) -> &'static str {
        use LemmaId::*;
        match self {
            FlowLaplacianN2 => "flow-laplacian-n2",
            FlowTorsionN2 => "flow-torsion-n2",
            FlowLaplacianN3 => "flow-laplacian-n3",
            FlowTorsionN3 => "flow-torsion-n3",
            CoflowLaplacianN2 => "coflow-laplacian-n2",
            CoflowTorsionN2 => "coflow-torsion-n2",
            CoflowLaplacianN3 => "coflow-laplacian-n3",
            CoflowTorsionN3 => "coflow-torsion-n3",
        }
    }

    pub fn alias(self) -> &'static str {
        ALIASES.iter().find(|(_, id)| *id == self).unwrap().0
    }

    /// Accepts the descriptive name or the short numeric alias.
    pub fn parse(s: &str) -> Option<LemmaId> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .or_else(|| ALIASES.iter().find(|(a, _)| *a == s).map(|(_, id)| *id))
    }

    pub fn of(mode: AnsatzMode) -> impl Iterator<Item = LemmaId> {
        Self::ALL.into_iter().filter(move |id| id.mode() == mode)
    }

    /// Residual tolerance at the reference resolutions.
    pub fn tolerance(self) -> f64 {
        if self.n() == 2 {
            1e-6
        } else {
            1e-5
        }
    }
}

impl std::fmt::Display for LemmaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub dim: usize,
    pub mode: AnsatzMode,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Sup-norm of the torsion pieces that must vanish.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing_tolerance: Option<f64>,
    /// `sup |φ ∧ dφ|`, which forces `τ₀ = 0` for the coclosed ansatz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_wedge_dphi: Option<f64>,
}

/// Pointwise torsion of the ansatz, one entry per grid point.
pub struct TorsionField<T: Real> {
    pub tau0: Vec<T>,
    pub tau1: FormField<T>,
    pub tau2: FormField<T>,
    pub tau3: FormField<T>,
    pub consistency: T,
}

impl<T: Real> TorsionField<T> {
    pub fn sup(&self) -> [T; 4] {
        let t0 = self.tau0.iter().fold(T::zero(), |m, &x| m.max(abs(x)));
        [t0, self.tau1.max_abs(), self.tau2.max_abs(), self.tau3.max_abs()]
    }

    pub fn max_abs(&self) -> T {
        self.sup().into_iter().fold(T::zero(), T::max)
    }
}

/// Torsion of `φ` computed point by point from its induced metric and the
/// spectral derivatives `dφ`, `d⋆φ`.
pub fn torsion_field<T: Real>(sp: &Spectral<T>, phi: &FormField<T>, psi: &FormField<T>) -> TorsionField<T> {
    let dphi = phi.d(sp);
    let dpsi = psi.d(sp);
    let grid = phi.grid;
    let m = phi.circles;
    let pts: Vec<(T, PointForm<T>, PointForm<T>, PointForm<T>, T)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = phi.point(i);
            let met = metric_from_phi(&p, PhiConvention::Flow).expect("ansatz 3-form must be definite");
            let t = torsion_with_metric(&met, &p, &dphi.point(i), &dpsi.point(i), PhiConvention::Flow);
            (t.tau0, t.tau1, t.tau2, t.tau3, t.consistency)
        })
        .collect();
    let tau0 = pts.iter().map(|p| p.0).collect();
    let tau1 = FormField::from_point_vec(grid, m, 1, &pts.iter().map(|p| p.1).collect::<Vec<_>>());
    let tau2 = FormField::from_point_vec(grid, m, 2, &pts.iter().map(|p| p.2).collect::<Vec<_>>());
    let tau3 = FormField::from_point_vec(grid, m, 3, &pts.iter().map(|p| p.3).collect::<Vec<_>>());
    let consistency = pts.iter().fold(T::zero(), |c, p| c.max(p.4));
    TorsionField { tau0, tau1, tau2, tau3, consistency }
}

/// Largest deviation between the metric induced by `φ` at each grid point
/// and the block metric `|Ω|^{ℓ_i} dr_i² + |Ω|^γ g`.
pub fn pointwise_metric_residual<T: Real>(a: &AnsatzFields<T>) -> T {
    let phi = a.phi();
    let n = a.h.n();
    let m = circles_for(n);
    let (ell, gamma) = product_weights(a.mode, n);
    (0..phi.grid.len())
        .into_par_iter()
        .map(|i| {
            let met = metric_from_phi(&phi.point(i), PhiConvention::Flow).expect("ansatz 3-form must be definite");
            let s = a.data.norm[i];
            let gx = real_metric(&a.h.h[i], n);
            let mut expect = SmallMat::zeros(m + 2 * n);
            for (j, &l) in ell.iter().enumerate() {
                expect[(j, j)] = s.powf(T::lit(l));
            }
            let c = s.powf(T::lit(gamma));
            for p in 0..2 * n {
                for q in 0..2 * n {
                    expect[(m + p, m + q)] = c * gx[(p, q)];
                }
            }
            let vol = s.powf(T::lit(ell.iter().sum::<f64>() / 2.0 + gamma * n as f64)) * crate::torus_cy::kahler::herm_det(&a.h.h[i], n);
            met.g.sub(&expect).max_abs().max(abs(met.vol - vol))
        })
        .reduce(|| T::zero(), T::max)
}

/// Largest deviation between the product star of `α` and the pointwise
/// star of the metric induced by `φ`.
pub fn pointwise_star_residual<T: Real>(a: &AnsatzFields<T>, star: &ProductStar<'_, T>, alpha: &FormField<T>) -> T {
    let phi = a.phi();
    let tabled = star.apply(alpha);
    (0..phi.grid.len())
        .into_par_iter()
        .map(|i| {
            let met = metric_from_phi(&phi.point(i), PhiConvention::Flow).expect("ansatz 3-form must be definite");
            (met.star(&alpha.point(i)) - tabled.point(i)).max_abs()
        })
        .reduce(|| T::zero(), T::max)
}

/// Checks one identity for the ansatz generated by the potential `w`.
pub fn verify_lemma<T: Real>(sp: &Spectral<T>, w: &[T], id: LemmaId) -> Result<LemmaReport, KahlerError> {
    assert_eq!(sp.grid().n, id.n(), "lemma {id} needs complex dimension {}", id.n());
    let a = AnsatzFields::from_potential(sp, w, id.mode())?;
    Ok(verify_with(sp, &a, id, None))
}

fn verify_with<T: Real>(sp: &Spectral<T>, a: &AnsatzFields<T>, id: LemmaId, mutation: Option<usize>) -> LemmaReport {
    let star = match mutation {
        Some(row) => {
            let t = StarTable::frozen(a.mode, id.n());
            let r = row % t.rows.len();
            ProductStar::with_table(t.corrupted(r), &a.h, &a.data.norm)
        }
        None => a.star(),
    };
    let v = a.driving_gradient(sp);
    let (bracket, tbracket) = lemma_brackets(&a.data, a.mode);
    let mut report = LemmaReport {
        lemma: id.name().to_string(),
        dim: id.n(),
        mode: id.mode(),
        residual: 0.0,
        tolerance: id.tolerance(),
        pass: false,
        vanishing: None,
        vanishing_tolerance: None,
        phi_wedge_dphi: None,
    };
    if !id.is_torsion() {
        let lhs = star.laplacian(sp, &a.evolving_form());
        let rhs = bracket.lie(sp, &v);
        report.residual = lhs.max_abs_diff(&rhs).to_f64();
        report.pass = report.residual <= report.tolerance;
        return report;
    }
    let phi = a.phi();
    let psi = star.apply(&phi);
    let t = torsion_field(sp, &phi, &psi);
    let expected = tbracket.interior(&v);
    let [t0, t1, t2, t3] = t.sup().map(|x| x.to_f64());
    let (hit, zero) = match a.mode {
        AnsatzMode::Flow => (t.tau2.max_abs_diff(&expected), t0.max(t1).max(t3)),
        AnsatzMode::Coflow => (t.tau3.max_abs_diff(&expected), t0.max(t1).max(t2)),
    };
    report.residual = hit.to_f64();
    report.vanishing = Some(zero);
    report.vanishing_tolerance = Some(1e-9);
    if a.mode == AnsatzMode::Coflow {
        report.phi_wedge_dphi = Some(phi.wedge(&phi.d(sp)).max_abs().to_f64());
    }
    report.pass = report.residual <= report.tolerance && zero <= 1e-9;
    report
}

/// Checks the identities for every listed lemma whose dimension matches
/// the grid; the ansatz is built once per mode.
pub fn verify_lemmas<T: Real>(sp: &Spectral<T>, w: &[T], ids: &[LemmaId]) -> Result<Vec<LemmaReport>, KahlerError> {
    verify_lemmas_mutated(sp, w, ids, None)
}

/// [`verify_lemmas`] with the sign of one star-table row flipped, as a
/// negative control.
pub fn verify_lemmas_mutated<T: Real>(
    sp: &Spectral<T>,
    w: &[T],
    ids: &[LemmaId],
    mutation: Option<usize>,
) -> Result<Vec<LemmaReport>, KahlerError> {
    let n = sp.grid().n;
    let mut out = Vec::new();
    for mode in [AnsatzMode::Flow, AnsatzMode::Coflow] {
        let wanted: Vec<LemmaId> = ids.iter().copied().filter(|id| id.mode() == mode && id.n() == n).collect();
        if wanted.is_empty() {
            continue;
        }
        let a = AnsatzFields::from_potential(sp, w, mode)?;
        for id in wanted {
            out.push(verify_with(sp, &a, id, mutation));
        }
    }
    Ok(out)
}

//! Hodge star of the product metrics induced by the flow and coflow ansatz.
//!
//! For circle weights `λ_i = |Ω|^{ℓ_i}` and torus metric `|Ω|^γ g`, with
//! orientation `dr^{1…m} ∧ vol_g`,
//! `⋆(dr^S ∧ β) = ε · (−1)^{k·p} · |Ω|^{e₀ + e₁k} · dr^{S^c} ∧ ⋆_g β`
//! for a `k`-form `β` on the torus factor.

use super::form_field::FormField;
use super::AnsatzMode;
use crate::forms7::basis::{self, Blade};
use crate::forms7::PointForm;
use crate::scalar::Real;
use crate::torus_cy::kahler::{herm_det, herm_inverse, real_metric};
use crate::torus_cy::HermitianField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarRow {
    /// Circle blade `S`.
    pub source: Blade,
    /// Complementary circle blade `S^c`.
    pub target: Blade,
    /// `ε(S, S^c)`.
    pub sign: i8,
    /// Parity `p` of the `(−1)^{k·p}` factor.
    pub parity: u8,
    pub exp0: f64,
    pub exp_k: f64,
}

const fn row(source: Blade, target: Blade, sign: i8, parity: u8, exp0: f64, exp_k: f64) -> StarRow {
    StarRow { source, target, sign, parity, exp0, exp_k }
}

const TWO_THIRDS: f64 = 2.0 / 3.0;

const FLOW_T3: [StarRow; 8] = [
    row(0b000, 0b111, 1, 1, 4.0 / 3.0, -TWO_THIRDS),
    row(0b001, 0b110, 1, 0, 8.0 / 3.0, -TWO_THIRDS),
    row(0b010, 0b101, -1, 0, 2.0 / 3.0, -TWO_THIRDS),
    row(0b100, 0b011, 1, 0, 2.0 / 3.0, -TWO_THIRDS),
    row(0b011, 0b100, 1, 1, 2.0, -TWO_THIRDS),
    row(0b101, 0b010, -1, 1, 2.0, -TWO_THIRDS),
    row(0b110, 0b001, 1, 1, 0.0, -TWO_THIRDS),
    row(0b111, 0b000, 1, 0, 4.0 / 3.0, -TWO_THIRDS),
];

const COFLOW_T3: [StarRow; 8] = [
    row(0b000, 0b111, 1, 1, 1.0, 0.0),
    row(0b001, 0b110, 1, 0, -1.0, 0.0),
    row(0b010, 0b101, -1, 0, 1.0, 0.0),
    row(0b100, 0b011, 1, 0, 1.0, 0.0),
    row(0b011, 0b100, 1, 1, -1.0, 0.0),
    row(0b101, 0b010, -1, 1, -1.0, 0.0),
    row(0b110, 0b001, 1, 1, 1.0, 0.0),
    row(0b111, 0b000, 1, 0, -1.0, 0.0),
];

const FLOW_S1: [StarRow; 2] = [row(0b0, 0b1, 1, 1, 4.0 / 3.0, -TWO_THIRDS), row(0b1, 0b0, 1, 0, 8.0 / 3.0, -TWO_THIRDS)];

const COFLOW_S1: [StarRow; 2] = [row(0b0, 0b1, 1, 1, 1.0, 0.0), row(0b1, 0b0, 1, 0, -1.0, 0.0)];

/// Weights `(ℓ_i, γ)` of the product metric for a mode and complex dimension.
pub fn product_weights(mode: AnsatzMode, n: usize) -> (Vec<f64>, f64) {
    match (mode, n) {
        (AnsatzMode::Flow, 2) => (vec![-4.0 / 3.0, TWO_THIRDS, TWO_THIRDS], TWO_THIRDS),
        (AnsatzMode::Coflow, 2) => (vec![2.0, 0.0, 0.0], 0.0),
        (AnsatzMode::Flow, 3) => (vec![-4.0 / 3.0], TWO_THIRDS),
        (AnsatzMode::Coflow, 3) => (vec![2.0], 0.0),
        _ => panic!("product ansatz needs complex dimension 2 or 3"),
    }
}

/// Number of circle factors: three over a complex surface, one over a threefold.
pub fn circles_for(n: usize) -> usize {
    match n {
        2 => 3,
        3 => 1,
        _ => panic!("product ansatz needs complex dimension 2 or 3"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarTable {
    pub circles: usize,
    pub n: usize,
    pub rows: Vec<StarRow>,
}

impl StarTable {
    /// The tabulated rows.
    pub fn frozen(mode: AnsatzMode, n: usize) -> Self {
        let rows: &[StarRow] = match (mode, n) {
            (AnsatzMode::Flow, 2) => &FLOW_T3,
            (AnsatzMode::Coflow, 2) => &COFLOW_T3,
            (AnsatzMode::Flow, 3) => &FLOW_S1,
            (AnsatzMode::Coflow, 3) => &COFLOW_S1,
            _ => panic!("product ansatz needs complex dimension 2 or 3"),
        };
        Self { circles: circles_for(n), n, rows: rows.to_vec() }
    }

    /// Rows derived from the metric weights.
    pub fn generate(mode: AnsatzMode, n: usize) -> Self {
        let (ell, gamma) = product_weights(mode, n);
        let m = ell.len();
        let full: Blade = ((1u16 << m) - 1) as Blade;
        let mut rows = Vec::new();
        for size in 0..=m {
            for &s in basis::blades(m, size) {
                let sc = full & !s;
                let mut e = 0.0;
                for (i, &l) in ell.iter().enumerate() {
                    e += if s & (1 << i) != 0 { -0.5 * l } else { 0.5 * l };
                }
                rows.push(StarRow {
                    source: s,
                    target: sc,
                    sign: basis::wedge_sign(s, sc),
                    parity: ((m - size) % 2) as u8,
                    exp0: e + gamma * n as f64,
                    exp_k: -gamma,
                });
            }
        }
        Self { circles: m, n, rows }
    }

    /// A copy with the sign of row `i` flipped.
    pub fn corrupted(&self, i: usize) -> Self {
        let mut t = self.clone();
        t.rows[i].sign = -t.rows[i].sign;
        t
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.rows.len(), other.rows.len());
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                if a.source != b.source || a.target != b.target || a.sign != b.sign || a.parity != b.parity {
                    f64::INFINITY
                } else {
                    (a.exp0 - b.exp0).abs().max((a.exp_k - b.exp_k).abs())
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Hodge star of the product metric determined by a Kähler metric field
/// and `|Ω|`.
pub struct ProductStar<'a, T: Real> {
    pub table: StarTable,
    pub h: &'a HermitianField<T>,
    pub norm: &'a [T],
}

impl<'a, T: Real> ProductStar<'a, T> {
    pub fn new(mode: AnsatzMode, h: &'a HermitianField<T>, norm: &'a [T]) -> Self {
        Self { table: StarTable::frozen(mode, h.n()), h, norm }
    }

    pub fn with_table(table: StarTable, h: &'a HermitianField<T>, norm: &'a [T]) -> Self {
        Self { table, h, norm }
    }

    /// `⋆_g` of a torus form at one point.
    pub fn torus_star_at(&self, i: usize, beta: &PointForm<T>) -> PointForm<T> {
        let n = self.h.n();
        let a = &self.h.h[i];
        let g = real_metric(a, n);
        let ginv = real_metric(&herm_inverse(a, n), n);
        beta.hodge_star_with(&g, &ginv, herm_det(a, n))
    }

    pub fn apply(&self, alpha: &FormField<T>) -> FormField<T> {
        let m = self.table.circles;
        assert_eq!(alpha.circles, m);
        let grid = alpha.grid;
        let mut out = FormField::zero(grid, m, alpha.dim() - alpha.degree);
        for r in &self.table.rows {
            let Some(beta) = alpha.circle_component(r.source) else { continue };
            if beta.max_abs() == T::zero() {
                continue;
            }
            let k = beta.degree;
            let sign = if r.parity == 1 && k % 2 == 1 { -r.sign } else { r.sign };
            let expo = T::lit(r.exp0 + r.exp_k * k as f64);
            let starred = beta.map_points(beta.dim() - k, |i, b| {
                let c = T::lit(sign as f64) * self.norm[i].powf(expo);
                self.torus_star_at(i, &b).scale(c)
            });
            out = out + FormField::dr_wedge(m, r.target, &starred);
        }
        out
    }

    /// `d* = (−1)^k ⋆d⋆` on `k`-forms in dimension 7.
    pub fn codifferential(&self, sp: &crate::torus_cy::Spectral<T>, alpha: &FormField<T>) -> FormField<T> {
        let r = self.apply(&self.apply(alpha).d(sp));
        if alpha.degree % 2 == 1 {
            -r
        } else {
            r
        }
    }

    /// Hodge Laplacian `dd* + d*d`.
    pub fn laplacian(&self, sp: &crate::torus_cy::Spectral<T>, alpha: &FormField<T>) -> FormField<T> {
        let mut out = if alpha.degree > 0 {
            self.codifferential(sp, alpha).d(sp)
        } else {
            FormField::zero(alpha.grid, alpha.circles, 0)
        };
        if alpha.degree < alpha.dim() {
            out = out + self.codifferential(sp, &alpha.d(sp));
        }
        out
    }
}

//! Forms on `T³ × T⁴` and `S¹ × T⁶` built from Kähler data on the torus
//! factor, with the product Hodge star, Laplacian and the closed-form
//! Laplacian and torsion identities of the flow and coflow ansatz.

mod ansatz;
mod form_field;
mod lemmas;
mod star;

pub use ansatz::{
    assemble_phi, assemble_psi, driving_function, gradient, holomorphic_volume, lemma_brackets, AnsatzFields,
    KahlerData,
};
pub use form_field::FormField;
pub use lemmas::{
    pointwise_metric_residual, pointwise_star_residual, torsion_field, verify_lemma, verify_lemmas, verify_lemmas_mutated, LemmaId,
    LemmaReport, TorsionField,
};
pub use star::{circles_for, product_weights, ProductStar, StarRow, StarTable};

use serde::{Deserialize, Serialize};

/// Which of the two ansatz families: closed (Laplacian flow) or coclosed
/// (Laplacian coflow).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzMode {
    Flow,
    Coflow,
}

impl std::fmt::Display for AnsatzMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnsatzMode::Flow => "flow",
            AnsatzMode::Coflow => "coflow",
        })
    }
}

impl std::str::FromStr for AnsatzMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flow" => Ok(AnsatzMode::Flow),
            "coflow" => Ok(AnsatzMode::Coflow),
            _ => Err(format!("unknown mode `{s}` (expected flow or coflow)")),
        }
    }
}

#[cfg(test)]
mod tests;

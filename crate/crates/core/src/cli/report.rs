use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::run::{nullable_f64, Summary};

/// Text table of the artifacts found in an output directory; the flag is
/// whether every recorded gate passed.
pub fn report(out: &Path) -> Result<(String, bool), String> {
    let read = |name: &str| fs::read_to_string(out.join(name)).ok();
    let mut text = String::new();
    let mut pass = true;
    let mut found = false;
    if let Some(s) = read("summary.json") {
        found = true;
        let s: Summary = serde_json::from_str(&s).map_err(|e| format!("summary.json: {e}"))?;
        let _ = writeln!(
            text,
            "run: {} (mode {}) n={} N={} steps={} t={:.6} converged={}",
            s.kind,
            s.mode.as_deref().unwrap_or("-"),
            s.n,
            s.size,
            s.steps,
            s.t_final,
            s.converged
        );
        if !s.complete {
            let _ = writeln!(text, "  incomplete: resume with `g2flow run --resume`");
            pass = false;
        }
        for g in &s.gates {
            let _ = writeln!(
                text,
                "  {:<4} {:<22} {:>12.4e}  tol {:.1e}{}",
                if g.pass { "PASS" } else { "FAIL" },
                g.name,
                g.value,
                g.tolerance,
                g.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default()
            );
        }
        pass &= s.pass;
    }
    if let Some(s) = read("lemmas.json") {
        found = true;
        let v: VerifyReportView = serde_json::from_str(&s).map_err(|e| format!("lemmas.json: {e}"))?;
        let _ = writeln!(text, "verify:");
        for l in &v.lemmas {
            let _ = writeln!(
                text,
                "  {:<4} {:<22} {:>12.4e}  tol {:.1e}{}",
                if l.pass { "PASS" } else { "FAIL" },
                l.lemma,
                l.residual,
                l.tolerance,
                l.vanishing.map(|z| format!("  vanishing {z:.2e}")).unwrap_or_default()
            );
        }
        for c in &v.checks {
            let _ = writeln!(
                text,
                "  {:<4} {:<22} {:>12.4e}  tol {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            );
        }
        pass &= v.pass;
    }
    if !found {
        return Err(format!("no summary.json or lemmas.json in {}", out.display()));
    }
    Ok((text, pass))
}

#[derive(serde::Deserialize)]
struct LemmaView {
    lemma: String,
    #[serde(deserialize_with = "nullable_f64")]
    residual: f64,
    tolerance: f64,
    pass: bool,
    vanishing: Option<f64>,
}

#[derive(serde::Deserialize)]
struct CheckView {
    name: String,
    #[serde(deserialize_with = "nullable_f64")]
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(serde::Deserialize)]
struct VerifyReportView {
    lemmas: Vec<LemmaView>,
    checks: Vec<CheckView>,
    pass: bool,
}

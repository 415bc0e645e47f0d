use serde::Serialize;

/// Least-squares fit of `y ≈ C e^{−λt}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub lambda: f64,
    pub c: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r2: f64,
    /// Root mean square residual of `log y`.
    pub rms: f64,
    pub samples: usize,
    /// Set when the sampled values increase somewhere.
    pub non_monotone: bool,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FitError {
    #[error("decay fit needs at least {needed} positive samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub const MIN_FIT_SAMPLES: usize = 20;

pub fn decay_fit(t: &[f64], y: &[f64]) -> Result<DecayFit, FitError> {
    assert_eq!(t.len(), y.len());
    let pts: Vec<(f64, f64)> = t.iter().zip(y).filter(|(_, &v)| v > 0.0 && v.is_finite()).map(|(&a, &b)| (a, b.ln())).collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(FitError::TooFewSamples { needed: MIN_FIT_SAMPLES, got: pts.len() });
    }
    let n = pts.len() as f64;
    let (mt, ml) = pts.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + t / n, b + l / n));
    let (mut stt, mut stl, mut sll) = (0.0, 0.0, 0.0);
    for (t, l) in &pts {
        stt += (t - mt) * (t - mt);
        stl += (t - mt) * (l - ml);
        sll += (l - ml) * (l - ml);
    }
    let slope = stl / stt;
    let icpt = ml - slope * mt;
    let sse: f64 = pts.iter().map(|(t, l)| (l - icpt - slope * t).powi(2)).sum();
    let r2 = if sll > 0.0 { 1.0 - sse / sll } else { 1.0 };
    let non_monotone = y.windows(2).any(|w| w[1] > w[0]);
    Ok(DecayFit { lambda: -slope, c: icpt.exp(), r2, rms: (sse / n).sqrt(), samples: pts.len(), non_monotone })
}

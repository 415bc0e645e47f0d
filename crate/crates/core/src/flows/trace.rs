use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fit::{decay_fit, DecayFit, FitError};
use super::kind::FlowKind;

/// Diagnostics of one stored state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    /// `osc |Ω|_{ω̃}`.
    pub osc_norm: f64,
    /// Smallest eigenvalue of `h̃`.
    pub min_eig: f64,
    /// `∫ ω̃^n / n!`.
    pub volume: f64,
    pub limit_residual: f64,
    /// `osc du/dt`.
    pub dudt_osc: f64,
    /// `‖du/dt − mean du/dt‖_∞`.
    pub dudt_dev: f64,
    /// `‖h̃ − I‖_∞`.
    pub dist_flat: f64,
    /// Step taken after this record (zero for the last one).
    pub dt: f64,
}

pub const CSV_HEADER: &str = "t,osc_norm,min_eig,volume,limit_residual,dudt_osc";
/// Header of the lossless form that also carries the in-memory fields.
pub const FULL_CSV_HEADER: &str = "t,osc_norm,min_eig,volume,limit_residual,dudt_osc,dudt_dev,dist_flat,dt";

#[derive(Clone, Debug, Default)]
pub struct FlowTrace {
    pub kind: Option<FlowKind>,
    pub records: Vec<TraceRecord>,
    pub converged: bool,
}

impl FlowTrace {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Steps between consecutive records.
    pub fn steps(&self) -> Vec<f64> {
        self.records.windows(2).map(|w| w[1].t - w[0].t).collect()
    }

    /// Fit of `‖du/dt − mean‖_∞` over the second half of the trace.
    pub fn decay_fit(&self) -> Result<DecayFit, FitError> {
        let tail = &self.records[self.records.len() / 2..];
        let t: Vec<f64> = tail.iter().map(|r| r.t).collect();
        let y: Vec<f64> = tail.iter().map(|r| r.dudt_dev).collect();
        decay_fit(&t, &y)
    }

    /// Largest relative drift of the volume from its initial value.
    pub fn volume_drift(&self) -> f64 {
        let v0 = self.records.first().map_or(1.0, |r| r.volume);
        self.records.iter().map(|r| ((r.volume - v0) / v0).abs()).fold(0.0, f64::max)
    }

    /// Whether `osc |Ω|` never increases over the second half.
    pub fn tail_monotone(&self) -> bool {
        self.records[self.records.len() / 2..].windows(2).all(|w| w[1].osc_norm <= w[0].osc_norm)
    }

    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.records {
            write_row(w, r)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> io::Result<()> {
        let mut f = io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)?;
        f.flush()
    }

    /// Every field of every record, exactly.
    pub fn write_full_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{FULL_CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.t, r.osc_norm, r.min_eig, r.volume, r.limit_residual, r.dudt_osc, r.dudt_dev, r.dist_flat, r.dt
            )?;
        }
        Ok(())
    }

    /// Reads either CSV form; fields absent from the short form are zero.
    pub fn read_csv(r: impl BufRead) -> io::Result<Vec<TraceRecord>> {
        let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let cols = match header.trim() {
            CSV_HEADER => 6,
            FULL_CSV_HEADER => 9,
            _ => return Err(bad("missing trace header".into())),
        };
        let mut out = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| bad(format!("{e}: {line}"))))
                .collect::<Result<_, _>>()?;
            if v.len() != cols {
                return Err(bad(format!("expected {cols} columns: {line}")));
            }
            let extra = |i: usize| if cols > i { v[i] } else { 0.0 };
            out.push(TraceRecord {
                t: v[0],
                osc_norm: v[1],
                min_eig: v[2],
                volume: v[3],
                limit_residual: v[4],
                dudt_osc: v[5],
                dudt_dev: extra(6),
                dist_flat: extra(7),
                dt: extra(8),
            });
        }
        Ok(out)
    }
}

pub fn write_row(w: &mut impl Write, r: &TraceRecord) -> io::Result<()> {
    writeln!(w, "{:e},{:e},{:e},{:e},{:e},{:e}", r.t, r.osc_norm, r.min_eig, r.volume, r.limit_residual, r.dudt_osc)
}

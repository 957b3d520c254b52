//! Sample grids for sweeps.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `samples` points from `lo` to `hi` inclusive.
pub fn real_grid(lo: f64, hi: f64, samples: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if samples < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let last = (samples - 1) as f64;
    let points = match spacing {
        Spacing::Linear => (0..samples)
            .map(|i| {
                if i + 1 == samples {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / last
                }
            })
            .collect(),
        Spacing::Log => {
            if !(lo > 0.0) {
                return Err(Error::Domain("log spacing needs lo > 0".into()));
            }
            let (l0, l1) = (lo.ln(), hi.ln());
            (0..samples)
                .map(|i| match i {
                    0 => lo,
                    _ if i + 1 == samples => hi,
                    _ => (l0 + (l1 - l0) * i as f64 / last).exp(),
                })
                .collect()
        }
    };
    Ok(points)
}

/// Integer grid: the real grid rounded, with duplicates removed.
pub fn integer_grid(lo: u64, hi: u64, samples: usize, spacing: Spacing) -> Result<Vec<u64>> {
    if lo >= hi {
        return Err(Error::Domain(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let mut out: Vec<u64> = real_grid(lo as f64, hi as f64, samples, spacing)?
        .into_iter()
        .map(|v| (v.round() as u64).clamp(lo, hi))
        .collect();
    out.dedup();
    Ok(out)
}

/// Geometric grid with a fixed density per decade.
pub fn per_decade(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(lo < hi) {
        return Err(Error::Domain(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let decades = (hi / lo).log10();
    let samples = ((decades * per_decade as f64).ceil() as usize + 1).max(2);
    real_grid(lo, hi, samples, Spacing::Log)
}

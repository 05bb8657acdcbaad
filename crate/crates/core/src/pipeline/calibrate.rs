//! Cut-off threshold estimation from a score histogram.
//!
//! Scores are binned into equal-width bins over `[min, max]` and the counts are
//! smoothed with a centered moving average. The threshold is the center of the
//! lowest smoothed bin in the valley separating the two dominant modes. The
//! first mode is the highest local maximum; the second is the local maximum
//! with the deepest valley between it and the first, so that sampling ripples
//! inside one cluster are not mistaken for a second cluster.
//!
//! With fewer than two local maxima the threshold falls back to the bin
//! boundary with the largest smoothed-count drop on either flank of the
//! highest peak.

use serde::Serialize;

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
    pub smoothed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMethod {
    /// Minimum between two modes.
    Valley,
    /// Largest drop next to a single mode.
    DropFallback,
    /// All scores equal (or too few to histogram); threshold is that score.
    Degenerate,
}

impl CalibrationMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CalibrationMethod::Valley => "valley",
            CalibrationMethod::DropFallback => "drop_fallback",
            CalibrationMethod::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub tau: f64,
    pub method: CalibrationMethod,
    /// Bin indices of the two modes when the valley rule applied.
    pub modes: Option<(usize, usize)>,
    pub bins: Vec<HistogramBin>,
}

impl Calibration {
    /// `bin_left,bin_right,count,smoothed_count` rows with a header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count,smoothed_count\n");
        for b in &self.bins {
            out.push_str(&format!("{},{},{},{}\n", b.left, b.right, b.count, b.smoothed));
        }
        out
    }
}

/// Centered moving average; windows are truncated at the edges.
pub fn smooth(counts: &[usize], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..counts.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(counts.len() - 1);
            let sum: usize = counts[lo..=hi].iter().sum();
            sum as f64 / (hi - lo + 1) as f64
        })
        .collect()
}

/// Local maxima of `s`, plateaus reported once at their middle. Zero-height
/// plateaus are ignored.
pub fn local_maxima(s: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut a = 0;
    while a < s.len() {
        let mut b = a;
        while b + 1 < s.len() && s[b + 1] == s[a] {
            b += 1;
        }
        let left_lower = a == 0 || s[a - 1] < s[a];
        let right_lower = b + 1 == s.len() || s[b + 1] < s[a];
        if left_lower && right_lower && s[a] > 0.0 {
            peaks.push((a + b) / 2);
        }
        a = b + 1;
    }
    peaks
}

fn argmax_first(s: &[f64], idx: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in idx {
        if best.is_none_or(|b| s[i] > s[b]) {
            best = Some(i);
        }
    }
    best
}

pub fn calibrate_tau(scores: &[f64], bins: usize, window: usize) -> Result<Calibration, PipelineError> {
    if bins == 0 || window == 0 || window.is_multiple_of(2) {
        return Err(PipelineError::InvalidConfig(format!(
            "calibration needs bins >= 1 and an odd window, got bins={bins} window={window}"
        )));
    }
    let finite: Vec<f64> = scores.iter().copied().filter(|s| s.is_finite()).collect();
    if finite.len() < 2 {
        return Err(PipelineError::InsufficientData { got: finite.len(), needed: 2 });
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        let bins = vec![HistogramBin { left: min, right: max, count: finite.len(), smoothed: finite.len() as f64 }];
        return Ok(Calibration { tau: min, method: CalibrationMethod::Degenerate, modes: None, bins });
    }

    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in &finite {
        let k = (((s - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let smoothed = smooth(&counts, window);
    let edge = |k: usize| if k == bins { max } else { min + width * k as f64 };
    let hist: Vec<HistogramBin> = (0..bins)
        .map(|k| HistogramBin { left: edge(k), right: edge(k + 1), count: counts[k], smoothed: smoothed[k] })
        .collect();

    let peaks = local_maxima(&smoothed);
    let first = argmax_first(&smoothed, peaks.iter().copied())
        .or_else(|| argmax_first(&smoothed, 0..bins))
        .expect("at least one bin");

    if peaks.len() >= 2 {
        let between_min = |a: usize, b: usize| {
            let (lo, hi) = (a.min(b), a.max(b));
            smoothed[lo + 1..hi].iter().copied().fold(f64::INFINITY, f64::min)
        };
        let mut second: Option<(usize, f64)> = None;
        for &p in peaks.iter().filter(|&&p| p != first) {
            let depth = smoothed[p] - between_min(first, p);
            let better = match second {
                None => true,
                Some((q, d)) => depth > d || (depth == d && smoothed[p] > smoothed[q]),
            };
            if better {
                second = Some((p, depth));
            }
        }
        let (second, _) = second.expect("two peaks");
        let (lo, hi) = (first.min(second), first.max(second));
        let floor = between_min(lo, hi);
        let lows: Vec<usize> = (lo + 1..hi).filter(|&k| smoothed[k] == floor).collect();
        let valley = lows[lows.len() / 2];
        let tau = (edge(valley) + edge(valley + 1)) / 2.0;
        return Ok(Calibration { tau, method: CalibrationMethod::Valley, modes: Some((lo, hi)), bins: hist });
    }

    // Single mode: steepest drop on either flank of the peak.
    let mut best: Option<(f64, f64)> = None; // (drop, boundary)
    for k in first..bins - 1 {
        let drop = smoothed[k] - smoothed[k + 1];
        if best.is_none_or(|(d, _)| drop > d) {
            best = Some((drop, edge(k + 1)));
        }
    }
    for k in 1..=first {
        let drop = smoothed[k] - smoothed[k - 1];
        if best.is_none_or(|(d, _)| drop > d) {
            best = Some((drop, edge(k)));
        }
    }
    let tau = best.map_or(edge(first + 1), |(_, b)| b);
    Ok(Calibration { tau, method: CalibrationMethod::DropFallback, modes: None, bins: hist })
}

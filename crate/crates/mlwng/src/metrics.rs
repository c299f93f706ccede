//! Trajectory recording and summary statistics.
//!
//! Runs are sampled on a geometric step schedule (50 samples per decade,
//! plus forced samples at step 1 and at termination) so that 1e7-step
//! trajectories stay small. The success rate of a sample is computed over
//! the bin of interactions since the previous sample.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("sample at step {step} is not after the previous sample at step {prev}")]
    OutOfOrder { step: u64, prev: u64 },
    #[error("stagnation window {tau} exceeds the recorded horizon {horizon}")]
    WindowTooLong { tau: u64, horizon: u64 },
    #[error("no samples recorded")]
    NoSamples,
    #[error("empty input")]
    EmptyInput,
}

/// Width of the stagnation window used when none is configured.
pub const DEFAULT_STAGNATION_WINDOW: u64 = 1_000_000;

/// Samples recorded per decade of steps.
pub const SAMPLES_PER_DECADE: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSample {
    pub step: u64,
    /// Total words across all memories.
    pub n_total: u64,
    /// Distinct names across all memories.
    pub n_diff: u64,
    /// Successful fraction of the interactions since the previous sample.
    pub success_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsSeries {
    samples: Vec<MetricsSample>,
}

impl MetricsSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sample; `success_rate` is `successes / interactions` over
    /// the bin, or 0 for an empty bin (forced terminal samples).
    pub fn record(
        &mut self,
        step: u64,
        n_total: u64,
        n_diff: u64,
        successes: u64,
        interactions: u64,
    ) -> Result<(), MetricsError> {
        if let Some(last) = self.samples.last() {
            if step <= last.step {
                return Err(MetricsError::OutOfOrder {
                    step,
                    prev: last.step,
                });
            }
        }
        let success_rate = if interactions == 0 {
            0.0
        } else {
            successes as f64 / interactions as f64
        };
        self.samples.push(MetricsSample {
            step,
            n_total,
            n_diff,
            success_rate,
        });
        Ok(())
    }

    pub fn samples(&self) -> &[MetricsSample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&MetricsSample> {
        self.samples.last()
    }

    /// True iff the distinct-name count never changed over the final
    /// window of `tau` steps: the latest sample at or before `horizon -
    /// tau` anchors the comparison and every later sample must match it.
    pub fn detect_stagnation(&self, tau: u64) -> Result<bool, MetricsError> {
        let last = self.samples.last().ok_or(MetricsError::NoSamples)?;
        let horizon = last.step;
        if tau > horizon {
            return Err(MetricsError::WindowTooLong { tau, horizon });
        }
        let window_start = horizon - tau;
        let anchor = self
            .samples
            .iter()
            .rev()
            .find(|s| s.step <= window_start)
            .ok_or(MetricsError::WindowTooLong { tau, horizon })?;
        Ok(self
            .samples
            .iter()
            .filter(|s| s.step > window_start)
            .all(|s| s.n_diff == anchor.n_diff))
    }
}

/// Geometric sample schedule starting at step 1.
#[derive(Debug, Clone)]
pub struct SampleSchedule {
    next: u64,
    ratio: f64,
}

impl Default for SampleSchedule {
    fn default() -> Self {
        SampleSchedule {
            next: 1,
            ratio: 10f64.powf(1.0 / SAMPLES_PER_DECADE as f64),
        }
    }
}

impl SampleSchedule {
    pub fn due(&self, step: u64) -> bool {
        step >= self.next
    }

    /// Moves the schedule strictly past `step`; consecutive points always
    /// differ by at least one step.
    pub fn advance_past(&mut self, step: u64) {
        while self.next <= step {
            self.next = ((self.next as f64 * self.ratio).ceil() as u64).max(self.next + 1);
        }
    }
}

/// Box-plot summary: quartiles by linear interpolation, outliers beyond
/// 1.5 IQR from the quartiles, whiskers at the furthest non-outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
    pub mean: f64,
}

pub fn box_stats(values: &[f64]) -> Result<BoxStats, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    };
    let (q1, median, q3) = (quantile(0.25), quantile(0.5), quantile(0.75));
    let iqr = q3 - q1;
    let (low_fence, high_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let mut outliers = Vec::new();
    let mut whisker_low = f64::INFINITY;
    let mut whisker_high = f64::NEG_INFINITY;
    for &v in &sorted {
        if v < low_fence || v > high_fence {
            outliers.push(v);
        } else {
            whisker_low = whisker_low.min(v);
            whisker_high = whisker_high.max(v);
        }
    }
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    Ok(BoxStats {
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
        mean,
    })
}

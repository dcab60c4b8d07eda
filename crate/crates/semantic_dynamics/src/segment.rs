use serde::{Deserialize, Serialize};

use crate::{SdaError, SemanticTrace};

/// Outlier rule for Global ΔDrift peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakPolicy {
    /// Peaks must exceed `mean + z * std` of ΔD over indices 2..=n.
    pub z: f64,
    /// Peaks closer than this many tokens are merged into the strongest one.
    pub min_gap: usize,
}

impl Default for PeakPolicy {
    fn default() -> Self {
        Self { z: 2.0, min_gap: 5 }
    }
}

impl PeakPolicy {
    pub fn validate(&self) -> Result<(), SdaError> {
        if !self.z.is_finite() {
            return Err(SdaError::InvalidParameter(format!("z must be finite, got {}", self.z)));
        }
        Ok(())
    }
}

/// Inclusive 1-based token range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..=self.end).contains(&i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    /// Token indices that open a new segment, strictly ascending in (1, n].
    pub boundaries: Vec<usize>,
    pub segments: Vec<Segment>,
    pub peak_policy: PeakPolicy,
}

impl Segmentation {
    /// Segment index (0-based) holding token `i`.
    pub fn segment_of(&self, i: usize) -> Option<usize> {
        self.segments.iter().position(|s| s.contains(i))
    }

    pub fn token_count(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end)
    }
}

pub fn segment(trace: &SemanticTrace, policy: PeakPolicy) -> Result<Segmentation, SdaError> {
    segment_series(&trace.global_delta_drift, policy)
}

/// Segments a raw ΔD series whose element 0 is token 1.
pub fn segment_series(delta_drift: &[f64], policy: PeakPolicy) -> Result<Segmentation, SdaError> {
    policy.validate()?;
    let n = delta_drift.len();
    if n == 0 {
        return Err(SdaError::EmptyText);
    }
    let boundaries = if n < 2 { Vec::new() } else { peaks(delta_drift, policy) };
    let mut segments = Vec::with_capacity(boundaries.len() + 1);
    let mut start = 1;
    for &b in &boundaries {
        segments.push(Segment { start, end: b - 1 });
        start = b;
    }
    segments.push(Segment { start, end: n });
    Ok(Segmentation { boundaries, segments, peak_policy: policy })
}

fn peaks(dd: &[f64], policy: PeakPolicy) -> Vec<usize> {
    let tail = &dd[1..];
    let m = tail.len() as f64;
    let mean = tail.iter().sum::<f64>() / m;
    let var = tail.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    let threshold = mean + policy.z * var.sqrt();
    let candidates: Vec<usize> = (2..=dd.len()).filter(|&i| dd[i - 1] > threshold).collect();

    let mut out: Vec<usize> = Vec::new();
    let mut cluster_last = 0;
    for i in candidates {
        match out.last_mut() {
            Some(best) if i - cluster_last < policy.min_gap => {
                if dd[i - 1] > dd[*best - 1] {
                    *best = i;
                }
            }
            _ => out.push(i),
        }
        cluster_last = i;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spike(n: usize, at: &[(usize, f64)]) -> Vec<f64> {
        let mut v = vec![0.01; n];
        v[0] = 0.0;
        for &(i, h) in at {
            v[i - 1] = h;
        }
        v
    }

    #[test]
    fn constant_series_is_one_segment() {
        let s = segment_series(&[0.0, 0.2, 0.2, 0.2, 0.2], PeakPolicy::default()).unwrap();
        assert!(s.boundaries.is_empty());
        assert_eq!(s.segments, [Segment { start: 1, end: 5 }]);
    }

    #[test]
    fn single_token_is_one_segment() {
        let s = segment_series(&[0.0], PeakPolicy::default()).unwrap();
        assert_eq!(s.segments, [Segment { start: 1, end: 1 }]);
    }

    #[test]
    fn planted_spike_is_recovered() {
        let s = segment_series(&spike(30, &[(17, 0.5)]), PeakPolicy::default()).unwrap();
        assert_eq!(s.boundaries, [17]);
        assert_eq!(s.segments, [Segment { start: 1, end: 16 }, Segment { start: 17, end: 30 }]);
    }

    #[test]
    fn close_peaks_merge_into_the_strongest() {
        let dd = spike(40, &[(10, 0.4), (12, 0.6), (30, 0.5)]);
        let s = segment_series(&dd, PeakPolicy { z: 1.0, min_gap: 5 }).unwrap();
        assert_eq!(s.boundaries, [12, 30]);
        let s = segment_series(&dd, PeakPolicy { z: 1.0, min_gap: 1 }).unwrap();
        assert_eq!(s.boundaries, [10, 12, 30]);
    }

    #[test]
    fn equal_peaks_keep_the_earliest() {
        let dd = spike(40, &[(10, 0.5), (12, 0.5)]);
        let s = segment_series(&dd, PeakPolicy { z: 1.0, min_gap: 5 }).unwrap();
        assert_eq!(s.boundaries, [10]);
    }

    #[test]
    fn first_token_never_bounds() {
        let mut dd = spike(10, &[]);
        dd[0] = 9.0;
        assert!(segment_series(&dd, PeakPolicy::default()).unwrap().boundaries.is_empty());
    }

    #[test]
    fn non_finite_z_is_rejected() {
        assert!(segment_series(&[0.0, 1.0], PeakPolicy { z: f64::NAN, min_gap: 5 }).is_err());
    }
}

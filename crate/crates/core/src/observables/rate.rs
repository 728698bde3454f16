use serde::{Deserialize, Serialize};

use crate::series::TimeSeries;

/// Populations at or below this are too small to differentiate meaningfully.
pub const POPULATION_FLOOR: f64 = 1e-10;

/// Settings for [`decay_rate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateOptions {
    /// Boxcar width in samples; 0 or 1 disables smoothing.
    pub smoothing: usize,
    pub floor: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self { smoothing: 5, floor: POPULATION_FLOOR }
    }
}

/// `Gamma(t) = -P'(t)/P(t)` together with the sample times that were dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecayRate {
    pub rate: TimeSeries,
    /// Times whose population was below the floor.
    pub gaps: Vec<f64>,
}

impl DecayRate {
    pub fn has_gaps(&self) -> bool {
        !self.gaps.is_empty()
    }
}

/// Time-dependent decay rate of a sampled population.
///
/// Derivatives use second-order finite differences on the (possibly
/// nonuniform) sample grid. Negative values mean the population is growing.
pub fn decay_rate(population: &TimeSeries, opts: &RateOptions) -> DecayRate {
    let mut out = DecayRate::default();
    let (t, p) = (&population.times, &population.values);
    let mut i = 0;
    while i < t.len() {
        if !(p[i] > opts.floor) {
            out.gaps.push(t[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < t.len() && p[i] > opts.floor {
            i += 1;
        }
        let (ts, ps) = (&t[start..i], &p[start..i]);
        if ts.len() < 2 {
            out.gaps.extend_from_slice(ts);
            continue;
        }
        let mut rates: Vec<f64> = derivative(ts, ps).iter().zip(ps).map(|(d, v)| -d / v).collect();
        if opts.smoothing > 1 {
            rates = boxcar(&rates, opts.smoothing);
        }
        out.rate.times.extend_from_slice(ts);
        out.rate.values.extend(rates);
    }
    if out.has_gaps() {
        log::warn!("decay rate skipped {} samples below the population floor", out.gaps.len());
    }
    out
}

/// Second-order accurate derivative on a nonuniform grid.
fn derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n == 2 {
        let d = (y[1] - y[0]) / (t[1] - t[0]);
        return vec![d, d];
    }
    let three = |i: usize, at: usize| {
        // Lagrange derivative through (i, i+1, i+2) evaluated at sample `at`
        let (x0, x1, x2) = (t[i], t[i + 1], t[i + 2]);
        let x = t[at];
        let l0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let l1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let l2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        l0 * y[i] + l1 * y[i + 1] + l2 * y[i + 2]
    };
    let mut d = Vec::with_capacity(n);
    d.push(three(0, 0));
    for k in 1..n - 1 {
        d.push(three(k - 1, k));
    }
    d.push(three(n - 3, n - 1));
    d
}

/// Centered moving average that shrinks near the ends.
fn boxcar(v: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..v.len())
        .map(|i| {
            let r = half.min(i).min(v.len() - 1 - i);
            let s = &v[i - r..=i + r];
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_rate() {
        let times: Vec<f64> = (0..400).map(|i| i as f64 * 0.5).collect();
        let p: Vec<f64> = times.iter().map(|t| (-0.05 * t).exp()).collect();
        let r = decay_rate(&TimeSeries::new(times, p), &RateOptions { smoothing: 0, ..Default::default() });
        for v in &r.rate.values {
            assert!((v / 0.05 - 1.0).abs() < 1e-3, "{v}");
        }
        assert!(!r.has_gaps());
    }

    #[test]
    fn nonuniform_grid_is_second_order() {
        let times: Vec<f64> = (0..60).map(|i| (i as f64 * 0.1).powf(1.3)).collect();
        let y: Vec<f64> = times.iter().map(|t| t * t).collect();
        let d = derivative(&times, &y);
        for (t, v) in times.iter().zip(d) {
            assert!((v - 2.0 * t).abs() < 1e-9);
        }
    }

    #[test]
    fn floor_creates_gaps() {
        let times: Vec<f64> = (0..10).map(f64::from).collect();
        let mut p = vec![0.5; 10];
        p[4] = 0.0;
        p[5] = 1e-12;
        let r = decay_rate(&TimeSeries::new(times, p), &RateOptions::default());
        assert_eq!(r.gaps, vec![4.0, 5.0]);
        assert_eq!(r.rate.len(), 8);
        assert!(r.rate.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn growth_gives_negative_rate() {
        let times: Vec<f64> = (0..20).map(f64::from).collect();
        let p: Vec<f64> = times.iter().map(|t| 0.1 + 0.01 * t).collect();
        let r = decay_rate(&TimeSeries::new(times, p), &RateOptions::default());
        assert!(r.rate.values.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn boxcar_preserves_constants() {
        assert_eq!(boxcar(&[2.0; 7], 5), vec![2.0; 7]);
        assert_eq!(boxcar(&[0.0, 3.0, 0.0], 3), vec![0.0, 1.0, 0.0]);
    }
}

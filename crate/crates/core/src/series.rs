//! Sampled one-dimensional data: time traces and spatial profiles.

use serde::{Deserialize, Serialize};

/// Values sampled at strictly increasing times.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// How the field profile `sin(k_n z)` enters an intensity evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntensityMode {
    /// Exact standing-wave profile, carrier fringes included.
    Raw,
    /// Carrier-averaged: right- and left-moving envelopes added in intensity.
    #[default]
    Envelope,
}

/// Values sampled on a spatial grid at one instant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpatialProfile {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
    pub time: f64,
    pub mode: IntensityMode,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len(), "time series length mismatch");
        Self { times, values }
    }

    /// Alias of [`TimeSeries::new`] that reads better at call sites.
    pub fn population(times: Vec<f64>, values: Vec<f64>) -> Self {
        Self::new(times, values)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation, clamped at the ends.
    pub fn at(&self, t: f64) -> f64 {
        interpolate(&self.times, &self.values, t)
    }

    /// `(t, value)` of the largest sample with `t0 <= t <= t1`.
    pub fn max_in(&self, t0: f64, t1: f64) -> Option<(f64, f64)> {
        self.extreme_in(t0, t1, |a, b| a > b)
    }

    /// `(t, value)` of the smallest sample with `t0 <= t <= t1`.
    pub fn min_in(&self, t0: f64, t1: f64) -> Option<(f64, f64)> {
        self.extreme_in(t0, t1, |a, b| a < b)
    }

    fn extreme_in(&self, t0: f64, t1: f64, better: impl Fn(f64, f64) -> bool) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (&t, &v) in self.times.iter().zip(&self.values) {
            if t < t0 || t > t1 || !v.is_finite() {
                continue;
            }
            if best.is_none_or(|(_, b)| better(v, b)) {
                best = Some((t, v));
            }
        }
        best
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.times.clone(), self.values.iter().map(|v| v * factor).collect())
    }
}

impl SpatialProfile {
    pub fn new(positions: Vec<f64>, values: Vec<f64>, time: f64, mode: IntensityMode) -> Self {
        assert_eq!(positions.len(), values.len(), "profile length mismatch");
        Self { positions, values, time, mode }
    }

    pub fn at(&self, z: f64) -> f64 {
        interpolate(&self.positions, &self.values, z)
    }

    /// Trapezoid integral over the whole grid.
    pub fn integral(&self) -> f64 {
        self.positions
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(z, v)| 0.5 * (z[1] - z[0]) * (v[0] + v[1]))
            .sum()
    }

    /// `(position, value)` of the largest sample.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.positions
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(&z, &v)| (z, v))
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.len() {
        0 => f64::NAN,
        1 => ys[0],
        _ => {
            if x <= xs[0] {
                return ys[0];
            }
            let last = xs.len() - 1;
            if x >= xs[last] {
                return ys[last];
            }
            let j = xs.partition_point(|&v| v <= x);
            let (x0, x1) = (xs[j - 1], xs[j]);
            let w = (x - x0) / (x1 - x0);
            ys[j - 1] * (1.0 - w) + ys[j] * w
        }
    }
}

//! Binned accumulators over the plane of scaled outcomes, and the slope
//! extraction used for the back-action summary curves.
//!
//! Accumulators merge associatively, so trial ranges can be processed in
//! parallel and combined in a fixed order for bit-reproducible results.

use thiserror::Error;

use crate::fit::{weighted_linear_fit, FitError, FitResult};

/// Square grid over the `(i, q)` outcome plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapGrid {
    pub bins: usize,
    pub min: f64,
    pub max: f64,
}

impl MapGrid {
    /// The tomogram default: 201 x 201 bins over [-6, 6]^2.
    pub const DEFAULT: Self = Self {
        bins: 201,
        min: -6.0,
        max: 6.0,
    };

    pub fn new(bins: usize, min: f64, max: f64) -> Self {
        assert!(bins > 0 && max > min);
        Self { bins, min, max }
    }

    pub fn width(&self) -> f64 {
        (self.max - self.min) / self.bins as f64
    }

    /// Bin index of a coordinate, or None when outside [min, max).
    pub fn index(&self, v: f64) -> Option<usize> {
        if v < self.min || !v.is_finite() {
            return None;
        }
        let k = ((v - self.min) / self.width()) as usize;
        if k < self.bins {
            Some(k)
        } else {
            None
        }
    }

    pub fn center(&self, k: usize) -> f64 {
        self.min + (k as f64 + 0.5) * self.width()
    }
}

/// Per-bin count, sum, and sum of squares of one conditioned quantity over
/// the outcome plane. Entries outside the grid are tallied in an overflow
/// bucket so the total always equals the number of accumulated trials.
#[derive(Clone, Debug)]
pub struct ConditionalMap {
    pub grid: MapGrid,
    count: Vec<u64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    overflow_count: u64,
    overflow_sum: f64,
}

impl ConditionalMap {
    pub fn new(grid: MapGrid) -> Self {
        let n = grid.bins * grid.bins;
        Self {
            grid,
            count: vec![0; n],
            sum: vec![0.0; n],
            sum_sq: vec![0.0; n],
            overflow_count: 0,
            overflow_sum: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, i: f64, q: f64, value: f64) {
        match (self.grid.index(i), self.grid.index(q)) {
            (Some(bi), Some(bq)) => {
                let k = bi * self.grid.bins + bq;
                self.count[k] += 1;
                self.sum[k] += value;
                self.sum_sq[k] += value * value;
            }
            _ => {
                self.overflow_count += 1;
                self.overflow_sum += value;
            }
        }
    }

    /// Fold another accumulator in; order of merges must be fixed by the
    /// caller for bitwise reproducibility.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.grid, other.grid);
        for k in 0..self.count.len() {
            self.count[k] += other.count[k];
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self.overflow_count += other.overflow_count;
        self.overflow_sum += other.overflow_sum;
    }

    pub fn count_at(&self, bi: usize, bq: usize) -> u64 {
        self.count[bi * self.grid.bins + bq]
    }

    /// Conditional mean in a bin; None when empty.
    pub fn mean_at(&self, bi: usize, bq: usize) -> Option<f64> {
        let k = bi * self.grid.bins + bq;
        if self.count[k] == 0 {
            None
        } else {
            Some(self.sum[k] / self.count[k] as f64)
        }
    }

    /// Standard error of the bin mean from the within-bin variance.
    pub fn se_at(&self, bi: usize, bq: usize) -> Option<f64> {
        let k = bi * self.grid.bins + bq;
        let n = self.count[k];
        if n < 2 {
            return None;
        }
        let n = n as f64;
        let mean = self.sum[k] / n;
        let var = (self.sum_sq[k] / n - mean * mean).max(0.0);
        Some((var / n).sqrt())
    }

    /// Entries accumulated, including overflow.
    pub fn total_entries(&self) -> u64 {
        self.count.iter().sum::<u64>() + self.overflow_count
    }

    pub fn in_grid_entries(&self) -> u64 {
        self.count.iter().sum::<u64>()
    }

    pub fn overflow_entries(&self) -> u64 {
        self.overflow_count
    }

    /// Count-weighted mean of the conditioned quantity over everything
    /// accumulated (equals the plain mean over trials).
    pub fn weighted_mean(&self) -> Option<f64> {
        let n = self.total_entries();
        if n == 0 {
            return None;
        }
        let s: f64 = self.sum.iter().sum::<f64>() + self.overflow_sum;
        Some(s / n as f64)
    }

    /// Iterate non-empty bins as `(bi, bq, count, mean)`.
    pub fn iter_filled(&self) -> impl Iterator<Item = (usize, usize, u64, f64)> + '_ {
        let bins = self.grid.bins;
        self.count.iter().enumerate().filter_map(move |(k, &n)| {
            if n == 0 {
                None
            } else {
                Some((k / bins, k % bins, n, self.sum[k] / n as f64))
            }
        })
    }
}

/// Regression abscissa for the gradient extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientAxis {
    /// Slope along the scaled I coordinate.
    I,
    /// Slope along the scaled Q coordinate.
    Q,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("only {got} counts inside the fit window; need at least {needed}")]
    InsufficientData { needed: u64, got: u64 },
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Count-weighted linear regression of the per-bin conditional means
/// against one outcome coordinate, over the window `|i|, |q| <= window`.
/// Returns slope and its standard error in `params[0]` / `errors[0]`.
///
/// Because outcomes are in sigma units, the returned slope is the scaled
/// gradient at the origin up to the window-averaging of the map.
pub fn gradient_at_origin(
    map: &ConditionalMap,
    axis: GradientAxis,
    window: f64,
) -> Result<FitResult, MapError> {
    let mut pts = Vec::new();
    let mut total = 0u64;
    for (bi, bq, n, mean) in map.iter_filled() {
        let ci = map.grid.center(bi);
        let cq = map.grid.center(bq);
        if ci.abs() <= window && cq.abs() <= window {
            total += n;
            let x = match axis {
                GradientAxis::I => ci,
                GradientAxis::Q => cq,
            };
            pts.push((x, mean, n as f64));
        }
    }
    if total < 100 {
        return Err(MapError::InsufficientData {
            needed: 100,
            got: total,
        });
    }
    Ok(weighted_linear_fit(&pts)?)
}

/// The same regression functional applied to a closed-form map evaluated
/// at the bin centers, weighted by the observed counts. Used to compare
/// simulated gradients against theory with identical window averaging.
pub fn gradient_of_model(
    map: &ConditionalMap,
    axis: GradientAxis,
    window: f64,
    model: impl Fn(f64, f64) -> f64,
) -> Result<FitResult, MapError> {
    let mut pts = Vec::new();
    let mut total = 0u64;
    for (bi, bq, n, _) in map.iter_filled() {
        let ci = map.grid.center(bi);
        let cq = map.grid.center(bq);
        if ci.abs() <= window && cq.abs() <= window {
            total += n;
            let x = match axis {
                GradientAxis::I => ci,
                GradientAxis::Q => cq,
            };
            pts.push((x, model(ci, cq), n as f64));
        }
    }
    if total < 100 {
        return Err(MapError::InsufficientData {
            needed: 100,
            got: total,
        });
    }
    Ok(weighted_linear_fit(&pts)?)
}

/// Plain 1D histogram with fixed uniform bins.
#[derive(Clone, Debug)]
pub struct Hist1D {
    pub min: f64,
    pub max: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl Hist1D {
    pub fn new(min: f64, max: f64, bins: usize) -> Self {
        Self {
            min,
            max,
            counts: vec![0; bins],
            overflow: 0,
        }
    }

    pub fn width(&self) -> f64 {
        (self.max - self.min) / self.counts.len() as f64
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        if v >= self.min && v.is_finite() {
            let k = ((v - self.min) / self.width()) as usize;
            if k < self.counts.len() {
                self.counts[k] += 1;
                return;
            }
        }
        self.overflow += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.counts.len(), other.counts.len());
        for k in 0..self.counts.len() {
            self.counts[k] += other.counts[k];
        }
        self.overflow += other.overflow;
    }

    pub fn center(&self, k: usize) -> f64 {
        self.min + (k as f64 + 0.5) * self.width()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    /// Bins as (center, count) pairs.
    pub fn bins(&self) -> Vec<(f64, f64)> {
        (0..self.counts.len())
            .map(|k| (self.center(k), self.counts[k] as f64))
            .collect()
    }
}

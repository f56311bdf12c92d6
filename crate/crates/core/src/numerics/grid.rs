use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform time grid `t0, t0 + dt, ..., t0 + (count - 1) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, count: usize) -> Result<Self> {
        if !t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        if count < 2 {
            return Err(invalid("count", format!("need at least 2 points, got {count}")));
        }
        Ok(Self { t0, dt, count })
    }

    /// Grid starting at zero covering `[0, t_max]` with step close to `dt`.
    ///
    /// The step is shrunk so that `t_max` lands exactly on the last point.
    pub fn from_zero(t_max: f64, dt: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(invalid("t_max", format!("must be positive, got {t_max}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
        Self::new(0.0, t_max / steps as f64, steps + 1)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.count - 1)
    }

    #[inline]
    pub fn time(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.time(i))
    }
}

/// Complex values sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSeries {
    grid: TimeGrid,
    values: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(crate::Error::DimensionMismatch {
                expected: grid.count(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.grid.times().zip(self.values.iter().copied())
    }
}

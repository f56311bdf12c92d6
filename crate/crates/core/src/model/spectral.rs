use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Shape of a bath coupling spectrum `J(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralShape {
    /// `(1/2π) γ0 λ² / ((ωq - ω)² + λ²)`.
    Lorentzian { gamma0: f64, lambda: f64, omega_q: f64 },
    /// `η ω^s ωc^{1-s} e^{-ω/ωc}`.
    Ohmic { eta: f64, s: f64, omega_c: f64 },
    /// `exp[-(ω - ωM)² / Δ]`.
    GaussianPeak { omega_m: f64, delta: f64 },
    /// Piecewise-linear interpolation through `(ω, J)` samples, zero outside.
    Tabulated { points: Vec<(f64, f64)> },
    /// `J ≡ 0`.
    Zero,
}

/// A spectral density together with its high-frequency truncation and an
/// overall coupling scale (`J → scale · J`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    shape: SpectralShape,
    omega_max: f64,
    scale: f64,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}

impl SpectralDensity {
    pub fn lorentzian(gamma0: f64, lambda: f64, omega_q: f64) -> Result<Self> {
        positive("gamma0", gamma0)?;
        positive("lambda", lambda)?;
        positive("omega_q", omega_q)?;
        Ok(Self {
            omega_max: omega_q + 50.0 * lambda,
            shape: SpectralShape::Lorentzian { gamma0, lambda, omega_q },
            scale: 1.0,
        })
    }

    pub fn ohmic(eta: f64, s: f64, omega_c: f64) -> Result<Self> {
        positive("eta", eta)?;
        positive("s", s)?;
        positive("omega_c", omega_c)?;
        Ok(Self {
            omega_max: 50.0 * omega_c,
            shape: SpectralShape::Ohmic { eta, s, omega_c },
            scale: 1.0,
        })
    }

    pub fn gaussian_peak(omega_m: f64, delta: f64) -> Result<Self> {
        positive("delta", delta)?;
        if !omega_m.is_finite() {
            return Err(invalid("omega_m", "must be finite"));
        }
        Ok(Self {
            omega_max: omega_m + 12.0 * delta.sqrt(),
            shape: SpectralShape::GaussianPeak { omega_m, delta },
            scale: 1.0,
        })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("points", "need at least two samples"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(invalid("points", "frequencies must be strictly increasing"));
            }
        }
        if let Some(&(omega, j)) = points.iter().find(|&&(o, j)| !(o.is_finite() && j.is_finite() && j >= 0.0 && o >= 0.0)) {
            return Err(invalid("points", format!("invalid sample ({omega}, {j})")));
        }
        Ok(Self {
            omega_max: points.last().expect("non-empty").0,
            shape: SpectralShape::Tabulated { points },
            scale: 1.0,
        })
    }

    pub fn zero() -> Self {
        Self {
            shape: SpectralShape::Zero,
            omega_max: 1.0,
            scale: 1.0,
        }
    }

    /// Replaces the default truncation frequency.
    pub fn with_omega_max(mut self, omega_max: f64) -> Result<Self> {
        positive("omega_max", omega_max)?;
        self.omega_max = omega_max;
        Ok(self)
    }

    /// Multiplies the whole spectrum by `factor ≥ 0`.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(invalid("scale", format!("must be non-negative, got {factor}")));
        }
        self.scale *= factor;
        Ok(self)
    }

    pub fn shape(&self) -> &SpectralShape {
        &self.shape
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0 || matches!(self.shape, SpectralShape::Zero)
    }

    /// `J(ω)`; zero for `ω < 0` and above the truncation frequency.
    pub fn eval(&self, omega: f64) -> f64 {
        if !(0.0..=self.omega_max).contains(&omega) {
            return 0.0;
        }
        self.scale * self.raw(omega)
    }

    fn raw(&self, omega: f64) -> f64 {
        match &self.shape {
            SpectralShape::Lorentzian { gamma0, lambda, omega_q } => {
                let d = omega_q - omega;
                gamma0 * lambda * lambda / (2.0 * PI * (d * d + lambda * lambda))
            }
            SpectralShape::Ohmic { eta, s, omega_c } => {
                eta * omega.powf(*s) * omega_c.powf(1.0 - s) * (-omega / omega_c).exp()
            }
            SpectralShape::GaussianPeak { omega_m, delta } => {
                let d = omega - omega_m;
                (-d * d / delta).exp()
            }
            SpectralShape::Tabulated { points } => interpolate(points, omega),
            SpectralShape::Zero => 0.0,
        }
    }

    /// Exponent `s` of the low-frequency power law `J(ω) ~ ω^s`.
    ///
    /// `0` when `J(0) > 0`, infinite when `J` vanishes on a neighbourhood of 0.
    pub fn low_frequency_exponent(&self) -> f64 {
        if self.is_zero() {
            return f64::INFINITY;
        }
        match &self.shape {
            SpectralShape::Ohmic { s, .. } => *s,
            SpectralShape::Tabulated { points } => {
                let (w0, j0) = points[0];
                if w0 > 0.0 {
                    f64::INFINITY
                } else if j0 > 0.0 {
                    0.0
                } else if points[1].1 > 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            _ => 0.0,
        }
    }

    /// Natural frequency scale of the spectrum, used to set small-ω cutoffs.
    pub fn frequency_scale(&self) -> f64 {
        match &self.shape {
            SpectralShape::Lorentzian { lambda, .. } => *lambda,
            SpectralShape::Ohmic { omega_c, .. } => *omega_c,
            SpectralShape::GaussianPeak { delta, .. } => delta.sqrt(),
            SpectralShape::Tabulated { .. } | SpectralShape::Zero => self.omega_max,
        }
    }

    /// Frequencies where the integrand has kinks or sharp features; used as
    /// breakpoints by the quadrature callers.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.shape {
            SpectralShape::Lorentzian { omega_q, .. } => vec![*omega_q],
            SpectralShape::GaussianPeak { omega_m, .. } => vec![*omega_m],
            SpectralShape::Tabulated { points } => points.iter().map(|p| p.0).collect(),
            _ => Vec::new(),
        };
        pts.retain(|&w| w > 0.0 && w < self.omega_max);
        pts
    }
}

fn interpolate(points: &[(f64, f64)], omega: f64) -> f64 {
    let first = points[0].0;
    let last = points[points.len() - 1].0;
    if omega < first || omega > last {
        return 0.0;
    }
    let idx = points.partition_point(|p| p.0 <= omega);
    if idx == 0 {
        return points[0].1;
    }
    if idx >= points.len() {
        return points[points.len() - 1].1;
    }
    let (w0, j0) = points[idx - 1];
    let (w1, j1) = points[idx];
    j0 + (j1 - j0) * (omega - w0) / (w1 - w0)
}

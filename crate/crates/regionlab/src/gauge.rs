//! Gauge functions `r(t)`: the width scales that shape approach regions.
//!
//! A gauge is a strictly increasing, positive function of the height `t`.
//! Cones of the form `|x| < r(t) - r(s)` (vertex at height `s`) are the
//! building blocks of every region in this crate, so the gauge determines
//! how fast a region may widen as it leaves the boundary. The ratio
//! `r(t)/t` measures *tangentiality*: bounded ratio means ordinary
//! nontangential cones, unbounded ratio (as `t -> 0`) means the region hugs
//! the boundary more and more aggressively at small scales.
//!
//! Two concrete sources are supported:
//!
//! - [`gauge_from_kernel`] tabulates `r_K(t) = 1 / (P_t * K)(0)`, the width
//!   scale of a kernel's Poisson extension, by quadrature on a log grid;
//! - [`GaugeFunction::power_law`] is the exact closed form
//!   `r(t) = c * t^e`, which for `c = cos(pi beta / 2)`, `e = beta` is the
//!   small-`t` law of the kernel gauge and is usable at arbitrarily small
//!   heights where a table cannot reach.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{self, convolve_poisson_kernel, KernelSpec, RadialKernel};

/// Errors for gauge construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gauge table needs at least two samples, got {0}")]
    TableTooSmall(usize),
    #[error("gauge table must be strictly increasing in both columns (violated at index {0})")]
    NonMonotone(usize),
    #[error("gauge sample must be positive and finite, got ({0}, {1})")]
    InvalidSample(f64, f64),
    #[error("power-law parameter must be positive and finite, got {0}")]
    InvalidParameter(f64),
    #[error("height {t} outside gauge domain [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("kernel error: {0}")]
    Kernel(#[from] kernels::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Where a gauge's values come from. This is also the serialised form: a
/// kernel-derived gauge is stored as its recipe and rebuilt (deterministic)
/// on deserialisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeSource {
    /// Exact closed form `r(t) = coefficient * t^exponent`.
    PowerLaw { coefficient: f64, exponent: f64 },
    /// Table of `r_K(t) = 1/(P_t * K)(0)` on a log grid of heights.
    KernelTable {
        kernel: KernelSpec,
        t_min: f64,
        t_max: f64,
        points: usize,
    },
    /// Explicit samples `(t, r(t))`.
    Samples { samples: Vec<(f64, f64)> },
}

/// A strictly increasing width scale `t -> r(t)`.
///
/// Power-law gauges evaluate in closed form on all of `t > 0`; tabulated
/// gauges interpolate log-log between samples and refuse to extrapolate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GaugeSource", into = "GaugeSource")]
pub struct GaugeFunction {
    source: GaugeSource,
    /// Sorted `(t, r)` samples for table sources; empty for power laws.
    table: Vec<(f64, f64)>,
}

impl PartialEq for GaugeFunction {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl TryFrom<GaugeSource> for GaugeFunction {
    type Error = Error;
    fn try_from(source: GaugeSource) -> Result<Self> {
        match source {
            GaugeSource::PowerLaw {
                coefficient,
                exponent,
            } => GaugeFunction::power_law(coefficient, exponent),
            GaugeSource::KernelTable {
                kernel,
                t_min,
                t_max,
                points,
            } => {
                let k = RadialKernel::try_from(kernel)?;
                gauge_from_kernel(&k, t_min, t_max, points)
            }
            GaugeSource::Samples { samples } => GaugeFunction::from_samples(samples),
        }
    }
}

impl From<GaugeFunction> for GaugeSource {
    fn from(g: GaugeFunction) -> Self {
        g.source
    }
}

impl GaugeFunction {
    /// The exact power law `r(t) = coefficient * t^exponent`.
    ///
    /// # Example
    ///
    /// ```
    /// use regionlab::gauge::GaugeFunction;
    ///
    /// // Unit aperture cones: r(t) = t.
    /// let unit = GaugeFunction::power_law(1.0, 1.0).unwrap();
    /// assert_eq!(unit.eval(0.25).unwrap(), 0.25);
    /// ```
    pub fn power_law(coefficient: f64, exponent: f64) -> Result<Self> {
        for &p in &[coefficient, exponent] {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(p));
            }
        }
        Ok(GaugeFunction {
            source: GaugeSource::PowerLaw {
                coefficient,
                exponent,
            },
            table: Vec::new(),
        })
    }

    /// The small-height law of a kernel's gauge:
    /// `r(t) = cos(pi beta / 2) * t^beta`.
    ///
    /// Unlike a table this is defined at arbitrarily small heights, which
    /// the deep levels of the inductive construction require.
    pub fn asymptotic_for(kernel: &RadialKernel) -> Result<Self> {
        GaugeFunction::power_law(kernel.gauge_coefficient(), kernel.beta())
    }

    /// A gauge from explicit `(t, r)` samples, strictly increasing in both
    /// coordinates.
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Result<Self> {
        validate_table(&samples)?;
        Ok(GaugeFunction {
            table: samples.clone(),
            source: GaugeSource::Samples { samples },
        })
    }

    fn from_kernel_table(
        table: Vec<(f64, f64)>,
        kernel: KernelSpec,
        t_min: f64,
        t_max: f64,
        points: usize,
    ) -> Result<Self> {
        validate_table(&table)?;
        Ok(GaugeFunction {
            table,
            source: GaugeSource::KernelTable {
                kernel,
                t_min,
                t_max,
                points,
            },
        })
    }

    /// The recipe this gauge was built from.
    pub fn source(&self) -> &GaugeSource {
        &self.source
    }

    /// Tabulated samples, empty for closed-form gauges.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.table
    }

    /// Domain of valid heights.
    pub fn domain(&self) -> (f64, f64) {
        if self.table.is_empty() {
            (0.0, f64::INFINITY)
        } else {
            (self.table[0].0, self.table[self.table.len() - 1].0)
        }
    }

    /// Evaluate `r(t)`.
    ///
    /// Tabulated gauges interpolate log-log and return
    /// [`Error::OutOfRange`] outside their sampled heights (beyond a 1e-12
    /// relative slack for endpoint roundoff).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::OutOfRange {
                t,
                lo: self.domain().0,
                hi: self.domain().1,
            });
        }
        match &self.source {
            GaugeSource::PowerLaw {
                coefficient,
                exponent,
            } => Ok(coefficient * t.powf(*exponent)),
            _ => {
                let (lo, hi) = self.domain();
                if t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12) {
                    return Err(Error::OutOfRange { t, lo, hi });
                }
                let tc = t.clamp(lo, hi);
                let idx = self
                    .table
                    .partition_point(|&(ts, _)| ts < tc)
                    .clamp(1, self.table.len() - 1);
                let (t0, r0) = self.table[idx - 1];
                let (t1, r1) = self.table[idx];
                let w = (tc.ln() - t0.ln()) / (t1.ln() - t0.ln());
                Ok((r0.ln() * (1.0 - w) + r1.ln() * w).exp())
            }
        }
    }
}

fn validate_table(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::TableTooSmall(samples.len()));
    }
    for (i, &(t, r)) in samples.iter().enumerate() {
        if !(t > 0.0 && r > 0.0) || !t.is_finite() || !r.is_finite() {
            return Err(Error::InvalidSample(t, r));
        }
        if i > 0 {
            let (tp, rp) = samples[i - 1];
            if t <= tp || r <= rp {
                return Err(Error::NonMonotone(i));
            }
        }
    }
    Ok(())
}

/// Tabulate the gauge of a kernel, `r_K(t) = 1 / (P_t * K)(0)`, on a
/// logarithmic grid of heights.
///
/// The centre value of the extension is largest at `t -> 0`, so `r_K` is
/// increasing; the build fails with [`Error::NonMonotone`] if quadrature
/// noise ever breaks that (a sign the tolerance or grid is unreasonable).
///
/// # Arguments
///
/// * `kernel` - the kernel whose extension defines the gauge.
/// * `t_min`, `t_max` - height range to tabulate, `0 < t_min < t_max`.
/// * `points` - number of grid points (at least 2).
///
/// # Example
///
/// ```
/// use regionlab::gauge::gauge_from_kernel;
/// use regionlab::kernels::RadialKernel;
///
/// let k = RadialKernel::new(0.5, 1.0).unwrap();
/// let g = gauge_from_kernel(&k, 1e-5, 1e-2, 40).unwrap();
/// // r_K(1e-4) ~ sqrt(t/2) = 7.07e-3.
/// assert!((g.eval(1e-4).unwrap() / 7.07e-3 - 1.0).abs() < 0.02);
/// ```
pub fn gauge_from_kernel(
    kernel: &RadialKernel,
    t_min: f64,
    t_max: f64,
    points: usize,
) -> Result<GaugeFunction> {
    if !(t_min > 0.0 && t_min < t_max) || !t_max.is_finite() {
        return Err(Error::InvalidParameter(t_min));
    }
    if points < 2 {
        return Err(Error::TableTooSmall(points));
    }
    let (l0, l1) = (t_min.ln(), t_max.ln());
    let mut table = Vec::with_capacity(points);
    for i in 0..points {
        let t = (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp();
        let center = convolve_poisson_kernel(kernel, t, 0.0)?;
        if !(center > 0.0) || !center.is_finite() {
            return Err(Error::InvalidSample(t, center));
        }
        table.push((t, 1.0 / center));
    }
    GaugeFunction::from_kernel_table(
        table,
        KernelSpec {
            beta: kernel.beta(),
            cutoff: kernel.cutoff(),
        },
        t_min,
        t_max,
        points,
    )
}

/// The tangentiality ratio `r(t) / t`.
///
/// Nontangential (cone-like) gauges keep this bounded; a gauge with
/// `r(t)/t -> inf` as `t -> 0` admits regions that approach the boundary
/// tangentially. For the kernel gauge the ratio grows like `t^{beta - 1}`.
pub fn tangentiality_ratio(gauge: &GaugeFunction, t: f64) -> Result<f64> {
    Ok(gauge.eval(t)? / t)
}

/// Least-squares slope of `log r` against `log t`.
///
/// For samples of an exact power law this recovers the exponent; for a
/// kernel gauge on a small-height window it estimates the effective
/// tangentiality exponent.
pub fn log_log_slope(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TableTooSmall(samples.len()));
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, r) in samples {
        if !(t > 0.0 && r > 0.0) {
            return Err(Error::InvalidSample(t, r));
        }
        let (x, y) = (t.ln(), r.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InvalidParameter(denom));
    }
    Ok((n * sxy - sx * sy) / denom)
}

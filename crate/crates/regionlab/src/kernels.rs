//! Convolution kernels and their harmonic extensions.
//!
//! The star of the module is [`RadialKernel`], the truncated power kernel
//! `K(x) = |x|^{-beta}` for `|x| <= cutoff` (zero outside), with
//! `0 < beta < 1` so that `K` is integrable. Its Poisson extension
//! `K_t = P_t * K` ([`convolve_poisson_kernel`]) is the function whose size
//! and shape drive everything else in the crate:
//!
//! - its central value `K_t(0)` defines the gauge `r_K(t) = 1 / K_t(0)`
//!   (see [`crate::gauge`]), which obeys the power law
//!   `r_K(t) ~ cos(pi*beta/2) * t^beta` as `t -> 0`;
//! - after rescaling, `K_t(y) ~ t^{-beta} * psi(y/t)` for a universal
//!   profile `psi` ([`ScaledProfile`]) depending only on `beta`, which the
//!   fast evaluation paths in [`crate::maximal`] interpolate instead of
//!   integrating afresh.
//!
//! All closed forms (the L^1 mass, the primitive, segment integrals) are
//! exact; quadrature enters only through the Poisson convolution and the
//! profile table.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{self, geometric_ladder, integrate, Tolerance};

/// Errors for kernel construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singularity exponent must lie strictly between 0 and 1, got {0}")]
    InvalidExponent(f64),
    #[error("support radius must be positive and finite, got {0}")]
    InvalidSupport(f64),
    #[error("height must be positive and finite, got {0}")]
    InvalidHeight(f64),
    #[error("argument must be finite, got {0}")]
    NonFiniteArgument(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] quad::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Poisson kernel `P_t(x) = t / (pi (t^2 + x^2))` at a fixed height `t > 0`.
///
/// Normalised so that `P_t` has unit mass on the line for every `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoissonSpec", into = "PoissonSpec")]
pub struct PoissonParams {
    t: f64,
}

/// Serialisable form of [`PoissonParams`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PoissonSpec {
    t: f64,
}

impl TryFrom<PoissonSpec> for PoissonParams {
    type Error = Error;
    fn try_from(s: PoissonSpec) -> Result<Self> {
        PoissonParams::new(s.t)
    }
}

impl From<PoissonParams> for PoissonSpec {
    fn from(p: PoissonParams) -> Self {
        PoissonSpec { t: p.t }
    }
}

impl PoissonParams {
    /// Create parameters for height `t`.
    ///
    /// # Example
    ///
    /// ```
    /// use regionlab::kernels::PoissonParams;
    ///
    /// let p = PoissonParams::new(1.0).unwrap();
    /// assert!((p.eval(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    /// ```
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidHeight(t));
        }
        Ok(PoissonParams { t })
    }

    /// The height `t`.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Kernel value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.t / (PI * (self.t * self.t + x * x))
    }

    /// Peak value `P_t(0) = 1/(pi t)`.
    pub fn sup(&self) -> f64 {
        1.0 / (PI * self.t)
    }

    /// Exact integral of `P_t` over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        ((b / self.t).atan() - (a / self.t).atan()) / PI
    }
}

/// Evaluate the Poisson kernel `P_t(x)`.
///
/// # Arguments
///
/// * `t` - height, must be positive.
/// * `x` - horizontal coordinate.
pub fn eval_poisson(t: f64, x: f64) -> Result<f64> {
    Ok(PoissonParams::new(t)?.eval(x))
}

/// Truncated power kernel `K(x) = |x|^{-beta}` on `|x| <= cutoff`.
///
/// The kernel is even, decreasing in `|x|`, integrable (`beta < 1`), and
/// unbounded at the origin (`beta > 0`); compact support keeps every mass
/// computation finite. The associated scaled profile of its Poisson
/// extension is built lazily and shared across clones.
#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "KernelSpec", into = "KernelSpec")]
pub struct RadialKernel {
    beta: f64,
    cutoff: f64,
    profile: Arc<OnceLock<ScaledProfile>>,
}

/// Serialisable form of [`RadialKernel`]: just the two shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub beta: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
}

fn default_cutoff() -> f64 {
    1.0
}

impl TryFrom<KernelSpec> for RadialKernel {
    type Error = Error;
    fn try_from(s: KernelSpec) -> Result<Self> {
        RadialKernel::new(s.beta, s.cutoff)
    }
}

impl From<RadialKernel> for KernelSpec {
    fn from(k: RadialKernel) -> Self {
        KernelSpec {
            beta: k.beta,
            cutoff: k.cutoff,
        }
    }
}

impl Clone for RadialKernel {
    fn clone(&self) -> Self {
        RadialKernel {
            beta: self.beta,
            cutoff: self.cutoff,
            profile: Arc::clone(&self.profile),
        }
    }
}

impl PartialEq for RadialKernel {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta && self.cutoff == other.cutoff
    }
}

impl RadialKernel {
    /// Create a kernel with the given singularity exponent and support
    /// radius.
    ///
    /// # Arguments
    ///
    /// * `beta` - singularity exponent, strictly between 0 and 1.
    /// * `cutoff` - support radius, positive and finite.
    ///
    /// # Example
    ///
    /// ```
    /// use regionlab::kernels::RadialKernel;
    ///
    /// let k = RadialKernel::new(0.5, 1.0).unwrap();
    /// assert_eq!(k.l1_mass(), 4.0);
    /// assert_eq!(k.eval(0.25), 2.0);
    /// assert_eq!(k.eval(1.5), 0.0);
    /// ```
    pub fn new(beta: f64, cutoff: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) || !beta.is_finite() {
            return Err(Error::InvalidExponent(beta));
        }
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidSupport(cutoff));
        }
        Ok(RadialKernel {
            beta,
            cutoff,
            profile: Arc::new(OnceLock::new()),
        })
    }

    /// The model kernel with unit support radius.
    pub fn model(beta: f64) -> Result<Self> {
        RadialKernel::new(beta, 1.0)
    }

    /// Singularity exponent `beta`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Support radius.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Kernel value at `x`. Returns `+inf` at the origin (the singularity is
    /// integrable; quadrature callers must breakpoint there).
    pub fn eval(&self, x: f64) -> f64 {
        let r = x.abs();
        if r > self.cutoff {
            0.0
        } else {
            r.powf(-self.beta)
        }
    }

    /// Exact total mass `int K = 2 cutoff^{1-beta}/(1-beta)`.
    pub fn l1_mass(&self) -> f64 {
        2.0 * self.cutoff.powf(1.0 - self.beta) / (1.0 - self.beta)
    }

    /// Exact primitive `int_0^v K(s) ds` (odd in `v`).
    pub fn primitive(&self, v: f64) -> f64 {
        let r = v.abs().min(self.cutoff);
        v.signum() * r.powf(1.0 - self.beta) / (1.0 - self.beta)
    }

    /// Exact integral of `K` over `[a, b]` for any `a <= b`.
    ///
    /// # Example
    ///
    /// ```
    /// use regionlab::kernels::RadialKernel;
    ///
    /// let k = RadialKernel::new(0.5, 1.0).unwrap();
    /// // int_{0.1}^{0.7} x^{-1/2} dx = 2 (sqrt 0.7 - sqrt 0.1)
    /// let exact = 2.0 * (0.7f64.sqrt() - 0.1f64.sqrt());
    /// assert!((k.integral(0.1, 0.7) - exact).abs() < 1e-14);
    /// ```
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.primitive(b) - self.primitive(a)
    }

    /// Leading coefficient of the gauge power law:
    /// `r_K(t) -> cos(pi beta / 2) * t^beta` as `t -> 0`, independent of the
    /// support radius.
    pub fn gauge_coefficient(&self) -> f64 {
        (FRAC_PI_2 * self.beta).cos()
    }

    /// The scaled profile of the Poisson extension, built on first use and
    /// cached (clones share the cache).
    pub fn scaled_profile(&self) -> Result<&ScaledProfile> {
        if self.profile.get().is_none() {
            let built = ScaledProfile::build(self.beta)?;
            // If another thread won the race the freshly built table is
            // dropped; both tables are identical by construction.
            let _ = self.profile.set(built);
        }
        Ok(self.profile.get().expect("profile just initialised"))
    }
}

/// Default quadrature accuracy for Poisson convolutions: the gauge tables
/// and doubling diagnostics downstream want ~9 significant digits.
fn convolution_tolerance() -> Tolerance {
    Tolerance {
        abs_tol: 1e-300,
        rel_tol: 1e-9,
        max_evaluations: 600_000,
    }
}

/// Evaluate the Poisson extension `(P_t * K)(x)` by adaptive quadrature.
///
/// Valid at any representable height: panel boundaries are seeded with
/// geometric ladders around the kernel singularity at `z = 0` and the
/// Poisson bump at `z = x` (width `t`), so the bump is resolved even when
/// `t` is hundreds of orders of magnitude below the support radius.
///
/// # Example
///
/// ```
/// use regionlab::kernels::{convolve_poisson_kernel, RadialKernel};
///
/// let k = RadialKernel::new(0.5, 1.0).unwrap();
/// // At small heights the centre value follows t^{-1/2} * sec(pi/4):
/// let v = convolve_poisson_kernel(&k, 1e-4, 0.0).unwrap();
/// assert!((v / 141.42 - 1.0).abs() < 0.02);
/// ```
pub fn convolve_poisson_kernel(kernel: &RadialKernel, t: f64, x: f64) -> Result<f64> {
    convolve_poisson_kernel_with(kernel, t, x, &convolution_tolerance())
}

/// [`convolve_poisson_kernel`] with an explicit quadrature tolerance.
pub fn convolve_poisson_kernel_with(
    kernel: &RadialKernel,
    t: f64,
    x: f64,
    tol: &Tolerance,
) -> Result<f64> {
    let p = PoissonParams::new(t)?;
    if !x.is_finite() {
        return Err(Error::NonFiniteArgument(x));
    }
    let c = kernel.cutoff();
    let mut pts = geometric_ladder(0.0, (t.min(c) * 1e-3).max(1e-300), c);
    if x.abs() < c {
        pts.extend(geometric_ladder(x, t, 2.0 * c));
    }
    let r = integrate(|z| kernel.eval(z) * p.eval(x - z), -c, c, &pts, tol)?;
    Ok(r.value)
}

/// The universal scaled profile `psi` of the Poisson extension.
///
/// For the truncated power kernel, `(P_t * K)(y) = t^{-beta} psi(y/t)` up to
/// a relative correction `O((t/cutoff)^{1+beta})`, where
///
/// `psi(eta) = (1/pi) int |eta - s|^{-beta} / (1 + s^2) ds`
///
/// depends only on `beta`. The profile satisfies `psi(0) = sec(pi beta / 2)`
/// exactly and `psi(eta) -> |eta|^{-beta}` as `|eta| -> inf`; it is even and
/// decreasing in `|eta|`. The table spans `eta` from 1e-6 to 3e6 on a
/// logarithmic grid and is evaluated by log-log interpolation, with the
/// exact endpoint behaviours taking over outside the table.
#[derive(Debug, Clone)]
pub struct ScaledProfile {
    beta: f64,
    log_eta: Vec<f64>,
    log_val: Vec<f64>,
    value_at_zero: f64,
}

const PROFILE_ETA_MIN: f64 = 1e-6;
const PROFILE_ETA_MAX: f64 = 3e6;
const PROFILE_POINTS_PER_DECADE: usize = 33;

impl ScaledProfile {
    /// Tabulate the profile for the given exponent.
    pub fn build(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) || !beta.is_finite() {
            return Err(Error::InvalidExponent(beta));
        }
        let decades = (PROFILE_ETA_MAX / PROFILE_ETA_MIN).log10();
        let n = (decades * PROFILE_POINTS_PER_DECADE as f64).ceil() as usize + 1;
        let log_min = PROFILE_ETA_MIN.ln();
        let log_max = PROFILE_ETA_MAX.ln();
        let mut log_eta = Vec::with_capacity(n);
        let mut log_val = Vec::with_capacity(n);
        for i in 0..n {
            let le = log_min + (log_max - log_min) * i as f64 / (n - 1) as f64;
            let eta = le.exp();
            let v = profile_point(beta, eta)?;
            log_eta.push(le);
            log_val.push(v.ln());
        }
        Ok(ScaledProfile {
            beta,
            log_eta,
            log_val,
            value_at_zero: 1.0 / (FRAC_PI_2 * beta).cos(),
        })
    }

    /// The exponent the table was built for.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Exact central value `sec(pi beta / 2)`.
    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    /// Profile value at `eta` (even in `eta`).
    ///
    /// Below the table the value interpolates to the exact centre; beyond it
    /// the exact power-law tail `|eta|^{-beta}` takes over (relative error
    /// of that switch is below 1e-5 at the table edge).
    pub fn eval(&self, eta: f64) -> f64 {
        let a = eta.abs();
        if a <= PROFILE_ETA_MIN {
            // psi is even and C^1, so a linear blend to the exact centre
            // value over [0, eta_min] loses less than 1e-9 relative.
            let first = self.log_val[0].exp();
            let w = a / PROFILE_ETA_MIN;
            return self.value_at_zero * (1.0 - w) + first * w;
        }
        if a >= PROFILE_ETA_MAX {
            return a.powf(-self.beta);
        }
        let la = a.ln();
        let idx = match self
            .log_eta
            .binary_search_by(|p| p.partial_cmp(&la).expect("table is finite"))
        {
            Ok(i) => return self.log_val[i].exp(),
            Err(i) => i,
        };
        let (l0, l1) = (self.log_eta[idx - 1], self.log_eta[idx]);
        let (v0, v1) = (self.log_val[idx - 1], self.log_val[idx]);
        let w = (la - l0) / (l1 - l0);
        (v0 * (1.0 - w) + v1 * w).exp()
    }
}

/// One profile ordinate `psi(eta)` by adaptive quadrature: a finite core
/// around the singularity plus two mapped tails.
///
/// The core subtracts the singularity analytically: with `w(s) = 1/(1+s^2)`,
///
/// `int |eta-s|^{-beta} w(s) ds
///    = int |eta-s|^{-beta} (w(s) - w(eta)) ds + w(eta) * closed form`,
///
/// and the first integrand extends continuously by zero at `s = eta`, so no
/// sample can blow up no matter how nodes round near the singular point.
fn profile_point(beta: f64, eta: f64) -> Result<f64> {
    let tol = Tolerance {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_evaluations: 600_000,
    };
    let span = 16f64.max(4.0 * eta);
    let w_eta = 1.0 / (1.0 + eta * eta);
    let f = |s: f64| {
        let d = (eta - s).abs();
        let dw = 1.0 / (1.0 + s * s) - w_eta;
        if d == 0.0 || dw == 0.0 {
            return 0.0;
        }
        d.powf(-beta) * dw / PI
    };

    let mut pts = vec![-1.0, 0.0, 1.0];
    pts.extend(geometric_ladder(eta, (eta.abs().max(1.0)) * 1e-9, 2.0 * span));
    let core_diff = integrate(f, -span, span, &pts, &tol)?;
    // w(eta)/pi * int_{-S}^{S} |eta-s|^{-beta} ds, exactly.
    let one_m = 1.0 - beta;
    let core_sing =
        w_eta / PI * ((span + eta).powf(one_m) + (span - eta).powf(one_m)) / one_m;
    let core_value = core_diff.value + core_sing;

    // Tail s > span under s = 1/u: integrand |eta - 1/u|^{-beta}/(1 + u^2).
    let upper = integrate(
        |u| (eta - 1.0 / u).abs().powf(-beta) / (PI * (1.0 + u * u)),
        0.0,
        1.0 / span,
        &[],
        &tol,
    )?;
    let lower = integrate(
        |u| (eta + 1.0 / u).abs().powf(-beta) / (PI * (1.0 + u * u)),
        0.0,
        1.0 / span,
        &[],
        &tol,
    )?;
    Ok(core_value + upper.value + lower.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poisson_center_values() {
        assert_relative_eq!(eval_poisson(1.0, 0.0).unwrap(), 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(
            eval_poisson(2.0, 0.0).unwrap(),
            1.0 / (2.0 * PI),
            epsilon = 1e-15
        );
    }

    #[test]
    fn poisson_rejects_bad_heights() {
        assert!(eval_poisson(0.0, 0.0).is_err());
        assert!(eval_poisson(-1.0, 0.0).is_err());
        assert!(eval_poisson(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn poisson_is_even_and_unimodal() {
        let p = PoissonParams::new(0.3).unwrap();
        assert_eq!(p.eval(0.7), p.eval(-0.7));
        assert!(p.eval(0.0) > p.eval(0.1));
        assert!(p.eval(0.1) > p.eval(1.0));
        assert_relative_eq!(p.sup(), p.eval(0.0), epsilon = 1e-15);
    }

    #[test]
    fn poisson_segment_integral_matches_quadrature() {
        let p = PoissonParams::new(0.05).unwrap();
        let q = integrate(|x| p.eval(x), -0.2, 1.3, &[0.0], &Tolerance::default()).unwrap();
        assert_relative_eq!(p.integral(-0.2, 1.3), q.value, max_relative = 1e-6);
    }

    #[test]
    fn kernel_validation() {
        assert!(RadialKernel::new(0.0, 1.0).is_err());
        assert!(RadialKernel::new(1.0, 1.0).is_err());
        assert!(RadialKernel::new(0.5, 0.0).is_err());
        assert!(RadialKernel::new(0.5, f64::INFINITY).is_err());
        assert!(RadialKernel::new(0.5, 1.0).is_ok());
    }

    #[test]
    fn kernel_mass_and_primitive_closed_forms() {
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        assert_eq!(k.l1_mass(), 4.0);
        // primitive(0.25) = 0.25^{1/2} / (1/2) = 1
        assert_relative_eq!(k.primitive(0.25), 1.0, epsilon = 1e-15);
        // Saturates at the support edge.
        assert_relative_eq!(k.primitive(2.0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(k.primitive(-0.25), -1.0, epsilon = 1e-15);
        // Mass is twice the primitive at the edge.
        assert_relative_eq!(k.l1_mass(), 2.0 * k.primitive(k.cutoff()), epsilon = 1e-15);
    }

    #[test]
    fn segment_integral_matches_quadrature_off_singularity() {
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let q = integrate(|x| k.eval(x), 0.1, 0.7, &[], &Tolerance::default()).unwrap();
        assert_relative_eq!(k.integral(0.1, 0.7), q.value, max_relative = 1e-8);
        // Across the singularity the closed form still matches (odd part
        // cancels): int_{-0.3}^{0.2} = primitive(0.2) - primitive(-0.3).
        let exact = k.primitive(0.2) - k.primitive(-0.3);
        let via_halves = k.integral(-0.3, 0.0) + k.integral(0.0, 0.2);
        assert_relative_eq!(exact, via_halves, epsilon = 1e-14);
    }

    /// Independent integrator for cross-checks: composite Simpson on a
    /// geometric mesh graded into the singularity at 0, one side of it.
    /// With ratio 1.06 the integrand of interest varies by a few percent
    /// per cell, so Simpson error per cell is ~1e-5 relative.
    fn simpson_geometric(f: impl Fn(f64) -> f64, inner: f64, outer: f64, sign: f64) -> f64 {
        let ratio = 1.06f64;
        let mut knots = vec![inner];
        let mut z = inner;
        while z < outer {
            z = (z * ratio).min(outer);
            knots.push(z);
        }
        let mut sum = 0.0;
        for w in knots.windows(2) {
            let n = 4;
            let h = (w[1] - w[0]) / n as f64;
            for i in 0..n {
                let x0 = w[0] + i as f64 * h;
                sum += (f(sign * x0) + 4.0 * f(sign * (x0 + 0.5 * h)) + f(sign * (x0 + h)))
                    * h
                    / 6.0;
            }
        }
        sum
    }

    #[test]
    fn convolution_matches_independent_simpson() {
        // Moderate height where both routes converge comfortably.
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let t = 0.05;
        let x = 0.12;
        let p = PoissonParams::new(t).unwrap();
        let f = |z: f64| k.eval(z) * p.eval(x - z);
        // Truncating below |z| = 1e-12 discards < 1e-6 of the value.
        let oracle =
            simpson_geometric(&f, 1e-12, 1.0, 1.0) + simpson_geometric(&f, 1e-12, 1.0, -1.0);
        let v = convolve_poisson_kernel(&k, t, x).unwrap();
        assert_relative_eq!(v, oracle, max_relative = 1e-4);
    }

    #[test]
    fn convolution_center_follows_power_law() {
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        // sec(pi/4) * t^{-1/2} = sqrt(2) * 100 at t = 1e-4.
        let v = convolve_poisson_kernel(&k, 1e-4, 0.0).unwrap();
        assert_relative_eq!(v, 141.421356, max_relative = 0.02);
        // Deeper: the law sharpens.
        let v6 = convolve_poisson_kernel(&k, 1e-6, 0.0).unwrap();
        assert_relative_eq!(v6, 2f64.sqrt() * 1e3, max_relative = 0.002);
    }

    #[test]
    fn convolution_is_even_and_decreasing() {
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let t = 1e-3;
        let a = convolve_poisson_kernel(&k, t, 0.01).unwrap();
        let b = convolve_poisson_kernel(&k, t, -0.01).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
        let c0 = convolve_poisson_kernel(&k, t, 0.0).unwrap();
        let c1 = convolve_poisson_kernel(&k, t, 0.05).unwrap();
        let c2 = convolve_poisson_kernel(&k, t, 0.5).unwrap();
        assert!(c0 > c1 && c1 > c2);
    }

    #[test]
    fn convolution_preserves_mass() {
        // Fubini: the extension has the same mass as the kernel itself.
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let t = 1e-2;
        let tol = Tolerance {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_evaluations: 900_000,
        };
        let mass = quad::integrate_line(
            |x| convolve_poisson_kernel(&k, t, x).unwrap_or(f64::NAN),
            &[-1.0, 0.0, 1.0],
            &tol,
        )
        .unwrap();
        assert_relative_eq!(mass.value, k.l1_mass(), max_relative = 1e-4);
    }

    #[test]
    fn profile_center_and_tail_are_exact_limits() {
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let p = k.scaled_profile().unwrap();
        // Centre: sec(pi/4) = sqrt 2.
        assert_relative_eq!(p.value_at_zero(), 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(p.eval(0.0), 2f64.sqrt(), epsilon = 1e-12);
        // The tabulated values join the exact limits smoothly.
        assert_relative_eq!(p.eval(1e-6), 2f64.sqrt(), max_relative = 1e-3);
        assert_relative_eq!(p.eval(1e6), 1e-3, max_relative = 1e-3);
        // Far beyond the table: pure power law.
        assert_relative_eq!(p.eval(1e40), 1e-20, max_relative = 1e-12);
    }

    #[test]
    fn profile_is_decreasing() {
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let p = k.scaled_profile().unwrap();
        let mut prev = p.eval(0.0);
        for i in 1..200 {
            let eta = 1e-4 * 10f64.powf(i as f64 * 0.05);
            let v = p.eval(eta);
            assert!(
                v <= prev * (1.0 + 1e-9),
                "profile increased at eta = {eta}: {v} > {prev}"
            );
            prev = v;
        }
    }

    #[test]
    fn profile_matches_direct_convolution() {
        // (P_t * K)(y) ~ t^{-beta} psi(y/t) with correction O(t^{1+beta}).
        let k = RadialKernel::new(0.5, 1.0).unwrap();
        let p = k.scaled_profile().unwrap();
        let t = 1e-5;
        for &eta in &[0.0, 0.5, 3.0, 40.0] {
            let y = eta * t;
            let direct = convolve_poisson_kernel(&k, t, y).unwrap();
            let scaled = t.powf(-0.5) * p.eval(eta);
            assert_relative_eq!(direct, scaled, max_relative = 1e-3);
        }
    }

    #[test]
    fn profile_other_exponent_center() {
        // beta = 0.3: sec(0.15 pi) = 1/cos(0.4712...) = 1.12232.
        let p = ScaledProfile::build(0.3).unwrap();
        let expect = 1.0 / (0.15 * PI).cos();
        assert_relative_eq!(p.eval(1e-6), expect, max_relative = 1e-3);
        assert_relative_eq!(p.value_at_zero(), expect, epsilon = 1e-12);
    }

    #[test]
    fn kernel_serde_round_trip() {
        let k = RadialKernel::new(0.4, 2.0).unwrap();
        let js = serde_json::to_string(&k).unwrap();
        let back: RadialKernel = serde_json::from_str(&js).unwrap();
        assert_eq!(k, back);
        // Validation applies on the way in.
        assert!(serde_json::from_str::<RadialKernel>(r#"{"beta":1.5}"#).is_err());
        // Cutoff defaults to 1.
        let d: RadialKernel = serde_json::from_str(r#"{"beta":0.5}"#).unwrap();
        assert_eq!(d.cutoff(), 1.0);
    }
}

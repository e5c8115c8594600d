//! Numerical evaluation of maximal operators and their ingredients.
//!
//! The module supplies everything measured in the weak-type experiments:
//!
//! - test inputs ([`TestFunction`]): box atoms `F` (so `f = K*F`), the
//!   point-mass limit, and an `f ≡ c` sanity input;
//! - the extension `u(y,t) = (P_t * K * F)(y)` sampled on grids
//!   ([`poisson_extend`] / [`Field`]) or pointwise ([`extension_at`]);
//! - the region maximal operator on a grid ([`maximal_over_region`]) and
//!   the centered Hardy–Littlewood maximal function ([`hl_maximal`]);
//! - the local/tail split of the extended kernel at radius `3γ`
//!   ([`split_kernel`]), the shifted-tail domination test
//!   ([`tail_domination_check`]), and the enlarged-support envelope
//!   `K_s^*` with its integral ([`k_star`], [`k_star_integral`]);
//! - weak-type statistics ([`weak_type_report`]): superlevel measures and
//!   the quasinorm `sup_λ λ·|{u > λ}|`, computed exactly from the sampled
//!   value distribution.
//!
//! # Evaluation regimes
//!
//! A box atom's extension spans absurd ranges of scale (heights down to
//! 1e-140 against atom widths near 1e-6), so [`extension_at`] dispatches
//! between three routes that agree on their overlaps:
//!
//! - **profile**: for `t` well below the kernel cutoff the extension is the
//!   universal scaled profile, `u ≈ mass · t^{-β} ψ(d/t)`, valid while the
//!   atom is unresolvably small next to `t` (`h ≤ t/25`);
//! - **sharp**: when the blur `t` is negligible against the distance to the
//!   atom's edges, the Poisson factor drops out and the value is the exact
//!   windowed kernel average `mass/(2h) · ∫_{d-h}^{d+h} K`;
//! - **quadrature**: always valid — a single adaptive integral of
//!   `K(z) · (P_t * box)(d - z)`, with the Poisson-box factor in closed
//!   form, seeded with geometric ladders at the kernel singularity and the
//!   box location.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{self, convolve_poisson_kernel, RadialKernel};
use crate::quad::{self, Tolerance};
use crate::regions::{self, ApproachRegion};

/// Errors for maximal-operator evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {name} invalid: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("grid invalid: {0}")]
    InvalidGrid(&'static str),
    #[error(
        "field coordinates do not cover the region: at height {t} the shifted \
         section needs [{lo}, {hi}] but the grid ends at [{grid_lo}, {grid_hi}]"
    )]
    Coverage {
        t: f64,
        lo: f64,
        hi: f64,
        grid_lo: f64,
        grid_hi: f64,
    },
    #[error("shift {x_prime} exceeds the allowed radius {gamma_t}")]
    ShiftTooLarge { x_prime: f64, gamma_t: f64 },
    #[error("maximal average vanishes at x = {x} but the local convolution is {numerator}")]
    InconsistentAverage { x: f64, numerator: f64 },
    #[error("quadrature error: {0}")]
    Quad(#[from] quad::Error),
    #[error("kernel error: {0}")]
    Kernel(#[from] kernels::Error),
    #[error("region error: {0}")]
    Region(#[from] regions::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Profile route: maximum height as a fraction of the kernel cutoff.
pub(crate) const PROFILE_T_FRACTION: f64 = 1e-3;
/// Profile route: maximum distance as a fraction of the kernel cutoff. The
/// neglected truncation correction is below `2t/(π(1+β))` in absolute value,
/// which at `t ≤ 1e-3·cutoff` is under a few times 1e-4 relative to the
/// extension anywhere inside half the cutoff.
const PROFILE_X_FRACTION: f64 = 0.5;
/// Profile route for box atoms: largest `h/t` treated as a point mass.
const ATOM_POINT_RATIO: f64 = 1.0 / 25.0;
/// Sharp route: largest `t` relative to the distance from the evaluation
/// point to the atom's edge cusps (where `K*F` varies fastest). The Poisson
/// tail makes the blur error first order in `t/distance`, so this keeps it
/// near 1e-5 relative.
const SHARP_T_FACTOR: f64 = 1e-6;

/// Inputs to the experiments. Box atoms live on the `F` side of `f = K*F`
/// (so their extension is `P_t*K*F`); the constant is an `f`-level sanity
/// input whose extension is itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `F = mass/(2h) · 1_{[center-h, center+h]}`.
    BoxAtom {
        center: f64,
        half_width: f64,
        mass: f64,
    },
    /// The `h -> 0` limit of a unit box atom: `F = δ_center`, extension
    /// `(P_t*K)(y - center)`.
    PointMassLimit { center: f64 },
    /// `f ≡ value`; the Poisson extension reproduces it exactly.
    Constant { value: f64 },
}

impl TestFunction {
    pub fn box_atom(center: f64, half_width: f64, mass: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "half_width",
                value: half_width,
            });
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass,
            });
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center",
                value: center,
            });
        }
        Ok(TestFunction::BoxAtom {
            center,
            half_width,
            mass,
        })
    }

    /// `‖F‖₁` where defined (`None` for the constant input).
    pub fn input_l1(&self) -> Option<f64> {
        match *self {
            TestFunction::BoxAtom { mass, .. } => Some(mass),
            TestFunction::PointMassLimit { .. } => Some(1.0),
            TestFunction::Constant { .. } => None,
        }
    }
}

/// The extension `(P_t*K)(x)` with automatic route choice: scaled profile
/// deep below the cutoff, direct convolution otherwise.
pub fn extension_value(kernel: &RadialKernel, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    if !x.is_finite() {
        return Err(Error::InvalidParameter { name: "x", value: x });
    }
    let cutoff = kernel.cutoff();
    let ax = x.abs();
    if t <= PROFILE_T_FRACTION * cutoff && ax <= PROFILE_X_FRACTION * cutoff {
        let profile = kernel.scaled_profile()?;
        Ok(t.powf(-kernel.beta()) * profile.eval(ax / t))
    } else {
        Ok(convolve_poisson_kernel(kernel, t, ax)?)
    }
}

/// Pointwise extension `u(y, t)` of a test function.
pub fn extension_at(kernel: &RadialKernel, f: &TestFunction, y: f64, t: f64) -> Result<f64> {
    match *f {
        TestFunction::Constant { value } => Ok(value),
        TestFunction::PointMassLimit { center } => extension_value(kernel, t, y - center),
        TestFunction::BoxAtom {
            center,
            half_width,
            mass,
        } => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter { name: "t", value: t });
            }
            let d = (y - center).abs();
            let cutoff = kernel.cutoff();
            if t <= PROFILE_T_FRACTION * cutoff
                && d + half_width <= PROFILE_X_FRACTION * cutoff
                && half_width <= t * ATOM_POINT_RATIO
            {
                return box_profile_value(kernel, t, d, mass);
            }
            let cusp_distance = (d - half_width).abs();
            if t <= SHARP_T_FACTOR * cusp_distance {
                return Ok(box_sharp_value(kernel, d, half_width, mass));
            }
            box_quadrature_value(kernel, t, d, half_width, mass)
        }
    }
}

/// Profile route: the atom is a point mass at this height.
fn box_profile_value(kernel: &RadialKernel, t: f64, d: f64, mass: f64) -> Result<f64> {
    let profile = kernel.scaled_profile()?;
    Ok(mass * t.powf(-kernel.beta()) * profile.eval(d / t))
}

/// Sharp route: the blur is negligible, leaving the exact kernel average
/// over the atom window. The kernel primitive saturates at the cutoff, so
/// truncation is handled exactly.
fn box_sharp_value(kernel: &RadialKernel, d: f64, h: f64, mass: f64) -> f64 {
    mass / (2.0 * h) * (kernel.primitive(d + h) - kernel.primitive(d - h))
}

/// Window factor `atan((v+h)/t) - atan((v-h)/t)` from the exact argument
/// difference `2h/t` and the cancellation-free product `(v-h)(v+h)/t²`.
/// The naive difference dies twice: for large arguments both arctangents
/// saturate at `±π/2`, and for `h` below `eps·|v|` the two inputs round to
/// the same float before the subtraction even happens (the deepest atoms
/// put `h ~ 1e-19` against window offsets of order 1e-2). Neither factor
/// here subtracts like magnitudes, so both regimes keep full precision.
/// The identity needs a `+π` correction when the product drops below -1,
/// which forces `|v| < h`, where the left argument is positive.
fn box_window(v: f64, t: f64, h: f64) -> f64 {
    let delta = 2.0 * h / t;
    let product = (v - h) * (v + h) / (t * t);
    let q = (delta / (1.0 + product)).atan();
    if product < -1.0 {
        q + PI
    } else {
        q
    }
}

/// Quadrature route: `u = ∫ K(z) · q(d - z) dz` with
/// `q = P_t * box / mass` in closed form (a difference of arctangents).
/// Valid at every height; the other routes are accelerations of this one.
fn box_quadrature_value(kernel: &RadialKernel, t: f64, d: f64, h: f64, mass: f64) -> Result<f64> {
    let cutoff = kernel.cutoff();
    let mut breakpoints = quad::geometric_ladder(0.0, (t.min(cutoff) * 1e-3).max(1e-300), cutoff);
    let peak_scale = t.min(h).max(1e-300);
    if d < cutoff {
        breakpoints.extend(quad::geometric_ladder(d, peak_scale, cutoff));
    }
    breakpoints.push(d - h);
    breakpoints.push(d + h);
    let f = |z: f64| {
        if z == 0.0 {
            return 0.0;
        }
        kernel.eval(z) * box_window(d - z, t, h) / PI
    };
    let tol = Tolerance {
        abs_tol: 1e-300,
        rel_tol: 1e-9,
        max_evaluations: 2_000_000,
    };
    let q = quad::integrate(f, -cutoff, cutoff, &breakpoints, &tol)?;
    Ok(q.value * mass / (2.0 * h))
}

/// The extension of a test function sampled on a height × coordinate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    heights: Vec<f64>,
    coords: Vec<f64>,
    values: Vec<f64>,
}

impl Field {
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Row-major sample matrix, one row per height.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.coords.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.coords.len();
        &self.values[row * w..(row + 1) * w]
    }
}

fn validate_grid(name: &'static str, grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(name));
    }
    for pair in grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidGrid(name));
        }
    }
    let first = grid[0];
    let last = grid[grid.len() - 1];
    if !first.is_finite() || !last.is_finite() || (positive && first <= 0.0) {
        return Err(Error::InvalidGrid(name));
    }
    Ok(())
}

/// Sample `u(y, t)` on the given grids. Rows (heights) are evaluated in
/// parallel; every sample goes through [`extension_at`].
pub fn poisson_extend(
    kernel: &RadialKernel,
    f: &TestFunction,
    heights: &[f64],
    coords: &[f64],
) -> Result<Field> {
    validate_grid("heights", heights, true)?;
    validate_grid("coords", coords, false)?;
    // Force the shared profile table to exist before the parallel section.
    kernel.scaled_profile()?;
    let rows: Vec<Vec<f64>> = heights
        .par_iter()
        .map(|&t| {
            coords
                .iter()
                .map(|&y| extension_at(kernel, f, y, t))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(heights.len() * coords.len());
    for row in rows {
        values.extend(row);
    }
    Ok(Field {
        heights: heights.to_vec(),
        coords: coords.to_vec(),
        values,
    })
}

/// Grid maximal operator: for each `x`, the maximum of `|u(y, t)|` over the
/// field nodes with `(y - x, t)` in the region. A lower bound for the true
/// supremum that is nondecreasing under grid refinement by inclusion.
///
/// Errors if some shifted cross-section sticks out of the coordinate grid —
/// the supremum over the missing piece would be silently dropped otherwise.
pub fn maximal_over_region(
    field: &Field,
    region: &ApproachRegion,
    xs: &[f64],
) -> Result<Vec<f64>> {
    let sections = field
        .heights
        .iter()
        .map(|&t| region.cross_section(t))
        .collect::<regions::Result<Vec<_>>>()?;
    let grid_lo = field.coords[0];
    let grid_hi = field.coords[field.coords.len() - 1];
    xs.par_iter()
        .map(|&x| {
            let mut best = 0.0f64;
            for (i, section) in sections.iter().enumerate() {
                let t = field.heights[i];
                for &(lo, hi) in section.parts() {
                    let (s_lo, s_hi) = (x + lo, x + hi);
                    let slack = 1e-9 * (1.0 + s_lo.abs().max(s_hi.abs()));
                    if s_lo < grid_lo - slack || s_hi > grid_hi + slack {
                        return Err(Error::Coverage {
                            t,
                            lo: s_lo,
                            hi: s_hi,
                            grid_lo,
                            grid_hi,
                        });
                    }
                    let j_lo = field.coords.partition_point(|&v| v < s_lo);
                    let j_hi = field.coords.partition_point(|&v| v <= s_hi);
                    for j in j_lo..j_hi {
                        best = best.max(field.value(i, j).abs());
                    }
                }
            }
            Ok(best)
        })
        .collect()
}

/// A nonnegative density that is constant on the cells of a uniform grid
/// and zero outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    x0: f64,
    dx: f64,
    cells: Vec<f64>,
}

impl DensityGrid {
    pub fn new(x0: f64, dx: f64, cells: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidParameter { name: "dx", value: dx });
        }
        if !x0.is_finite() {
            return Err(Error::InvalidParameter { name: "x0", value: x0 });
        }
        if cells.is_empty() || cells.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidGrid("cells"));
        }
        Ok(DensityGrid { x0, dx, cells })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn end(&self) -> f64 {
        self.x0 + self.dx * self.cells.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.dx
    }

    /// Density value at `x` (zero outside the grid).
    pub fn value_at(&self, x: f64) -> f64 {
        if x < self.x0 || x >= self.end() {
            return 0.0;
        }
        let i = ((x - self.x0) / self.dx) as usize;
        self.cells[i.min(self.cells.len() - 1)]
    }

    /// Exact integral of the density over `[lo, hi]`.
    pub fn window_mass(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(self.x0);
        let hi = hi.min(self.end());
        if lo >= hi {
            return 0.0;
        }
        let mut mass = 0.0;
        for (i, &c) in self.cells.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let cell_lo = self.x0 + i as f64 * self.dx;
            let cell_hi = cell_lo + self.dx;
            let overlap = hi.min(cell_hi) - lo.max(cell_lo);
            if overlap > 0.0 {
                mass += c * overlap;
            }
        }
        mass
    }
}

/// Centered Hardy–Littlewood maximal function of a cell density:
/// `sup_{h>0} (1/2h) ∫_{x-h}^{x+h} F`. On a piecewise-constant density the
/// average is monotone between window-edge alignments, so scanning the
/// grid-aligned radii (plus the `h -> 0` limit) attains the exact supremum.
pub fn hl_maximal(density: &DensityGrid, x: f64) -> f64 {
    let mut best = density.value_at(x);
    for i in 0..=density.cells.len() {
        let edge = density.x0 + i as f64 * density.dx;
        let h = (edge - x).abs();
        if h > 0.0 {
            best = best.max(density.window_mass(x - h, x + h) / (2.0 * h));
        }
    }
    best
}

/// The extended kernel `K_t = P_t*K` split at radius `3γ` into a local part
/// `K_{1,t} = K_t · 1_{|x| < 3γ}` and the tail `K_{2,t}`.
///
/// The masses are computed by swapping the integration order: the inner
/// Poisson integral over the window is an exact arctangent bracket, and the
/// local and tail integrands then sum to `K(z)` pointwise, so the two
/// quadratures are additive up to their own error estimates alone.
#[derive(Debug, Clone)]
pub struct KernelSplit {
    kernel: RadialKernel,
    t: f64,
    threshold: f64,
    local_mass: f64,
    tail_mass: f64,
}

impl KernelSplit {
    /// Split radius `3γ`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn local_mass(&self) -> f64 {
        self.local_mass
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `K_{1,t}(x)`.
    pub fn eval_local(&self, x: f64) -> Result<f64> {
        if x.abs() < self.threshold {
            extension_value(&self.kernel, self.t, x)
        } else {
            Ok(0.0)
        }
    }

    /// `K_{2,t}(x)`.
    pub fn eval_tail(&self, x: f64) -> Result<f64> {
        if x.abs() < self.threshold {
            Ok(0.0)
        } else {
            extension_value(&self.kernel, self.t, x)
        }
    }
}

pub fn split_kernel(kernel: &RadialKernel, t: f64, gamma_t: f64) -> Result<KernelSplit> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    if !(gamma_t > 0.0 && gamma_t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma_t",
            value: gamma_t,
        });
    }
    let radius = 3.0 * gamma_t;
    let cutoff = kernel.cutoff();
    // Window integral of the Poisson kernel around z, in [0, 1].
    // The Poisson window of half-width `radius` centered at the origin,
    // evaluated at offset `-z`.
    let bracket = move |z: f64| box_window(-z, t, radius) / PI;
    let mut breakpoints = quad::geometric_ladder(0.0, (t.min(cutoff) * 1e-3).max(1e-300), cutoff);
    for edge in [-radius, radius] {
        if edge.abs() < cutoff {
            breakpoints.extend(quad::geometric_ladder(edge, t.max(1e-300), cutoff));
        }
    }
    let tol = Tolerance {
        abs_tol: 1e-300,
        rel_tol: 1e-10,
        max_evaluations: 5_000_000,
    };
    let local = quad::integrate(
        |z| if z == 0.0 { 0.0 } else { kernel.eval(z) * bracket(z) },
        -cutoff,
        cutoff,
        &breakpoints,
        &tol,
    )?;
    let tail = quad::integrate(
        |z| {
            if z == 0.0 {
                0.0
            } else {
                kernel.eval(z) * (1.0 - bracket(z))
            }
        },
        -cutoff,
        cutoff,
        &breakpoints,
        &tol,
    )?;
    Ok(KernelSplit {
        kernel: kernel.clone(),
        t,
        threshold: radius,
        local_mass: local.value,
        tail_mass: tail.value,
    })
}

/// Outcome of one shifted-tail domination sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDomination {
    pub tail_value: f64,
    pub dominator: f64,
    pub holds: bool,
}

/// Check `K_{2,t}(y + x') ≤ K_t(y/2)` for a shift `|x'| ≤ γ`: outside the
/// local radius `3γ` the shift cannot move the argument below half of `|y|`,
/// so the radial decrease of `K_t` forces the domination.
pub fn tail_domination_check(
    kernel: &RadialKernel,
    t: f64,
    gamma_t: f64,
    x_prime: f64,
    y: f64,
) -> Result<TailDomination> {
    if x_prime.abs() > gamma_t {
        return Err(Error::ShiftTooLarge { x_prime, gamma_t });
    }
    let arg = y + x_prime;
    let tail_value = if arg.abs() > 3.0 * gamma_t {
        extension_value(kernel, t, arg)?
    } else {
        0.0
    };
    let dominator = extension_value(kernel, t, y / 2.0)?;
    Ok(TailDomination {
        tail_value,
        dominator,
        holds: tail_value <= dominator * (1.0 + 1e-9),
    })
}

/// The enlarged-support envelope: for the shifted local kernel
/// `K_s(u) = K_{1,t}(u + x')`,
///
/// `K_s^*(x) = sup { K_s(x + y) : |y| ≤ enlargement }`.
///
/// `K_{1,t}` is radially nonincreasing, so the supremum sits at the smallest
/// reachable distance `d = max(|x + x'| - enlargement, 0)`: the value is
/// `K_t(d)` when `d` is inside the local radius and `0` beyond it.
pub fn k_star(
    kernel: &RadialKernel,
    t: f64,
    x_prime: f64,
    local_radius: f64,
    enlargement: f64,
    x: f64,
) -> Result<f64> {
    if !(local_radius > 0.0 && local_radius.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "local_radius",
            value: local_radius,
        });
    }
    if !(enlargement >= 0.0 && enlargement.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "enlargement",
            value: enlargement,
        });
    }
    let d = ((x + x_prime).abs() - enlargement).max(0.0);
    if d < local_radius {
        extension_value(kernel, t, d)
    } else {
        Ok(0.0)
    }
}

/// `∫_0^∞ K_s^*(x) dx` by adaptive quadrature, seeded at the kinks where
/// the reachable distance hits zero or leaves the local radius.
pub fn k_star_integral(
    kernel: &RadialKernel,
    t: f64,
    x_prime: f64,
    local_radius: f64,
    enlargement: f64,
) -> Result<f64> {
    // The envelope vanishes once |x + x'| ≥ enlargement + local_radius.
    let hi = -x_prime + enlargement + local_radius;
    if hi <= 0.0 {
        return Ok(0.0);
    }
    let kinks = [
        -x_prime - enlargement - local_radius,
        -x_prime - enlargement,
        -x_prime + enlargement,
        hi,
    ];
    let mut breakpoints: Vec<f64> = kinks.iter().copied().filter(|&v| v > 0.0 && v < hi).collect();
    // The envelope varies on the height scale near the flat-top edges.
    for &kink in &kinks {
        if kink > 0.0 && kink < hi {
            breakpoints.extend(quad::geometric_ladder(kink, t.max(1e-300), hi));
        }
    }
    kernel.scaled_profile()?;
    let f = |x: f64| k_star(kernel, t, x_prime, local_radius, enlargement, x).unwrap_or(f64::NAN);
    let tol = Tolerance {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_evaluations: 3_000_000,
    };
    Ok(quad::integrate(f, 0.0, hi, &breakpoints, &tol)?.value)
}

/// Empirical constant of the dyadic local bound: the ratio
/// `(K_{1,t}*F)(x) / (MF(x) · ∫_t^{γ} K_t)`, where `MF` is the centered
/// maximal average. Returns 0 when both the numerator and `MF(x)` vanish.
pub fn dyadic_local_bound_check(
    kernel: &RadialKernel,
    t: f64,
    gamma_t: f64,
    density: &DensityGrid,
    x: f64,
) -> Result<f64> {
    let split = split_kernel(kernel, t, gamma_t)?;
    let radius = split.threshold();
    let f = |z: f64| {
        if z == 0.0 {
            return 0.0;
        }
        let w = density.value_at(x - z);
        if w == 0.0 {
            0.0
        } else {
            split.eval_local(z).unwrap_or(f64::NAN) * w
        }
    };
    let mut breakpoints = quad::geometric_ladder(0.0, t.max(1e-300) * 1e-3, radius);
    // Density cell edges inside the window are ordinary breakpoints.
    let n = density.cells.len();
    for i in 0..=n {
        let edge = x - (density.x0 + i as f64 * density.dx);
        if edge.abs() < radius {
            breakpoints.push(edge);
        }
    }
    let tol = Tolerance {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_evaluations: 3_000_000,
    };
    let numerator = quad::integrate(f, -radius, radius, &breakpoints, &tol)?.value;
    let mf = hl_maximal(density, x);
    if mf == 0.0 {
        if numerator.abs() < 1e-12 {
            return Ok(0.0);
        }
        return Err(Error::InconsistentAverage { x, numerator });
    }
    let scale_bp = quad::geometric_ladder(t, t * 1e-3, gamma_t);
    let scale = quad::integrate(
        |u| extension_value(kernel, t, u).unwrap_or(f64::NAN),
        t,
        gamma_t,
        &scale_bp,
        &tol,
    )?
    .value;
    Ok(numerator / (mf * scale))
}

/// Weak-type statistics of a sampled maximal function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    /// Log-spaced thresholds from the smallest positive sample to the
    /// largest (empty when all samples vanish). Reporting detail only: the
    /// quasinorm does not depend on this grid.
    pub lambdas: Vec<f64>,
    /// `|{u > λ}|` per threshold, by cell counting.
    pub superlevel_measures: Vec<f64>,
    /// `sup_λ λ·|{u > λ}|`, computed exactly from the sample distribution:
    /// with samples sorted decreasingly it is `max_i v_i · W_i` for the
    /// cumulative weights `W_i`.
    pub quasinorm: f64,
    /// `‖F‖₁` of the input.
    pub input_l1: f64,
    /// `quasinorm / input_l1` — the number the weak-type experiments track.
    pub ratio: f64,
}

/// Number of export thresholds in a weak-type report.
const LAMBDA_POINTS: usize = 200;

/// Weak-type report for samples on a uniform grid with the given cell width.
pub fn weak_type_report(values: &[f64], cell: f64, input_l1: f64) -> Result<WeakTypeReport> {
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "cell",
            value: cell,
        });
    }
    let weights = vec![cell; values.len()];
    weak_type_report_weighted(values, &weights, input_l1)
}

/// Weak-type report for samples carrying individual cell weights (the
/// stratified scan produces these).
pub fn weak_type_report_weighted(
    values: &[f64],
    weights: &[f64],
    input_l1: f64,
) -> Result<WeakTypeReport> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::InvalidGrid("values/weights"));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidGrid("values"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidGrid("weights"));
    }
    if !(input_l1 > 0.0 && input_l1.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "input_l1",
            value: input_l1,
        });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite"));

    let mut quasinorm = 0.0f64;
    let mut cumulative = 0.0f64;
    let mut sorted_desc = Vec::with_capacity(values.len());
    for &i in &order {
        cumulative += weights[i];
        if values[i] > 0.0 {
            quasinorm = quasinorm.max(values[i] * cumulative);
        }
        sorted_desc.push((values[i], cumulative));
    }

    let vmax = sorted_desc[0].0;
    let mut lambdas = Vec::new();
    let mut superlevel_measures = Vec::new();
    if vmax > 0.0 {
        let vmin = sorted_desc
            .iter()
            .rev()
            .find(|(v, _)| *v > 0.0)
            .expect("vmax positive")
            .0;
        if vmin == vmax {
            lambdas.push(vmax);
        } else {
            let (l0, l1) = (vmin.ln(), vmax.ln());
            for i in 0..LAMBDA_POINTS {
                let s = i as f64 / (LAMBDA_POINTS - 1) as f64;
                lambdas.push((l0 + s * (l1 - l0)).exp());
            }
        }
        for &lambda in &lambdas {
            // Weight of samples strictly above lambda.
            let k = sorted_desc.partition_point(|&(v, _)| v > lambda);
            superlevel_measures.push(if k == 0 { 0.0 } else { sorted_desc[k - 1].1 });
        }
    }
    Ok(WeakTypeReport {
        lambdas,
        superlevel_measures,
        quasinorm,
        input_l1,
        ratio: quasinorm / input_l1,
    })
}

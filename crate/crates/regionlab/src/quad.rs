//! Adaptive Gauss–Kronrod quadrature with breakpoint seeding.
//!
//! The integrands in this crate are smooth except at a handful of known
//! locations: the kernel singularity at the origin, the kernel support edge,
//! and Poisson bumps of width `t` that can be hundreds of orders of magnitude
//! narrower than the integration interval. Plain adaptive bisection cannot
//! discover a feature that lies strictly between the sample nodes of every
//! panel it tries, so each integral here is seeded with explicit
//! *breakpoints*: panel boundaries at the known feature locations, usually
//! produced by [`geometric_ladder`]. Refinement after seeding is ordinary
//! worst-panel-first bisection with the 15-point Kronrod rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Errors for quadrature.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid integration range [{0}, {1}]")]
    InvalidRange(f64, f64),
    #[error("integrand returned a non-finite value near x = {0}")]
    NonFinite(f64),
    #[error("evaluation budget {budget} exhausted; best estimate {estimate} ± {error}")]
    BudgetExhausted {
        budget: usize,
        estimate: f64,
        error: f64,
    },
    #[error("tolerance parameters must be positive and finite")]
    InvalidTolerance,
}

pub type Result<T> = std::result::Result<T, Error>;

/// Accuracy request for an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target (against the current estimate of the integral).
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evaluations: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-8,
            rel_tol: 1e-6,
            max_evaluations: 1_000_000,
        }
    }
}

impl Tolerance {
    /// A tolerance with the given relative target and a matching absolute
    /// floor, keeping the default evaluation budget.
    pub fn relative(rel_tol: f64) -> Self {
        Tolerance {
            abs_tol: rel_tol * 1e-2,
            rel_tol,
            ..Tolerance::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.abs_tol.is_finite()
            && self.rel_tol > 0.0
            && self.rel_tol.is_finite()
            && self.max_evaluations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTolerance)
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    /// Estimated value of the integral.
    pub value: f64,
    /// Estimated absolute error.
    pub abs_error: f64,
    /// Number of integrand evaluations consumed.
    pub evaluations: usize,
}

/// One panel in the adaptive subdivision, ordered by error estimate so the
/// worst panel is refined first.
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Panels too narrow to bisect are frozen: kept in the total, never
    /// refined again.
    frozen: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.sort_error() == other.sort_error()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_error()
            .partial_cmp(&other.sort_error())
            .unwrap_or(Ordering::Equal)
    }
}

impl Panel {
    /// Frozen panels sort as error zero so they sink to the bottom of the
    /// refinement heap.
    fn sort_error(&self) -> f64 {
        if self.frozen {
            0.0
        } else {
            self.error
        }
    }
}

/// Integrate `f` over `[a, b]` adaptively, seeding panel boundaries at every
/// breakpoint that falls strictly inside the interval.
///
/// Breakpoints are where the caller knows the integrand is rough: a
/// singularity, a support edge, or the centre and flanks of a narrow bump.
/// Without them, a feature much narrower than its panel is invisible to the
/// rule's nodes and the panel converges to the wrong answer.
///
/// # Arguments
///
/// * `f` - integrand; must return finite values on the open interval.
/// * `a`, `b` - integration bounds with `a <= b`.
/// * `breakpoints` - proposed panel boundaries; values outside `(a, b)` are
///   ignored, so callers may pass ladders that overshoot.
/// * `tol` - accuracy request.
///
/// # Example
///
/// ```
/// use regionlab::quad::{integrate, Tolerance};
///
/// let r = integrate(|x| x * x, 0.0, 1.0, &[], &Tolerance::default()).unwrap();
/// assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
/// ```
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], tol: &Tolerance) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    tol.validate()?;
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidRange(a, b));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }

    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|x| *x > a && *x < b));
    edges.push(b);
    edges.sort_by(|p, q| p.partial_cmp(q).unwrap_or(Ordering::Equal));
    edges.dedup();

    let mut evaluations = 0usize;
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut total_value = 0.0;
    let mut total_error = 0.0;

    let push_panel = |lo: f64,
                          hi: f64,
                          heap: &mut BinaryHeap<Panel>,
                          total_value: &mut f64,
                          total_error: &mut f64,
                          evaluations: &mut usize|
     -> Result<()> {
        let (value, error) = qk15(&f, lo, hi)?;
        *evaluations += 15;
        let mid = 0.5 * (lo + hi);
        let frozen = !(mid > lo && mid < hi);
        *total_value += value;
        *total_error += error;
        heap.push(Panel {
            lo,
            hi,
            value,
            error,
            frozen,
        });
        Ok(())
    };

    for pair in edges.windows(2) {
        push_panel(
            pair[0],
            pair[1],
            &mut heap,
            &mut total_value,
            &mut total_error,
            &mut evaluations,
        )?;
    }

    loop {
        let target = tol.abs_tol.max(tol.rel_tol * total_value.abs());
        if total_error <= target {
            return Ok(QuadResult {
                value: total_value,
                abs_error: total_error,
                evaluations,
            });
        }
        let worst = match heap.peek() {
            Some(p) if !p.frozen && p.error > 0.0 => heap.pop().expect("peeked"),
            // Every remaining panel is frozen or exact; the estimate cannot
            // improve, so report what we have.
            _ => {
                return Ok(QuadResult {
                    value: total_value,
                    abs_error: total_error,
                    evaluations,
                })
            }
        };
        if evaluations + 30 > tol.max_evaluations {
            return Err(Error::BudgetExhausted {
                budget: tol.max_evaluations,
                estimate: total_value,
                error: total_error,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // The midpoint rounded onto an edge (e.g. hard against an
            // integrable singularity): freeze the panel before any node can
            // land on the edge value, keeping its estimate in the totals.
            let mut frozen = worst;
            frozen.frozen = true;
            heap.push(frozen);
            continue;
        }
        total_value -= worst.value;
        total_error -= worst.error;
        push_panel(
            worst.lo,
            mid,
            &mut heap,
            &mut total_value,
            &mut total_error,
            &mut evaluations,
        )?;
        push_panel(
            mid,
            worst.hi,
            &mut heap,
            &mut total_value,
            &mut total_error,
            &mut evaluations,
        )?;
    }
}

/// Integrate `f` over the whole real line.
///
/// The line is split into a finite core `[lo, hi]` (the hull of the
/// breakpoints, or `[-1, 1]` if none are given) plus two tails mapped to
/// `(0, 1]` by `s = hi + (1 - u)/u` and its mirror, so decaying tails become
/// ordinary proper integrals.
pub fn integrate_line<F>(f: F, breakpoints: &[f64], tol: &Tolerance) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    tol.validate()?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in breakpoints {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    // Give the core a little margin so tail integrands stay tame at u = 1.
    let span = (hi - lo).max(1.0);
    lo -= span;
    hi += span;

    let core = integrate(&f, lo, hi, breakpoints, tol)?;
    let upper = integrate(
        |u| {
            let s = hi + (1.0 - u) / u;
            f(s) / (u * u)
        },
        f64::MIN_POSITIVE.sqrt(),
        1.0,
        &[],
        tol,
    )?;
    let lower = integrate(
        |u| {
            let s = lo - (1.0 - u) / u;
            f(s) / (u * u)
        },
        f64::MIN_POSITIVE.sqrt(),
        1.0,
        &[],
        tol,
    )?;
    Ok(QuadResult {
        value: core.value + upper.value + lower.value,
        abs_error: core.abs_error + upper.abs_error + lower.abs_error,
        evaluations: core.evaluations + upper.evaluations + lower.evaluations,
    })
}

/// Panel boundaries packed geometrically around a feature at `center`.
///
/// Returns `center` and `center ± inner_scale * 2^j` for `j = 0, 1, ...`
/// until the offset exceeds `outer_scale`. Seeding these into [`integrate`]
/// lets the rule resolve a feature of width `inner_scale` inside an interval
/// of width `outer_scale` with `O(log(outer/inner))` panels.
///
/// # Example
///
/// ```
/// use regionlab::quad::geometric_ladder;
///
/// let pts = geometric_ladder(0.5, 1e-6, 1.0);
/// assert!(pts.contains(&0.5));
/// assert!(pts.len() > 20 && pts.len() < 100);
/// ```
pub fn geometric_ladder(center: f64, inner_scale: f64, outer_scale: f64) -> Vec<f64> {
    let mut pts = vec![center];
    if !(inner_scale > 0.0) || !(outer_scale > 0.0) {
        return pts;
    }
    let mut step = inner_scale;
    // Cap the ladder defensively; 2200 doublings exceed any f64 range.
    for _ in 0..2200 {
        pts.push(center - step);
        pts.push(center + step);
        if step >= outer_scale {
            break;
        }
        step *= 2.0;
    }
    pts
}

/// 15-point Kronrod rule with embedded 7-point Gauss error estimate on
/// `[lo, hi]`. Returns `(integral, error_estimate)`.
fn qk15<F>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    // Kronrod abscissae (positive half) and weights; Gauss-7 weights last.
    const XGK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];

    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::NonFinite(center));
    }

    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = resk.abs();

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = half * XGK[jtw];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        if !f1.is_finite() {
            return Err(Error::NonFinite(center - absc));
        }
        if !f2.is_finite() {
            return Err(Error::NonFinite(center + absc));
        }
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let fsum = f1 + f2;
        resg += WG[j] * fsum;
        resk += WGK[jtw] * fsum;
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = half * XGK[jtwm1];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        if !f1.is_finite() {
            return Err(Error::NonFinite(center - absc));
        }
        if !f2.is_finite() {
            return Err(Error::NonFinite(center + absc));
        }
        if jtwm1 < 7 {
            fv1[jtwm1] = f1;
            fv2[jtwm1] = f2;
        }
        let fsum = f1 + f2;
        resk += WGK[jtwm1] * fsum;
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut abserr = ((resk - resg) * half).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * 1.0f64.min((200.0 * abserr / resasc).powf(1.5));
    }
    let tiny_floor = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny_floor {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((value, abserr))
}

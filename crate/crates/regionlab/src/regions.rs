//! Approach regions in the upper half-plane: cones over vertex sets.
//!
//! A region is determined by a gauge `r`, a finite set of vertices
//! `(x_v, t_v)`, and optionally a *base cone* of aperture `a` anchored at
//! the boundary origin. Its cross-section at height `t` is
//!
//! `Omega(t) = [-a t, a t]  union_v  [x_v - w, x_v + w]`,
//! `w = r(t) - r(t_v)`, over vertices with `t_v <= t`,
//!
//! a finite union of closed intervals ([`IntervalUnion`]). Membership,
//! measure, and all containment checks go through [`cross_section`](ApproachRegion::cross_section),
//! so there is exactly one code path defining the geometry.
//!
//! Two constructions on top:
//!
//! - [`check_r_condition`] asks whether the region absorbs translated
//!   probe-gauge cones planted at its own points — the geometric property
//!   that lets a maximal operator see the region as self-similar. Regions
//!   built from cones of the *same* gauge pass by the triangle inequality;
//!   the interesting failures happen when the probe gauge is wider.
//! - [`complete`] swaps the gauge: same vertices, same base, cones widened
//!   to a dominating gauge. This is the completion that turns a harmless
//!   region into one with oversized sections.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauge::{self, GaugeFunction};
use crate::intervals::{self, IntervalUnion};

/// Errors for region construction and queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex must have finite x and positive finite t, got ({0}, {1})")]
    InvalidVertex(f64, f64),
    #[error("base aperture must be positive and finite, got {0}")]
    InvalidAperture(f64),
    #[error("height must be positive and finite, got {0}")]
    InvalidHeight(f64),
    #[error(
        "completion gauge increments must dominate the region's: \
         over [{s}, {t}] got {got} < {need}"
    )]
    DominationFailed { s: f64, t: f64, got: f64, need: f64 },
    #[error(
        "completing a base cone needs a concave gauge; chord slopes \
         increase across [{s}, {t}, {u}]"
    )]
    NotConcave { s: f64, t: f64, u: f64 },
    #[error("need at least two heights to check increments, got {0}")]
    TooFewHeights(usize),
    #[error("gauge error: {0}")]
    Gauge(#[from] gauge::Error),
    #[error("interval error: {0}")]
    Interval(#[from] intervals::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A cone vertex: boundary offset `x` and height `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub x: f64,
    pub t: f64,
}

impl Vertex {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !x.is_finite() || !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidVertex(x, t));
        }
        Ok(Vertex { x, t })
    }
}

/// Section of the cone with vertex `v` under `gauge` at height `t`:
/// `None` below the vertex, the degenerate point at `t = t_v`, and
/// `[x_v - w, x_v + w]` with `w = r(t) - r(t_v)` above it.
///
/// # Example
///
/// ```
/// use regionlab::gauge::GaugeFunction;
/// use regionlab::regions::{cone_section, Vertex};
///
/// let unit = GaugeFunction::power_law(1.0, 1.0).unwrap();
/// let v = Vertex::new(0.5, 0.1).unwrap();
/// let (lo, hi) = cone_section(&v, &unit, 0.3).unwrap().unwrap();
/// assert!((lo - 0.3).abs() < 1e-12 && (hi - 0.7).abs() < 1e-12);
/// assert_eq!(cone_section(&v, &unit, 0.05).unwrap(), None);
/// assert_eq!(cone_section(&v, &unit, 0.1).unwrap(), Some((0.5, 0.5)));
/// ```
pub fn cone_section(v: &Vertex, gauge: &GaugeFunction, t: f64) -> Result<Option<(f64, f64)>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidHeight(t));
    }
    if t < v.t {
        return Ok(None);
    }
    // Clamp tiny negative widths from interpolation roundoff at t == t_v.
    let w = (gauge.eval(t)? - gauge.eval(v.t)?).max(0.0);
    Ok(Some((v.x - w, v.x + w)))
}

/// An approach region: a gauge, a vertex set, and an optional base cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionSpec", into = "RegionSpec")]
pub struct ApproachRegion {
    gauge: GaugeFunction,
    /// Sorted by decreasing height; deepest (smallest `t`) last.
    vertices: Vec<Vertex>,
    /// `Some(a)`: include the nontangential cone `|x| <= a t` from the
    /// boundary origin.
    base_aperture: Option<f64>,
    /// Include the gauge cone `|x| <= r(t)` rooted at the boundary origin.
    /// This is what completing the base cone leaves behind: apex points
    /// `(x0, t0)` with `|x0| <= a t0` contribute `|x - x0| <= r(t) - r(t0)`,
    /// and for a concave gauge the union over `t0 <= t` is exactly
    /// `[-max(a t, r(t)), +max(a t, r(t))]` — the linear cone joined with
    /// the gauge cone from the apex.
    #[serde(default)]
    apex_cone: bool,
}

/// Serialisable form of [`ApproachRegion`]; validation applies on the way
/// back in, so hand-edited region files cannot smuggle in bad vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionSpec {
    gauge: GaugeFunction,
    vertices: Vec<Vertex>,
    base_aperture: Option<f64>,
}

impl TryFrom<RegionSpec> for ApproachRegion {
    type Error = Error;
    fn try_from(s: RegionSpec) -> Result<Self> {
        ApproachRegion::new(s.gauge, s.vertices, s.base_aperture)
    }
}

impl From<ApproachRegion> for RegionSpec {
    fn from(r: ApproachRegion) -> Self {
        RegionSpec {
            gauge: r.gauge,
            vertices: r.vertices,
            base_aperture: r.base_aperture,
        }
    }
}

impl ApproachRegion {
    /// Assemble a region; vertices are sorted by decreasing height.
    pub fn new(
        gauge: GaugeFunction,
        vertices: Vec<Vertex>,
        base_aperture: Option<f64>,
    ) -> Result<Self> {
        for v in &vertices {
            Vertex::new(v.x, v.t)?;
        }
        if let Some(a) = base_aperture {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidAperture(a));
            }
        }
        let mut vertices = vertices;
        vertices.sort_by(|a, b| b.t.partial_cmp(&a.t).expect("finite heights"));
        Ok(ApproachRegion {
            gauge,
            vertices,
            base_aperture,
            apex_cone: false,
        })
    }

    /// The same region with the origin-rooted gauge cone switched on
    /// (see the `apex_cone` field); [`complete`] uses this to carry the
    /// completed base cone.
    pub fn with_apex_cone(mut self) -> Self {
        self.apex_cone = true;
        self
    }

    /// Whether the origin-rooted gauge cone is part of the region.
    pub fn apex_cone(&self) -> bool {
        self.apex_cone
    }

    pub fn gauge(&self) -> &GaugeFunction {
        &self.gauge
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn base_aperture(&self) -> Option<f64> {
        self.base_aperture
    }

    /// Cross-section at height `t` as a canonical interval union.
    ///
    /// # Example
    ///
    /// ```
    /// use regionlab::gauge::GaugeFunction;
    /// use regionlab::regions::ApproachRegion;
    ///
    /// let unit = GaugeFunction::power_law(1.0, 1.0).unwrap();
    /// let base = ApproachRegion::new(unit, vec![], Some(3.0)).unwrap();
    /// let sec = base.cross_section(0.2).unwrap();
    /// assert_eq!(sec.component_count(), 1);
    /// assert!((sec.measure() - 1.2).abs() < 1e-12);
    /// ```
    pub fn cross_section(&self, t: f64) -> Result<IntervalUnion> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidHeight(t));
        }
        let mut parts = Vec::with_capacity(self.vertices.len() + 2);
        if let Some(a) = self.base_aperture {
            parts.push((-a * t, a * t));
        }
        if self.apex_cone {
            let w = self.gauge.eval(t)?;
            parts.push((-w, w));
        }
        for v in &self.vertices {
            if let Some(seg) = cone_section(v, &self.gauge, t)? {
                parts.push(seg);
            }
        }
        Ok(IntervalUnion::from_parts(parts)?)
    }

    /// Point membership, defined through [`Self::cross_section`] so that
    /// geometry has a single source of truth.
    pub fn contains(&self, y: f64, t: f64) -> Result<bool> {
        Ok(self.cross_section(t)?.contains_point(y))
    }
}

/// One offending sample from [`check_r_condition`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RConditionViolation {
    /// Sampled region point.
    pub x: f64,
    pub s: f64,
    /// Height at which its probe cone escapes.
    pub t: f64,
    /// Measure of the escaping part of the probe section.
    pub excess: f64,
}

/// Outcome of [`check_r_condition`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RConditionReport {
    /// Number of (point, height) pairs examined.
    pub samples: usize,
    /// Largest escaping measure over all samples (0 when the condition
    /// holds on the sample set).
    pub worst_excess: f64,
    /// Up to 32 worst offending samples, sorted by excess, largest first.
    pub violations: Vec<RConditionViolation>,
}

impl RConditionReport {
    pub fn holds(&self) -> bool {
        self.worst_excess == 0.0
    }
}

/// Check whether probe-gauge cones planted at the region's own points stay
/// inside the region.
///
/// For every vertex cone and the base cone, points are sampled at each
/// height `s` in `heights` at fractional offsets `offsets` across the
/// section; for each sampled point `(x, s)` and each later height
/// `t >= s` in `heights`, the probe section `[x ± (rho(t) - rho(s))]` is
/// compared against the region's cross-section. Excesses below a relative
/// roundoff slack (1e-11 of the local scale) are snapped to zero, so a
/// report of exact zero is meaningful; genuine failures show excesses on
/// the scale of the probe gauge itself.
///
/// # Arguments
///
/// * `region` - the region supplying both the points and the sections.
/// * `probe` - gauge `rho` generating the translated cones.
/// * `heights` - sample heights (positive, need not be sorted).
/// * `offsets` - fractions of the section half-width, within `[-1, 1]`;
///   e.g. `[-1.0, -0.5, 0.0, 0.5, 1.0]`.
pub fn check_r_condition(
    region: &ApproachRegion,
    probe: &GaugeFunction,
    heights: &[f64],
    offsets: &[f64],
) -> Result<RConditionReport> {
    if heights.len() < 2 {
        return Err(Error::TooFewHeights(heights.len()));
    }
    let mut hs: Vec<f64> = heights.to_vec();
    hs.sort_by(|a, b| a.partial_cmp(b).expect("finite heights"));
    hs.dedup();
    for &h in &hs {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidHeight(h));
        }
    }

    // Sampled region points (x, s).
    let mut points: Vec<(f64, f64)> = Vec::new();
    for v in region.vertices() {
        points.push((v.x, v.t));
        for &s in hs.iter().filter(|&&s| s >= v.t) {
            if let Some((lo, hi)) = cone_section(v, region.gauge(), s)? {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (lo + hi);
                for &o in offsets {
                    points.push((mid + o.clamp(-1.0, 1.0) * half, s));
                }
            }
        }
    }
    if let Some(a) = region.base_aperture() {
        for &s in &hs {
            for &o in offsets {
                points.push((o.clamp(-1.0, 1.0) * a * s, s));
            }
        }
    }

    // Cache region sections at the probe heights.
    let sections: Vec<IntervalUnion> = hs
        .iter()
        .map(|&t| region.cross_section(t))
        .collect::<Result<_>>()?;

    let mut samples = 0usize;
    let mut violations: Vec<RConditionViolation> = Vec::new();
    for &(x, s) in &points {
        let rho_s = probe.eval(s)?;
        for (&t, section) in hs.iter().zip(&sections).filter(|(&t, _)| t >= s) {
            let w = (probe.eval(t)? - rho_s).max(0.0);
            let candidate = IntervalUnion::interval(x - w, x + w)?;
            let mut excess = candidate.difference_measure(section);
            let slack = 1e-11 * (w + x.abs() + t);
            if excess <= slack {
                excess = 0.0;
            }
            samples += 1;
            if excess > 0.0 {
                violations.push(RConditionViolation { x, s, t, excess });
            }
        }
    }
    violations.sort_by(|a, b| b.excess.partial_cmp(&a.excess).expect("finite"));
    violations.truncate(32);
    let worst_excess = violations.first().map_or(0.0, |v| v.excess);
    Ok(RConditionReport {
        samples,
        worst_excess,
        violations,
    })
}

/// Swap the region's gauge for a wider one over the same vertex set and
/// base cone — the *completion* of the region under that gauge.
///
/// For the swap to only enlarge the region, the new gauge's increments must
/// dominate the old one's: `rho(t) - rho(s) >= r(t) - r(s)` for `s < t`.
/// This is verified on consecutive pairs of the supplied heights together
/// with the vertex heights (increments telescope, so consecutive pairs
/// imply all sampled pairs); a failure reports the offending pair.
///
/// When the region carries a base cone, its completion also survives as the
/// origin-rooted gauge cone `|x| <= rho(t)`: apex points near the boundary
/// spawn gauge cones, and their union telescopes down to the origin. That
/// union is exactly `|x| <= max(a t, rho(t))` when `rho` is concave (the
/// apex objective `a t0 - rho(t0)` is then convex in `t0`, so its maximum
/// sits at an endpoint); concavity is verified on the same height ladder by
/// checking that the chord slopes of `rho` do not increase.
///
/// # Arguments
///
/// * `region` - region to complete.
/// * `completion` - the wider gauge `rho`.
/// * `heights` - heights on which increment domination is verified; must
///   contain at least two values and should span the heights the completed
///   region will be used at.
pub fn complete(
    region: &ApproachRegion,
    completion: GaugeFunction,
    heights: &[f64],
) -> Result<ApproachRegion> {
    let mut hs: Vec<f64> = heights.to_vec();
    hs.extend(region.vertices().iter().map(|v| v.t));
    hs.sort_by(|a, b| a.partial_cmp(b).expect("finite heights"));
    hs.dedup();
    if hs.len() < 2 {
        return Err(Error::TooFewHeights(hs.len()));
    }
    for pair in hs.windows(2) {
        let (s, t) = (pair[0], pair[1]);
        let got = completion.eval(t)? - completion.eval(s)?;
        let need = region.gauge().eval(t)? - region.gauge().eval(s)?;
        if got < need - 1e-12 * need.abs().max(completion.eval(t)?) {
            return Err(Error::DominationFailed { s, t, got, need });
        }
    }
    let completes_base = region.base_aperture().is_some() || region.apex_cone();
    if completes_base {
        for triple in hs.windows(3) {
            let (s, t, u) = (triple[0], triple[1], triple[2]);
            // A chord over a sub-epsilon gap measures rounding noise in the
            // gauge, not its shape; skip those rather than reject the gauge.
            if t - s < 1e-12 * t || u - t < 1e-12 * u {
                continue;
            }
            let lower = (completion.eval(t)? - completion.eval(s)?) / (t - s);
            let upper = (completion.eval(u)? - completion.eval(t)?) / (u - t);
            if upper > lower * (1.0 + 1e-9) {
                return Err(Error::NotConcave { s, t, u });
            }
        }
    }
    let completed = ApproachRegion::new(
        completion,
        region.vertices().to_vec(),
        region.base_aperture(),
    )?;
    Ok(if completes_base {
        completed.with_apex_cone()
    } else {
        completed
    })
}

/// One row of a section-size profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SectionRow {
    pub t: f64,
    /// Measure of the cross-section.
    pub measure: f64,
    /// Connected components of the cross-section.
    pub components: usize,
    /// `measure / reference(t)` — the size criterion statistic.
    pub ratio: f64,
}

/// Tabulate cross-section sizes against a reference gauge.
///
/// The statistic `|Omega(t)| / rho(t)` is the quantity whose boundedness
/// characterises weak-type behaviour of the associated maximal operator;
/// profiles of the original and completed regions differ qualitatively.
pub fn section_profile(
    region: &ApproachRegion,
    reference: &GaugeFunction,
    heights: &[f64],
) -> Result<Vec<SectionRow>> {
    let mut rows = Vec::with_capacity(heights.len());
    for &t in heights {
        let section = region.cross_section(t)?;
        let measure = section.measure();
        rows.push(SectionRow {
            t,
            measure,
            components: section.component_count(),
            ratio: measure / reference.eval(t)?,
        });
    }
    Ok(rows)
}

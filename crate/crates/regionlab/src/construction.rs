//! The inductive multi-level construction of the counterexample region.
//!
//! The construction places rows of unit-aperture cones at a rapidly
//! decreasing sequence of heights `t_1 > t_2 > ...`. Level `k` consists of
//! `N_k` cone vertices at height `t_k`, packed at spacing `r(t_k)` (the
//! gauge width) just left of the curve point `gamma(t_k) = N_k r(t_k)`:
//!
//! `x_i = gamma(t_k) - i * r(t_k)`, `i = 0, ..., N_k - 1`.
//!
//! Each level must satisfy four constraints, whose *residuals* (slack, all
//! required nonnegative) are recorded per level:
//!
//! - **takeoff** `r(t_k) > 3 t_k`: the row sits outside the central
//!   nontangential cone at its own height, so its cones are genuinely new;
//! - **spacing** `gamma(t_k) + (t_{k-1} - t_k) < 2 t_{k-1}`: by the time the
//!   row's unit cones reach the previous level's height they are confined
//!   well inside the previous level's central zone;
//! - **count** `t_k N_k < r(t_k)`: the whole row is shorter than one gauge
//!   width, which keeps the row's own sections small;
//! - **slow growth** `N_k * int_{t_k}^{gamma(t_{k-1})} K <= C_N`: the row's
//!   multiplicity cannot outrun the kernel mass between consecutive levels;
//!   this is the constraint that caps how fast `N_k` may grow and forces the
//!   heights to collapse double-exponentially (for the model kernel,
//!   `t_k ~ t_{k-1}^{1/beta}`).
//!
//! Heights are searched along dyadic halvings of the previous height and
//! the *largest* feasible height is taken ([`choose_next_level`]). The slow
//! growth constraint only tightens as `t` decreases, so if the geometric
//! constraints become satisfiable before it does, no height works at this
//! level: [`build`] then restarts the whole induction from a halved starting
//! height ([`Error::SlowGrowthUnsatisfiable`] is the restart signal). The
//! restart count is part of the trace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauge::{self, GaugeFunction};
use crate::kernels::{self, RadialKernel};
use crate::regions::{self, ApproachRegion, Vertex};

/// Errors for the construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration parameter {name} invalid: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(
        "gauge never satisfies r(t) > 3t while halving from the start height \
         (reached t = {t}, r = {gauge_value}); the gauge is not tangential"
    )]
    GaugeNotTangential { t: f64, gauge_value: f64 },
    #[error("level {level}: no feasible height found within the dyadic search depth")]
    LevelSearchExhausted { level: usize },
    #[error(
        "level {level}: slow-growth load {load} exceeds cap {cap} at every \
         feasible height (first geometric pass at t = {t}); restart with a \
         smaller start height"
    )]
    SlowGrowthUnsatisfiable {
        level: usize,
        t: f64,
        load: f64,
        cap: f64,
    },
    #[error("start height {t}: row of {count} cones does not fit under the gauge width")]
    StartCountInfeasible { t: f64, count: u32 },
    #[error("construction did not become feasible within {attempts} start-height restarts")]
    RestartsExhausted { attempts: usize },
    #[error("gauge error: {0}")]
    Gauge(#[from] gauge::Error),
    #[error("kernel error: {0}")]
    Kernel(#[from] kernels::Error),
    #[error("region error: {0}")]
    Region(#[from] regions::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Heights below this are treated as numerically unreachable.
const HEIGHT_FLOOR: f64 = 1e-300;

/// How the per-level cone count `N_k` evolves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountSchedule {
    /// `N_k = first + (k - 1)`: the unbounded schedule that drives the
    /// completed region's sections to grow without bound.
    UnitIncrement { first: u32 },
    /// `N_k = count` for every level: a control schedule under which the
    /// completed region's section ratios stay bounded.
    Constant { count: u32 },
}

impl CountSchedule {
    /// Cone count at 1-based level `k`.
    pub fn count(&self, k: usize) -> u32 {
        match *self {
            CountSchedule::UnitIncrement { first } => first + (k as u32 - 1),
            CountSchedule::Constant { count } => count,
        }
    }
}

/// Parameters of the construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionConfig {
    /// Kernel supplying the slow-growth mass.
    pub kernel: RadialKernel,
    /// Gauge `r(t)` that spaces the rows; must widen tangentially for the
    /// construction to start.
    pub gauge: GaugeFunction,
    /// Number of levels to build.
    pub k_max: usize,
    /// Cone count per level.
    pub schedule: CountSchedule,
    /// Cap `C_N` for the slow-growth constraint.
    pub slow_growth_cap: f64,
    /// First candidate for the starting height `t_1`.
    pub t1_initial: f64,
    /// Aperture of the central base cone of the resulting region.
    pub base_aperture: f64,
    /// Maximum number of start-height restarts before giving up.
    pub max_restarts: usize,
    /// Maximum dyadic halvings when searching for each level's height.
    pub level_search_depth: usize,
}

impl ConstructionConfig {
    /// The model configuration: square-root kernel gauge, six levels,
    /// counts 2, 3, ..., 7.
    pub fn model_defaults() -> Result<Self> {
        let kernel = RadialKernel::model(0.5)?;
        let gauge = GaugeFunction::asymptotic_for(&kernel)?;
        Ok(ConstructionConfig {
            kernel,
            gauge,
            k_max: 6,
            schedule: CountSchedule::UnitIncrement { first: 2 },
            slow_growth_cap: 1.0,
            t1_initial: 1e-2,
            base_aperture: 3.0,
            max_restarts: 256,
            level_search_depth: 4096,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 4] = [
            ("k_max", self.k_max as f64, self.k_max >= 1),
            (
                "slow_growth_cap",
                self.slow_growth_cap,
                self.slow_growth_cap > 0.0 && self.slow_growth_cap.is_finite(),
            ),
            (
                "t1_initial",
                self.t1_initial,
                self.t1_initial > 0.0 && self.t1_initial.is_finite(),
            ),
            (
                "base_aperture",
                self.base_aperture,
                self.base_aperture > 0.0 && self.base_aperture.is_finite(),
            ),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        let first_count = self.schedule.count(1);
        if first_count == 0 {
            return Err(Error::InvalidParameter {
                name: "schedule",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// One placed level with its constraint residuals (all nonnegative in a
/// successful build; `None` where the constraint does not apply).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    /// 1-based level index.
    pub index: usize,
    /// Height `t_k`.
    pub t: f64,
    /// Cone count `N_k`.
    pub count: u32,
    /// Gauge width `r(t_k)` — also the spacing of the row.
    pub gauge_value: f64,
    /// Curve point `gamma(t_k) = N_k r(t_k)` (the rightmost vertex).
    pub curve_value: f64,
    /// Vertex positions, rightmost first: `x_i = gamma - i r`.
    pub points: Vec<f64>,
    /// `r(t_1) - 3 t_1` (level 1 only).
    pub start_residual: Option<f64>,
    /// `2 t_{k-1} - gamma(t_k) - (t_{k-1} - t_k)` (levels 2+).
    pub spacing_residual: Option<f64>,
    /// `r(t_k) - t_k N_k`.
    pub count_residual: f64,
    /// `C_N - N_k int_{t_k}^{gamma(t_{k-1})} K` (levels 2+).
    pub slow_growth_residual: Option<f64>,
}

/// Full record of a build: levels, their residuals, and how many
/// start-height restarts were needed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub levels: Vec<LevelRecord>,
    /// Start-height restarts consumed before the induction went through.
    pub restarts: usize,
}

impl ConstructionTrace {
    /// Level heights `t_1 > t_2 > ...`.
    pub fn heights(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.t).collect()
    }

    /// The level with 1-based index `k`.
    pub fn level(&self, k: usize) -> Option<&LevelRecord> {
        self.levels.get(k.wrapping_sub(1))
    }
}

/// Find the starting height: the first dyadic halving of `t1_initial` at
/// which the gauge satisfies the takeoff condition `r(t) > 3t`.
///
/// # Example
///
/// ```
/// use regionlab::construction::{choose_start, ConstructionConfig};
/// use regionlab::gauge::GaugeFunction;
///
/// let mut cfg = ConstructionConfig::model_defaults().unwrap();
/// // r(t) = t^{3/4} > 3t first holds at t < 3^{-4}; halving from 1 lands
/// // on exactly 2^-7.
/// cfg.gauge = GaugeFunction::power_law(1.0, 0.75).unwrap();
/// cfg.t1_initial = 1.0;
/// assert_eq!(choose_start(&cfg).unwrap(), 0.0078125);
/// ```
pub fn choose_start(cfg: &ConstructionConfig) -> Result<f64> {
    cfg.validate()?;
    choose_start_from(cfg, cfg.t1_initial)
}

fn choose_start_from(cfg: &ConstructionConfig, initial: f64) -> Result<f64> {
    let mut t = initial;
    loop {
        if t < HEIGHT_FLOOR {
            return Err(Error::GaugeNotTangential {
                t,
                gauge_value: cfg.gauge.eval(t).unwrap_or(f64::NAN),
            });
        }
        let r = cfg.gauge.eval(t)?;
        if r > 3.0 * t {
            return Ok(t);
        }
        t *= 0.5;
    }
}

/// Place the next level below `prev`: the largest dyadic halving of the
/// previous height at which all constraints hold.
///
/// Fails with [`Error::SlowGrowthUnsatisfiable`] as soon as the geometric
/// constraints (takeoff, spacing, count) pass but slow growth does not:
/// shrinking the height further only increases the kernel mass
/// `int_{t}^{gamma_prev} K`, so no deeper height can recover and the caller
/// must restart from a smaller `t_1`.
pub fn choose_next_level(
    cfg: &ConstructionConfig,
    prev: &LevelRecord,
    target_count: u32,
) -> Result<LevelRecord> {
    let level = prev.index + 1;
    let n = target_count as f64;
    let mut t = prev.t;
    for _ in 0..cfg.level_search_depth {
        t *= 0.5;
        if t < HEIGHT_FLOOR {
            break;
        }
        let r = cfg.gauge.eval(t)?;
        let takeoff = r - 3.0 * t;
        let spacing = 2.0 * prev.t - n * r - (prev.t - t);
        let count = r - t * n;
        if takeoff > 0.0 && spacing > 0.0 && count > 0.0 {
            let load = n * cfg.kernel.integral(t, prev.curve_value);
            if load <= cfg.slow_growth_cap {
                return Ok(place_level(
                    level,
                    t,
                    target_count,
                    r,
                    None,
                    Some(spacing),
                    count,
                    Some(cfg.slow_growth_cap - load),
                ));
            }
            return Err(Error::SlowGrowthUnsatisfiable {
                level,
                t,
                load,
                cap: cfg.slow_growth_cap,
            });
        }
    }
    Err(Error::LevelSearchExhausted { level })
}

/// Assemble a level record with its vertex row. Positions are built by
/// cumulative addition from the innermost point, so every gap stays within
/// one rounding of the gauge width and no drift accumulates.
#[allow(clippy::too_many_arguments)]
fn place_level(
    index: usize,
    t: f64,
    count: u32,
    gauge_value: f64,
    start_residual: Option<f64>,
    spacing_residual: Option<f64>,
    count_residual: f64,
    slow_growth_residual: Option<f64>,
) -> LevelRecord {
    let n = count as usize;
    let mut points = vec![0.0f64; n];
    points[n - 1] = gauge_value;
    for i in (0..n - 1).rev() {
        points[i] = points[i + 1] + gauge_value;
    }
    let curve_value = points[0];
    LevelRecord {
        index,
        t,
        count,
        gauge_value,
        curve_value,
        points,
        start_residual,
        spacing_residual,
        count_residual,
        slow_growth_residual,
    }
}

fn try_build(cfg: &ConstructionConfig, t1: f64) -> Result<Vec<LevelRecord>> {
    let n1 = cfg.schedule.count(1);
    let r1 = cfg.gauge.eval(t1)?;
    let count_residual = r1 - t1 * n1 as f64;
    if count_residual <= 0.0 {
        return Err(Error::StartCountInfeasible { t: t1, count: n1 });
    }
    let mut levels = vec![place_level(
        1,
        t1,
        n1,
        r1,
        Some(r1 - 3.0 * t1),
        None,
        count_residual,
        None,
    )];
    for k in 2..=cfg.k_max {
        let rec = choose_next_level(cfg, levels.last().expect("level 1 placed"), cfg.schedule.count(k))?;
        levels.push(rec);
    }
    Ok(levels)
}

/// Run the full induction, restarting from a halved start height whenever a
/// level's slow-growth constraint is unsatisfiable (or the first row does
/// not fit), and assemble the resulting approach region.
///
/// The region consists of unit-aperture cones (`r(t) = t`) over all placed
/// vertices plus the central base cone. The trace records every level's
/// residuals and the number of restarts consumed.
pub fn build(cfg: &ConstructionConfig) -> Result<(ConstructionTrace, ApproachRegion)> {
    cfg.validate()?;
    let mut t1 = choose_start(cfg)?;
    let mut restarts = 0usize;
    loop {
        match try_build(cfg, t1) {
            Ok(levels) => {
                let trace = ConstructionTrace { levels, restarts };
                let mut vertices = Vec::new();
                for level in &trace.levels {
                    for &x in &level.points {
                        vertices.push(Vertex::new(x, level.t)?);
                    }
                }
                let unit = GaugeFunction::power_law(1.0, 1.0)
                    .expect("unit gauge parameters are valid");
                let region = ApproachRegion::new(unit, vertices, Some(cfg.base_aperture))?;
                return Ok((trace, region));
            }
            Err(Error::SlowGrowthUnsatisfiable { .. }) | Err(Error::StartCountInfeasible { .. })
                if restarts < cfg.max_restarts =>
            {
                restarts += 1;
                t1 = choose_start_from(cfg, 0.5 * t1)?;
            }
            Err(Error::SlowGrowthUnsatisfiable { .. }) | Err(Error::StartCountInfeasible { .. }) => {
                return Err(Error::RestartsExhausted { attempts: restarts });
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn defaults() -> ConstructionConfig {
        ConstructionConfig::model_defaults().unwrap()
    }

    #[test]
    fn choose_start_halves_to_exact_dyadic() {
        let mut cfg = defaults();
        cfg.gauge = GaugeFunction::power_law(1.0, 0.75).unwrap();
        cfg.t1_initial = 1.0;
        // r(t) > 3t iff t < 3^{-4} = 0.012345...; the halving scan from 1
        // lands exactly on 2^-7.
        assert_eq!(choose_start(&cfg).unwrap(), 0.0078125);
    }

    #[test]
    fn choose_start_accepts_wide_gauge_immediately() {
        let cfg = defaults();
        // r(1e-2) = 0.0707 > 0.03 already.
        assert_eq!(choose_start(&cfg).unwrap(), 1e-2);
    }

    #[test]
    fn choose_start_rejects_nontangential_gauge() {
        let mut cfg = defaults();
        cfg.gauge = GaugeFunction::power_law(1.0, 1.0).unwrap();
        let err = choose_start(&cfg).unwrap_err();
        assert!(matches!(err, Error::GaugeNotTangential { .. }));
    }

    #[test]
    fn default_build_restarts_to_feasible_start() {
        let cfg = defaults();
        let (trace, region) = build(&cfg).unwrap();
        // The slow-growth constraint at level 2 rules out the first five
        // start heights; 1e-2 / 2^5 is the first that works.
        assert_eq!(trace.restarts, 5);
        assert_eq!(trace.levels[0].t, 3.125e-4);
        let counts: Vec<u32> = trace.levels.iter().map(|l| l.count).collect();
        assert_eq!(counts, vec![2, 3, 4, 5, 6, 7]);
        assert_eq!(region.vertices().len(), 2 + 3 + 4 + 5 + 6 + 7);
        assert_eq!(region.base_aperture(), Some(3.0));
        // Row geometry at level 1: r = 0.0125, gamma = 0.025.
        assert_relative_eq!(trace.levels[0].gauge_value, 0.0125, max_relative = 1e-12);
        assert_relative_eq!(trace.levels[0].curve_value, 0.025, max_relative = 1e-12);
    }

    #[test]
    fn level_heights_collapse_doubly_exponentially() {
        // The frozen dyadic cascade for the model defaults. Heights are
        // produced by exact halvings, so the ratios are exact powers of two.
        let (trace, _) = build(&defaults()).unwrap();
        let expected_m = [14i32, 29, 59, 118, 237];
        for (k, &m) in expected_m.iter().enumerate() {
            let ratio = trace.levels[k + 1].t / trace.levels[k].t;
            assert_eq!(
                ratio,
                2f64.powi(-m),
                "level {} height ratio should be 2^-{m}",
                k + 2
            );
        }
        // Deepest height: ~8.4e-142.
        assert_relative_eq!(trace.levels[5].t, 8.397e-142, max_relative = 1e-3);
    }

    #[test]
    fn residuals_are_nonnegative_and_heights_are_maximal() {
        let cfg = defaults();
        let (trace, _) = build(&cfg).unwrap();
        for (k, level) in trace.levels.iter().enumerate() {
            assert!(level.gauge_value > 3.0 * level.t, "takeoff at level {}", k + 1);
            assert!(level.count_residual > 0.0, "count at level {}", k + 1);
            if k == 0 {
                assert!(level.start_residual.unwrap() > 0.0);
            } else {
                assert!(level.spacing_residual.unwrap() > 0.0);
                assert!(level.slow_growth_residual.unwrap() >= 0.0);

                // Maximality: one dyadic step shallower, some constraint
                // fails. Recheck with the closed forms, independent of the
                // search loop.
                let prev = &trace.levels[k - 1];
                let t2 = level.t * 2.0;
                let n = level.count as f64;
                let r2 = cfg.gauge.eval(t2).unwrap();
                let takeoff = r2 - 3.0 * t2;
                let spacing = 2.0 * prev.t - n * r2 - (prev.t - t2);
                let count = r2 - t2 * n;
                let load = n * cfg.kernel.integral(t2, prev.curve_value);
                assert!(
                    takeoff <= 0.0
                        || spacing <= 0.0
                        || count <= 0.0
                        || load > cfg.slow_growth_cap,
                    "level {}: twice the height still satisfies everything",
                    k + 1
                );
            }
        }
    }

    #[test]
    fn slow_growth_residual_is_frozen_value() {
        // Level 2 at the default configuration:
        // C_N - 3 * 2 (sqrt(0.025) - sqrt(t_2)) = 0.0522 to three digits.
        let (trace, _) = build(&defaults()).unwrap();
        let res = trace.levels[1].slow_growth_residual.unwrap();
        assert_relative_eq!(res, 0.0522, max_relative = 0.05);
    }

    #[test]
    fn rows_are_spaced_at_the_gauge_width() {
        let (trace, _) = build(&defaults()).unwrap();
        for level in &trace.levels {
            let r = level.gauge_value;
            assert_eq!(level.points[level.points.len() - 1], r);
            assert_eq!(level.points[0], level.curve_value);
            for pair in level.points.windows(2) {
                // Cumulative addition keeps every gap within rounding of r.
                assert_relative_eq!(pair[0] - pair[1], r, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn build_is_deterministic() {
        let cfg = defaults();
        let (a, _) = build(&cfg).unwrap();
        let (b, _) = build(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn constant_schedule_builds() {
        let mut cfg = defaults();
        cfg.schedule = CountSchedule::Constant { count: 2 };
        let (trace, _) = build(&cfg).unwrap();
        assert!(trace.levels.iter().all(|l| l.count == 2));
        assert_eq!(trace.levels.len(), 6);
    }

    #[test]
    fn oversized_first_row_restarts_until_it_fits() {
        let mut cfg = defaults();
        cfg.schedule = CountSchedule::Constant { count: 50 };
        cfg.k_max = 2;
        let (trace, _) = build(&cfg).unwrap();
        assert!(trace.restarts > 5);
        assert!(trace.levels[0].t < 2e-4);
        assert!(trace.levels.iter().all(|l| l.count == 50));
        assert!(trace.levels[1].slow_growth_residual.unwrap() >= 0.0);
    }

    #[test]
    fn table_gauge_domain_ends_the_build_honestly() {
        let mut cfg = defaults();
        // A tabulated square-root gauge covering only [1e-4, 1e-1]: level 2
        // needs heights ~1e-8, far outside.
        let samples: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let t = 1e-4 * 10f64.powf(i as f64 / 10.0);
                (t, t.sqrt() / 2f64.sqrt())
            })
            .collect();
        cfg.gauge = GaugeFunction::from_samples(samples).unwrap();
        let err = build(&cfg).unwrap_err();
        assert!(matches!(err, Error::Gauge(gauge::Error::OutOfRange { .. })));
    }

    #[test]
    fn vertices_of_built_region_are_in_region() {
        let (trace, region) = build(&defaults()).unwrap();
        for level in &trace.levels {
            for &x in &level.points {
                assert!(
                    region.contains(x, level.t).unwrap(),
                    "vertex ({x}, {}) missing",
                    level.t
                );
            }
        }
    }

    #[test]
    fn trace_serde_round_trip() {
        let (trace, _) = build(&defaults()).unwrap();
        let js = serde_json::to_string(&trace).unwrap();
        let back: ConstructionTrace = serde_json::from_str(&js).unwrap();
        assert_eq!(trace, back);
    }
}

//! Scale-stratified weak-type measurement.
//!
//! The experiment that separates the two regions: push a unit-mass box atom
//! down to each level height `t_k`, evaluate the region-restricted maximal
//! function of its extension on a stratified grid, and record the weak-type
//! statistic `sup_λ λ·|{M F > λ}| / ‖F‖₁`. A plain grid cannot do this — the
//! construction spans ~140 decades of height — so both the sample heights and
//! the sample abscissas are laid out per level:
//!
//! * **Height bands.** For the atom at level `k`, rows are log-spaced over
//!   `[band_low·t_j, band_high·t_j]` for every band `j ≤ k`. Deeper rows see
//!   the atom as flat (its extension is capped near `‖f‖_∞`), so they cannot
//!   carry the supremum and are not sampled.
//! * **Nested panels.** Abscissas live on one panel per level,
//!   `[-(γ_j + pad·r_j), +pad·r_j]`, each split into equal cells; a cell of a
//!   coarse panel whose center falls inside the next finer panel is dropped,
//!   so the surviving cells tile the outermost panel without double counting
//!   and each carries its width as weight.
//!
//! Within a cell the maximal value is taken at the cell center, but the
//! supremum over a cross-section part `x + [lo, hi]` is evaluated *exactly*:
//! the extension of a centered atom is even and nonincreasing in `|y|`, so
//! the best point of the part is the one closest to the atom center.
//!
//! Both regions are scanned over the same rows, cells, and weights, so their
//! reports are directly comparable. The panels confine the measurement to the
//! construction's own footprint: outside it the maximal function decays like
//! the classical nontangential one and adds the same bounded plateau to both
//! regions, which would only dilute the contrast the scan is after.
//!
//! Rows above the kernel's profile window (`t > ~1e-3·cutoff`, the handful at
//! the top of band 1) would need one quadrature per sample; those rows get a
//! per-row radial table built once and interpolated log-log instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::ConstructionTrace;
use crate::kernels::RadialKernel;
use crate::maximal::{
    extension_at, weak_type_report_weighted, TestFunction, WeakTypeReport, PROFILE_T_FRACTION,
};
use crate::regions::ApproachRegion;

/// Radial-table resolution for cached rows (points per decade of `|y|`).
const CACHE_POINTS_PER_DECADE: usize = 24;

/// Errors from the stratified scan.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid scan protocol: {0}")]
    InvalidProtocol(&'static str),
    #[error("scan needs a non-empty construction trace")]
    EmptyTrace,
    #[error(transparent)]
    Maximal(#[from] crate::maximal::Error),
    #[error(transparent)]
    Region(#[from] crate::regions::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Sampling layout for [`weak_type_scan`]. `Default` gives the resolution the
/// experiments run at; tests use lighter settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanProtocol {
    /// Log-spaced rows per height band (doubled per refinement step).
    pub heights_per_band: usize,
    /// Band `j` spans heights `[band_low·t_j, band_high·t_j]`.
    pub band_low: f64,
    /// Upper band factor; clamped to stay below half the previous level.
    pub band_high: f64,
    /// Cells per panel (doubled per refinement step).
    pub panel_cells: usize,
    /// Panel `j` spans `[-(γ_j + pad·r_j), +pad·r_j]`.
    pub panel_pad: f64,
    /// Atom at level `k` has half-width `t_k / atom_scale_divisor`.
    pub atom_scale_divisor: f64,
    /// Refinement exponent: rows and cells are multiplied by `2^refine`.
    pub refine: u32,
}

impl Default for ScanProtocol {
    fn default() -> Self {
        Self {
            heights_per_band: 24,
            band_low: 0.5,
            band_high: 8.0,
            panel_cells: 512,
            panel_pad: 4.0,
            atom_scale_divisor: 100.0,
            refine: 0,
        }
    }
}

impl ScanProtocol {
    fn validate(&self) -> Result<()> {
        if self.heights_per_band < 2 {
            return Err(Error::InvalidProtocol("heights_per_band must be >= 2"));
        }
        if !(self.band_low > 0.0 && self.band_high > self.band_low) {
            return Err(Error::InvalidProtocol("need 0 < band_low < band_high"));
        }
        if self.panel_cells < 8 {
            return Err(Error::InvalidProtocol("panel_cells must be >= 8"));
        }
        if !(self.panel_pad >= 1.0 && self.panel_pad.is_finite()) {
            return Err(Error::InvalidProtocol("panel_pad must be >= 1"));
        }
        if !(self.atom_scale_divisor >= 1.0 && self.atom_scale_divisor.is_finite()) {
            return Err(Error::InvalidProtocol("atom_scale_divisor must be >= 1"));
        }
        if self.refine > 6 {
            return Err(Error::InvalidProtocol("refine capped at 6"));
        }
        Ok(())
    }

    /// Rows per band after refinement.
    pub fn rows_per_band(&self) -> usize {
        self.heights_per_band << self.refine
    }

    /// Cells per panel after refinement.
    pub fn cells_per_panel(&self) -> usize {
        self.panel_cells << self.refine
    }

    /// The same protocol one refinement step finer.
    pub fn refined(&self) -> Self {
        Self {
            refine: self.refine + 1,
            ..self.clone()
        }
    }
}

/// Weak-type report for one level atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomScan {
    /// 1-based level of the atom.
    pub level: usize,
    /// Level height `t_k`.
    pub t_level: f64,
    /// Atom half-width `t_k / atom_scale_divisor`.
    pub half_width: f64,
    /// Weak-type statistics of the scanned maximal function.
    pub report: WeakTypeReport,
}

/// `n` log-spaced points over `[lo, hi]`, endpoints exact.
pub(crate) fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// Radial lookup table for one row: `u(|y|, t)` sampled on a log grid and
/// interpolated log-log. Only rows above the kernel's profile window need
/// one — there every sample would otherwise cost a fresh quadrature.
struct RowCache {
    log_r: Vec<f64>,
    log_u: Vec<f64>,
}

impl RowCache {
    fn build(kernel: &RadialKernel, atom: &TestFunction, t: f64, y_max: f64) -> Result<Self> {
        let half_width = match atom {
            TestFunction::BoxAtom { half_width, .. } => *half_width,
            _ => t,
        };
        // Below the smaller of the row height and the atom width the
        // extension is flat; one decade of margin is plenty.
        let r_min = 0.1 * t.min(half_width);
        let r_max = 1.01 * y_max.max(2.0 * r_min);
        let decades = (r_max / r_min).log10();
        let n = ((decades * CACHE_POINTS_PER_DECADE as f64).ceil() as usize + 2).clamp(8, 4096);
        let grid = logspace(r_min, r_max, n);
        let mut log_r = Vec::with_capacity(n);
        let mut log_u = Vec::with_capacity(n);
        for r in grid {
            let u = extension_at(kernel, atom, r, t)?;
            debug_assert!(u > 0.0, "extension of a box atom is strictly positive");
            log_r.push(r.ln());
            log_u.push(u.ln());
        }
        Ok(Self { log_r, log_u })
    }

    fn eval(&self, radius: f64) -> f64 {
        let lr = radius.max(f64::MIN_POSITIVE).ln();
        if lr <= self.log_r[0] {
            return self.log_u[0].exp();
        }
        let last = self.log_r.len() - 1;
        if lr >= self.log_r[last] {
            return self.log_u[last].exp();
        }
        let j = self.log_r.partition_point(|&v| v < lr).max(1);
        let (a, b) = (self.log_r[j - 1], self.log_r[j]);
        let w = (lr - a) / (b - a);
        (self.log_u[j - 1] * (1.0 - w) + self.log_u[j] * w).exp()
    }
}

/// One sampling row: its height, the region's cross-section there, and the
/// radial table when direct evaluation would be quadrature-bound.
struct Row {
    t: f64,
    parts: Vec<(f64, f64)>,
    cache: Option<RowCache>,
}

/// Maximal value over one row at abscissa `x`: the cross-section shifted by
/// `x` is a union of intervals, and on each the even, radially nonincreasing
/// extension peaks at the point nearest the atom center.
fn row_value(kernel: &RadialKernel, atom: &TestFunction, row: &Row, x: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for &(lo, hi) in &row.parts {
        let y = 0.0f64.clamp(x + lo, x + hi);
        let value = match &row.cache {
            Some(cache) => cache.eval(y.abs()),
            None => extension_at(kernel, atom, y, row.t)?,
        };
        best = best.max(value);
    }
    Ok(best)
}

/// Cell centers and widths of the nested panels for an atom at level `k`:
/// cells of panel `j` whose centers fall inside panel `j+1` are dropped, so
/// the survivors tile panel 1 exactly once.
fn panel_cells(trace: &ConstructionTrace, protocol: &ScanProtocol, k: usize) -> (Vec<f64>, Vec<f64>) {
    let cells = protocol.cells_per_panel();
    let span = |j: usize| {
        let level = &trace.levels[j - 1];
        let pad = protocol.panel_pad * level.gauge_value;
        (-(level.curve_value + pad), pad)
    };
    let mut xs = Vec::new();
    let mut weights = Vec::new();
    for j in 1..=k {
        let (lo, hi) = span(j);
        let width = (hi - lo) / cells as f64;
        let inner = (j < k).then(|| span(j + 1));
        for i in 0..cells {
            let x = lo + (i as f64 + 0.5) * width;
            if let Some((ilo, ihi)) = inner {
                if x > ilo && x < ihi {
                    continue;
                }
            }
            xs.push(x);
            weights.push(width);
        }
    }
    (xs, weights)
}

/// Sampling rows for an atom at level `k`: every band `j <= k`, log-spaced
/// and capped below half the previous level height.
fn band_rows(
    trace: &ConstructionTrace,
    region: &ApproachRegion,
    kernel: &RadialKernel,
    atom: &TestFunction,
    protocol: &ScanProtocol,
    k: usize,
    y_max: f64,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for j in 1..=k {
        let t_j = trace.levels[j - 1].t;
        let lo = protocol.band_low * t_j;
        let hi = match j {
            1 => protocol.band_high * t_j,
            _ => (protocol.band_high * t_j).min(0.5 * trace.levels[j - 2].t),
        };
        for t in logspace(lo, hi, protocol.rows_per_band()) {
            let parts = region.cross_section(t)?.parts().to_vec();
            let reach = parts
                .iter()
                .map(|&(a, b)| a.abs().max(b.abs()))
                .fold(0.0f64, f64::max);
            let cache = (t > PROFILE_T_FRACTION * kernel.cutoff())
                .then(|| RowCache::build(kernel, atom, t, y_max + reach))
                .transpose()?;
            rows.push(Row { t, parts, cache });
        }
    }
    Ok(rows)
}

/// Scan one atom level: stratified maximal samples over `region`, reported as
/// a weighted weak-type statistic against the atom's unit mass.
fn scan_atom(
    kernel: &RadialKernel,
    trace: &ConstructionTrace,
    region: &ApproachRegion,
    protocol: &ScanProtocol,
    k: usize,
) -> Result<AtomScan> {
    let t_level = trace.levels[k - 1].t;
    let half_width = t_level / protocol.atom_scale_divisor;
    let atom = TestFunction::box_atom(0.0, half_width, 1.0)?;
    let (xs, weights) = panel_cells(trace, protocol, k);
    let y_max = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let rows = band_rows(trace, region, kernel, &atom, protocol, k, y_max)?;

    let values = xs
        .par_iter()
        .map(|&x| {
            let mut best = 0.0f64;
            for row in &rows {
                best = best.max(row_value(kernel, &atom, row, x)?);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;

    let report = weak_type_report_weighted(&values, &weights, 1.0)?;
    Ok(AtomScan {
        level: k,
        t_level,
        half_width,
        report,
    })
}

/// Run the stratified weak-type scan: one box atom per construction level,
/// each measured over `region` on the protocol's rows and panels. Returns the
/// scans ordered by level. The trace fixes the strata, so scanning the plain
/// and the completed region with the same trace yields comparable reports.
pub fn weak_type_scan(
    kernel: &RadialKernel,
    trace: &ConstructionTrace,
    region: &ApproachRegion,
    protocol: &ScanProtocol,
) -> Result<Vec<AtomScan>> {
    protocol.validate()?;
    if trace.levels.is_empty() {
        return Err(Error::EmptyTrace);
    }
    (1..=trace.levels.len())
        .map(|k| scan_atom(kernel, trace, region, protocol, k))
        .collect()
}

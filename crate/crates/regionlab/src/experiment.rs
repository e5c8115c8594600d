//! Reproducible experiment pipeline: one config, five stages, one verdict.
//!
//! Everything the command-line driver does lives here so that tests and
//! examples can run the same stages in-process. A [`RunConfig`] fixes the
//! kernel, the construction, the sampling protocols, and the pass
//! thresholds; every stage rebuilds its inputs from the config (the build
//! is deterministic and takes well under a second, so rebuilding is cheaper
//! and safer than trusting files on disk to match). Every output file
//! embeds the SHA-256 hash of the config it came from, and reruns with the
//! same config produce byte-identical files: no timestamps, no environment
//! lookups, and float formatting via the shortest round-trip form.
//!
//! The verification stage condenses the experiments into five claims:
//!
//! * **(i)** unit-cone probes planted in the plain region stay inside it —
//!   the violation measure is exactly zero;
//! * **(ii)** plain-region section sizes stay within a fixed multiple of
//!   the gauge;
//! * **(iii)** weak-type ratios over the plain region keep a bounded
//!   spread across atom depths;
//! * **(iv)** completed-region sections at doubled level heights clear the
//!   per-count floor and grow by a real margin every level;
//! * **(v)** completed-region weak-type ratios grow with atom depth.
//!
//! The asymptotic statements behind (ii)–(v) ("bounded" / "unbounded")
//! cannot be observed directly at desk scale; the thresholds that stand in
//! for them are part of the config and are echoed into every report, never
//! hard-coded into the checks. A sixth record, the kernel-envelope sweep,
//! checks the integral bound that drives the positive weak-type result on
//! a grid of level/height samples.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construction::{build, ConstructionConfig, ConstructionTrace};
use crate::gauge::GaugeFunction;
use crate::maximal::{k_star_integral, maximal_over_region, poisson_extend, TestFunction};
use crate::regions::{
    check_r_condition, complete, section_profile, ApproachRegion, SectionRow,
};
use crate::scan::{logspace, weak_type_scan, AtomScan, ScanProtocol};

/// Errors from the experiment pipeline, tagged with the stage that failed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid run config: {0}")]
    InvalidConfig(&'static str),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Construction(#[from] crate::construction::Error),
    #[error(transparent)]
    Gauge(#[from] crate::gauge::Error),
    #[error(transparent)]
    Region(#[from] crate::regions::Error),
    #[error(transparent)]
    Maximal(#[from] crate::maximal::Error),
    #[error(transparent)]
    Scan(#[from] crate::scan::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tag an error with the pipeline stage it came from.
fn stage<T>(name: &'static str, result: Result<T>) -> Result<T> {
    result.map_err(|source| Error::Stage {
        stage: name,
        source: Box::new(source),
    })
}

/// Height ladder layout for the section profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSettings {
    /// Log-spaced heights per level band `[t_k, band_high·t_k]`.
    pub points_per_band: usize,
    /// Upper band factor; clamped below the previous level height.
    pub band_high: f64,
}

impl Default for SectionSettings {
    fn default() -> Self {
        Self {
            points_per_band: 25,
            band_high: 8.0,
        }
    }
}

/// Pass thresholds for the finite-scale claims. These are the empirical
/// stand-ins for the asymptotic statements and live in the config so every
/// report carries the bar it was judged against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Claim (ii): max of `|Omega(t)|/r(t)` over the ladder must stay below
    /// this.
    pub omega_section_ratio_max: f64,
    /// Claim (iv): `|completed(2 t_k)|/r(2 t_k)` must reach this multiple of
    /// the level count `N_k`.
    pub completed_section_floor: f64,
    /// Claim (iv): each level's section ratio must exceed the previous by
    /// at least this relative margin. This is what separates genuine growth
    /// from a sequence creeping toward a bounded limit (the constant-count
    /// control run converges double-exponentially and fails this).
    pub section_increment_min: f64,
    /// Claim (iii): max/min of the plain-region weak-type ratios across
    /// atom depths.
    pub weaktype_spread_max: f64,
    /// Claim (v): last/first completed-region weak-type ratio.
    pub weaktype_growth_min: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            omega_section_ratio_max: 2.0,
            completed_section_floor: 0.25,
            section_increment_min: 0.01,
            weaktype_spread_max: 4.0,
            weaktype_growth_min: 1.5,
        }
    }
}

/// Everything a run needs: construction, sampling, thresholds, seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub construction: ConstructionConfig,
    #[serde(default)]
    pub scan: ScanProtocol,
    #[serde(default)]
    pub sections: SectionSettings,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Recorded in every report for provenance. The pipeline is fully
    /// deterministic, so the seed influences nothing else.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    /// The configuration the experiments are calibrated for.
    pub fn model_defaults() -> Result<Self> {
        Ok(Self {
            construction: ConstructionConfig::model_defaults()?,
            scan: ScanProtocol::default(),
            sections: SectionSettings::default(),
            thresholds: Thresholds::default(),
            seed: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.construction.validate()?;
        if self.sections.points_per_band < 2 {
            return Err(Error::InvalidConfig("sections.points_per_band must be >= 2"));
        }
        if !(self.sections.band_high > 1.0) {
            return Err(Error::InvalidConfig("sections.band_high must exceed 1"));
        }
        let th = &self.thresholds;
        for (ok, what) in [
            (th.omega_section_ratio_max > 0.0, "omega_section_ratio_max"),
            (th.completed_section_floor > 0.0, "completed_section_floor"),
            (th.section_increment_min >= 0.0, "section_increment_min"),
            (th.weaktype_spread_max >= 1.0, "weaktype_spread_max"),
            (th.weaktype_growth_min >= 1.0, "weaktype_growth_min"),
        ] {
            if !ok {
                return Err(Error::InvalidConfig(what));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding — the cross-reference stamped
    /// into every output file.
    pub fn config_hash(&self) -> Result<String> {
        let canonical = serde_json::to_string(self)?;
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
        }
        Ok(hex)
    }
}

/// Parse a [`RunConfig`] from a JSON file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// The built pair of regions plus the gauge they are measured against.
#[derive(Debug, Clone)]
pub struct BuildArtifacts {
    pub trace: ConstructionTrace,
    /// The constructed region: unit cones on the chosen rows plus the base
    /// cone.
    pub region: ApproachRegion,
    /// Its completion under the kernel gauge.
    pub completed: ApproachRegion,
    /// The kernel gauge (asymptotic law) used for completion, section
    /// references, and the sweep bound.
    pub reference: GaugeFunction,
}

/// Run the construction and complete it under the kernel gauge.
pub fn build_artifacts(config: &RunConfig) -> Result<BuildArtifacts> {
    config.validate()?;
    let (trace, region) = build(&config.construction)?;
    let reference = GaugeFunction::asymptotic_for(&config.construction.kernel)?;
    let ladder = section_ladder(&trace, &config.sections);
    let completed = complete(&region, reference.clone(), &ladder)?;
    Ok(BuildArtifacts {
        trace,
        region,
        completed,
        reference,
    })
}

/// Height ladder for section profiles: per level, log-spaced points over
/// `[t_k, band_high·t_k]` (clamped below the previous level) plus the exact
/// doubled height `2 t_k`; ascending, deduplicated.
pub fn section_ladder(trace: &ConstructionTrace, settings: &SectionSettings) -> Vec<f64> {
    let doubled: Vec<f64> = trace.levels.iter().map(|level| 2.0 * level.t).collect();
    let mut heights = Vec::new();
    for (i, level) in trace.levels.iter().enumerate() {
        let lo = level.t;
        let cap = if i == 0 {
            f64::INFINITY
        } else {
            0.99 * trace.levels[i - 1].t
        };
        let hi = (settings.band_high * lo).min(cap);
        heights.extend(logspace(lo, hi, settings.points_per_band));
    }
    // A band point can land on a doubled height up to rounding, which would
    // leave ulp-spaced rows after the merge; the exact doubled height wins.
    heights.retain(|&h| doubled.iter().all(|&d| (h - d).abs() > 1e-12 * d));
    heights.extend(doubled);
    heights.sort_by(|a, b| a.partial_cmp(b).expect("finite heights"));
    heights.dedup();
    heights
}

/// One verified claim: identifier, plain-language statement, verdict, and
/// the measured numbers the verdict came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub id: String,
    pub description: String,
    pub pass: bool,
    pub measured: serde_json::Value,
}

/// One sample of the kernel-envelope sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaSample {
    pub level: usize,
    pub t: f64,
    pub x_prime: f64,
    pub local_radius: f64,
    pub enlargement: f64,
    pub integral: f64,
    pub bound: f64,
    pub pass: bool,
}

/// The envelope-integral sweep: for each level `k` (except the deepest) and
/// heights `t_k, 2t_k, 4t_k, 8t_k`, the integral of the enlarged radial
/// envelope must stay below `3 t_k / r(t_k) + ‖K‖₁`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaSweep {
    pub samples: Vec<LemmaSample>,
    pub pass: bool,
}

/// The verification verdict: the five claims plus the envelope sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub claims: Vec<ClaimOutcome>,
    pub lemma_sweep: LemmaSweep,
    pub all_pass: bool,
}

/// Claim (i): unit-cone probes planted at region points never escape, and
/// as a recorded contrast, kernel-gauge probes do (the region is genuinely
/// thinner than its completion).
fn claim_cone_condition(artifacts: &BuildArtifacts) -> Result<ClaimOutcome> {
    let mut heights = Vec::new();
    for level in &artifacts.trace.levels {
        for m in 0..4 {
            heights.push(level.t * f64::from(1u32 << m));
        }
    }
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let unit = GaugeFunction::power_law(1.0, 1.0)?;
    let report = check_r_condition(&artifacts.region, &unit, &heights, &offsets)?;
    let wide = check_r_condition(&artifacts.region, &artifacts.reference, &heights, &offsets)?;
    let pass = report.holds();
    Ok(ClaimOutcome {
        id: "i".into(),
        description: "unit-cone probes planted in the plain region stay inside it".into(),
        pass,
        measured: serde_json::json!({
            "samples": report.samples,
            "worst_excess": report.worst_excess,
            "violations": report.violations.len(),
            "kernel_gauge_probe_worst_excess": wide.worst_excess,
        }),
    })
}

/// Claim (ii): the plain region's section ratio stays under the configured
/// multiple of the gauge across the whole ladder.
fn claim_omega_sections(
    profile: &[SectionRow],
    thresholds: &Thresholds,
) -> ClaimOutcome {
    let (mut max_ratio, mut at_t) = (0.0f64, f64::NAN);
    for row in profile {
        if row.ratio > max_ratio {
            max_ratio = row.ratio;
            at_t = row.t;
        }
    }
    ClaimOutcome {
        id: "ii".into(),
        description: "plain-region section sizes stay within a fixed multiple of the gauge"
            .into(),
        pass: max_ratio <= thresholds.omega_section_ratio_max,
        measured: serde_json::json!({
            "max_ratio": max_ratio,
            "at_t": at_t,
            "threshold": thresholds.omega_section_ratio_max,
        }),
    }
}

/// Per-level section comparison at the exact doubled heights `2 t_k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelSections {
    pub level: usize,
    pub count: u32,
    pub t: f64,
    pub completed_ratio: f64,
    pub floor: f64,
    pub plain_ratio: f64,
}

fn doubled_height_rows(artifacts: &BuildArtifacts, floor: f64) -> Result<Vec<LevelSections>> {
    let mut rows = Vec::with_capacity(artifacts.trace.levels.len());
    for level in &artifacts.trace.levels {
        let t = 2.0 * level.t;
        let reference = artifacts.reference.eval(t)?;
        let completed = artifacts.completed.cross_section(t)?.measure() / reference;
        let plain = artifacts.region.cross_section(t)?.measure() / reference;
        rows.push(LevelSections {
            level: level.index,
            count: level.count,
            t,
            completed_ratio: completed,
            floor: floor * f64::from(level.count),
            plain_ratio: plain,
        });
    }
    Ok(rows)
}

/// Claim (iv): completed sections at `2 t_k` clear the per-count floor and
/// each level's ratio exceeds the previous by the configured margin.
fn claim_completed_sections(rows: &[LevelSections], thresholds: &Thresholds) -> ClaimOutcome {
    let floors_ok = rows.iter().all(|r| r.completed_ratio >= r.floor);
    let growth_ok = rows.windows(2).all(|pair| {
        pair[1].completed_ratio >= pair[0].completed_ratio * (1.0 + thresholds.section_increment_min)
    });
    ClaimOutcome {
        id: "iv".into(),
        description:
            "completed-region sections at doubled level heights clear the count floor and keep growing"
                .into(),
        pass: floors_ok && growth_ok,
        measured: serde_json::json!({
            "rows": rows,
            "floor_per_count": thresholds.completed_section_floor,
            "increment_min": thresholds.section_increment_min,
            "floors_ok": floors_ok,
            "growth_ok": growth_ok,
        }),
    }
}

fn ratios(scans: &[AtomScan]) -> Vec<f64> {
    scans.iter().map(|s| s.report.ratio).collect()
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let min = values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    max / min
}

fn nondecreasing(values: &[f64]) -> bool {
    values
        .windows(2)
        .all(|pair| pair[1] >= pair[0] * (1.0 - 1e-9))
}

/// Claim (iii): plain-region weak-type ratios keep a bounded spread, at the
/// configured protocol and after one refinement.
fn claim_weaktype_bounded(
    base: &[AtomScan],
    refined: &[AtomScan],
    thresholds: &Thresholds,
) -> ClaimOutcome {
    let base_ratios = ratios(base);
    let refined_ratios = ratios(refined);
    let base_spread = spread(&base_ratios);
    let refined_spread = spread(&refined_ratios);
    let pass = base_spread <= thresholds.weaktype_spread_max
        && refined_spread <= thresholds.weaktype_spread_max;
    ClaimOutcome {
        id: "iii".into(),
        description: "weak-type ratios over the plain region keep a bounded spread across atom depths".into(),
        pass,
        measured: serde_json::json!({
            "ratios": base_ratios,
            "spread": base_spread,
            "refined_ratios": refined_ratios,
            "refined_spread": refined_spread,
            "threshold": thresholds.weaktype_spread_max,
        }),
    }
}

/// Claim (v): completed-region weak-type ratios never decrease and grow by
/// the configured factor, at the configured protocol and after one
/// refinement.
fn claim_weaktype_growth(
    base: &[AtomScan],
    refined: &[AtomScan],
    thresholds: &Thresholds,
) -> ClaimOutcome {
    let base_ratios = ratios(base);
    let refined_ratios = ratios(refined);
    let base_growth = base_ratios.last().unwrap() / base_ratios[0];
    let refined_growth = refined_ratios.last().unwrap() / refined_ratios[0];
    let pass = nondecreasing(&base_ratios)
        && nondecreasing(&refined_ratios)
        && base_growth >= thresholds.weaktype_growth_min
        && refined_growth >= thresholds.weaktype_growth_min;
    ClaimOutcome {
        id: "v".into(),
        description: "completed-region weak-type ratios grow with atom depth".into(),
        pass,
        measured: serde_json::json!({
            "ratios": base_ratios,
            "growth": base_growth,
            "refined_ratios": refined_ratios,
            "refined_growth": refined_growth,
            "threshold": thresholds.weaktype_growth_min,
        }),
    }
}

/// The envelope sweep behind the positive result: 4 heights per level,
/// shift at the level's rightmost point, enlargement from the next level.
fn lemma_sweep(
    kernel: &crate::kernels::RadialKernel,
    artifacts: &BuildArtifacts,
) -> Result<LemmaSweep> {
    let levels = &artifacts.trace.levels;
    let mut samples = Vec::new();
    for pair in levels.windows(2) {
        let (level, next) = (&pair[0], &pair[1]);
        let r_tk = artifacts.reference.eval(level.t)?;
        let bound = 3.0 * level.t / r_tk + kernel.l1_mass();
        for m in 0..4 {
            let t = level.t * f64::from(1u32 << m);
            let local_radius = 3.0 * f64::from(level.count) * artifacts.reference.eval(t)?;
            let enlargement = 3.0 * next.curve_value;
            let integral =
                k_star_integral(kernel, t, level.curve_value, local_radius, enlargement)?;
            samples.push(LemmaSample {
                level: level.index,
                t,
                x_prime: level.curve_value,
                local_radius,
                enlargement,
                integral,
                bound,
                pass: integral <= bound * (1.0 + 1e-9),
            });
        }
    }
    let pass = samples.iter().all(|s| s.pass);
    Ok(LemmaSweep { samples, pass })
}

/// Run the full verification pipeline and write `verify_report.json`.
pub fn run_verify(config: &RunConfig, out: &Path) -> Result<VerifyReport> {
    if config.construction.k_max < 3 {
        return Err(Error::InvalidConfig("growth claims need k_max >= 3"));
    }
    let config_hash = config.config_hash()?;
    let artifacts = stage("build", build_artifacts(config))?;
    let ladder = section_ladder(&artifacts.trace, &config.sections);

    let claim_i = stage("cone-condition", claim_cone_condition(&artifacts))?;

    let omega_profile = stage(
        "sections",
        section_profile(&artifacts.region, &artifacts.reference, &ladder).map_err(Error::from),
    )?;
    let claim_ii = claim_omega_sections(&omega_profile, &config.thresholds);
    let rows = stage(
        "sections",
        doubled_height_rows(&artifacts, config.thresholds.completed_section_floor),
    )?;
    let claim_iv = claim_completed_sections(&rows, &config.thresholds);

    let kernel = &config.construction.kernel;
    let refined_protocol = config.scan.refined();
    let scans = stage("weak-type", {
        (|| {
            let base_plain =
                weak_type_scan(kernel, &artifacts.trace, &artifacts.region, &config.scan)?;
            let base_hat =
                weak_type_scan(kernel, &artifacts.trace, &artifacts.completed, &config.scan)?;
            let fine_plain =
                weak_type_scan(kernel, &artifacts.trace, &artifacts.region, &refined_protocol)?;
            let fine_hat = weak_type_scan(
                kernel,
                &artifacts.trace,
                &artifacts.completed,
                &refined_protocol,
            )?;
            Ok((base_plain, base_hat, fine_plain, fine_hat))
        })()
    })?;
    let (base_plain, base_hat, fine_plain, fine_hat) = scans;
    let claim_iii = claim_weaktype_bounded(&base_plain, &fine_plain, &config.thresholds);
    let claim_v = claim_weaktype_growth(&base_hat, &fine_hat, &config.thresholds);

    let sweep = stage("envelope-sweep", lemma_sweep(kernel, &artifacts))?;

    let claims = vec![claim_i, claim_ii, claim_iii, claim_iv, claim_v];
    let all_pass = claims.iter().all(|c| c.pass) && sweep.pass;
    let report = VerifyReport {
        config_hash,
        seed: config.seed,
        claims,
        lemma_sweep: sweep,
        all_pass,
    };
    write_json(out, "verify_report.json", &report)?;
    Ok(report)
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let path = out.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).map_err(|source| Error::Io { path, source })
}

fn write_csv(out: &Path, name: &str, config_hash: &str, columns: &str, rows: &[String]) -> Result<()> {
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let path = out.join(name);
    let mut text = String::new();
    let _ = writeln!(text, "# config_hash={config_hash}");
    let _ = writeln!(text, "{columns}");
    for row in rows {
        let _ = writeln!(text, "{row}");
    }
    fs::write(&path, text).map_err(|source| Error::Io { path, source })
}

fn section_csv_rows(profile: &[SectionRow]) -> Vec<String> {
    profile
        .iter()
        .map(|r| format!("{:e},{:e},{},{:e}", r.t, r.measure, r.components, r.ratio))
        .collect()
}

/// Trace/region/section files for the build stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildSummary {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub restarts: usize,
    pub levels: usize,
    pub heights: Vec<f64>,
}

/// `build-region`: construct, complete, and export trace, regions, and
/// section profiles.
pub fn run_build_region(config: &RunConfig, out: &Path) -> Result<BuildSummary> {
    let config_hash = config.config_hash()?;
    let artifacts = stage("build", build_artifacts(config))?;
    let ladder = section_ladder(&artifacts.trace, &config.sections);
    let omega = section_profile(&artifacts.region, &artifacts.reference, &ladder)?;
    let hat = section_profile(&artifacts.completed, &artifacts.reference, &ladder)?;

    write_json(
        out,
        "trace.json",
        &serde_json::json!({ "config_hash": config_hash, "seed": config.seed, "trace": artifacts.trace }),
    )?;
    write_json(
        out,
        "region_omega.json",
        &serde_json::json!({ "config_hash": config_hash, "region": artifacts.region }),
    )?;
    write_json(
        out,
        "region_omega_hat.json",
        &serde_json::json!({ "config_hash": config_hash, "region": artifacts.completed }),
    )?;
    let columns = "t,measure,components,ratio";
    write_csv(out, "sections_omega.csv", &config_hash, columns, &section_csv_rows(&omega))?;
    write_csv(
        out,
        "sections_omega_hat.csv",
        &config_hash,
        columns,
        &section_csv_rows(&hat),
    )?;
    Ok(BuildSummary {
        config_hash,
        seed: config.seed,
        restarts: artifacts.trace.restarts,
        levels: artifacts.trace.levels.len(),
        heights: artifacts.trace.heights(),
    })
}

/// Section-stage verdict: claim (ii) plus claim (iv) quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionsSummary {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub omega_max_ratio: f64,
    pub omega_max_ratio_at_t: f64,
    pub omega_threshold: f64,
    pub levels: Vec<LevelSections>,
    pub pass: bool,
}

/// `sections`: export both profiles and judge the section-size claims.
pub fn run_sections(config: &RunConfig, out: &Path) -> Result<SectionsSummary> {
    let config_hash = config.config_hash()?;
    let artifacts = stage("build", build_artifacts(config))?;
    let ladder = section_ladder(&artifacts.trace, &config.sections);
    let omega = section_profile(&artifacts.region, &artifacts.reference, &ladder)?;
    let hat = section_profile(&artifacts.completed, &artifacts.reference, &ladder)?;
    let claim_ii = claim_omega_sections(&omega, &config.thresholds);
    let rows = doubled_height_rows(&artifacts, config.thresholds.completed_section_floor)?;
    let claim_iv = claim_completed_sections(&rows, &config.thresholds);

    let columns = "t,measure,components,ratio";
    write_csv(out, "sections_omega.csv", &config_hash, columns, &section_csv_rows(&omega))?;
    write_csv(
        out,
        "sections_omega_hat.csv",
        &config_hash,
        columns,
        &section_csv_rows(&hat),
    )?;
    let summary = SectionsSummary {
        config_hash: config_hash.clone(),
        seed: config.seed,
        omega_max_ratio: claim_ii.measured["max_ratio"].as_f64().unwrap_or(f64::NAN),
        omega_max_ratio_at_t: claim_ii.measured["at_t"].as_f64().unwrap_or(f64::NAN),
        omega_threshold: config.thresholds.omega_section_ratio_max,
        levels: rows,
        pass: claim_ii.pass && claim_iv.pass,
    };
    write_json(out, "sections_summary.json", &summary)?;
    Ok(summary)
}

/// Weak-type-stage verdict at the configured protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeaktypeSummary {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub omega_ratios: Vec<f64>,
    pub omega_spread: f64,
    pub spread_max: f64,
    pub completed_ratios: Vec<f64>,
    pub completed_growth: f64,
    pub growth_min: f64,
    pub pass: bool,
}

/// `weaktype`: run the stratified scans on both regions and judge the
/// spread/growth claims at the configured protocol.
pub fn run_weaktype(config: &RunConfig, out: &Path) -> Result<WeaktypeSummary> {
    let config_hash = config.config_hash()?;
    let artifacts = stage("build", build_artifacts(config))?;
    let kernel = &config.construction.kernel;
    let plain = stage(
        "weak-type",
        weak_type_scan(kernel, &artifacts.trace, &artifacts.region, &config.scan)
            .map_err(Error::from),
    )?;
    let hat = stage(
        "weak-type",
        weak_type_scan(kernel, &artifacts.trace, &artifacts.completed, &config.scan)
            .map_err(Error::from),
    )?;
    write_json(
        out,
        "weaktype_omega.json",
        &serde_json::json!({ "config_hash": config_hash, "scans": plain }),
    )?;
    write_json(
        out,
        "weaktype_omega_hat.json",
        &serde_json::json!({ "config_hash": config_hash, "scans": hat }),
    )?;
    let omega_ratios = ratios(&plain);
    let completed_ratios = ratios(&hat);
    let omega_spread = spread(&omega_ratios);
    let completed_growth = completed_ratios.last().unwrap() / completed_ratios[0];
    let pass = omega_spread <= config.thresholds.weaktype_spread_max
        && nondecreasing(&completed_ratios)
        && completed_growth >= config.thresholds.weaktype_growth_min;
    let summary = WeaktypeSummary {
        config_hash,
        seed: config.seed,
        omega_ratios,
        omega_spread,
        spread_max: config.thresholds.weaktype_spread_max,
        completed_ratios,
        completed_growth,
        growth_min: config.thresholds.weaktype_growth_min,
        pass,
    };
    write_json(out, "weaktype_summary.json", &summary)?;
    Ok(summary)
}

/// Maximal-stage verdict: grid maximal profiles of a shallow atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaximalSummary {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub rows: usize,
    pub cols: usize,
    pub max_omega: f64,
    pub max_completed: f64,
    /// The completed region's maximal values dominate the plain region's at
    /// every abscissa (exact on the shared grid).
    pub completed_dominates: bool,
    pub pass: bool,
}

/// `maximal`: sample the extension of the shallowest level atom on a grid,
/// export it as CSV, and compare the two regions' maximal profiles on it.
pub fn run_maximal(config: &RunConfig, out: &Path) -> Result<MaximalSummary> {
    let config_hash = config.config_hash()?;
    let artifacts = stage("build", build_artifacts(config))?;
    let kernel = &config.construction.kernel;
    let level1 = &artifacts.trace.levels[0];
    let protocol = &config.scan;
    let atom = TestFunction::box_atom(0.0, level1.t / protocol.atom_scale_divisor, 1.0)?;

    let heights = logspace(
        protocol.band_low * level1.t,
        protocol.band_high * level1.t,
        protocol.rows_per_band(),
    );
    let panel_lo = -(level1.curve_value + protocol.panel_pad * level1.gauge_value);
    let panel_hi = protocol.panel_pad * level1.gauge_value;
    let top = *heights.last().expect("nonempty");
    let reach = artifacts.reference.eval(top)? + 3.0 * top + level1.curve_value;
    let (grid_lo, grid_hi) = (panel_lo - reach, panel_hi + reach);
    let cols = 4 * protocol.cells_per_panel() + 1;
    let coords: Vec<f64> = (0..cols)
        .map(|i| grid_lo + (grid_hi - grid_lo) * i as f64 / (cols - 1) as f64)
        .collect();

    let field = stage(
        "field",
        poisson_extend(kernel, &atom, &heights, &coords).map_err(Error::from),
    )?;
    let mut field_rows = Vec::with_capacity(heights.len() * cols);
    for (i, &t) in heights.iter().enumerate() {
        for (j, &y) in coords.iter().enumerate() {
            field_rows.push(format!("{:e},{:e},{:e}", t, y, field.value(i, j)));
        }
    }
    write_csv(out, "field_omega_atom1.csv", &config_hash, "t,y,value", &field_rows)?;

    let xs: Vec<f64> = (0..protocol.cells_per_panel())
        .map(|i| panel_lo + (panel_hi - panel_lo) * (i as f64 + 0.5) / protocol.cells_per_panel() as f64)
        .collect();
    let m_omega = stage(
        "maximal",
        maximal_over_region(&field, &artifacts.region, &xs).map_err(Error::from),
    )?;
    let m_hat = stage(
        "maximal",
        maximal_over_region(&field, &artifacts.completed, &xs).map_err(Error::from),
    )?;
    let profile_rows: Vec<String> = xs
        .iter()
        .zip(m_omega.iter().zip(&m_hat))
        .map(|(x, (a, b))| format!("{x:e},{a:e},{b:e}"))
        .collect();
    write_csv(
        out,
        "maximal_profiles.csv",
        &config_hash,
        "x,m_omega,m_omega_hat",
        &profile_rows,
    )?;

    let completed_dominates = m_omega.iter().zip(&m_hat).all(|(a, b)| b >= a);
    let summary = MaximalSummary {
        config_hash,
        seed: config.seed,
        rows: heights.len(),
        cols,
        max_omega: m_omega.iter().fold(0.0f64, |m, &v| m.max(v)),
        max_completed: m_hat.iter().fold(0.0f64, |m, &v| m.max(v)),
        completed_dominates,
        pass: completed_dominates,
    };
    write_json(out, "maximal_summary.json", &summary)?;
    Ok(summary)
}

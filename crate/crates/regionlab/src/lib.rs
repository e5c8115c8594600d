//! A numerical laboratory for tangential approach regions and the
//! weak-type behaviour of their maximal operators.
//!
//! The library studies convolution kernels `K(x) = |x|^{-beta}` (truncated at
//! a support radius) together with the harmonic extensions they induce on the
//! upper half-plane. Each kernel determines a *gauge* `r_K(t)`, the width
//! scale on which the extension of `K` lives at height `t`; because
//! `r_K(t)/t` blows up as `t -> 0`, regions built from cones of this width
//! touch the boundary tangentially.
//!
//! The centrepiece is an inductive construction ([`construction::build`])
//! that places rows of narrow cones at rapidly decreasing heights. The
//! resulting region `Omega` has cross-sections small enough that its maximal
//! operator obeys a weak-type (1,1) bound, yet its *completion*
//! ([`regions::complete`]) — the same vertices re-equipped with the wide
//! gauge cones — has cross-sections whose size grows without bound relative
//! to the gauge, and its maximal operator exhibits unbounded weak-type
//! ratios. The experiment pipeline ([`experiment`]) measures both phenomena
//! and renders a verdict per claim.
//!
//! # Layout
//!
//! - [`quad`] — adaptive Gauss–Kronrod quadrature with breakpoint seeding.
//! - [`kernels`] — truncated power kernels, Poisson kernel, their
//!   convolution, and the universal scaled profile of the extension.
//! - [`gauge`] — gauge functions `r(t)`: kernel-derived tables and power
//!   laws; tangentiality diagnostics.
//! - [`intervals`] — finite unions of closed intervals with exact measure
//!   and set arithmetic.
//! - [`regions`] — vertices, cone sections, approach regions, the
//!   cone-swap completion, and the section-increment admissibility check.
//! - [`construction`] — the inductive multi-level construction of the
//!   counterexample region.
//! - [`maximal`] — test functions, extension fields, maximal operators,
//!   kernel splitting, and weak-type reports.
//! - [`scan`] — the scale-stratified measurement protocol that estimates
//!   weak-type ratios across all construction levels.
//! - [`experiment`] — run configuration, the five-claim verification
//!   pipeline, and file exports.
//!
//! # Entry points
//!
//! Each major capability has a runnable example under `examples/`; start
//! with `verify_claims`. The thin `regionlab` binary exposes the same
//! pipeline as subcommands (`build-region`, `sections`, `maximal`,
//! `weaktype`, `verify`).

pub mod construction;
pub mod experiment;
pub mod gauge;
pub mod intervals;
pub mod kernels;
pub mod maximal;
pub mod quad;
pub mod regions;
pub mod scan;


pub use construction::{build, choose_next_level, choose_start, ConstructionConfig, ConstructionTrace};
pub use experiment::{
    build_artifacts, load_config, run_build_region, run_maximal, run_sections, run_verify,
    run_weaktype, BuildArtifacts, RunConfig, SectionSettings, Thresholds, VerifyReport,
};
pub use gauge::{gauge_from_kernel, tangentiality_ratio, GaugeFunction};
pub use intervals::IntervalUnion;
pub use kernels::{convolve_poisson_kernel, eval_poisson, PoissonParams, RadialKernel};
pub use maximal::{
    extension_at, extension_value, hl_maximal, k_star, k_star_integral, maximal_over_region,
    poisson_extend, split_kernel, weak_type_report, Field, TestFunction, WeakTypeReport,
};
pub use regions::{complete, cone_section, check_r_condition, ApproachRegion, Vertex};
pub use scan::{weak_type_scan, AtomScan, ScanProtocol};

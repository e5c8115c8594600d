//! Build the staircase region: six levels of cone rows, each placed by a
//! height search that keeps every constraint residual positive, then print
//! the trace — heights, counts, row geometry, and the residuals that prove
//! the placement is valid.

use regionlab::{build, ConstructionConfig};

fn main() {
    let config = ConstructionConfig::model_defaults().expect("defaults");
    let (trace, region) = build(&config).expect("construction");

    println!(
        "placed {} levels after {} start-height restart(s)",
        trace.levels.len(),
        trace.restarts
    );
    println!();
    println!(
        "{:>2}  {:>12}  {:>3}  {:>12}  {:>12}  {:>11}",
        "k", "t_k", "N_k", "r(t_k)", "gamma(t_k)", "min residual"
    );
    for level in &trace.levels {
        // The smallest residual at this level is its distance from the
        // nearest constraint boundary.
        let mut tightest = level.count_residual;
        for residual in [
            level.start_residual,
            level.spacing_residual,
            level.slow_growth_residual,
        ]
        .into_iter()
        .flatten()
        {
            tightest = tightest.min(residual);
        }
        println!(
            "{:>2}  {:>12.4e}  {:>3}  {:>12.4e}  {:>12.4e}  {:>11.3e}",
            level.index, level.t, level.count, level.gauge_value, level.curve_value, tightest
        );
    }

    println!();
    println!(
        "region: {} cone vertices over a base cone of aperture {}",
        region.vertices().len(),
        config.base_aperture
    );
    let t = trace.levels[0].t;
    let section = region.cross_section(2.0 * t).expect("section");
    println!(
        "cross-section at twice the first height: measure {:.4e} in {} piece(s)",
        section.measure(),
        section.component_count()
    );
}

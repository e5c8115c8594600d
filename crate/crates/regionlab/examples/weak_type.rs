//! The weak-type contrast. Feed each level a unit-mass box atom at scale
//! `t_k / 100` and scan the maximal function over panels of abscissas: the
//! level-weighted distribution statistic (quasinorm over the input mass)
//! stays flat across depths for the plain region, and climbs level after
//! level for the completed one. Depth is what separates the two operators,
//! not any single height.

use regionlab::{build_artifacts, weak_type_scan, RunConfig, ScanProtocol};

fn main() {
    let mut config = RunConfig::model_defaults().expect("defaults");
    // Four levels and a light protocol keep this example interactive; the
    // shipped default config runs the full-depth scan.
    config.construction.k_max = 4;
    config.scan = ScanProtocol {
        heights_per_band: 10,
        panel_cells: 96,
        ..ScanProtocol::default()
    };
    let artifacts = build_artifacts(&config).expect("build");
    let kernel = &config.construction.kernel;

    let plain = weak_type_scan(kernel, &artifacts.trace, &artifacts.region, &config.scan)
        .expect("plain scan");
    let completed = weak_type_scan(kernel, &artifacts.trace, &artifacts.completed, &config.scan)
        .expect("completed scan");

    println!(
        "{:>2}  {:>12}  {:>12}  {:>16}",
        "k", "atom width", "plain ratio", "completed ratio"
    );
    for (p, c) in plain.iter().zip(&completed) {
        println!(
            "{:>2}  {:>12.4e}  {:>12.4}  {:>16.4}",
            p.level,
            2.0 * p.half_width,
            p.report.ratio,
            c.report.ratio
        );
    }

    let plain_ratios: Vec<f64> = plain.iter().map(|s| s.report.ratio).collect();
    let completed_ratios: Vec<f64> = completed.iter().map(|s| s.report.ratio).collect();
    let spread = plain_ratios.iter().fold(0.0f64, |m, &v| m.max(v))
        / plain_ratios.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let growth = completed_ratios.last().expect("levels") / completed_ratios[0];
    println!();
    println!("plain region: max/min = {spread:.4} across depths (bounded operator)");
    println!("completed region: last/first = {growth:.4} and climbing with depth");
}

//! The whole verdict in one run: build the region, complete it, and judge
//! the five claims — cone condition, thin sections, bounded weak-type
//! ratios, growing completed sections, growing completed ratios — exactly
//! as the `verify` subcommand does, writing the same report file.

use regionlab::{run_verify, RunConfig, ScanProtocol};

fn main() {
    let mut config = RunConfig::model_defaults().expect("defaults");
    // Trimmed depth and protocol so the example finishes in seconds; run
    // the binary with configs/default.json for the full-depth verdict.
    config.construction.k_max = 4;
    config.scan = ScanProtocol {
        heights_per_band: 10,
        panel_cells: 96,
        ..ScanProtocol::default()
    };

    let out = std::env::temp_dir().join("regionlab-verify-example");
    let report = run_verify(&config, &out).expect("verify");

    for claim in &report.claims {
        println!(
            "claim ({}): {} — {}",
            claim.id,
            if claim.pass { "pass" } else { "FAIL" },
            claim.description
        );
    }
    println!(
        "envelope sweep: {} over {} samples",
        if report.lemma_sweep.pass { "pass" } else { "FAIL" },
        report.lemma_sweep.samples.len()
    );
    println!();
    println!(
        "all claims pass: {} (full report at {})",
        report.all_pass,
        out.join("verify_report.json").display()
    );
}

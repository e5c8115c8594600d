//! The cone-condition probe: plant a probe cone at sampled points of the
//! region and measure how much of it escapes. With the unit cone `r(t) = t`
//! the plain region absorbs every probe exactly (violation measure zero);
//! with the wider kernel gauge the probes overflow — the region is
//! genuinely thinner than its own completion.

use regionlab::{build_artifacts, check_r_condition, GaugeFunction, RunConfig};

fn main() {
    let config = RunConfig::model_defaults().expect("defaults");
    let artifacts = build_artifacts(&config).expect("build");

    let mut heights = Vec::new();
    for level in &artifacts.trace.levels {
        for m in 0..4 {
            heights.push(level.t * f64::from(1u32 << m));
        }
    }
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];

    let unit = GaugeFunction::power_law(1.0, 1.0).expect("unit gauge");
    let narrow =
        check_r_condition(&artifacts.region, &unit, &heights, &offsets).expect("unit probe");
    println!(
        "unit-cone probe over {} samples: worst escaped measure {:.3e}, {} violation(s), holds = {}",
        narrow.samples,
        narrow.worst_excess,
        narrow.violations.len(),
        narrow.holds()
    );

    let wide = check_r_condition(&artifacts.region, &artifacts.reference, &heights, &offsets)
        .expect("gauge probe");
    println!(
        "kernel-gauge probe over {} samples: worst escaped measure {:.3e}, {} violation(s)",
        wide.samples,
        wide.worst_excess,
        wide.violations.len()
    );

    println!();
    println!("the completed region absorbs the kernel-gauge probes by construction:");
    let completed = check_r_condition(
        &artifacts.completed,
        &artifacts.reference,
        &heights,
        &offsets,
    )
    .expect("completed probe");
    println!(
        "same probe on the completion: worst escaped measure {:.3e}, holds = {}",
        completed.worst_excess,
        completed.holds()
    );
}

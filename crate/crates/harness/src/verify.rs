//! Oracle verification table behind the `verify` subcommand.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tier_core::oracle::{
    all_plans, brute_force_bounds, brute_force_conditional, brute_force_influence, check_counterexamples,
    check_set_function, fixtures, Instance,
};
use tier_core::{conditional_influence, init_state, ThresholdDraws};

use crate::output::VerifyRow;
use crate::Result;

fn row(check: impl Into<String>, passed: bool, detail: String) -> VerifyRow {
    VerifyRow {
        check: check.into(),
        status: if passed { "pass" } else { "fail" }.to_owned(),
        detail,
    }
}

/// Engine and oracle disagreements over all plans of at most three seeded
/// cells on `instances` random instances. Returns `(plans checked, mismatches)`.
pub fn oracle_agreement(instances: u64) -> Result<(usize, usize)> {
    let mut checked = 0;
    let mut mismatches = 0;
    for seed in 0..instances {
        let inst = Instance::random(seed, 8, 3);
        let products = inst.catalog.product_count();
        for plan in all_plans(inst.graph.node_count(), products, 3) {
            let mut state = init_state(&inst.graph, &inst.catalog, &inst.thresholds, &plan)?;
            state.run_to_quiescence(&inst.graph, &inst.catalog);
            for p in 0..products {
                let oracle = brute_force_influence(&inst.graph, &inst.catalog, p, &plan, &inst.thresholds)?;
                checked += 1;
                if oracle != state.active_count(p) {
                    mismatches += 1;
                }
            }
        }
    }
    Ok((checked, mismatches))
}

/// Monotonicity violations of conditional influence over all sets of at most
/// three seeds on `instances` random instances with random opponents.
pub fn conditional_monotonicity(instances: u64) -> Result<(usize, usize)> {
    let mut checks = 0;
    let mut violations = 0;
    for seed in 0..instances {
        let inst = Instance::random(seed, 8, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let opponents = inst.random_opponents(&mut rng, 0, 2);
        let draws = ThresholdDraws::fixed(inst.thresholds.clone());
        let failure = std::cell::Cell::new(false);
        let report = check_set_function(inst.graph.node_count(), 3, |set| {
            let engine = conditional_influence(&inst.graph, &inst.catalog, 0, set, &opponents, &draws);
            let oracle = brute_force_conditional(&inst.graph, &inst.catalog, 0, set, &opponents, &inst.thresholds);
            match (engine, oracle) {
                (Ok(e), Ok(o)) if e == o as f64 => o,
                _ => {
                    failure.set(true);
                    0
                }
            }
        });
        checks += report.checks;
        violations += report.monotone_violations.len() + usize::from(failure.get());
    }
    Ok((checks, violations))
}

pub fn run_verify(instances: u64) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for f in check_counterexamples()?.fixtures {
        let counts: Vec<String> = f.cases.iter().map(|c| c.2.to_string()).collect();
        rows.push(row(
            format!("fixture {}", f.name),
            f.passed,
            format!("counts {}; {}", counts.join("/"), f.inequality),
        ));
    }

    let (checked, mismatches) = oracle_agreement(instances)?;
    rows.push(row(
        "engine matches oracle",
        mismatches == 0,
        format!("{mismatches} mismatches in {checked} evaluations over {instances} instances"),
    ));

    let (checks, violations) = conditional_monotonicity(instances.min(100))?;
    rows.push(row(
        "conditional influence monotone",
        violations == 0,
        format!("{violations} violations in {checks} subset pairs"),
    ));

    for f in fixtures() {
        let b = brute_force_bounds(&f.graph, &f.catalog, 0, &[1, 1], &f.thresholds)?;
        let neutral = brute_force_bounds(&f.graph, &f.catalog.neutralized(), 0, &[1, 1], &f.thresholds)?;
        rows.push(row(
            format!("bounds {}", f.name),
            b.maxmin <= b.maxmax && neutral.maxmin == neutral.maxmax,
            format!(
                "maxmin {} maxmax {}; independent maxmin {} maxmax {}",
                b.maxmin, b.maxmax, neutral.maxmin, neutral.maxmax
            ),
        ));
    }
    Ok(rows)
}

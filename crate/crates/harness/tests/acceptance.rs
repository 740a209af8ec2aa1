//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tier_core::oracle::{brute_force_bounds, brute_force_opt, check_counterexamples, check_set_function, fixtures, Instance};
use tier_core::seeders::GameOutcome;
use tier_core::{
    c_tier, conditional_influence, init_state, lt_greedy, DiffusionState, GameScope, ProductCatalog,
    ThresholdDraws,
};
use tier_harness::experiment::JTIM_METHODS;
use tier_harness::verify::oracle_agreement;
use tier_harness::{run_ctim, run_jtim, ExperimentConfig, Setup};

const COUNTEREXAMPLE_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_INSTANCES: u64 = 200;
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_INSTANCES: u64 = 100;
const PROPERTY_LIMIT: Duration = Duration::from_secs(120);
const APPROX_INSTANCES: u64 = 50;
const APPROX_LIMIT: Duration = Duration::from_secs(120);
const APPROX_RATIO: f64 = 1.0 - 1.0 / std::f64::consts::E;
const SWEEP_SEEDS: u64 = 5;
const SWEEP_LIMIT: Duration = Duration::from_secs(30 * 60);
const CTIER_WIN_SHARE: f64 = 0.90;
const JTIER_WIN_SHARE: f64 = 0.80;
const GAIN_TOLERANCE: f64 = 1e-9;

const DESK: &str = include_str!("../../../configs/desk.toml");

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let elapsed = start.elapsed();
    (elapsed <= limit, format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn counterexamples() -> Outcome {
    let start = Instant::now();
    let report = check_counterexamples().unwrap();
    let (fast, time) = within(COUNTEREXAMPLE_LIMIT, start);
    let detail: Vec<String> = report
        .fixtures
        .iter()
        .map(|f| {
            let counts: Vec<String> = f.cases.iter().map(|c| c.2.to_string()).collect();
            format!("{} {} [{}]", f.name, counts.join("/"), f.inequality)
        })
        .collect();
    Outcome {
        name: "counterexample fixtures",
        passed: report.passed() && fast,
        detail: format!("{}; {time}", detail.join(", ")),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (checked, mismatches) = oracle_agreement(ORACLE_INSTANCES).unwrap();
    let (fast, time) = within(ORACLE_LIMIT, start);
    Outcome {
        name: "engine/oracle equivalence",
        passed: mismatches == 0 && fast,
        detail: format!("{mismatches} mismatches in {checked} evaluations over {ORACLE_INSTANCES} instances; {time}"),
    }
}

fn conditional_properties() -> Outcome {
    let start = Instant::now();
    let (mut checks, mut monotone, mut submodular, mut bad_instances) = (0, 0, 0, 0);
    for seed in 0..PROPERTY_INSTANCES {
        let inst = Instance::random(seed, 8, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let opponents = inst.random_opponents(&mut rng, 0, 2);
        let draws = ThresholdDraws::fixed(inst.thresholds.clone());
        let report = check_set_function(inst.graph.node_count(), 3, |set| {
            conditional_influence(&inst.graph, &inst.catalog, 0, set, &opponents, &draws).unwrap() as usize
        });
        checks += report.checks;
        monotone += report.monotone_violations.len();
        submodular += report.submodular_violations.len();
        bad_instances += usize::from(!report.submodular_violations.is_empty() || !report.monotone_violations.is_empty());
    }
    let (fast, time) = within(PROPERTY_LIMIT, start);
    Outcome {
        name: "conditional monotone + submodular",
        passed: monotone == 0 && submodular == 0 && fast,
        detail: format!(
            "{monotone} monotonicity and {submodular} submodularity violations over {checks} subset pairs; \
             {bad_instances}/{PROPERTY_INSTANCES} instances affected; {time}"
        ),
    }
}

fn approximation() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for seed in 0..APPROX_INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let inst = Instance::random_sized(&mut rng, 8, 1 + (seed as usize % 3));
        let opponents = inst.random_opponents(&mut rng, 0, 2);
        let draws = ThresholdDraws::fixed(inst.thresholds.clone());
        let greedy = c_tier(&inst.graph, &inst.catalog, 0, &opponents, 2, &draws).unwrap();
        let (_, opt) = brute_force_opt(&inst.graph, &inst.catalog, 0, &opponents, 2, &inst.thresholds).unwrap();
        let value = greedy.cumulative[1];
        worst = worst.min(value / opt as f64);
        if value < APPROX_RATIO * opt as f64 {
            failures += 1;
        }
    }
    let (fast, time) = within(APPROX_LIMIT, start);
    Outcome {
        name: "greedy approximation ratio",
        passed: failures == 0 && fast,
        detail: format!("{failures}/{APPROX_INSTANCES} below {APPROX_RATIO:.4}; worst ratio {worst:.3}; {time}"),
    }
}

fn desk_config(seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::parse(DESK).unwrap();
    cfg.seeds.graph = 1 + seed;
    cfg.seeds.thresholds = 100 + seed;
    cfg.seeds.coefficients = 200 + seed;
    cfg.seeds.game_order = 300 + seed;
    cfg.seeds.random_baseline = 400 + seed;
    cfg
}

fn equivalences() -> Outcome {
    let mut mismatches = Vec::new();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
        let inst = Instance::random_sized(&mut rng, 8, 3);
        let opponents = inst.random_opponents(&mut rng, 0, 3);
        let draws = ThresholdDraws::fixed(inst.thresholds.clone());
        let a = c_tier(&inst.graph, &ProductCatalog::independent(3), 0, &opponents, 4, &draws).unwrap();
        let b = lt_greedy(&inst.graph, &draws, 0, 4).unwrap();
        if a.seeds != b.seeds {
            mismatches.push(format!("random instance {seed}"));
        }
    }
    for seed in 0..SWEEP_SEEDS {
        let mut cfg = desk_config(seed);
        cfg.catalog.relations.clear();
        let report = run_ctim(&cfg).unwrap();
        if report.lists[0].1 != report.lists[1].1 {
            mismatches.push(format!("independent desk sweep {seed}"));
        }
        let setup = Setup::build(&desk_config(seed)).unwrap();
        let game = setup.game(GameScope::IndependentOnly, 50).unwrap();
        let greedy = lt_greedy(&setup.graph, &setup.draws, setup.target(), 50).unwrap();
        if game.plan.seeds(setup.target()) != greedy.seeds.as_slice() {
            mismatches.push(format!("independent-only game {seed}"));
        }
    }
    Outcome {
        name: "equivalence identities",
        passed: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            "c_tier = lt_greedy on 20 random and 5 desk instances; independent-only game = lt_greedy on 5 desk setups"
                .into()
        } else {
            format!("mismatches: {}", mismatches.join(", "))
        },
    }
}

struct Sweeps {
    ctim: Vec<tier_harness::experiment::CtimReport>,
    jtim: Vec<tier_harness::experiment::JtimReport>,
    setups: Vec<Setup>,
    elapsed: Duration,
}

fn sweeps() -> Sweeps {
    let start = Instant::now();
    let mut s = Sweeps {
        ctim: Vec::new(),
        jtim: Vec::new(),
        setups: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for seed in 0..SWEEP_SEEDS {
        let cfg = desk_config(seed);
        s.ctim.push(run_ctim(&cfg).unwrap());
        s.jtim.push(run_jtim(&cfg).unwrap());
        s.setups.push(Setup::build(&cfg).unwrap());
    }
    s.elapsed = start.elapsed();
    s
}

fn influence(rows: &[tier_harness::output::SweepRow], method: &str, k: usize) -> f64 {
    rows.iter().find(|r| r.method == method && r.k == k).unwrap().influence
}

fn conditional_direction(s: &Sweeps) -> Outcome {
    let (mut wins, mut cells) = (0, 0);
    let mut margin = 0.0;
    for report in &s.ctim {
        for row in report.rows.iter().filter(|r| r.method == "C-TIER") {
            let lt = influence(&report.rows, "LT-greedy", row.k);
            cells += 1;
            wins += usize::from(row.influence >= lt);
            margin += row.influence - lt;
        }
    }
    let share = wins as f64 / cells as f64;
    let fast = s.elapsed <= SWEEP_LIMIT;
    Outcome {
        name: "conditional sweep direction",
        passed: share >= CTIER_WIN_SHARE && fast,
        detail: format!(
            "C-TIER >= LT-greedy in {wins}/{cells} cells ({:.0}%, need {:.0}%); mean margin {:.1}; sweeps {:.1}s",
            share * 100.0,
            CTIER_WIN_SHARE * 100.0,
            margin / cells as f64,
            s.elapsed.as_secs_f64()
        ),
    }
}

fn joint_direction(s: &Sweeps) -> Outcome {
    let (mut wins, mut cells) = (0, 0);
    let mut at_50 = vec![0.0; JTIM_METHODS.len()];
    for report in &s.jtim {
        for row in report.rows.iter().filter(|r| r.method == "J-TIER") {
            cells += 1;
            let best_other = JTIM_METHODS[1..]
                .iter()
                .map(|m| influence(&report.rows, m, row.k))
                .fold(f64::NEG_INFINITY, f64::max);
            wins += usize::from(row.influence >= best_other);
        }
        for (i, m) in JTIM_METHODS.iter().enumerate() {
            at_50[i] += influence(&report.rows, m, 50) / s.jtim.len() as f64;
        }
    }
    let share = wins as f64 / cells as f64;
    let first = at_50[1..].iter().all(|&v| at_50[0] >= v);
    let means: Vec<String> = JTIM_METHODS.iter().zip(&at_50).map(|(m, v)| format!("{m} {v:.1}")).collect();
    Outcome {
        name: "joint sweep direction",
        passed: share >= JTIER_WIN_SHARE && first,
        detail: format!(
            "J-TIER >= all scoped games in {wins}/{cells} cells ({:.0}%, need {:.0}%); mean at k=50: {}",
            share * 100.0,
            JTIER_WIN_SHARE * 100.0,
            means.join(", ")
        ),
    }
}

/// Largest singleton gain of `product` from an empty start.
fn best_singleton(setup: &Setup, product: usize) -> f64 {
    let (g, c) = (&setup.graph, &setup.catalog);
    let mut states: Vec<DiffusionState> = setup
        .draws
        .samples()
        .iter()
        .map(|t| DiffusionState::new(g, c, t).unwrap())
        .collect();
    let samples = states.len() as f64;
    (0..g.node_count())
        .map(|u| {
            states
                .iter_mut()
                .map(|s| {
                    s.speculate(|s| {
                        s.seed(g, c, u, product).unwrap();
                        s.run_to_quiescence(g, c);
                        s.active_count(product)
                    })
                })
                .sum::<usize>() as f64
                / samples
        })
        .fold(0.0, f64::max)
}

fn per_seed_shape(s: &Sweeps) -> Outcome {
    let mut trace_failures = Vec::new();
    let mut traces = 0;
    for (seed, (setup, report)) in s.setups.iter().zip(&s.jtim).enumerate() {
        let mut games: Vec<GameOutcome> = vec![report.game.clone()];
        for scope in [GameScope::CompetingOnly, GameScope::ComplementaryOnly, GameScope::IndependentOnly] {
            games.push(setup.game(scope, 50).unwrap());
        }
        for game in &games {
            traces += 1;
            let first = &game.trace[0];
            let best = best_singleton(setup, first.product);
            if (first.realized[first.product] - best).abs() > GAIN_TOLERANCE {
                trace_failures.push(format!(
                    "seed {seed}: {} first gain {} vs best singleton {best}",
                    setup.catalog.name(first.product),
                    first.realized[first.product]
                ));
            }
        }
    }
    let mut increases = Vec::new();
    for (seed, report) in s.ctim.iter().enumerate() {
        for (i, w) in report.c_tier.gains.windows(2).enumerate() {
            if w[1] > w[0] + GAIN_TOLERANCE {
                increases.push(format!("seed {seed} round {}: {} -> {}", i + 2, w[0], w[1]));
            }
        }
    }
    let mut detail = format!(
        "first commit is the best singleton in {}/{traces} game traces; c_tier gain increases: {}",
        traces - trace_failures.len(),
        increases.len()
    );
    for f in trace_failures.iter().chain(&increases).take(6) {
        detail.push_str("; ");
        detail.push_str(f);
    }
    Outcome {
        name: "per-seed marginal shape",
        passed: trace_failures.is_empty() && increases.is_empty(),
        detail,
    }
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_tier");
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.toml");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let subcommands: [&[&str]; 5] = [&["ctim"], &["jtim"], &["intersect"], &["per-seed"], &["verify", "--instances", "20"]];
    let mut differing = Vec::new();
    let mut compared = 0;
    for dir in &dirs {
        for args in subcommands {
            let status = Command::new(bin)
                .args(args)
                .arg("--config")
                .arg(&cfg)
                .arg("--out")
                .arg(dir.path())
                .output()
                .unwrap()
                .status;
            assert!(status.success(), "{args:?}");
        }
    }
    let mut names: Vec<_> = fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        compared += 1;
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).ok();
        if b.as_deref() != Some(a.as_slice()) {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    Outcome {
        name: "determinism",
        passed: differing.is_empty() && compared >= 7,
        detail: format!("{compared} CSVs from 5 subcommands compared; {} differ {differing:?}", differing.len()),
    }
}

fn bounds() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for f in fixtures() {
        let b = brute_force_bounds(&f.graph, &f.catalog, 0, &[1, 1], &f.thresholds).unwrap();
        let n = brute_force_bounds(&f.graph, &f.catalog.neutralized(), 0, &[1, 1], &f.thresholds).unwrap();
        ok &= b.maxmin <= b.maxmax && n.maxmin == n.maxmax;
        details.push(format!("{} {}<={} (indep {}={})", f.name, b.maxmin, b.maxmax, n.maxmin, n.maxmax));
    }
    Outcome {
        name: "bounds oracle",
        passed: ok,
        detail: details.join(", "),
    }
}

#[test]
fn acceptance() {
    let mut outcomes = vec![counterexamples(), oracle_equivalence(), conditional_properties(), approximation(), equivalences()];
    let s = sweeps();
    outcomes.push(conditional_direction(&s));
    outcomes.push(joint_direction(&s));
    outcomes.push(per_seed_shape(&s));
    outcomes.push(determinism());
    outcomes.push(bounds());

    // sanity: the fixtures are engine-reproducible, not only oracle-reproducible
    for f in fixtures() {
        let c = &f.cases[0];
        let mut st = init_state(&f.graph, &f.catalog, &f.thresholds, &c.plan).unwrap();
        st.run_to_quiescence(&f.graph, &f.catalog);
        assert_eq!(st.active_count(0), c.expected);
    }
    for o in &outcomes {
        println!("{} {:<36} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them). Tolerances and
//! runtime budgets are pinned in the asserts.

use bayesmux::ensemble::snis_weights;
use bayesmux::evidence::{conjugate_evidence, ConjugateFamily, EvidenceConfig};
use bayesmux::mcmc::McmcConfig;
use bayesmux::pipeline::{run_pipeline, RunConfig, RunReport};
use bayesmux::proposer::{ProposerConfig, ProposerMode};
use bayesmux::theory::{
    exact_model_posterior, inexact_divergence, joint_divergence, joint_divergence_elbo,
    joint_divergence_of, log_marginal_over_models, optimal_model_weights,
    optimal_model_weights_elbo, relaxed_bound, simulate_snis, snis_asymptotic_variance,
    FiniteModelSpace,
};
use rand::Rng;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn pipeline_config(problem: &str, corpus: &str, master_seed: u64) -> RunConfig {
    RunConfig {
        problem_file: repo_path(problem),
        proposer: ProposerConfig {
            mode: ProposerMode::Corpus,
            corpus_dir: Some(repo_path(corpus)),
            exhaustive: true,
            ..Default::default()
        },
        mcmc: McmcConfig::default(), // 2 chains, 10000 kept, 5000 warmup
        evidence: EvidenceConfig::default(), // K = 25, R = 10000
        parallel_models: 1,
        master_seed,
        ..Default::default()
    }
}

/// Criterion 1: the full pipeline's importance-weighted bound for the
/// flat-prior coin model lands within 0.05 nats of the closed form
/// log(14! 6! / 21!), at the default K = 25, R = 10000, in under a minute
/// without model-level parallelism.
#[test]
fn criterion_1_conjugate_evidence_accuracy() {
    let started = Instant::now();
    let out = run_pipeline(&pipeline_config(
        "fixtures/problems/coin.txt",
        "fixtures/corpus/coin",
        2024,
    ))
    .unwrap();
    let elapsed = started.elapsed();

    // corpus files sort as uniform(1,1), weak(2,2), standard(30,30)
    let flat = &out.report.per_model[0];
    assert_eq!(flat.id, "m0000");
    let exact = conjugate_evidence(&ConjugateFamily::BetaBernoulli {
        alpha: 1.0,
        beta: 1.0,
        successes: 14,
        failures: 6,
    });
    let bound = flat.log_evidence_bound.unwrap();
    let gap = (bound - exact).abs();
    assert!(
        gap < 0.05,
        "criterion 1: bound {bound} vs exact {exact} (gap {gap})"
    );
    assert!(
        elapsed.as_secs() < 60,
        "criterion 1: runtime {elapsed:?} exceeds 60 s"
    );
    println!(
        "criterion 1 PASS: IW bound {bound:.4} within {gap:.4} nats of {exact:.4} ({}s)",
        elapsed.as_secs()
    );
}

/// Criterion 2: ensemble weights over the three coin priors match the
/// weights computed from exact conjugate evidences within 0.02 per model.
#[test]
fn criterion_2_ensemble_weight_correctness() {
    let started = Instant::now();
    let out = run_pipeline(&pipeline_config(
        "fixtures/problems/coin.txt",
        "fixtures/corpus/coin",
        7,
    ))
    .unwrap();
    let elapsed = started.elapsed();

    let exact_scores: Vec<f64> = [(1.0, 1.0), (2.0, 2.0), (30.0, 30.0)]
        .iter()
        .map(|&(a, b)| {
            conjugate_evidence(&ConjugateFamily::BetaBernoulli {
                alpha: a,
                beta: b,
                successes: 14,
                failures: 6,
            })
        })
        .collect();
    let exact = snis_weights(&exact_scores).unwrap();

    assert_eq!(out.report.per_model.len(), 3);
    for (record, want) in out.report.per_model.iter().zip(exact.weights.iter()) {
        let got = record.weight;
        assert!(
            (got - want).abs() < 0.02,
            "criterion 2: model {} weight {got} vs exact {want}",
            record.id
        );
    }
    assert!(
        elapsed.as_secs() < 180,
        "criterion 2: runtime {elapsed:?} exceeds 3 min"
    );
    let got: Vec<f64> = out.report.per_model.iter().map(|m| m.weight).collect();
    println!(
        "criterion 2 PASS: weights {:?} vs exact {:?} ({}s)",
        got,
        exact.weights,
        elapsed.as_secs()
    );
}

/// Criterion 3: on the 22-day sequence matching the published base rates
/// (8/22 rain, 14/21 adjacent consistency, final three days rain), the
/// day-to-day persistence model takes at least 0.9 of the weight and the
/// weighted next-day rain probability beats both base rates.
#[test]
fn criterion_3_rain_qualitative_reproduction() {
    let out = run_pipeline(&pipeline_config(
        "fixtures/problems/rain.txt",
        "fixtures/corpus/rain",
        99,
    ))
    .unwrap();
    let report = &out.report;
    assert_eq!(report.per_model.len(), 2);
    let iid = &report.per_model[0];
    let markov = &report.per_model[1];
    assert!(
        markov.weight >= 0.9,
        "criterion 3: persistence model weight {} below 0.9",
        markov.weight
    );
    let z = &report.weighted_summary["z"][0];
    let rain_rate = 8.0 / 22.0;
    let consistency_rate = 14.0 / 21.0;
    assert!(
        z.mean > rain_rate && z.mean > consistency_rate,
        "criterion 3: weighted prediction {} does not beat both base rates ({rain_rate:.3}, {consistency_rate:.3})",
        z.mean
    );
    println!(
        "criterion 3 PASS: persistence weight {:.4} (iid {:.2e}), weighted prediction {:.4} > {:.3}",
        markov.weight, iid.weight, z.mean, consistency_rate
    );
}

fn random_space(rng: &mut impl Rng, m: usize) -> FiniteModelSpace {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    FiniteModelSpace {
        prior: raw.iter().map(|r| r / total).collect(),
        log_evidence: (0..m).map(|_| rng.random_range(-4.0..2.0)).collect(),
        kl: (0..m).map(|_| rng.random_range(0.0..2.5)).collect(),
        g: (0..m).map(|_| rng.random_range(-2.0..2.0)).collect(),
        slack: None,
    }
}

/// Criterion 4: on 100 random 3-model spaces the closed-form optimal weights
/// beat every point of a 10^4-point simplex grid on joint divergence, and
/// the evidence*exp(-KL) and prior*exp(ELBO) forms agree to 1e-12.
#[test]
fn criterion_4_optimal_weights_verified_by_grid_sweep() {
    let started = Instant::now();
    let mut rng = bayesmux::seed::stream(404, &["acceptance-thm".into()]);
    // 141 * 142 / 2 = 10011 grid points on the 3-simplex
    let steps = 140usize;
    let mut worst_margin = f64::INFINITY;
    for trial in 0..100 {
        let s = random_space(&mut rng, 3);
        let opt = optimal_model_weights(&s).unwrap();
        let best = joint_divergence(&s).unwrap();

        let elbo: Vec<f64> = s
            .log_evidence
            .iter()
            .zip(s.kl.iter())
            .map(|(&le, &kl)| le - kl)
            .collect();
        let alt = optimal_model_weights_elbo(&s.prior, &elbo).unwrap();
        for (a, b) in opt.iter().zip(alt.iter()) {
            assert!(
                (a - b).abs() < 1e-12,
                "criterion 4 trial {trial}: weight forms disagree ({a} vs {b})"
            );
        }

        let mut grid_min = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let k = steps - i - j;
                let q = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    k as f64 / steps as f64,
                ];
                let v = joint_divergence_of(&s, &q).unwrap();
                if v < grid_min {
                    grid_min = v;
                }
            }
        }
        assert!(
            best <= grid_min + 1e-10,
            "criterion 4 trial {trial}: optimum {best} above grid minimum {grid_min}"
        );
        worst_margin = worst_margin.min(grid_min - best);
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 30,
        "criterion 4: runtime {elapsed:?} exceeds 30 s"
    );
    println!(
        "criterion 4 PASS: 100 spaces x 10011 grid points, min grid excess {worst_margin:.2e} ({}ms)",
        elapsed.as_millis()
    );
}

/// Criterion 5: on a fixed 5-model space the simulated estimator's N x
/// variance at N = 200 over 1e5 replications matches the asymptotic formula
/// within 15% and respects the chi-squared bound.
#[test]
fn criterion_5_snis_variance_law() {
    let started = Instant::now();
    let s = FiniteModelSpace {
        prior: vec![0.35, 0.25, 0.2, 0.12, 0.08],
        log_evidence: vec![0.0, -0.4, 0.7, -1.1, 0.3],
        kl: vec![0.0; 5],
        g: vec![1.0, 2.0, 0.0, 3.0, 1.5],
        slack: None,
    };
    let exact = snis_asymptotic_variance(&s, None).unwrap();
    let delta =
        s.g.iter()
            .map(|&g| (g - exact.mu).abs())
            .fold(0.0_f64, f64::max);
    let bound = delta * delta * (1.0 + exact.chi2);

    let n = 200;
    let replications = 100_000;
    let sim = simulate_snis(&s, n, replications, 1234).unwrap();
    let empirical = n as f64 * sim.variance;
    let rel = (empirical - exact.v_n).abs() / exact.v_n;
    assert!(
        rel <= 0.15,
        "criterion 5: empirical N*var {empirical} vs v_n {} (rel err {rel})",
        exact.v_n
    );
    let sd = empirical * (2.0 / (replications as f64 - 1.0)).sqrt();
    assert!(
        empirical <= bound + 3.0 * sd,
        "criterion 5: empirical {empirical} above bound {bound} + 3sd"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "criterion 5: runtime {elapsed:?} exceeds 60 s"
    );
    println!(
        "criterion 5 PASS: N*var {empirical:.4} vs v_n {:.4} (rel {rel:.3}), bound {bound:.3} ({}ms)",
        exact.v_n,
        elapsed.as_millis()
    );
}

/// Criterion 6: slack identities. Constant slack leaves the joint divergence
/// unchanged to 1e-12, zero slack reproduces both exact forms, and the
/// Jensen relaxation dominates on 1000 random spaces.
#[test]
fn criterion_6_inexact_bound_identities() {
    let mut rng = bayesmux::seed::stream(606, &["acceptance-slack".into()]);
    for trial in 0..1000 {
        let mut s = random_space(&mut rng, 4);

        let base = joint_divergence(&s).unwrap();
        let c = rng.random_range(0.0..5.0);
        s.slack = Some(vec![c; 4]);
        let with_const = inexact_divergence(&s).unwrap();
        assert!(
            (with_const - base).abs() < 1e-12,
            "criterion 6 trial {trial}: constant slack {c} shifted divergence by {}",
            with_const - base
        );

        s.slack = Some(vec![0.0; 4]);
        let with_zero = inexact_divergence(&s).unwrap();
        let elbo: Vec<f64> = s
            .log_evidence
            .iter()
            .zip(s.kl.iter())
            .map(|(&le, &kl)| le - kl)
            .collect();
        let elbo_form = joint_divergence_elbo(&s.prior, &elbo, log_marginal_over_models(&s));
        assert!(
            (with_zero - base).abs() < 1e-12,
            "criterion 6 trial {trial}"
        );
        assert!(
            (with_zero - elbo_form).abs() < 1e-12,
            "criterion 6 trial {trial}"
        );

        let relaxed = relaxed_bound(&s).unwrap();
        assert!(
            relaxed >= base - 1e-12,
            "criterion 6 trial {trial}: relaxation {relaxed} below divergence {base}"
        );

        // sanity anchor: the posterior stays a distribution
        let post = exact_model_posterior(&s).unwrap();
        let total: f64 = post.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    println!("criterion 6 PASS: slack identities and relaxation held on 1000 random spaces");
}

/// Criterion 7: the shipped 30-fixture corpus produces exactly the authored
/// rejection statistics, and every accepted fixture round-trips through the
/// pretty-printer.
#[test]
fn criterion_7_parser_and_validator_gate() {
    use bayesmux::dsl::{parse_model, pretty_print, ModelSource};
    use bayesmux::proposer::{filter_valid, RejectionStats};

    let dir = repo_path("fixtures/corpus30");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    let sources: Vec<ModelSource> = files
        .iter()
        .map(|p| {
            ModelSource::new(
                p.file_stem().unwrap().to_str().unwrap(),
                std::fs::read_to_string(p).unwrap(),
            )
        })
        .collect();
    let out = filter_valid(&sources);
    assert_eq!(
        out.stats,
        RejectionStats {
            generated: 30,
            missing_blocks: 2,
            parse_failed: 4,
            validation_failed: 4,
            accepted: 20,
        },
        "criterion 7: stats diverged: {:#?}",
        out.rejections
    );
    for am in &out.accepted {
        let again = parse_model(&pretty_print(&am.model)).unwrap();
        assert_eq!(am.model, again, "criterion 7: {} failed round-trip", am.id);
    }
    println!(
        "criterion 7 PASS: 30-fixture corpus gave stats {:?}, 20 round-trips",
        out.stats
    );
}

/// Criterion 8: identical configuration and master seed give byte-identical
/// reports (wall-clock fields zeroed) at one and at eight model pipelines,
/// and the numeric content is identical across the two parallelism settings.
#[test]
fn criterion_8_report_determinism() {
    fn canonical(report: &RunReport) -> String {
        let mut r = report.clone();
        for m in r.per_model.iter_mut() {
            m.elapsed_ms = 0;
        }
        serde_json::to_string_pretty(&r).unwrap()
    }

    let mut cfg = pipeline_config("fixtures/problems/coin.txt", "fixtures/corpus/coin", 31);
    cfg.mcmc.iterations = 500;
    cfg.mcmc.warmup = 250;
    cfg.evidence.k = 5;
    cfg.evidence.r = 400;

    let a1 = canonical(&run_pipeline(&cfg).unwrap().report);
    let a2 = canonical(&run_pipeline(&cfg).unwrap().report);
    assert_eq!(
        a1, a2,
        "criterion 8: repeated run differs at parallel_models = 1"
    );

    cfg.parallel_models = 8;
    let b1 = canonical(&run_pipeline(&cfg).unwrap().report);
    let b2 = canonical(&run_pipeline(&cfg).unwrap().report);
    assert_eq!(
        b1, b2,
        "criterion 8: repeated run differs at parallel_models = 8"
    );

    // across parallelism settings only the echoed setting itself may differ
    let va: serde_json::Value = serde_json::from_str(&a1).unwrap();
    let vb: serde_json::Value = serde_json::from_str(&b1).unwrap();
    for field in [
        "per_model",
        "weighted_summary",
        "flat_summary",
        "weight_ess",
        "seeds",
        "rejection",
    ] {
        assert_eq!(
            va[field], vb[field],
            "criterion 8: `{field}` changed with parallelism"
        );
    }
    println!("criterion 8 PASS: byte-identical reports at parallel_models 1 and 8");
}

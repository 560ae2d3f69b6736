//! The discrete verification suite: every exact check over seeded random worlds.

use augbound_core::discrete::{
    check_entropy_cap, corollary2_report, gen_gap_decomposition_exact, orbit_contraction_check,
    per_sample_vs_dataset_mi, prop3_bound_check, prop4_bound_check, random_world, reverse_pinsker_sweep,
    verify_information_lemmas, verify_reverse_pinsker, ChannelKind, DataKind, DiscreteDistribution, LearnerTable,
    MarkovChain, WorldSpec,
};
use augbound_core::rng::derive_seed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::DiscreteSuiteConfig;
use crate::error::AppResult;

/// One check over `trials` seeded instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub values: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

const TOL: f64 = 1e-12;

struct Tally {
    failures: usize,
    max_residual: f64,
}

impl Tally {
    fn new() -> Self {
        Self { failures: 0, max_residual: 0.0 }
    }

    fn record(&mut self, ok: bool, residual: f64) {
        self.failures += usize::from(!ok);
        self.max_residual = self.max_residual.max(residual);
    }
}

fn record(name: &str, seed: u64, trials: usize, failures: usize, values: Value) -> CheckRecord {
    CheckRecord { name: name.into(), seed, trials, failures, values, pass: failures == 0 }
}

fn decomposition(seed: u64, trials: usize) -> AppResult<CheckRecord> {
    let mut t = Tally::new();
    for i in 0..trials {
        let w = random_world(&WorldSpec::new(3, 2, 3), derive_seed(seed, i as u64))?;
        let d = gen_gap_decomposition_exact(&w, 2, 2)?;
        let r = (d.sum - d.direct_gap).abs();
        t.record(r < TOL, r);
    }
    Ok(record("gap-decomposition", seed, trials, t.failures, json!({"max_residual": t.max_residual, "m": 2, "n": 2})))
}

fn orbit_contraction(seed: u64, trials: usize) -> AppResult<CheckRecord> {
    let spec = WorldSpec::new(3, 2, 4).data(DataKind::Invariant).channel(ChannelKind::InputKernel);
    let mut t = Tally::new();
    let mut min_difference = f64::INFINITY;
    for i in 0..trials {
        let c = orbit_contraction_check(&random_world(&spec, derive_seed(seed, i as u64))?)?;
        t.record(c.equal, (c.difference - c.expected_kl).abs());
        min_difference = min_difference.min(c.difference);
    }
    Ok(record(
        "orbit-contraction",
        seed,
        trials,
        t.failures,
        json!({"max_residual": t.max_residual, "min_difference": min_difference}),
    ))
}

fn per_sample(seed: u64, trials: usize) -> AppResult<CheckRecord> {
    let mut failures = 0;
    let mut max_slack = f64::NEG_INFINITY;
    for i in 0..trials {
        let w = random_world(&WorldSpec::new(2, 2, 3), derive_seed(seed, i as u64))?;
        let c = per_sample_vs_dataset_mi(&w.data_dist, &LearnerTable::from_world(&w, 2)?)?;
        failures += usize::from(!c.holds);
        max_slack = max_slack.max(c.lhs - c.rhs);
    }
    Ok(record("per-sample-vs-dataset", seed, trials, failures, json!({"max_lhs_minus_rhs": max_slack})))
}

fn pinsker(seed: u64, trials: usize) -> AppResult<Vec<CheckRecord>> {
    let sweep = reverse_pinsker_sweep(seed, trials, 4, 0.05)?;
    let stress = record(
        "reverse-pinsker-corrected",
        seed,
        trials,
        sweep.corrected_failures + sweep.forward_failures,
        json!({
            "q_floor": 0.05,
            "min_q": sweep.min_q,
            "corrected_failures": sweep.corrected_failures,
            "forward_failures": sweep.forward_failures,
            "as_printed_failures": sweep.paper_failures,
        }),
    );
    // The two-point pair on which the halved constant fails.
    let p = DiscreteDistribution::new(vec![0.6, 0.4])?;
    let q = DiscreteDistribution::new(vec![0.5, 0.5])?;
    let r = verify_reverse_pinsker(&p, &q)?;
    let reproduced = !r.paper_holds && r.corrected_holds;
    let example = record(
        "reverse-pinsker-two-point",
        seed,
        1,
        usize::from(!reproduced),
        json!({"p": [0.6, 0.4], "q": [0.5, 0.5], "kl": r.kl, "as_printed_bound": r.paper_bound,
               "corrected_bound": r.corrected_bound, "as_printed_holds": r.paper_holds,
               "corrected_holds": r.corrected_holds}),
    );
    Ok(vec![stress, example])
}

fn props(seed: u64, trials: usize) -> AppResult<Vec<CheckRecord>> {
    let (mut p3, mut p3_paper, mut p4, mut p4_paper, mut max_ratio) = (0, 0, 0, 0, 0.0f64);
    let mut cases = 0;
    for i in 0..trials {
        let w = random_world(&WorldSpec::new(3, 1, 3), derive_seed(seed, i as u64))?;
        for z in 0..w.z_size() {
            cases += 1;
            let c = prop3_bound_check(&w, z)?;
            p3 += usize::from(!c.corrected_holds);
            p3_paper += usize::from(!c.paper_holds);
            if c.corrected_bound > 0.0 {
                max_ratio = max_ratio.max(c.exact_aug_mi / c.corrected_bound);
            }
            let d = prop4_bound_check(&w, z)?;
            p4 += usize::from(!(d.l1_holds && d.l1_tv_holds));
            p4_paper += usize::from(!(d.paper_holds && d.paper_tv_holds));
        }
    }
    Ok(vec![
        record(
            "lipschitz-aug-mi-corrected",
            seed,
            trials,
            p3,
            json!({"cases": cases, "max_mi_over_bound": max_ratio, "as_printed_failures": p3_paper}),
        ),
        record("density-ratio-aug-mi-l1", seed, trials, p4, json!({"cases": cases, "halved_failures": p4_paper})),
    ])
}

fn entropy_caps(seed: u64, trials: usize) -> AppResult<CheckRecord> {
    let (mut failures, mut single_failures) = (0, 0);
    for i in 0..trials {
        let w = random_world(&WorldSpec::new(2, 2, 3), derive_seed(seed, i as u64))?;
        let c = check_entropy_cap(&w, 2, 2)?;
        failures += usize::from(!(c.dataset_cap_holds && c.aug_cap_holds));
        single_failures += usize::from(!c.single_cap_holds);
    }
    let example = corollary2_report(100, 1, 16, 1, 0.0, 1.0)?;
    Ok(record(
        "entropy-caps",
        seed,
        trials,
        failures,
        json!({"m": 2, "n": 2, "log_g_cap_failures": single_failures, "term_w_w16_m100": example.term_w}),
    ))
}

fn lemmas(seed: u64, trials: usize) -> AppResult<CheckRecord> {
    let mut failures = 0;
    let mut max_residual = 0.0f64;
    for i in 0..trials {
        let r = verify_information_lemmas(&MarkovChain::random(derive_seed(seed, i as u64), 3, 4, 3)?)?;
        failures += usize::from(!r.pass);
        max_residual = max_residual.max((r.i_xy - r.i_xy_as_kl).abs());
    }
    Ok(record("information-lemmas", seed, trials, failures, json!({"max_kl_identity_residual": max_residual})))
}

/// Runs every check with `trials` instances; zero trials gives an empty report.
pub fn run_discrete_suite(cfg: &DiscreteSuiteConfig) -> AppResult<SuiteReport> {
    let (seed, n) = (cfg.seed, cfg.trials);
    let mut checks = Vec::new();
    if n > 0 {
        checks.push(decomposition(derive_seed(seed, 1), n)?);
        checks.push(orbit_contraction(derive_seed(seed, 2), n)?);
        checks.push(per_sample(derive_seed(seed, 3), n)?);
        checks.extend(pinsker(derive_seed(seed, 4), n)?);
        checks.extend(props(derive_seed(seed, 5), n)?);
        checks.push(entropy_caps(derive_seed(seed, 6), n)?);
        checks.push(lemmas(derive_seed(seed, 7), n)?);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { seed, trials: n, checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = DiscreteSuiteConfig { seed: 3, trials: 20 };
        let a = run_discrete_suite(&cfg).unwrap();
        assert!(a.pass, "{a:#?}");
        assert_eq!(a.checks.len(), 9);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&run_discrete_suite(&cfg).unwrap()).unwrap());
    }

    #[test]
    fn zero_trials_is_empty() {
        let r = run_discrete_suite(&DiscreteSuiteConfig { seed: 0, trials: 0 }).unwrap();
        assert!(r.checks.is_empty() && r.pass);
    }
}

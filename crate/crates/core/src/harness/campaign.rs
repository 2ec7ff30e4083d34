// SPDX-License-Identifier: Apache-2.0

//! Seeded random campaigns over pairs of factors.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{gen_random_with, Analysis, Outcome, Statement, Verdict};
use crate::instance::InstanceFile;
use crate::pairing::MultiparameterMatrix;
use crate::solver::{brute_force_dimension, DimensionOptions};
use crate::value_group::MergeMode;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignConfig {
    pub trials: usize,
    pub seed: u64,
    /// Factor ranks are drawn from `1..=max_rank`.
    pub max_rank: usize,
    /// Number of free generators, drawn from `0..=max_free_rank`.
    pub max_free_rank: usize,
    pub exponent_bound: u32,
    pub torsion_order: u64,
    pub mode: MergeMode,
    /// Entry bound for the exhaustive cross-check of each tensor product
    /// (`None` skips it). Factors are always checked at bound 2.
    pub oracle_bound: Option<u32>,
    #[serde(skip)]
    pub opts: DimensionOptions,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            trials: 500,
            seed: 7,
            max_rank: 3,
            max_free_rank: 2,
            exponent_bound: 2,
            torsion_order: 1,
            mode: MergeMode::Shared,
            oracle_bound: Some(1),
            opts: DimensionOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    /// Hypotheses met and conclusion certified.
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    /// Hypotheses not met, so nothing to check.
    pub vacuous: usize,
}

impl Tally {
    fn add(&mut self, v: &Verdict) {
        // The weak bound needs no hypotheses; its flag refers to the sharp form.
        let applies = v.hypotheses_met || v.statement == Statement::WeakUpperBound;
        match (v.conclusion, applies) {
            (Outcome::Violated, _) => self.violated += 1,
            (Outcome::Inconclusive, _) => self.inconclusive += 1,
            (Outcome::Holds, true) => self.holds += 1,
            (Outcome::Holds, false) => self.vacuous += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.holds + self.violated + self.inconclusive + self.vacuous
    }

    /// Fraction of verdicts that are not inconclusive.
    pub fn decisive_fraction(&self) -> f64 {
        if self.total() == 0 {
            1.0
        } else {
            1.0 - self.inconclusive as f64 / self.total() as f64
        }
    }
}

/// Exhaustive cross-checks. At small entry bounds the oracle only bounds the
/// dimension from below, so for tensor products the checked property is
/// `oracle <= upper`; `reaches_lower` counts how often it also attains the
/// certified lower bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleTally {
    pub factors_checked: usize,
    pub factors_agree: usize,
    pub tensors_checked: usize,
    pub tensors_within_upper: usize,
    pub tensors_reach_lower: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Anomaly {
    pub trial: usize,
    pub kind: String,
    pub detail: String,
    pub instance: Vec<InstanceFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: CampaignConfig,
    pub tallies: BTreeMap<&'static str, Tally>,
    pub oracle: OracleTally,
    pub anomalies: Vec<Anomaly>,
}

impl Report {
    pub fn violations(&self) -> usize {
        self.tallies.values().map(|t| t.violated).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.violations() == 0 && self.anomalies.is_empty()
    }
}

struct TrialResult {
    verdicts: Vec<Verdict>,
    oracle: OracleTally,
    anomalies: Vec<Anomaly>,
}

fn instances(factors: &[&MultiparameterMatrix]) -> Vec<InstanceFile> {
    factors.iter().filter_map(|l| InstanceFile::from_matrix(l).ok()).collect()
}

fn run_trial(config: &CampaignConfig, trial: usize) -> TrialResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let n1 = rng.gen_range(1..=config.max_rank);
    let n2 = rng.gen_range(1..=config.max_rank);
    let k = rng.gen_range(0..=config.max_free_rank);
    let m = config.torsion_order;
    let l1 = gen_random_with(&mut rng, n1, k, m, config.exponent_bound);
    let l2 = gen_random_with(&mut rng, n2, k, m, config.exponent_bound);

    let mut anomalies = Vec::new();
    let mut oracle = OracleTally::default();
    let analysis = match Analysis::new(&[l1.clone(), l2.clone()], config.mode, &config.opts) {
        Ok(a) => a,
        Err(e) => {
            anomalies.push(Anomaly {
                trial,
                kind: "tensor_failed".into(),
                detail: e.to_string(),
                instance: instances(&[&l1, &l2]),
            });
            return TrialResult {
                verdicts: Vec::new(),
                oracle,
                anomalies,
            };
        }
    };
    let verdicts = vec![
        analysis.superadditivity(),
        analysis.upper_bound(),
        analysis.strict(),
        analysis.additivity(),
    ];
    for v in &verdicts {
        if v.conclusion == Outcome::Violated {
            anomalies.push(Anomaly {
                trial,
                kind: "violated".into(),
                detail: v.statement.name().into(),
                instance: instances(&[&l1, &l2]),
            });
        }
    }

    for f in &analysis.factors {
        match brute_force_dimension(&f.lambda, 2) {
            Ok(o) => {
                oracle.factors_checked += 1;
                let inside = f.dim.lower <= o && o <= f.dim.upper;
                if inside && (!f.dim.exact || o == f.dim.lower) {
                    oracle.factors_agree += 1;
                } else {
                    anomalies.push(Anomaly {
                        trial,
                        kind: "factor_oracle_disagrees".into(),
                        detail: format!("oracle {o}, solver [{}, {}]", f.dim.lower, f.dim.upper),
                        instance: instances(&[&f.lambda]),
                    });
                }
            }
            Err(_) => oracle.skipped += 1,
        }
    }
    if let Some(b) = config.oracle_bound {
        match brute_force_dimension(&analysis.product, b) {
            Ok(o) => {
                oracle.tensors_checked += 1;
                if o <= analysis.tensor.upper {
                    oracle.tensors_within_upper += 1;
                } else {
                    anomalies.push(Anomaly {
                        trial,
                        kind: "tensor_oracle_exceeds_upper".into(),
                        detail: format!("oracle {o}, upper {}", analysis.tensor.upper),
                        instance: instances(&[&l1, &l2]),
                    });
                }
                if o >= analysis.tensor.lower {
                    oracle.tensors_reach_lower += 1;
                }
            }
            Err(_) => oracle.skipped += 1,
        }
    }
    TrialResult {
        verdicts,
        oracle,
        anomalies,
    }
}

/// Runs the trials in parallel and aggregates them in trial order, so the
/// report only depends on the configuration.
pub fn run_campaign(config: &CampaignConfig) -> Report {
    let results: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect();
    let mut tallies: BTreeMap<&'static str, Tally> = BTreeMap::new();
    for s in [
        Statement::Superadditivity,
        Statement::UpperBound,
        Statement::WeakUpperBound,
        Statement::StrictUpperBound,
        Statement::AdditivityCodimLe1,
        Statement::AdditivityCodim2,
    ] {
        tallies.insert(s.name(), Tally::default());
    }
    let mut oracle = OracleTally::default();
    let mut anomalies = Vec::new();
    for r in results {
        for v in &r.verdicts {
            tallies.entry(v.statement.name()).or_default().add(v);
        }
        oracle.factors_checked += r.oracle.factors_checked;
        oracle.factors_agree += r.oracle.factors_agree;
        oracle.tensors_checked += r.oracle.tensors_checked;
        oracle.tensors_within_upper += r.oracle.tensors_within_upper;
        oracle.tensors_reach_lower += r.oracle.tensors_reach_lower;
        oracle.skipped += r.oracle.skipped;
        anomalies.extend(r.anomalies);
    }
    if config.trials == 0 {
        tallies.clear();
    }
    Report {
        config: config.clone(),
        tallies,
        oracle,
        anomalies,
    }
}

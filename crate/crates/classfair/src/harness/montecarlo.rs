//! Monte-Carlo driver for randomized algorithms: repeated independent
//! replays with derived seeds, aggregated with exact arithmetic so the same
//! configuration and seed always reproduce the same report bit for bit.
//!
//! Ratio guarantees for randomized runs are judged on expectations, so the
//! headline numbers are ratios of means (`E[V_i] / E[V*_i(Y_j)]`); means of
//! per-trial ratios are reported alongside for transparency.

use num::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::algorithms::{
    build_guiding_plan, independent_selection_probability, run_equal_filling_ocs,
    selection_probability_target, EqualRanking, NO_CLASS,
};
use crate::frac::{format_ratio, one_minus_inv_e, to_f64, Frac};
use crate::harness::config::{
    derive_seed, trial_seed, AlgorithmId, AlgorithmSpec, HarnessError, SelectorId,
};
use crate::instance::Instance;
use crate::matching::Bundle;
use crate::replay::replay_online;
use crate::valuation::{class_value, optimistic_value, prop_share};

/// Mean and standard error of one sampled quantity, plus the exact rational
/// mean for reproducibility checks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleStat {
    pub mean: f64,
    pub se: f64,
    pub mean_exact: String,
}

/// Envy statistics for one ordered class pair `(envier, envied)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PairEnvyStat {
    pub envier: usize,
    pub envied: usize,
    /// Mean of `V*_envier(Y_envied)` over trials.
    pub bundle_value: SampleStat,
    /// `E[V_envier] / E[V*_envier(Y_envied)]`; absent when the denominator
    /// mean is zero (vacuous pair).
    pub ratio_of_means: Option<f64>,
    /// Mean of per-trial ratios, over trials with a positive denominator.
    pub mean_of_ratios: Option<f64>,
    /// Mean and standard error of the margin
    /// `V_envier - (1 - 1/e) * V*_envier(Y_envied)`.
    pub margin_mean: f64,
    pub margin_se: f64,
}

/// Proportionality statistics for one class against its exact uniform share.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassPropStat {
    pub class: usize,
    /// Exact share `|N_class likes among M| summed at 1/k`, as `p/q`.
    pub share: String,
    /// `E[V_class] / share`; absent when the share is zero.
    pub ratio_of_means: Option<f64>,
    /// Standard error of that ratio (`SE(V_class) / share`).
    pub ratio_se: f64,
}

/// Empirical match frequency of one agent, with the closed-form baseline
/// where one is available for the configured algorithm.
///
/// For the correlated-rounding algorithm the frequency counts lottery
/// selections, the quantity the closed forms describe; the non-wasteful
/// assembly of unselected items only adds matches on top.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AgentMatchStat {
    pub agent: usize,
    pub empirical: f64,
    pub se: f64,
    pub predicted: Option<f64>,
}

/// Aggregated statistics over independent trials of one algorithm on one
/// instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub algorithm: String,
    pub trials: usize,
    pub seed: u64,
    /// Per-class mean matched mass `V_i`.
    pub class_values: Vec<SampleStat>,
    /// Ordered pairs `i != j`.
    pub envy: Vec<PairEnvyStat>,
    pub prop: Vec<ClassPropStat>,
    /// `min_i E[V_i] / prop_i` over classes with a positive share.
    pub prop_alpha_ratio_of_means: Option<f64>,
    /// Mean over trials of `min_i V_i / prop_i`.
    pub prop_alpha_mean_of_ratios: Option<f64>,
    /// Standard error of that per-trial minimum ratio.
    pub prop_alpha_se: Option<f64>,
    pub agents: Vec<AgentMatchStat>,
    /// Total matched mass per trial.
    pub welfare: SampleStat,
    pub notes: Vec<String>,
}

/// Exact running sums for one scalar; addition is associative, so any
/// aggregation order yields the same result.
#[derive(Debug, Clone)]
struct ExactAccum {
    sum: Frac,
    sum_sq: Frac,
    n: usize,
}

impl ExactAccum {
    fn new() -> Self {
        ExactAccum { sum: Frac::zero(), sum_sq: Frac::zero(), n: 0 }
    }

    fn push(&mut self, x: &Frac) {
        self.sum += x;
        self.sum_sq += x * x;
        self.n += 1;
    }

    fn mean(&self) -> Frac {
        if self.n == 0 {
            return Frac::zero();
        }
        &self.sum / Frac::from_integer(self.n.into())
    }

    fn finish(&self) -> SampleStat {
        let mean_exact = self.mean();
        let se = if self.n >= 2 {
            let n = Frac::from_integer(self.n.into());
            let var = (&self.sum_sq - &self.sum * &self.sum / &n)
                / Frac::from_integer((self.n - 1).into());
            (to_f64(&var).max(0.0) / self.n as f64).sqrt()
        } else {
            0.0
        };
        SampleStat { mean: to_f64(&mean_exact), se, mean_exact: format_ratio(&mean_exact) }
    }
}

/// Everything measured in one trial.
struct TrialSample {
    /// `V_i` per class.
    class_values: Vec<Frac>,
    /// `V*_i(Y_j)` for ordered pairs, indexed `i * k + j`; diagonal unused.
    pair_values: Vec<Frac>,
    matched: Vec<bool>,
    welfare: Frac,
}

/// Runs `trials` independent replays of `spec` on `inst` and aggregates.
pub fn run_monte_carlo(
    spec: &AlgorithmSpec,
    inst: &Instance,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::BadConfig("trials must be at least 1".into()));
    }
    let k = inst.k();
    let n_agents = inst.n_agents();
    let shares: Vec<Frac> = (0..k).map(|i| prop_share(inst, i)).collect();
    let predicted = predicted_match_probabilities(spec, inst);

    let samples: Vec<TrialSample> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(spec, inst, trial_seed(seed, t)))
        .collect::<Result<_, _>>()?;

    // Sequential exact aggregation in trial order; sums are associative, so
    // this matches any parallel reduction of the same samples.
    let discount = one_minus_inv_e();
    let mut class_acc: Vec<ExactAccum> = (0..k).map(|_| ExactAccum::new()).collect();
    let mut pair_acc: Vec<ExactAccum> = (0..k * k).map(|_| ExactAccum::new()).collect();
    let mut margin_acc: Vec<ExactAccum> = (0..k * k).map(|_| ExactAccum::new()).collect();
    let mut ratio_sum: Vec<Frac> = vec![Frac::zero(); k * k];
    let mut ratio_n: Vec<usize> = vec![0; k * k];
    let mut matched_counts: Vec<usize> = vec![0; n_agents];
    let mut welfare_acc = ExactAccum::new();
    let mut prop_min_acc = ExactAccum::new();

    for sample in &samples {
        for (i, v) in sample.class_values.iter().enumerate() {
            class_acc[i].push(v);
        }
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let vstar = &sample.pair_values[i * k + j];
                pair_acc[i * k + j].push(vstar);
                let margin = &sample.class_values[i] - &discount * vstar;
                margin_acc[i * k + j].push(&margin);
                if !vstar.is_zero() {
                    ratio_sum[i * k + j] += &sample.class_values[i] / vstar;
                    ratio_n[i * k + j] += 1;
                }
            }
        }
        for (a, flag) in sample.matched.iter().enumerate() {
            if *flag {
                matched_counts[a] += 1;
            }
        }
        welfare_acc.push(&sample.welfare);
        let trial_min = (0..k)
            .filter(|i| !shares[*i].is_zero())
            .map(|i| &sample.class_values[i] / &shares[i])
            .min();
        if let Some(m) = trial_min {
            prop_min_acc.push(&m);
        }
    }

    let class_values: Vec<SampleStat> = class_acc.iter().map(ExactAccum::finish).collect();

    let mut envy = Vec::with_capacity(k * (k.saturating_sub(1)));
    for (i, class_acc_i) in class_acc.iter().enumerate() {
        for j in 0..k {
            if i == j {
                continue;
            }
            let idx = i * k + j;
            let bundle_value = pair_acc[idx].finish();
            let vstar_mean = pair_acc[idx].mean();
            let ratio_of_means = if vstar_mean.is_zero() {
                None
            } else {
                Some(to_f64(&(class_acc_i.mean() / vstar_mean)))
            };
            let mean_of_ratios = if ratio_n[idx] == 0 {
                None
            } else {
                Some(to_f64(&(&ratio_sum[idx] / Frac::from_integer(ratio_n[idx].into()))))
            };
            let margin = margin_acc[idx].finish();
            envy.push(PairEnvyStat {
                envier: i,
                envied: j,
                bundle_value,
                ratio_of_means,
                mean_of_ratios,
                margin_mean: margin.mean,
                margin_se: margin.se,
            });
        }
    }

    let mut prop = Vec::with_capacity(k);
    let mut prop_alpha_ratio_of_means: Option<f64> = None;
    for (i, share) in shares.iter().enumerate() {
        let stat = class_acc[i].finish();
        let (ratio_of_means, ratio_se) = if share.is_zero() {
            (None, 0.0)
        } else {
            let ratio = class_acc[i].mean() / share;
            let r = to_f64(&ratio);
            prop_alpha_ratio_of_means = Some(match prop_alpha_ratio_of_means {
                Some(best) if best <= r => best,
                _ => r,
            });
            (Some(r), stat.se / to_f64(share))
        };
        prop.push(ClassPropStat {
            class: i,
            share: format_ratio(share),
            ratio_of_means,
            ratio_se,
        });
    }
    let (prop_alpha_mean_of_ratios, prop_alpha_se) = if prop_min_acc.n == 0 {
        (None, None)
    } else {
        let stat = prop_min_acc.finish();
        (Some(stat.mean), Some(stat.se))
    };

    let agents = (0..n_agents)
        .map(|a| {
            let p = matched_counts[a] as f64 / trials as f64;
            let se = if trials >= 2 {
                // Bernoulli sample SE of the mean, with the n-1 correction.
                (p * (1.0 - p) * trials as f64 / (trials as f64 - 1.0) / trials as f64).sqrt()
            } else {
                0.0
            };
            AgentMatchStat { agent: a, empirical: p, se, predicted: predicted[a] }
        })
        .collect();

    Ok(MonteCarloReport {
        algorithm: spec.describe(),
        trials,
        seed,
        class_values,
        envy,
        prop,
        prop_alpha_ratio_of_means,
        prop_alpha_mean_of_ratios,
        prop_alpha_se,
        agents,
        welfare: welfare_acc.finish(),
        notes: Vec::new(),
    })
}

/// Closed-form per-agent match probabilities where the algorithm admits one:
/// `1 - prod(1 - x)` over guiding increments for independent rounding, and
/// the correlated selection target `p(x)` for the boosted selector.
fn predicted_match_probabilities(spec: &AlgorithmSpec, inst: &Instance) -> Vec<Option<f64>> {
    let n = inst.n_agents();
    if spec.id != AlgorithmId::EqualFillingOcs {
        return vec![None; n];
    }
    let plan = build_guiding_plan(inst);
    match spec.selector {
        // Guiding masses of an assigned item sum to one, so raw and
        // renormalized lotteries share the same closed form.
        SelectorId::Independent | SelectorId::IndependentRaw => (0..n)
            .map(|a| {
                Some(to_f64(&independent_selection_probability(&plan.agent_step_masses(a))))
            })
            .collect(),
        SelectorId::SemiOcs => plan
            .totals
            .iter()
            .map(|x| Some(selection_probability_target(to_f64(x).min(1.0))))
            .collect(),
    }
}

/// One independent replay; `Y_j` is the comparison bundle of class `j`:
/// the matched bundle in general, and the full lottery assignment (wasted
/// items included) for the ranking algorithm.
fn run_trial(spec: &AlgorithmSpec, inst: &Instance, seed: u64) -> Result<TrialSample, HarnessError> {
    let k = inst.k();
    match spec.id {
        AlgorithmId::EqualFillingOcs => {
            let plan = build_guiding_plan(inst);
            let mut selector = spec.selector.build(inst.n_agents(), derive_seed(seed, 2));
            let mut fallback = spec.ties.build(derive_seed(seed, 1));
            let outcome =
                run_equal_filling_ocs(inst, &plan, selector.as_mut(), &mut fallback)?;
            let matching = outcome.matching.to_fractional();
            let mut sample = sample_from_bundles(inst, &matching, matching.class_bundles(inst))?;
            sample.matched =
                outcome.trace.selection_counts.iter().map(|&c| c > 0).collect();
            Ok(sample)
        }
        AlgorithmId::EqualRanking => {
            let mut algo = EqualRanking::new(inst.offline().clone(), derive_seed(seed, 3));
            let log = replay_online(inst, &mut algo)?;
            let mut bundles: Vec<Bundle> =
                vec![vec![Frac::zero(); inst.n_items()]; k];
            for (item, class) in algo.class_assignments().iter().enumerate() {
                if *class != NO_CLASS {
                    bundles[*class][item] = Frac::one();
                }
            }
            sample_from_bundles(inst, &log.final_matching, bundles)
        }
        _ => {
            let mut algo = spec.build(inst.offline(), seed);
            let log = replay_online(inst, algo.as_mut())?;
            let bundles = log.final_matching.class_bundles(inst);
            sample_from_bundles(inst, &log.final_matching, bundles)
        }
    }
}

fn sample_from_bundles(
    inst: &Instance,
    matching: &crate::matching::FractionalMatching,
    bundles: Vec<Bundle>,
) -> Result<TrialSample, HarnessError> {
    let k = inst.k();
    let class_values: Vec<Frac> = (0..k).map(|i| class_value(matching, inst, i)).collect();
    let mut pair_values = vec![Frac::zero(); k * k];
    for i in 0..k {
        for (j, bundle) in bundles.iter().enumerate() {
            if i == j {
                continue;
            }
            pair_values[i * k + j] = optimistic_value(inst, i, bundle)?;
        }
    }
    let matched = (0..inst.n_agents()).map(|a| matching.agent_load(a).is_one()).collect();
    Ok(TrialSample { class_values, pair_values, matched, welfare: matching.total_mass() })
}

/// Flat CSV encoding of a report: `section,key,field,value` rows.
pub fn monte_carlo_to_csv(report: &MonteCarloReport) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "key", "field", "value"])?;
    let mut row = |section: &str, key: &str, field: &str, value: &str| {
        w.write_record([section, key, field, value])
    };
    row("meta", "algorithm", "", &report.algorithm)?;
    row("meta", "trials", "", &report.trials.to_string())?;
    row("meta", "seed", "", &report.seed.to_string())?;
    for (idx, stat) in report.class_values.iter().enumerate() {
        let key = idx.to_string();
        row("class", &key, "mean", &stat.mean.to_string())?;
        row("class", &key, "se", &stat.se.to_string())?;
        row("class", &key, "mean_exact", &stat.mean_exact)?;
    }
    for pair in &report.envy {
        let key = format!("{}->{}", pair.envier, pair.envied);
        row("envy", &key, "bundle_mean", &pair.bundle_value.mean.to_string())?;
        row("envy", &key, "bundle_se", &pair.bundle_value.se.to_string())?;
        row("envy", &key, "bundle_mean_exact", &pair.bundle_value.mean_exact)?;
        row("envy", &key, "ratio_of_means", &opt_to_string(pair.ratio_of_means))?;
        row("envy", &key, "mean_of_ratios", &opt_to_string(pair.mean_of_ratios))?;
        row("envy", &key, "margin_mean", &pair.margin_mean.to_string())?;
        row("envy", &key, "margin_se", &pair.margin_se.to_string())?;
    }
    for p in &report.prop {
        let key = p.class.to_string();
        row("prop", &key, "share", &p.share)?;
        row("prop", &key, "ratio_of_means", &opt_to_string(p.ratio_of_means))?;
        row("prop", &key, "ratio_se", &p.ratio_se.to_string())?;
    }
    row("prop_alpha", "ratio_of_means", "", &opt_to_string(report.prop_alpha_ratio_of_means))?;
    row("prop_alpha", "mean_of_ratios", "", &opt_to_string(report.prop_alpha_mean_of_ratios))?;
    row("prop_alpha", "se", "", &opt_to_string(report.prop_alpha_se))?;
    for a in &report.agents {
        let key = a.agent.to_string();
        row("agent", &key, "empirical", &a.empirical.to_string())?;
        row("agent", &key, "se", &a.se.to_string())?;
        row("agent", &key, "predicted", &opt_to_string(a.predicted))?;
    }
    row("welfare", "", "mean", &report.welfare.mean.to_string())?;
    row("welfare", "", "se", &report.welfare.se.to_string())?;
    row("welfare", "", "mean_exact", &report.welfare.mean_exact)?;
    for (idx, note) in report.notes.iter().enumerate() {
        row("note", &idx.to_string(), "", note)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::BadReport(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::BadReport(e.to_string()))
}

fn opt_to_string(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_f64(s: &str, what: &str) -> Result<f64, HarnessError> {
    s.parse().map_err(|_| HarnessError::BadReport(format!("bad {what} value `{s}`")))
}

fn parse_opt_f64(s: &str, what: &str) -> Result<Option<f64>, HarnessError> {
    if s.is_empty() { Ok(None) } else { parse_f64(s, what).map(Some) }
}

fn parse_index(s: &str, what: &str) -> Result<usize, HarnessError> {
    s.parse().map_err(|_| HarnessError::BadReport(format!("bad {what} index `{s}`")))
}

/// Parses the CSV emitted by [`monte_carlo_to_csv`] back into a report;
/// `parse(emit(x)) == x`.
pub fn monte_carlo_from_csv(text: &str) -> Result<MonteCarloReport, HarnessError> {
    let mut report = MonteCarloReport {
        algorithm: String::new(),
        trials: 0,
        seed: 0,
        class_values: Vec::new(),
        envy: Vec::new(),
        prop: Vec::new(),
        prop_alpha_ratio_of_means: None,
        prop_alpha_mean_of_ratios: None,
        prop_alpha_se: None,
        agents: Vec::new(),
        welfare: SampleStat::default(),
        notes: Vec::new(),
    };
    let mut classes: BTreeMap<usize, SampleStat> = BTreeMap::new();
    let mut envy: BTreeMap<(usize, usize), PairEnvyStat> = BTreeMap::new();
    let mut prop: BTreeMap<usize, ClassPropStat> = BTreeMap::new();
    let mut agents: BTreeMap<usize, AgentMatchStat> = BTreeMap::new();
    let mut notes: BTreeMap<usize, String> = BTreeMap::new();

    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for record in reader.records() {
        let record = record?;
        let section = record.get(0).unwrap_or_default();
        let key = record.get(1).unwrap_or_default().to_string();
        let field = record.get(2).unwrap_or_default();
        let value = record.get(3).unwrap_or_default().to_string();
        match section {
            "meta" => match key.as_str() {
                "algorithm" => report.algorithm = value,
                "trials" => report.trials = parse_index(&value, "trials")?,
                "seed" => {
                    report.seed = value
                        .parse()
                        .map_err(|_| HarnessError::BadReport(format!("bad seed `{value}`")))?
                }
                other => return Err(HarnessError::BadReport(format!("unknown meta key `{other}`"))),
            },
            "class" => {
                let idx = parse_index(&key, "class")?;
                let entry = classes.entry(idx).or_default();
                match field {
                    "mean" => entry.mean = parse_f64(&value, "mean")?,
                    "se" => entry.se = parse_f64(&value, "se")?,
                    "mean_exact" => entry.mean_exact = value,
                    other => {
                        return Err(HarnessError::BadReport(format!("unknown class field `{other}`")))
                    }
                }
            }
            "envy" => {
                let (i, j) = key
                    .split_once("->")
                    .ok_or_else(|| HarnessError::BadReport(format!("bad pair key `{key}`")))?;
                let i = parse_index(i, "envier")?;
                let j = parse_index(j, "envied")?;
                let entry = envy.entry((i, j)).or_insert_with(|| PairEnvyStat {
                    envier: i,
                    envied: j,
                    ..PairEnvyStat::default()
                });
                match field {
                    "bundle_mean" => entry.bundle_value.mean = parse_f64(&value, "bundle mean")?,
                    "bundle_se" => entry.bundle_value.se = parse_f64(&value, "bundle se")?,
                    "bundle_mean_exact" => entry.bundle_value.mean_exact = value,
                    "ratio_of_means" => entry.ratio_of_means = parse_opt_f64(&value, "ratio")?,
                    "mean_of_ratios" => entry.mean_of_ratios = parse_opt_f64(&value, "ratio")?,
                    "margin_mean" => entry.margin_mean = parse_f64(&value, "margin")?,
                    "margin_se" => entry.margin_se = parse_f64(&value, "margin se")?,
                    other => {
                        return Err(HarnessError::BadReport(format!("unknown envy field `{other}`")))
                    }
                }
            }
            "prop" => {
                let idx = parse_index(&key, "class")?;
                let entry = prop
                    .entry(idx)
                    .or_insert_with(|| ClassPropStat { class: idx, ..ClassPropStat::default() });
                match field {
                    "share" => entry.share = value,
                    "ratio_of_means" => entry.ratio_of_means = parse_opt_f64(&value, "ratio")?,
                    "ratio_se" => entry.ratio_se = parse_f64(&value, "ratio se")?,
                    other => {
                        return Err(HarnessError::BadReport(format!("unknown prop field `{other}`")))
                    }
                }
            }
            "prop_alpha" => match key.as_str() {
                "ratio_of_means" => {
                    report.prop_alpha_ratio_of_means = parse_opt_f64(&value, "alpha")?
                }
                "mean_of_ratios" => {
                    report.prop_alpha_mean_of_ratios = parse_opt_f64(&value, "alpha")?
                }
                "se" => report.prop_alpha_se = parse_opt_f64(&value, "alpha se")?,
                other => {
                    return Err(HarnessError::BadReport(format!("unknown alpha key `{other}`")))
                }
            },
            "agent" => {
                let idx = parse_index(&key, "agent")?;
                let entry = agents
                    .entry(idx)
                    .or_insert_with(|| AgentMatchStat { agent: idx, ..AgentMatchStat::default() });
                match field {
                    "empirical" => entry.empirical = parse_f64(&value, "empirical")?,
                    "se" => entry.se = parse_f64(&value, "se")?,
                    "predicted" => entry.predicted = parse_opt_f64(&value, "predicted")?,
                    other => {
                        return Err(HarnessError::BadReport(format!("unknown agent field `{other}`")))
                    }
                }
            }
            "welfare" => match field {
                "mean" => report.welfare.mean = parse_f64(&value, "welfare mean")?,
                "se" => report.welfare.se = parse_f64(&value, "welfare se")?,
                "mean_exact" => report.welfare.mean_exact = value,
                other => {
                    return Err(HarnessError::BadReport(format!("unknown welfare field `{other}`")))
                }
            },
            "note" => {
                let idx = parse_index(&key, "note")?;
                notes.insert(idx, value);
            }
            other => return Err(HarnessError::BadReport(format!("unknown section `{other}`"))),
        }
    }
    report.class_values = classes.into_values().collect();
    report.envy = envy.into_values().collect();
    report.prop = prop.into_values().collect();
    report.agents = agents.into_values().collect();
    report.notes = notes.into_values().collect();
    Ok(report)
}

//! Single-run driver: replay one algorithm over one instance and audit the
//! outcome.

use crate::adversary::make_adversary;
use crate::audit::{audit_full, AuditReport};
use crate::harness::config::{
    selection_from, AlgorithmSpec, AuditKind, HarnessError, InstanceSource, RunConfig,
};
use crate::instance::Instance;
use crate::matching::FractionalMatching;
use crate::replay::{replay_online, run_adaptive};

/// The outcome of one replay: the revealed instance, the final matching,
/// and its audit.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub algorithm: String,
    pub source: String,
    pub instance: Instance,
    pub matching: FractionalMatching,
    pub report: AuditReport,
    pub notes: Vec<String>,
}

/// Replays `spec` once over a fixed instance, then audits the result.
pub fn run_instance(
    spec: &AlgorithmSpec,
    inst: &Instance,
    seed: u64,
    kinds: &[AuditKind],
) -> Result<SingleRun, HarnessError> {
    let mut algo = spec.build(inst.offline(), seed);
    let log = replay_online(inst, algo.as_mut())?;
    let report = audit_matching(&log.final_matching, inst, kinds)?;
    Ok(SingleRun {
        algorithm: spec.describe(),
        source: String::new(),
        instance: inst.clone(),
        matching: log.final_matching,
        report,
        notes: Vec::new(),
    })
}

/// Drives `spec` against a registered adaptive adversary; the instance is
/// whatever the adversary revealed during the replay.
pub fn run_adversary(
    spec: &AlgorithmSpec,
    name: &str,
    seed: u64,
    kinds: &[AuditKind],
) -> Result<SingleRun, HarnessError> {
    let mut adversary =
        make_adversary(name).ok_or_else(|| HarnessError::UnknownAdversary(name.to_string()))?;
    let mut algo = spec.build(&adversary.offline(), seed);
    let run = run_adaptive(adversary.as_mut(), algo.as_mut())?;
    let report = audit_matching(&run.log.final_matching, &run.instance, kinds)?;
    Ok(SingleRun {
        algorithm: spec.describe(),
        source: format!("adversary:{name}"),
        instance: run.instance,
        matching: run.log.final_matching,
        report,
        notes: run.notes,
    })
}

/// Audits an arbitrary matching against an instance, validating shape first.
pub fn audit_matching(
    matching: &FractionalMatching,
    inst: &Instance,
    kinds: &[AuditKind],
) -> Result<AuditReport, HarnessError> {
    let sel = selection_from(kinds, matching, inst);
    Ok(audit_full(matching, inst, &sel)?)
}

/// Runs the configured algorithm once: over the first instance of a static
/// source, or against the adversary of an adaptive one.
pub fn run_once(config: &RunConfig) -> Result<SingleRun, HarnessError> {
    config.validate()?;
    if let InstanceSource::Adversary { name } = &config.source {
        return run_adversary(&config.algorithm, name, config.seed, &config.audits);
    }
    let instances = config.source.instances()?;
    let inst = instances
        .first()
        .ok_or_else(|| HarnessError::BadConfig("source yields no instances".into()))?;
    let mut run = run_instance(&config.algorithm, inst, config.seed, &config.audits)?;
    run.source = config.source.describe();
    Ok(run)
}

/// Replays the configured algorithm over every instance of the source.
pub fn sweep(config: &RunConfig) -> Result<Vec<SingleRun>, HarnessError> {
    config.validate()?;
    if config.source.is_adaptive() {
        return Ok(vec![run_once(config)?]);
    }
    let instances = config.source.instances()?;
    let mut runs = Vec::with_capacity(instances.len());
    for (idx, inst) in instances.iter().enumerate() {
        let mut run = run_instance(&config.algorithm, inst, config.seed, &config.audits)?;
        run.source = format!("{}#{idx}", config.source.describe());
        runs.push(run);
    }
    Ok(runs)
}

//! Run configuration: which algorithm, over which instances, audited how.
//!
//! A [`RunConfig`] can be built from CLI flags or loaded from a JSON file
//! with the same field names, so scripted and interactive runs share one
//! description format.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::adversary::{fixture, make_adversary, GeneratorBounds};
use crate::algorithms::{
    DiscardAll, EqualFilling, EqualFillingOcs, EqualRanking, Greedy, IndependentRounding,
    MatchAndShift, NonWastefulWrapper, SemiOcs, Selector, TieBreak, WrapMode,
};
use crate::audit::{AuditError, AuditSelection};
use crate::instance::{Instance, OfflineSide};
use crate::jsonio::{self, JsonError};
use crate::matching::FractionalMatching;
use crate::replay::{OnlineAlgorithm, ProtocolViolation};
use crate::valuation::ValuationError;

/// Everything that can go wrong while driving a configured run.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Protocol(#[from] ProtocolViolation),
    #[error(transparent)]
    Selector(#[from] crate::algorithms::SelectorContractViolation),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("unknown adversary `{0}`")]
    UnknownAdversary(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("malformed report text: {0}")]
    BadReport(String),
}

/// The online algorithms the harness can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    MatchAndShift,
    EqualFilling,
    EqualFillingOcs,
    EqualRanking,
    Greedy,
    DiscardAll,
}

impl AlgorithmId {
    pub fn label(self) -> &'static str {
        match self {
            AlgorithmId::MatchAndShift => "match-and-shift",
            AlgorithmId::EqualFilling => "equal-filling",
            AlgorithmId::EqualFillingOcs => "equal-filling-ocs",
            AlgorithmId::EqualRanking => "equal-ranking",
            AlgorithmId::Greedy => "greedy",
            AlgorithmId::DiscardAll => "discard-all",
        }
    }
}

/// Correlated selector used by the rounding stage of Equal-Filling-OCS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorId {
    /// Independent per-item lotteries over renormalized guiding masses.
    #[default]
    Independent,
    /// Independent lotteries over the raw (unrenormalized) guiding masses.
    IndependentRaw,
    /// Negatively correlated selector that boosts never-selected agents.
    SemiOcs,
}

impl SelectorId {
    pub fn label(self) -> &'static str {
        match self {
            SelectorId::Independent => "independent",
            SelectorId::IndependentRaw => "independent-raw",
            SelectorId::SemiOcs => "semi-ocs",
        }
    }

    pub fn build(self, n_agents: usize, seed: u64) -> Box<dyn Selector> {
        match self {
            SelectorId::Independent => Box::new(IndependentRounding::new(seed)),
            SelectorId::IndependentRaw => {
                Box::new(IndependentRounding::without_renormalization(seed))
            }
            SelectorId::SemiOcs => Box::new(SemiOcs::new(n_agents, seed)),
        }
    }
}

/// How candidate ties are broken where an algorithm leaves slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Lowest agent id wins.
    #[default]
    Lexicographic,
    /// Highest agent id wins; exercises worst-case tie behaviour.
    Adversarial,
    /// Seeded uniform choice.
    Seeded,
}

impl TiePolicy {
    pub fn build(self, seed: u64) -> TieBreak {
        match self {
            TiePolicy::Lexicographic => TieBreak::lexicographic(),
            TiePolicy::Adversarial => TieBreak::last_candidate(),
            TiePolicy::Seeded => TieBreak::seeded(seed),
        }
    }
}

/// Optional non-wasteful wrapper around the chosen algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WrapPolicy {
    #[default]
    None,
    /// Top up discarded items with a full unit on one idle neighbor.
    Indivisible,
    /// Spread leftover mass across idle neighbors' residual capacity.
    Divisible,
}

/// A fully described algorithm: id plus the knobs that matter for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub id: AlgorithmId,
    #[serde(default)]
    pub selector: SelectorId,
    #[serde(default)]
    pub ties: TiePolicy,
    #[serde(default)]
    pub wrap: WrapPolicy,
}

impl AlgorithmSpec {
    pub fn plain(id: AlgorithmId) -> Self {
        AlgorithmSpec {
            id,
            selector: SelectorId::default(),
            ties: TiePolicy::default(),
            wrap: WrapPolicy::default(),
        }
    }

    /// Human-readable label, e.g. `equal-filling-ocs(semi-ocs)`.
    pub fn describe(&self) -> String {
        let mut s = self.id.label().to_string();
        if self.id == AlgorithmId::EqualFillingOcs {
            s.push_str(&format!("({})", self.selector.label()));
        }
        if self.ties != TiePolicy::Lexicographic {
            s.push_str(&format!("[ties={}]", match self.ties {
                TiePolicy::Lexicographic => "lexicographic",
                TiePolicy::Adversarial => "adversarial",
                TiePolicy::Seeded => "seeded",
            }));
        }
        match self.wrap {
            WrapPolicy::None => {}
            WrapPolicy::Indivisible => s.push_str("+wrap"),
            WrapPolicy::Divisible => s.push_str("+wrap-divisible"),
        }
        s
    }

    /// Whether repeated runs with different seeds can produce different
    /// matchings.
    pub fn is_randomized(&self) -> bool {
        matches!(self.id, AlgorithmId::EqualFillingOcs | AlgorithmId::EqualRanking)
            || self.ties == TiePolicy::Seeded
    }

    /// Instantiates a fresh algorithm state for one replay.
    pub fn build(&self, offline: &OfflineSide, seed: u64) -> Box<dyn OnlineAlgorithm> {
        let n = offline.n_agents();
        let tie = self.ties.build(derive_seed(seed, 1));
        let inner: Box<dyn OnlineAlgorithm> = match self.id {
            AlgorithmId::MatchAndShift => Box::new(MatchAndShift::new(offline.clone(), tie)),
            AlgorithmId::EqualFilling => Box::new(EqualFilling::new(offline.clone())),
            AlgorithmId::EqualFillingOcs => {
                let selector = self.selector.build(n, derive_seed(seed, 2));
                Box::new(EqualFillingOcs::with_fallback(offline.clone(), selector, tie))
            }
            AlgorithmId::EqualRanking => {
                Box::new(EqualRanking::new(offline.clone(), derive_seed(seed, 3)))
            }
            AlgorithmId::Greedy => Box::new(Greedy::with_tie(n, tie)),
            AlgorithmId::DiscardAll => Box::new(DiscardAll),
        };
        match self.wrap {
            WrapPolicy::None => inner,
            WrapPolicy::Indivisible => {
                Box::new(NonWastefulWrapper::new(inner, WrapMode::Indivisible, n))
            }
            WrapPolicy::Divisible => {
                Box::new(NonWastefulWrapper::new(inner, WrapMode::Divisible, n))
            }
        }
    }
}

/// Individually selectable audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AuditKind {
    Cef,
    Cef1,
    Pef,
    Pef1,
    Cprop,
    CpropAllocated,
    Cmms,
    CmmsAllocated,
    Usw,
    Nw,
}

/// Turns an explicit audit list into a selection mask; an empty list means
/// "everything applicable to this matching and instance size".
pub fn selection_from(
    kinds: &[AuditKind],
    matching: &FractionalMatching,
    inst: &Instance,
) -> AuditSelection {
    if kinds.is_empty() {
        return AuditSelection::auto_for(matching, inst);
    }
    let mut sel = AuditSelection::none();
    for kind in kinds {
        match kind {
            AuditKind::Cef => sel.cef = true,
            AuditKind::Cef1 => sel.cef1 = true,
            AuditKind::Pef => sel.pef = true,
            AuditKind::Pef1 => sel.pef1 = true,
            AuditKind::Cprop => sel.cprop = true,
            AuditKind::CpropAllocated => sel.cprop_allocated = true,
            AuditKind::Cmms => sel.cmms = true,
            AuditKind::CmmsAllocated => sel.cmms_allocated = true,
            AuditKind::Usw => sel.usw = true,
            AuditKind::Nw => sel.nw = true,
        }
    }
    sel
}

/// Output encoding for emitted reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Where the instances of a run come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InstanceSource {
    /// A single instance loaded from a JSON file.
    File { path: PathBuf },
    /// A named built-in fixture.
    Fixture { name: String },
    /// A named adaptive adversary; the instance emerges from the replay.
    Adversary { name: String },
    /// A seeded batch of random instances.
    RandomSuite {
        seed: u64,
        count: usize,
        #[serde(default)]
        bounds: GeneratorBounds,
    },
}

impl InstanceSource {
    /// Materializes the static instances of this source. Adaptive sources
    /// have none ahead of time and yield an empty list.
    pub fn instances(&self) -> Result<Vec<Instance>, HarnessError> {
        match self {
            InstanceSource::File { path } => Ok(vec![jsonio::load_instance(path)?]),
            InstanceSource::Fixture { name } => {
                let fx = fixture(name).ok_or_else(|| HarnessError::UnknownFixture(name.clone()))?;
                Ok(vec![fx.instance])
            }
            InstanceSource::Adversary { name } => {
                if make_adversary(name).is_none() {
                    return Err(HarnessError::UnknownAdversary(name.clone()));
                }
                Ok(vec![])
            }
            InstanceSource::RandomSuite { seed, count, bounds } => {
                Ok(crate::adversary::random_suite(*seed, *count, bounds))
            }
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, InstanceSource::Adversary { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            InstanceSource::File { path } => format!("file:{}", path.display()),
            InstanceSource::Fixture { name } => format!("fixture:{name}"),
            InstanceSource::Adversary { name } => format!("adversary:{name}"),
            InstanceSource::RandomSuite { seed, count, .. } => {
                format!("random-suite:{count}@{seed:#x}")
            }
        }
    }
}

fn default_trials() -> usize {
    1
}

/// One complete run description; serializable so a JSON config file mirrors
/// the CLI flags exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: AlgorithmSpec,
    pub source: InstanceSource,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Empty means "choose automatically per matching".
    #[serde(default)]
    pub audits: Vec<AuditKind>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(algorithm: AlgorithmSpec, source: InstanceSource) -> Self {
        RunConfig {
            algorithm,
            source,
            trials: 1,
            seed: 0,
            audits: Vec::new(),
            output: None,
            format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::BadConfig("trials must be at least 1".into()));
        }
        if self.source.is_adaptive() && self.trials > 1 && !self.algorithm.is_randomized() {
            return Err(HarnessError::BadConfig(
                "repeated trials against an adaptive adversary need a randomized algorithm".into(),
            ));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text).map_err(JsonError::from)?;
        config.validate()?;
        Ok(config)
    }
}

/// Splitmix64 finalizer; the standard 64-bit mixer used to spread one seed
/// into independent streams.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `t` of a Monte-Carlo run: base seed XOR splitmix64(t).
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ splitmix64(trial as u64)
}

/// Role-salted sub-seed so tie-breaking, selector, and ranking lotteries
/// draw from distinct streams of one run seed.
pub fn derive_seed(seed: u64, role: u64) -> u64 {
    splitmix64(seed ^ role.wrapping_mul(0xA076_1D64_78BD_642F))
}

//! Online class-fair bipartite matching.
//!
//! Agents are partitioned into classes and sit on the offline side of a
//! bipartite graph; items arrive one at a time and must be irrevocably
//! assigned (fractionally or integrally) to liking agents, or discarded.
//! This crate provides:
//!
//! * exact-rational core types for instances and matchings ([`instance`],
//!   [`matching`]),
//! * an online replay protocol with adaptive adversaries ([`replay`]),
//! * optimistic/pessimistic bundle valuations and share computations backed
//!   by exact max-flow and an exact simplex oracle ([`valuation`],
//!   [`oracles`], [`maxflow`], [`simplex`]),
//! * fairness audits (class envy-freeness, proportionality, maximin shares,
//!   utilitarian welfare, non-wastefulness) with exact ratios ([`audit`]),
//! * the online algorithms under study ([`algorithms`]),
//! * hard instance families and random generators ([`adversary`]),
//! * a run/Monte-Carlo/reporting harness and CLI ([`harness`]).
//!
//! All fairness-relevant arithmetic is exact (`num::BigRational`); floating
//! point appears only in Monte-Carlo summary statistics.

pub mod frac;
pub mod instance;
pub mod matching;
pub mod replay;
pub mod jsonio;
pub mod maxflow;
pub mod simplex;
pub mod valuation;
pub mod oracles;
pub mod audit;
pub mod algorithms;
pub mod adversary;
pub mod harness;

pub use frac::Frac;
pub use instance::{Instance, OfflineSide};
pub use matching::{FractionalMatching, IntegralMatching};

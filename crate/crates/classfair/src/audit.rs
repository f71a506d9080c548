//! Fairness audits with exact ratios.
//!
//! Every audit reports raw numerator/denominator pairs plus an aggregated
//! `alpha` (the worst ratio); a zero denominator means the requirement is
//! vacuous for that entry and counts as infinitely satisfied.
//!
//! Notions:
//! * **class envy (optimistic)** — `ratio(i, j) = V_i / V*_i(Y_j)`: what
//!   class `i` got versus the best it could extract from class `j`'s bundle.
//! * **class envy up to one item** — denominator is the *best* single-item
//!   removal `min_o V*_i(Y_j - o)`; integral matchings only.
//! * **pessimistic envy / up to one item** — same shapes with the
//!   pessimistic valuation; integral matchings only.
//! * **class proportionality** — `V_i / prop_i`, whole-pool or restricted
//!   to fully allocated items.
//! * **class maximin share** — `V_i / mms_i`, same two pool choices.
//! * **utilitarian welfare** — total mass versus the offline maximum
//!   matching (ratio one when the optimum is zero).
//! * **non-wastefulness** — no liking pair with an unsaturated agent and an
//!   under-assigned item; reports the lexicographically first witness.

use crate::frac::{format_ratio, Frac};
use crate::instance::Instance;
use crate::matching::FractionalMatching;
use crate::valuation::{
    allocated_pool, class_value, mms_share, optimistic_value, optimistic_value_items,
    pessimistic_value, prop_share_for_pool, usw_opt, ValuationError,
};
use num::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("{notion} audit requires an integral matching")]
    RequiresIntegral { notion: &'static str },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// An exact guarantee ratio `num / den`; `den == 0` means the requirement
/// is vacuous (infinitely satisfied).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairRatio {
    pub num: Frac,
    pub den: Frac,
}

impl FairRatio {
    pub fn new(num: Frac, den: Frac) -> Self {
        FairRatio { num, den }
    }

    /// `None` when infinite.
    pub fn value(&self) -> Option<Frac> {
        if self.den.is_zero() {
            None
        } else {
            Some(&self.num / &self.den)
        }
    }

    pub fn to_alpha(&self) -> Alpha {
        match self.value() {
            Some(v) => Alpha::Finite(v),
            None => Alpha::Infinite,
        }
    }

    pub fn render(&self) -> String {
        match self.value() {
            Some(v) => format_ratio(&v),
            None => "inf".to_string(),
        }
    }
}

/// Worst-case guarantee level: a finite exact ratio or vacuously infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alpha {
    Finite(Frac),
    Infinite,
}

impl Alpha {
    pub fn at_least(&self, threshold: &Frac) -> bool {
        match self {
            Alpha::Infinite => true,
            Alpha::Finite(v) => v >= threshold,
        }
    }

    pub fn at_most(&self, threshold: &Frac) -> bool {
        match self {
            Alpha::Infinite => false,
            Alpha::Finite(v) => v <= threshold,
        }
    }

    pub fn min_with(self, other: Alpha) -> Alpha {
        match (self, other) {
            (Alpha::Infinite, b) => b,
            (a, Alpha::Infinite) => a,
            (Alpha::Finite(a), Alpha::Finite(b)) => Alpha::Finite(a.min(b)),
        }
    }

    pub fn finite(&self) -> Option<&Frac> {
        match self {
            Alpha::Finite(v) => Some(v),
            Alpha::Infinite => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Alpha::Finite(v) => format_ratio(v),
            Alpha::Infinite => "inf".to_string(),
        }
    }
}

/// A `k x k` table of envy ratios (`None` on the diagonal) with the worst
/// off-diagonal ratio aggregated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseAudit {
    pub ratios: Vec<Vec<Option<FairRatio>>>,
    pub alpha: Alpha,
}

impl PairwiseAudit {
    fn from_table(ratios: Vec<Vec<Option<FairRatio>>>) -> Self {
        let alpha = ratios
            .iter()
            .flatten()
            .flatten()
            .fold(Alpha::Infinite, |acc, r| acc.min_with(r.to_alpha()));
        PairwiseAudit { ratios, alpha }
    }

    pub fn ratio(&self, i: usize, j: usize) -> Option<&FairRatio> {
        self.ratios[i][j].as_ref()
    }
}

/// Per-class guarantee ratios with their worst value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAudit {
    pub ratios: Vec<FairRatio>,
    pub alpha: Alpha,
}

impl ClassAudit {
    fn from_ratios(ratios: Vec<FairRatio>) -> Self {
        let alpha =
            ratios.iter().fold(Alpha::Infinite, |acc, r| acc.min_with(r.to_alpha()));
        ClassAudit { ratios, alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UswAudit {
    pub achieved: Frac,
    pub optimum: u64,
    pub alpha: Frac,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NwAudit {
    pub non_wasteful: bool,
    /// Lexicographically first liking pair `(agent, item)` with an
    /// unsaturated agent and an under-assigned item, when wasteful.
    pub witness: Option<(usize, usize)>,
}

/// Which pool the share-based audits divide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolMode {
    /// All items that ever arrived.
    AllItems,
    /// Only items whose full unit of mass was assigned.
    Allocated,
}

fn class_values(m: &FractionalMatching, inst: &Instance) -> Vec<Frac> {
    (0..inst.k()).map(|i| class_value(m, inst, i)).collect()
}

/// Optimistic class envy over (possibly fractional) bundles.
pub fn audit_cef(m: &FractionalMatching, inst: &Instance) -> Result<PairwiseAudit, AuditError> {
    let k = inst.k();
    let values = class_values(m, inst);
    let bundles = m.class_bundles(inst);
    let mut table = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let den = optimistic_value(inst, i, &bundles[j]).map_err(AuditError::from)?;
            table[i][j] = Some(FairRatio::new(values[i].clone(), den));
        }
    }
    Ok(PairwiseAudit::from_table(table))
}

fn integral_class_sets(
    m: &FractionalMatching,
    inst: &Instance,
    notion: &'static str,
) -> Result<Vec<BTreeSet<usize>>, AuditError> {
    let integral = m.to_integral().ok_or(AuditError::RequiresIntegral { notion })?;
    Ok(integral
        .class_item_sets(inst)
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect())
}

/// Optimistic class envy up to one item (best single removal from the
/// envied bundle). Integral matchings only.
pub fn audit_cef1(m: &FractionalMatching, inst: &Instance) -> Result<PairwiseAudit, AuditError> {
    let sets = integral_class_sets(m, inst, "envy-up-to-one-item")?;
    let values = class_values(m, inst);
    let k = inst.k();
    let mut table = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let den = if sets[j].is_empty() {
                Frac::zero()
            } else {
                let mut best: Option<u64> = None;
                for &o in &sets[j] {
                    let mut reduced = sets[j].clone();
                    reduced.remove(&o);
                    let v = optimistic_value_items(inst, i, &reduced);
                    if best.is_none_or(|b| v < b) {
                        best = Some(v);
                    }
                }
                Frac::from_integer(best.unwrap().into())
            };
            table[i][j] = Some(FairRatio::new(values[i].clone(), den));
        }
    }
    Ok(PairwiseAudit::from_table(table))
}

/// Pessimistic class envy. Integral matchings only.
pub fn audit_pef(m: &FractionalMatching, inst: &Instance) -> Result<PairwiseAudit, AuditError> {
    let sets = integral_class_sets(m, inst, "pessimistic-envy")?;
    let values = class_values(m, inst);
    let k = inst.k();
    let mut table = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let den = pessimistic_value(inst, i, &sets[j])?;
            table[i][j] =
                Some(FairRatio::new(values[i].clone(), Frac::from_integer(den.into())));
        }
    }
    Ok(PairwiseAudit::from_table(table))
}

/// Pessimistic class envy up to one item. Integral matchings only.
pub fn audit_pef1(m: &FractionalMatching, inst: &Instance) -> Result<PairwiseAudit, AuditError> {
    let sets = integral_class_sets(m, inst, "pessimistic-envy-up-to-one-item")?;
    let values = class_values(m, inst);
    let k = inst.k();
    let mut table = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let den = if sets[j].is_empty() {
                Frac::zero()
            } else {
                let mut best: Option<u64> = None;
                for &o in &sets[j] {
                    let mut reduced = sets[j].clone();
                    reduced.remove(&o);
                    let v = pessimistic_value(inst, i, &reduced)?;
                    if best.is_none_or(|b| v < b) {
                        best = Some(v);
                    }
                }
                Frac::from_integer(best.unwrap().into())
            };
            table[i][j] = Some(FairRatio::new(values[i].clone(), den));
        }
    }
    Ok(PairwiseAudit::from_table(table))
}

fn pool_for(m: &FractionalMatching, inst: &Instance, mode: PoolMode) -> BTreeSet<usize> {
    match mode {
        PoolMode::AllItems => (0..inst.n_items()).collect(),
        PoolMode::Allocated => allocated_pool(m),
    }
}

/// Class proportionality: each class's value against its share of a uniform
/// `1/k` division of the pool.
pub fn audit_cprop(m: &FractionalMatching, inst: &Instance, mode: PoolMode) -> ClassAudit {
    let pool = pool_for(m, inst, mode);
    let values = class_values(m, inst);
    let ratios = (0..inst.k())
        .map(|i| FairRatio::new(values[i].clone(), prop_share_for_pool(inst, i, &pool)))
        .collect();
    ClassAudit::from_ratios(ratios)
}

/// Class maximin share: each class's value against its best worst-bundle
/// partition of the pool.
pub fn audit_cmms(
    m: &FractionalMatching,
    inst: &Instance,
    mode: PoolMode,
) -> Result<ClassAudit, AuditError> {
    let pool = pool_for(m, inst, mode);
    let values = class_values(m, inst);
    let mut ratios = Vec::with_capacity(inst.k());
    for (i, value) in values.iter().enumerate() {
        let share = mms_share(inst, i, &pool)?;
        ratios.push(FairRatio::new(value.clone(), Frac::from_integer(share.into())));
    }
    Ok(ClassAudit::from_ratios(ratios))
}

/// Utilitarian welfare against the offline maximum matching.
pub fn audit_usw(m: &FractionalMatching, inst: &Instance) -> UswAudit {
    let achieved = m.total_mass();
    let optimum = usw_opt(inst);
    let alpha = if optimum == 0 {
        Frac::one()
    } else {
        &achieved / Frac::from_integer(optimum.into())
    };
    UswAudit { achieved, optimum, alpha }
}

/// Non-wastefulness check with lexicographic witness.
pub fn audit_nw(m: &FractionalMatching, inst: &Instance) -> NwAudit {
    let one = Frac::one();
    for a in 0..inst.n_agents() {
        if *m.agent_load(a) < one {
            for &o in inst.agent_items(a) {
                if *m.item_load(o) < one {
                    return NwAudit { non_wasteful: false, witness: Some((a, o)) };
                }
            }
        }
    }
    NwAudit { non_wasteful: true, witness: None }
}

/// Which audits to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditSelection {
    pub cef: bool,
    pub cef1: bool,
    pub pef: bool,
    pub pef1: bool,
    pub cprop: bool,
    pub cprop_allocated: bool,
    pub cmms: bool,
    pub cmms_allocated: bool,
    pub usw: bool,
    pub nw: bool,
}

impl AuditSelection {
    pub fn none() -> Self {
        AuditSelection {
            cef: false,
            cef1: false,
            pef: false,
            pef1: false,
            cprop: false,
            cprop_allocated: false,
            cmms: false,
            cmms_allocated: false,
            usw: false,
            nw: false,
        }
    }

    /// Everything that is well-defined for `m`: the integral-only and
    /// search-heavy notions are enabled only when applicable/cheap enough.
    pub fn auto_for(m: &FractionalMatching, inst: &Instance) -> Self {
        let integral = m.is_integral();
        let pess_ok = inst
            .classes()
            .iter()
            .all(|c| c.len() + inst.n_items() <= crate::valuation::PESSIMISTIC_GUARD);
        AuditSelection {
            cef: true,
            cef1: integral,
            pef: integral && pess_ok,
            pef1: integral && pess_ok,
            cprop: true,
            cprop_allocated: true,
            cmms: true,
            cmms_allocated: true,
            usw: true,
            nw: true,
        }
    }
}

/// Bundle of all requested audits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub cef: Option<PairwiseAudit>,
    pub cef1: Option<PairwiseAudit>,
    pub pef: Option<PairwiseAudit>,
    pub pef1: Option<PairwiseAudit>,
    pub cprop: Option<ClassAudit>,
    pub cprop_allocated: Option<ClassAudit>,
    pub cmms: Option<ClassAudit>,
    pub cmms_allocated: Option<ClassAudit>,
    pub usw: Option<UswAudit>,
    pub nw: Option<NwAudit>,
}

impl Default for AuditSelection {
    fn default() -> Self {
        AuditSelection::none()
    }
}

/// Runs the selected audits; errors from individual notions propagate.
pub fn audit_full(
    m: &FractionalMatching,
    inst: &Instance,
    sel: &AuditSelection,
) -> Result<AuditReport, AuditError> {
    let mut report = AuditReport::default();
    if sel.cef {
        report.cef = Some(audit_cef(m, inst)?);
    }
    if sel.cef1 {
        report.cef1 = Some(audit_cef1(m, inst)?);
    }
    if sel.pef {
        report.pef = Some(audit_pef(m, inst)?);
    }
    if sel.pef1 {
        report.pef1 = Some(audit_pef1(m, inst)?);
    }
    if sel.cprop {
        report.cprop = Some(audit_cprop(m, inst, PoolMode::AllItems));
    }
    if sel.cprop_allocated {
        report.cprop_allocated = Some(audit_cprop(m, inst, PoolMode::Allocated));
    }
    if sel.cmms {
        report.cmms = Some(audit_cmms(m, inst, PoolMode::AllItems)?);
    }
    if sel.cmms_allocated {
        report.cmms_allocated = Some(audit_cmms(m, inst, PoolMode::Allocated)?);
    }
    if sel.usw {
        report.usw = Some(audit_usw(m, inst));
    }
    if sel.nw {
        report.nw = Some(audit_nw(m, inst));
    }
    Ok(report)
}

fn pairwise_json(p: &PairwiseAudit) -> Value {
    json!({
        "alpha": p.alpha.render(),
        "ratios": p
            .ratios
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r| match r {
                        None => Value::Null,
                        Some(r) => json!({
                            "num": format_ratio(&r.num),
                            "den": format_ratio(&r.den),
                            "value": r.render(),
                        }),
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    })
}

fn class_json(c: &ClassAudit) -> Value {
    json!({
        "alpha": c.alpha.render(),
        "ratios": c
            .ratios
            .iter()
            .map(|r| json!({
                "num": format_ratio(&r.num),
                "den": format_ratio(&r.den),
                "value": r.render(),
            }))
            .collect::<Vec<_>>(),
    })
}

impl AuditReport {
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        if let Some(p) = &self.cef {
            obj.insert("envyOptimistic".into(), pairwise_json(p));
        }
        if let Some(p) = &self.cef1 {
            obj.insert("envyOptimisticUpToOne".into(), pairwise_json(p));
        }
        if let Some(p) = &self.pef {
            obj.insert("envyPessimistic".into(), pairwise_json(p));
        }
        if let Some(p) = &self.pef1 {
            obj.insert("envyPessimisticUpToOne".into(), pairwise_json(p));
        }
        if let Some(c) = &self.cprop {
            obj.insert("proportionality".into(), class_json(c));
        }
        if let Some(c) = &self.cprop_allocated {
            obj.insert("proportionalityAllocated".into(), class_json(c));
        }
        if let Some(c) = &self.cmms {
            obj.insert("maximinShare".into(), class_json(c));
        }
        if let Some(c) = &self.cmms_allocated {
            obj.insert("maximinShareAllocated".into(), class_json(c));
        }
        if let Some(u) = &self.usw {
            obj.insert(
                "welfare".into(),
                json!({
                    "achieved": format_ratio(&u.achieved),
                    "optimum": u.optimum,
                    "alpha": format_ratio(&u.alpha),
                }),
            );
        }
        if let Some(nw) = &self.nw {
            obj.insert(
                "nonWasteful".into(),
                json!({
                    "holds": nw.non_wasteful,
                    "witness": nw.witness.map(|(a, o)| json!([a, o])),
                }),
            );
        }
        Value::Object(obj)
    }
}

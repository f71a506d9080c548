//! Flat CSV encoding of audit reports, mirroring the JSON emission keys;
//! `parse(emit(x)) == x` so emitted reports feed back into tooling.

use std::collections::BTreeMap;

use crate::audit::{Alpha, AuditReport, ClassAudit, FairRatio, NwAudit, PairwiseAudit, UswAudit};
use crate::frac::{format_ratio, parse_ratio, Frac};
use crate::harness::config::HarnessError;

const PAIRWISE_SECTIONS: [&str; 4] = [
    "envyOptimistic",
    "envyOptimisticUpToOne",
    "envyPessimistic",
    "envyPessimisticUpToOne",
];
const CLASS_SECTIONS: [&str; 4] = [
    "proportionality",
    "proportionalityAllocated",
    "maximinShare",
    "maximinShareAllocated",
];

fn alpha_to_string(alpha: &Alpha) -> String {
    match alpha {
        Alpha::Infinite => "inf".to_string(),
        Alpha::Finite(v) => format_ratio(v),
    }
}

fn alpha_from_string(s: &str) -> Result<Alpha, HarnessError> {
    if s == "inf" {
        return Ok(Alpha::Infinite);
    }
    Ok(Alpha::Finite(frac_from(s)?))
}

fn frac_from(s: &str) -> Result<Frac, HarnessError> {
    parse_ratio(s).map_err(|e| HarnessError::BadReport(format!("bad ratio `{s}`: {e}")))
}

fn ratio_cell(ratio: &Option<FairRatio>) -> String {
    match ratio {
        None => String::new(),
        Some(r) => format!("{} {}", format_ratio(&r.num), format_ratio(&r.den)),
    }
}

fn ratio_from_cell(s: &str) -> Result<Option<FairRatio>, HarnessError> {
    if s.is_empty() {
        return Ok(None);
    }
    let (num, den) = s
        .split_once(' ')
        .ok_or_else(|| HarnessError::BadReport(format!("bad ratio cell `{s}`")))?;
    Ok(Some(FairRatio { num: frac_from(num)?, den: frac_from(den)? }))
}

/// Emits an audit report as `section,key,field,value` rows.
pub fn audit_report_to_csv(report: &AuditReport) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "key", "field", "value"])?;

    let pairwise: [&Option<PairwiseAudit>; 4] =
        [&report.cef, &report.cef1, &report.pef, &report.pef1];
    for (section, audit) in PAIRWISE_SECTIONS.iter().copied().zip(pairwise) {
        let Some(audit) = audit else { continue };
        for (i, row) in audit.ratios.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let key = format!("{i}->{j}");
                let value = ratio_cell(cell);
                w.write_record([section, key.as_str(), "ratio", value.as_str()])?;
            }
        }
        let alpha = alpha_to_string(&audit.alpha);
        w.write_record([section, "alpha", "", alpha.as_str()])?;
    }

    let class_audits: [&Option<ClassAudit>; 4] = [
        &report.cprop,
        &report.cprop_allocated,
        &report.cmms,
        &report.cmms_allocated,
    ];
    for (section, audit) in CLASS_SECTIONS.iter().copied().zip(class_audits) {
        let Some(audit) = audit else { continue };
        for (i, ratio) in audit.ratios.iter().enumerate() {
            let key = i.to_string();
            let value = ratio_cell(&Some(ratio.clone()));
            w.write_record([section, key.as_str(), "ratio", value.as_str()])?;
        }
        let alpha = alpha_to_string(&audit.alpha);
        w.write_record([section, "alpha", "", alpha.as_str()])?;
    }

    if let Some(usw) = &report.usw {
        w.write_record(["welfare", "achieved", "", &format_ratio(&usw.achieved)])?;
        w.write_record(["welfare", "optimum", "", &usw.optimum.to_string()])?;
        w.write_record(["welfare", "alpha", "", &format_ratio(&usw.alpha)])?;
    }
    if let Some(nw) = &report.nw {
        w.write_record(["nonWasteful", "holds", "", &nw.non_wasteful.to_string()])?;
        let witness = match nw.witness {
            Some((a, o)) => format!("{a} {o}"),
            None => String::new(),
        };
        w.write_record(["nonWasteful", "witness", "", &witness])?;
    }

    let bytes = w.into_inner().map_err(|e| HarnessError::BadReport(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::BadReport(e.to_string()))
}

#[derive(Default)]
struct PairwiseBuilder {
    cells: BTreeMap<(usize, usize), Option<FairRatio>>,
    alpha: Option<Alpha>,
}

impl PairwiseBuilder {
    fn finish(self, section: &str) -> Result<PairwiseAudit, HarnessError> {
        let k = self.cells.keys().map(|(i, j)| i.max(j) + 1).max().unwrap_or(0);
        let mut ratios = vec![vec![None; k]; k];
        for ((i, j), cell) in self.cells {
            ratios[i][j] = cell;
        }
        let alpha = self.alpha.ok_or_else(|| {
            HarnessError::BadReport(format!("section `{section}` lacks an alpha row"))
        })?;
        Ok(PairwiseAudit { ratios, alpha })
    }
}

#[derive(Default)]
struct ClassBuilder {
    cells: BTreeMap<usize, FairRatio>,
    alpha: Option<Alpha>,
}

impl ClassBuilder {
    fn finish(self, section: &str) -> Result<ClassAudit, HarnessError> {
        let ratios = self.cells.into_values().collect();
        let alpha = self.alpha.ok_or_else(|| {
            HarnessError::BadReport(format!("section `{section}` lacks an alpha row"))
        })?;
        Ok(ClassAudit { ratios, alpha })
    }
}

/// Parses the CSV emitted by [`audit_report_to_csv`] back into a report.
pub fn audit_report_from_csv(text: &str) -> Result<AuditReport, HarnessError> {
    let mut pairwise: BTreeMap<usize, PairwiseBuilder> = BTreeMap::new();
    let mut class_audits: BTreeMap<usize, ClassBuilder> = BTreeMap::new();
    let mut welfare: BTreeMap<String, String> = BTreeMap::new();
    let mut nw_rows: BTreeMap<String, String> = BTreeMap::new();

    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for record in reader.records() {
        let record = record?;
        let section = record.get(0).unwrap_or_default().to_string();
        let key = record.get(1).unwrap_or_default().to_string();
        let value = record.get(3).unwrap_or_default().to_string();
        if let Some(idx) = PAIRWISE_SECTIONS.iter().position(|s| *s == section) {
            let builder = pairwise.entry(idx).or_default();
            if key == "alpha" {
                builder.alpha = Some(alpha_from_string(&value)?);
            } else {
                let (i, j) = key
                    .split_once("->")
                    .ok_or_else(|| HarnessError::BadReport(format!("bad pair key `{key}`")))?;
                let i = i.parse().map_err(|_| {
                    HarnessError::BadReport(format!("bad pair index `{key}`"))
                })?;
                let j = j.parse().map_err(|_| {
                    HarnessError::BadReport(format!("bad pair index `{key}`"))
                })?;
                builder.cells.insert((i, j), ratio_from_cell(&value)?);
            }
        } else if let Some(idx) = CLASS_SECTIONS.iter().position(|s| *s == section) {
            let builder = class_audits.entry(idx).or_default();
            if key == "alpha" {
                builder.alpha = Some(alpha_from_string(&value)?);
            } else {
                let i: usize = key.parse().map_err(|_| {
                    HarnessError::BadReport(format!("bad class index `{key}`"))
                })?;
                let ratio = ratio_from_cell(&value)?.ok_or_else(|| {
                    HarnessError::BadReport(format!("class row `{key}` lacks a ratio"))
                })?;
                builder.cells.insert(i, ratio);
            }
        } else if section == "welfare" {
            welfare.insert(key, value);
        } else if section == "nonWasteful" {
            nw_rows.insert(key, value);
        } else {
            return Err(HarnessError::BadReport(format!("unknown section `{section}`")));
        }
    }

    let mut take_pairwise = |idx: usize| -> Result<Option<PairwiseAudit>, HarnessError> {
        pairwise.remove(&idx).map(|b| b.finish(PAIRWISE_SECTIONS[idx])).transpose()
    };
    let cef = take_pairwise(0)?;
    let cef1 = take_pairwise(1)?;
    let pef = take_pairwise(2)?;
    let pef1 = take_pairwise(3)?;

    let mut take_class = |idx: usize| -> Result<Option<ClassAudit>, HarnessError> {
        class_audits.remove(&idx).map(|b| b.finish(CLASS_SECTIONS[idx])).transpose()
    };
    let cprop = take_class(0)?;
    let cprop_allocated = take_class(1)?;
    let cmms = take_class(2)?;
    let cmms_allocated = take_class(3)?;

    let usw = if welfare.is_empty() {
        None
    } else {
        let get = |field: &str| -> Result<String, HarnessError> {
            welfare
                .get(field)
                .cloned()
                .ok_or_else(|| HarnessError::BadReport(format!("welfare lacks `{field}`")))
        };
        Some(UswAudit {
            achieved: frac_from(&get("achieved")?)?,
            optimum: get("optimum")?
                .parse()
                .map_err(|_| HarnessError::BadReport("bad welfare optimum".into()))?,
            alpha: frac_from(&get("alpha")?)?,
        })
    };

    let nw = if nw_rows.is_empty() {
        None
    } else {
        let holds = nw_rows
            .get("holds")
            .ok_or_else(|| HarnessError::BadReport("nonWasteful lacks `holds`".into()))?;
        let witness_text = nw_rows
            .get("witness")
            .ok_or_else(|| HarnessError::BadReport("nonWasteful lacks `witness`".into()))?;
        let witness = if witness_text.is_empty() {
            None
        } else {
            let (a, o) = witness_text.split_once(' ').ok_or_else(|| {
                HarnessError::BadReport(format!("bad waste witness `{witness_text}`"))
            })?;
            Some((
                a.parse()
                    .map_err(|_| HarnessError::BadReport("bad witness agent".into()))?,
                o.parse()
                    .map_err(|_| HarnessError::BadReport("bad witness item".into()))?,
            ))
        };
        Some(NwAudit {
            non_wasteful: holds
                .parse()
                .map_err(|_| HarnessError::BadReport("bad nonWasteful flag".into()))?,
            witness,
        })
    };

    Ok(AuditReport {
        cef,
        cef1,
        pef,
        pef1,
        cprop,
        cprop_allocated,
        cmms,
        cmms_allocated,
        usw,
        nw,
    })
}

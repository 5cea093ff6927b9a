//! Seeded fuzz campaigns over the registry, with JSONL/JSON/CSV reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::record::{CheckRecord, Verdict};
use super::search::SearchBudget;
use super::workspace::Workspace;
use super::{check_instance, registry, unknown_checker, InequalityChecker, Severity, Template};
use crate::core_linalg::TolerancePolicy;
use crate::error::{LabError, Result};
use crate::generators::random::{derive_seed, rng_from};
use crate::generators::{gen_context, InstanceSpec};
use crate::semi_hilbert::SemiHilbertContext;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignPlan {
    pub checker_ids: Vec<String>,
    pub dims: Vec<usize>,
    pub instance_count: usize,
    pub seed: u64,
    pub slack_tol: f64,
    pub samples: usize,
    pub refine: usize,
    pub iterations: usize,
    /// worker threads; 0 uses the available parallelism
    pub threads: usize,
}

impl Default for CampaignPlan {
    fn default() -> Self {
        let b = SearchBudget::default();
        CampaignPlan {
            checker_ids: super::assert_checker_ids(),
            dims: vec![2, 3, 4, 5, 6],
            instance_count: 500,
            seed: 0,
            slack_tol: TolerancePolicy::default().slack_tol,
            samples: b.samples,
            refine: b.refine,
            iterations: b.iterations,
            threads: 0,
        }
    }
}

impl CampaignPlan {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget { samples: self.samples, refine: self.refine, iterations: self.iterations }
    }

    fn resolve(&self) -> Result<Vec<InequalityChecker>> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0) {
            return Err(LabError::InvalidInput("dims must be a non-empty list of positive sizes".into()));
        }
        if !(self.slack_tol >= 0.0) {
            return Err(LabError::InvalidInput("slack tolerance must be non-negative".into()));
        }
        let reg = registry();
        self.checker_ids
            .iter()
            .map(|id| reg.iter().find(|c| c.id == id).cloned().ok_or_else(|| unknown_checker(id)))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckerSummary {
    pub severity: Option<String>,
    /// distinct instance seeds
    pub instances: usize,
    pub records: usize,
    pub evaluated: usize,
    pub holds: usize,
    pub violations: usize,
    pub hypothesis_skipped: usize,
    pub degenerate: usize,
    pub min_rel_slack: Option<f64>,
    /// instance seed of the record attaining min_rel_slack
    pub worst_seed: Option<u64>,
    pub equality_cases: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct CampaignReport {
    pub records: Vec<CheckRecord>,
    pub summary: BTreeMap<String, CheckerSummary>,
}

/// Dimension and rank of the i-th instance, and its seed.
pub fn instance_shape(plan: &CampaignPlan, i: usize) -> (u64, usize, usize) {
    let seed = derive_seed(plan.seed, i as u64);
    let mut rng = rng_from(derive_seed(seed, 0xD1A6));
    let dim = plan.dims[rng.random_range(0..plan.dims.len())];
    let rank = rng.random_range(1..=dim);
    (seed, dim, rank)
}

fn run_instance(plan: &CampaignPlan, checkers: &[InequalityChecker], i: usize) -> Vec<CheckRecord> {
    let (seed, dim, rank) = instance_shape(plan, i);
    let budget = plan.budget();
    let ctx: Result<SemiHilbertContext> = gen_context(&InstanceSpec::new(dim, rank, &[], 1, seed));
    let mut out = Vec::new();
    let mut templates: Vec<Template> = Vec::new();
    for c in checkers {
        if !templates.contains(&c.template) {
            templates.push(c.template);
        }
    }
    let mut by_template: Vec<(usize, Vec<CheckRecord>)> = Vec::new();
    for tpl in templates {
        let group: Vec<(usize, &InequalityChecker)> =
            checkers.iter().enumerate().filter(|(_, c)| c.template == tpl).collect();
        let inst = ctx.as_ref().map_err(Clone::clone).and_then(|ctx| tpl.build(ctx, seed));
        match inst {
            Ok(inst) => {
                let ws = Workspace::new(&inst);
                for (k, c) in group {
                    let grid = c.params_for(seed);
                    by_template.push((k, check_instance(c, &ws, &grid, budget, plan.slack_tol)));
                }
            }
            Err(e) => {
                for (k, c) in group {
                    let recs = c
                        .params_for(seed)
                        .iter()
                        .map(|p| {
                            let mut pv = p.to_map();
                            pv.insert("error".into(), serde_json::json!(e.name()));
                            CheckRecord::unevaluated(c.id, seed, pv, Verdict::Degenerate)
                        })
                        .collect();
                    by_template.push((k, recs));
                }
            }
        }
    }
    // registry-list order within the instance
    by_template.sort_by_key(|(k, _)| *k);
    for (_, recs) in by_template {
        out.extend(recs);
    }
    out
}

/// Runs the plan. Records are ordered by instance, then checker, then parameter
/// index, whatever the thread count.
pub fn fuzz_campaign(plan: &CampaignPlan) -> Result<CampaignReport> {
    let checkers = plan.resolve()?;
    if checkers.is_empty() || plan.instance_count == 0 {
        return Ok(CampaignReport { records: Vec::new(), summary: summarize(&[], &checkers) });
    }
    let threads = if plan.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        plan.threads
    }
    .min(plan.instance_count);
    let slots: Vec<Mutex<Vec<CheckRecord>>> = (0..plan.instance_count).map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= plan.instance_count {
                    break;
                }
                let recs = run_instance(plan, &checkers, i);
                *slots[i].lock().expect("slot lock") = recs;
            });
        }
    });
    let records: Vec<CheckRecord> =
        slots.into_iter().flat_map(|m| m.into_inner().expect("slot lock")).collect();
    let summary = summarize(&records, &checkers);
    Ok(CampaignReport { records, summary })
}

/// Per-checker aggregates. Checkers given in `known` get an entry (and a severity)
/// even without records.
pub fn summarize(records: &[CheckRecord], known: &[InequalityChecker]) -> BTreeMap<String, CheckerSummary> {
    let mut out: BTreeMap<String, CheckerSummary> = BTreeMap::new();
    for c in known {
        out.entry(c.id.to_string()).or_default().severity = Some(severity_name(c.severity).to_string());
    }
    let reg = registry();
    let mut seen: BTreeSet<(&str, u64)> = BTreeSet::new();
    for r in records {
        let s = out.entry(r.checker_id.clone()).or_default();
        if seen.insert((&r.checker_id, r.instance_seed)) {
            s.instances += 1;
        }
        if s.severity.is_none() {
            s.severity = reg.iter().find(|c| c.id == r.checker_id).map(|c| severity_name(c.severity).to_string());
        }
        s.records += 1;
        match r.verdict {
            Verdict::Holds => s.holds += 1,
            Verdict::Violated => s.violations += 1,
            Verdict::HypothesisSkipped => s.hypothesis_skipped += 1,
            Verdict::Degenerate => s.degenerate += 1,
        }
        if r.is_evaluated() {
            s.evaluated += 1;
            if s.min_rel_slack.is_none_or(|m| r.relative_slack < m) {
                s.min_rel_slack = Some(r.relative_slack);
                s.worst_seed = Some(r.instance_seed);
            }
            if r.is_equality_case() && !s.equality_cases.contains(&r.instance_seed) {
                s.equality_cases.push(r.instance_seed);
            }
        }
    }
    for s in out.values_mut() {
        s.equality_cases.sort_unstable();
    }
    out
}

fn severity_name(s: Severity) -> &'static str {
    match s {
        Severity::Assert => "assert",
        Severity::Explore => "explore",
    }
}

/// Number of violated records among assert-severity checkers.
pub fn assert_violations(summary: &BTreeMap<String, CheckerSummary>) -> usize {
    summary.values().filter(|s| s.severity.as_deref() != Some("explore")).map(|s| s.violations).sum()
}

pub fn records_to_jsonl(records: &[CheckRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("record serializes"));
        s.push('\n');
    }
    s
}

pub fn records_from_jsonl(text: &str) -> Result<Vec<CheckRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| LabError::InvalidInput(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn summary_to_json(summary: &BTreeMap<String, CheckerSummary>) -> String {
    serde_json::to_string_pretty(summary).expect("summary serializes")
}

pub const CSV_HEADER: &str =
    "checker_id,severity,instances,records,evaluated,holds,violations,hypothesis_skipped,degenerate,min_rel_slack,worst_seed,equality_cases";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_to_csv(summary: &BTreeMap<String, CheckerSummary>) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (id, c) in summary {
        let eq: Vec<String> = c.equality_cases.iter().map(u64::to_string).collect();
        let _ = writeln!(
            s,
            "{id},{},{},{},{},{},{},{},{},{},{},{}",
            c.severity.as_deref().unwrap_or(""),
            c.instances,
            c.records,
            c.evaluated,
            c.holds,
            c.violations,
            c.hypothesis_skipped,
            c.degenerate,
            opt(c.min_rel_slack),
            opt(c.worst_seed),
            eq.join(";"),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(ids: &[&str], n: usize) -> CampaignPlan {
        CampaignPlan {
            checker_ids: ids.iter().map(|s| s.to_string()).collect(),
            instance_count: n,
            dims: vec![2, 3],
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn empty_checker_list_gives_empty_summary() {
        let r = fuzz_campaign(&small(&[], 3)).unwrap();
        assert!(r.records.is_empty());
        assert!(r.summary.is_empty());
    }

    #[test]
    fn unknown_id_is_rejected() {
        assert!(fuzz_campaign(&small(&["no_such_checker"], 1)).is_err());
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let mut p = small(&["eq43_quarter", "fund_half_norm", "chain_468"], 6);
        p.threads = 1;
        let a = records_to_jsonl(&fuzz_campaign(&p).unwrap().records);
        p.threads = 3;
        let b = records_to_jsonl(&fuzz_campaign(&p).unwrap().records);
        assert_eq!(a, b);
    }

    #[test]
    fn jsonl_round_trip() {
        let r = fuzz_campaign(&small(&["eq42_sixteenth"], 2)).unwrap();
        let text = records_to_jsonl(&r.records);
        assert_eq!(records_from_jsonl(&text).unwrap(), r.records);
    }

    #[test]
    fn csv_has_one_row_per_checker() {
        let r = fuzz_campaign(&small(&["eq42_sixteenth", "eq43_quarter"], 2)).unwrap();
        let csv = summary_to_csv(&r.summary);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with(CSV_HEADER));
    }
}

//! Benchmark suites: run categorized queries per strategy, judge the final
//! scenes against oracles and aggregate success rate and latency.
//!
//! For a group of `M` cases (N scenes × k variations), the success rate is
//! `S = Σχᵢ / M` with `χᵢ ∈ {0, 1}` and the mean latency is `T = Σtᵢ / M`,
//! where `tᵢ` covers every attempt including retries.

mod case;
mod judge;
mod report;

pub use case::{Category, OracleCheck, QueryCase, Suite};
pub use judge::{check_passes, horizontal_gap, judge, CONTACT_SLACK};
pub use report::{render_svg, render_table, Chart};

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::llm::{LlmTransport, MockRule, MockScript, MockTiming, MockTransport, StrategyKind};
use crate::pipeline::{execute_edit, EditConfig, EditError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid scene {path}: {message}")]
    Scene { path: PathBuf, message: String },
    #[error("case `{id}`: {message}")]
    Case { id: String, message: String },
    #[error("{strategy}/{category}: {m} cases do not form {n} scenes x {k} variations")]
    Inconsistent {
        strategy: StrategyKind,
        category: &'static str,
        m: usize,
        n: usize,
        k: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub strategy: StrategyKind,
    pub category: Category,
    pub scene: String,
    pub variation: u32,
    pub passed: bool,
    pub latency_s: f64,
    pub retries: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub strategy: StrategyKind,
    pub category: Category,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub success_rate: f64,
    pub success_std: f64,
    pub mean_latency_s: f64,
    pub latency_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallStats {
    pub strategy: StrategyKind,
    pub m: usize,
    pub success_rate: f64,
    pub mean_latency_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub groups: Vec<GroupStats>,
    pub overall: Vec<OverallStats>,
    pub records: Vec<CaseRecord>,
}

impl BenchReport {
    pub fn group(&self, strategy: StrategyKind, category: Category) -> Option<&GroupStats> {
        self.groups
            .iter()
            .find(|g| g.strategy == strategy && g.category == category)
    }

    pub fn overall(&self, strategy: StrategyKind) -> Option<&OverallStats> {
        self.overall.iter().find(|o| o.strategy == strategy)
    }
}

/// Where replies come from during a run.
pub enum BenchTransport<'a> {
    /// Each case's own script for the strategy.
    Mock { timing: MockTiming },
    Shared(&'a dyn LlmTransport),
}

fn mock_for(case: &QueryCase, strategy: StrategyKind, timing: MockTiming) -> Result<MockTransport, FixtureError> {
    let rule = case.mock.get(&strategy).ok_or_else(|| FixtureError::Case {
        id: case.id.clone(),
        message: format!("no mock script for strategy {strategy}"),
    })?;
    Ok(MockTransport::new(MockScript {
        timing,
        rules: vec![MockRule {
            query: None,
            strategy: None,
            ..rule.clone()
        }],
    }))
}

/// Runs one case under one strategy.
pub fn run_case(
    suite: &Suite,
    case: &QueryCase,
    strategy: StrategyKind,
    transport: &BenchTransport<'_>,
    cfg: &EditConfig,
) -> Result<CaseRecord, FixtureError> {
    let scene = suite.scenes.get(&case.scene).ok_or_else(|| FixtureError::Case {
        id: case.id.clone(),
        message: format!("unknown scene `{}`", case.scene),
    })?;
    let owned;
    let transport: &dyn LlmTransport = match transport {
        BenchTransport::Mock { timing } => {
            owned = mock_for(case, strategy, *timing)?;
            &owned
        }
        BenchTransport::Shared(t) => *t,
    };
    let outcome = execute_edit(scene, &case.query, strategy, transport, cfg);
    let mut record = CaseRecord {
        case_id: case.id.clone(),
        strategy,
        category: case.category,
        scene: case.scene.clone(),
        variation: case.variation,
        passed: false,
        latency_s: 0.0,
        retries: 0,
        error: None,
    };
    match outcome {
        Ok((edited, plan)) => {
            record.passed = judge(case, &edited, plan.buffer);
            record.latency_s = plan.latency_s;
            record.retries = plan.retries;
        }
        Err(e) => {
            record.latency_s = e.latency_s().unwrap_or(0.0);
            if let EditError::Completion(crate::llm::CompletionError::ExhaustedRetries { attempts, .. }) = &e {
                record.retries = attempts.saturating_sub(1);
            }
            record.error = Some(format!("{}: {e}", e.code()));
        }
    }
    Ok(record)
}

pub fn run_suite(
    suite: &Suite,
    strategies: &[StrategyKind],
    transport: &BenchTransport<'_>,
    cfg: &EditConfig,
) -> Result<BenchReport, FixtureError> {
    suite.validate()?;
    let mut records = Vec::with_capacity(suite.cases.len() * strategies.len());
    for &strategy in strategies {
        for case in &suite.cases {
            let record = run_case(suite, case, strategy, transport, cfg)?;
            tracing::info!(case = %record.case_id, %strategy, passed = record.passed, "bench case");
            records.push(record);
        }
    }
    aggregate(records)
}

/// Order-independent sum: adds the values in ascending order.
fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = stable_sum(values.iter().copied()) / m;
    let var = stable_sum(values.iter().map(|x| (x - mean).powi(2))) / m;
    (mean, var.sqrt())
}

/// Folds per-case records into group and overall metrics.
pub fn aggregate(records: Vec<CaseRecord>) -> Result<BenchReport, FixtureError> {
    let mut buckets: BTreeMap<(StrategyKind, Category), Vec<&CaseRecord>> = BTreeMap::new();
    for r in &records {
        buckets.entry((r.strategy, r.category)).or_default().push(r);
    }
    let mut groups = Vec::with_capacity(buckets.len());
    for ((strategy, category), rs) in &buckets {
        let m = rs.len();
        let scenes: BTreeSet<&str> = rs.iter().map(|r| r.scene.as_str()).collect();
        let variations: BTreeSet<u32> = rs.iter().map(|r| r.variation).collect();
        let pairs: BTreeSet<(&str, u32)> = rs.iter().map(|r| (r.scene.as_str(), r.variation)).collect();
        let (n, k) = (scenes.len(), variations.len());
        if m != n * k || pairs.len() != m {
            return Err(FixtureError::Inconsistent {
                strategy: *strategy,
                category: category.label(),
                m,
                n,
                k,
            });
        }
        let chi: Vec<f64> = rs.iter().map(|r| if r.passed { 1.0 } else { 0.0 }).collect();
        let t: Vec<f64> = rs.iter().map(|r| r.latency_s).collect();
        let passes = rs.iter().filter(|r| r.passed).count();
        let (_, success_std) = mean_std(&chi);
        let (_, latency_std) = mean_std(&t);
        groups.push(GroupStats {
            strategy: *strategy,
            category: *category,
            m,
            n,
            k,
            success_rate: passes as f64 / m as f64,
            success_std,
            mean_latency_s: stable_sum(t.iter().copied()) / m as f64,
            latency_std,
        });
    }
    let strategies: BTreeSet<StrategyKind> = records.iter().map(|r| r.strategy).collect();
    let overall = strategies
        .into_iter()
        .map(|strategy| {
            let rs: Vec<&CaseRecord> = records.iter().filter(|r| r.strategy == strategy).collect();
            let m = rs.len();
            OverallStats {
                strategy,
                m,
                success_rate: rs.iter().filter(|r| r.passed).count() as f64 / m as f64,
                mean_latency_s: stable_sum(rs.iter().map(|r| r.latency_s)) / m as f64,
            }
        })
        .collect();
    Ok(BenchReport {
        groups,
        overall,
        records,
    })
}

//! Evaluation results and their JSON form.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::injector::MutantSource;

pub const SCHEMA_VERSION: u32 = 1;

/// A statistic that may be undefined for degenerate input. Serialized as a
/// number or the string `"undefined"`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Stat(pub Option<f64>);

impl Stat {
    pub const UNDEFINED: Stat = Stat(None);

    pub fn value(self) -> Option<f64> {
        self.0
    }
}

impl<E> From<Result<f64, E>> for Stat {
    fn from(r: Result<f64, E>) -> Stat {
        Stat(r.ok())
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v:.3}"),
            None => f.write_str("undefined"),
        }
    }
}

impl Serialize for Stat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for Stat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Stat, D::Error> {
        struct StatVisitor;
        impl Visitor<'_> for StatVisitor {
            type Value = Stat;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"undefined\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Stat, E> {
                Ok(Stat(Some(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Stat, E> {
                Ok(Stat(Some(v as f64)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Stat, E> {
                Ok(Stat(Some(v as f64)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Stat, E> {
                if v == "undefined" {
                    Ok(Stat(None))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(StatVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutantScore {
    pub mutant_id: String,
    pub ochiai: f64,
    pub killed: bool,
    pub coupled: bool,
}

/// How well mutant detection tracks fault detection over sampled suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteMetrics {
    /// One per sampled suite, in sample order.
    pub detection_ratios: Vec<f64>,
    pub kendall_tau_b: Stat,
    pub pearson_r: Stat,
    /// Rank-sum p-value, fault-detecting suites against the rest.
    pub rank_sum_p: Stat,
    pub a12: Stat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetMetrics {
    pub n_mutants: usize,
    pub killed: usize,
    pub coupled: usize,
    pub best_ochiai: f64,
    pub any_coupled: bool,
    pub mutants: Vec<MutantScore>,
    pub suites: SuiteMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub sample_id: usize,
    pub size: usize,
    pub detects_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetInfo {
    pub project: String,
    pub report_id: String,
    /// Tests that pass on the original program.
    pub tests: usize,
    pub failing_tests: Vec<String>,
    pub samples: Vec<SampleInfo>,
}

pub type SourceMetrics = BTreeMap<MutantSource, BTreeMap<usize, BudgetMetrics>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub targets: usize,
    pub median_best_ochiai: Stat,
    pub coupled_targets: usize,
    pub coupled_fraction: Stat,
}

/// Cross-target comparison of the two mutant sources at one budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetComparison {
    pub budget: usize,
    pub sources: BTreeMap<MutantSource, SourceSummary>,
    /// Targets evaluated under both sources.
    pub paired_targets: usize,
    pub best_ochiai_paired_p: Stat,
    pub best_ochiai_rank_sum_p: Stat,
    /// Â12 of ibir best similarity over baseline best similarity.
    pub best_ochiai_a12: Stat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub seed: u64,
    pub budgets: Vec<usize>,
    pub faults: BTreeMap<String, SourceMetrics>,
    pub targets: BTreeMap<String, TargetInfo>,
    pub comparisons: Vec<BudgetComparison>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<EvaluationReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Best similarity per target for one source and budget, in fault order.
    pub fn best_ochiai(&self, source: MutantSource, budget: usize) -> Vec<(String, f64)> {
        self.faults
            .iter()
            .filter_map(|(f, s)| s.get(&source)?.get(&budget).map(|m| (f.clone(), m.best_ochiai)))
            .collect()
    }

    pub fn comparison(&self, budget: usize) -> Option<&BudgetComparison> {
        self.comparisons.iter().find(|c| c.budget == budget)
    }
}

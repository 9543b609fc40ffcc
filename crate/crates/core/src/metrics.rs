//! Corpus-level scores over task outcomes.
//!
//! All values are exact rationals; rounding happens only when rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use crate::executors::speedup;
use crate::orchestrator::TaskOutcome;
use crate::rational::{self, to_decimal, to_short_decimal};

/// Bumped only for incompatible changes to the machine report.
pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_UP_LIMIT: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no outcomes to score")]
    Empty,
    #[error("{case}: attempts_used {attempts} is outside 1..={up_limit}")]
    AttemptsOutOfRange { case: String, attempts: u32, up_limit: u32 },
    #[error("malformed report: {0}")]
    Parse(String),
}

/// The part of an outcome the metrics look at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case_id: String,
    pub passed: bool,
    pub attempts_used: u32,
    #[serde(with = "rational::option", default)]
    pub speedup: Option<Ratio<u64>>,
}

impl From<&TaskOutcome> for CaseSummary {
    fn from(o: &TaskOutcome) -> Self {
        CaseSummary {
            case_id: o.case_id.clone(),
            passed: o.passed,
            attempts_used: o.attempts_used,
            speedup: o.final_speedup,
        }
    }
}

/// Percentage of passing cases.
pub fn pass_rate(cases: &[CaseSummary]) -> Result<Ratio<u64>, MetricsError> {
    if cases.is_empty() {
        return Err(MetricsError::Empty);
    }
    let passed = cases.iter().filter(|c| c.passed).count() as u64;
    Ok(Ratio::new(100 * passed, cases.len() as u64))
}

/// Sum of `(1 + up_limit - attempts) / up_limit` over the scored cases.
///
/// Failed cases are skipped unless `include_failed`, in which case they
/// score as if they had used the whole budget.
pub fn efficiency_score(cases: &[CaseSummary], up_limit: u32, include_failed: bool) -> Result<Ratio<u64>, MetricsError> {
    if cases.is_empty() {
        return Err(MetricsError::Empty);
    }
    let up = u64::from(up_limit);
    let mut total = Ratio::from_integer(0);
    for c in cases {
        let attempts = match (c.passed, include_failed) {
            (true, _) => c.attempts_used,
            (false, true) => up_limit,
            (false, false) => continue,
        };
        if attempts == 0 || attempts > up_limit {
            return Err(MetricsError::AttemptsOutOfRange { case: c.case_id.clone(), attempts, up_limit });
        }
        total += Ratio::new(1 + up - u64::from(attempts), up);
    }
    Ok(total)
}

/// Mean attempts over passing cases; `None` when nothing passed.
pub fn avg_attempts(cases: &[CaseSummary]) -> Option<Ratio<u64>> {
    let (n, sum) = cases
        .iter()
        .filter(|c| c.passed)
        .fold((0u64, 0u64), |(n, s), c| (n + 1, s + u64::from(c.attempts_used)));
    (n > 0).then(|| Ratio::new(sum, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bucket {
    /// below 0.5x
    MuchSlower,
    /// [0.5, 0.9)
    Slower,
    /// [0.9, 1.1]
    Parity,
    /// (1.1, 2.0]
    Faster,
    /// above 2.0x
    MuchFaster,
}

impl Bucket {
    pub const ALL: [Bucket; 5] = [Bucket::MuchSlower, Bucket::Slower, Bucket::Parity, Bucket::Faster, Bucket::MuchFaster];

    pub fn of(s: Ratio<u64>) -> Bucket {
        let r = |n, d| Ratio::new(n, d);
        if s < r(1, 2) {
            Bucket::MuchSlower
        } else if s < r(9, 10) {
            Bucket::Slower
        } else if s <= r(11, 10) {
            Bucket::Parity
        } else if s <= r(2, 1) {
            Bucket::Faster
        } else {
            Bucket::MuchFaster
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bucket::MuchSlower => "<0.5x",
            Bucket::Slower => "0.5-0.9x",
            Bucket::Parity => "0.9-1.1x",
            Bucket::Faster => "1.1-2.0x",
            Bucket::MuchFaster => ">2.0x",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeedupBuckets {
    pub below_0_5: u32,
    pub from_0_5_to_0_9: u32,
    pub from_0_9_to_1_1: u32,
    pub from_1_1_to_2_0: u32,
    pub above_2_0: u32,
}

impl SpeedupBuckets {
    fn slot(&mut self, b: Bucket) -> &mut u32 {
        match b {
            Bucket::MuchSlower => &mut self.below_0_5,
            Bucket::Slower => &mut self.from_0_5_to_0_9,
            Bucket::Parity => &mut self.from_0_9_to_1_1,
            Bucket::Faster => &mut self.from_1_1_to_2_0,
            Bucket::MuchFaster => &mut self.above_2_0,
        }
    }

    pub fn count(&self, b: Bucket) -> u32 {
        let mut copy = *self;
        *copy.slot(b)
    }

    pub fn total(&self) -> u32 {
        Bucket::ALL.iter().map(|&b| self.count(b)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub format_version: u32,
    pub n_total: u32,
    pub n_passed: u32,
    /// Percentage.
    #[serde(with = "rational")]
    pub pass_rate: Ratio<u64>,
    #[serde(with = "rational")]
    pub efficiency_score: Ratio<u64>,
    #[serde(with = "rational::option", default)]
    pub avg_attempts: Option<Ratio<u64>>,
    pub up_limit: u32,
    pub include_failed: bool,
    #[serde(with = "rational::map")]
    pub speedups: BTreeMap<String, Ratio<u64>>,
    pub speedup_buckets: SpeedupBuckets,
    pub cases: Vec<CaseSummary>,
}

impl MetricsReport {
    /// Cases are reported sorted by id so the report ignores input order.
    pub fn compute(cases: &[CaseSummary], up_limit: u32, include_failed: bool) -> Result<Self, MetricsError> {
        let mut sorted = cases.to_vec();
        sorted.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let speedups: BTreeMap<String, Ratio<u64>> =
            sorted.iter().filter(|c| c.passed).filter_map(|c| Some((c.case_id.clone(), c.speedup?))).collect();
        let mut buckets = SpeedupBuckets::default();
        for s in speedups.values() {
            *buckets.slot(Bucket::of(*s)) += 1;
        }
        Ok(MetricsReport {
            format_version: REPORT_FORMAT_VERSION,
            n_total: sorted.len() as u32,
            n_passed: sorted.iter().filter(|c| c.passed).count() as u32,
            pass_rate: pass_rate(&sorted)?,
            efficiency_score: efficiency_score(&sorted, up_limit, include_failed)?,
            avg_attempts: avg_attempts(&sorted),
            up_limit,
            include_failed,
            speedups,
            speedup_buckets: buckets,
            cases: sorted,
        })
    }

    pub fn from_outcomes(outcomes: &[TaskOutcome], up_limit: u32, include_failed: bool) -> Result<Self, MetricsError> {
        let cases: Vec<CaseSummary> = outcomes.iter().map(CaseSummary::from).collect();
        Self::compute(&cases, up_limit, include_failed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    TextTable,
    Machine,
}

pub fn emit_report(report: &MetricsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Machine => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        ReportFormat::TextTable => text_table(report),
    }
}

pub fn parse_machine_report(text: &str) -> Result<MetricsReport, MetricsError> {
    serde_json::from_str(text).map_err(|e| MetricsError::Parse(e.to_string()))
}

fn text_table(r: &MetricsReport) -> String {
    let id_width = r.cases.iter().map(|c| c.case_id.len()).max().unwrap_or(0).max(4);
    let mut out = String::new();
    let _ = writeln!(out, "{:<id_width$}  {:<6}  {:>8}  {:>8}", "case", "result", "attempts", "speedup");
    for c in &r.cases {
        let speedup = match (c.passed, c.speedup) {
            (true, Some(s)) => format!("{}x", to_decimal(&s, 2)),
            _ => "-".to_string(),
        };
        let result = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{:<id_width$}  {result:<6}  {:>8}  {speedup:>8}", c.case_id, c.attempts_used);
    }
    let avg = r.avg_attempts.map(|a| to_decimal(&a, 2)).unwrap_or_else(|| "-".into());
    let _ = writeln!(
        out,
        "\npass rate {}% ({}/{})  avg iterations {avg}  efficiency score {} (up limit {}, failed cases {})",
        to_decimal(&r.pass_rate, 1),
        r.n_passed,
        r.n_total,
        to_decimal(&r.efficiency_score, 1),
        r.up_limit,
        if r.include_failed { "included" } else { "excluded" },
    );
    let _ = writeln!(out, "speedups:");
    for b in Bucket::ALL {
        let _ = writeln!(out, "  {:<9} {}", b.label(), r.speedup_buckets.count(b));
    }
    if let Some((id, best)) = r.speedups.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
        let _ = writeln!(out, "max speedup {}x ({id})", to_short_decimal(best, 2));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(id: usize, passed: bool, attempts: u32, speedup: Option<(u64, u64)>) -> CaseSummary {
        CaseSummary {
            case_id: format!("c{id:02}"),
            passed,
            attempts_used: attempts,
            speedup: speedup.map(|(n, d)| Ratio::new(n, d)),
        }
    }

    /// 34 passing cases whose attempts sum to 65.
    fn thirty_four_passing() -> Vec<CaseSummary> {
        (0..34).map(|i| case(i, true, if i < 31 { 2 } else { 1 }, None)).collect()
    }

    #[test]
    fn thirty_four_cases_efficiency() {
        let cases = thirty_four_passing();
        assert_eq!(cases.iter().map(|c| c.attempts_used).sum::<u32>(), 65);
        let score = efficiency_score(&cases, 10, false).unwrap();
        assert_eq!(score, Ratio::new(309, 10));
        assert_eq!(to_decimal(&score, 1), "30.9");
        let avg = avg_attempts(&cases).unwrap();
        assert_eq!(avg, Ratio::new(65, 34));
        assert_eq!(to_decimal(&avg, 2), "1.91");
        // n * (1 + up - avg) / up
        assert_eq!(score, Ratio::from_integer(34) * (Ratio::from_integer(11) - avg) / Ratio::from_integer(10));
    }

    #[test]
    fn thirty_four_cases_pass_rates() {
        let mut cases = thirty_four_passing();
        assert_eq!(to_decimal(&pass_rate(&cases).unwrap(), 1), "100.0");
        cases[0].passed = false;
        cases[1].passed = false;
        assert_eq!(to_decimal(&pass_rate(&cases).unwrap(), 1), "94.1");
        for c in &mut cases {
            c.passed = false;
        }
        assert_eq!(to_decimal(&pass_rate(&cases).unwrap(), 1), "0.0");
        assert_eq!(pass_rate(&[]), Err(MetricsError::Empty));
    }

    #[test]
    fn failed_case_conventions() {
        // ten of 34 pass with an average of 5.4 iterations
        let attempts = [5, 5, 5, 5, 5, 5, 6, 6, 6, 6];
        let cases: Vec<_> = (0..34)
            .map(|i| if i < 10 { case(i, true, attempts[i], None) } else { case(i, false, 10, None) })
            .collect();
        assert_eq!(to_decimal(&avg_attempts(&cases).unwrap(), 1), "5.4");
        assert_eq!(to_decimal(&efficiency_score(&cases, 10, false).unwrap(), 1), "5.6");
        assert_eq!(to_decimal(&efficiency_score(&cases, 10, true).unwrap(), 1), "8.0");
    }

    #[test]
    fn single_case_bounds() {
        assert_eq!(efficiency_score(&[case(0, true, 1, None)], 10, false).unwrap(), Ratio::from_integer(1));
        assert_eq!(efficiency_score(&[case(0, true, 10, None)], 10, false).unwrap(), Ratio::new(1, 10));
        assert!(matches!(
            efficiency_score(&[case(0, true, 11, None)], 10, false),
            Err(MetricsError::AttemptsOutOfRange { .. })
        ));
        assert!(efficiency_score(&[case(0, true, 0, None)], 10, false).is_err());
    }

    #[test]
    fn bucket_edges() {
        let b = |n, d| Bucket::of(Ratio::new(n, d));
        assert_eq!(b(49, 100), Bucket::MuchSlower);
        assert_eq!(b(1, 2), Bucket::Slower);
        assert_eq!(b(9, 10), Bucket::Parity);
        assert_eq!(b(11, 10), Bucket::Parity);
        assert_eq!(b(111, 100), Bucket::Faster);
        assert_eq!(b(2, 1), Bucket::Faster);
        assert_eq!(b(593, 100), Bucket::MuchFaster);
    }

    #[test]
    fn speedup_examples() {
        assert_eq!(speedup(593, 100).unwrap(), Ratio::new(593, 100));
        assert_eq!(to_short_decimal(&speedup(593, 100).unwrap(), 2), "5.93");
        assert_eq!(speedup(40, 40).unwrap(), Ratio::from_integer(1));
        assert_eq!(speedup(10, 20).unwrap(), Ratio::new(1, 2));
        assert!(speedup(0, 20).is_err() && speedup(10, 0).is_err());
    }

    fn three() -> Vec<CaseSummary> {
        vec![case(2, true, 1, Some((13, 10))), case(0, true, 3, Some((4, 5))), case(1, false, 10, None)]
    }

    #[test]
    fn machine_round_trip() {
        let r = MetricsReport::compute(&three(), 10, false).unwrap();
        let text = emit_report(&r, ReportFormat::Machine);
        assert!(text.contains("\"pass_rate\": \"200/3\""));
        assert_eq!(parse_machine_report(&text).unwrap(), r);
    }

    #[test]
    fn table_has_a_row_per_case_and_every_bucket() {
        let r = MetricsReport::compute(&three(), 10, false).unwrap();
        let text = emit_report(&r, ReportFormat::TextTable);
        let rows: Vec<&str> = text.lines().skip(1).take_while(|l| !l.is_empty()).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].starts_with("c00") && rows[1].contains("FAIL"));
        assert!(text.contains("pass rate 66.7% (2/3)"));
        assert!(text.contains("  >2.0x     0"));
        assert!(text.contains("max speedup 1.3x (c02)"));
        assert_eq!(r.speedup_buckets.total() as usize, r.speedups.len());
    }

    #[test]
    fn order_does_not_matter() {
        let mut rev = three();
        rev.reverse();
        assert_eq!(MetricsReport::compute(&three(), 10, true), MetricsReport::compute(&rev, 10, true));
    }
}

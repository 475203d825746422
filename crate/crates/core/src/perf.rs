//! Anytime-performance machinery: run logs, hitting times, attainment
//! curves between fixed precision bounds, area under the curve, and
//! grouped aggregation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use crate::problems::FunctionId;

/// Default precision bounds of the attainment transform.
pub const DEFAULT_PRECISION_UPPER: f64 = 1e8;
pub const DEFAULT_PRECISION_LOWER: f64 = 1e-8;
/// Default number of log-spaced budget grid points.
pub const DEFAULT_GRID_POINTS: usize = 64;

/// Initial step size; scalar for most strategies, one entry per coordinate
/// for self-adaptive step-size vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sigma0 {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// Identifying metadata of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub algorithm: String,
    pub distribution: String,
    pub mode: String,
    pub function: String,
    pub n: usize,
    pub instance_seed: u64,
    pub run_seed: u64,
    pub sigma0: Sigma0,
    pub budget: u64,
}

/// One best-so-far improvement: precision attained after `evals`
/// evaluations. Displayed precision is floored at 1e-8.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunEvent {
    pub evals: u64,
    pub best_precision: f64,
}

/// Monotone best-so-far trace of one run: events strictly increase in
/// evaluations and strictly decrease in precision.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub header: RunHeader,
    pub events: Vec<RunEvent>,
}

impl RunLog {
    /// Best precision attained within `budget` evaluations; `None` before
    /// the first event.
    pub fn best_precision_at(&self, budget: f64) -> Option<f64> {
        self.events
            .iter()
            .take_while(|e| e.evals as f64 <= budget)
            .last()
            .map(|e| e.best_precision)
    }

    pub fn final_precision(&self) -> Option<f64> {
        self.events.last().map(|e| e.best_precision)
    }

    /// Checks the monotonicity invariants.
    pub fn validate(&self) -> Result<(), LogError> {
        for pair in self.events.windows(2) {
            if pair[1].evals <= pair[0].evals {
                return Err(LogError::NonIncreasingEvals);
            }
            if pair[1].best_precision >= pair[0].best_precision {
                return Err(LogError::NonDecreasingPrecision);
            }
        }
        if self.events.first().is_some_and(|e| e.evals < 1) {
            return Err(LogError::EventBeforeFirstEvaluation);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LogError {
    #[error("events must strictly increase in evaluations")]
    NonIncreasingEvals,
    #[error("events must strictly decrease in precision")]
    NonDecreasingPrecision,
    #[error("events cannot precede the first evaluation")]
    EventBeforeFirstEvaluation,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerfError {
    #[error("at least one run log is required")]
    EmptyLogSet,
    #[error("unknown function `{0}` in run header")]
    UnknownFunction(String),
    #[error("budget grid must be nonempty and increasing")]
    BadGrid,
}

/// First evaluation count at which `target` precision is attained.
pub fn hitting_time(log: &RunLog, target: f64) -> Option<u64> {
    debug_assert!(target > 0.0);
    log.events
        .iter()
        .find(|e| e.best_precision <= target)
        .map(|e| e.evals)
}

/// Attained fraction of the log-precision range [lb, ub] at `budget`
/// evaluations: 0 at or above ub, 1 at or below lb.
pub fn eaf_value(log: &RunLog, budget: f64, ub: f64, lb: f64) -> f64 {
    debug_assert!(ub > lb && lb > 0.0);
    match log.best_precision_at(budget) {
        None => 0.0,
        Some(p) => {
            let frac = (ub.log10() - p.max(lb).log10()) / (ub.log10() - lb.log10());
            frac.clamp(0.0, 1.0)
        }
    }
}

/// Attainment curve over a shared budget grid; values are nondecreasing
/// fractions in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EafCurve {
    pub budgets: Vec<f64>,
    pub values: Vec<f64>,
}

/// Log-spaced budget grid from 1 to `max_budget`.
pub fn budget_grid(max_budget: f64, points: usize) -> Vec<f64> {
    assert!(points >= 1 && max_budget >= 1.0);
    if points == 1 {
        return vec![max_budget];
    }
    let span = max_budget.log10();
    (0..points)
        .map(|i| 10f64.powf(span * i as f64 / (points - 1) as f64))
        .collect()
}

/// Pointwise mean of per-log attainment values over `grid`.
pub fn eaf_ecdf(logs: &[&RunLog], grid: &[f64], ub: f64, lb: f64) -> Result<EafCurve, PerfError> {
    if logs.is_empty() {
        return Err(PerfError::EmptyLogSet);
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PerfError::BadGrid);
    }
    let values = grid
        .iter()
        .map(|&b| logs.iter().map(|log| eaf_value(log, b, ub, lb)).sum::<f64>() / logs.len() as f64)
        .collect();
    Ok(EafCurve {
        budgets: grid.to_vec(),
        values,
    })
}

/// Trapezoidal integral of the curve over log10(budget), normalized by the
/// log-budget span; a single-point curve returns its value.
pub fn auc(curve: &EafCurve) -> f64 {
    assert!(!curve.budgets.is_empty());
    if curve.budgets.len() == 1 {
        return curve.values[0];
    }
    let xs: Vec<f64> = curve.budgets.iter().map(|b| b.log10()).collect();
    let span = xs.last().unwrap() - xs.first().unwrap();
    if span <= 0.0 {
        return curve.values[0];
    }
    let mut area = 0.0;
    for i in 1..xs.len() {
        area += 0.5 * (curve.values[i] + curve.values[i - 1]) * (xs[i] - xs[i - 1]);
    }
    area / span
}

/// Which header fields define an aggregation cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupBy {
    pub algorithm: bool,
    pub distribution: bool,
    pub mode: bool,
    pub function_group: bool,
    pub n: bool,
}

/// One aggregation cell: the grouped key fields, the number of pooled
/// runs, and the resulting AUC.
#[derive(Debug, Clone, PartialEq)]
pub struct AucCell {
    pub algorithm: Option<String>,
    pub distribution: Option<String>,
    pub mode: Option<String>,
    pub function_group: Option<u8>,
    pub n: Option<usize>,
    pub runs: usize,
    pub auc: f64,
}

/// AUC per group cell over a grid shared by the whole comparison. Rows
/// come out in deterministic key order; empty cells cannot arise (cells
/// exist only where logs do).
pub fn aggregate(
    logs: &[RunLog],
    group_by: GroupBy,
    grid_points: usize,
    ub: f64,
    lb: f64,
) -> Result<Vec<AucCell>, PerfError> {
    if logs.is_empty() {
        return Err(PerfError::EmptyLogSet);
    }
    let max_budget = logs.iter().map(|l| l.header.budget).max().unwrap().max(1) as f64;
    let grid = budget_grid(max_budget, grid_points);

    type Key = (
        Option<String>,
        Option<String>,
        Option<String>,
        Option<u8>,
        Option<usize>,
    );
    let mut cells: BTreeMap<Key, Vec<&RunLog>> = BTreeMap::new();
    for log in logs {
        let group = if group_by.function_group {
            let function: FunctionId = log
                .header
                .function
                .parse()
                .map_err(|_| PerfError::UnknownFunction(log.header.function.clone()))?;
            Some(function.group())
        } else {
            None
        };
        let key: Key = (
            group_by.algorithm.then(|| log.header.algorithm.clone()),
            group_by.distribution.then(|| log.header.distribution.clone()),
            group_by.mode.then(|| log.header.mode.clone()),
            group,
            group_by.n.then_some(log.header.n),
        );
        cells.entry(key).or_default().push(log);
    }

    cells
        .into_iter()
        .map(|(key, cell_logs)| {
            let curve = eaf_ecdf(&cell_logs, &grid, ub, lb)?;
            Ok(AucCell {
                algorithm: key.0,
                distribution: key.1,
                mode: key.2,
                function_group: key.3,
                n: key.4,
                runs: cell_logs.len(),
                auc: auc(&curve),
            })
        })
        .collect()
}

// JSON-lines serialization: one tagged record per line, one header per run
// followed by its events.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record {
    Header(RunHeader),
    Event(RunEvent),
}

/// Writes logs as JSON lines.
pub fn write_logs<W: Write>(mut w: W, logs: &[RunLog]) -> io::Result<()> {
    for log in logs {
        serde_json::to_writer(&mut w, &Record::Header(log.header.clone()))?;
        w.write_all(b"\n")?;
        for &event in &log.events {
            serde_json::to_writer(&mut w, &Record::Event(event))?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("line {0}: {1}")]
    Malformed(usize, serde_json::Error),
    #[error("line {0}: event precedes any run header")]
    EventWithoutHeader(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads logs back from JSON lines; blank lines are skipped.
pub fn read_logs<R: BufRead>(r: R) -> Result<Vec<RunLog>, ReadError> {
    let mut logs: Vec<RunLog> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(&line).map_err(|e| ReadError::Malformed(idx + 1, e))? {
            Record::Header(header) => logs.push(RunLog {
                header,
                events: Vec::new(),
            }),
            Record::Event(event) => match logs.last_mut() {
                Some(log) => log.events.push(event),
                None => return Err(ReadError::EventWithoutHeader(idx + 1)),
            },
        }
    }
    Ok(logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> RunHeader {
        RunHeader {
            algorithm: "one_plus_one".into(),
            distribution: "gaussian".into(),
            mode: "plain".into(),
            function: "sphere".into(),
            n: 10,
            instance_seed: 1,
            run_seed: 2,
            sigma0: Sigma0::Scalar(2.0),
            budget: 1000,
        }
    }

    fn log_with(events: &[(u64, f64)]) -> RunLog {
        RunLog {
            header: header(),
            events: events
                .iter()
                .map(|&(evals, best_precision)| RunEvent {
                    evals,
                    best_precision,
                })
                .collect(),
        }
    }

    #[test]
    fn hitting_time_examples() {
        let log = log_with(&[(10, 1e-2), (20, 1e-9)]);
        assert_eq!(hitting_time(&log, 1e-8), Some(20));
        assert_eq!(hitting_time(&log, 1e-2), Some(10));
        assert_eq!(hitting_time(&log, 1e-12), None);
        let never = log_with(&[(10, 5.0)]);
        assert_eq!(hitting_time(&never, 1e-8), None);
    }

    #[test]
    fn eaf_value_examples() {
        let at_ub = log_with(&[(1, 1e8)]);
        assert_eq!(eaf_value(&at_ub, 10.0, 1e8, 1e-8), 0.0);
        let at_lb = log_with(&[(1, 1e-8)]);
        assert_eq!(eaf_value(&at_lb, 10.0, 1e8, 1e-8), 1.0);
        // Precision 1 sits at the midpoint of the log range.
        let mid = log_with(&[(1, 1.0)]);
        assert!((eaf_value(&mid, 10.0, 1e8, 1e-8) - 0.5).abs() < 1e-12);
        // Above the upper bound clips to zero contribution.
        let above = log_with(&[(1, 1e12)]);
        assert_eq!(eaf_value(&above, 10.0, 1e8, 1e-8), 0.0);
        // Before the first event the attained fraction is zero.
        let late = log_with(&[(100, 1.0)]);
        assert_eq!(eaf_value(&late, 10.0, 1e8, 1e-8), 0.0);
    }

    #[test]
    fn eaf_value_monotone_in_budget_and_precision() {
        let log = log_with(&[(10, 1e4), (100, 1.0), (1000, 1e-6)]);
        let grid = budget_grid(2000.0, 40);
        let mut last = 0.0;
        for &b in &grid {
            let v = eaf_value(&log, b, 1e8, 1e-8);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn ecdf_is_mean_of_logs() {
        let solved = log_with(&[(5, 1e-8)]);
        let stuck = log_with(&[(5, 1e8)]);
        let grid = budget_grid(100.0, 10);
        let curve = eaf_ecdf(&[&solved, &stuck], &grid, 1e8, 1e-8).unwrap();
        assert!((curve.values.last().unwrap() - 0.5).abs() < 1e-12);
        // Single log beyond its final event: constant at the final value.
        let single = eaf_ecdf(&[&solved], &grid, 1e8, 1e-8).unwrap();
        for (&b, &v) in single.budgets.iter().zip(&single.values) {
            if b >= 5.0 {
                assert_eq!(v, 1.0);
            }
        }
        assert!(eaf_ecdf(&[], &grid, 1e8, 1e-8).is_err());
    }

    #[test]
    fn auc_examples() {
        let grid = budget_grid(1e4, 64);
        let ones = EafCurve {
            budgets: grid.clone(),
            values: vec![1.0; grid.len()],
        };
        assert!((auc(&ones) - 1.0).abs() < 1e-12);
        let zeros = EafCurve {
            budgets: grid.clone(),
            values: vec![0.0; grid.len()],
        };
        assert_eq!(auc(&zeros), 0.0);
        // Step at the middle of the log span integrates to about one half.
        let step = EafCurve {
            budgets: grid.clone(),
            values: grid
                .iter()
                .map(|&b| if b.log10() >= 2.0 { 1.0 } else { 0.0 })
                .collect(),
        };
        assert!((auc(&step) - 0.5).abs() < 0.02);
        let point = EafCurve {
            budgets: vec![10.0],
            values: vec![0.7],
        };
        assert_eq!(auc(&point), 0.7);
    }

    #[test]
    fn auc_unchanged_by_duplicating_logs() {
        let a = log_with(&[(3, 1e2), (30, 1e-3)]);
        let b = log_with(&[(7, 1e5)]);
        let grid = budget_grid(1000.0, 64);
        let once = auc(&eaf_ecdf(&[&a, &b], &grid, 1e8, 1e-8).unwrap());
        let twice = auc(&eaf_ecdf(&[&a, &b, &a, &b], &grid, 1e8, 1e-8).unwrap());
        assert!((once - twice).abs() < 1e-12);
    }

    #[test]
    fn aggregate_cells() {
        let mut a = log_with(&[(5, 1e-8)]);
        a.header.distribution = "cauchy".into();
        let b = log_with(&[(5, 1e-8)]);
        let logs = vec![a, b.clone(), b];
        let cells = aggregate(
            &logs,
            GroupBy {
                distribution: true,
                ..GroupBy::default()
            },
            16,
            1e8,
            1e-8,
        )
        .unwrap();
        assert_eq!(cells.len(), 2);
        // Deterministic ordering: cauchy before gaussian.
        assert_eq!(cells[0].distribution.as_deref(), Some("cauchy"));
        assert_eq!(cells[0].runs, 1);
        assert_eq!(cells[1].distribution.as_deref(), Some("gaussian"));
        assert_eq!(cells[1].runs, 2);
        // A cell of identical logs has the AUC of a single one.
        let single = aggregate(
            &logs[1..2].to_vec(),
            GroupBy {
                distribution: true,
                ..GroupBy::default()
            },
            16,
            1e8,
            1e-8,
        )
        .unwrap();
        assert!((cells[1].auc - single[0].auc).abs() < 1e-12);
    }

    #[test]
    fn aggregate_resolves_function_groups() {
        let mut a = log_with(&[(5, 1e-2)]);
        a.header.function = "rosenbrock".into();
        let cells = aggregate(
            &[a],
            GroupBy {
                function_group: true,
                ..GroupBy::default()
            },
            8,
            1e8,
            1e-8,
        )
        .unwrap();
        assert_eq!(cells[0].function_group, Some(2));

        let mut bad = log_with(&[(5, 1e-2)]);
        bad.header.function = "mystery".into();
        assert!(matches!(
            aggregate(
                &[bad],
                GroupBy {
                    function_group: true,
                    ..GroupBy::default()
                },
                8,
                1e8,
                1e-8
            ),
            Err(PerfError::UnknownFunction(_))
        ));
    }

    #[test]
    fn jsonl_roundtrip() {
        let logs = vec![
            log_with(&[(1, 3.5), (7, 1e-3)]),
            log_with(&[(2, 9.9)]),
            log_with(&[]),
        ];
        let mut buf = Vec::new();
        write_logs(&mut buf, &logs).unwrap();
        let back = read_logs(buf.as_slice()).unwrap();
        assert_eq!(logs, back);
    }

    #[test]
    fn jsonl_rejects_orphan_events() {
        let line = r#"{"record":"event","evals":3,"best_precision":0.5}"#;
        assert!(matches!(
            read_logs(line.as_bytes()),
            Err(ReadError::EventWithoutHeader(1))
        ));
    }

    #[test]
    fn validate_catches_monotonicity_violations() {
        assert!(log_with(&[(1, 2.0), (5, 1.0)]).validate().is_ok());
        assert!(log_with(&[(5, 2.0), (5, 1.0)]).validate().is_err());
        assert!(log_with(&[(1, 2.0), (5, 3.0)]).validate().is_err());
        assert!(log_with(&[(0, 2.0)]).validate().is_err());
    }
}

//! Benchmark result rows and their CSV/JSON serialization.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use glnsa_core::engine::RunReport;
use glnsa_core::instance::{flexibility_rate, Instance, Time};
use glnsa_core::schedule::Solution;

/// One (instance, seed) result in the shape of the benchmark tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    pub seed: u64,
    pub best_makespan: Time,
    pub best_known: Option<Time>,
    pub gap_pct: Option<f64>,
    pub iterations_run: usize,
    pub stagnation_hit: bool,
    pub wall_time_s: f64,
}

impl BenchRow {
    pub fn new(inst: &Instance, report: &RunReport, best_known: Option<Time>) -> Self {
        let gap_pct = best_known
            .map(|known| 100.0 * (report.best_makespan as f64 - known as f64) / known as f64);
        debug_assert!(gap_pct.is_none_or(|g| g >= -100.0));
        Self {
            instance: inst.name().to_string(),
            n: inst.job_count(),
            m: inst.machine_count(),
            beta: flexibility_rate(inst),
            seed: report.seed_used,
            best_makespan: report.best_makespan,
            best_known,
            gap_pct,
            iterations_run: report.iterations_run,
            stagnation_hit: report.stagnation_hit(),
            wall_time_s: report.wall_time,
        }
    }
}

/// Full per-run record for the JSON report: the table row plus the
/// convergence curve and the winning solution (0-based ids, reusable by the
/// `gantt` subcommand).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(flatten)]
    pub row: BenchRow,
    pub curve: Vec<Time>,
    pub best_solution: Solution,
}

impl RunRecord {
    pub fn new(inst: &Instance, report: RunReport, best_known: Option<Time>) -> Self {
        Self {
            row: BenchRow::new(inst, &report, best_known),
            curve: report.curve,
            best_solution: report.best_solution,
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Writes rows with the fixed column order
/// `instance,n,m,beta,seed,best_makespan,best_known,gap_pct,iterations_run,stagnation_hit,wall_time_s`.
pub fn write_csv<W: io::Write>(out: W, rows: &[BenchRow]) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRow>, ReportError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

pub fn write_json<W: io::Write>(mut out: W, records: &[RunRecord]) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: io::Read>(input: R) -> Result<Vec<RunRecord>, ReportError> {
    Ok(serde_json::from_reader(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row(seed: u64, known: Option<Time>) -> BenchRow {
        BenchRow {
            instance: "mt06".into(),
            n: 6,
            m: 6,
            beta: 1.0 / 3.0,
            seed,
            best_makespan: 47,
            best_known: known,
            gap_pct: known.map(|k| 100.0 * (47.0 - k as f64) / k as f64),
            iterations_run: 55,
            stagnation_hit: true,
            wall_time_s: 1.25,
        }
    }

    #[test]
    fn csv_roundtrips_every_field() {
        let rows = vec![sample_row(1, Some(47)), sample_row(2, None)];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "instance,n,m,beta,seed,best_makespan,best_known,gap_pct,iterations_run,stagnation_hit,wall_time_s"
        ));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn gap_matches_table_arithmetic() {
        // 1096 against a known 1079 is a 1.576% gap.
        let gap: f64 = 100.0 * (1096.0 - 1079.0) / 1079.0;
        assert!((gap - 1.576).abs() < 1e-3);
        let row = BenchRow { best_makespan: 47, ..sample_row(0, Some(47)) };
        assert_eq!(row.gap_pct, Some(0.0));
    }

    #[test]
    fn gap_present_iff_known_present() {
        assert!(sample_row(0, None).gap_pct.is_none());
        assert!(sample_row(0, Some(40)).gap_pct.is_some());
    }
}

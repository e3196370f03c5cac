//! Batch benchmark runs over instance files.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use glnsa_core::engine::{glnsa_run, GlnsaConfig};
use glnsa_core::instance::{parse_instance, Instance, Time};

use crate::report::{BenchRow, RunRecord};

/// Inputs of one batch: instance files in run order, one run per seed each.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub instances: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub cfg: GlnsaConfig,
    pub best_known: Option<HashMap<String, Time>>,
}

#[derive(Debug)]
pub struct BenchOutcome {
    pub records: Vec<RunRecord>,
    /// Instances that failed to load, in input order; they do not abort the
    /// rest of the batch.
    pub failures: Vec<(PathBuf, String)>,
}

impl BenchOutcome {
    pub fn rows(&self) -> Vec<BenchRow> {
        self.records.iter().map(|r| r.row.clone()).collect()
    }

    /// Largest gap over rows that have a best-known value.
    pub fn worst_gap_pct(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.row.gap_pct)
            .max_by(|a, b| a.total_cmp(b))
    }
}

/// Instance name: file stem, so `data/hu/vdata/mt06` keys the table as `mt06`.
pub fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into())
}

pub fn load_instance(path: &Path) -> Result<Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_instance(&text, &instance_name(path)).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs every (instance, seed) pair in input order and collects the records.
pub fn run_benchmark(spec: &BenchSpec) -> BenchOutcome {
    let mut records = Vec::with_capacity(spec.instances.len() * spec.seeds.len());
    let mut failures = Vec::new();
    for path in &spec.instances {
        let inst = match load_instance(path) {
            Ok(inst) => inst,
            Err(err) => {
                failures.push((path.clone(), err));
                continue;
            }
        };
        let known = spec
            .best_known
            .as_ref()
            .and_then(|table| table.get(inst.name()))
            .copied();
        for &seed in &spec.seeds {
            let cfg = GlnsaConfig { seed, ..spec.cfg.clone() };
            let report = glnsa_run(&inst, &cfg);
            records.push(RunRecord::new(&inst, report, known));
        }
    }
    BenchOutcome { records, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_instance(dir: &Path, name: &str, text: &str) -> PathBuf {
        let path = dir.join(name);
        let mut file = fs::File::create(&path).unwrap();
        file.write_all(text.as_bytes()).unwrap();
        path
    }

    #[test]
    fn rows_follow_input_order_and_failures_do_not_abort() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_instance(dir.path(), "a.fjs", "1 2\n1 2 1 5 2 2\n");
        let bad = write_instance(dir.path(), "bad.fjs", "1 2\n1 1 9 5\n");
        let b = write_instance(dir.path(), "b.fjs", "2 2\n2 1 1 4 1 2 1\n1 1 2 2\n");
        let spec = BenchSpec {
            instances: vec![a, bad, b],
            seeds: vec![11],
            cfg: GlnsaConfig { g_n: 10, s_n: 4, s_b: 5, ..GlnsaConfig::default() },
            best_known: Some(HashMap::from([("a".to_string(), 2)])),
        };
        let outcome = run_benchmark(&spec);
        assert_eq!(outcome.failures.len(), 1);
        let rows = outcome.rows();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].instance, "a");
        assert_eq!(rows[1].instance, "b");
        assert_eq!(rows[0].best_makespan, 2);
        assert_eq!(rows[0].gap_pct, Some(0.0));
        assert_eq!(rows[1].best_known, None);
        assert_eq!(outcome.worst_gap_pct(), Some(0.0));
    }

    #[test]
    fn two_instances_one_seed_yield_two_rows() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_instance(dir.path(), "x.fjs", "1 1\n1 1 1 3\n");
        let b = write_instance(dir.path(), "y.fjs", "1 2\n1 2 1 5 2 2\n");
        let spec = BenchSpec {
            instances: vec![a, b],
            seeds: vec![5],
            cfg: GlnsaConfig { g_n: 5, s_n: 2, s_b: 3, ..GlnsaConfig::default() },
            best_known: None,
        };
        let outcome = run_benchmark(&spec);
        assert_eq!(outcome.failures.len(), 0);
        let names: Vec<&str> = outcome.records.iter().map(|r| r.row.instance.as_str()).collect();
        assert_eq!(names, vec!["x", "y"]);
    }
}

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use glnsa_cli::bench::{instance_name, load_instance, run_benchmark, BenchOutcome, BenchSpec};
use glnsa_cli::bestknown::parse_best_known;
use glnsa_cli::gantt::gantt_svg;
use glnsa_cli::oracle::brute_force_optimal;
use glnsa_cli::report::{read_json, write_csv, write_json, RunRecord};
use glnsa_core::engine::{glnsa_run, GlnsaConfig};
use glnsa_core::instance::{flexibility_rate, Time};
use glnsa_core::schedule::decode_active;
use glnsa_core::tabu::EvalMode;

#[derive(Parser)]
#[command(name = "glnsa", version, about = "Flexible job shop scheduling with GLNSA")]
struct Cli {
    /// Worker threads for per-cell parallelism (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one instance and print its convergence curve.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Write a JSON report (row, curve, best solution).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Render the best schedule to an SVG file.
        #[arg(long)]
        gantt: Option<PathBuf>,
        /// Best-known table (`name value` lines) for gap reporting.
        #[arg(long)]
        best_known: Option<PathBuf>,
    },
    /// Run a batch of instances across seeds and emit CSV/JSON reports.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Comma-separated seed list; one run per (instance, seed).
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Report path prefix: writes `<prefix>.csv` and `<prefix>.json`.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        best_known: Option<PathBuf>,
        /// Fail (exit 1) when any gap against best-known exceeds this.
        #[arg(long)]
        max_gap_pct: Option<f64>,
    },
    /// Exhaustive optimum for tiny instances.
    Oracle {
        instance: PathBuf,
        /// Refuse enumerations larger than this many (OS x MS) pairs.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
    },
    /// Render a solution saved in a JSON report as a Gantt chart.
    Gantt {
        instance: PathBuf,
        report: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Record index inside the report.
        #[arg(long, default_value_t = 0)]
        row: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalModeArg {
    Exact,
    Estimate,
}

/// Optional overrides for every tunable; unset flags keep the defaults.
#[derive(Args)]
struct ConfigArgs {
    /// Maximum main-loop iterations.
    #[arg(long)]
    gn: Option<usize>,
    /// Population size.
    #[arg(long)]
    sn: Option<usize>,
    /// Neighbors per smart cell.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    alpha_i: Option<f64>,
    #[arg(long)]
    alpha_s: Option<f64>,
    #[arg(long)]
    alpha_p: Option<f64>,
    #[arg(long)]
    alpha_m: Option<f64>,
    /// Stagnation limit.
    #[arg(long)]
    sb: Option<usize>,
    /// Elite proportion.
    #[arg(long)]
    ep: Option<f64>,
    /// Tabu budget multiplier.
    #[arg(long)]
    tn: Option<u64>,
    /// Tournament size.
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    eval_mode: Option<EvalModeArg>,
    /// Wall-clock cap in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<GlnsaConfig> {
        let mut cfg = GlnsaConfig::default();
        if let Some(v) = self.gn {
            cfg.g_n = v;
        }
        if let Some(v) = self.sn {
            cfg.s_n = v;
        }
        if let Some(v) = self.l {
            cfg.l = v;
        }
        if let Some(v) = self.alpha_i {
            cfg.alpha_i = v;
        }
        if let Some(v) = self.alpha_s {
            cfg.alpha_s = v;
        }
        if let Some(v) = self.alpha_p {
            cfg.alpha_p = v;
        }
        if let Some(v) = self.alpha_m {
            cfg.alpha_m = v;
        }
        if let Some(v) = self.sb {
            cfg.s_b = v;
        }
        if let Some(v) = self.ep {
            cfg.e_p = v;
        }
        if let Some(v) = self.tn {
            cfg.t_n = v;
        }
        if let Some(v) = self.b {
            cfg.b = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(mode) = self.eval_mode {
            cfg.eval_mode = match mode {
                EvalModeArg::Exact => EvalMode::Exact,
                EvalModeArg::Estimate => EvalMode::Estimate,
            };
        }
        if let Some(v) = self.time_limit {
            cfg.time_limit = Some(v);
        }
        cfg.validate().map_err(anyhow::Error::from)?;
        Ok(cfg)
    }
}

fn load_table(path: &Option<PathBuf>) -> Result<Option<HashMap<String, Time>>> {
    match path {
        None => Ok(None),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading best-known table {}", path.display()))?;
            Ok(Some(parse_best_known(&text)?))
        }
    }
}

fn print_curve(curve: &[Time]) {
    let mut last = None;
    for (iteration, &best) in curve.iter().enumerate() {
        if last != Some(best) {
            println!("  iter {iteration:>4}  best {best}");
            last = Some(best);
        }
    }
}

fn cmd_solve(
    instance: &PathBuf,
    cfg: &ConfigArgs,
    output: &Option<PathBuf>,
    gantt: &Option<PathBuf>,
    best_known: &Option<PathBuf>,
) -> Result<u8> {
    let cfg = cfg.build()?;
    let inst = load_instance(instance).map_err(anyhow::Error::msg)?;
    let table = load_table(best_known)?;
    let known = table.as_ref().and_then(|t| t.get(inst.name())).copied();
    println!(
        "{}: {} jobs x {} machines, {} operations, beta {:.2}, seed {}",
        inst.name(),
        inst.job_count(),
        inst.machine_count(),
        inst.total_ops(),
        flexibility_rate(&inst),
        cfg.seed
    );
    let report = glnsa_run(&inst, &cfg);
    print_curve(&report.curve);
    println!(
        "best makespan {} after {} iterations ({:.2}s, stop: {:?})",
        report.best_makespan, report.iterations_run, report.wall_time, report.stop_reason
    );
    if let Some(known) = known {
        let gap = 100.0 * (report.best_makespan as f64 - known as f64) / known as f64;
        println!("best known {known}, gap {gap:.3}%");
    }
    if let Some(path) = gantt {
        let sched = decode_active(&inst, &report.best_solution);
        fs::write(path, gantt_svg(&inst, &sched))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("gantt chart written to {}", path.display());
    }
    if let Some(path) = output {
        let record = RunRecord::new(&inst, report, known);
        let file = fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))?;
        write_json(file, std::slice::from_ref(&record))?;
        println!("report written to {}", path.display());
    }
    Ok(0)
}

fn print_rows(outcome: &BenchOutcome) {
    println!(
        "{:<10} {:>3} {:>3} {:>5} {:>6} {:>9} {:>10} {:>8} {:>6} {:>6} {:>8}",
        "instance", "n", "m", "beta", "seed", "makespan", "best_known", "gap%", "iters", "stagn", "time_s"
    );
    for row in outcome.rows() {
        println!(
            "{:<10} {:>3} {:>3} {:>5.2} {:>6} {:>9} {:>10} {:>8} {:>6} {:>6} {:>8.2}",
            row.instance,
            row.n,
            row.m,
            row.beta,
            row.seed,
            row.best_makespan,
            row.best_known.map_or_else(|| "-".into(), |v| v.to_string()),
            row.gap_pct.map_or_else(|| "-".into(), |g| format!("{g:.3}")),
            row.iterations_run,
            if row.stagnation_hit { "yes" } else { "no" },
            row.wall_time_s,
        );
    }
}

fn cmd_bench(
    instances: &[PathBuf],
    seeds: &[u64],
    cfg: &ConfigArgs,
    output: &Option<PathBuf>,
    best_known: &Option<PathBuf>,
    max_gap_pct: Option<f64>,
) -> Result<u8> {
    let spec = BenchSpec {
        instances: instances.to_vec(),
        seeds: seeds.to_vec(),
        cfg: cfg.build()?,
        best_known: load_table(best_known)?,
    };
    let outcome = run_benchmark(&spec);
    print_rows(&outcome);
    for (path, err) in &outcome.failures {
        eprintln!("failed: {}: {err}", path.display());
    }
    if let Some(prefix) = output {
        let csv_path = prefix.with_extension("csv");
        let json_path = prefix.with_extension("json");
        write_csv(fs::File::create(&csv_path)?, &outcome.rows())?;
        write_json(fs::File::create(&json_path)?, &outcome.records)?;
        println!("reports written to {} and {}", csv_path.display(), json_path.display());
    }
    if !outcome.failures.is_empty() {
        return Ok(2);
    }
    if let (Some(limit), Some(worst)) = (max_gap_pct, outcome.worst_gap_pct()) {
        if worst > limit {
            eprintln!("worst gap {worst:.3}% exceeds the allowed {limit:.3}%");
            return Ok(1);
        }
    }
    Ok(0)
}

fn cmd_oracle(instance: &PathBuf, cap: u128) -> Result<u8> {
    let inst = load_instance(instance).map_err(anyhow::Error::msg)?;
    let optimum = brute_force_optimal(&inst, cap)?;
    println!("{}: optimum makespan {}", inst.name(), optimum);
    Ok(0)
}

fn cmd_gantt(instance: &PathBuf, report: &PathBuf, output: &PathBuf, row: usize) -> Result<u8> {
    let inst = load_instance(instance).map_err(anyhow::Error::msg)?;
    let file = fs::File::open(report)
        .with_context(|| format!("opening report {}", report.display()))?;
    let records = read_json(file)?;
    let Some(record) = records.get(row) else {
        bail!("report has {} records, row {row} does not exist", records.len());
    };
    if record.row.instance != instance_name(instance) {
        eprintln!(
            "note: report row is for {:?}, rendering against {:?}",
            record.row.instance,
            instance_name(instance)
        );
    }
    if !record.best_solution.is_valid_for(&inst) {
        bail!("saved solution does not fit this instance");
    }
    let sched = decode_active(&inst, &record.best_solution);
    fs::write(output, gantt_svg(&inst, &sched))
        .with_context(|| format!("writing {}", output.display()))?;
    println!("gantt chart written to {} (makespan {})", output.display(), sched.makespan);
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Solve { instance, cfg, output, gantt, best_known } => {
            cmd_solve(instance, cfg, output, gantt, best_known)
        }
        Command::Bench { instances, seeds, cfg, output, best_known, max_gap_pct } => {
            cmd_bench(instances, seeds, cfg, output, best_known, *max_gap_pct)
        }
        Command::Oracle { instance, cap } => cmd_oracle(instance, *cap),
        Command::Gantt { instance, report, output, row } => {
            cmd_gantt(instance, report, output, *row)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

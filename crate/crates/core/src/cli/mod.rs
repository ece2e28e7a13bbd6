//! Command-line harness: config ingestion, sweeps, and output files.

pub mod config;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::controllers::AnalysisConstants;
use crate::lfp::{
    charnes_cooper_solve, dinkelbach_solve, stationary_policy_dinkelbach, stationary_policy_optimum, LfpStatus,
};
use crate::sim::{builtin_scenarios, run_scenario, run_with_trace, Scenario, ScenarioModel};

pub use config::{
    parse_config, parse_config_unvalidated, serialize_config, ConfigError, Emit, InlineScenario, RunConfig,
};
pub use output::{fmt_sig9, run_dir_name, trace_header, write_trace, RunSettings, SummaryRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUN_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "renewal-sim",
    version,
    about = "Simulate ratio controllers on renewal systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario or a V sweep.
    Run(RunArgs),
    /// List built-in scenarios.
    ListScenarios,
    /// Print the optimal stationary policy of a scenario's model.
    Oracle(OracleArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// TOML config file.
    pub config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Comma-separated V values.
    #[arg(long = "V", value_delimiter = ',', num_args = 1..)]
    pub v: Vec<f64>,
    /// Number of frames K.
    #[arg(long)]
    pub frames: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; one subdirectory per run.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
    /// Moving-average window in frames.
    #[arg(long)]
    pub window: Option<u64>,
    /// Parallel runs.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct OracleArgs {
    /// TOML config file.
    pub config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    pub scenario: Option<String>,
}

fn read_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
    parse_config_unvalidated(&text)
}

/// Merges a config file (if any) with command-line overrides.
pub fn resolve_run_config(args: &RunArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), _) => read_config(path)?,
        (None, Some(name)) => {
            let base = crate::sim::builtin_scenario(name).ok_or_else(|| ConfigError::UnknownScenario {
                name: name.clone(),
                available: crate::sim::scenario_names().join(", "),
            })?;
            RunConfig::for_scenario(name, vec![base.config.v])
        }
        (None, None) => return Err(ConfigError::Invalid("give a config file or --scenario".into())),
    };
    if let Some(name) = &args.scenario {
        cfg.scenario = Some(name.clone());
        cfg.inline = None;
    }
    if !args.v.is_empty() {
        cfg.v = args.v.clone();
    }
    if let Some(k) = args.frames {
        cfg.frames = k;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(e) = args.emit {
        cfg.emit = e;
    }
    if let Some(w) = args.window {
        cfg.window = w;
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Result of one (scenario, V) run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub scenario: String,
    pub v: f64,
    pub result: Result<SummaryRecord, String>,
}

fn run_one(s: &Scenario, cfg: &RunConfig) -> Result<SummaryRecord, String> {
    let (summary, trace) = if cfg.emit.trace() {
        let (summary, rows) = run_with_trace(s).map_err(|e| e.to_string())?;
        (summary, Some(rows))
    } else {
        (run_scenario(s).map_err(|e| e.to_string())?, None)
    };
    let record = SummaryRecord::new(s, cfg.emit, cfg.jobs, summary);
    if let Some(out) = &cfg.out {
        let dir = out.join(run_dir_name(&s.name, s.config.v));
        fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        if cfg.emit.summary() {
            let text = record.to_toml().map_err(|e| e.to_string())?;
            fs::write(dir.join("summary.toml"), text).map_err(|e| e.to_string())?;
        }
        if let Some(rows) = trace {
            let file = fs::File::create(dir.join("trace.csv")).map_err(|e| e.to_string())?;
            write_trace(std::io::BufWriter::new(file), &rows).map_err(|e| e.to_string())?;
        }
    }
    Ok(record)
}

/// Runs every V of `cfg` on a pool of `cfg.jobs` threads; results keep config order.
pub fn execute(cfg: &RunConfig) -> Result<Vec<RunOutcome>, ConfigError> {
    let scenarios = cfg.scenarios()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(pool.install(|| {
        scenarios
            .par_iter()
            .map(|s| RunOutcome {
                scenario: s.name.clone(),
                v: s.config.v,
                result: run_one(s, cfg),
            })
            .collect()
    }))
}

pub fn exit_code(outcomes: &[RunOutcome]) -> i32 {
    if outcomes.iter().all(|o| o.result.is_ok()) {
        EXIT_OK
    } else {
        EXIT_RUN_FAILURE
    }
}

/// Human-readable results table.
pub fn format_table(outcomes: &[RunOutcome]) -> String {
    let mut s = format!("{:>10} {:>12} {:>12}  {}\n", "V", "power", "max_queue", "gaps");
    for o in outcomes {
        match &o.result {
            Ok(r) => {
                let sum = &r.summary;
                let max_q = sum.max_queues.iter().copied().fold(0.0, f64::max);
                let gaps: Vec<String> = sum.constraint_gaps.iter().map(|g| format!("{g:.3e}")).collect();
                s += &format!(
                    "{:>10} {:>12.6} {:>12.3}  [{}]\n",
                    o.v,
                    sum.time_average_power,
                    max_q,
                    gaps.join(", ")
                );
            }
            Err(e) => s += &format!("{:>10} failed: {e}\n", o.v),
        }
    }
    s
}

/// Oracle output for a scenario's model.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub scenario: String,
    pub power_opt: f64,
    pub dinkelbach_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<AnalysisConstants>,
}

pub fn oracle(s: &Scenario) -> Result<OracleReport, String> {
    match &s.model {
        ScenarioModel::Task(m) => {
            let p = stationary_policy_optimum(m, m.rates()).map_err(|e| e.to_string())?;
            let d = stationary_policy_dinkelbach(m, m.rates(), 1e-12).map_err(|e| e.to_string())?;
            Ok(OracleReport {
                scenario: s.name.clone(),
                power_opt: p.power_opt,
                dinkelbach_value: d.power_opt,
                probabilities: Some(p.probabilities),
                idle: Some(p.idle),
                x: None,
                constants: AnalysisConstants::for_task_model(m, m.rates()).ok(),
            })
        }
        ScenarioModel::Lfp(inst) => {
            let cc = charnes_cooper_solve(inst).map_err(|e| e.to_string())?;
            if cc.status == LfpStatus::Infeasible {
                return Err("instance is infeasible".into());
            }
            let d = dinkelbach_solve(inst, 1e-12).map_err(|e| e.to_string())?;
            Ok(OracleReport {
                scenario: s.name.clone(),
                power_opt: cc.value,
                dinkelbach_value: d.value,
                probabilities: None,
                idle: None,
                x: Some(cc.x),
                constants: None,
            })
        }
        ScenarioModel::Attribute(_) => Err(format!("no stationary oracle for attribute scenario `{}`", s.name)),
    }
}

fn oracle_scenario(args: &OracleArgs) -> Result<Scenario, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => read_config(path)?,
        None => RunConfig::for_scenario("", vec![1.0]),
    };
    if let Some(name) = &args.scenario {
        cfg.scenario = Some(name.clone());
        cfg.inline = None;
    }
    if cfg.scenario.as_deref() == Some("") {
        return Err(ConfigError::Invalid("give a config file or --scenario".into()));
    }
    cfg.validate()?;
    cfg.base_scenario()
}

/// Runs a parsed command line, writing to `out` and `err`; returns the exit code.
pub fn run_cli(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::ListScenarios => {
            for s in builtin_scenarios() {
                let _ = writeln!(out, "{:<26} {:<14} {}", s.name, s.controller.name(), s.description);
            }
            EXIT_OK
        }
        Command::Oracle(args) => {
            let s = match oracle_scenario(&args) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return EXIT_CONFIG_ERROR;
                }
            };
            match oracle(&s).and_then(|r| toml::to_string(&r).map_err(|e| e.to_string())) {
                Ok(text) => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    EXIT_RUN_FAILURE
                }
            }
        }
        Command::Run(args) => {
            let cfg = match resolve_run_config(&args) {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return EXIT_CONFIG_ERROR;
                }
            };
            let outcomes = match execute(&cfg) {
                Ok(o) => o,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return EXIT_CONFIG_ERROR;
                }
            };
            let name = outcomes.first().map(|o| o.scenario.clone()).unwrap_or_default();
            let _ = writeln!(out, "scenario {name}, {} frames, seed {}", cfg.frames, cfg.seed);
            let _ = write!(out, "{}", format_table(&outcomes));
            for o in outcomes.iter().filter(|o| o.result.is_err()) {
                let _ = writeln!(err, "run V={} failed", o.v);
            }
            exit_code(&outcomes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let args = RunArgs {
            scenario: Some("one_class".into()),
            v: vec![0.5, 2.0],
            frames: Some(10),
            ..RunArgs::default()
        };
        let cfg = resolve_run_config(&args).unwrap();
        assert_eq!(cfg.v, vec![0.5, 2.0]);
        assert_eq!(cfg.frames, 10);
    }

    #[test]
    fn parses_command_line() {
        let cli = Cli::try_parse_from([
            "renewal-sim",
            "run",
            "--scenario",
            "one_class",
            "--V",
            "0,0.3,1",
            "--emit",
            "both",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else { panic!() };
        assert_eq!(args.v, vec![0.0, 0.3, 1.0]);
        assert_eq!(args.emit, Some(Emit::Both));
    }

    #[test]
    fn oracle_for_one_class() {
        let s = crate::sim::builtin_scenario("one_class").unwrap();
        let r = oracle(&s).unwrap();
        assert!((r.power_opt - 7.0 / 15.0).abs() < 1e-9);
        assert!((r.dinkelbach_value - r.power_opt).abs() < 1e-9);
        assert!(oracle(&crate::sim::builtin_scenario("smart_device").unwrap()).is_err());
    }
}

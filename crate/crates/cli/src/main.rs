use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lcwall::io::{save_field_csv, save_json, save_zero_set_csv};
use lcwall::solver::{minimize_multistart_with, CandidateSummary, MultistartOptions};
use lcwall::verify::{grid_for, Suite, Verifier};
use lcwall::walls::{extract_zero_set_with, thomas_fermi_error, wall_deviation, TfComparison, ZeroSetOptions};
use lcwall::{threshold_report, validate_hypotheses, EnergyBreakdown, Field, ModelConfig, ThresholdMesh, ThresholdReport};

const EXIT_PARSE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_HYPOTHESES: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "lcwall", version, about = "Domain walls in illuminated nematic films")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the energy and write field.csv, energy.json, zeroset.csv and manifest.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seed of the random initial state.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Print the critical amplitudes a_* and a^* with the per-chord values.
    Thresholds {
        #[arg(long)]
        config: PathBuf,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run the acceptance checks; exits with status 4 if any fails.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "quick")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// One simulation per parameter value, summarized in sweep_summary.csv.
    ///
    /// Epsilon sweeps choose the grid for each value (spacing at most
    /// 0.4 eps, at most 512 nodes per axis). With --jobs 1 each run starts
    /// also from the previous minimizer.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Epsilon,
    A,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Epsilon => "epsilon",
            SweepParam::A => "a",
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<lcwall::Error> for Failure {
    fn from(e: lcwall::Error) -> Self {
        let code = match e {
            lcwall::Error::NotConverged { .. } | lcwall::Error::Divergence { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    let command_line: Vec<String> = std::env::args().collect();
    let outcome = match cli.command {
        Command::Simulate { config, out, seed } => simulate(&config, &out, seed, &command_line),
        Command::Thresholds { config, json } => thresholds(&config, json),
        Command::Verify { config, suite, seed } => verify(&config, &suite, seed),
        Command::Sweep {
            config,
            param,
            values,
            out,
            jobs,
            seed,
        } => sweep(&config, param, &values, &out, jobs, seed, &command_line),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lcwall: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: &Path) -> CliResult<ModelConfig> {
    ModelConfig::from_json_file(path).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn source_revision() -> String {
    option_env!("LCWALL_SOURCE_REV")
        .map(str::to_string)
        .unwrap_or_else(|| format!("lcwall-cli {}", env!("CARGO_PKG_VERSION")))
}

#[derive(Serialize)]
struct Manifest {
    config: serde_json::Value,
    command: Vec<String>,
    started_unix: f64,
    finished_unix: f64,
    outputs: Vec<String>,
    source_revision: String,
    seed: u64,
}

#[derive(Serialize)]
struct EnergyReport<'a> {
    energy: &'a EnergyBreakdown,
    residual: f64,
    converged: bool,
    steps_taken: usize,
    initializer: &'a str,
    final_dt: f64,
    candidates: &'a [CandidateSummary],
}

/// Field and zero set of one finished simulation.
struct Simulation {
    field: Field,
    energy: EnergyBreakdown,
    zero_set: lcwall::ZeroSet,
}

fn run_simulation(
    config: &ModelConfig,
    out: &Path,
    seed: u64,
    warm_start: Option<Field>,
    command_line: &[String],
) -> CliResult<Simulation> {
    let started = unix_seconds();
    std::fs::create_dir_all(out).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", out.display())))?;
    let options = MultistartOptions {
        seed,
        warm_start,
        ..MultistartOptions::default()
    };
    let result = minimize_multistart_with(config, &options)?;
    let zero_set = extract_zero_set_with(&result.field, &ZeroSetOptions::SOLVER_OUTPUT);

    let names = ["field.csv", "energy.json", "zeroset.csv", "manifest.json"];
    save_field_csv(&out.join(names[0]), &result.field)?;
    save_json(
        &out.join(names[1]),
        &EnergyReport {
            energy: &result.energy,
            residual: result.residual,
            converged: result.converged,
            steps_taken: result.steps_taken,
            initializer: &result.initializer_label,
            final_dt: result.final_dt,
            candidates: &result.candidates,
        },
    )?;
    save_zero_set_csv(&out.join(names[2]), &zero_set)?;
    let manifest = Manifest {
        config: config.to_json_value(),
        command: command_line.to_vec(),
        started_unix: started,
        finished_unix: unix_seconds(),
        outputs: names.iter().map(|n| out.join(n).display().to_string()).collect(),
        source_revision: source_revision(),
        seed,
    };
    save_json(&out.join(names[3]), &manifest)?;
    Ok(Simulation {
        field: result.field,
        energy: result.energy,
        zero_set,
    })
}

fn simulate(config_path: &Path, out: &Path, seed: u64, command_line: &[String]) -> CliResult<()> {
    let config = load_config(config_path)?;
    let sim = run_simulation(&config, out, seed, None, command_line)?;
    println!(
        "E = {:.12}  renormalized = {:.12}  zero-set polylines = {}",
        sim.energy.total,
        sim.energy.renormalized,
        sim.zero_set.polylines.len()
    );
    Ok(())
}

fn checked_report(config: &ModelConfig) -> CliResult<ThresholdReport> {
    let hyp = validate_hypotheses(config);
    if !hyp.passed() {
        return Err(Failure::new(
            EXIT_HYPOTHESES,
            format!("profile violates the hypotheses: {}", hyp.failures.join("; ")),
        ));
    }
    Ok(threshold_report(config, &ThresholdMesh::default())?)
}

fn thresholds(config_path: &Path, json: bool) -> CliResult<()> {
    let config = load_config(config_path)?;
    let report = checked_report(&config)?;
    if json {
        let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
        // a closed pipe (for example `| head`) is not an error
        let _ = writeln!(std::io::stdout().lock(), "{text}");
        return Ok(());
    }
    if !report.upper_finite_guaranteed {
        eprintln!("warning: f_rad'(0) <= 0, a^* need not be finite");
    }
    println!("a_*          {:.9}  at ({:.6}, {:.6})", report.a_star, report.argmin[0], report.argmin[1]);
    println!("a^*          {:.9}  at ({:.6}, {:.6})", report.a_star_sup, report.argmax[0], report.argmax[1]);
    println!("middle bound {:.9}", report.middle_bound);
    println!(
        "mesh change  {:.1e} / {:.1e}",
        report.mesh_error_lower, report.mesh_error_upper
    );
    println!();
    println!("{:>12} {:>14} {:>14}", "x2", "a_*(x2)", "a^*(x2)");
    for s in &report.slices {
        println!("{:>12.6} {:>14.9} {:>14.9}", s.x2, s.a_lower, s.a_upper);
    }
    Ok(())
}

fn verify(config_path: &Path, suite: &str, seed: u64) -> CliResult<()> {
    let config = load_config(config_path)?;
    let suite: Suite = suite.parse().map_err(|e: lcwall::Error| Failure::new(EXIT_PARSE, e.to_string()))?;
    let verifier = Verifier::new(config, suite, seed).with_log(|line| eprintln!("  {line}"));
    let mut failed = Vec::new();
    for id in 1..=lcwall::verify::CHECK_NAMES.len() {
        let outcome = verifier.run_check(id);
        println!("{outcome}");
        if !outcome.passed {
            failed.push(format!("[{}] {}", outcome.id, outcome.name));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_VERIFY,
            format!("{} check(s) failed: {}", failed.len(), failed.join(", ")),
        ))
    }
}

fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let values: Result<Vec<f64>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("bad value '{s}': {e}")))
        .collect();
    let values = values.map_err(|m| Failure::new(EXIT_PARSE, m))?;
    if values.is_empty() {
        return Err(Failure::new(EXIT_PARSE, "empty --values list"));
    }
    Ok(values)
}

struct SweepRow {
    value: f64,
    energy: f64,
    renormalized: f64,
    wall_deviation: f64,
    regime: String,
    thomas_fermi_error: f64,
    status: String,
}

fn sweep_config(base: &ModelConfig, param: SweepParam, value: f64) -> CliResult<ModelConfig> {
    let config = match param {
        SweepParam::A => base.clone().with_a(value),
        SweepParam::Epsilon => {
            let grid = grid_for(value, base.grid.half_extent)?;
            base.clone().with_epsilon(value).with_grid(grid)
        }
    };
    config.validate()?;
    Ok(config)
}

fn sweep_entry(
    base: &ModelConfig,
    report: &ThresholdReport,
    param: SweepParam,
    value: f64,
    dir: &Path,
    seed: u64,
    warm: Option<Field>,
    command_line: &[String],
) -> (SweepRow, Option<Field>) {
    let failed = |status: String| SweepRow {
        value,
        energy: f64::NAN,
        renormalized: f64::NAN,
        wall_deviation: f64::NAN,
        regime: String::new(),
        thomas_fermi_error: f64::NAN,
        status,
    };
    let config = match sweep_config(base, param, value) {
        Ok(c) => c,
        Err(f) => return (failed(f.message), None),
    };
    let sim = match run_simulation(&config, dir, seed, warm, command_line) {
        Ok(s) => s,
        Err(f) => return (failed(f.message), None),
    };
    let verdict = wall_deviation(&sim.zero_set, &config, config.a, report);
    let tf = thomas_fermi_error(&sim.field, &config, 0.8, TfComparison::Unsigned);
    let row = SweepRow {
        value,
        energy: sim.energy.total,
        renormalized: sim.energy.renormalized,
        wall_deviation: verdict.as_ref().map(|v| v.deviation_to_predicted).unwrap_or(f64::NAN),
        regime: verdict
            .as_ref()
            .map(|v| v.observed_regime.as_str().to_string())
            .unwrap_or_default(),
        thomas_fermi_error: tf.unwrap_or(f64::NAN),
        status: "ok".into(),
    };
    (row, Some(sim.field))
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    config_path: &Path,
    param: SweepParam,
    values: &str,
    out: &Path,
    jobs: usize,
    seed: u64,
    command_line: &[String],
) -> CliResult<()> {
    let base = load_config(config_path)?;
    let values = parse_values(values)?;
    if jobs == 0 {
        return Err(Failure::new(EXIT_PARSE, "--jobs must be at least 1"));
    }
    let report = checked_report(&base)?;
    std::fs::create_dir_all(out).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", out.display())))?;
    let dir_of = |k: usize, v: f64| out.join(format!("run_{k:03}_{}_{v}", param.name()));

    let rows: Vec<SweepRow> = if jobs == 1 {
        let mut warm: Option<Field> = None;
        let mut rows = Vec::with_capacity(values.len());
        for (k, &v) in values.iter().enumerate() {
            let (row, field) = sweep_entry(&base, &report, param, v, &dir_of(k, v), seed, warm.take(), command_line);
            eprintln!("  {}={v}: {}", param.name(), row.status);
            warm = field;
            rows.push(row);
        }
        rows
    } else {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<SweepRow>>> = Mutex::new((0..values.len()).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(values.len()) {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::SeqCst);
                    let Some(&v) = values.get(k) else { break };
                    let (row, _) = sweep_entry(&base, &report, param, v, &dir_of(k, v), seed, None, command_line);
                    eprintln!("  {}={v}: {}", param.name(), row.status);
                    slots.lock().expect("sweep slots poisoned")[k] = Some(row);
                });
            }
        });
        slots
            .into_inner()
            .expect("sweep slots poisoned")
            .into_iter()
            .map(|r| r.expect("every sweep entry ran"))
            .collect()
    };

    let mut text = String::from("value,energy,renormalized,wall_deviation,regime,thomas_fermi_error,status\n");
    for r in &rows {
        text.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{}\n",
            r.value,
            r.energy,
            r.renormalized,
            r.wall_deviation,
            r.regime,
            r.thomas_fermi_error,
            r.status.replace(['\n', ','], " ")
        ));
    }
    let summary = out.join("sweep_summary.csv");
    std::fs::write(&summary, text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", summary.display())))?;
    let succeeded = rows.iter().filter(|r| r.status == "ok").count();
    println!("{succeeded}/{} runs succeeded; summary in {}", rows.len(), summary.display());
    if succeeded == 0 {
        return Err(Failure::new(EXIT_NOT_CONVERGED, "no sweep run succeeded"));
    }
    Ok(())
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equilib::classical::{mixed_equilibration_bound, write_orbit_csv};
use equilib::quantum::{max_outcomes_for_equilibration, quantum_bound, GapTable};
use equilib_bench::runner::DEFAULT_CLASSICAL_STEPS;
use equilib_bench::suite::run_builtin;
use equilib_bench::{
    build_classical_pure, build_quantum, emit_report, exit_status, run_scenario, run_single,
    BenchError, BoundStatus, Format, RunOptions, RunRecord, Scenario, ScenarioKind,
};

#[derive(Debug, Parser)]
#[command(
    name = "equilib",
    version,
    about = "Measure equilibration and check its bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario once, ignoring its sweep table.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Write the orbit of a classical-pure run as CSV.
        #[arg(long)]
        orbit: Option<PathBuf>,
        /// Write the gap table of a quantum run as CSV.
        #[arg(long)]
        gaps: Option<PathBuf>,
    },
    /// Run every point of a scenario's sweep grid.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Print bound values for given parameters without simulating.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Time horizon (steps for classical maps).
    #[arg(long)]
    horizon: Option<f64>,
    /// Number of time samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance for equal energy gaps.
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            horizon: self.horizon,
            samples: self.samples,
            gap_tol: self.gap_tol,
        }
    }
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Number of measurement outcomes N.
    #[arg(long)]
    outcomes: usize,
    #[arg(long)]
    d_eff: Option<f64>,
    /// Maximum gap degeneracy D_G.
    #[arg(long, default_value_t = 1)]
    gap_degeneracy: usize,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Non-chaotic weight of a classical ensemble.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, BenchError> {
    match command {
        Command::Run {
            config,
            common,
            orbit,
            gaps,
        } => {
            let s = common.options().apply(&Scenario::from_path(&config)?)?;
            let record = run_single(&s)?;
            if let Some(path) = orbit {
                export_orbit(&s, &path)?;
            }
            if let Some(path) = gaps {
                export_gaps(&s, &path)?;
            }
            for (tol, dg) in &record.gap_sensitivity {
                eprintln!("D_G at gap tolerance {tol:e}: {dg}");
            }
            finish(&[record], &common)
        }
        Command::Sweep { config, common } => {
            let s = common.options().apply(&Scenario::from_path(&config)?)?;
            let records = run_scenario(&s)?;
            finish(&records, &common)
        }
        Command::Verify { common } => {
            let records = run_builtin(&common.options())?;
            finish(&records, &common)
        }
        Command::Bounds(args) => {
            print_bounds(&args)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, BenchError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| BenchError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes the report, prints a summary and maps the records to an exit
/// code.
fn finish(records: &[RunRecord], common: &Common) -> Result<ExitCode, BenchError> {
    let mut w = writer(&common.out)?;
    emit_report(records, common.format, &mut w)?;
    w.flush()?;

    let mut by_scenario: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for r in records {
        let e = by_scenario.entry(&r.scenario).or_default();
        e.0 += 1;
        if r.error.is_some() {
            e.1 += 1;
            eprintln!(
                "{} #{}: {}",
                r.scenario,
                r.point,
                r.error.as_deref().unwrap_or("")
            );
        }
        for (name, b) in r.bounds.all() {
            if b.status == BoundStatus::Violated {
                e.2 += 1;
                eprintln!(
                    "{} #{}: {name} violated (value {:?})",
                    r.scenario, r.point, b.value
                );
            }
        }
    }
    for (name, (runs, errors, violations)) in &by_scenario {
        eprintln!("{name}: {runs} runs, {errors} errors, {violations} violations");
    }
    Ok(ExitCode::from(exit_status(records)))
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        BenchError::Io(format!("{}: {e}", path.display()))
    })?))
}

fn export_orbit(s: &Scenario, path: &Path) -> Result<(), BenchError> {
    if s.kind != ScenarioKind::ClassicalPure {
        return Err(BenchError::config(
            "orbit",
            "only classical-pure scenarios have an orbit",
        ));
    }
    let (x, map, partition) = build_classical_pure(s)?;
    let steps = s.average.samples.unwrap_or(DEFAULT_CLASSICAL_STEPS);
    write_orbit_csv(create(path)?, &x, &map, &partition, steps)?;
    Ok(())
}

fn export_gaps(s: &Scenario, path: &Path) -> Result<(), BenchError> {
    if s.kind != ScenarioKind::Quantum {
        return Err(BenchError::config(
            "gaps",
            "only quantum scenarios have a gap table",
        ));
    }
    let sys = build_quantum(s)?;
    GapTable::build(&sys.hamiltonian, sys.gap_tol)?.write_csv(create(path)?)?;
    Ok(())
}

fn print_bounds(args: &BoundsArgs) -> Result<(), BenchError> {
    let mut values: BTreeMap<&str, f64> = BTreeMap::new();
    if let Some(d_eff) = args.d_eff {
        values.insert(
            "thm5_bound",
            quantum_bound(args.outcomes, args.gap_degeneracy, d_eff)?,
        );
        if let Some(eps) = args.epsilon {
            let n = max_outcomes_for_equilibration(eps, d_eff, args.gap_degeneracy)?;
            values.insert("corollary_max_outcomes", n as f64);
        }
    }
    if let Some(delta) = args.delta {
        values.insert(
            "thm3_bound",
            mixed_equilibration_bound(args.outcomes, delta)?,
        );
    }
    if let Some(eps) = args.epsilon {
        values.insert("thm1_threshold", 1.0 - eps / 2.0);
        values.insert("thm2_threshold", 1.0 - eps);
    }
    if values.is_empty() {
        return Err(BenchError::config(
            "bounds",
            "nothing to compute: pass --d-eff, --delta or --epsilon",
        ));
    }
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&values)?)?,
        Format::Csv => {
            writeln!(out, "name,value")?;
            for (k, v) in &values {
                writeln!(out, "{k},{v}")?;
            }
        }
    }
    Ok(())
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rapshare::acceptance::{self, AcceptanceOptions, CriterionOutcome};
use rapshare::experiments::{gnuplot_script, Experiment, ExperimentConfig, VERSION};
use rapshare::Error;

const EXIT_CRITERIA_FAILED: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "rapshare", version, about = "Spectrum-sharing capacity and random aerial precoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ergodic capacity against the average interference limit.
    CapacitySweep(Common),
    /// Interference-amplitude densities before and after precoding.
    RapPdf(Common),
    /// Interference-amplitude trajectories before and after precoding.
    RapTimeseries(Common),
    /// Capacity against the number of basis patterns.
    BasisSweep(Common),
    /// Run the acceptance criteria and print one PASS/FAIL line each.
    Acceptance {
        #[command(flatten)]
        common: Common,
        /// Run only this criterion (1-12).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=12))]
        criterion: Option<u8>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Also write a gnuplot script next to the output file.
    #[arg(long)]
    gnuplot: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidParameter(_) => EXIT_CONFIG,
            Error::Io(_) => 1,
            _ => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(n) = common.samples {
        cfg.n_samples = n;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    if common.gnuplot && cfg.output.is_none() {
        return Err(config_error("--gnuplot needs an output file (--out or `output`)"));
    }
    Ok(cfg)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(e).into()),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io(e).into()),
    }
}

fn run_experiment(exp: Experiment, common: &Common) -> Result<(), Failure> {
    let cfg = load_config(common)?;
    let table = exp.run(&cfg)?;
    write_output(cfg.output.as_deref(), &table.to_csv(&cfg)?)?;
    if common.gnuplot {
        if let Some(out) = &cfg.output {
            let script = gnuplot_script(exp, &cfg, &out.display().to_string());
            fs::write(out.with_extension("gp"), script).map_err(Error::Io)?;
        }
    }
    if table.failures > 0 {
        return Err(Failure {
            code: EXIT_SOLVER,
            message: format!("{} rows failed to solve; see the status column", table.failures),
        });
    }
    Ok(())
}

fn outcomes_csv(outcomes: &[CriterionOutcome], cfg: &ExperimentConfig) -> Vec<u8> {
    let mut s = format!(
        "# experiment=acceptance config_sha256={} seed={} version={VERSION}\nid,name,status,detail\n",
        cfg.hash(),
        cfg.seed
    );
    for o in outcomes {
        let quote = |t: &str| format!("\"{}\"", t.replace('"', "\"\""));
        s.push_str(&format!(
            "{},{},{},{}\n",
            o.id,
            quote(o.name),
            if o.passed { "PASS" } else { "FAIL" },
            quote(&o.detail)
        ));
    }
    s.into_bytes()
}

fn run_acceptance(common: &Common, criterion: Option<u8>) -> Result<(), Failure> {
    let cfg = load_config(common)?;
    let opts = AcceptanceOptions {
        seed: cfg.seed,
        n_samples: cfg.n_samples,
    };
    let ids: Vec<u8> = criterion.map_or_else(|| (1..=12).collect(), |c| vec![c]);
    let mut outcomes = Vec::new();
    for id in ids {
        let o = acceptance::run(id, &opts);
        eprintln!("{}", o.line());
        outcomes.push(o);
    }
    if let Some(out) = &cfg.output {
        write_output(Some(out), &outcomes_csv(&outcomes, &cfg))?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: EXIT_CRITERIA_FAILED,
            message: format!("{failed} of {} criteria failed", outcomes.len()),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CapacitySweep(c) => run_experiment(Experiment::CapacitySweep, c),
        Command::RapPdf(c) => run_experiment(Experiment::RapPdf, c),
        Command::RapTimeseries(c) => run_experiment(Experiment::RapTimeseries, c),
        Command::BasisSweep(c) => run_experiment(Experiment::BasisSweep, c),
        Command::Acceptance { common, criterion } => run_acceptance(common, *criterion),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rapshare: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

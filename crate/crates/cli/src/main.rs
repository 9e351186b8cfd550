use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use nncc_cli::config::ConfigFile;
use nncc_cli::spec::{ExperimentSpec, Spacing, SweepVar};

#[derive(Parser)]
#[command(name = "nncc", version, about = "Energy of nearest-neighbour cooperative uplinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dataset of one figure (3, 4, 5 or 6) as CSV.
    Figure {
        number: u8,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one variable and write the dataset as CSV.
    Sweep {
        #[arg(long)]
        var: Option<SweepVar>,
        #[arg(long)]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        spacing: Option<Spacing>,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-validate analytic results against simulation.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file with parameter and run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per estimate.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Distance U1 to base station (m).
    #[arg(long)]
    r1: Option<f64>,
    /// Fixed U1-U2 distance (m); nearest neighbour of the PPP when absent.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long = "f_s")]
    f_s: Option<f64>,
    #[arg(long = "b_s")]
    b_s: Option<f64>,
    #[arg(long = "f_c")]
    f_c: Option<f64>,
    #[arg(long = "b_c")]
    b_c: Option<f64>,
    #[arg(long = "g_u1_db", allow_hyphen_values = true)]
    g_u1_db: Option<f64>,
    #[arg(long = "g_u2_db", allow_hyphen_values = true)]
    g_u2_db: Option<f64>,
    #[arg(long = "g_bs_db", allow_hyphen_values = true)]
    g_bs_db: Option<f64>,
    #[arg(long = "gap_s_db", allow_hyphen_values = true)]
    gap_s_db: Option<f64>,
    #[arg(long = "gap_c_db", allow_hyphen_values = true)]
    gap_c_db: Option<f64>,
    #[arg(long = "n0")]
    n0: Option<f64>,
    #[arg(long = "sigma2_short")]
    sigma2_short: Option<f64>,
    #[arg(long = "sigma2_cell")]
    sigma2_cell: Option<f64>,
    #[arg(long = "rho")]
    rho: Option<f64>,
    #[arg(long = "p_out_target")]
    p_out_target: Option<f64>,
    #[arg(long = "rate")]
    rate: Option<f64>,
    /// Multiplies the cooperative cellular coefficients (fault injection).
    #[arg(long = "eta-scale", hide = true, default_value_t = 1.0)]
    eta_scale: f64,
}

impl Common {
    fn layer(&self) -> ConfigFile {
        ConfigFile {
            f_s: self.f_s,
            b_s: self.b_s,
            f_c: self.f_c,
            b_c: self.b_c,
            g_u1_db: self.g_u1_db,
            g_u2_db: self.g_u2_db,
            g_bs_db: self.g_bs_db,
            gap_s_db: self.gap_s_db,
            gap_c_db: self.gap_c_db,
            n0: self.n0,
            sigma2_short: self.sigma2_short,
            sigma2_cell: self.sigma2_cell,
            rho: self.rho,
            p_out_target: self.p_out_target,
            rate: self.rate,
            r1: self.r1,
            r: self.r,
            seed: self.seed,
            trials: self.trials,
            workers: self.workers,
            out: self.out.clone(),
            ..Default::default()
        }
    }

    fn build(&self, mut spec: ExperimentSpec, extra: ConfigFile) -> Result<ExperimentSpec> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        spec.apply(&file.merged(self.layer()).merged(extra))?;
        spec.eta_scale = self.eta_scale;
        Ok(spec)
    }
}

fn spec_from(cli: Cli) -> Result<ExperimentSpec> {
    match cli.command {
        Command::Figure { number, common } => common.build(ExperimentSpec::figure(number)?, ConfigFile::default()),
        Command::Sweep {
            var,
            min,
            max,
            count,
            spacing,
            common,
        } => {
            let sweep = ConfigFile {
                sweep_var: var,
                sweep_min: min,
                sweep_max: max,
                sweep_count: count,
                sweep_spacing: spacing,
                ..Default::default()
            };
            common.build(ExperimentSpec::sweep(), sweep)
        }
        Command::Validate { common } => common.build(ExperimentSpec::validate_run(), ConfigFile::default()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let spec = spec_from(cli)?;
    let out = nncc_cli::execute(&spec)?;
    match &spec.out {
        Some(path) => std::fs::write(path, &out.bytes)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?,
        None => std::io::stdout().lock().write_all(&out.bytes)?,
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("nncc: validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("nncc: {e:#}");
            ExitCode::from(2)
        }
    }
}

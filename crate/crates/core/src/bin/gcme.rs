use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gcme::cli::{self, Command, Overrides, RunConfig, ToleranceProfile};

#[derive(Parser)]
#[command(name = "gcme", version, about = "Zero-curvature checks for moving-frame equations")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// INI config with [grid], [scenario] and [run] sections
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.json and exports
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    tolerance_profile: Option<Profile>,
    /// Three λ values for the pencil sweep, e.g. "0,1,-1"
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Disable group re-projection during transport
    #[arg(long, global = true)]
    no_reproject: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Zero-curvature residuals and su(2)/so(3) equivalence
    Check,
    /// Operator pencil coefficients and λ sweep
    Lax,
    /// Bogomolny residuals and pencil mapping
    EmbedYmhb,
    /// Self-dual reduction identities
    EmbedSdym,
    /// Plaquette holonomy and path independence
    Transport,
    /// Curve family from transported frames
    Reconstruct,
    /// Search the sign-convention space and write convention.json
    Calibrate,
    /// Sample the scenario and write field.csv
    Gen,
}

#[derive(ValueEnum, Clone, Copy)]
enum Profile {
    Strict,
    Default,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match &args.config {
        Some(p) => match RunConfig::from_file(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(cli::EXIT_CONFIG as u8);
            }
        },
        None => RunConfig::default(),
    };
    let lambdas = match args.lambda.as_deref().map(cli::parse_lambdas).transpose() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::EXIT_CONFIG as u8);
        }
    };
    cfg.apply(&Overrides {
        out: args.out,
        tolerance_profile: args.tolerance_profile.map(|p| match p {
            Profile::Strict => ToleranceProfile::Strict,
            Profile::Default => ToleranceProfile::Default,
        }),
        lambdas,
        no_reproject: args.no_reproject,
    });
    let command = match args.command {
        Cmd::Check => Command::Check,
        Cmd::Lax => Command::Lax,
        Cmd::EmbedYmhb => Command::EmbedYmhb,
        Cmd::EmbedSdym => Command::EmbedSdym,
        Cmd::Transport => Command::Transport,
        Cmd::Reconstruct => Command::Reconstruct,
        Cmd::Calibrate => Command::Calibrate,
        Cmd::Gen => Command::Gen,
    };
    let outcome = cli::run(command, &cfg);
    if let Some(r) = &outcome.report {
        for c in &r.checks {
            println!("{:<48} {:>12.3e} <= {:>9.1e}  {}", c.name, c.value, c.tolerance, if c.passed { "ok" } else { "FAIL" });
        }
        println!("report: {}", cfg.out.join("report.json").display());
    }
    ExitCode::from(outcome.exit_code as u8)
}

use clap::{Parser, Subcommand};

use chaindecay_cli::config::{resolve, AppError, CommonArgs};
use chaindecay_cli::run::run;

/// Survival-probability dynamics of a surface excitation on a semi-infinite
/// tight-binding chain: spectral closed forms, exact evolution oracles,
/// decay-regime analysis and projective-measurement protocols.
#[derive(Parser)]
#[command(name = "chaindecay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the surface local density of states over the band
    Ldos(CommonArgs),
    /// Compute the survival probability P00(t) on a time grid
    Evolve(CommonArgs),
    /// Crossover times, survival-collapse detection and Gamma_eff trace
    Regimes(CommonArgs),
    /// Sweep projective-measurement periods and classify Zeno/anti-Zeno
    Zeno(CommonArgs),
    /// Emit chain coefficients (star recursion or chain truncation)
    Tridiag(CommonArgs),
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successful exits; anything else is usage.
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };

    let (name, args) = match &cli.command {
        Command::Ldos(a) => ("ldos", a),
        Command::Evolve(a) => ("evolve", a),
        Command::Regimes(a) => ("regimes", a),
        Command::Zeno(a) => ("zeno", a),
        Command::Tridiag(a) => ("tridiag", a),
    };

    match resolve(name, args).and_then(|config| run(&config)) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            0
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `chaindecay {name} --help` for usage");
            1
        }
        Err(AppError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            2
        }
    }
}

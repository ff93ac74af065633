use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sdmorph::constructions::catalog::Params;
use sdmorph_cli::commands::{self, Format, SweepArgs};
use sdmorph_cli::error::{CliError, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "sdmorph",
    version,
    about = "Residual checks for harmonic morphisms from four-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the scene's checks at every sample point.
    Report {
        scene: String,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long)]
        out: Option<String>,
    },
    /// Evaluate a comma-separated list of checks.
    Verify {
        scene: String,
        #[arg(long)]
        checks: String,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long)]
        out: Option<String>,
    },
    /// Recover the type of the submersion along one fibre.
    Classify {
        scene: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Scan a numeric scene value given by a dot path.
    Sweep {
        scene: String,
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        steps: usize,
        /// Also locate the minimum of the first check.
        #[arg(long)]
        refine: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// List or describe the built-in metrics, forms and potentials.
    Catalog {
        #[command(subcommand)]
        action: Option<CatalogAction>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List {
        #[arg(long)]
        json: bool,
    },
    Describe {
        name: String,
        /// Parameter override, `name=value`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
    },
}

fn parse_params(raw: &[String]) -> Result<Params, CliError> {
    let mut p = Params::new();
    for s in raw {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("parameter '{s}' is not name=value")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::usage(format!("parameter '{k}' has non-numeric value '{v}'")))?;
        p.insert(k.to_string(), v);
    }
    Ok(p)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Report { scene, format, out } => {
            commands::report(&scene, format.into(), out.as_deref())
        }
        Command::Verify {
            scene,
            checks,
            format,
            out,
        } => commands::verify(&scene, &checks, format.into(), out.as_deref()),
        Command::Classify { scene, out } => commands::classify(&scene, out.as_deref()),
        Command::Sweep {
            scene,
            param,
            range,
            steps,
            refine,
            out,
        } => commands::sweep(SweepArgs {
            scene: &scene,
            param: &param,
            range: &range,
            steps,
            refine,
            out: out.as_deref(),
        }),
        Command::Catalog { action } => {
            match action.unwrap_or(CatalogAction::List { json: false }) {
                CatalogAction::List { json } => commands::catalog_list(json),
                CatalogAction::Describe { name, params } => {
                    commands::catalog_describe(&name, &parse_params(&params)?)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("sdmorph: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

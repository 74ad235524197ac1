//! Command-line front end for coarse categorical data inference.

mod commands;
mod formats;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use coarsedata::{sample_coarse, Error};

use commands::Rendered;

/// Errors are split by exit code: bad input exits 2, numerical failure 3.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::NonConvergence { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "coarsedata",
    version,
    about = "Likelihood inference from coarse (set-valued) categorical data"
)]
struct Cli {
    /// Absolute tolerance for predicate comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized operations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the car conditions of a (theta, lambda) pair.
    Check {
        /// Model file with theta and lambda entries.
        model_file: PathBuf,
    },
    /// Fit maximum-likelihood estimates under a coarsening class.
    Fit {
        observations: PathBuf,
        /// Likelihood to maximize: fv, wcar or scar.
        #[arg(long)]
        class: String,
        /// Complete-data model: saturated, paired-binary or fixed-support:<set>.
        #[arg(long)]
        model: Option<String>,
        /// Restrict the fit to a support (comma-separated labels).
        #[arg(long)]
        support: Option<String>,
        /// Report every profile maximum instead of only the best.
        #[arg(long)]
        all_maxima: bool,
        /// Grid resolution per axis for parametric fits.
        #[arg(long, default_value_t = 201)]
        grid_steps: usize,
        /// Iteration cap override for the expectation-maximization loop.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Tabulate face-value and profile likelihoods.
    Profile {
        observations: PathBuf,
        /// Distribution to evaluate (comma-separated probabilities); repeatable.
        #[arg(long)]
        theta: Vec<String>,
        /// Model file whose theta entry is evaluated.
        #[arg(long)]
        model_file: Option<PathBuf>,
        /// Scan a parametric model's strata instead of fixed points.
        #[arg(long)]
        model: Option<String>,
        /// Grid resolution for the stratum scan.
        #[arg(long, default_value_t = 0.005)]
        grid_step: f64,
    },
    /// Decide compatibility of a distribution with the observations.
    Compat {
        observations: PathBuf,
        /// Distribution to check (comma-separated probabilities).
        #[arg(long)]
        theta: Option<String>,
        /// Model file whose theta entry is checked.
        #[arg(long)]
        model_file: Option<PathBuf>,
        /// Coarsening class: sat, wcar, scar or all.
        #[arg(long, default_value = "all")]
        class: String,
    },
    /// Compute a correction factor and its maximizing set values.
    Cfactor {
        observations: PathBuf,
        /// Support for the weak-car factor (comma-separated labels).
        #[arg(long, conflicts_with = "scar")]
        support: Option<String>,
        /// Compute the strong-car factor instead.
        #[arg(long)]
        scar: bool,
    },
    /// Enumerate the extremal completions of the observations.
    Hull { observations: PathBuf },
    /// Likelihood-ratio statistic of the strong-car restriction.
    ScarTest {
        observations: PathBuf,
        /// Complete-data model for the restricted fit.
        #[arg(long)]
        model: Option<String>,
    },
    /// Draw coarse observations from a (theta, lambda) pair.
    Simulate {
        /// Model file with theta and lambda entries.
        #[arg(long)]
        model_file: PathBuf,
        /// Number of observations to draw.
        #[arg(long)]
        draws: u64,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_sample(path: &PathBuf) -> Result<coarsedata::ObservedSample, CliError> {
    formats::read_observations(&read_file(path)?)
}

fn run(cli: Cli) -> Result<Option<Rendered>, CliError> {
    let json = cli.format == Format::Json;
    let rendered = match &cli.command {
        Command::Check { model_file } => {
            let model = formats::read_model(&read_file(model_file)?)?;
            commands::cmd_check(&model, cli.tol, json)?
        }
        Command::Fit {
            observations,
            class,
            model,
            support,
            all_maxima,
            grid_steps,
            max_iter,
        } => {
            let sample = load_sample(observations)?;
            let args = commands::FitArgs {
                class: class.clone(),
                model: model.clone(),
                support: support.clone(),
                all_maxima: *all_maxima,
                grid_steps: *grid_steps,
                max_iter: *max_iter,
            };
            commands::cmd_fit(&sample, &args, json)?
        }
        Command::Profile {
            observations,
            theta,
            model_file,
            model,
            grid_step,
        } => {
            let sample = load_sample(observations)?;
            if let Some(name) = model {
                commands::cmd_profile_grid(&sample, name, *grid_step, json)?
            } else {
                let mut thetas = Vec::new();
                for entry in theta {
                    thetas.push(formats::parse_theta(sample.world(), entry)?);
                }
                if let Some(path) = model_file {
                    let file = formats::read_model(&read_file(path)?)?;
                    if file.world != *sample.world() {
                        return Err(CliError::Input(
                            "model file and observations disagree on the world".into(),
                        ));
                    }
                    thetas.extend(file.resolve_theta()?);
                }
                if thetas.is_empty() {
                    return Err(CliError::Input(
                        "profile needs --theta, --model-file or --model".into(),
                    ));
                }
                commands::cmd_profile_thetas(&sample, &thetas, json)?
            }
        }
        Command::Compat {
            observations,
            theta,
            model_file,
            class,
        } => {
            let sample = load_sample(observations)?;
            let theta = match (theta, model_file) {
                (Some(entry), _) => formats::parse_theta(sample.world(), entry)?,
                (None, Some(path)) => {
                    let file = formats::read_model(&read_file(path)?)?;
                    if file.world != *sample.world() {
                        return Err(CliError::Input(
                            "model file and observations disagree on the world".into(),
                        ));
                    }
                    file.resolve_theta()?.ok_or_else(|| {
                        CliError::Input("model file carries no theta entry".into())
                    })?
                }
                (None, None) => {
                    return Err(CliError::Input(
                        "compat needs --theta or --model-file".into(),
                    ))
                }
            };
            commands::cmd_compat(&sample, &theta, class, cli.tol, json)?
        }
        Command::Cfactor {
            observations,
            support,
            scar,
        } => {
            let sample = load_sample(observations)?;
            let support = match (support, scar) {
                (Some(labels), false) => {
                    let labels: Vec<&str> = labels.split(',').map(str::trim).collect();
                    Some(
                        sample
                            .world()
                            .set_from_labels(&labels)
                            .map_err(|e| CliError::Input(format!("--support: {e}")))?,
                    )
                }
                (None, true) => None,
                _ => {
                    return Err(CliError::Input(
                        "cfactor needs exactly one of --support or --scar".into(),
                    ))
                }
            };
            commands::cmd_cfactor(&sample, support.as_ref(), json)?
        }
        Command::Hull { observations } => {
            let sample = load_sample(observations)?;
            commands::cmd_hull(&sample, json)?
        }
        Command::ScarTest {
            observations,
            model,
        } => {
            let sample = load_sample(observations)?;
            commands::cmd_scar_test(&sample, model.as_deref().unwrap_or("saturated"), json)?
        }
        Command::Simulate {
            model_file,
            draws,
            out,
        } => {
            let model = formats::read_model(&read_file(model_file)?)?;
            let theta = model
                .theta
                .ok_or_else(|| CliError::Input("simulate needs a theta entry".into()))?;
            let lambda = model
                .lambda
                .ok_or_else(|| CliError::Input("simulate needs a lambda entry".into()))?;
            let sample = sample_coarse(&theta, &lambda, *draws, cli.seed)?;
            let text = formats::write_observations(&sample);
            match out {
                Some(path) => {
                    std::fs::write(path, &text)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    Rendered::Text(format!(
                        "wrote {} observations to {}\n",
                        sample.total(),
                        path.display()
                    ))
                }
                None => Rendered::Text(text),
            }
        }
    };
    Ok(Some(rendered))
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Some(Rendered::Text(text))) => print!("{text}"),
        Ok(Some(Rendered::Json(value))) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("valid json")
            )
        }
        Ok(None) => {}
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}

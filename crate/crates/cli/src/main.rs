use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use texbank::{cmd_bank_dump, cmd_classify, cmd_extract, cmd_synth, CliError, RunConfig, SynthRequest};
use texbank_core::synth::{corpus_frequency, SynthKind, SynthSpec};

#[derive(Parser)]
#[command(name = "texbank", version, about = "Gabor filter-bank texture features and leave-one-out classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract fused features for every image in a manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        /// JSON run configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: logical cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Leave-one-out Gaussian Bayes classification of a feature CSV.
    Classify {
        #[arg(long)]
        features: PathBuf,
        /// Output prefix for `.confusion.csv` and `.report.txt`.
        #[arg(long)]
        out: PathBuf,
        /// Configuration label for the report row.
        #[arg(long)]
        name: Option<String>,
    },
    /// Generate synthetic textures with a manifest.
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 512)]
        side: usize,
        #[arg(long)]
        out: PathBuf,
        /// fbm: Hurst exponent.
        #[arg(long, default_value_t = 0.5)]
        hurst: f64,
        /// grating: cycles/image-width (default: mid-bank frequency).
        #[arg(long)]
        frequency: Option<f64>,
        /// grating: radians.
        #[arg(long, default_value_t = 0.0)]
        orientation: f64,
        /// grating: radians.
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
        /// grating: additive noise standard deviation.
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        /// grf: horizontal, vertical, diagonal and anti-diagonal interactions.
        #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [0.4, 0.0, 0.0, 0.0])]
        beta: Vec<f64>,
    },
    /// Write the filter bank layout as JSON.
    Bank {
        #[arg(long, default_value_t = 512)]
        nc: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Corpus,
    Grating,
    Fbm,
    Grf,
    Noise,
}

fn load_config(path: Option<&PathBuf>) -> texbank::Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> texbank::Result<()> {
    match cli.command {
        Command::Extract { manifest, config, out, jobs } => {
            let config = load_config(config.as_ref())?;
            let table = cmd_extract(&manifest, &config, &out, jobs)?;
            eprintln!("{} samples x {} features -> {}", table.rows.len(), table.names.len(), out.display());
        }
        Command::Classify { features, out, name } => {
            let report = cmd_classify(&features, &out, name.as_deref())?;
            print!("{}", report.text);
        }
        Command::Synth { kind, seed, per_class, side, out, hurst, frequency, orientation, phase, noise_sigma, beta } => {
            let single = |kind| SynthRequest::Single(SynthSpec::new(kind, side, seed));
            let request = match kind {
                Kind::Corpus => SynthRequest::Corpus { seed, per_class, side },
                Kind::Grating => {
                    let frequency = match frequency {
                        Some(f) => f,
                        None => corpus_frequency(side)?,
                    };
                    single(SynthKind::Grating { frequency, orientation, phase, noise_sigma })
                }
                Kind::Fbm => single(SynthKind::Fbm { hurst }),
                Kind::Grf => {
                    let interactions: [f64; 4] =
                        beta.try_into().map_err(|_| CliError::Usage("--beta takes four values".into()))?;
                    single(SynthKind::GrfTexture { interactions })
                }
                Kind::Noise => single(SynthKind::Noise),
            };
            let manifest = cmd_synth(&request, &out)?;
            eprintln!("{} images -> {}", manifest.len(), out.display());
        }
        Command::Bank { nc, config, out } => {
            let config = load_config(config.as_ref())?;
            let dump = cmd_bank_dump(&config, nc, &out)?;
            eprintln!("{} filters -> {}", dump.filters.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

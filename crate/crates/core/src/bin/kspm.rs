//! Command line surface for the sand pile laboratory.

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kspm::avalanche::{AvalancheLog, SnapshotPolicy};
use kspm::render;
use kspm::sandpile::{fixed_point, ModelParams};
use kspm::transducer::{parse_word, render_word, Machine, OutputMode};
use kspm::verify;
use kspm::wave::theorem_sweep;
use kspm::words::{is_alternating_prefix, wave_step_bound, wave_steps};
use kspm::Error;

#[derive(Debug, Parser)]
#[command(name = "kspm", version, about = "Kadanoff sand pile laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the fixed point of N stacked grains.
    Fixedpoint {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: u64,
        /// json (slope array), csv (column,slope,height) or ascii staircase.
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Render or stream the avalanches building a fixed point.
    Avalanches {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: u64,
        /// ascii, svg (long avalanches, one per line) or jsonl (all).
        #[arg(long, default_value = "ascii")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Interval word transducer tools.
    #[command(subcommand)]
    Transducer(TransducerCommand),
    /// Run a verification suite.
    Verify {
        /// core-laws, avalanche-lemmas, appendix-words, theorem3, conjectureD.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        n_max: Option<u64>,
        /// Sample count for randomized checks.
        #[arg(long)]
        samples: Option<u64>,
        /// text or json.
        #[arg(long, default_value = "text")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full sweep table of wave columns, density columns and widths.
    Sweep {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulation-vs-transducer agreement report with per-interval diffs.
    Pipeline {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
enum TransducerCommand {
    /// Build the machine and export it as DOT.
    Build {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value = "algorithm-exact")]
        mode: OutputMode,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one word through the machine.
    Run {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        input: String,
        #[arg(long, default_value = "algorithm-exact")]
        mode: OutputMode,
        /// Render output with letters a/b (D = 3 only).
        #[arg(long)]
        ab: bool,
    },
    /// Iterate the image map until the word is an alternating prefix.
    Steps {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        input: String,
        #[arg(long, default_value = "figure-suppressed")]
        mode: OutputMode,
        #[arg(long)]
        ab: bool,
    },
}

fn emit(output: &OutputArgs, content: &str) -> std::io::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, content),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())
        }
    }
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    let mut all_passed = true;
    match cli.command {
        Command::Fixedpoint { d, n, format, output } => {
            let params = ModelParams::new(d)?;
            let config = fixed_point(&params, n, |_, _, _| {})?;
            let text = match format.as_str() {
                "json" => format!("{}\n", serde_json::to_string(&config).unwrap()),
                "ascii" => render::heights_ascii(config.heights().values()),
                "csv" => {
                    let heights = config.heights();
                    let mut s = String::from("column,slope,height\n");
                    for (i, &h) in heights.values().iter().enumerate() {
                        s.push_str(&format!("{i},{},{h}\n", config.slope(i)));
                    }
                    s
                }
                other => return Err(Error::Parse(format!("unknown format `{other}`"))),
            };
            emit(&output, &text).map_err(io_error)?;
        }
        Command::Avalanches { d, n, format, output } => {
            let params = ModelParams::new(d)?;
            let log = AvalancheLog::record(&params, n, SnapshotPolicy::Final)?;
            let text = match format.as_str() {
                "ascii" => render::long_avalanches_ascii(&log),
                "svg" => render::long_avalanches_svg(&log),
                "jsonl" => log.to_jsonl(),
                other => return Err(Error::Parse(format!("unknown format `{other}`"))),
            };
            emit(&output, &text).map_err(io_error)?;
        }
        Command::Transducer(cmd) => match cmd {
            TransducerCommand::Build { d, mode, output } => {
                let params = ModelParams::new(d)?;
                let machine = Machine::build(&params, mode)?;
                emit(&output, &machine.to_dot()).map_err(io_error)?;
            }
            TransducerCommand::Run { d, input, mode, ab } => {
                let params = ModelParams::new(d)?;
                let machine = Machine::build(&params, mode)?;
                let word = parse_word(&input, d)?;
                let (end, out) = machine.run(&word)?;
                let rendered = render_word(&out, d, ab || d == 3);
                let state: String = machine
                    .state_tuple(end)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                println!("{}", if rendered.is_empty() { "ε" } else { &rendered });
                println!("end state: {state}");
            }
            TransducerCommand::Steps { d, input, mode, ab } => {
                let params = ModelParams::new(d)?;
                let machine = Machine::build(&params, mode)?;
                let mut word = parse_word(&input, d)?;
                let n = wave_steps(&machine, &word)?;
                println!(
                    "{} iterations to an alternating prefix (bound {})",
                    n,
                    wave_step_bound(word.len())
                );
                for step in 0..=n {
                    let rendered = render_word(&word, d, ab || d == 3);
                    println!(
                        "t^{step}: {}{}",
                        if rendered.is_empty() { "ε" } else { &rendered },
                        if is_alternating_prefix(&word) { "  <- alternating" } else { "" }
                    );
                    if step < n {
                        word = machine.image(&word)?;
                    }
                }
            }
        },
        Command::Verify {
            suite,
            seed,
            d,
            n_max,
            samples,
            format,
            output,
        } => {
            let report = match suite.as_str() {
                "core-laws" => verify::suite_core_laws(
                    seed,
                    samples.unwrap_or(verify::DEFAULT_SAMPLES),
                    n_max.unwrap_or(verify::DEFAULT_AGREEMENT_N_MAX),
                )?,
                "avalanche-lemmas" => verify::suite_avalanche_lemmas(
                    n_max.unwrap_or(verify::DEFAULT_LEMMA_N_MAX),
                )?,
                "appendix-words" => verify::suite_appendix_words(
                    seed,
                    verify::DEFAULT_EXHAUSTIVE_LEN,
                    samples.unwrap_or(verify::DEFAULT_SAMPLES),
                    verify::DEFAULT_RANDOM_HEIGHT_LEN,
                    verify::DEFAULT_RANDOM_STEPS_LEN,
                )?,
                "theorem3" => verify::suite_theorem3(
                    n_max.unwrap_or(verify::DEFAULT_THEOREM_N_MAX),
                    &[1000, 10_000],
                )?,
                "conjectureD" => verify::suite_conjecture_d(
                    d.unwrap_or(4),
                    n_max.unwrap_or(verify::DEFAULT_CONJECTURE_N_MAX),
                )?,
                other => return Err(Error::Parse(format!("unknown suite `{other}`"))),
            };
            all_passed = report.passed;
            let text = match format.as_str() {
                "text" => report.to_string(),
                "json" => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
                other => return Err(Error::Parse(format!("unknown format `{other}`"))),
            };
            emit(&output, &text).map_err(io_error)?;
        }
        Command::Sweep { d, n_max, output } => {
            let params = ModelParams::new(d)?;
            let table = theorem_sweep(&params, n_max)?;
            emit(&output, &table.to_csv()).map_err(io_error)?;
        }
        Command::Pipeline { d, n, output } => {
            let params = ModelParams::new(d)?;
            let report = kspm::pipeline::pipeline_check(&params, n)?;
            let text = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
            emit(&output, &text).map_err(io_error)?;
        }
    }
    Ok(all_passed)
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parse(format!("io: {e}"))
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(Error::InvalidParameter(d)) => {
            eprintln!("error: rule parameter must be at least 2, got {d}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

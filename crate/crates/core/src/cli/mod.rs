//! Command-line front end: `translate`, `analyze` and `report`.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::rvv_front::FootprintMode;
use config::ConfigLayer;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vecport", version, about = "Translate Arm Neon intrinsic kernels to RISC-V Vector intrinsics")]
pub struct Cli {
    /// More log output (repeatable). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run cases through translation, repair and optimization.
    Translate(Box<TranslateArgs>),
    /// Print the vector register pressure of one function.
    Analyze(AnalyzeArgs),
    /// Recompute the metrics report from saved outcomes.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PaperLiteral,
    Physical,
}

impl From<ModeArg> for FootprintMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PaperLiteral => FootprintMode::PaperLiteral,
            ModeArg::Physical => FootprintMode::Physical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    /// Config file; defaults to vecport.toml inside the corpus dir when present.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Only run these case ids (repeatable or comma separated).
    #[arg(long = "case", value_delimiter = ',')]
    pub cases: Vec<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Chat-completions URL. The API key is read from VECPORT_API_KEY.
    #[arg(long, conflicts_with = "replay")]
    pub endpoint: Option<String>,
    /// JSON file of scripted LLM replies.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    #[arg(long)]
    pub translate_max: Option<u32>,
    #[arg(long)]
    pub optimize_max: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(short = 'j', long)]
    pub parallelism: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Score failed cases in the efficiency score as if they used the whole budget.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_failed: Option<bool>,
    #[arg(long)]
    pub cc: Option<String>,
    #[arg(long)]
    pub flags: Option<String>,
    #[arg(long)]
    pub runner: Option<String>,
    #[arg(long)]
    pub compile_cmd_template: Option<String>,
    #[arg(long)]
    pub runner_cmd_template: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub vlens: Option<Vec<u32>>,
    #[arg(long)]
    pub compile_timeout_s: Option<u64>,
    #[arg(long)]
    pub run_timeout_s: Option<u64>,
    #[arg(long)]
    pub perf_runs: Option<u32>,
    /// Use the built-in mock executors instead of a cross toolchain.
    #[arg(long)]
    pub no_exec: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
}

impl TranslateArgs {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            corpus_dir: self.corpus.clone(),
            cases: (!self.cases.is_empty()).then(|| self.cases.clone()),
            model: self.model.clone(),
            endpoint: self.endpoint.clone(),
            replay: self.replay.clone(),
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            translate_max: self.translate_max,
            optimize_max: self.optimize_max,
            mode: self.mode.map(Into::into),
            parallelism: self.parallelism,
            out_dir: self.out.clone(),
            include_failed: self.include_failed,
            cc: self.cc.clone(),
            flags: self.flags.clone(),
            runner: self.runner.clone(),
            compile_cmd_template: self.compile_cmd_template.clone(),
            runner_cmd_template: self.runner_cmd_template.clone(),
            vlens: self.vlens.clone(),
            compile_timeout_s: self.compile_timeout_s,
            run_timeout_s: self.run_timeout_s,
            perf_runs: self.perf_runs,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// C source containing RVV intrinsics.
    pub file: PathBuf,
    /// Function to analyze.
    #[arg(short, long)]
    pub function: String,
    #[arg(long, value_enum, default_value = "paper-literal")]
    pub mode: ModeArg,
    /// Print the statement IR and CFG first.
    #[arg(long)]
    pub dump_ir: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Output dir of a translate run, or a dir of outcome files.
    pub dir: PathBuf,
    /// Defaults to the value recorded by the translate run, else 10.
    #[arg(long)]
    pub up_limit: Option<u32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_failed: Option<bool>,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Translate(a) => commands::translate(a, out, err),
        Command::Analyze(a) => commands::analyze(a, out),
        Command::Report(a) => commands::report(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Log level for `-v` counts.
pub fn log_filter(verbose: u8) -> &'static str {
    match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    }
}

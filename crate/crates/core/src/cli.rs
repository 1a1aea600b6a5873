//! Command-line driver.
//!
//! Exit codes: 0 solved, 1 no solution, 2 input error, 3 timeout, 4 internal
//! error. `<out>/java/` exists only after a successful run.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Parser;

use crate::desugar::UnknownBounds;
use crate::engine::{EngineConfig, Limits};
use crate::frontend::parse_program;
use crate::lowering::print_program;
use crate::pipeline::{compile, desugared_sources, format_tables, solve_compiled, Error, Options, StageLog};

#[derive(Parser, Debug, Clone)]
#[command(name = "oosketch", version, about = "Complete an object-oriented sketch")]
pub struct Args {
    /// Sketch source files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "result")]
    pub out: PathBuf,
    /// Minimum width of integer holes.
    #[arg(long, default_value_t = 5)]
    pub hole_bits: u32,
    /// Largest count tried for each `minrepeat`.
    #[arg(long, default_value_t = 8)]
    pub unroll_max: u32,
    /// Iterations a single loop may run.
    #[arg(long, default_value_t = 64)]
    pub loop_bound: u32,
    /// Statements executed per harness run.
    #[arg(long, default_value_t = 100_000)]
    pub step_limit: u64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 600)]
    pub timeout: u64,
    /// Fixes all nondeterminism, including the reported time.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Repeat vectors searched in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write the lowered program to `<out>/ir/`.
    #[arg(long)]
    pub emit_ir: bool,
    /// Write the class table to `<out>/tables.txt`.
    #[arg(long)]
    pub emit_tables: bool,
    /// Write the normalized sources to `<out>/desugared/`.
    #[arg(long)]
    pub emit_desugared: bool,
}

impl Args {
    pub fn options(&self) -> Options {
        Options {
            bounds: UnknownBounds { hole_bits: self.hole_bits, unroll_max: self.unroll_max },
            engine: EngineConfig {
                limits: Limits { loop_bound: self.loop_bound, step_limit: self.step_limit, ..Limits::default() },
                timeout: Duration::from_secs(self.timeout),
                jobs: self.jobs.max(1),
                seed: self.seed.unwrap_or(0),
                deterministic_time: self.seed.is_some(),
                ..EngineConfig::default()
            },
        }
    }
}

fn write(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)
}

fn run_pipeline(args: &Args, log: &mut StageLog) -> Result<(), Error> {
    let io_err = |e: io::Error| Error::Internal(format!("{}: {}", args.out.display(), e));
    let opts = args.options();
    let ast = parse_program(&args.files)?;
    let compiled = compile(&ast, opts.bounds, log)?;
    if args.emit_tables {
        write(&args.out.join("tables.txt"), &format_tables(&compiled.table)).map_err(io_err)?;
    }
    if args.emit_desugared {
        for (name, text) in desugared_sources(&compiled) {
            write(&args.out.join("desugared").join(name), &text).map_err(io_err)?;
        }
    }
    if args.emit_ir {
        let stem = args.files[0].file_stem().map_or_else(|| "program".into(), |s| s.to_string_lossy().into_owned());
        write(&args.out.join("ir").join(format!("{stem}.ir")), &print_program(&compiled.ir)).map_err(io_err)?;
    }
    let syn = solve_compiled(compiled, &opts.engine, log)?;
    write(&args.out.join("solution.txt"), &syn.solution_text).map_err(io_err)?;
    for (name, text) in &syn.files {
        let path = args.out.join("java").join(name);
        log.push(format!("decoding {}", path.display()));
        write(&path, text).map_err(io_err)?;
    }
    Ok(())
}

/// Runs the tool and returns its exit code.
pub fn run(args: &Args) -> i32 {
    let mut log = StageLog { echo: true, ..StageLog::default() };
    let java = args.out.join("java");
    if java.exists() {
        if let Err(e) = fs::remove_dir_all(&java) {
            eprintln!("error: {}: {}", java.display(), e);
            return 4;
        }
    }
    let code = match run_pipeline(args, &mut log) {
        Ok(()) => 0,
        Err(e) => {
            log.push(format!("error: {e}"));
            e.exit_code()
        }
    };
    if let Err(e) = write(&args.out.join("log").join("log.txt"), &log.text()) {
        eprintln!("error: {}: {}", args.out.display(), e);
        return if code == 0 { 4 } else { code };
    }
    code
}

/// Parses `argv` (program name first) and runs; usage errors exit 2.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => run(&args),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

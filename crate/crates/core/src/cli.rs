//! The `lrpe` command line: `check`, `bench` and `dump`.
//!
//! Exit codes: 0 all properties hold, 1 a property failed, 2 usage or spec
//! error, 3 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{run_bench, BenchConfig, DEFAULT_SIZES, DEFAULT_VANILLA_SIZES};
use crate::lrpe::relative_matrix;
use crate::verify::{run_check_suite, PropertyReport, SuiteConfig};
use crate::{EncodingSpec, LrpeError, Mat, PositionTransform};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest `n` accepted by `dump`.
pub const DUMP_MAX_N: usize = 256;

#[derive(Debug, Parser)]
#[command(name = "lrpe", version, about = "Linearized relative positional encodings: checks, benchmarks, dumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every applicable property check for one encoding.
    Check(CheckArgs),
    /// Time linear LRPE attention (and the softmax baseline) across sizes.
    Bench(BenchArgs),
    /// Write the dense `W_s` (or relative `W_r`) matrices.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Encoding, `<lambda>:<p>:<theta>:<d>[:q=..][:l=..][:seed=..]`.
    #[arg(long)]
    spec: String,
    /// Override the dimension given in the spec.
    #[arg(long)]
    d: Option<usize>,
    /// Seed for random draws; also the spec seed when the spec has none.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long)]
    causal: bool,
    /// Multiply every tolerance by this factor (0 demands exact equality).
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value = "orthogonal:householder:a:32")]
    spec: String,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Sequence lengths for the linear path.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Sequence lengths for the softmax baseline; `0` skips it.
    #[arg(long, value_delimiter = ',')]
    vanilla_sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long)]
    causal: bool,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[command(flatten)]
    common: Common,
    /// Positions `0..n` (or offsets `−(n−1)..=n−1` with `--relative`).
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long)]
    relative: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Property(String),
    Io(String),
}

impl From<LrpeError> for Failure {
    fn from(e: LrpeError) -> Self {
        match e {
            LrpeError::InvalidSpec(_) | LrpeError::DimensionMismatch(_) | LrpeError::Unsupported(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Property(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn resolve_spec(text: &str, d: Option<usize>, seed: u64) -> Result<PositionTransform, Failure> {
    let mut spec: EncodingSpec = text.parse()?;
    if !text.split(':').any(|part| part.starts_with("seed=")) {
        spec.seed = seed;
    }
    if let Some(d) = d {
        spec.d = d;
    }
    Ok(spec.build()?)
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Check(a) => check(a, stdout),
        Command::Bench(a) => bench(a, stdout),
        Command::Dump(a) => dump(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Property(m) => (EXIT_PROPERTY, m),
                Failure::Io(m) => (EXIT_IO, m),
            };
            let _ = writeln!(stderr, "lrpe: {msg}");
            code
        }
    }
}

/// Sends `write` to `--out` if given, otherwise to stdout.
fn emit(
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            write(stdout)?;
            Ok(())
        }
    }
}

fn csv_error(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

fn check(a: CheckArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let c = &a.common;
    let transform = resolve_spec(&c.spec, c.d, c.seed)?;
    if a.n == 0 || a.n > 256 {
        return Err(Failure::Usage(format!("--n must be in 1..=256, got {}", a.n)));
    }
    if !(a.tol_scale >= 0.0 && a.tol_scale.is_finite()) {
        return Err(Failure::Usage(format!("--tol-scale must be finite and >= 0, got {}", a.tol_scale)));
    }
    let cfg = SuiteConfig { n: a.n, seed: c.seed, causal: a.causal, ..Default::default() };
    let reports: Vec<PropertyReport> = run_check_suite(&transform, &cfg)?
        .into_iter()
        .map(|r| PropertyReport::new(r.name, r.max_error, r.tolerance * a.tol_scale, r.cases))
        .collect();
    let failed = reports.iter().filter(|r| !r.passed).count();
    match (&c.out, c.format) {
        (None, Format::Csv) => {
            for r in &reports {
                writeln!(stdout, "{}", r.line())?;
            }
            writeln!(stdout, "{}/{} properties hold for {}", reports.len() - failed, reports.len(), transform.spec())?;
        }
        (out, format) => emit(out, stdout, |w| write_reports(w, &reports, format))?,
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_PROPERTY })
}

fn write_reports(w: &mut dyn Write, reports: &[PropertyReport], format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(w, &reports),
        Format::Csv => {
            let mut cw = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
            for r in reports {
                cw.serialize(r).map_err(csv_error)?;
            }
            cw.flush()?;
            Ok(())
        }
    }
}

fn bench(a: BenchArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let transform = resolve_spec(&a.spec, a.d, a.seed)?;
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let vanilla_sizes = match a.vanilla_sizes {
        Some(v) if v == [0] => Vec::new(),
        Some(v) => v,
        None => DEFAULT_VANILLA_SIZES.to_vec(),
    };
    let cfg = BenchConfig {
        sizes: a.sizes.unwrap_or_else(|| DEFAULT_SIZES.to_vec()),
        vanilla_sizes,
        trials: a.trials,
        seed: a.seed,
        causal: a.causal,
    };
    let report = match run_bench(&transform, &cfg) {
        Ok(r) => r,
        Err(LrpeError::Fit(m)) => return Err(Failure::Usage(m)),
        Err(e) => return Err(e.into()),
    };
    emit(&a.out, stdout, |w| match a.format {
        Format::Csv => report.to_csv(w).map_err(|e| Failure::Io(e.to_string())),
        Format::Json => write_json(w, &report),
    })?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct DumpEntry {
    index: i64,
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

fn dump(a: DumpArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let c = &a.common;
    let transform = resolve_spec(&c.spec, c.d, c.seed)?;
    if a.n == 0 || a.n > DUMP_MAX_N {
        return Err(Failure::Usage(format!("--n must be in 1..={DUMP_MAX_N}, got {}", a.n)));
    }
    let n = a.n as i64;
    let indices: Vec<i64> = if a.relative { (-(n - 1)..n).collect() } else { (0..n).collect() };
    let mut entries = Vec::new();
    for &i in &indices {
        let m: Mat = if a.relative { relative_matrix(&transform, i, 0)? } else { transform.materialize(i as usize)? };
        for row in 0..m.rows() {
            for col in 0..m.cols() {
                let z = m.get(row, col);
                entries.push(DumpEntry { index: i, row, col, re: z.re, im: z.im });
            }
        }
    }
    let index_name = if a.relative { "r" } else { "s" };
    emit(&c.out, stdout, |w| match c.format {
        Format::Json => write_json(w, &entries),
        Format::Csv => {
            let mut cw = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
            cw.write_record([index_name, "row", "col", "re", "im"]).map_err(csv_error)?;
            for e in &entries {
                cw.write_record([
                    e.index.to_string(),
                    e.row.to_string(),
                    e.col.to_string(),
                    e.re.to_string(),
                    e.im.to_string(),
                ])
                .map_err(csv_error)?;
            }
            cw.flush()?;
            Ok(())
        }
    })?;
    Ok(EXIT_OK)
}

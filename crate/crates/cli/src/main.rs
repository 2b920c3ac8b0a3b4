//! `wfsel`: build, verify, query and benchmark wavelet forest indexes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use wavelet_forest::bwt::{self, TextStats};
use wavelet_forest::harness::{self, BenchReport, CSV_HEADER};
use wavelet_forest::verify::{self, Mismatch};
use wavelet_forest::workload::{QueryKind, QueryWorkload, DEFAULT_COUNT, DEFAULT_SEED};
use wavelet_forest::{Backend, Error, ForestParams, HuffmanWaveletTree, Index, SymbolIndex, WaveletForest};

#[derive(Parser)]
#[command(name = "wfsel", version, about = "Rank/select indexes over byte sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index over TEXT and write it to -o.
    Build {
        #[command(flatten)]
        config: BuildArgs,
        #[arg(short, long)]
        output: PathBuf,
        text: PathBuf,
    },
    /// Check every answer of IDX against a scan of TEXT.
    Verify {
        index: PathBuf,
        text: PathBuf,
        #[arg(long, env = "WF_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Time a random query workload on IDX.
    Bench {
        index: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Select)]
        kind: Kind,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        #[arg(long, env = "WF_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = harness::DEFAULT_REPS)]
        reps: usize,
        /// Print the CSV header line before the row.
        #[arg(long)]
        header: bool,
    },
    /// Build, verify and time one forest per value of a parameter.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated axis values; defaults depend on the axis.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[command(flatten)]
        config: BuildArgs,
        #[arg(long, value_enum, default_value_t = Kind::Select)]
        kind: Kind,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        #[arg(long, env = "WF_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = harness::DEFAULT_REPS)]
        reps: usize,
        text: PathBuf,
    },
    /// Alphabet size, length and BWT run statistics of TEXT.
    Stats { text: PathBuf },
    /// Write the BWT of TEXT (sentinel byte 0 appended) and a stats sidecar.
    Bwt {
        text: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print rank(I, SYMBOL).
    Rank { index: PathBuf, i: usize, symbol: String },
    /// Print select(J, SYMBOL), or "inf" when there are fewer occurrences.
    Select {
        index: PathBuf,
        j: usize,
        symbol: String,
        /// Print the intermediate values of the forest select.
        #[arg(long)]
        trace: bool,
    },
    /// Print the symbol at 1-based position I.
    Access { index: PathBuf, i: usize },
}

#[derive(clap::Args, Clone)]
struct BuildArgs {
    #[arg(long, value_enum, default_value_t = StructureArg::Wf)]
    structure: StructureArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Plain)]
    backend: BackendArg,
    /// RRR block size: 15, 31, 63 or 127.
    #[arg(long, default_value_t = 63)]
    rrr_t: u32,
    /// Block size; accepts `2^k`.
    #[arg(long, value_parser = parse_size, default_value = "2^13")]
    block: usize,
    #[arg(long, value_parser = parse_size, default_value = "2^20")]
    superblock: usize,
    #[arg(long, value_parser = parse_size, default_value = "2^32")]
    hyperblock: usize,
    /// Leave navigational zero counts out of the block headers.
    #[arg(long)]
    no_nav: bool,
}

impl BuildArgs {
    fn backend(&self) -> Backend {
        match self.backend {
            BackendArg::Plain => Backend::Plain,
            BackendArg::Rrr => Backend::Rrr(self.rrr_t),
        }
    }

    fn params(&self) -> ForestParams {
        ForestParams::new(self.block, self.superblock, self.hyperblock)
            .with_nav(!self.no_nav)
            .with_backend(self.backend())
    }

    fn build(&self, text: &[u8]) -> Result<Index, Error> {
        Ok(match self.structure {
            StructureArg::Wf => Index::Forest(WaveletForest::new(text, self.params())?),
            StructureArg::Wt => Index::Tree(HuffmanWaveletTree::new(text, self.backend())?),
        })
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum StructureArg {
    Wf,
    Wt,
}

#[derive(ValueEnum, Clone, Copy)]
enum BackendArg {
    Plain,
    Rrr,
}

#[derive(ValueEnum, Clone, Copy)]
enum Kind {
    Rank,
    Select,
}

impl From<Kind> for QueryKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Rank => QueryKind::Rank,
            Kind::Select => QueryKind::Select,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Axis {
    /// Superblock size.
    Sb,
    Nav,
    /// RRR block size.
    Rrr,
}

fn parse_size(s: &str) -> Result<usize, String> {
    let v = match s.split_once('^') {
        Some(("2", k)) => {
            let k: u32 = k.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            1usize.checked_shl(k).filter(|_| k < usize::BITS).ok_or(format!("{s} overflows"))?
        }
        Some(_) => return Err(format!("only powers of two may use ^, got {s:?}")),
        None => s.parse().map_err(|_| format!("not a size: {s:?}"))?,
    };
    Ok(v)
}

/// A single character, or a byte written as `0xNN`.
fn parse_symbol(s: &str) -> Result<u8, Failure> {
    if let Some(hex) = s.strip_prefix("0x") {
        return u8::from_str_radix(hex, 16).map_err(|_| Failure::Usage(format!("bad byte {s:?}")));
    }
    match s.as_bytes() {
        [c] => Ok(*c),
        _ => Err(Failure::Usage(format!("symbol must be one byte or 0xNN, got {s:?}"))),
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Mismatch(Mismatch),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(Error::Param(_) | Error::Bounds { .. } | Error::UnknownSymbol(_)) => 1,
            Failure::Lib(Error::Io(_)) => 2,
            Failure::Lib(Error::Format(_) | Error::Input(_)) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
            Failure::Mismatch(m) => format!("verification failed: {m}"),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Lib(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))))
}

fn write(path: &Path, data: &[u8]) -> Result<(), Failure> {
    fs::write(path, data).map_err(|e| Failure::Lib(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))))
}

fn load(path: &Path) -> Result<Index, Failure> {
    Ok(Index::from_bytes(&read(path)?)?)
}

fn describe(index: &Index) -> String {
    match index {
        Index::Forest(f) => {
            let p = f.params();
            format!("wf ({}) b={} b_s={} b_h={} nav={}", p.backend, p.block, p.superblock, p.hyperblock, if p.nav { "on" } else { "off" })
        }
        Index::Tree(t) => format!("wt ({})", t.backend()),
    }
}

fn stats_line(s: &TextStats) -> String {
    format!("sigma={} n={} MiB={:.3} r={} n/r={:.3}", s.sigma, s.n, s.mebibytes(), s.runs, s.avg_run())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { config, output, text } => {
            let text = read(&text)?;
            let start = Instant::now();
            let index = config.build(&text)?;
            let elapsed = start.elapsed();
            let bytes = index.to_bytes();
            write(&output, &bytes)?;
            println!(
                "built {} in {:.3} s: {} bytes, {:.2}% of {} input bytes",
                describe(&index),
                elapsed.as_secs_f64(),
                bytes.len(),
                100.0 * bytes.len() as f64 / text.len() as f64,
                text.len()
            );
        }
        Command::Verify { index, text, seed } => {
            let index = load(&index)?;
            let text = read(&text)?;
            let mode = verify::auto_mode(text.len(), seed);
            let checks = verify::verify(&index, &text, mode).map_err(Failure::Mismatch)?;
            let how = if matches!(mode, verify::Mode::Exhaustive) { "exhaustive" } else { "sampled" };
            println!("ok: {} passed {checks} {how} checks", describe(&index));
        }
        Command::Bench { index, kind, count, seed, reps, header } => {
            if count == 0 || reps == 0 {
                return Err(Failure::Usage("--count and --reps must be at least 1".into()));
            }
            let index = load(&index)?;
            let workload = QueryWorkload::from_counts(&index.counts(), kind.into(), count, seed)?;
            let timing = harness::time_workload(&index, &workload, reps)?;
            let report = BenchReport::new(&index, index.len(), &workload, timing);
            if header {
                println!("{CSV_HEADER}");
            }
            println!("{}", report.csv_row());
            eprintln!("{}", report.summary());
        }
        Command::Sweep { axis, values, config, kind, count, seed, reps, text } => {
            sweep(axis, values, config, kind.into(), count, seed, reps, &read(&text)?)?;
        }
        Command::Stats { text } => {
            let text = bwt::with_sentinel(&read(&text)?)?;
            println!("{}", stats_line(&bwt::text_stats(&text)?));
        }
        Command::Bwt { text, output } => {
            let text = bwt::with_sentinel(&read(&text)?)?;
            let start = Instant::now();
            let result = bwt::bwt(&text)?;
            let stats = bwt::text_stats_of(&text, &result);
            write(&output, &result.bwt)?;
            let mut sidecar = output.into_os_string();
            sidecar.push(".stats");
            write(Path::new(&sidecar), format!("{}\n", stats_line(&stats)).as_bytes())?;
            println!("bwt of {} bytes in {:.3} s: {}", text.len(), start.elapsed().as_secs_f64(), stats_line(&stats));
        }
        Command::Rank { index, i, symbol } => {
            let c = parse_symbol(&symbol)?;
            println!("{}", load(&index)?.rank(i, c)?);
        }
        Command::Select { index, j, symbol, trace } => {
            let c = parse_symbol(&symbol)?;
            let index = load(&index)?;
            if trace {
                let Index::Forest(f) = &index else {
                    return Err(Failure::Usage("--trace needs a wavelet forest index".into()));
                };
                match f.select_traced(j, c)? {
                    Some(t) => {
                        println!(
                            "i_h={} i_s={} i_b={} j'={} k={} depth={}",
                            t.hyperblock, t.superblock, t.block, t.local_rank, t.local_position, t.depth
                        );
                        println!("{}", t.position);
                    }
                    None => println!("inf"),
                }
            } else {
                match index.select(j, c)? {
                    Some(p) => println!("{p}"),
                    None => println!("inf"),
                }
            }
        }
        Command::Access { index, i } => {
            let c = load(&index)?.access(i)?;
            if c.is_ascii_graphic() {
                println!("{}", c as char);
            } else {
                println!("0x{c:02x}");
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    axis: Axis,
    values: Vec<String>,
    config: BuildArgs,
    kind: QueryKind,
    count: usize,
    seed: u64,
    reps: usize,
    text: &[u8],
) -> Result<(), Failure> {
    if count == 0 || reps == 0 {
        return Err(Failure::Usage("--count and --reps must be at least 1".into()));
    }
    let values: Vec<String> = if values.is_empty() {
        let defaults: &[&str] = match axis {
            Axis::Sb => &["2^16", "2^18", "2^20", "2^22", "2^24"],
            Axis::Nav => &["on", "off"],
            Axis::Rrr => &["15", "31", "63", "127"],
        };
        defaults.iter().map(|s| s.to_string()).collect()
    } else {
        values
    };
    let axis_name = match axis {
        Axis::Sb => "superblock",
        Axis::Nav => "nav",
        Axis::Rrr => "rrr_t",
    };
    let workload = QueryWorkload::for_text(text, kind, count, seed)?;
    println!("axis,value,{CSV_HEADER}");
    for value in values {
        let mut args = config.clone();
        args.structure = StructureArg::Wf;
        match axis {
            Axis::Sb => args.superblock = parse_size(&value).map_err(Failure::Usage)?,
            Axis::Nav => {
                args.no_nav = match value.as_str() {
                    "on" => false,
                    "off" => true,
                    _ => return Err(Failure::Usage(format!("nav values are on/off, got {value:?}"))),
                }
            }
            Axis::Rrr => {
                args.backend = BackendArg::Rrr;
                args.rrr_t = value.parse().map_err(|_| Failure::Usage(format!("bad RRR block size {value:?}")))?;
            }
        }
        let index = args.build(text)?;
        let checks = verify::verify(&index, text, verify::auto_mode(text.len(), seed)).map_err(Failure::Mismatch)?;
        let timing = harness::time_workload(&index, &workload, reps)?;
        let report = BenchReport::new(&index, text.len(), &workload, timing);
        println!("{axis_name},{value},{}", report.csv_row());
        eprintln!("{axis_name}={value}: verified {checks} checks; {}", report.summary());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wfsel: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

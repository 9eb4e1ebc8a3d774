//! Subcommand dispatch and the exit-code contract.
//!
//! Codes: 0 easy / YES, 1 hard / NO, 2 indeterminate (the separation
//! solver gave up), 3 the requested thresholds are a hard pair when a
//! classifier was asked for, 64 argument/file/format problems, 65 a
//! stream that violates the strict-turnstile discipline (or cancels to
//! zero weight). Every randomized command takes `--seed` or draws one
//! and prints it; there is no hidden entropy.

use crate::io::{
    first_turnstile_violation, read_dist, read_dist_path, read_stream, read_stream_path,
    write_gen_metadata, write_stream, write_trace, FormatError, StreamFile,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cspstream::classify::{
    classify_exact, classify_stream, derive_config, ClassifyError, Verdict,
};
use cspstream::csp::{opt_value, CspError, TruthTable};
use cspstream::curves::{sig12, two_and_curves, write_curves_csv};
use cspstream::dist::Dist;
use cspstream::genhard::{
    default_matching_density, gen_padded, gen_streaming_rmd, to_instance, GenError, GenParams,
};
use cspstream::polarize::{polarize_full, potential, NonnegFn, PolarizeError};
use cspstream::rat::{fmt_rat, int, parse_rat, to_f64, ParseRatError, Rat};
use cspstream::separability::{approx_ratio, decide, Decision, SepError, SeparatingPlane};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_EASY_OR_YES: i32 = 0;
pub const EXIT_HARD_OR_NO: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_HARD_PAIR: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_BAD_STREAM: i32 = 65;

/// A diagnosed failure: the message goes to standard error, the code to
/// the shell.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<ParseRatError> for Failure {
    fn from(e: ParseRatError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<CspError> for Failure {
    fn from(e: CspError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<PolarizeError> for Failure {
    fn from(e: PolarizeError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            // the consumer hung up (e.g. `| head`); not our failure
            return Failure {
                code: 0,
                message: String::new(),
            };
        }
        Failure::usage(e.to_string())
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        let code = match e {
            GenError::NegativeMultiplicity => EXIT_BAD_STREAM,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SepError> for Failure {
    fn from(e: SepError) -> Self {
        Failure {
            code: EXIT_INDETERMINATE,
            message: e.to_string(),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        let code = match &e {
            ClassifyError::TurnstileViolation { .. } | ClassifyError::ZeroWeight => {
                EXIT_BAD_STREAM
            }
            ClassifyError::Sep(_) => EXIT_INDETERMINATE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn rat_arg(s: &str) -> Result<Rat, ParseRatError> {
    parse_rat(s)
}

#[derive(Parser, Debug)]
#[command(
    name = "cspstream",
    version,
    about = "Streaming approximability of Boolean constraint satisfaction: \
             decide easy/hard threshold pairs, run the one-pass classifier, \
             generate hard streams, polarize distributions."
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Decide whether (gamma, beta) is streaming-easy for a predicate.
    Classify(ClassifyArgs),
    /// Classify a stream file as value >= gamma (YES) or <= beta (NO).
    Solve(SolveArgs),
    /// Generate mask-detection streams with a planted assignment.
    Gen(GenArgs),
    /// Polarize a distribution to its chain-supported canonical form.
    Polarize(PolarizeArgs),
    /// Threshold-curve and approximation-ratio sweeps.
    Analyze(AnalyzeArgs),
    /// Exact brute-force optimum of a stream file.
    Brute(BruteArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Truth table as a 0/1 string of length 2^k; entry 0 is the value
    /// on the all-minus input.
    #[arg(long)]
    pub f: String,
    /// Predicate arity (cross-checked against the table length).
    #[arg(long)]
    pub k: usize,
    /// YES threshold (rational `p/q`, integer, or decimal).
    #[arg(long, value_parser = rat_arg)]
    pub gamma: Rat,
    /// NO threshold.
    #[arg(long, value_parser = rat_arg)]
    pub beta: Rat,
    /// Slack added to the easy test; 0 probes the exact boundary.
    #[arg(long, value_parser = rat_arg, default_value = "0")]
    pub tol: Rat,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Truth table as a 0/1 string of length 2^k.
    #[arg(long)]
    pub f: String,
    #[arg(long, value_parser = rat_arg)]
    pub gamma: Rat,
    #[arg(long, value_parser = rat_arg)]
    pub beta: Rat,
    /// Stream file; `-` reads standard input.
    #[arg(long)]
    pub stream: PathBuf,
    /// Use the deterministic exact-bias classifier instead of sketches.
    #[arg(long)]
    pub exact: bool,
    /// Sketch seed; drawn and printed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Slack passed to the easy/hard decision.
    #[arg(long, value_parser = rat_arg, default_value = "0")]
    pub tol: Rat,
    /// Override the derived plane: comma-separated rational weights.
    #[arg(long)]
    pub lambda: Option<String>,
    /// YES-side threshold of the override plane.
    #[arg(long, value_parser = rat_arg)]
    pub tau_y: Option<Rat>,
    /// NO-side threshold of the override plane.
    #[arg(long, value_parser = rat_arg)]
    pub tau_n: Option<Rat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenMode {
    /// One mask-detection block.
    Rmd,
    /// Several independent blocks sharing the hidden assignment.
    Streaming,
    /// Streaming body behind a noise prefix.
    Padded,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub mode: GenMode,
    /// Variable count.
    #[arg(long)]
    pub n: usize,
    /// Predicate arity.
    #[arg(long)]
    pub k: usize,
    /// Hypermatching density in (0, 1/k]; default 1/(100 k^2).
    #[arg(long, value_parser = rat_arg)]
    pub alpha: Option<Rat>,
    /// Block count (streaming and padded modes).
    #[arg(long, default_value_t = 1)]
    pub blocks: usize,
    /// Distribution file for the constraint sign masks; `-` reads
    /// standard input.
    #[arg(long)]
    pub mask_dist: PathBuf,
    /// Distribution file for the padding prefix (padded mode).
    #[arg(long)]
    pub pad_dist: Option<PathBuf>,
    /// Padding fraction in [0, 1) (padded mode).
    #[arg(long, value_parser = rat_arg, default_value = "0")]
    pub tau: Rat,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stream output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the `<out>.meta.jsonl` sidecar with the hidden assignment.
    #[arg(long)]
    pub no_meta: bool,
}

#[derive(Args, Debug)]
pub struct PolarizeArgs {
    /// Distribution file to canonicalize; `-` reads standard input.
    #[arg(long)]
    pub dist: PathBuf,
    /// Trace output (JSON lines); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Named sweep; `2and` is the two-variable AND calibration curve.
    #[arg(long, conflicts_with = "f")]
    pub preset: Option<String>,
    /// Truth table for a generic ratio sweep.
    #[arg(long, requires = "k")]
    pub f: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Sample spacing for the CSV curve columns.
    #[arg(long, value_parser = rat_arg, default_value = "1/50")]
    pub grid_step: Rat,
    /// Denominator of the threshold grid for the ratio sweep.
    #[arg(long, default_value_t = 720)]
    pub ratio_grid: i64,
    /// CSV output file; no CSV is produced when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BruteArgs {
    /// Truth table as a 0/1 string of length 2^k.
    #[arg(long)]
    pub f: String,
    /// Stream file with the instance (deletions netted out); `-` reads
    /// standard input.
    #[arg(long)]
    pub instance: PathBuf,
}

/// Parses and dispatches; the returned code is the process exit status.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = io::stdout().lock();
    match run(&cli.cmd, &mut stdout) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            f.code
        }
    }
}

/// Runs one subcommand, writing its report to `out`.
pub fn run(cmd: &Cmd, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Classify(a) => cmd_classify(a, out),
        Cmd::Solve(a) => cmd_solve(a, out),
        Cmd::Gen(a) => cmd_gen(a, out),
        Cmd::Polarize(a) => cmd_polarize(a, out),
        Cmd::Analyze(a) => cmd_analyze(a, out),
        Cmd::Brute(a) => cmd_brute(a, out),
    }
}

fn parse_table(bits: &str, k: Option<usize>) -> Result<TruthTable, Failure> {
    let f = TruthTable::from_bits(bits)?;
    if let Some(k) = k {
        if f.k() != k {
            return Err(Failure::usage(format!(
                "--k {k} does not match the table length {} (arity {})",
                bits.len(),
                f.k()
            )));
        }
    }
    Ok(f)
}

fn join_rats(rs: &[Rat]) -> String {
    rs.iter().map(fmt_rat).collect::<Vec<_>>().join(",")
}

fn read_stream_input(path: &Path) -> Result<StreamFile, Failure> {
    if path == Path::new("-") {
        Ok(read_stream(io::stdin().lock())?)
    } else {
        Ok(read_stream_path(path)?)
    }
}

fn read_dist_input(path: &Path) -> Result<Dist, Failure> {
    if path == Path::new("-") {
        Ok(read_dist(io::stdin().lock())?)
    } else {
        Ok(read_dist_path(path)?)
    }
}

fn check_stream_arity(f: &TruthTable, s: &StreamFile) -> Result<(), Failure> {
    if s.k != f.k() {
        return Err(Failure::usage(format!(
            "stream arity k={} does not match the predicate arity {}",
            s.k,
            f.k()
        )));
    }
    Ok(())
}

fn check_turnstile(s: &StreamFile) -> Result<(), Failure> {
    if let Some(event) = first_turnstile_violation(&s.events) {
        return Err(Failure {
            code: EXIT_BAD_STREAM,
            message: format!(
                "event {event} deletes a constraint with zero running weight"
            ),
        });
    }
    Ok(())
}

/// Opens `path` for writing, or hands back the command's own writer.
fn sink<'a>(
    path: Option<&Path>,
    out: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, Failure> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p)?))),
        None => Ok(Box::new(out)),
    }
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = parse_table(&a.f, Some(a.k))?;
    match decide(&f, &a.gamma, &a.beta, &a.tol)? {
        Decision::Easy(plane) => {
            writeln!(out, "verdict=EASY")?;
            writeln!(out, "lambda={}", join_rats(&plane.lambda))?;
            writeln!(out, "tau_y={}", fmt_rat(&plane.tau_y))?;
            writeln!(out, "tau_n={}", fmt_rat(&plane.tau_n))?;
            Ok(EXIT_EASY_OR_YES)
        }
        Decision::Hard(w) => {
            writeln!(out, "verdict=HARD")?;
            writeln!(out, "marginals={}", join_rats(&w.marginals))?;
            writeln!(out, "d_y={}", join_rats(w.d_y.masses()))?;
            writeln!(out, "d_n={}", join_rats(w.d_n.masses()))?;
            writeln!(out, "gmax_low={}", fmt_rat(&w.gmax_low))?;
            writeln!(out, "gmax_high={}", fmt_rat(&w.gmax_high))?;
            Ok(EXIT_HARD_OR_NO)
        }
    }
}

/// Plane override: all three of --lambda/--tau-y/--tau-n, or none.
fn override_plane(a: &SolveArgs) -> Result<Option<SeparatingPlane>, Failure> {
    match (&a.lambda, &a.tau_y, &a.tau_n) {
        (None, None, None) => Ok(None),
        (Some(lambda), Some(tau_y), Some(tau_n)) => {
            let lambda = lambda
                .split(',')
                .map(parse_rat)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Some(SeparatingPlane {
                lambda,
                tau_y: tau_y.clone(),
                tau_n: tau_n.clone(),
            }))
        }
        _ => Err(Failure::usage(
            "--lambda, --tau-y, and --tau-n must be given together",
        )),
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = parse_table(&a.f, None)?;
    let stream = read_stream_input(&a.stream)?;
    check_stream_arity(&f, &stream)?;
    check_turnstile(&stream)?;
    let plane = match override_plane(a)? {
        Some(plane) => {
            if plane.lambda.len() != f.k() {
                return Err(Failure::usage(format!(
                    "--lambda has {} weights, the predicate has arity {}",
                    plane.lambda.len(),
                    f.k()
                )));
            }
            plane
        }
        None => match decide(&f, &a.gamma, &a.beta, &a.tol)? {
            Decision::Easy(plane) => plane,
            Decision::Hard(w) => {
                return Err(Failure {
                    code: EXIT_HARD_PAIR,
                    message: format!(
                        "thresholds gamma={} beta={} are streaming-hard: \
                         no one-pass sublinear classifier exists \
                         (shared marginals {})",
                        fmt_rat(&a.gamma),
                        fmt_rat(&a.beta),
                        join_rats(&w.marginals)
                    ),
                })
            }
        },
    };
    let seed = a.seed.unwrap_or_else(rand::random);
    let cfg = derive_config(&plane, seed);
    if a.exact {
        let inst = to_instance(stream.n, &stream.events)?;
        let o = classify_exact(&inst, &cfg)?;
        let verdict = match o.verdict {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
        };
        writeln!(
            out,
            "verdict={verdict} mode=exact b={} threshold={} weight={}",
            fmt_rat(&o.b),
            fmt_rat(&o.threshold),
            fmt_rat(&o.bias.total_weight),
        )?;
        Ok(match o.verdict {
            Verdict::Yes => EXIT_EASY_OR_YES,
            Verdict::No => EXIT_HARD_OR_NO,
        })
    } else {
        let o = classify_stream(stream.n, &stream.events, &cfg)?;
        let verdict = match o.verdict {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
        };
        writeln!(
            out,
            "verdict={verdict} mode=sketch b_estimate={} threshold={} weight={} seed={seed}",
            sig12(o.b_estimate),
            sig12(o.threshold),
            o.weight,
        )?;
        Ok(match o.verdict {
            Verdict::Yes => EXIT_EASY_OR_YES,
            Verdict::No => EXIT_HARD_OR_NO,
        })
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.mode == GenMode::Rmd && a.blocks != 1 {
        return Err(Failure::usage(
            "rmd mode is single-block; use --mode streaming for more",
        ));
    }
    if a.mode != GenMode::Padded && (a.pad_dist.is_some() || a.tau != int(0)) {
        return Err(Failure::usage(
            "--pad-dist and --tau apply to --mode padded only",
        ));
    }
    let mask_dist = read_dist_input(&a.mask_dist)?;
    let pad_dist = a.pad_dist.as_deref().map(read_dist_input).transpose()?;
    let seed = a.seed.unwrap_or_else(rand::random);
    let params = GenParams {
        n: a.n,
        k: a.k,
        alpha_m: a
            .alpha
            .clone()
            .unwrap_or_else(|| default_matching_density(a.k)),
        blocks: a.blocks,
        mask_dist,
        pad_dist,
        tau: a.tau.clone(),
        seed,
    };
    let generated = match a.mode {
        GenMode::Rmd | GenMode::Streaming => gen_streaming_rmd(&params)?,
        GenMode::Padded => gen_padded(&params)?,
    };
    let stream = StreamFile {
        n: a.n,
        k: a.k,
        events: generated.events.clone(),
    };
    {
        let mut w = sink(a.out.as_deref(), out)?;
        write_stream(&mut w, &stream)?;
        w.flush()?;
    }
    eprintln!(
        "seed={seed} n={} k={} blocks={} events={}",
        a.n,
        a.k,
        a.blocks,
        stream.events.len()
    );
    if let Some(out) = &a.out {
        if !a.no_meta {
            let meta_path = PathBuf::from(format!("{}.meta.jsonl", out.display()));
            let mut w = BufWriter::new(File::create(&meta_path)?);
            write_gen_metadata(&mut w, &params, &generated)?;
            w.flush()?;
            eprintln!("meta={}", meta_path.display());
        }
    }
    Ok(EXIT_EASY_OR_YES)
}

fn cmd_polarize(a: &PolarizeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let d = read_dist_input(&a.dist)?;
    let start = NonnegFn::from_dist(&d);
    let phi_initial = potential(&start);
    let trace = polarize_full(&start)?;
    {
        let mut w = sink(a.out.as_deref(), out)?;
        write_trace(&mut w, &trace)?;
        w.flush()?;
    }
    eprintln!(
        "steps={} phi_initial={} phi_final={}",
        trace.steps.len(),
        fmt_rat(&phi_initial),
        fmt_rat(&potential(&trace.final_fn))
    );
    Ok(EXIT_EASY_OR_YES)
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = match (&a.preset, &a.f) {
        (Some(name), None) => {
            if name != "2and" {
                return Err(Failure::usage(format!("unknown preset `{name}`")));
            }
            TruthTable::from_bits("0001").expect("two-variable AND table")
        }
        (None, Some(bits)) => parse_table(bits, a.k)?,
        _ => {
            return Err(Failure::usage(
                "choose --preset 2and or --f <bits> --k <arity>",
            ))
        }
    };
    if a.ratio_grid < 2 {
        return Err(Failure::usage("--ratio-grid must be at least 2"));
    }
    let report = approx_ratio(&f, a.ratio_grid)?;
    writeln!(out, "f={f}")?;
    writeln!(out, "ratio_grid={}", a.ratio_grid)?;
    writeln!(out, "alpha={}", fmt_rat(&report.alpha))?;
    writeln!(out, "alpha_float={}", sig12(to_f64(&report.alpha)))?;
    writeln!(out, "minimizing_beta={}", fmt_rat(&report.minimizing_beta))?;
    writeln!(
        out,
        "minimizing_beta_float={}",
        sig12(to_f64(&report.minimizing_beta))
    )?;
    writeln!(out, "boundary_gamma={}", fmt_rat(&report.boundary_gamma))?;
    writeln!(
        out,
        "boundary_gamma_float={}",
        sig12(to_f64(&report.boundary_gamma))
    )?;
    if let Some(path) = &a.out {
        if a.preset.is_some() {
            if a.grid_step <= int(0) {
                return Err(Failure::usage("--grid-step must be positive"));
            }
            let rows = two_and_curves(&a.grid_step)?;
            let mut w = BufWriter::new(File::create(path)?);
            write_curves_csv(&rows, &mut w)?;
            w.flush()?;
            writeln!(out, "curves={} rows={}", path.display(), rows.len())?;
        } else {
            return Err(Failure::usage(
                "--out CSV is available for --preset sweeps only",
            ));
        }
    }
    Ok(EXIT_EASY_OR_YES)
}

fn cmd_brute(a: &BruteArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = parse_table(&a.f, None)?;
    let stream = read_stream_input(&a.instance)?;
    check_stream_arity(&f, &stream)?;
    check_turnstile(&stream)?;
    let inst = to_instance(stream.n, &stream.events)?;
    let (opt, argmax) = opt_value(&f, &inst)?;
    let signs: String = argmax
        .iter()
        .map(|&s| if s == 1 { '+' } else { '-' })
        .collect();
    writeln!(
        out,
        "opt={} opt_float={} argmax={} n={} constraints={}",
        fmt_rat(&opt),
        sig12(to_f64(&opt)),
        signs,
        stream.n,
        inst.len()
    )?;
    Ok(EXIT_EASY_OR_YES)
}

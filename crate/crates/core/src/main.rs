use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fq_core::batch::{write_table_binary, write_table_csv};
use fq_core::dynamics::{analyze_range, U0Policy};
use fq_core::error::{FqError, Result};
use fq_core::hash::{avalanche, digest, keygen, BitString, HashParams};
use fq_core::lookup::{build_lookup, convergent_steps, qp_lookup, rational_reconstruct};
use fq_core::prng::{
    exp_sum_bound, exp_sum_with, lc_bound_full, lc_bound_segment, linear_complexity,
    star_discrepancy_1d, star_discrepancy_nd, star_discrepancy_nd_estimate, BoundCheck, ExpSumSpec,
    PointSet, QuotientSequence, EXACT_MAX_POINTS,
};
use fq_core::sieve::odd_primes_in;
use fq_core::sweep::{run_sweep, write_rows_csv, SweepConfig};
use fq_core::{generate_table, graph_stats, make_context, orbit};

#[derive(Parser, Debug)]
#[command(name = "fq", version, about = "Fermat quotient toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate q_p(u) directly.
    Eval {
        #[arg(short)]
        p: u64,
        #[arg(short, allow_negative_numbers = true)]
        u: i64,
    },
    /// Smallest u >= 1 with q_p(u) != 0, for one prime or every odd prime in a range.
    Lp {
        #[arg(short, conflicts_with = "range", required_unless_present = "range")]
        p: Option<u64>,
        /// Closed range A:B.
        #[arg(long, value_parser = parse_range)]
        range: Option<(u64, u64)>,
    },
    /// Generate the full table q_p(0..p-1).
    Table {
        #[arg(short)]
        p: u64,
        /// Write the binary FQTB format to this file instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Answer one query from the trade-off tables.
    Lookup {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        z: f64,
        #[arg(short)]
        u: u64,
    },
    /// Orbit and tail length of u0 under u -> q_p(u).
    Orbit {
        #[arg(short)]
        p: u64,
        #[arg(long)]
        u0: u64,
        /// Use Brent's algorithm on direct evaluation instead of a table.
        #[arg(long)]
        no_table: bool,
    },
    /// Fixed points, image size and cyclic points of the map.
    Graph {
        #[arg(short)]
        p: u64,
    },
    /// Linear complexity of q_p(0..N-1), or of q_p(M+1..M+N) with --m.
    Lc {
        #[arg(short)]
        p: u64,
        /// Sequence length (default 3p).
        #[arg(short)]
        n: Option<u64>,
        #[arg(short, long, allow_negative_numbers = true)]
        m: Option<i64>,
    },
    /// Star discrepancy of the points (q_p(u)/p, ..., q_p(u+s-1)/p), u = M+1..M+N.
    Disc {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        n: usize,
        #[arg(short, default_value_t = 1)]
        s: usize,
        #[arg(short, long, default_value_t = 0, allow_negative_numbers = true)]
        m: i64,
        /// Monte-Carlo lower bound with this many samples instead of the exact value.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// |S| = |sum e_p(a_0 q_p(u) + ... + a_{s-1} q_p(u+s-1))| over u = M+1..M+N.
    Expsum {
        #[arg(short)]
        p: u64,
        /// Coefficients, comma separated.
        #[arg(
            short,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        a: Vec<i64>,
        #[arg(short, long, default_value_t = 0, allow_negative_numbers = true)]
        m: i64,
        /// Number of terms (default p^2).
        #[arg(short)]
        n: Option<u64>,
    },
    /// Iterated-quotient hash.
    #[command(subcommand)]
    Hash(HashCommand),
    /// Sweep a prime range: per-prime dynamics rows and the summary report.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum HashCommand {
    /// Derive parameters from a seed.
    Keygen {
        #[arg(long)]
        seed: u64,
        #[arg(short)]
        n: u32,
        #[arg(short)]
        r: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hash a message given as hex bytes (or as a 0/1 string with --bits).
    Digest {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, conflicts_with = "bits", required_unless_present = "bits")]
        hex: Option<String>,
        #[arg(long)]
        bits: Option<String>,
    },
    /// Single-bit-flip diffusion statistics.
    Avalanche {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Closed range A:B.
    #[arg(long, value_parser = parse_range)]
    range: (u64, u64),
    /// Worker threads.
    #[arg(long, env = "FQ_JOBS", default_value_t = default_jobs())]
    jobs: usize,
    /// Fixed orbit start (default 2 unless --seed is given).
    #[arg(long, conflicts_with = "seed")]
    u0: Option<u64>,
    /// Draw each orbit start uniformly from [1, p-1] with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Append-only results cache (CSV).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Report sub-interval width.
    #[arg(long)]
    interval: Option<u64>,
    /// Print per-prime rows instead of the report.
    #[arg(long)]
    rows: bool,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let a = a.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `rows` as CSV with the field names of `T` as the header.
fn emit_csv<T: Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit_as<T: Serialize>(format: Format, rows: &[T]) -> Result<()> {
    match format {
        Format::Csv => emit_csv(rows),
        Format::Json if rows.len() == 1 => emit(&rows[0]),
        Format::Json => emit(&rows),
    }
}

#[derive(Serialize)]
struct EvalOut {
    p: u64,
    u: i64,
    q: u32,
}

#[derive(Serialize)]
struct LpOut {
    p: u64,
    lp: u64,
}

#[derive(Serialize)]
struct LookupOut {
    p: u64,
    z: f64,
    u: u64,
    v: u64,
    w: i64,
    steps: u32,
    q: u32,
}

#[derive(Serialize)]
struct OrbitOut {
    p: u64,
    u0: u64,
    rho: u64,
    mu: u64,
    cycle_len: u64,
}

#[derive(Serialize)]
struct LcOut {
    p: u64,
    m: Option<i64>,
    n: u64,
    complexity: usize,
    bound: u64,
    holds: bool,
}

#[derive(Serialize)]
struct DiscOut {
    p: u64,
    m: i64,
    n: usize,
    s: usize,
    exact: bool,
    /// Star (anchored-box) discrepancy, or a lower bound on it when sampled.
    value: f64,
    /// `2^s * value`, an upper bound on the unanchored discrepancy when exact.
    extreme_upper: f64,
}

fn run(cli: Cli) -> Result<()> {
    let format = cli.format;
    match cli.command {
        Command::Eval { p, u } => {
            let ctx = make_context(p, false)?;
            emit_as(
                format,
                &[EvalOut {
                    p,
                    u,
                    q: ctx.eval(u).0,
                }],
            )
        }
        Command::Lp { p, range } => {
            let primes = match (p, range) {
                (Some(p), _) => vec![p],
                (None, Some((a, b))) => odd_primes_in(a, b),
                (None, None) => unreachable!("clap requires one of -p / --range"),
            };
            let rows = primes
                .into_iter()
                .map(|p| {
                    Ok(LpOut {
                        p,
                        lp: make_context(p, false)?.smallest_nonzero(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match (format, p) {
                (Format::Json, None) => emit(&rows),
                _ => emit_as(format, &rows),
            }
        }
        Command::Table { p, out } => {
            let table = generate_table(&make_context(p, true)?)?;
            match out {
                Some(path) => Ok(write_table_binary(
                    &table,
                    BufWriter::new(File::create(path)?),
                )?),
                None => match format {
                    Format::Csv => write_table_csv(&table, io::stdout().lock()),
                    Format::Json => {
                        #[derive(Serialize)]
                        struct TableOut<'a> {
                            p: u64,
                            values: &'a [u32],
                        }
                        emit(&TableOut {
                            p,
                            values: table.values(),
                        })
                    }
                },
            }
        }
        Command::Lookup { p, z, u } => {
            if u >= p {
                return Err(FqError::BadParameter(format!(
                    "u = {u} must lie in [0, {p})"
                )));
            }
            let ctx = make_context(p, false)?;
            let tables = build_lookup(&ctx, z)?;
            let (v, w) = match u {
                0 => (0, 0),
                _ => {
                    let pair = rational_reconstruct(p, z, u)?;
                    (pair.v, pair.w)
                }
            };
            let steps = if u == 0 { 0 } else { convergent_steps(p, z, u) };
            emit_as(
                format,
                &[LookupOut {
                    p,
                    z,
                    u,
                    v,
                    w,
                    steps,
                    q: qp_lookup(&tables, u).0,
                }],
            )
        }
        Command::Orbit { p, u0, no_table } => {
            let ctx = make_context(p, !no_table)?;
            let table = if no_table {
                None
            } else {
                Some(generate_table(&ctx)?)
            };
            let o = orbit(&ctx, u0, table.as_ref())?;
            emit_as(
                format,
                &[OrbitOut {
                    p,
                    u0,
                    rho: o.rho,
                    mu: o.mu,
                    cycle_len: o.cycle_len,
                }],
            )
        }
        Command::Graph { p } => {
            let table = generate_table(&make_context(p, true)?)?;
            emit_as(format, &[graph_stats(&table)])
        }
        Command::Lc { p, n, m } => {
            let n = n.unwrap_or(3 * p);
            let seq = QuotientSequence::for_context(&make_context(p, true)?)?;
            let values = match m {
                Some(m) => seq.window(m + 1, n as usize),
                None => seq.window(0, n as usize),
            };
            let r = linear_complexity(&values, p);
            let bound = match m {
                Some(_) => lc_bound_segment(p, n),
                None => lc_bound_full(p, n),
            };
            emit_as(
                format,
                &[LcOut {
                    p,
                    m,
                    n,
                    complexity: r.complexity,
                    bound,
                    holds: r.complexity as u64 >= bound,
                }],
            )
        }
        Command::Disc {
            p,
            n,
            s,
            m,
            samples,
            seed,
        } => {
            let seq = QuotientSequence::for_context(&make_context(p, true)?)?;
            let points = PointSet::from_quotients(&seq, m, n, s)?;
            let (exact, value) = match samples {
                Some(k) => (false, star_discrepancy_nd_estimate(&points, k, seed)?),
                None if s == 1 => {
                    let xs: Vec<f64> = (0..points.len()).map(|i| points.point(i)[0]).collect();
                    (true, star_discrepancy_1d(&xs)?)
                }
                None if n > EXACT_MAX_POINTS => {
                    return Err(FqError::BadParameter(format!(
                        "exact mode needs N <= {EXACT_MAX_POINTS}; pass --samples for an estimate"
                    )))
                }
                None => (true, star_discrepancy_nd(&points)?),
            };
            emit_as(
                format,
                &[DiscOut {
                    p,
                    m,
                    n,
                    s,
                    exact,
                    value,
                    extreme_upper: value * (1u64 << s) as f64,
                }],
            )
        }
        Command::Expsum { p, a, m, n } => {
            let ctx = make_context(p, true)?;
            let spec = ExpSumSpec {
                m,
                n: n.unwrap_or(p * p),
                a,
            };
            spec.validate(p)?;
            let seq = QuotientSequence::for_context(&ctx)?;
            let value = exp_sum_with(&seq, &spec)?;
            let bound = exp_sum_bound(spec.dimension(), p);
            let check = BoundCheck::new(spec, value, bound);
            match format {
                Format::Json => emit(&check),
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        p: u64,
                        m: i64,
                        n: u64,
                        a: String,
                        value: f64,
                        bound: f64,
                        ratio: f64,
                    }
                    let a = check
                        .spec
                        .a
                        .iter()
                        .map(i64::to_string)
                        .collect::<Vec<_>>()
                        .join(" ");
                    emit_csv(&[Row {
                        p,
                        m: check.spec.m,
                        n: check.spec.n,
                        a,
                        value: check.value,
                        bound: check.bound,
                        ratio: check.ratio,
                    }])
                }
            }
        }
        Command::Hash(cmd) => run_hash(format, cmd),
        Command::Sweep(args) => run_sweep_cmd(format, args),
    }
}

fn load_params(path: &PathBuf) -> Result<HashParams> {
    let params: HashParams = serde_json::from_reader(io::BufReader::new(File::open(path)?))?;
    params.validate()?;
    Ok(params)
}

fn parse_hex(s: &str) -> Result<Vec<u8>> {
    let s = s.trim().trim_start_matches("0x");
    if s.len() % 2 != 0 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(FqError::BadParameter(format!(
            "'{s}' is not an even-length hex string"
        )));
    }
    Ok((0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).expect("validated hex"))
        .collect())
}

fn run_hash(format: Format, cmd: HashCommand) -> Result<()> {
    match cmd {
        HashCommand::Keygen { seed, n, r, out } => {
            let params = keygen(seed, n, r)?;
            match out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(path)?);
                    serde_json::to_writer_pretty(&mut w, &params)?;
                    writeln!(w)?;
                    Ok(w.flush()?)
                }
                None => emit(&params),
            }
        }
        HashCommand::Digest { params, hex, bits } => {
            let params = load_params(&params)?;
            let message = match (hex, bits) {
                (Some(h), _) => BitString::from_bytes(&parse_hex(&h)?),
                (None, Some(b)) => BitString::parse_binary(&b)?,
                (None, None) => unreachable!("clap requires --hex or --bits"),
            };
            #[derive(Serialize)]
            struct DigestOut {
                n: u32,
                r: u32,
                bits: usize,
                digest: u32,
                hex: String,
            }
            let d = digest(&params, &message);
            let width = (params.n as usize).div_ceil(4);
            emit_as(
                format,
                &[DigestOut {
                    n: params.n,
                    r: params.r,
                    bits: message.len(),
                    digest: d.0,
                    hex: format!("{:0width$x}", d.0),
                }],
            )
        }
        HashCommand::Avalanche {
            params,
            trials,
            len,
            seed,
        } => {
            let params = load_params(&params)?;
            emit(&avalanche(&params, trials, len, seed)?)
        }
    }
}

fn run_sweep_cmd(format: Format, args: SweepArgs) -> Result<()> {
    let policy = match (args.u0, args.seed) {
        (_, Some(seed)) => U0Policy::SeededRandom(seed),
        (Some(u), None) => U0Policy::Fixed(u),
        (None, None) => U0Policy::Fixed(2),
    };
    let (lo, hi) = args.range;
    let config = SweepConfig {
        lo,
        hi,
        jobs: args.jobs,
        u0_policy: policy,
        cache_path: args.cache,
        interval_width: args.interval,
    };
    if args.rows && config.cache_path.is_none() && format == Format::Csv {
        // Streaming rows without a cache needs no report bookkeeping.
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| FqError::BadParameter(e.to_string()))?;
        let rows = pool.install(|| analyze_range(lo, hi, policy))?;
        return write_rows_csv(&rows, io::stdout().lock());
    }
    let (report, rows) = run_sweep(&config)?;
    match (args.rows, format) {
        (true, Format::Csv) => write_rows_csv(&rows, io::stdout().lock()),
        (true, Format::Json) => emit(&rows),
        (false, Format::Json) => emit(&report),
        (false, Format::Csv) => {
            #[derive(Serialize)]
            struct Row {
                lo: u64,
                hi: u64,
                prime_count: u64,
                mean_image_over_p: f64,
                mean_cyclic_over_sqrt: f64,
                mean_rho_over_sqrt: f64,
                mean_mu_over_sqrt: f64,
            }
            let out: Vec<Row> = report
                .intervals
                .iter()
                .map(|i| (i.lo, i.hi, i.summary))
                .chain(std::iter::once((report.lo, report.hi, report.whole)))
                .map(|(lo, hi, s)| Row {
                    lo,
                    hi,
                    prime_count: s.prime_count,
                    mean_image_over_p: s.mean_image_over_p,
                    mean_cyclic_over_sqrt: s.mean_cyclic_over_sqrt,
                    mean_rho_over_sqrt: s.mean_rho_over_sqrt,
                    mean_mu_over_sqrt: s.mean_mu_over_sqrt,
                })
                .collect();
            emit_csv(&out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fq: {err}");
            if err.is_precondition() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

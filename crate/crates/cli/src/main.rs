//! `rcsynth` — batch front end for the reversible-circuit toolkit.
//!
//! Machine-readable results go to stdout; progress and diagnostics go to
//! stderr. Exit codes: 0 success, 1 usage error, 2 data/format error,
//! 3 horizon or resource limit exceeded.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Parser, Subcommand};

use rcsynth_core::{
    embedded_suite, improvement_table, load_suite, quantum_cost, run_suite, BuildOptions, Circuit,
    EnumerationReport, EnumerationRequest, Error, OptimalDb, Oracle3, Perm, Result, RunFilters,
    Synthesizer,
};

#[derive(Parser)]
#[command(name = "rcsynth", version, about = "Optimal synthesis of reversible circuits")]
struct Cli {
    /// Worker threads for builds and enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Suppress progress and diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an optimal-circuit database and write it to a file.
    DbBuild {
        /// Number of circuit lines (3 or 4).
        #[arg(long)]
        lines: u8,

        /// Largest gate count to index.
        #[arg(long)]
        depth: u8,

        /// Where to write the database.
        #[arg(long)]
        out: PathBuf,

        /// Abort instead of exceeding this much working memory, in bytes.
        #[arg(long, default_value_t = 4 << 30)]
        memory_budget: u64,
    },

    /// Print the shape of a database file.
    DbInfo {
        /// Database file to inspect.
        path: PathBuf,
    },

    /// Print the minimal gate count for a function.
    Gc {
        /// Database file (or set RCSYNTH_DB).
        #[arg(long, env = "RCSYNTH_DB")]
        db: PathBuf,

        /// Output vector, e.g. "[1,0,3,2,5,7,4,6]".
        vector: String,
    },

    /// Print one gate-count-optimal circuit for a function.
    Synth {
        /// Database file (or set RCSYNTH_DB).
        #[arg(long, env = "RCSYNTH_DB")]
        db: PathBuf,

        /// Output vector, e.g. "[1,0,3,2,5,7,4,6]".
        vector: String,
    },

    /// Stream circuits realizing a function, one per line.
    ///
    /// With --gc, every circuit of exactly that many gates is printed.
    /// With --slack, gate counts from the optimum to that many above it
    /// are scanned and the cheapest circuit found is printed.
    #[command(group(ArgGroup::new("mode").required(true).args(["gc", "slack"])))]
    Enum {
        /// Database file (or set RCSYNTH_DB).
        #[arg(long, env = "RCSYNTH_DB")]
        db: PathBuf,

        /// Output vector, e.g. "[1,0,3,2,5,7,4,6]".
        vector: String,

        /// Exact gate count to enumerate.
        #[arg(long)]
        gc: Option<u32>,

        /// Scan this many gate counts above the optimum for the cheapest
        /// circuit.
        #[arg(long)]
        slack: Option<u32>,

        /// Stop after printing this many circuits (only with --gc).
        #[arg(long, conflicts_with = "slack")]
        limit: Option<u64>,
    },

    /// Score a circuit: gate count and quantum cost after pair merging.
    ///
    /// With no argument, reads one circuit per line from stdin and prints
    /// one scored line each.
    Qc {
        /// Circuit text, e.g. "Tbd-c Tbd-a Tcd-b".
        circuit: Option<String>,

        /// Number of lines the circuit runs on.
        #[arg(long, default_value_t = 4)]
        n: u8,
    },

    /// Run one input value through a circuit.
    Simulate {
        /// Circuit text, e.g. "Na Cb-a".
        circuit: String,

        /// Input value.
        #[arg(long)]
        input: u8,

        /// Number of lines the circuit runs on.
        #[arg(long, default_value_t = 4)]
        n: u8,
    },

    /// Replay the benchmark suite against exhaustive enumeration.
    Bench {
        /// Database file (or set RCSYNTH_DB).
        #[arg(long, env = "RCSYNTH_DB")]
        db: PathBuf,

        /// Suite file (default: the embedded suite).
        #[arg(long)]
        suite: Option<PathBuf>,

        /// Comma-separated case names (default: every case).
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,

        /// Skip rows above this gate count.
        #[arg(long)]
        max_gc: Option<u32>,

        /// Skip rows above this expected circuit count.
        #[arg(long)]
        max_count: Option<u64>,

        /// Stop starting new rows after this many seconds.
        #[arg(long)]
        time_limit: Option<u64>,

        /// Run rows flagged heavy (count over a million or 13+ gates).
        #[arg(long)]
        include_heavy: bool,

        /// Run rows whose transcription is flagged suspect.
        #[arg(long)]
        include_suspect: bool,

        /// Emit CSV instead of the fixed-column table.
        #[arg(long)]
        csv: bool,

        /// Append the per-case cost-improvement summary.
        #[arg(long)]
        improvement: bool,
    },

    /// Exhaust all 40,320 3-line functions and emit a CSV summary.
    Oracle3 {
        /// Write the summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        // The global pool can only be configured once; a second attempt in
        // the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Horizon { .. } | Error::MemoryBudget { .. } | Error::NotInDatabase { .. } => 3,
                _ => 2,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::DbBuild { lines, depth, out, memory_budget } => {
            let opts = BuildOptions {
                depth: *depth,
                memory_budget: *memory_budget,
                progress: !cli.quiet,
            };
            let db = OptimalDb::build(*lines, &opts)?;
            db.save(out)?;
            if !cli.quiet {
                eprint!("{}", db.info());
                eprintln!("saved to {}", out.display());
            }
            Ok(0)
        }

        Command::DbInfo { path } => {
            let db = OptimalDb::load(path)?;
            print!("{}", db.info());
            Ok(0)
        }

        Command::Gc { db, vector } => {
            let f: Perm = vector.parse()?;
            let db = OptimalDb::load(db)?;
            let syn = Synthesizer::new(&db);
            println!("{}", syn.optimal_gc(&f)?);
            Ok(0)
        }

        Command::Synth { db, vector } => {
            let f: Perm = vector.parse()?;
            let db = OptimalDb::load(db)?;
            let syn = Synthesizer::new(&db);
            let c = syn.synthesize_one(&f)?;
            if !cli.quiet {
                eprintln!("GC={}", c.len());
            }
            println!("{c}");
            Ok(0)
        }

        Command::Enum { db, vector, gc, slack, limit } => {
            let f: Perm = vector.parse()?;
            let db = OptimalDb::load(db)?;
            let syn = Synthesizer::new(&db);
            match (gc, slack) {
                (Some(gc), _) => enum_exact(cli, &syn, &f, *gc, *limit),
                (None, Some(slack)) => {
                    let r = syn.qc_minimize(&f, *slack)?;
                    if !cli.quiet {
                        for rep in &r.reports {
                            eprintln!("{}", report_line(rep));
                        }
                        eprintln!("optimal_gc={} best_qc={}", r.optimal_gc, r.best_qc);
                    }
                    println!("{}", r.best);
                    Ok(0)
                }
                (None, None) => unreachable!("clap requires one of --gc/--slack"),
            }
        }

        Command::Qc { circuit, n } => {
            match circuit {
                Some(text) => {
                    let c = Circuit::parse(text, *n)?;
                    let rep = quantum_cost(&c);
                    println!("GC={} QC={}", rep.gate_count, rep.qc);
                    println!("{}", rep.marked(&c));
                }
                None => {
                    for (i, line) in io::stdin().lock().lines().enumerate() {
                        let line = line?;
                        let text = line.trim();
                        if text.is_empty() {
                            continue;
                        }
                        let c = Circuit::parse(text, *n).map_err(|e| match e {
                            Error::BadCircuit(m) => {
                                Error::BadCircuit(format!("stdin line {}: {m}", i + 1))
                            }
                            other => other,
                        })?;
                        let rep = quantum_cost(&c);
                        println!("GC={} QC={} {}", rep.gate_count, rep.qc, rep.marked(&c));
                    }
                }
            }
            Ok(0)
        }

        Command::Simulate { circuit, input, n } => {
            let c = Circuit::parse(circuit, *n)?;
            println!("{}", c.simulate(*input)?);
            Ok(0)
        }

        Command::Bench {
            db,
            suite,
            names,
            max_gc,
            max_count,
            time_limit,
            include_heavy,
            include_suspect,
            csv,
            improvement,
        } => {
            let cases = match suite {
                Some(path) => load_suite(path)?,
                None => embedded_suite(),
            };
            let db = OptimalDb::load(db)?;
            let syn = Synthesizer::new(&db);
            let filters = RunFilters {
                max_gc: *max_gc,
                max_count: *max_count,
                time_limit: time_limit.map(Duration::from_secs),
                include_heavy: *include_heavy,
                include_suspect: *include_suspect,
                names: names.clone(),
            };
            let result = run_suite(&syn, &cases, &filters);
            print!("{}", if *csv { result.csv() } else { result.text_table() });
            if *improvement {
                print!("{}", improvement_table(&result));
            }
            if !cli.quiet {
                eprintln!(
                    "{} matched, {} mismatched, {} failed, {} skipped",
                    result.matched(),
                    result.mismatched(),
                    result.failed(),
                    result.skipped()
                );
            }
            Ok(if result.mismatched() > 0 {
                2
            } else if result.failed() > 0 {
                3
            } else {
                0
            })
        }

        Command::Oracle3 { out } => {
            if !cli.quiet {
                eprintln!("sweeping all 40320 functions on 3 lines...");
            }
            let oracle = Oracle3::build();
            let summary = oracle.csv_summary();
            match out {
                Some(path) => {
                    std::fs::write(path, &summary)?;
                    if !cli.quiet {
                        eprintln!("summary written to {}", path.display());
                    }
                }
                None => print!("{summary}"),
            }
            Ok(0)
        }
    }
}

/// Streams every circuit of exactly `gc` gates to stdout and reports the
/// aggregate on stderr. Stops quietly if the reader goes away.
fn enum_exact(cli: &Cli, syn: &Synthesizer, f: &Perm, gc: u32, limit: Option<u64>) -> Result<u8> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut printed = 0u64;
    let mut qc_min: Option<u32> = None;
    let mut qc_max: Option<u32> = None;
    let mut io_err: Option<io::Error> = None;
    syn.enumerate_each(f, EnumerationRequest { gate_count: gc }, |c| {
        let qc = quantum_cost(c).qc;
        qc_min = Some(qc_min.map_or(qc, |m| m.min(qc)));
        qc_max = Some(qc_max.map_or(qc, |m| m.max(qc)));
        if let Err(e) = writeln!(out, "{c}") {
            io_err = Some(e);
            return false;
        }
        printed += 1;
        limit.is_none_or(|l| printed < l)
    })?;
    match out.flush() {
        Err(e) if io_err.is_none() => io_err = Some(e),
        _ => {}
    }
    if let Some(e) = io_err {
        if e.kind() != io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if !cli.quiet {
        let opt = |v: Option<u32>| v.map_or("-".to_string(), |x| x.to_string());
        let partial = if limit.is_some_and(|l| printed >= l) {
            " (limit reached; totals are partial)"
        } else {
            ""
        };
        eprintln!(
            "gc={gc} count={printed} qc_min={} qc_max={}{partial}",
            opt(qc_min),
            opt(qc_max)
        );
    }
    Ok(0)
}

fn report_line(rep: &EnumerationReport) -> String {
    let opt = |v: Option<u32>| v.map_or("-".to_string(), |x| x.to_string());
    format!(
        "gc={} count={} qc_min={} qc_max={}",
        rep.gate_count,
        rep.count,
        opt(rep.qc_min),
        opt(rep.qc_max)
    )
}

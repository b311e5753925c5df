use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use erasure_influence::hypercube::{self, BruteForceCap};
use erasure_influence::influence::grid;
use erasure_influence::poly::{parse_rational, rational_string};
use erasure_influence::recovery::{decode_erasures, mc_unrecoverable_prob, z_score, ReceivedWord};
use erasure_influence::report::{analyze, canonical_json, AnalysisReport, AnalyzeOptions};
use erasure_influence::structure::{detect_mds, mds_json};
use erasure_influence::suites::{run_suite, SUITES};
use erasure_influence::{BinaryCode, CodeSpec};

const EXIT_INPUT: u8 = 1;
const EXIT_MISMATCH: u8 = 2;

#[derive(Parser)]
#[command(name = "erinf", version, about = "Exact erasure influences of binary linear codes")]
struct Cli {
    /// Largest length analysed by brute force (at most 28).
    #[arg(long, global = true, default_value_t = hypercube::DEFAULT_CAP)]
    cap: usize,
    /// Worker threads; affects speed only.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Comma-separated probabilities such as `1/2,0.1`.
    #[arg(long, value_delimiter = ',')]
    eval: Vec<String>,
    /// Emit a p-grid table instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: structure, influences, closed forms, comparisons.
    Analyze {
        /// Code spec file; stdin when omitted or `-`.
        spec: Option<PathBuf>,
        #[command(flatten)]
        eval: EvalArgs,
        /// Write each Ω_i as a bit table to this directory.
        #[arg(long, value_name = "DIR")]
        dump_omegas: Option<PathBuf>,
    },
    /// Per-coordinate influence records.
    Influence {
        spec: Option<PathBuf>,
        #[command(flatten)]
        eval: EvalArgs,
        /// Only this coordinate.
        #[arg(long, short = 'j')]
        coordinate: Option<usize>,
    },
    /// Run a closed-form versus brute-force suite (or `all`).
    Verify { suite: String },
    /// Minimum-disjoint-support structure.
    Mds { spec: Option<PathBuf> },
    /// Decode a received word over {0,1,*}.
    Recover {
        word: String,
        spec: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the probability that a coordinate is unrecoverable.
    Mc {
        spec: Option<PathBuf>,
        #[arg(long, short = 'i', default_value_t = 0)]
        coordinate: usize,
        #[arg(long)]
        p: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

fn read_spec(path: Option<&Path>) -> Result<BinaryCode> {
    let (text, origin) = match path {
        Some(p) if p != Path::new("-") => (
            fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            p.display().to_string(),
        ),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            (s, "<stdin>".to_string())
        }
    };
    let spec: CodeSpec = serde_json::from_str(&text).with_context(|| format!("malformed code spec in {origin}"))?;
    spec.build().with_context(|| format!("invalid code spec in {origin}"))
}

fn parse_eval(values: &[String]) -> Result<Vec<BigRational>> {
    values
        .iter()
        .map(|s| {
            let p = parse_rational(s)?;
            erasure_influence::poly::check_probability(&p)?;
            Ok(p)
        })
        .collect()
}

fn emit_json(value: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(canonical_json(value).as_bytes())?;
    Ok(())
}

fn to_float(r: &BigRational) -> String {
    r.to_f64().map_or_else(|| "nan".into(), |f| f.to_string())
}

fn emit_csv(report: &AnalysisReport, eval: &[BigRational], coords: &[usize]) -> Result<()> {
    let points = if eval.is_empty() { grid() } else { eval.to_vec() };
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    let mut header = vec!["p".to_string()];
    header.extend(coords.iter().map(|j| format!("I_{j}")));
    header.push("total".into());
    w.write_record(&header)?;
    for (p, per, total) in report.evaluation_table(&points) {
        let mut row = vec![to_float(&p)];
        row.extend(coords.iter().map(|&j| per[j].as_ref().map_or_else(String::new, to_float)));
        row.push(total.as_ref().map_or_else(String::new, to_float));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn dump_omegas(code: &BinaryCode, cap: BruteForceCap, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let sets = hypercube::all_b_sets(code, cap, true)?;
    for (members, omega) in sets.omegas.unwrap_or_default() {
        for i in members {
            let path = dir.join(format!("omega_{i}.bin"));
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut out = BufWriter::new(file);
            omega.write_blob(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let cap = BruteForceCap::new(cli.cap)?;
    match cli.command {
        Command::Analyze { spec, eval, dump_omegas: dump } => {
            let code = read_spec(spec.as_deref())?;
            let points = parse_eval(&eval.eval)?;
            let report = analyze(&code, &AnalyzeOptions { cap, eval: points.clone() })?;
            if let Some(dir) = dump {
                dump_omegas(&code, cap, &dir)?;
            }
            if eval.csv || cli.format == Format::Csv {
                emit_csv(&report, &points, &(0..code.n()).collect::<Vec<_>>())?;
            } else {
                emit_json(&report.to_json())?;
            }
            Ok(if report.has_mismatch() { EXIT_MISMATCH } else { 0 })
        }
        Command::Influence { spec, eval, coordinate } => {
            let code = read_spec(spec.as_deref())?;
            if let Some(j) = coordinate {
                code.check_coordinate(j)?;
            }
            let points = parse_eval(&eval.eval)?;
            let report = analyze(&code, &AnalyzeOptions { cap, eval: points.clone() })?;
            let coords: Vec<usize> = coordinate.map_or_else(|| (0..code.n()).collect(), |j| vec![j]);
            if eval.csv || cli.format == Format::Csv {
                emit_csv(&report, &points, &coords)?;
            } else {
                let records: Vec<Value> = coords.iter().map(|&j| report.coordinate_json(&report.records[j])).collect();
                emit_json(&Value::Array(records))?;
            }
            let mismatch = coords.iter().any(|&j| report.records[j].matches() == Some(false));
            Ok(if mismatch { EXIT_MISMATCH } else { 0 })
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut all_passed = true;
            let mut out = io::stdout().lock();
            for name in names {
                let report = run_suite(name, cap)?;
                for v in &report.verdicts {
                    writeln!(out, "{name}: {v}")?;
                }
                for note in &report.notes {
                    writeln!(out, "{name}: note: {note}")?;
                }
                let ok = report.passed();
                let passed = report.verdicts.iter().filter(|v| v.passed).count();
                writeln!(
                    out,
                    "{name}: {} ({passed}/{} instances)",
                    if ok { "PASS" } else { "FAIL" },
                    report.verdicts.len()
                )?;
                all_passed &= ok;
            }
            Ok(if all_passed { 0 } else { EXIT_MISMATCH })
        }
        Command::Mds { spec } => {
            let code = read_spec(spec.as_deref())?;
            emit_json(&mds_json(&detect_mds(&code)?))?;
            Ok(0)
        }
        Command::Recover { word, spec } => {
            let code = read_spec(spec.as_deref())?;
            let w: ReceivedWord = word.parse().with_context(|| format!("bad received word {word:?}"))?;
            let outcome = decode_erasures(&code, &w)?;
            let mut v = outcome.to_json();
            v["received"] = json!(w.to_string());
            v["erasure_pattern"] = json!(w.erasure_pattern().to_string());
            emit_json(&v)?;
            Ok(0)
        }
        Command::Mc { spec, coordinate, p, trials, seed } => {
            let code = read_spec(spec.as_deref())?;
            let p = parse_rational(&p)?;
            let est = mc_unrecoverable_prob(&code, coordinate, &p, trials, seed)?;
            let exact = if cap.allows(code.n()) {
                Some(hypercube::mu_p(&hypercube::omega(&code, coordinate, cap)?, &p)?)
            } else {
                None
            };
            let z = exact.as_ref().and_then(|e| z_score(&est, e));
            emit_json(&json!({
                "coordinate": coordinate,
                "p": rational_string(&p),
                "trials": est.trials,
                "seed": est.seed,
                "unrecoverable": est.unrecoverable,
                "estimate": est.estimate,
                "stderr": est.stderr,
                "exact": exact.as_ref().map(rational_string),
                "z_score": z,
                "rng": est.algorithm,
            }))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

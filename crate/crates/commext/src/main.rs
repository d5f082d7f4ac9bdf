//! Command-line surface for hypothesis checks, extension construction,
//! verification, instance generation, and equivalence decisions.
//!
//! Exit codes: 0 success/pass, 1 usage or I/O or parse error, 2 failed
//! check (hypotheses, verification, equivalence), 3 certified rejection
//! or generation failure. "Hypotheses fail" (2) is deliberately distinct
//! from "reject under passing hypotheses" (3): only the latter certifies
//! that no extension of the requested size exists.

use clap::{Args, Parser, Subcommand};
use commext::{
    apply_action, check_hypotheses, find_equivalence, generate_generic, generate_nilpotent,
    generate_structured, minimality_bound, verify_extension, verify_randomized, EquivalenceError,
    ExtendError, ExtensionTuple, GenerateError, HypothesisReport, Matrix,
    MinimalityCertificate, TupleDocument, VerifyFailure,
};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "commext",
    about = "Compute, verify and certify minimal commuting extensions of matrix tuples over exact rationals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the rank hypotheses of a tuple at a target size
    Check {
        /// Input tuple file
        tuple: PathBuf,
        #[command(flatten)]
        size: SizeArg,
        #[arg(long)]
        json: bool,
    },
    /// Compute a commuting extension of the requested size
    Extend {
        /// Input tuple file
        tuple: PathBuf,
        #[command(flatten)]
        size: SizeArg,
        /// Output extension file
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Verify an extension file against its input tuple
    Verify {
        /// Extension file
        extension: PathBuf,
        /// Input tuple file
        tuple: PathBuf,
        /// Also run the randomized two-combination commutativity check
        #[arg(long)]
        randomized: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        coeff_bound: i64,
        #[arg(long)]
        json: bool,
    },
    /// Generate test instances
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Decide essential equivalence of two extensions of the same tuple
    Equiv {
        /// First extension file
        first: PathBuf,
        /// Second extension file
        second: PathBuf,
        /// Input tuple file both extensions extend
        tuple: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SizeArg {
    /// Target extension size r (defaults to the file's r line)
    #[arg(long = "size-r")]
    size_r: Option<usize>,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Random simultaneously-diagonalizable instance with ground truth
    Generic {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: usize,
        #[arg(short)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        entry_bound: i64,
        #[arg(long, default_value_t = 32)]
        max_retries: usize,
        /// Output tuple file
        #[arg(long)]
        out: PathBuf,
        /// Optional ground-truth extension file
        #[arg(long)]
        ground_truth: Option<PathBuf>,
    },
    /// Deterministic 0/1-diagonal instance over given index sets
    Structured {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: usize,
        #[arg(short)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// p disjoint index sets of size r-n, 1-based, e.g. "1,2;3,4;5,6"
        #[arg(long)]
        index_sets: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ground_truth: Option<PathBuf>,
    },
    /// Always-valid size-2n nilpotent extension of a tuple file
    Nilpotent {
        /// Input tuple file
        #[arg(long)]
        input: PathBuf,
        /// Output extension file
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    };
    ExitCode::from(code)
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Check { tuple, size, json } => cmd_check(&tuple, size.size_r, json),
        Command::Extend {
            tuple,
            size,
            out,
            json,
        } => cmd_extend(&tuple, size.size_r, &out, json),
        Command::Verify {
            extension,
            tuple,
            randomized,
            seed,
            coeff_bound,
            json,
        } => cmd_verify(&extension, &tuple, randomized, seed, coeff_bound, json),
        Command::Generate(gen) => cmd_generate(gen),
        Command::Equiv {
            first,
            second,
            tuple,
            json,
        } => cmd_equiv(&first, &second, &tuple, json),
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_tuple(path: &Path) -> Result<TupleDocument, String> {
    commext::read_tuple(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_extension(path: &Path) -> Result<ExtensionTuple, String> {
    commext::read_extension(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_r(doc: &TupleDocument, flag: Option<usize>) -> Result<usize, String> {
    let r = flag
        .or(doc.r)
        .ok_or("no target size: pass --size-r or add an 'r' line to the file")?;
    if r < doc.input.n() {
        return Err(format!("r = {r} is smaller than n = {}", doc.input.n()));
    }
    Ok(r)
}

fn report_json(rep: &HypothesisReport) -> serde_json::Value {
    let pairs: Vec<_> = rep
        .pair_ranks
        .iter()
        .map(|(&(k, l), &rank)| {
            json!({
                "k": k + 1,
                "l": l + 1,
                "rank": rank,
                "required": rep.required_pair_rank(),
                "pass": rank == rep.required_pair_rank(),
            })
        })
        .collect();
    let triples: Vec<_> = rep
        .triple_dims
        .iter()
        .map(|(&(k, l, m), &dim)| {
            json!({
                "k": k + 1,
                "l": l + 1,
                "m": m + 1,
                "dim": dim,
                "required": rep.required_triple_dim(),
                "pass": dim == rep.required_triple_dim(),
            })
        })
        .collect();
    json!({
        "n": rep.n,
        "r": rep.r,
        "p": rep.p,
        "required_pair_rank": rep.required_pair_rank(),
        "required_triple_dim": rep.required_triple_dim(),
        "pairs": pairs,
        "triples": triples,
        "overall": rep.overall,
        "reason": rep.reason,
    })
}

fn print_report(rep: &HypothesisReport) {
    println!(
        "hypotheses at r = {} (n = {}, p = {}): need pair rank {} and triple dim {}",
        rep.r,
        rep.n,
        rep.p,
        rep.required_pair_rank(),
        rep.required_triple_dim()
    );
    for (&(k, l), &rank) in &rep.pair_ranks {
        let mark = if rank == rep.required_pair_rank() { "ok" } else { "FAIL" };
        println!("  rank [A_{}, A_{}] = {rank}  [{mark}]", k + 1, l + 1);
    }
    for (&(k, l, m), &dim) in &rep.triple_dims {
        let mark = if dim == rep.required_triple_dim() { "ok" } else { "FAIL" };
        println!(
            "  dim(Ima [A_{0}, A_{1}] + Ima [A_{0}, A_{2}]) = {dim}  [{mark}]",
            k + 1,
            l + 1,
            m + 1
        );
    }
    match (&rep.overall, &rep.reason) {
        (true, _) => println!("verdict: PASS"),
        (false, Some(reason)) => println!("verdict: FAIL ({reason})"),
        (false, None) => println!("verdict: FAIL"),
    }
}

fn cmd_check(tuple: &Path, size_r: Option<usize>, json: bool) -> Result<u8, String> {
    let doc = load_tuple(tuple)?;
    let r = resolve_r(&doc, size_r)?;
    let rep = check_hypotheses(&doc.input, r);
    if json {
        println!("{}", serde_json::to_string_pretty(&report_json(&rep)).unwrap());
    } else {
        print_report(&rep);
    }
    Ok(if rep.overall { 0 } else { 2 })
}

fn certificate_summary(cert: &MinimalityCertificate) -> String {
    let (k, l) = cert.witness_pair;
    format!(
        "minimality: lower bound {} via pair (A_{}, A_{}){}",
        cert.lower_bound,
        k + 1,
        l + 1,
        if cert.tight { ", tight" } else { "" }
    )
}

fn cmd_extend(tuple: &Path, size_r: Option<usize>, out: &Path, json: bool) -> Result<u8, String> {
    let doc = load_tuple(tuple)?;
    let r = resolve_r(&doc, size_r)?;
    let input = &doc.input;
    if input.p() < 3 {
        return Err(format!("UnsupportedP: algorithm requires p >= 3, got {}", input.p()));
    }
    let result = if input.p() == 3 {
        commext::extend3(input.matrix(0), input.matrix(1), input.matrix(2), r)
    } else {
        commext::extend_p(input, r)
    };
    match result {
        Ok(ext) => {
            // Success paths re-verify before anything reaches disk.
            let verify = verify_extension(&ext, input);
            if !verify.passed {
                return Err("internal: solver output failed verification".to_string());
            }
            let cert = minimality_bound(input, Some(&ext));
            write_file(out, &commext::write_extension(&ext))?;
            if json {
                let (k, l) = cert.witness_pair;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "status": "extended",
                        "r": ext.r(),
                        "out": out.display().to_string(),
                        "minimality": {
                            "lower_bound": cert.lower_bound,
                            "witness_pair": [k + 1, l + 1],
                            "achieved_r": cert.achieved_r,
                            "tight": cert.tight,
                        },
                    }))
                    .unwrap()
                );
            } else {
                println!("extension of size {} written to {}", ext.r(), out.display());
                println!("{}", certificate_summary(&cert));
            }
            Ok(0)
        }
        Err(ExtendError::HypothesesNotSatisfied(rep)) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "status": "hypotheses-failed",
                        "report": report_json(&rep),
                    }))
                    .unwrap()
                );
            } else {
                println!("hypotheses not satisfied at r = {r}; existence undecided");
                print_report(&rep);
            }
            Ok(2)
        }
        Err(ExtendError::Rejected(rej)) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "status": "rejected",
                        "step": rej.step,
                        "reason": rej.reason.to_string(),
                    }))
                    .unwrap()
                );
            } else {
                println!("{rej}");
                println!("hypotheses hold, so no commuting extension of size {r} exists");
            }
            Ok(3)
        }
        Err(e @ (ExtendError::UnsupportedP(_) | ExtendError::NoValidPartner { .. })) => {
            Err(e.to_string())
        }
    }
}

fn cmd_verify(
    extension: &Path,
    tuple: &Path,
    randomized: bool,
    seed: u64,
    coeff_bound: i64,
    json: bool,
) -> Result<u8, String> {
    let ext = load_extension(extension)?;
    let doc = load_tuple(tuple)?;
    if ext.n() != doc.input.n() || ext.p() != doc.input.p() {
        return Err(format!(
            "size mismatch: extension has n = {}, p = {}; tuple has n = {}, p = {}",
            ext.n(),
            ext.p(),
            doc.input.n(),
            doc.input.p()
        ));
    }
    let rep = verify_extension(&ext, &doc.input);
    let random_ok = randomized.then(|| verify_randomized(&ext, seed, coeff_bound));
    let passed = rep.passed && random_ok.unwrap_or(true);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "passed": passed,
                "exact": rep.passed,
                "randomized": random_ok,
                "failure": rep.failure.as_ref().map(describe_failure),
            }))
            .unwrap()
        );
    } else if passed {
        println!("verification passed (exact{})", if randomized { " + randomized" } else { "" });
    } else if let Some(f) = &rep.failure {
        println!("verification failed: {}", describe_failure(f));
    } else {
        println!("randomized check failed");
    }
    Ok(if passed { 0 } else { 2 })
}

fn describe_failure(f: &VerifyFailure) -> String {
    match f {
        VerifyFailure::TopLeftMismatch { index, row, col } => format!(
            "top-left block of Z_{} differs from A_{} at ({row}, {col})",
            index + 1,
            index + 1
        ),
        VerifyFailure::NonCommuting { i, j, row, col } => format!(
            "Z_{} and Z_{} do not commute, witness entry ({row}, {col})",
            i + 1,
            j + 1
        ),
        VerifyFailure::SizeMismatch => "size mismatch".to_string(),
    }
}

fn parse_index_sets(spec: &str, p: usize) -> Result<Vec<Vec<usize>>, String> {
    let sets: Result<Vec<Vec<usize>>, String> = spec
        .split(';')
        .map(|group| {
            group
                .split(',')
                .map(|tok| {
                    let v: usize = tok
                        .trim()
                        .parse()
                        .map_err(|_| format!("invalid index '{tok}' in --index-sets"))?;
                    if v == 0 {
                        return Err("indices in --index-sets are 1-based".to_string());
                    }
                    Ok(v - 1)
                })
                .collect()
        })
        .collect();
    let sets = sets?;
    if sets.len() != p {
        return Err(format!("--index-sets must contain {p} groups, got {}", sets.len()));
    }
    Ok(sets)
}

fn write_instance(
    inst: &commext::GroundTruthInstance,
    out: &Path,
    ground_truth: Option<&Path>,
    seed: u64,
) -> Result<u8, String> {
    let doc = TupleDocument {
        input: inst.input.clone(),
        r: Some(inst.r),
    };
    write_file(out, &commext::write_tuple(&doc))?;
    if let Some(gt) = ground_truth {
        write_file(gt, &commext::write_extension(&inst.extension))?;
    }
    println!(
        "generated n = {}, r = {}, p = {} instance with seed {seed}; tuple written to {}",
        inst.n,
        inst.r,
        inst.p,
        out.display()
    );
    if let Some(gt) = ground_truth {
        println!("ground-truth extension written to {}", gt.display());
    }
    Ok(0)
}

fn cmd_generate(gen: GenerateCommand) -> Result<u8, String> {
    match gen {
        GenerateCommand::Generic {
            n,
            r,
            p,
            seed,
            entry_bound,
            max_retries,
            out,
            ground_truth,
        } => match generate_generic(n, r, p, seed, entry_bound, max_retries) {
            Ok(inst) => write_instance(&inst, &out, ground_truth.as_deref(), seed),
            Err(GenerateError::GenerationFailed(msg)) => {
                println!("generation failed: {msg}");
                Ok(3)
            }
            Err(e) => Err(e.to_string()),
        },
        GenerateCommand::Structured {
            n,
            r,
            p,
            seed,
            index_sets,
            out,
            ground_truth,
        } => {
            let sets = parse_index_sets(&index_sets, p)?;
            match generate_structured(n, r, p, &sets, seed) {
                Ok(inst) => write_instance(&inst, &out, ground_truth.as_deref(), seed),
                Err(GenerateError::GenerationFailed(msg)) => {
                    println!("generation failed: {msg}");
                    Ok(3)
                }
                Err(e @ GenerateError::InvalidIndexSets(_)) => Err(e.to_string()),
            }
        }
        GenerateCommand::Nilpotent { input, out } => {
            let doc = load_tuple(&input)?;
            let ext = generate_nilpotent(&doc.input);
            // The construction always verifies; keep the gate anyway.
            if !verify_extension(&ext, &doc.input).passed {
                return Err("internal: nilpotent construction failed verification".to_string());
            }
            write_file(&out, &commext::write_extension(&ext))?;
            println!(
                "nilpotent extension of size {} written to {}",
                ext.r(),
                out.display()
            );
            Ok(0)
        }
    }
}

fn format_matrix_inline(m: &Matrix) -> String {
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
            format!("[{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_equiv(first: &Path, second: &Path, tuple: &Path, json: bool) -> Result<u8, String> {
    let e1 = load_extension(first)?;
    let e2 = load_extension(second)?;
    let doc = load_tuple(tuple)?;
    for (name, ext) in [("first", &e1), ("second", &e2)] {
        let rep = verify_extension(ext, &doc.input);
        if !rep.passed {
            return Err(format!(
                "{name} file is not a commuting extension of the tuple: {}",
                rep.failure.as_ref().map(describe_failure).unwrap_or_default()
            ));
        }
    }
    match find_equivalence(&e1, &e2) {
        Ok(t) => {
            debug_assert_eq!(&apply_action(&e1, &t), &e2);
            if json {
                let m: Vec<Vec<String>> = (0..t.matrix().rows())
                    .map(|i| t.matrix().row(i).iter().map(|x| x.to_string()).collect())
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({"equivalent": true, "transform": m}))
                        .unwrap()
                );
            } else {
                println!("equivalent under the border action, M = {}", format_matrix_inline(t.matrix()));
            }
            Ok(0)
        }
        Err(EquivalenceError::NotEquivalent { index, block }) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "equivalent": false,
                        "witness": {"matrix": index + 1, "block": block},
                    }))
                    .unwrap()
                );
            } else {
                println!("not equivalent: block {block} of matrix {} differs", index + 1);
            }
            Ok(2)
        }
        Err(EquivalenceError::DegenerateInput) => {
            println!("equivalence unknown: B_1 is not of full column rank, anchored decision unavailable");
            Ok(2)
        }
        Err(e) => Err(e.to_string()),
    }
}

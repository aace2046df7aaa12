//! `decomp`: command-line front end for decomposition-complexity
//! experiments. Every machine-readable output is canonical JSON and
//! byte-identical across runs with the same configuration and seed.
//!
//! Exit codes: 0 success/verified, 1 refuted/infeasible, 2 malformed input,
//! 3 budget exhausted.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decomp_core::automata::{
    ca_run, extract_decomposition, CARule, IndexingCa, TriangleCircuit, INDEXING_CA_TIME_FACTOR,
};
use decomp_core::f2poly::protocol::run_protocol;
use decomp_core::solver::{
    counting_lower_bound, counting_lower_bound_approx, exact_dc, indexing_lower_bound,
    SearchBudget, SolveStatus,
};
use decomp_core::{
    first_counterexample, make_family, DecompositionCertificate, Error as CoreError, FamilySpec,
    TernaryFunction,
};
use num_rational::Ratio;
use output::{OutputSink, Payload};
use std::path::PathBuf;
use std::time::Duration;

const EXIT_OK: i32 = 0;
const EXIT_REFUTED: i32 = 1;
const EXIT_MALFORMED: i32 = 2;
const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(name = "decomp", version, about = "Decomposition complexity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct OutputOpts {
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; JSON is the canonical machine-readable surface.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct BudgetOpts {
    /// Node-visit limit for the search.
    #[arg(long, value_name = "N")]
    budget_nodes: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long, value_name = "SECS")]
    budget_seconds: Option<u64>,
    /// Largest total message size u+v to try.
    #[arg(long, value_name = "M")]
    max_m: Option<u32>,
}

impl BudgetOpts {
    fn to_budget(&self) -> SearchBudget {
        SearchBudget {
            max_m: self.max_m,
            max_nodes: self.budget_nodes,
            max_time: self.budget_seconds.map(Duration::from_secs),
            allow_unknown: true,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in function family as a function file.
    Gen {
        /// Family name: xor, equality, indexing, xor-indexing, add-indexing,
        /// constant, random.
        #[arg(long)]
        family: String,
        #[arg(short, default_value_t = 0)]
        p: u32,
        #[arg(short, default_value_t = 0)]
        q: u32,
        #[arg(short, default_value_t = 0)]
        r: u32,
        /// Size parameter for the indexing families.
        #[arg(short)]
        k: Option<u32>,
        /// Output width for the constant family.
        #[arg(short, default_value_t = 1)]
        s: u32,
        /// Value of the constant family.
        #[arg(long, default_value_t = 0)]
        value: u64,
        /// Seed for the random family.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Compute the decomposition complexity of a function file.
    Solve {
        function: PathBuf,
        #[command(flatten)]
        budget: BudgetOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Check a certificate file against a function file.
    Verify {
        function: PathBuf,
        certificate: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Evaluate a lower-bound formula exactly.
    Bounds {
        /// counting | indexing
        kind: String,
        #[arg(short, default_value_t = 0)]
        p: u32,
        #[arg(short, default_value_t = 0)]
        q: u32,
        #[arg(short, default_value_t = 0)]
        r: u32,
        #[arg(short)]
        k: Option<u32>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Counting bound against ε-approximations (certified rounding).
    Approx {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        q: u32,
        #[arg(short)]
        r: u32,
        /// ε as NUM/DEN, e.g. 1/4.
        #[arg(long, value_name = "NUM/DEN")]
        epsilon: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run the three-message xor-indexing protocol.
    Protocol {
        #[arg(short)]
        k: u32,
        /// y as a 2^k-bit string.
        #[arg(long, value_name = "BITS", conflicts_with_all = ["y_file", "seed"])]
        y: Option<String>,
        /// File holding `{"k":..,"table":"<bits>"}`.
        #[arg(long, value_name = "PATH", conflicts_with = "seed")]
        y_file: Option<PathBuf>,
        /// Seeded random y table.
        #[arg(long)]
        seed: Option<u64>,
        /// Alice's input, k bits.
        #[arg(long, value_name = "BITS")]
        x: String,
        /// Bob's input, k bits.
        #[arg(long, value_name = "BITS")]
        z: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Cellular-automaton commands.
    #[command(subcommand)]
    Ca(CaCommand),
}

#[derive(Subcommand)]
enum CaCommand {
    /// Run a uniform rule on an input bit string.
    Run {
        /// Rule file.
        #[arg(long, value_name = "PATH")]
        rule: PathBuf,
        /// Input bits.
        #[arg(long, value_name = "BITS")]
        input: String,
        #[arg(long)]
        steps: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Extract a decomposition certificate from a triangle circuit.
    Extract {
        /// Circuit file (seeded or explicit).
        #[arg(long, value_name = "PATH")]
        circuit: PathBuf,
        /// Side length of the input split k + f + k.
        #[arg(short)]
        k: u32,
        /// Extraction delay Δ; the circuit height must be t* + Δ.
        #[arg(long, default_value_t = 0)]
        delay: u32,
        /// Also write the circuit's function table here.
        #[arg(long, value_name = "PATH")]
        function_out: Option<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Build and run the linear-time indexing automaton.
    Indexing {
        #[arg(short)]
        k: u32,
        /// x as a k-bit string (single-run mode).
        #[arg(long, value_name = "BITS")]
        x: Option<String>,
        /// y as a 2^(2k)-bit string (single-run mode).
        #[arg(long, value_name = "BITS")]
        y: Option<String>,
        /// z as a k-bit string (single-run mode).
        #[arg(long, value_name = "BITS")]
        z: Option<String>,
        /// Check every input of size k instead of a single run.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn parse_bits(name: &str, text: &str, width: u32) -> Result<u64, String> {
    if text.len() != width as usize {
        return Err(format!("{name} must be exactly {width} bits, got {text:?}"));
    }
    let mut value = 0u64;
    for ch in text.chars() {
        value <<= 1;
        match ch {
            '0' => {}
            '1' => value |= 1,
            other => return Err(format!("{name} has invalid character {other:?}")),
        }
    }
    Ok(value)
}

fn parse_table(name: &str, text: &str, len: usize) -> Result<Vec<u8>, String> {
    if text.len() != len {
        return Err(format!("{name} must be exactly {len} bits, got {}", text.len()));
    }
    text.chars()
        .map(|ch| match ch {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(format!("{name} has invalid character {other:?}")),
        })
        .collect()
}

fn parse_epsilon(text: &str) -> Result<Ratio<u64>, String> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: u64 = num.trim().parse().map_err(|_| format!("bad epsilon numerator {num:?}"))?;
    let den: u64 = den.trim().parse().map_err(|_| format!("bad epsilon denominator {den:?}"))?;
    if den == 0 {
        return Err("epsilon denominator is zero".into());
    }
    Ok(Ratio::new(num, den))
}

fn read_file(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn family_spec(
    family: &str,
    p: u32,
    q: u32,
    r: u32,
    k: Option<u32>,
    s: u32,
    value: u64,
    seed: u64,
) -> Result<FamilySpec, String> {
    let need_k = || k.ok_or_else(|| format!("family {family:?} needs -k"));
    match family {
        "xor" => Ok(FamilySpec::Xor { p, q, r }),
        "equality" => Ok(FamilySpec::Equality { p, q }),
        "indexing" => Ok(FamilySpec::Indexing { k: need_k()? }),
        "xor-indexing" => Ok(FamilySpec::XorIndexing { k: need_k()? }),
        "add-indexing" => Ok(FamilySpec::AddIndexing { k: need_k()? }),
        "constant" => Ok(FamilySpec::Constant { p, q, r, s, value }),
        "random" => Ok(FamilySpec::Random { p, q, r, seed }),
        other => Err(format!("unknown family {other:?}")),
    }
}

fn main() {
    decomp_core::init_thread_pool_from_env();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_MALFORMED
        }
    };
    std::process::exit(code);
}

fn core_exit(err: CoreError) -> String {
    err.to_string()
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Gen { family, p, q, r, k, s, value, seed, output } => {
            let spec = family_spec(&family, p, q, r, k, s, value, seed)?;
            let function = make_family(&spec).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Function(&function))?;
            Ok(EXIT_OK)
        }

        Command::Solve { function, budget, output } => {
            let f = TernaryFunction::from_json(&read_file(&function)?).map_err(core_exit)?;
            let result = exact_dc(&f, &budget.to_budget()).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Solve(&result))?;
            Ok(if result.status == SolveStatus::Exact { EXIT_OK } else { EXIT_BUDGET })
        }

        Command::Verify { function, certificate, output } => {
            let f = TernaryFunction::from_json(&read_file(&function)?).map_err(core_exit)?;
            let cert = DecompositionCertificate::from_json(&read_file(&certificate)?)
                .map_err(core_exit)?;
            let counterexample = first_counterexample(&f, &cert).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Verify { counterexample })?;
            Ok(if counterexample.is_none() { EXIT_OK } else { EXIT_REFUTED })
        }

        Command::Bounds { kind, p, q, r, k, output } => {
            let report = match kind.as_str() {
                "counting" => counting_lower_bound(p, q, r).map_err(core_exit)?,
                "indexing" => {
                    let k = k.ok_or("bounds indexing needs -k")?;
                    indexing_lower_bound(k).map_err(core_exit)?
                }
                other => return Err(format!("unknown bounds kind {other:?}")),
            };
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Bound(&report))?;
            Ok(EXIT_OK)
        }

        Command::Approx { p, q, r, epsilon, output } => {
            let eps = parse_epsilon(&epsilon)?;
            let report = counting_lower_bound_approx(p, q, r, eps).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Bound(&report))?;
            Ok(EXIT_OK)
        }

        Command::Protocol { k, y, y_file, seed, x, z, output } => {
            let table = if let Some(bits) = y {
                parse_table("--y", &bits, 1usize << k)?
            } else if let Some(path) = y_file {
                let file: output::YTableFile =
                    serde_json::from_str(&read_file(&path)?).map_err(|e| e.to_string())?;
                if file.k != k {
                    return Err(format!("y file is for k = {}, expected {k}", file.k));
                }
                parse_table("y file table", &file.table, 1usize << k)?
            } else if let Some(seed) = seed {
                use rand_core::{RngCore, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                (0..1usize << k).map(|_| (rng.next_u64() & 1) as u8).collect()
            } else {
                return Err("protocol needs one of --y, --y-file, --seed".into());
            };
            let x = parse_bits("--x", &x, k)?;
            let z = parse_bits("--z", &z, k)?;
            let transcript = run_protocol(x, &table, z, k).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Protocol(&transcript))?;
            Ok(EXIT_OK)
        }

        Command::Ca(ca) => run_ca(ca),
    }
}

fn run_ca(command: CaCommand) -> Result<i32, String> {
    match command {
        CaCommand::Run { rule, input, steps, output } => {
            let rule = CARule::from_json(&read_file(&rule)?).map_err(core_exit)?;
            let bits = parse_table("--input", &input, input.len())?;
            let trace = ca_run(&rule, &bits, steps).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Trace(&trace))?;
            Ok(EXIT_OK)
        }

        CaCommand::Extract { circuit, k, delay, function_out, output } => {
            let circuit = TriangleCircuit::from_json(&read_file(&circuit)?).map_err(core_exit)?;
            if k == 0 || circuit.n() < 2 * k + 1 {
                return Err(format!("circuit length {} too short for k = {k}", circuit.n()));
            }
            let f_mid = circuit.n() - 2 * k;
            let extracted = extract_decomposition(&circuit, k, f_mid, delay).map_err(core_exit)?;
            let verified = first_counterexample(&extracted.function, &extracted.certificate)
                .map_err(core_exit)?
                .is_none();
            if let Some(path) = function_out {
                std::fs::write(&path, extracted.function.to_json() + "\n")
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            sink.emit(&Payload::Extract { extracted: &extracted, verified })?;
            Ok(if verified { EXIT_OK } else { EXIT_REFUTED })
        }

        CaCommand::Indexing { k, x, y, z, exhaustive, output } => {
            let ca = IndexingCa::build(k).map_err(core_exit)?;
            let sink = OutputSink::new(output.out, output.format == Format::Text);
            if exhaustive {
                if x.is_some() || y.is_some() || z.is_some() {
                    return Err("--exhaustive conflicts with --x/--y/--z".into());
                }
                let report = exhaustive_indexing(&ca, k)?;
                let ok = report.failures == 0;
                sink.emit(&Payload::IndexingExhaustive(&report))?;
                Ok(if ok { EXIT_OK } else { EXIT_REFUTED })
            } else {
                let (x, y, z) = match (x, y, z) {
                    (Some(x), Some(y), Some(z)) => (x, y, z),
                    _ => return Err("single-run mode needs --x, --y and --z".into()),
                };
                let x = parse_bits("--x", &x, k)?;
                let z = parse_bits("--z", &z, k)?;
                let table = parse_table("--y", &y, 1usize << (2 * k))?;
                let (result, steps) = ca.run(x, &table, z).map_err(core_exit)?;
                let expected = table[((x << k) | z) as usize];
                sink.emit(&Payload::IndexingRun {
                    k,
                    result,
                    expected,
                    steps,
                    bound: ca.step_bound(),
                })?;
                Ok(if result == expected { EXIT_OK } else { EXIT_REFUTED })
            }
        }
    }
}

fn exhaustive_indexing(ca: &IndexingCa, k: u32) -> Result<output::IndexingReport, String> {
    use rayon::prelude::*;
    if k > 2 {
        return Err(format!("exhaustive mode supports k <= 2, got {k}"));
    }
    let side = 1u64 << k;
    let ys = 1u64 << (1u64 << (2 * k));
    let q = 1u32 << (2 * k);
    let totals: Vec<(u64, u32)> = (0..ys)
        .into_par_iter()
        .map(|ym| {
            let table: Vec<u8> = (0..q).map(|i| decomp_core::bit_at(ym, q, i) as u8).collect();
            let mut failures = 0u64;
            let mut max_steps = 0u32;
            for x in 0..side {
                for z in 0..side {
                    match ca.run(x, &table, z) {
                        Ok((got, steps)) => {
                            max_steps = max_steps.max(steps);
                            if got != table[((x << k) | z) as usize] {
                                failures += 1;
                            }
                        }
                        Err(_) => failures += 1,
                    }
                }
            }
            (failures, max_steps)
        })
        .collect();
    let failures = totals.iter().map(|t| t.0).sum();
    let max_steps = totals.iter().map(|t| t.1).max().unwrap_or(0);
    Ok(output::IndexingReport {
        k,
        inputs: ys * side * side,
        failures,
        max_steps,
        step_bound: ca.step_bound(),
        time_factor: INDEXING_CA_TIME_FACTOR,
    })
}

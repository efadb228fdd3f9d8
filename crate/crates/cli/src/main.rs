//! `strata`: batch interface to strata-core.
//!
//! JSON goes to stdout, summaries to stderr. Exit codes: 0 success or
//! CERTIFIED, 1 fault, 2 UNKNOWN, 3 REJECTED.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use strata_core::oracle::{run_claim, CLAIMS};
use strata_core::{
    degenerations, forget, hassett_reduce, pseudostable_contract, Budget, Certifier,
    ExtremalityCertificate, GraphJson, ImageResult, Mark, OrderedPartition, StableGraph,
    StrataPoset, Verdict, WeightData, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(name = "strata", version, about = "Boundary strata of moduli of pointed curves")]
struct Cli {
    /// Suppress summaries on stderr
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Worker threads for enumeration and the oracle (0 = all cores)
    #[arg(long, short, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Graph JSON file, `-` or absent for stdin
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Ambient {
    #[arg(long, short)]
    genus: u32,
    #[arg(long, short = 'n')]
    marks: usize,
    /// Deepest layer to enumerate; defaults to the full poset
    #[arg(long)]
    max_codim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the stability invariants of a graph
    Validate(Input),
    /// Dimension of the stratum
    Dim(Input),
    /// Compact type, rational tails, anchor and tails
    Classify(Input),
    /// Codimension-k degenerations up to isomorphism
    Degenerate {
        #[command(flatten)]
        input: Input,
        #[arg(long, short, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        compact_type: bool,
    },
    /// Image under the forgetful map dropping one mark
    Forget {
        #[command(flatten)]
        input: Input,
        #[arg(long, short)]
        mark: Mark,
    },
    /// Image under a Hassett reduction morphism
    Reduce {
        #[command(flatten)]
        input: Input,
        /// Weight JSON file
        #[arg(long, conflicts_with_all = ["weight_list", "light_tail"])]
        weights: Option<PathBuf>,
        /// Comma-separated exact weights, e.g. `1,1/3,1/3`
        #[arg(long, conflicts_with = "light_tail")]
        weight_list: Option<String>,
        /// Weight 1/|T| on the listed marks and 1 elsewhere
        #[arg(long, value_delimiter = ',')]
        light_tail: Option<Vec<Mark>>,
    },
    /// Image under the pseudostable contraction
    ContractEps(Input),
    /// Build an extremality certificate
    Certify {
        #[command(flatten)]
        input: Input,
        /// Ordered partition such as `({3,6},{2},{1,5},{4,7})`
        #[arg(long, requires = "genus")]
        partition: Option<String>,
        #[arg(long, short)]
        genus: Option<u32>,
    },
    /// Re-verify a certificate
    Check {
        /// Certificate JSON file, `-` or absent for stdin
        file: Option<PathBuf>,
    },
    /// Enumerate the poset of boundary strata
    Enumerate {
        #[command(flatten)]
        ambient: Ambient,
        /// Print the sizes of layers 1..=max-codim only
        #[arg(long)]
        count: bool,
    },
    /// Run the independent verifiers
    Oracle {
        #[arg(long, short)]
        genus: u32,
        #[arg(long, short = 'n')]
        marks: usize,
        /// One of the claim names, or `all`
        #[arg(long, default_value = "all")]
        claim: String,
        /// Print report JSON instead of the summary table
        #[arg(long)]
        json: bool,
    },
    /// Export the poset as Graphviz or JSON
    Export {
        #[command(flatten)]
        ambient: Ambient,
        /// Graphviz output
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        /// JSON output (the default)
        #[arg(long)]
        json: bool,
    },
}

/// A fault, reported on stderr with exit code 1.
struct Failure(String);

fn fault(message: impl Display) -> Failure {
    Failure(message.to_string())
}

type Outcome = Result<u8, Failure>;

struct Context {
    quiet: bool,
}

impl Context {
    fn note(&self, message: impl Display) {
        if !self.quiet {
            eprintln!("{message}");
        }
    }
}

fn read_source(file: &Option<PathBuf>) -> Result<(String, String), Failure> {
    match file {
        Some(path) if path.as_os_str() != "-" => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| fault(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), text))
        }
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| fault(format!("<stdin>: {e}")))?;
            Ok(("<stdin>".into(), text))
        }
    }
}

fn read_graph(input: &Input) -> Result<StableGraph, Failure> {
    let (source, text) = read_source(&input.file)?;
    GraphJson::parse(&text)
        .and_then(|g| g.to_graph())
        .map_err(|e| fault(format!("{source}: {e}")))
}

fn emit<T: Serialize>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(fault)?;
    writeln!(io::stdout(), "{text}").map_err(fault)?;
    Ok(0)
}

fn emit_image(ctx: &Context, result: Result<ImageResult, impl Display>) -> Outcome {
    let image = result.map_err(fault)?;
    ctx.note(format!(
        "image dim {}, index {}{}",
        image.image_dim,
        image.index,
        if image.in_exceptional_locus {
            ", in the exceptional locus"
        } else {
            ""
        }
    ));
    emit(&image.to_json())
}

fn verdict_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Certified => 0,
        Verdict::Unknown => 2,
        Verdict::Rejected => 3,
    }
}

fn poset(ambient: &Ambient) -> Result<StrataPoset, Failure> {
    let result = match ambient.max_codim {
        Some(k) => StrataPoset::enumerate(ambient.genus, ambient.marks, k),
        None => StrataPoset::enumerate_full(ambient.genus, ambient.marks, &Budget::unlimited()),
    };
    result.map_err(fault)
}

fn weights(
    n: usize,
    file: &Option<PathBuf>,
    list: &Option<String>,
    tail: &Option<Vec<Mark>>,
) -> Result<WeightData, Failure> {
    if let Some(path) = file {
        let (source, text) = read_source(&Some(path.clone()))?;
        return WeightData::parse_json(&text).map_err(|e| fault(format!("{source}: {e}")));
    }
    if let Some(list) = list {
        let items: Vec<&str> = list.split(',').map(str::trim).collect();
        return WeightData::from_strings(&items).map_err(|e| fault(format!("--weight-list: {e}")));
    }
    if let Some(tail) = tail {
        let tail: BTreeSet<Mark> = tail.iter().copied().collect();
        return Ok(WeightData::light_tail(n, &tail));
    }
    Err(fault("one of --weights, --weight-list or --light-tail is required"))
}

fn run(cli: Cli) -> Outcome {
    let ctx = Context { quiet: cli.quiet };
    match cli.command {
        Command::Validate(input) => {
            let graph = read_graph(&input)?;
            ctx.note(format!(
                "valid stable graph of type ({},{}), codimension {}",
                graph.ambient_genus(),
                graph.num_marks(),
                graph.codim()
            ));
            emit(&json!({
                "schema_version": SCHEMA_VERSION,
                "valid": true,
                "canonical": graph.canonical_json(),
                "hash": graph.canonical_hash(),
            }))
        }
        Command::Dim(input) => emit(&read_graph(&input)?.dim_stratum()),
        Command::Classify(input) => {
            let graph = read_graph(&input)?;
            let class = graph.classify();
            emit(&json!({
                "schema_version": SCHEMA_VERSION,
                "codim": graph.codim(),
                "dim": graph.dim_stratum(),
                "compact_type": class.compact_type,
                "rational_tails": class.rational_tails,
                "anchor": class.anchor,
                "tails": class.tails,
            }))
        }
        Command::Degenerate {
            input,
            k,
            compact_type,
        } => {
            let graph = read_graph(&input)?;
            let found = degenerations(&graph, k, compact_type);
            ctx.note(format!("{} degenerations of codimension {k}", found.len()));
            emit(&json!({
                "schema_version": SCHEMA_VERSION,
                "k": k,
                "degenerations": found.iter().map(StableGraph::to_json).collect::<Vec<_>>(),
            }))
        }
        Command::Forget { input, mark } => emit_image(&ctx, forget(&read_graph(&input)?, mark)),
        Command::Reduce {
            input,
            weights: file,
            weight_list,
            light_tail,
        } => {
            let graph = read_graph(&input)?;
            let w = weights(graph.num_marks(), &file, &weight_list, &light_tail)?;
            emit_image(&ctx, hassett_reduce(&graph, &w))
        }
        Command::ContractEps(input) => emit_image(&ctx, pseudostable_contract(&read_graph(&input)?)),
        Command::Certify {
            input,
            partition,
            genus,
        } => {
            let graph = match (partition, genus) {
                (Some(text), Some(g)) => OrderedPartition::parse(g, &text)
                    .and_then(|p| Ok(p.build_chain()?))
                    .map_err(|e| fault(format!("--partition: {e}")))?,
                _ => read_graph(&input)?,
            };
            let cert = Certifier::new().certify(&graph);
            ctx.note(format!(
                "{} via {} (depth {})",
                cert.verdict,
                cert.root.rule(),
                cert.root.depth()
            ));
            writeln!(io::stdout(), "{}", cert.to_json_string()).map_err(fault)?;
            Ok(verdict_code(cert.verdict))
        }
        Command::Check { file } => {
            let (source, text) = read_source(&file)?;
            let cert = ExtremalityCertificate::parse(&text)
                .map_err(|e| fault(format!("{source}: {e}")))?;
            match Certifier::new().check(&cert) {
                Ok(()) => {
                    ctx.note(format!("certificate verified: {}", cert.verdict));
                    emit(&json!({"schema_version": SCHEMA_VERSION, "ok": true, "verdict": cert.verdict}))
                }
                Err(failure) => {
                    emit(&json!({"schema_version": SCHEMA_VERSION, "ok": false, "failure": failure}))?;
                    Err(fault(format!("check failed at {failure}")))
                }
            }
        }
        Command::Enumerate { ambient, count } => {
            let poset = poset(&ambient)?;
            if count {
                let sizes: Vec<String> = poset.layer_sizes()[1..].iter().map(usize::to_string).collect();
                writeln!(io::stdout(), "{}", sizes.join(" ")).map_err(fault)?;
                return Ok(0);
            }
            ctx.note(format!("{} strata in layers {:?}", poset.len(), poset.layer_sizes()));
            emit(&poset.to_json())
        }
        Command::Oracle {
            genus,
            marks,
            claim,
            json,
        } => {
            let claims: Vec<&str> = if claim == "all" {
                CLAIMS.to_vec()
            } else {
                vec![claim.as_str()]
            };
            let mut reports = Vec::new();
            for name in claims {
                let budget = Budget::new(Budget::limit_from_env());
                let report = run_claim(name, genus, marks, &budget)
                    .ok_or_else(|| fault(format!("unknown claim {name:?}; expected one of {CLAIMS:?} or all")))?
                    .map_err(|e| fault(format!("{name} ({genus},{marks}): {e}")))?;
                reports.push(report);
            }
            let failed = reports.iter().any(|r| !r.passed());
            if json {
                emit(&reports)?;
            } else {
                for r in &reports {
                    writeln!(io::stdout(), "{}", r.summary_line()).map_err(fault)?;
                }
            }
            if failed {
                Err(fault("oracle found a counterexample"))
            } else {
                Ok(0)
            }
        }
        Command::Export {
            ambient,
            dot,
            json: _,
        } => {
            let poset = poset(&ambient)?;
            if dot {
                write!(io::stdout(), "{}", poset.to_dot()).map_err(fault)?;
                Ok(0)
            } else {
                emit(&poset.to_json())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.jobs;
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

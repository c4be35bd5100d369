//! `pretrans` — a command-line workbench for pretransitive modal logics on
//! finite Kripke structures.
//!
//! Every verb maps to one library operation set: parsing and evaluation,
//! frame-class checks, axiom validity, selective filtration, countermodel
//! search, inclusion probes, labeled-path combinatorics, and the size
//! bounds. Frames and models travel as the JSON documents described in the
//! library; everything a verb emits as JSON can be fed back through the
//! matching `--…` input flag.
//!
//! Exit codes are part of the interface: `0` means a positive result
//! (valid / in class / found / irreducible), `1` a negative one
//! (invalid / not in class / nothing found / reducible), and `2` a usage
//! or input error, reported on stderr.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pretrans::decide::{countermodel_search, inclusion_probe, InclusionVerdict, SearchBudget};
use pretrans::filtration::{
    extract_gl, extract_gl_unchecked, extract_k4, extract_k4_unchecked, FiltrationTrace,
};
use pretrans::formula::{Formula, Scheme};
use pretrans::kripke::io::{to_dot, DotOptions, FrameDoc, ModelDoc};
use pretrans::kripke::{Frame, Model};
use pretrans::paths::{
    cluster_path, find_reduction, find_zigzag_link, greedy_optimal_path, grid_link, is_optimal,
    Bounds, LabeledPath, PathsError,
};
use pretrans::validity::{
    is_lambda_frame, resolve, valid_axiom, valid_bruteforce, LogicSpec, CATALOG,
    DEFAULT_VALUATION_BITS,
};

/// Workbench for pretransitive modal logics on finite Kripke structures.
///
/// Formulas use the surface syntax `bot`, `top`, `p0 p1 …`, `~`, `<>`/`dia`,
/// `[]`/`box`, `&`, `|`, `->` (tightest to loosest), e.g. `<><>p0 -> <>p0`.
#[derive(Parser)]
#[command(name = "pretrans", version, about, max_term_width = 100)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Cap the worker threads used for exhaustive scans.
    #[arg(long, global = true, env = "PRETRANS_THREADS", value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical JSON tree.
    ///
    /// Exit 0 on success, 2 on a syntax error.
    Parse {
        /// Formula in surface syntax.
        #[arg(long, value_name = "FORMULA", conflicts_with = "input")]
        text: Option<String>,
        /// File holding a formula JSON tree (as this verb emits).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
    },

    /// Evaluate a formula on a model and list the worlds where it holds.
    ///
    /// Exit 0 when the formula holds at --world (or at every world if
    /// --world is omitted), 1 otherwise.
    Eval {
        /// Model JSON document.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Formula in surface syntax.
        #[arg(long, value_name = "FORMULA")]
        formula: String,
        /// World to test instead of all worlds.
        #[arg(long, value_name = "W")]
        world: Option<usize>,
    },

    /// Check whether a frame belongs to a catalog logic's frame class.
    ///
    /// Exit 0 when the frame validates the logic, 1 when it does not.
    FrameCheck {
        /// Frame JSON document.
        #[arg(long, value_name = "FILE")]
        frame: PathBuf,
        /// Catalog key (see `pretrans catalog`).
        #[arg(long, value_name = "KEY")]
        logic: String,
        /// Parameter for parameterized catalog entries.
        #[arg(long, value_name = "N")]
        n: Option<usize>,
        /// Render the frame as Graphviz DOT instead of the report
        /// (the exit code still reflects the verdict).
        #[arg(long)]
        dot: bool,
    },

    /// Decide validity of an axiom scheme or an arbitrary formula on a frame.
    ///
    /// Exit 0 and print "valid", or exit 1 and print "invalid".
    Valid {
        /// Frame JSON document.
        #[arg(long, value_name = "FILE")]
        frame: PathBuf,
        /// Scheme kind: Trans, wTrans, Sigma, DiaPlus, BoxPlus, A4, Aw4,
        /// ALob, ALobPlus, ATPlus, ABPlus, A3Plus, GLn, GL2v, L2.
        #[arg(long, value_name = "KIND", conflicts_with = "formula")]
        scheme: Option<String>,
        /// Numeric scheme parameter (Trans, GLn, …).
        #[arg(long, value_name = "N")]
        n: Option<u32>,
        /// Formula scheme parameter (gamma for A4/Aw4, beta for ALob).
        #[arg(long, value_name = "FORMULA")]
        param: Option<String>,
        /// Arbitrary formula to brute-force instead of a scheme.
        #[arg(long, value_name = "FORMULA")]
        formula: Option<String>,
        /// Budget cap: worlds × variables may not exceed this many bits.
        #[arg(long, value_name = "BITS", default_value_t = DEFAULT_VALUATION_BITS)]
        bits: usize,
    },

    /// Extract a small selective submodel preserving a formula's refutation.
    Filter {
        /// Model JSON document.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// The formula whose subformula truth must be preserved.
        #[arg(long, value_name = "FORMULA")]
        zeta: String,
        /// Root world the extraction starts from.
        #[arg(long, value_name = "W")]
        world: usize,
        /// Extraction variant.
        #[arg(long, value_enum, value_name = "VARIANT")]
        variant: Variant,
        /// Pretransitivity degree of the model's frame.
        #[arg(long, value_name = "N")]
        n: u64,
        /// Skip the frame-class validation (termination bounds and, for gl,
        /// converse well-foundedness are then not guaranteed).
        #[arg(long)]
        unchecked: bool,
        /// Render the extracted model as Graphviz DOT (gl link edges dashed)
        /// instead of the report.
        #[arg(long)]
        dot: bool,
    },

    /// Search for a countermodel to a formula over a logic's frame class.
    ///
    /// Scans every frame up to --exhaustive-up-to worlds, then seeded random
    /// frames up to --max-worlds. Exit 0 when a countermodel is found, 1 when
    /// the budget is exhausted; absence is NOT a derivability proof.
    Search {
        /// Catalog key of the logic.
        #[arg(long, value_name = "KEY")]
        logic: String,
        /// Parameter for parameterized catalog entries.
        #[arg(long, value_name = "N")]
        n: Option<usize>,
        /// Candidate non-theorem.
        #[arg(long, value_name = "FORMULA")]
        zeta: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },

    /// Probe whether the first logic's theorems are included in the second's.
    ///
    /// Looks for a frame of the strong logic's class refuting a weak axiom.
    /// Exit 0 when such a separating frame is found, 1 when none is within
    /// the budget (evidence of inclusion, not a proof).
    Include {
        /// Catalog key of the candidate weaker logic.
        #[arg(long, value_name = "KEY")]
        weak: String,
        /// Parameter of the weak logic, if required.
        #[arg(long, value_name = "N")]
        weak_n: Option<usize>,
        /// Catalog key of the candidate stronger logic.
        #[arg(long, value_name = "KEY")]
        strong: String,
        /// Parameter of the strong logic, if required.
        #[arg(long, value_name = "N")]
        strong_n: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },

    /// Labeled-path utilities: generation, reductions, zigzag/grid links.
    Paths {
        #[command(subcommand)]
        command: PathsCommand,
    },

    /// Print the size bounds N, M, C_k4, C_gl for a degree and alphabet size.
    Bounds {
        /// Pretransitivity degree.
        #[arg(long, value_name = "N")]
        n: u64,
        /// Size of the label alphabet Psi.
        #[arg(long, value_name = "SIZE")]
        psi: u64,
    },

    /// List the built-in logics, or show one resolved entry in full.
    Catalog {
        /// Catalog key to resolve and print in full.
        #[arg(long, value_name = "KEY")]
        logic: Option<String>,
        /// Parameter for parameterized catalog entries.
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
}

#[derive(Subcommand)]
enum PathsCommand {
    /// Generate an optimal labeled path greedily from a start world.
    ///
    /// Exit 0 with the path as JSON, or 1 when some step has no admissible
    /// successor.
    Gen {
        /// Model JSON document.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Label formula; repeat the flag to cycle several labels.
        #[arg(long, value_name = "FORMULA", required = true)]
        label: Vec<String>,
        /// Start world.
        #[arg(long, value_name = "W")]
        start: usize,
        /// Number of steps.
        #[arg(long, value_name = "LEN")]
        length: usize,
        /// Stay inside the start world's cluster (least candidate instead of
        /// a maximal one).
        #[arg(long)]
        cluster: bool,
    },

    /// Look for a reduction of a labeled path and report optimality.
    ///
    /// Exit 0 when the path is irreducible, 1 when a reduction exists.
    Reduce {
        /// Model JSON document.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Labeled path JSON (alternating worlds and labels).
        #[arg(long, value_name = "FILE")]
        path: PathBuf,
    },

    /// Find the guaranteed link among N+1 chained plain paths of length n.
    ///
    /// Exit 0 with the least triple (i, i', j), 1 when no link exists.
    Link {
        /// Frame JSON document.
        #[arg(long, value_name = "FILE")]
        frame: PathBuf,
        /// Pretransitivity degree.
        #[arg(long, value_name = "N")]
        n: u64,
        /// JSON array of world arrays, e.g. [[0,1],[1,2]].
        #[arg(long, value_name = "FILE")]
        paths: PathBuf,
    },

    /// Find the guaranteed link among M+1 chained labeled paths of length n.
    ///
    /// Exit 0 with the least triple (i, i', j), 1 when no link exists.
    Grid {
        /// Model JSON document.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Pretransitivity degree.
        #[arg(long, value_name = "N")]
        n: u64,
        /// JSON array of labeled paths.
        #[arg(long, value_name = "FILE")]
        paths: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    /// Submodel extraction with forward/backward witnesses.
    K4,
    /// Maximal-witness extraction yielding a conversely well-founded
    /// semisubmodel.
    Gl,
}

/// Search budget shared by `search` and `include`. `--seed` fully
/// determines the random phase, so equal invocations give equal output.
#[derive(Args)]
struct BudgetArgs {
    /// Largest frame size to try.
    #[arg(long, value_name = "N", default_value_t = 4)]
    max_worlds: usize,
    /// Random frames per size beyond the exhaustive range.
    #[arg(long, value_name = "COUNT", default_value_t = 512)]
    max_frames: u64,
    /// Seed for the random phase.
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
    /// Scan all frames up to this size before sampling.
    #[arg(long, value_name = "N", default_value_t = 3)]
    exhaustive_up_to: usize,
}

impl From<&BudgetArgs> for SearchBudget {
    fn from(args: &BudgetArgs) -> Self {
        SearchBudget {
            max_worlds: args.max_worlds,
            max_frames: args.max_frames,
            seed: args.seed,
            exhaustive_up_to: args.exhaustive_up_to,
        }
    }
}

fn main() -> ExitCode {
    // Die silently on SIGPIPE like other line-oriented tools instead of
    // panicking when a downstream consumer closes the pipe early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Parse { text, input } => cmd_parse(text.as_deref(), input.as_deref()),
        Command::Eval {
            model,
            formula,
            world,
        } => cmd_eval(cli.json, model, formula, *world),
        Command::FrameCheck {
            frame,
            logic,
            n,
            dot,
        } => cmd_frame_check(cli.json, frame, logic, *n, *dot),
        Command::Valid {
            frame,
            scheme,
            n,
            param,
            formula,
            bits,
        } => cmd_valid(
            cli.json,
            frame,
            scheme.as_deref(),
            *n,
            param.as_deref(),
            formula.as_deref(),
            *bits,
        ),
        Command::Filter {
            model,
            zeta,
            world,
            variant,
            n,
            unchecked,
            dot,
        } => cmd_filter(cli.json, model, zeta, *world, *variant, *n, *unchecked, *dot),
        Command::Search {
            logic,
            n,
            zeta,
            budget,
        } => cmd_search(cli.json, logic, *n, zeta, budget),
        Command::Include {
            weak,
            weak_n,
            strong,
            strong_n,
            budget,
        } => cmd_include(cli.json, weak, *weak_n, strong, *strong_n, budget),
        Command::Paths { command } => match command {
            PathsCommand::Gen {
                model,
                label,
                start,
                length,
                cluster,
            } => cmd_paths_gen(cli.json, model, label, *start, *length, *cluster),
            PathsCommand::Reduce { model, path } => cmd_paths_reduce(cli.json, model, path),
            PathsCommand::Link { frame, n, paths } => cmd_paths_link(cli.json, frame, *n, paths),
            PathsCommand::Grid { model, n, paths } => cmd_paths_grid(cli.json, model, *n, paths),
        },
        Command::Bounds { n, psi } => cmd_bounds(cli.json, *n, *psi),
        Command::Catalog { logic, n } => cmd_catalog(cli.json, logic.as_deref(), *n),
    }
}

// ---------------------------------------------------------------- loading

fn load_frame(path: &Path) -> Result<(Frame, Option<BTreeMap<usize, String>>)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading frame file {}", path.display()))?;
    let doc: FrameDoc = serde_json::from_str(&text)
        .with_context(|| format!("parsing frame document {}", path.display()))?;
    let frame = doc
        .to_frame()
        .with_context(|| format!("validating frame document {}", path.display()))?;
    Ok((frame, doc.names))
}

fn load_model(path: &Path) -> Result<(Model, Option<BTreeMap<usize, String>>)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading model file {}", path.display()))?;
    let doc: ModelDoc = serde_json::from_str(&text)
        .with_context(|| format!("parsing model document {}", path.display()))?;
    let model = doc
        .to_model()
        .with_context(|| format!("validating model document {}", path.display()))?;
    Ok((model, doc.names))
}

fn parse_formula(text: &str) -> Result<Formula> {
    text.parse::<Formula>()
        .with_context(|| format!("parsing formula `{text}`"))
}

fn resolve_logic(key: &str, n: Option<usize>) -> Result<LogicSpec> {
    resolve(key, n).with_context(|| format!("resolving logic {key}"))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<bool> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(true)
}

// ------------------------------------------------------------------ verbs

fn cmd_parse(text: Option<&str>, input: Option<&Path>) -> Result<bool> {
    let formula = match (text, input) {
        (Some(text), None) => parse_formula(text)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading formula file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing formula tree {}", path.display()))?
        }
        _ => bail!("pass exactly one of --text or --in"),
    };
    print_json(&formula)
}

fn cmd_eval(json: bool, model: &Path, formula: &str, world: Option<usize>) -> Result<bool> {
    let (model, _) = load_model(model)?;
    let formula = parse_formula(formula)?;
    let size = model.frame().size();
    if let Some(w) = world {
        if w >= size {
            bail!("world {w} is out of range for a {size}-world model");
        }
    }
    let truth = model.eval(&formula);
    let true_at: Vec<usize> = truth.iter().collect();
    let positive = match world {
        Some(w) => truth.contains(w),
        None => true_at.len() == size,
    };
    if json {
        print_json(&json!({
            "formula": formula.to_string(),
            "worlds": size,
            "true_at": true_at,
            "holds": positive,
        }))?;
    } else {
        let shown: Vec<String> = true_at.iter().map(usize::to_string).collect();
        println!(
            "true at {} of {} worlds: {}",
            true_at.len(),
            size,
            if shown.is_empty() { "(none)".to_string() } else { shown.join(" ") }
        );
        match world {
            Some(w) => println!("at world {w}: {}", if positive { "true" } else { "false" }),
            None => println!("globally true: {}", if positive { "yes" } else { "no" }),
        }
    }
    Ok(positive)
}

fn cmd_frame_check(
    json: bool,
    frame: &Path,
    logic: &str,
    n: Option<usize>,
    dot: bool,
) -> Result<bool> {
    let (frame, names) = load_frame(frame)?;
    let spec = resolve_logic(logic, n)?;
    let in_class = is_lambda_frame(&frame, &spec)?;
    let checks = frame.frame_class_checks(spec.pretrans_degree)?;
    if dot {
        let options = DotOptions {
            names: names.as_ref(),
            ..DotOptions::default()
        };
        print!("{}", to_dot(&frame, &options));
    } else if json {
        print_json(&json!({
            "logic": spec.name,
            "worlds": frame.size(),
            "edges": frame.edges().len(),
            "in_class": in_class,
            "checks": checks,
        }))?;
    } else {
        println!("frame: {} worlds, {} edges", frame.size(), frame.edges().len());
        println!(
            "degree {}: n-transitive: {}, conversely well-founded: {}, irreflexive: {}",
            spec.pretrans_degree,
            checks.n_transitive,
            checks.conversely_well_founded,
            checks.irreflexive,
        );
        println!(
            "{} the {} frame class",
            if in_class { "inside" } else { "outside" },
            spec.name
        );
    }
    Ok(in_class)
}

#[allow(clippy::too_many_arguments)]
fn cmd_valid(
    json: bool,
    frame: &Path,
    scheme: Option<&str>,
    n: Option<u32>,
    param: Option<&str>,
    formula: Option<&str>,
    bits: usize,
) -> Result<bool> {
    let (frame, _) = load_frame(frame)?;
    let (verdict, subject) = match (scheme, formula) {
        (Some(kind), None) => {
            let param = param.map(parse_formula).transpose()?;
            let scheme = Scheme::from_parts(kind, n, param)
                .map_err(|e| anyhow::anyhow!(e))
                .context("building the scheme")?;
            (valid_axiom(&frame, &scheme)?, scheme.to_string())
        }
        (None, Some(text)) => {
            let zeta = parse_formula(text)?;
            (valid_bruteforce(&frame, &zeta, bits)?, zeta.to_string())
        }
        _ => bail!("pass exactly one of --scheme or --formula"),
    };
    if json {
        print_json(&json!({
            "subject": subject,
            "verdict": if verdict { "valid" } else { "invalid" },
        }))?;
    } else {
        println!("{}", if verdict { "valid" } else { "invalid" });
    }
    Ok(verdict)
}

#[allow(clippy::too_many_arguments)]
fn cmd_filter(
    json: bool,
    model: &Path,
    zeta: &str,
    world: usize,
    variant: Variant,
    n: u64,
    unchecked: bool,
    dot: bool,
) -> Result<bool> {
    let (big, _) = load_model(model)?;
    let zeta = parse_formula(zeta)?;
    let (small, trace) = match (variant, unchecked) {
        (Variant::K4, false) => extract_k4(&big, world, &zeta, n)?,
        (Variant::K4, true) => extract_k4_unchecked(&big, world, &zeta, n)?,
        (Variant::Gl, false) => extract_gl(&big, world, &zeta, n)?,
        (Variant::Gl, true) => extract_gl_unchecked(&big, world, &zeta, n)?,
    };
    if dot {
        print!("{}", extraction_dot(&small, &trace));
        return Ok(true);
    }
    if json {
        return print_json(&json!({
            "model": ModelDoc::from_model(&small),
            "trace": trace,
        }));
    }
    println!(
        "kept {} of {} worlds: {}",
        trace.kept_worlds.count(),
        big.frame().size(),
        trace
            .embedding
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    );
    let layers: Vec<String> = trace
        .layers
        .iter()
        .map(|layer| {
            let worlds: Vec<String> = layer.iter().map(|w| w.to_string()).collect();
            format!("[{}]", worlds.join(" "))
        })
        .collect();
    println!("layers: {}", layers.join(" "));
    println!(
        "witnesses: {} ({} satisfied backwards)",
        trace.witnesses.len(),
        trace.backward_hits.len()
    );
    if !trace.link_rel.is_empty() {
        println!("link edges: {}", trace.link_rel.len());
    }
    println!(
        "root {} (maximal among refuting worlds: {})",
        trace.x,
        if trace.x_maximal { "yes" } else { "no" }
    );
    Ok(true)
}

/// DOT rendering of an extracted model: worlds keep their original ids as
/// names, and the extraction's link edges (if any) are overlaid dashed.
fn extraction_dot(small: &Model, trace: &FiltrationTrace) -> String {
    let names: BTreeMap<usize, String> = trace
        .embedding
        .iter()
        .enumerate()
        .map(|(new, &old)| (new, format!("w{old}")))
        .collect();
    let back: BTreeMap<usize, usize> = trace
        .embedding
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let overlay: Vec<(usize, usize)> = trace
        .link_rel
        .iter()
        .filter_map(|&(u, v)| Some((*back.get(&u)?, *back.get(&v)?)))
        .collect();
    let options = DotOptions {
        names: Some(&names),
        overlay: &overlay,
    };
    to_dot(small.frame(), &options)
}

fn cmd_search(
    json: bool,
    logic: &str,
    n: Option<usize>,
    zeta: &str,
    budget: &BudgetArgs,
) -> Result<bool> {
    let spec = resolve_logic(logic, n)?;
    let zeta = parse_formula(zeta)?;
    let report = countermodel_search(&spec, &zeta, &budget.into())?;
    match &report.counterexample {
        Some(hit) => {
            if json {
                print_json(&json!({
                    "verdict": "countermodel",
                    "model": ModelDoc::from_model(&hit.model),
                    "world": hit.world,
                    "budget_used": report.frames_checked,
                    "completeness_bound": report.completeness_bound,
                }))?;
            } else {
                println!("countermodel found after {} frames", report.frames_checked);
                println!("{}", describe_model(&hit.model));
                println!("refuted at world {}", hit.world);
            }
            Ok(true)
        }
        None => {
            if json {
                print_json(&json!({
                    "verdict": "absent",
                    "budget_used": report.frames_checked,
                    "completeness_bound": report.completeness_bound,
                }))?;
            } else {
                println!(
                    "no countermodel within budget ({} frames checked)",
                    report.frames_checked
                );
                println!(
                    "not a derivability proof: the completeness threshold |Psi|^C = {} \
                     was not approached",
                    report.completeness_bound
                );
            }
            Ok(false)
        }
    }
}

fn describe_model(model: &Model) -> String {
    let mut out = String::new();
    let edges: Vec<String> = model
        .frame()
        .edges()
        .iter()
        .map(|(u, v)| format!("({u},{v})"))
        .collect();
    let _ = write!(
        out,
        "frame: {} worlds, edges: {}",
        model.frame().size(),
        if edges.is_empty() { "(none)".to_string() } else { edges.join(" ") }
    );
    for (var, set) in model.valuation() {
        let worlds: Vec<String> = set.iter().map(|w| w.to_string()).collect();
        let _ = write!(out, "\nvaluation: {var} = {{{}}}", worlds.join(" "));
    }
    out
}

fn cmd_include(
    json: bool,
    weak: &str,
    weak_n: Option<usize>,
    strong: &str,
    strong_n: Option<usize>,
    budget: &BudgetArgs,
) -> Result<bool> {
    let weak = resolve_logic(weak, weak_n)?;
    let strong = resolve_logic(strong, strong_n)?;
    match inclusion_probe(&weak, &strong, &budget.into())? {
        InclusionVerdict::Separated {
            frame,
            refuted,
            frames_checked,
        } => {
            if json {
                print_json(&json!({
                    "verdict": "separated",
                    "frame": FrameDoc::from_frame(&frame),
                    "refuted_axiom": refuted,
                    "budget_used": frames_checked,
                }))?;
            } else {
                println!(
                    "{} is not included in {}: a {}-frame refutes {}",
                    weak.name, strong.name, strong.name, refuted
                );
                let edges: Vec<String> = frame
                    .edges()
                    .iter()
                    .map(|(u, v)| format!("({u},{v})"))
                    .collect();
                println!(
                    "frame: {} worlds, edges: {}",
                    frame.size(),
                    if edges.is_empty() { "(none)".to_string() } else { edges.join(" ") }
                );
                println!("found after {frames_checked} frames");
            }
            Ok(true)
        }
        InclusionVerdict::NotSeparated { frames_checked } => {
            if json {
                print_json(&json!({
                    "verdict": "not_separated",
                    "budget_used": frames_checked,
                }))?;
            } else {
                println!(
                    "no separating frame within budget ({frames_checked} frames checked); \
                     evidence that {} is included in {}, not a proof",
                    weak.name, strong.name
                );
            }
            Ok(false)
        }
    }
}

fn cmd_paths_gen(
    json: bool,
    model: &Path,
    labels: &[String],
    start: usize,
    length: usize,
    cluster: bool,
) -> Result<bool> {
    let (model, _) = load_model(model)?;
    if start >= model.frame().size() {
        bail!(
            "start world {start} is out of range for a {}-world model",
            model.frame().size()
        );
    }
    let psi: Vec<Formula> = labels
        .iter()
        .map(|text| parse_formula(text))
        .collect::<Result<_>>()?;
    let path = if cluster {
        cluster_path(&model, &psi, start, length)
    } else {
        greedy_optimal_path(&model, &psi, start, length)
    };
    match path {
        Some(path) => {
            if json {
                print_json(&path)?;
            } else {
                println!("{}", describe_path(&path));
            }
            Ok(true)
        }
        None => {
            println!("no path: a step has no admissible successor");
            Ok(false)
        }
    }
}

fn describe_path(path: &LabeledPath) -> String {
    let mut out = String::new();
    let _ = write!(out, "{}", path.worlds()[0]);
    for (label, world) in path.labels().iter().zip(&path.worlds()[1..]) {
        let _ = write!(out, " -[{label}]-> {world}");
    }
    out
}

fn cmd_paths_reduce(json: bool, model: &Path, path: &Path) -> Result<bool> {
    let (model, _) = load_model(model)?;
    let text =
        fs::read_to_string(path).with_context(|| format!("reading path file {}", path.display()))?;
    let labeled: LabeledPath = serde_json::from_str(&text)
        .with_context(|| format!("parsing labeled path {}", path.display()))?;
    labeled.validate(&model).context("validating the path")?;
    let optimal = is_optimal(&model, &labeled)?;
    let reduction = find_reduction(&model, &labeled)?;
    if json {
        print_json(&json!({
            "steps": labeled.len(),
            "optimal": optimal,
            "reduction": reduction.map(|(k, k_prime)| vec![k, k_prime]),
        }))?;
    } else {
        println!("steps: {}", labeled.len());
        println!("optimal: {}", if optimal { "yes" } else { "no" });
        match reduction {
            Some((k, k_prime)) => println!(
                "reducible: u_{k_prime} already lies in R(u_{k}) ∩ ϑ(ψ_{k})"
            ),
            None => println!("irreducible"),
        }
    }
    Ok(reduction.is_none())
}

fn cmd_paths_link(json: bool, frame: &Path, n: u64, paths: &Path) -> Result<bool> {
    let (frame, _) = load_frame(frame)?;
    let text = fs::read_to_string(paths)
        .with_context(|| format!("reading paths file {}", paths.display()))?;
    let world_paths: Vec<Vec<usize>> = serde_json::from_str(&text)
        .with_context(|| format!("parsing plain paths {}", paths.display()))?;
    report_link(json, find_zigzag_link(&frame, n, &world_paths))
}

fn cmd_paths_grid(json: bool, model: &Path, n: u64, paths: &Path) -> Result<bool> {
    let (model, _) = load_model(model)?;
    let text = fs::read_to_string(paths)
        .with_context(|| format!("reading paths file {}", paths.display()))?;
    let labeled: Vec<LabeledPath> = serde_json::from_str(&text)
        .with_context(|| format!("parsing labeled paths {}", paths.display()))?;
    report_link(json, grid_link(&model, n, &labeled))
}

fn report_link(json: bool, link: Result<(usize, usize, usize), PathsError>) -> Result<bool> {
    match link {
        Ok((i, i_prime, j)) => {
            if json {
                print_json(&json!({ "i": i, "i_prime": i_prime, "j": j }))?;
            } else {
                println!("link: step {j} of path {i} steps into position {} of path {i_prime}", j + 1);
            }
            Ok(true)
        }
        Err(PathsError::LinkMissing) => {
            println!("no link found");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_bounds(json: bool, n: u64, psi: u64) -> Result<bool> {
    let bounds = Bounds::new(n, psi)?;
    if json {
        print_json(&bounds)?;
    } else {
        println!(
            "N={} M={} C_k4={} C_gl={}",
            bounds.big_n, bounds.big_m, bounds.c_k4, bounds.c_gl
        );
    }
    Ok(true)
}

fn cmd_catalog(json: bool, logic: Option<&str>, n: Option<usize>) -> Result<bool> {
    match logic {
        Some(key) => {
            let spec = resolve_logic(key, n)?;
            if json {
                print_json(&spec)?;
            } else {
                println!("{}", spec.name);
                println!("pretransitivity degree: {}", spec.pretrans_degree);
                println!(
                    "conversely well-founded frames required: {}",
                    if spec.requires_cwf { "yes" } else { "no" }
                );
                for axiom in &spec.axioms {
                    match axiom.instance() {
                        Ok(instance) => println!("axiom {axiom}: {instance}"),
                        Err(e) => println!("axiom {axiom}: <invalid: {e}>"),
                    }
                }
            }
        }
        None => {
            if json {
                let rows: Vec<serde_json::Value> = CATALOG
                    .iter()
                    .map(|entry| {
                        json!({
                            "key": entry.key,
                            "min_n": entry.min_n,
                            "summary": entry.summary,
                        })
                    })
                    .collect();
                print_json(&rows)?;
            } else {
                for entry in CATALOG {
                    let param = match entry.min_n {
                        Some(min) => format!("n >= {min}"),
                        None => "no parameter".to_string(),
                    };
                    println!("{:<12} {:<14} {}", entry.key, param, entry.summary);
                }
            }
        }
    }
    Ok(true)
}

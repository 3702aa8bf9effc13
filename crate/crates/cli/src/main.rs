//! `logicrank`: rank candidate scenes against a rule query, explain scores,
//! and generate synthetic benchmark data.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use logicrank_core::gen::{bench_count, write_bench_csv, write_truth};
use logicrank_core::oracle::{crisp_eval, recursive_fuzzy_eval, CrispScene};
use logicrank_core::reasoner::{evaluate_scene_detailed, ClauseWeights, UNIT_WEIGHT_PARAM};
use logicrank_core::rerank::write_ranked;
use logicrank_core::scene::{parse_scene, read_pool, write_pool};
use logicrank_core::{explain, generate_pool, parse_program, rank_pool, RuleProgram, SceneSpec, ValuationConfig};

#[derive(Parser)]
#[command(name = "logicrank", version, about = "Probabilistic-logic reranking of object-centric scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every scene of a pool and print them best first as JSONL.
    Rank(RankArgs),
    /// Print the per-atom breakdown of one scene's score.
    Explain(ExplainArgs),
    /// Sample a synthetic pool of detections.
    GenScenes(GenArgs),
    /// Score exact-count scene groups under every counting rule; writes CSV.
    BenchCount(BenchArgs),
    /// Compare the reasoner against the reference evaluators on one scene.
    #[command(hide = true)]
    Oracle(ExplainArgs),
}

#[derive(Args)]
struct RuleArgs {
    /// Rule file.
    #[arg(long)]
    rules: PathBuf,
    /// Query predicate.
    #[arg(long, default_value = "kp")]
    query: String,
    /// Slope of the spatial logistic.
    #[arg(long, default_value_t = logicrank_core::scene::DEFAULT_TAU)]
    tau: f64,
    /// JSON array with one clause parameter per clause; the weight is its
    /// logistic and `null` stands for weight 1.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    rules: RuleArgs,
    /// Candidate pool, one scene per line.
    #[arg(long)]
    detections: PathBuf,
    /// Keep only the best K candidates.
    #[arg(long)]
    top: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print an explanation per emitted candidate to stderr.
    #[arg(long)]
    explain: bool,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    rules: RuleArgs,
    /// A single scene as JSON.
    #[arg(long)]
    scene: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Number of scenes.
    #[arg(long)]
    n: usize,
    /// Objects per scene, `MIN..MAX` or a single count.
    #[arg(long, default_value = "1..6", value_parser = parse_range)]
    objects: RangeInclusive<usize>,
    /// Attribute noise σ.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the ground truth, one scene per line.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Class counts to generate, `A..B`.
    #[arg(long, value_parser = parse_range)]
    groups: RangeInclusive<usize>,
    #[arg(long)]
    per_group: usize,
    #[arg(long, default_value = "dog")]
    class: String,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Objects per scene before raising the minimum to the group size.
    #[arg(long, default_value = "1..6", value_parser = parse_range)]
    objects: RangeInclusive<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            Ok(a..=b)
        }
        None => parse(s).map(|n| n..=n),
    }
}

/// A failure with the exit code of its category.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const RULE_ERROR: u8 = 2;
const DATA_ERROR: u8 = 3;
const EVAL_ERROR: u8 = 4;

fn rule_err(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: RULE_ERROR, error: error.into() }
}

fn data_err(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: DATA_ERROR, error: error.into() }
}

impl From<logicrank_core::Error> for Failure {
    fn from(e: logicrank_core::Error) -> Self {
        use logicrank_core::Error;
        let code = match &e {
            Error::Lang(_) => RULE_ERROR,
            Error::Scene(_) | Error::Gen(_) | Error::EmptyPool => DATA_ERROR,
            Error::Reasoner(_) => EVAL_ERROR,
        };
        Failure { code, error: e.into() }
    }
}

type CmdResult<T> = Result<T, Failure>;

struct Loaded {
    program: RuleProgram,
    weights: ClauseWeights,
    cfg: ValuationConfig,
}

fn load_rules(args: &RuleArgs) -> CmdResult<Loaded> {
    let source = std::fs::read_to_string(&args.rules)
        .with_context(|| format!("reading {}", args.rules.display()))
        .map_err(rule_err)?;
    let program = parse_program(&source, &args.query)
        .with_context(|| format!("in {}", args.rules.display()))
        .map_err(rule_err)?;
    let weights = match &args.weights {
        None => ClauseWeights::from_program(&program),
        Some(path) => read_weights(path, program.clauses.len()).map_err(data_err)?,
    };
    let cfg = ValuationConfig::with_tau(args.tau);
    cfg.validate().map_err(data_err)?;
    Ok(Loaded { program, weights, cfg })
}

fn read_weights(path: &Path, clauses: usize) -> anyhow::Result<ClauseWeights> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: Vec<Option<f64>> =
        serde_json::from_str(&text).with_context(|| format!("{}: expected a JSON array of numbers", path.display()))?;
    let weights = ClauseWeights::new(raw.into_iter().map(|p| p.unwrap_or(UNIT_WEIGHT_PARAM)).collect());
    weights.check(clauses)?;
    Ok(weights)
}

fn create(path: &Path) -> CmdResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(data_err)
}

fn open(path: &Path) -> CmdResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(data_err)
}

fn io_err(e: io::Error) -> Failure {
    data_err(anyhow!(e).context("writing output"))
}

fn rank(args: RankArgs) -> CmdResult<()> {
    let rules = load_rules(&args.rules)?;
    let pool = read_pool(open(&args.detections)?)
        .with_context(|| format!("in {}", args.detections.display()))
        .map_err(data_err)?;
    let ranked = rank_pool(&pool, &rules.program, &rules.cfg, &rules.weights, args.top)?;

    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_ranked(&mut w, &ranked).and_then(|_| w.flush()).map_err(io_err)?;
        }
        None => write_ranked(io::stdout().lock(), &ranked).map_err(io_err)?,
    }

    if args.explain {
        let by_id: HashMap<&str, _> = pool.iter().map(|s| (s.image_id.as_str(), s)).collect();
        let mut err = io::stderr().lock();
        for r in &ranked {
            let text = match &r.error {
                Some(e) => format!("image: {}\nerror: {e}\n", r.image_id),
                None => explain(by_id[r.image_id.as_str()], &rules.program, &rules.cfg, &rules.weights)?,
            };
            writeln!(err, "{text}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn read_scene(path: &Path) -> CmdResult<logicrank_core::SceneRecord> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(data_err)?;
    parse_scene(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(data_err)
}

fn explain_cmd(args: ExplainArgs) -> CmdResult<()> {
    let rules = load_rules(&args.rules)?;
    let scene = read_scene(&args.scene)?;
    let text = explain(&scene, &rules.program, &rules.cfg, &rules.weights)?;
    print!("{text}");
    Ok(())
}

fn oracle(args: ExplainArgs) -> CmdResult<()> {
    let rules = load_rules(&args.rules)?;
    let scene = read_scene(&args.scene)?;
    scene.validate().map_err(data_err)?;
    let eval = evaluate_scene_detailed(&rules.program, &scene, &rules.cfg, &rules.weights)?;
    let fuzzy = recursive_fuzzy_eval(&eval.table, &eval.grounding, &rules.weights).ok();
    let report = serde_json::json!({
        "image_id": scene.image_id,
        "reasoner": eval.result.query_prob,
        "recursive": fuzzy,
        "crisp": crisp_eval(&CrispScene::threshold(&scene), &rules.program),
    });
    println!("{report}");
    Ok(())
}

fn gen_scenes(args: GenArgs) -> CmdResult<()> {
    let spec = SceneSpec {
        object_count: (*args.objects.start(), *args.objects.end()),
        noise: args.noise,
        seed: args.seed,
        ..SceneSpec::default()
    };
    let (pool, truth) = generate_pool(&spec, args.n).map_err(logicrank_core::Error::from)?;
    let mut w = create(&args.out)?;
    write_pool(&mut w, &pool).and_then(|_| w.flush()).map_err(io_err)?;
    if let Some(path) = &args.truth {
        let mut w = create(path)?;
        write_truth(&mut w, &truth).and_then(|_| w.flush()).map_err(io_err)?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> CmdResult<()> {
    let spec = SceneSpec {
        object_count: (*args.objects.start(), *args.objects.end()),
        noise: args.noise,
        seed: args.seed,
        ..SceneSpec::default()
    };
    let rows = bench_count(args.groups, args.per_group, &args.class, &spec)?;
    let w = create(&args.out)?;
    write_bench_csv(w, &rows).map_err(data_err)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Rank(a) => rank(a),
        Command::Explain(a) => explain_cmd(a),
        Command::GenScenes(a) => gen_scenes(a),
        Command::BenchCount(a) => bench(a),
        Command::Oracle(a) => oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use netsent::dataset::{load_dataset, Dataset, DatasetPaths};
use netsent::graph::{GraphVariant, SentLabel, UserId};
use netsent::harness::{
    export_dot, run_experiment, scale_csv, scale_unlabeled, ExperimentConfig, ExperimentReport, Method,
};
use netsent::inference::{bp_trace_rows, BP_TRACE_CSV_HEADER};
use netsent::seed::derive_seeds;
use netsent::stats::{StatsRow, STATS_CSV_HEADER};
use netsent::synth::{generate, write_synth, SynthConfig};
use netsent::text::{load_model, save_model, svm_vote_index, train_classifier, TrainConfig};
use netsent::UpdateRule;
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "netsent", version, about = "User-level sentiment classification over social graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with planted homophily.
    Synth(SynthArgs),
    /// Homophily statistics of the gold-labeled users, one CSV row per variant.
    Stats(StatsArgs),
    /// Train the tweet classifier on every gold-labeled user's tweets.
    TrainBaseline(TrainArgs),
    /// Label users by majority vote of a trained tweet classifier.
    PredictBaseline(PredictArgs),
    /// Run the repeated-split experiment for one method.
    Run(RunArgs),
    /// Rerun the experiment while adding unlabeled pool users.
    ScaleUnlabeled(ScaleArgs),
    /// Write a Graphviz rendering of a topic graph.
    ExportDot(DotArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding users.jsonl, tweets.jsonl and edges.tsv.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Topic keyword selecting on-topic tweets [default: obama].
    #[arg(long)]
    topic: Option<String>,
}

const DEFAULT_TOPIC: &str = "obama";

fn load_dir(dir: Option<&Path>) -> Result<Dataset> {
    let dir = dir.ok_or_else(|| netsent::Error::Invalid("no dataset directory given (--data)".into()))?;
    Ok(load_dataset(&DatasetPaths::in_dir(dir))?)
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        load_dir(self.data.as_deref())
    }

    fn topic(&self) -> &str {
        self.topic.as_deref().unwrap_or(DEFAULT_TOPIC)
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// TOML file with generator settings; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_users: Option<usize>,
    #[arg(long)]
    n_pool: Option<usize>,
    #[arg(long)]
    tweet_noise: Option<f64>,
    #[arg(long)]
    p_edge_same: Option<f64>,
    #[arg(long)]
    p_edge_diff: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Restrict to one variant; all four by default.
    #[arg(long)]
    variant: Option<GraphVariant>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// CSV output path (user,label); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    variant: Option<GraphVariant>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    train_per_class: Option<usize>,
    /// Base seed; per-run seeds are derived from it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    update_rule: Option<UpdateRule>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    /// Let revealed users' tweets act as soft evidence instead of clamping them.
    #[arg(long)]
    no_clamp: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Report JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-run metrics CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Per-iteration BP residuals CSV.
    #[arg(long)]
    bp_trace: Option<PathBuf>,
    /// Per-run labels of every user (run,user,revealed,predicted,gold).
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Comma-separated pool sizes, e.g. 0,100,200.
    #[arg(long, value_delimiter = ',', required = true)]
    counts: Vec<usize>,
    /// Series JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV, one row per count.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "directed-follow")]
    variant: GraphVariant,
    /// Predictions CSV with `user` and `predicted` (or `label`) columns; gold labels when absent.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Run to draw from a multi-run predictions file.
    #[arg(long, default_value_t = 0)]
    run: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    /// Dataset directory, used when `--data` is not given explicitly.
    data: Option<PathBuf>,
    /// Base seed from which per-run seeds are derived.
    seed: Option<u64>,
    #[serde(default)]
    experiment: Option<toml::Table>,
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| netsent::Error::Invalid(format!("{}: {e}", path.display())).into())
}

fn write_out(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn experiment_config(args: &ExperimentArgs) -> Result<(Option<PathBuf>, ExperimentConfig)> {
    let file: ExperimentFile = match &args.config {
        Some(p) => read_toml(p)?,
        None => ExperimentFile::default(),
    };
    let explicit_seeds = file.experiment.as_ref().is_some_and(|t| t.contains_key("seeds"));
    let mut cfg: ExperimentConfig = match file.experiment {
        Some(table) => table
            .try_into()
            .map_err(|e| netsent::Error::Invalid(format!("experiment config: {e}")))?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = &args.data.topic {
        cfg.topic_keyword = t.clone();
    }
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if let Some(v) = args.variant {
        cfg.variant = v;
    }
    if let Some(n) = args.train_per_class {
        cfg.train_per_class = n;
    }
    if let Some(r) = args.update_rule {
        cfg.sample_rank.update_rule = r;
    }
    if let Some(r) = args.repeats {
        cfg.repeats = r;
    }
    if let Some(s) = args.steps {
        cfg.sample_rank.steps = s;
    }
    if let Some(e) = args.eta {
        cfg.sample_rank.learning_rate = e;
    }
    if args.no_clamp {
        cfg.clamp_revealed = false;
    }
    if let Some(n) = args.runs {
        cfg.n_runs = n;
    }
    let seed = args.seed.or(file.seed);
    if seed.is_some() || args.runs.is_some() || !explicit_seeds {
        cfg.seeds = derive_seeds(seed.unwrap_or(0), cfg.n_runs);
    }
    cfg.validate()?;
    Ok((args.data.data.clone().or(file.data), cfg))
}

fn predictions_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("run,user,revealed,predicted,gold\n");
    for (run, d) in report.details.iter().enumerate() {
        for (u, user) in d.graph.users().iter().enumerate() {
            let gold = user.gold_label.map(|l| l.as_str()).unwrap_or_default();
            out.push_str(&format!("{run},{},{},{},{gold}\n", user.id, user.revealed, d.labels[u]));
        }
    }
    out
}

/// Reads `user` plus `predicted` or `label` columns; with a `run` column only rows of `run` are kept.
fn read_labels(path: &Path, run: usize) -> Result<BTreeMap<UserId, SentLabel>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let user_col = col("user").ok_or_else(|| netsent::Error::Invalid("labels CSV lacks a `user` column".into()))?;
    let label_col = col("predicted")
        .or_else(|| col("label"))
        .ok_or_else(|| netsent::Error::Invalid("labels CSV lacks a `predicted` or `label` column".into()))?;
    let run_col = col("run");
    let mut labels = BTreeMap::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if let Some(c) = run_col {
            if fields.get(c).and_then(|r| r.parse::<usize>().ok()) != Some(run) {
                continue;
            }
        }
        let (Some(user), Some(label)) = (fields.get(user_col), fields.get(label_col)) else {
            return Err(netsent::Error::Parse {
                path: path.to_owned(),
                line: i + 2,
                message: "missing column".into(),
            }
            .into());
        };
        labels.insert(UserId::from(*user), label.parse()?);
    }
    Ok(labels)
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut cfg: SynthConfig = match &a.config {
        Some(p) => read_toml(p)?,
        None => SynthConfig::default(),
    };
    cfg.n_users = a.n_users.unwrap_or(cfg.n_users);
    cfg.n_pool = a.n_pool.unwrap_or(cfg.n_pool);
    cfg.tweet_noise = a.tweet_noise.unwrap_or(cfg.tweet_noise);
    cfg.p_edge_same = a.p_edge_same.unwrap_or(cfg.p_edge_same);
    cfg.p_edge_diff = a.p_edge_diff.unwrap_or(cfg.p_edge_diff);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    let ds = generate(&cfg)?;
    write_synth(&ds, &a.out)?;
    log::info!(
        "wrote {} users, {} tweets, {} edges to {}",
        ds.dataset.users.len(),
        ds.dataset.tweets.len(),
        ds.dataset.edges.len(),
        a.out.display()
    );
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> Result<()> {
    let ds = a.data.load()?.retain_users(|u| u.gold_label.is_some());
    let variants = a.variant.map_or(GraphVariant::ALL.to_vec(), |v| vec![v]);
    let mut out = format!("{STATS_CSV_HEADER}\n");
    for v in variants {
        let g = ds.topic_graph(a.data.topic(), v)?;
        out.push_str(&StatsRow::compute(a.data.topic(), &g)?.to_csv());
        out.push('\n');
    }
    write_out(a.out.as_deref(), &out)
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let ds = a.data.load()?;
    let g = ds.topic_graph(a.data.topic(), GraphVariant::DirectedFollow)?;
    let examples: Vec<_> = (0..g.n_users())
        .filter_map(|u| g.user(u).gold_label.map(|l| (u, l)))
        .flat_map(|(u, l)| g.tweets(u).iter().map(move |t| (netsent::text::tokenize(&t.text), l)))
        .collect();
    let model = train_classifier(&examples, &TrainConfig { seed: a.seed, ..TrainConfig::default() })?;
    save_model(&model, &a.model)?;
    log::info!("trained on {} tweets", examples.len());
    Ok(())
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let ds = a.data.load()?;
    let g = ds.topic_graph(a.data.topic(), GraphVariant::DirectedFollow)?;
    let model = load_model(&a.model)?;
    let mut out = String::from("user,label\n");
    for u in 0..g.n_users() {
        out.push_str(&format!("{},{}\n", g.user(u).id, svm_vote_index(&g, &model, u)?));
    }
    write_out(a.out.as_deref(), &out)
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let (data, cfg) = experiment_config(&a.exp)?;
    let ds = load_dir(data.as_deref())?;
    let report = run_experiment(&ds, &cfg)?;
    if let Some(p) = &a.csv {
        write_out(Some(p), &report.runs_csv())?;
    }
    if let Some(p) = &a.bp_trace {
        let mut out = format!("{BP_TRACE_CSV_HEADER}\n");
        for (run, d) in report.details.iter().enumerate() {
            if let Some(pred) = &d.prediction {
                for row in bp_trace_rows(run, pred) {
                    out.push_str(&row);
                    out.push('\n');
                }
            }
        }
        write_out(Some(p), &out)?;
    }
    if let Some(p) = &a.predictions {
        write_out(Some(p), &predictions_csv(&report))?;
    }
    write_out(a.out.as_deref(), &(report.to_json()? + "\n"))
}

fn cmd_scale(a: &ScaleArgs) -> Result<()> {
    let (data, cfg) = experiment_config(&a.exp)?;
    let ds = load_dir(data.as_deref())?;
    let points = scale_unlabeled(&ds, &cfg, &a.counts)?;
    if let Some(p) = &a.csv {
        write_out(Some(p), &scale_csv(&points))?;
    }
    write_out(a.out.as_deref(), &(serde_json::to_string_pretty(&points)? + "\n"))
}

fn cmd_dot(a: &DotArgs) -> Result<()> {
    let ds = a.data.load()?;
    let g = ds.topic_graph(a.data.topic(), a.variant)?;
    let labels = match &a.labels {
        Some(p) => read_labels(p, a.run)?,
        None => g
            .users()
            .iter()
            .map(|u| {
                u.gold_label
                    .map(|l| (u.id.clone(), l))
                    .ok_or_else(|| netsent::Error::MissingGoldLabel(u.id.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };
    export_dot(&g, &labels, &a.out)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Stats(a) => cmd_stats(a),
        Command::TrainBaseline(a) => cmd_train(a),
        Command::PredictBaseline(a) => cmd_predict(a),
        Command::Run(a) => cmd_run(a),
        Command::ScaleUnlabeled(a) => cmd_scale(a),
        Command::ExportDot(a) => cmd_dot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.downcast_ref::<netsent::Error>().is_some_and(netsent::Error::is_validation);
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}

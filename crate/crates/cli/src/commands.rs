use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use localexpert::bench::{bench, bench_table};
use localexpert::evaluate::{evaluate, read_query_list, reports_to_jsonl, reports_to_table, EvalOptions};
use localexpert::ingest::{load_dataset, load_dataset_with_lexicon, Lexicon};
use localexpert::metrics::DEFAULT_CUTOFFS;
use localexpert::output::{recommendation_json, recommendation_table, truncate};
use localexpert::recommend::{recommend, Aggregation, Method, QueryMap, RecommendConfig, RecommendationRun};
use localexpert::synth::{generate, generate_dataset, SynthParams};
use localexpert::walk::DEFAULT_STAY_PROBABILITY;
use localexpert::{Dataset, Error, Mode, Result};

#[derive(Debug, Parser)]
#[command(name = "localexpert", version, about = "Local-expert place recommendations over reviewer graphs")]
pub struct Cli {
    /// Worker threads for walks and evaluation rows (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a dataset directory.
    Ingest(IngestArgs),
    /// Recommend places for one query.
    Recommend(RecommendArgs),
    /// Score a query list over repeated runs.
    Evaluate(EvaluateArgs),
    /// Write a synthetic dataset directory.
    Synth(SynthArgs),
    /// Time every method at dataset scale.
    Bench(BenchArgs),
    /// Serve recommendations over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Global,
    Pa,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Global => Mode::Global,
            ModeArg::Pa => Mode::Pa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rw,
    Lrw,
    Pagerank,
    Betweenness,
    Closeness,
    Degree,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        let name = m.to_possible_value().expect("no skipped variants");
        name.get_name().parse().expect("argument names match method names")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregateArg {
    Pool,
    Modal,
}

impl From<AggregateArg> for Aggregation {
    fn from(a: AggregateArg) -> Aggregation {
        match a {
            AggregateArg::Pool => Aggregation::Pool,
            AggregateArg::Modal => Aggregation::Modal,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Lexicon for unlabelled reviews (overrides `lexicon.txt` in the directory).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(long)]
    pub city: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Global)]
    pub mode: ModeArg,
    #[arg(long)]
    pub user: Option<String>,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_STAY_PROBABILITY, value_parser = probability)]
    pub stay: f64,
    /// Master seed; walk methods draw and report one when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, value_enum, default_value_t = AggregateArg::Pool)]
    pub aggregate: AggregateArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Include stage timings in json output.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Query list: one JSON object per line with query, city, mode, method, k (and user for pa).
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = positive)]
    pub m: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Precision cutoffs.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_CUTOFFS)]
    pub x: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_STAY_PROBABILITY, value_parser = probability)]
    pub stay: f64,
    #[arg(long, value_enum, default_value_t = AggregateArg::Pool)]
    pub aggregate: AggregateArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub params: SynthFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SynthFlags {
    #[arg(long, default_value_t = 14_309)]
    pub users: usize,
    #[arg(long, default_value_t = 176)]
    pub places: usize,
    #[arg(long, default_value_t = 3_844)]
    pub reviews: usize,
    #[arg(long, default_value_t = 5)]
    pub cities: usize,
    /// Comma-separated category vocabulary.
    #[arg(long, value_delimiter = ',')]
    pub categories: Option<Vec<String>>,
    #[arg(long, default_value_t = 4.0)]
    pub contact_degree: f64,
    #[arg(long, default_value_t = 1.0)]
    pub skew: f64,
    #[arg(long, default_value_t = 0.75)]
    pub positive_ratio: f64,
    #[arg(long = "synth-seed", default_value_t = 7)]
    pub seed: u64,
}

impl SynthFlags {
    pub fn params(&self) -> SynthParams {
        let mut params = SynthParams {
            n_users: self.users,
            n_places: self.places,
            n_reviews: self.reviews,
            n_cities: self.cities,
            contact_degree_mean: self.contact_degree,
            review_skew: self.skew,
            positive_ratio: self.positive_ratio,
            seed: self.seed,
            ..Default::default()
        };
        if let Some(categories) = &self.categories {
            params.categories = categories.clone();
        }
        params
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset directory; a paper-scale synthetic dataset is generated when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "mall")]
    pub query: String,
    #[arg(long, default_value = "Bandung")]
    pub city: String,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub k: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 3, value_parser = positive)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "DATA_DIR")]
    pub data: PathBuf,
    #[arg(long, env = "BIND", default_value = "127.0.0.1:8080")]
    pub bind: String,
    #[arg(long = "default-method", env = "DEFAULT_METHOD", value_enum, default_value_t = MethodArg::Lrw)]
    pub method: MethodArg,
    #[arg(long = "default-k", env = "DEFAULT_K", default_value_t = 5, value_parser = positive)]
    pub k: usize,
    /// Fixed seed for requests that carry none; otherwise one is drawn per request.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn positive(raw: &str) -> Result<usize, String> {
    match raw.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn probability(raw: &str) -> Result<f64, String> {
    match raw.parse::<f64>() {
        Ok(p) if (0.0..=1.0).contains(&p) => Ok(p),
        Ok(p) => Err(format!("{p} is not in [0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

/// Everything a single recommendation needs, whether it came from flags or
/// from an HTTP query string.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendRequest {
    pub query: String,
    pub city: String,
    pub mode: Mode,
    pub user: Option<String>,
    pub method: Method,
    pub k: usize,
    pub stay: f64,
    pub seed: Option<u64>,
    pub top: Option<usize>,
    pub aggregation: Aggregation,
}

impl RecommendRequest {
    /// The seed to run with: the given one, or a fresh one for walk methods.
    pub fn resolved_seed(&self) -> Option<u64> {
        match (self.seed, self.method.is_stochastic()) {
            (Some(seed), _) => Some(seed),
            (None, true) => Some(rand::random()),
            (None, false) => None,
        }
    }
}

/// Runs a request with an already resolved seed.
pub fn run_request(
    dataset: &Dataset,
    queries: &QueryMap,
    request: &RecommendRequest,
    seed: Option<u64>,
) -> Result<RecommendationRun> {
    let query = queries.query(
        &request.query,
        &request.city,
        request.mode,
        request.k,
        request.user.clone(),
    )?;
    let config = RecommendConfig {
        stay_probability: request.stay,
        seed,
        aggregation: request.aggregation,
        run: 0,
    };
    let mut run = recommend(dataset, &query, request.method, &config)?;
    truncate(&mut run, request.top);
    Ok(run)
}

#[derive(Serialize)]
struct IngestSummary {
    users: usize,
    places: usize,
    reviews: usize,
    positive: usize,
    negative: usize,
    neutral: usize,
    contacts: usize,
}

pub fn run_ingest(args: &IngestArgs) -> Result<String> {
    let dataset = match &args.lexicon {
        Some(path) => load_dataset_with_lexicon(&args.data, &Lexicon::from_file(path)?)?,
        None => load_dataset(&args.data)?,
    };
    let mut summary = IngestSummary {
        users: dataset.users().len(),
        places: dataset.places().len(),
        reviews: dataset.reviews().len(),
        positive: 0,
        negative: 0,
        neutral: 0,
        contacts: dataset.users().values().map(|u| u.contacts.len()).sum::<usize>() / 2,
    };
    for id in dataset.places().keys() {
        let c = dataset.counts(id)?;
        summary.positive += c.pos;
        summary.negative += c.neg;
        summary.neutral += c.neu;
    }
    Ok(match args.format {
        Format::Json => serde_json::to_string(&summary).expect("summary serializes") + "\n",
        Format::Table => format!(
            "users: {}\nplaces: {}\nreviews: {} (positive {}, negative {}, neutral {})\ncontact edges: {}\nvalidation: ok\n",
            summary.users,
            summary.places,
            summary.reviews,
            summary.positive,
            summary.negative,
            summary.neutral,
            summary.contacts
        ),
    })
}

pub fn recommend_request(args: &RecommendArgs) -> RecommendRequest {
    RecommendRequest {
        query: args.query.clone(),
        city: args.city.clone(),
        mode: args.mode.into(),
        user: args.user.clone(),
        method: args.method.into(),
        k: args.k,
        stay: args.stay,
        seed: args.seed,
        top: args.top,
        aggregation: args.aggregate.into(),
    }
}

pub fn run_recommend(args: &RecommendArgs) -> Result<String> {
    let dataset = load_dataset(&args.data)?;
    let request = recommend_request(args);
    let seed = request.resolved_seed();
    if request.seed.is_none() {
        if let Some(seed) = seed {
            eprintln!("seed: {seed}");
        }
    }
    let run = run_request(&dataset, &QueryMap::default(), &request, seed)?;
    Ok(match args.format {
        Format::Json => recommendation_json(&run, args.timings) + "\n",
        Format::Table => recommendation_table(&run),
    })
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<String> {
    let dataset = load_dataset(&args.data)?;
    let rows = read_query_list(&args.queries)?;
    let master_seed = args.seed.unwrap_or_else(|| {
        let seed = rand::random();
        eprintln!("seed: {seed}");
        seed
    });
    if args.m == 0 || args.x.contains(&0) {
        return Err(Error::Domain("--m and every --x cutoff must be at least 1".into()));
    }
    let options = EvalOptions {
        m: args.m,
        x_values: args.x.clone(),
        master_seed,
        stay_probability: args.stay,
        aggregation: args.aggregate.into(),
    };
    let reports = evaluate(&dataset, &QueryMap::default(), &rows, &options)?;
    Ok(match args.format {
        Format::Json => reports_to_jsonl(&reports, args.timings),
        Format::Table => reports_to_table(&reports),
    })
}

pub fn run_synth(args: &SynthArgs) -> Result<String> {
    let dataset = generate(&args.params.params(), &args.out)?;
    Ok(format!(
        "wrote {}: {} users, {} places, {} reviews\n",
        args.out.display(),
        dataset.users().len(),
        dataset.places().len(),
        dataset.reviews().len()
    ))
}

pub fn run_bench(args: &BenchArgs) -> Result<String> {
    let dataset = match &args.data {
        Some(dir) => load_dataset(dir)?,
        None => generate_dataset(&SynthParams::default())?,
    };
    let query = QueryMap::default().query(&args.query, &args.city, Mode::Global, args.k, None)?;
    let rows = bench(&dataset, &query, &Method::ALL, args.seed, args.reps)?;
    Ok(match args.format {
        Format::Json => rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("row serializes") + "\n")
            .collect(),
        Format::Table => format!(
            "dataset: {} users, {} places, {} reviews; query={} city={} k={}\n{}",
            dataset.users().len(),
            dataset.places().len(),
            dataset.reviews().len(),
            args.query,
            args.city,
            args.k,
            bench_table(&rows)
        ),
    })
}

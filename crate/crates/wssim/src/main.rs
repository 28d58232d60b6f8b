use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use wssim::eval::{self, EvalError, EvalReport, ExpertLabelSet, ScoredPair};
use wssim::lexicon::Lexicon;
use wssim::similarity::{Engine, Weights};
use wssim::text::StopwordList;
use wssim::wsdl::{parse_wsdl_file, ServiceDescription};
use wssim::Score;

/// Environment variable consulted when `--wordnet-dir` is absent.
const WORDNET_ENV: &str = "WSSIM_WORDNET_DIR";

#[derive(Parser)]
#[command(
    name = "wssim",
    version,
    about = "Similarity scoring between WSDL-described web services"
)]
struct Cli {
    /// WordNet dict directory (default: $WSSIM_WORDNET_DIR)
    #[arg(long, global = true, value_name = "DIR")]
    wordnet_dir: Option<PathBuf>,

    /// Weights for input, output and name similarity, as "p1,p2,p3"
    #[arg(long, global = true, default_value = "1,1,2", value_parser = parse_weights)]
    weights: Weights<Score>,

    /// Stopword list file (default: built-in list)
    #[arg(long, global = true, value_name = "FILE")]
    stopwords: Option<PathBuf>,

    /// Word overlap threshold used during sense disambiguation
    #[arg(long, global = true, default_value_t = 0.5)]
    wsd_threshold: Score,

    /// Worker threads for batch commands (default: one per core)
    #[arg(long, global = true, value_name = "N")]
    parallelism: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a single pair of WSDL files
    Sim {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Score every pair in a directory of WSDL files
    Matrix {
        dir: PathBuf,
        /// Write the JSON matrix here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Rank a directory's services against a target service
    Rank {
        target: PathBuf,
        dir: PathBuf,
        /// Keep only the best K matches
        #[arg(long, value_name = "K")]
        top: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compare scores against expert judgments
    Eval {
        /// Directory of WSDL files to score
        dir: Option<PathBuf>,
        /// Expert judgments (service_a,service_b,label)
        labels: Option<PathBuf>,
        /// Evaluate previously recorded scores instead of computing them
        /// (service_a,service_b,score,label); does not need WordNet
        #[arg(long, value_name = "FILE", conflicts_with_all = ["dir", "labels"])]
        replay: Option<PathBuf>,
        /// Score at or above which a pair counts as retrieved
        #[arg(long, default_value_t = 0.5)]
        relevance_threshold: Score,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

/// Failures split by exit code: bad input exits 2, an unusable WordNet
/// installation exits 3.
enum CliError {
    Input(String),
    Wordnet(String),
}

impl CliError {
    fn input(err: impl std::fmt::Display) -> Self {
        CliError::Input(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Wordnet(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Sim { a, b, format } => cmd_sim(&cli, a, b, *format),
        Command::Matrix { dir, out } => cmd_matrix(&cli, dir, out.as_deref()),
        Command::Rank {
            target,
            dir,
            top,
            format,
        } => cmd_rank(&cli, target, dir, *top, *format),
        Command::Eval {
            dir,
            labels,
            replay,
            relevance_threshold,
            format,
        } => match (replay, dir, labels) {
            (Some(replay), None, None) => cmd_eval_replay(replay, *relevance_threshold, *format),
            (None, Some(dir), Some(labels)) => {
                cmd_eval_live(&cli, dir, labels, *relevance_threshold, *format)
            }
            _ => Err(CliError::Input(
                "eval needs either DIR and LABELS, or --replay FILE".into(),
            )),
        },
    }
}

fn parse_weights(arg: &str) -> Result<Weights<Score>, String> {
    let parts: Vec<&str> = arg.split(',').collect();
    let [p1, p2, p3] = parts.as_slice() else {
        return Err("expected three comma-separated weights, e.g. 1,1,2".into());
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<Score>()
            .map_err(|_| format!("bad weight {s:?}"))
    };
    Weights::new(parse(p1)?, parse(p2)?, parse(p3)?).map_err(|e| e.to_string())
}

fn load_stopwords(cli: &Cli) -> Result<StopwordList, CliError> {
    match &cli.stopwords {
        Some(path) => StopwordList::from_file(path).map_err(CliError::input),
        None => Ok(StopwordList::default()),
    }
}

fn load_lexicon(cli: &Cli) -> Result<Lexicon, CliError> {
    let dir = cli
        .wordnet_dir
        .clone()
        .or_else(|| std::env::var_os(WORDNET_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            CliError::Wordnet(format!(
                "no WordNet dictionary configured; pass --wordnet-dir or set ${WORDNET_ENV}"
            ))
        })?;
    Lexicon::load(&dir).map_err(|e| CliError::Wordnet(e.to_string()))
}

fn make_engine<'a>(
    cli: &Cli,
    lexicon: &'a Lexicon,
    stopwords: &'a StopwordList,
) -> Engine<'a, Score> {
    Engine::new(lexicon, stopwords)
        .with_weights(cli.weights)
        .with_wsd_threshold(cli.wsd_threshold)
}

/// Loads every `*.wsdl` file in a directory, sorted by service name (path
/// as tiebreaker) so all outputs are stable. Files that fail to parse are
/// skipped with a warning; callers decide how many services they need.
fn load_services(dir: &Path) -> Result<Vec<ServiceDescription>, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| x.eq_ignore_ascii_case("wsdl"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Input(format!(
            "no .wsdl files in {}",
            dir.display()
        )));
    }
    let mut services = Vec::with_capacity(paths.len());
    for path in &paths {
        match parse_wsdl_file(path) {
            Ok(service) => services.push(service),
            Err(e) => eprintln!("warning: skipping {}: {e}", path.display()),
        }
    }
    services.sort_by(|a, b| (&a.name, &a.source_uri).cmp(&(&b.name, &b.source_uri)));
    Ok(services)
}

fn thread_pool(cli: &Cli) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.parallelism.unwrap_or(0))
        .build()
        .map_err(CliError::input)
}

fn cmd_sim(cli: &Cli, a: &Path, b: &Path, format: Format) -> Result<(), CliError> {
    let stopwords = load_stopwords(cli)?;
    let lexicon = load_lexicon(cli)?;
    let service_a =
        parse_wsdl_file(a).map_err(|e| CliError::Input(format!("{}: {e}", a.display())))?;
    let service_b =
        parse_wsdl_file(b).map_err(|e| CliError::Input(format!("{}: {e}", b.display())))?;
    let engine = make_engine(cli, &lexicon, &stopwords);
    let score = engine.service_sim(&service_a, &service_b);
    let bucket = eval::bucketize(score).expect("service_sim stays in [0, 1]");
    match format {
        Format::Table => {
            println!(
                "{}  {}  {}  {}",
                service_a.name,
                service_b.name,
                score,
                bucket.label()
            );
        }
        Format::Json => {
            let value = serde_json::json!({
                "service_a": service_a.name,
                "service_b": service_b.name,
                "score": score,
                "bucket": bucket,
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        Format::Csv => {
            println!("service_a,service_b,score,bucket");
            println!(
                "{},{},{},{}",
                service_a.name,
                service_b.name,
                score,
                bucket.label()
            );
        }
    }
    Ok(())
}

/// All unordered index pairs, diagonal included.
fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push((i, j));
        }
    }
    out
}

fn cmd_matrix(cli: &Cli, dir: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let stopwords = load_stopwords(cli)?;
    let lexicon = load_lexicon(cli)?;
    let services = load_services(dir)?;
    if services.len() < 2 {
        return Err(CliError::Input(format!(
            "need at least two parseable services in {}, found {}",
            dir.display(),
            services.len()
        )));
    }
    let pool = thread_pool(cli)?;
    let n = services.len();
    let scores: Vec<((usize, usize), Score)> = pool.install(|| {
        index_pairs(n)
            .par_iter()
            .map_init(
                || make_engine(cli, &lexicon, &stopwords),
                |engine, &(i, j)| ((i, j), engine.service_sim(&services[i], &services[j])),
            )
            .collect()
    });
    let mut matrix = vec![vec![0.0; n]; n];
    for ((i, j), score) in scores {
        matrix[i][j] = score;
        matrix[j][i] = score;
    }
    let names: Vec<&str> = services.iter().map(|s| s.name.as_str()).collect();
    let value = serde_json::json!({ "services": names, "scores": matrix });
    let rendered = serde_json::to_string_pretty(&value).unwrap();
    match out {
        Some(path) => std::fs::write(path, rendered + "\n")
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{rendered}"),
    }
    Ok(())
}

fn cmd_rank(
    cli: &Cli,
    target: &Path,
    dir: &Path,
    top: Option<usize>,
    format: Format,
) -> Result<(), CliError> {
    let stopwords = load_stopwords(cli)?;
    let lexicon = load_lexicon(cli)?;
    let target_service = parse_wsdl_file(target)
        .map_err(|e| CliError::Input(format!("{}: {e}", target.display())))?;
    let services = load_services(dir)?;
    if services.is_empty() {
        return Err(CliError::Input(format!(
            "no parseable services in {}",
            dir.display()
        )));
    }
    let pool = thread_pool(cli)?;
    let mut ranked: Vec<(String, Score)> = pool.install(|| {
        services
            .par_iter()
            .map_init(
                || make_engine(cli, &lexicon, &stopwords),
                |engine, candidate| {
                    (
                        candidate.name.clone(),
                        engine.service_sim(&target_service, candidate),
                    )
                },
            )
            .collect()
    });
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if let Some(k) = top {
        ranked.truncate(k);
    }
    match format {
        Format::Table => {
            for (rank, (name, score)) in ranked.iter().enumerate() {
                println!("{:>3}  {:.6}  {}", rank + 1, score, name);
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = ranked
                .iter()
                .map(|(name, score)| serde_json::json!({ "service": name, "score": score }))
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).unwrap());
        }
        Format::Csv => {
            println!("rank,service,score");
            for (rank, (name, score)) in ranked.iter().enumerate() {
                println!("{},{},{}", rank + 1, name, score);
            }
        }
    }
    Ok(())
}

fn cmd_eval_replay(replay: &Path, threshold: Score, format: Format) -> Result<(), CliError> {
    let scored: Vec<ScoredPair<Score>> = eval::load_replay(replay).map_err(CliError::input)?;
    let report = eval::classification_report(&scored, threshold).map_err(CliError::input)?;
    print_report(&report, format);
    Ok(())
}

fn cmd_eval_live(
    cli: &Cli,
    dir: &Path,
    labels: &Path,
    threshold: Score,
    format: Format,
) -> Result<(), CliError> {
    let stopwords = load_stopwords(cli)?;
    let lexicon = load_lexicon(cli)?;
    let services = load_services(dir)?;
    let label_set = ExpertLabelSet::from_csv(labels).map_err(CliError::input)?;

    let mut by_name: std::collections::HashMap<&str, &ServiceDescription> =
        std::collections::HashMap::new();
    for service in &services {
        if by_name.insert(service.name.as_str(), service).is_some() {
            return Err(CliError::Input(format!(
                "duplicate service name {:?} in {}",
                service.name,
                dir.display()
            )));
        }
    }
    let lookup = |id: &str| {
        by_name
            .get(id)
            .copied()
            .ok_or_else(|| CliError::input(EvalError::UnknownServiceId { id: id.into() }))
    };

    let pool = thread_pool(cli)?;
    let scored: Vec<ScoredPair<Score>> = pool.install(|| {
        label_set
            .pairs()
            .par_iter()
            .map_init(
                || make_engine(cli, &lexicon, &stopwords),
                |engine, pair| {
                    let a = lookup(&pair.service_a)?;
                    let b = lookup(&pair.service_b)?;
                    Ok(ScoredPair {
                        service_a: pair.service_a.clone(),
                        service_b: pair.service_b.clone(),
                        score: engine.service_sim(a, b),
                        expert: pair.expert,
                    })
                },
            )
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let report = eval::classification_report(&scored, threshold).map_err(CliError::input)?;
    print_report(&report, format);
    Ok(())
}

fn print_report(report: &EvalReport<Score>, format: Format) {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(report).unwrap());
        }
        Format::Csv => {
            println!("service_a,service_b,score,expert,predicted,error");
            for pair in &report.per_pair {
                println!(
                    "{},{},{},{},{},{}",
                    pair.service_a,
                    pair.service_b,
                    pair.score,
                    pair.expert.label(),
                    pair.predicted.label(),
                    pair.error
                );
            }
        }
        Format::Table => {
            for pair in &report.per_pair {
                println!(
                    "{}  {}  {:.6}  expert: {}  predicted: {}  error: {:.4}",
                    pair.service_a,
                    pair.service_b,
                    pair.score,
                    pair.expert.label(),
                    pair.predicted.label(),
                    pair.error
                );
            }
            println!();
            println!("pairs:           {}", report.per_pair.len());
            println!(
                "domain error:    {:.4} ({:.2}%)",
                report.domain_error,
                report.domain_error * 100.0
            );
            println!("bucket accuracy: {:.4}", report.bucket_accuracy);
            match report.precision {
                Some(p) => println!("precision:       {p:.4}"),
                None => println!("precision:       n/a"),
            }
            match report.recall {
                Some(r) => println!("recall:          {r:.4}"),
                None => println!("recall:          n/a"),
            }
        }
    }
}

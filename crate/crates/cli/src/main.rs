//! `npchunk` command-line front-end.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors (and for
//! malformed input to `convert`), 3 for data errors.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use npchunk::cascade::features::feature_rows;
use npchunk::cascade::make_stage1_instances;
use npchunk::corpus::{read_raw, write_tagged};
use npchunk::representation::convert;
use npchunk::{
    cross_validate, parse_corpus, run_experiment, score_chunks, score_tags, Corpus, Model,
    StageConfig, Tag, TagScheme, Target, Token,
};

#[derive(Parser)]
#[command(name = "npchunk", version, about = "Memory-based noun-phrase chunking")]
struct Cli {
    /// Worker threads for parallel execution (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-encodes a corpus from one complete tag scheme into another scheme.
    Convert {
        input: PathBuf,
        #[arg(long)]
        from: TagScheme,
        #[arg(long)]
        to: TagScheme,
    },
    /// Trains a word/POS-window model and writes its instance-base dump.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Tag scheme of the data file.
        #[arg(long, default_value = "iob1")]
        data_scheme: TagScheme,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tags `WORD POS` sentences with a dumped model.
    Tag {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: PathBuf,
        input: PathBuf,
    },
    /// Trains on one corpus, chunks another and prints the score report.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Tag scheme of the train and test files.
        #[arg(long, default_value = "iob1")]
        data_scheme: TagScheme,
        /// Writes the predicted chunks in corpus format.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scheme for `--out` (default: the target scheme, or iob1 for pairs).
        #[arg(long)]
        out_scheme: Option<TagScheme>,
    },
    /// Cross-validates a configuration over contiguous folds.
    Cv {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "iob1")]
        data_scheme: TagScheme,
        /// Overrides the configured fold count.
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Scores predicted chunks against gold chunks.
    Score {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, default_value = "iob1")]
        scheme: TagScheme,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(path: &Path) -> impl FnOnce(npchunk::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

fn data(path: &Path) -> impl FnOnce(npchunk::Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, npchunk::Error> {
    Ok(BufReader::new(File::open(path)?))
}

fn load_config(path: &Path) -> Result<StageConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(path)(e.into()))?;
    StageConfig::parse(&text).map_err(usage(path))
}

fn load_corpus(path: &Path, scheme: TagScheme) -> Result<Corpus, Failure> {
    open(path).and_then(|r| parse_corpus(r, scheme)).map_err(data(path))
}

fn emit(text: &str) -> Outcome {
    io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Data(format!("stdout: {e}")))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// The single scheme and classifier of a word/POS-only configuration.
fn stage1_scheme(cfg: &StageConfig, path: &Path) -> Result<TagScheme, Failure> {
    match cfg.target {
        Target::Single(s) if cfg.classifiers[0].stage() == 1 => Ok(s),
        _ => Err(Failure::Usage(format!(
            "{}: train and tag need a single-scheme configuration without tag context",
            path.display()
        ))),
    }
}

fn cmd_convert(input: &Path, from: TagScheme, to: TagScheme) -> Outcome {
    let raw = open(input).and_then(|r| read_raw(r, false)).map_err(usage(input))?;
    let mut converted = Vec::with_capacity(raw.len());
    for s in &raw {
        let tags = s.tag_sequence(from).map_err(usage(input))?;
        converted.push(convert(&tags, to).map_err(usage(input))?.into_tags());
    }
    emit(&write_tagged(raw.iter().zip(&converted).map(|(s, t)| (s.tokens.as_slice(), t.as_slice()))))
}

fn cmd_train(config: &Path, data_path: &Path, data_scheme: TagScheme, out: &Path) -> Outcome {
    let cfg = load_config(config)?;
    let scheme = stage1_scheme(&cfg, config)?;
    let corpus = load_corpus(data_path, data_scheme)?;
    let instances = make_stage1_instances(&corpus, scheme, cfg.classifiers[0].window, cfg.pairing);
    let model = Model::train(&instances, cfg.weighting).map_err(data(data_path))?;
    log::info!("{} instances, {} distinct", model.base.len(), model.base.exemplar_count());
    write_file(out, &model.dump())
}

fn cmd_tag(config: &Path, model_path: &Path, input: &Path) -> Outcome {
    let cfg = load_config(config)?;
    let scheme = stage1_scheme(&cfg, config)?;
    let cc = &cfg.classifiers[0];
    let model = open(model_path).and_then(Model::load).map_err(data(model_path))?;
    if model.base.arity() != cc.arity(cfg.pairing) {
        return Err(Failure::Usage(format!(
            "{}: model has {} features, configuration needs {}",
            model_path.display(),
            model.base.arity(),
            cc.arity(cfg.pairing)
        )));
    }
    let raw = open(input).and_then(|r| read_raw(r, true)).map_err(data(input))?;
    let sentences: Vec<&[Token]> = raw.iter().map(|s| s.tokens.as_slice()).collect();
    let rows = feature_rows(&sentences, cc.window, cfg.pairing, cc.tag_window, &[]).map_err(data(input))?;
    let labels = model.classify_batch(&rows, cc.k, cfg.execution).map_err(data(model_path))?;
    let mut labels = labels.iter();
    let mut tags: Vec<Vec<Tag>> = Vec::with_capacity(sentences.len());
    for s in &sentences {
        let t = labels
            .by_ref()
            .take(s.len())
            .map(|l| scheme.parse_tag(l))
            .collect::<Result<Vec<_>, _>>()
            .map_err(data(model_path))?;
        tags.push(t);
    }
    emit(&write_tagged(sentences.iter().copied().zip(tags.iter().map(Vec::as_slice))))
}

fn cmd_experiment(
    config: &Path,
    train: &Path,
    test: &Path,
    data_scheme: TagScheme,
    out: Option<&Path>,
    out_scheme: Option<TagScheme>,
) -> Outcome {
    let cfg = load_config(config)?;
    let train_corpus = load_corpus(train, data_scheme)?;
    let test_corpus = load_corpus(test, data_scheme)?;
    let result = run_experiment(&train_corpus, &test_corpus, &cfg).map_err(data(test))?;
    if let Some(out) = out {
        let scheme = out_scheme.unwrap_or(match cfg.target {
            Target::Single(s) => s,
            _ => TagScheme::Iob1,
        });
        let tags: Vec<Vec<Tag>> = result
            .chunk_tags(&test_corpus, scheme)
            .into_iter()
            .map(|t| t.into_tags())
            .collect();
        let text = write_tagged(
            test_corpus
                .sentences
                .iter()
                .zip(&tags)
                .map(|(s, t)| (s.tokens.as_slice(), t.as_slice())),
        );
        write_file(out, &text)?;
    }
    emit(&format!("{}\n", result.score))
}

fn cmd_cv(config: &Path, data_path: &Path, data_scheme: TagScheme, folds: Option<usize>) -> Outcome {
    let cfg = load_config(config)?;
    let n = folds.unwrap_or(cfg.folds);
    let corpus = load_corpus(data_path, data_scheme)?;
    let cv = cross_validate(&corpus, &cfg, n).map_err(data(data_path))?;
    let mut text = String::new();
    for (i, s) in cv.folds.iter().enumerate() {
        text.push_str(&format!("fold={} {s}\n", i + 1));
    }
    text.push_str(&format!("{cv}\n"));
    emit(&text)
}

fn cmd_score(gold: &Path, pred: &Path, scheme: TagScheme, beta: f64) -> Outcome {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Failure::Usage(format!("beta must be positive, got {beta}")));
    }
    let g = load_corpus(gold, scheme)?;
    let p = load_corpus(pred, scheme)?;
    let same_tokens = g.len() == p.len()
        && g.sentences
            .iter()
            .zip(&p.sentences)
            .all(|(a, b)| a.tokens.len() == b.tokens.len());
    if !same_tokens {
        return Err(Failure::Data(format!(
            "{} and {} do not have the same sentences",
            gold.display(),
            pred.display()
        )));
    }
    let mut score = score_chunks(&g.gold_chunks(), &p.gold_chunks(), beta).map_err(data(pred))?;
    if scheme.is_complete() {
        score = score.with_accuracy(score_tags(&g.tag_sequences(scheme), &p.tag_sequences(scheme)).map_err(data(pred))?);
    }
    emit(&format!("{score}\n"))
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        npchunk::par::set_threads(n).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Convert { input, from, to } => cmd_convert(&input, from, to),
        Command::Train {
            config,
            data,
            data_scheme,
            out,
        } => cmd_train(&config, &data, data_scheme, &out),
        Command::Tag { config, model, input } => cmd_tag(&config, &model, &input),
        Command::Experiment {
            config,
            train,
            test,
            data_scheme,
            out,
            out_scheme,
        } => cmd_experiment(&config, &train, &test, data_scheme, out.as_deref(), out_scheme),
        Command::Cv {
            config,
            data,
            data_scheme,
            folds,
        } => cmd_cv(&config, &data, data_scheme, folds),
        Command::Score {
            gold,
            pred,
            scheme,
            beta,
        } => cmd_score(&gold, &pred, scheme, beta),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Data(msg)) = &f;
            log::error!("{msg}");
            ExitCode::from(f.code())
        }
    }
}

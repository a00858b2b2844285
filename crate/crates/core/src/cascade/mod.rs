//! Cascaded chunking experiments.
//!
//! A classifier is trained in up to two cascades. The first uses word/POS
//! windows only. The second adds the chunk tags predicted around each token
//! by one first-cascade run (a single run with the classifier's own window)
//! or by several (a list of combination runs with their own windows and k).
//!
//! Partial-scheme targets train two classifiers independently and combine
//! their outputs into chunks.

mod config;
pub mod features;

use std::fmt;
use std::str::FromStr;

use crate::corpus::{split_folds, ChunkSpan, Corpus, Token};
use crate::error::{Error, Result};
use crate::eval::{self, ChunkScore};
use crate::mbl::{Model, Weighting};
use crate::par::{self, Execution};
use crate::representation::{self, Tag, TagScheme, TagSequence};

pub use features::{make_stage1_instances, make_stage2_instances, make_stage3_instances};

/// Upper bound on any context size.
pub const MAX_CONTEXT: usize = 4;

/// Folds used to cross-tag training material for a second cascade.
pub const INNER_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WindowSpec {
    pub left: usize,
    pub right: usize,
}

impl WindowSpec {
    pub const ZERO: WindowSpec = WindowSpec { left: 0, right: 0 };

    pub fn new(left: usize, right: usize) -> Result<Self> {
        if left > MAX_CONTEXT || right > MAX_CONTEXT {
            return Err(Error::arg(format!(
                "context {left}/{right} exceeds the maximum of {MAX_CONTEXT}"
            )));
        }
        Ok(WindowSpec { left, right })
    }

    pub fn is_zero(&self) -> bool {
        self.left == 0 && self.right == 0
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.left, self.right)
    }
}

/// Accepts `2/1` and `L=2/R=1`.
impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::arg(format!("bad context `{s}`, expected L/R"));
        let (l, r) = s.trim().split_once('/').ok_or_else(bad)?;
        let l = l.trim().trim_start_matches("L=");
        let r = r.trim().trim_start_matches("R=");
        WindowSpec::new(l.parse().map_err(|_| bad())?, r.parse().map_err(|_| bad())?)
    }
}

/// How word and POS symbols become features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Word and POS occupy separate feature positions.
    #[default]
    Separate,
    /// One `word pos` symbol per position.
    Fused,
}

/// Where the predicted tags used as training features come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageInput {
    /// Each training sentence is tagged by a model trained on the other
    /// inner folds.
    #[default]
    CrossTag,
    /// Gold tags.
    Gold,
    /// Training sentences are tagged by a model trained on all of them.
    SelfTag,
}

/// One first-cascade run whose predictions feed a second cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombinationRun {
    pub window: WindowSpec,
    /// Falls back to the classifier's own `k` when unset.
    pub k: Option<usize>,
}

impl fmt::Display for CombinationRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.window)?;
        if let Some(k) = self.k {
            write!(f, "({k})")?;
        }
        Ok(())
    }
}

/// Accepts `2/2` and `2/2(3)`.
impl FromStr for CombinationRun {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((w, rest)) = s.split_once('(') {
            let k = rest
                .strip_suffix(')')
                .and_then(|k| k.trim().parse().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::arg(format!("bad combination `{s}`")))?;
            Ok(CombinationRun {
                window: w.parse()?,
                k: Some(k),
            })
        } else {
            Ok(CombinationRun {
                window: s.parse()?,
                k: None,
            })
        }
    }
}

/// Settings of one classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierConfig {
    pub window: WindowSpec,
    /// Predicted-tag context; `0/0` means no second cascade unless
    /// combinations are given.
    pub tag_window: WindowSpec,
    pub combinations: Vec<CombinationRun>,
    pub k: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            window: WindowSpec { left: 1, right: 1 },
            tag_window: WindowSpec::ZERO,
            combinations: Vec::new(),
            k: 1,
        }
    }
}

impl ClassifierConfig {
    pub fn stage1(window: WindowSpec, k: usize) -> Self {
        ClassifierConfig {
            window,
            k,
            ..Default::default()
        }
    }

    /// 1: word/POS only; 2: tags from one first-cascade run; 3: tags from
    /// several combination runs.
    pub fn stage(&self) -> u8 {
        if !self.combinations.is_empty() {
            3
        } else if !self.tag_window.is_zero() {
            2
        } else {
            1
        }
    }

    /// First-cascade runs feeding this classifier.
    fn runs(&self) -> Vec<(WindowSpec, usize)> {
        match self.stage() {
            1 => Vec::new(),
            2 => vec![(self.window, self.k)],
            _ => self
                .combinations
                .iter()
                .map(|c| (c.window, c.k.unwrap_or(self.k)))
                .collect(),
        }
    }

    pub fn arity(&self, pairing: Pairing) -> usize {
        features::word_pos_arity(self.window, pairing)
            + self.runs().len() * (self.tag_window.left + self.tag_window.right)
    }
}

/// What the experiment predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Single(TagScheme),
    /// `[` + `]`
    OpenClose,
    /// `[` + IO
    OpenIo,
    /// IO + `]`
    IoClose,
}

impl Target {
    pub fn schemes(self) -> Vec<TagScheme> {
        match self {
            Target::Single(s) => vec![s],
            Target::OpenClose => vec![TagScheme::OpenBracket, TagScheme::CloseBracket],
            Target::OpenIo => vec![TagScheme::OpenBracket, TagScheme::Io],
            Target::IoClose => vec![TagScheme::Io, TagScheme::CloseBracket],
        }
    }

    /// Turns one tag sequence per classifier into chunks.
    pub fn chunks(self, sequences: &[TagSequence]) -> Result<Vec<ChunkSpan>> {
        match (self, sequences) {
            (Target::Single(_), [s]) => representation::decode(s),
            (Target::OpenClose, [o, c]) => representation::combine_brackets(o, c),
            (Target::OpenIo, [o, io]) => representation::combine_open_io(o, io),
            (Target::IoClose, [io, c]) => representation::combine_io_close(io, c),
            _ => Err(Error::arg(format!(
                "{} tag sequences for target {self}",
                sequences.len()
            ))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Single(s) => write!(f, "{s}"),
            Target::OpenClose => f.write_str("open+close"),
            Target::OpenIo => f.write_str("open+io"),
            Target::IoClose => f.write_str("io+close"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('+').map(str::trim).collect();
        match parts.as_slice() {
            [one] => {
                let scheme: TagScheme = one.parse()?;
                if !scheme.is_complete() {
                    return Err(Error::arg(format!(
                        "partial scheme {scheme} must be paired: open+close, open+io or io+close"
                    )));
                }
                Ok(Target::Single(scheme))
            }
            [a, b] => match (a.parse::<TagScheme>()?, b.parse::<TagScheme>()?) {
                (TagScheme::OpenBracket, TagScheme::CloseBracket) => Ok(Target::OpenClose),
                (TagScheme::OpenBracket, TagScheme::Io) => Ok(Target::OpenIo),
                (TagScheme::Io, TagScheme::CloseBracket) => Ok(Target::IoClose),
                _ => Err(Error::arg(format!("unsupported scheme pair `{s}`"))),
            },
            _ => Err(Error::arg(format!("bad scheme `{s}`"))),
        }
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct StageConfig {
    pub target: Target,
    /// One per scheme of `target`, in the same order.
    pub classifiers: Vec<ClassifierConfig>,
    pub weighting: Weighting,
    pub stage_input: StageInput,
    pub pairing: Pairing,
    pub folds: usize,
    /// Only used by synthetic-data generators.
    pub seed: Option<u64>,
    pub execution: Execution,
}

impl StageConfig {
    pub fn single(scheme: TagScheme, classifier: ClassifierConfig) -> Self {
        StageConfig {
            target: Target::Single(scheme),
            classifiers: vec![classifier],
            weighting: Weighting::default(),
            stage_input: StageInput::default(),
            pairing: Pairing::default(),
            folds: 5,
            seed: None,
            execution: Execution::default(),
        }
    }

    pub fn pair(target: Target, first: ClassifierConfig, second: ClassifierConfig) -> Self {
        StageConfig {
            target,
            classifiers: vec![first, second],
            ..StageConfig::single(TagScheme::Iob1, ClassifierConfig::default())
        }
    }

    pub fn validate(&self) -> Result<()> {
        let schemes = self.target.schemes();
        if schemes.len() != self.classifiers.len() {
            return Err(Error::arg(format!(
                "target {} needs {} classifier settings, got {}",
                self.target,
                schemes.len(),
                self.classifiers.len()
            )));
        }
        if let Target::Single(s) = self.target {
            if !s.is_complete() {
                return Err(Error::UnsupportedScheme(s));
            }
        }
        for c in &self.classifiers {
            if c.k < 1 || c.combinations.iter().any(|r| r.k == Some(0)) {
                return Err(Error::arg("k must be at least 1"));
            }
        }
        if self.folds < 2 {
            return Err(Error::arg("folds must be at least 2"));
        }
        Ok(())
    }
}

/// Predicted tags for every sentence of a corpus, under one scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub scheme: TagScheme,
    pub tags: Vec<Vec<Tag>>,
}

impl Prediction {
    /// Gold tags of `corpus` under `scheme`.
    pub fn gold(corpus: &Corpus, scheme: TagScheme) -> Self {
        Prediction {
            scheme,
            tags: corpus
                .sentences
                .iter()
                .map(|s| s.tags(scheme).into_tags())
                .collect(),
        }
    }

    pub fn sequences(&self) -> Vec<TagSequence> {
        self.tags
            .iter()
            .map(|t| TagSequence::new(self.scheme, t.clone()).expect("predicted tags come from the scheme"))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// One per classifier.
    pub predictions: Vec<Prediction>,
    pub chunks: Vec<Vec<ChunkSpan>>,
    pub score: ChunkScore,
}

impl ExperimentResult {
    /// Predicted chunks re-encoded under `scheme`, one sequence per sentence.
    pub fn chunk_tags(&self, test: &Corpus, scheme: TagScheme) -> Vec<TagSequence> {
        self.chunks
            .iter()
            .zip(&test.sentences)
            .map(|(c, s)| representation::encode(c, s.len(), scheme).expect("decoded chunks are valid"))
            .collect()
    }
}

/// Trains a word/POS-window classifier on `train` and tags `sentences`.
fn first_cascade(
    train: &Corpus,
    sentences: &[&[Token]],
    scheme: TagScheme,
    window: WindowSpec,
    k: usize,
    cfg: &StageConfig,
) -> Result<Prediction> {
    let instances = make_stage1_instances(train, scheme, window, cfg.pairing);
    let model = Model::train(&instances, cfg.weighting)?;
    let rows = features::feature_rows(sentences, window, cfg.pairing, WindowSpec::ZERO, &[])?;
    let labels = model.classify_batch(&rows, k, cfg.execution)?;
    regroup(scheme, sentences, labels)
}

fn regroup(scheme: TagScheme, sentences: &[&[Token]], labels: Vec<String>) -> Result<Prediction> {
    let mut it = labels.into_iter();
    let mut tags = Vec::with_capacity(sentences.len());
    for s in sentences {
        let t = it
            .by_ref()
            .take(s.len())
            .map(|l| scheme.parse_tag(&l))
            .collect::<Result<Vec<_>>>()?;
        tags.push(t);
    }
    Ok(Prediction { scheme, tags })
}

/// First-cascade tags for the training corpus itself.
fn training_run(train: &Corpus, scheme: TagScheme, window: WindowSpec, k: usize, cfg: &StageConfig) -> Result<Prediction> {
    let mode = match cfg.stage_input {
        StageInput::CrossTag if train.len() < 2 => {
            log::warn!("cannot cross-tag {} training sentence(s); self-tagging instead", train.len());
            StageInput::SelfTag
        }
        m => m,
    };
    match mode {
        StageInput::Gold => Ok(Prediction::gold(train, scheme)),
        StageInput::SelfTag => first_cascade(train, &features::token_slices(train), scheme, window, k, cfg),
        StageInput::CrossTag => {
            let folds = split_folds(train, INNER_FOLDS.min(train.len()))?;
            let mut tags = Vec::with_capacity(train.len());
            for (inner_train, held_out) in &folds {
                let p = first_cascade(inner_train, &features::token_slices(held_out), scheme, window, k, cfg)?;
                tags.extend(p.tags);
            }
            Ok(Prediction { scheme, tags })
        }
    }
}

fn run_classifier(
    train: &Corpus,
    sentences: &[&[Token]],
    scheme: TagScheme,
    cc: &ClassifierConfig,
    cfg: &StageConfig,
) -> Result<Prediction> {
    let runs = cc.runs();
    if runs.is_empty() {
        return first_cascade(train, sentences, scheme, cc.window, cc.k, cfg);
    }
    let mut train_runs = Vec::with_capacity(runs.len());
    let mut test_runs = Vec::with_capacity(runs.len());
    for &(window, k) in &runs {
        train_runs.push(training_run(train, scheme, window, k, cfg)?);
        test_runs.push(first_cascade(train, sentences, scheme, window, k, cfg)?);
    }
    let instances = make_stage3_instances(train, scheme, cc.window, cfg.pairing, cc.tag_window, &train_runs)?;
    let model = Model::train(&instances, cfg.weighting)?;
    let refs: Vec<&Prediction> = test_runs.iter().collect();
    let rows = features::feature_rows(sentences, cc.window, cfg.pairing, cc.tag_window, &refs)?;
    let labels = model.classify_batch(&rows, cc.k, cfg.execution)?;
    regroup(scheme, sentences, labels)
}

/// Trains on `train` and chunks untagged `sentences`. Returns one
/// prediction per classifier and the resulting chunks.
pub fn chunk_sentences(
    train: &Corpus,
    sentences: &[&[Token]],
    cfg: &StageConfig,
) -> Result<(Vec<Prediction>, Vec<Vec<ChunkSpan>>)> {
    cfg.validate()?;
    let predictions = cfg
        .target
        .schemes()
        .into_iter()
        .zip(&cfg.classifiers)
        .map(|(scheme, cc)| run_classifier(train, sentences, scheme, cc, cfg))
        .collect::<Result<Vec<_>>>()?;
    let per_classifier: Vec<Vec<TagSequence>> = predictions.iter().map(Prediction::sequences).collect();
    let chunks = (0..sentences.len())
        .map(|si| {
            let seqs: Vec<TagSequence> = per_classifier.iter().map(|p| p[si].clone()).collect();
            cfg.target.chunks(&seqs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((predictions, chunks))
}

/// Trains on `train`, chunks `test` and scores against its gold chunks.
pub fn run_experiment(train: &Corpus, test: &Corpus, cfg: &StageConfig) -> Result<ExperimentResult> {
    let (predictions, chunks) = chunk_sentences(train, &features::token_slices(test), cfg)?;
    let mut score = eval::score_chunks(&test.gold_chunks(), &chunks, 1.0)?;
    if let Target::Single(scheme) = cfg.target {
        score = score.with_accuracy(eval::score_tags(&test.tag_sequences(scheme), &predictions[0].sequences())?);
    }
    Ok(ExperimentResult {
        predictions,
        chunks,
        score,
    })
}

/// Per-fold scores with mean and population standard deviation of F.
#[derive(Debug, Clone)]
pub struct CvSummary {
    pub folds: Vec<ChunkScore>,
    /// Percent scale.
    pub f_mean: f64,
    /// Percent scale.
    pub f_std: f64,
}

impl CvSummary {
    pub fn from_scores(folds: Vec<ChunkScore>) -> Self {
        let fs: Vec<f64> = folds.iter().map(ChunkScore::f_percent).collect();
        let (f_mean, f_std) = eval::mean_std(&fs);
        CvSummary { folds, f_mean, f_std }
    }

    /// `90.89 ± 0.63`
    pub fn table_cell(&self) -> String {
        format!("{:.2} \u{b1} {:.2}", self.f_mean, self.f_std)
    }
}

/// `f1_mean=<x> f1_std=<x>`
impl fmt::Display for CvSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f1_mean={:.2} f1_std={:.2}", self.f_mean, self.f_std)
    }
}

/// Runs one experiment per contiguous fold.
pub fn cross_validate(corpus: &Corpus, cfg: &StageConfig, n_folds: usize) -> Result<CvSummary> {
    cfg.validate()?;
    let folds = split_folds(corpus, n_folds)?;
    let scores = par::map(cfg.execution, &folds, |(train, test)| {
        run_experiment(train, test, cfg).map(|r| r.score)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CvSummary::from_scores(scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus_str;

    const EXAMPLE: &str = "In IN O\nearly JJ I\ntrading NN I\nin IN O\nHong NNP I\nKong NNP I\nMonday NNP B\n\
                           , , O\ngold NN I\nwas VBD O\nquoted VBN O\nat IN O\n$ $ I\n366.50 CD I\nan DT B\n\
                           ounce NN I\n. . O\n";

    #[test]
    fn window_parsing() {
        assert_eq!("L=2/R=1".parse::<WindowSpec>().unwrap(), WindowSpec { left: 2, right: 1 });
        assert!("5/0".parse::<WindowSpec>().is_err());
        let c: CombinationRun = "2/2(3)".parse().unwrap();
        assert_eq!(c.k, Some(3));
        assert_eq!(c.to_string(), "2/2(3)");
        assert!("2/2(0)".parse::<CombinationRun>().is_err());
    }

    #[test]
    fn target_parsing() {
        assert_eq!("IOB1".parse::<Target>().unwrap(), Target::Single(TagScheme::Iob1));
        assert_eq!("open+io".parse::<Target>().unwrap(), Target::OpenIo);
        assert!("io".parse::<Target>().is_err());
        assert!("close+open".parse::<Target>().is_err());
    }

    #[test]
    fn stages_and_arity() {
        let mut c = ClassifierConfig::stage1(WindowSpec::new(2, 1).unwrap(), 1);
        assert_eq!((c.stage(), c.arity(Pairing::Separate)), (1, 8));
        c.tag_window = WindowSpec::new(1, 2).unwrap();
        assert_eq!((c.stage(), c.arity(Pairing::Separate)), (2, 11));
        c.combinations = ["0/0(1)", "1/1(1)", "2/2(3)", "3/3(3)"].iter().map(|s| s.parse().unwrap()).collect();
        c.tag_window = WindowSpec::new(1, 1).unwrap();
        assert_eq!((c.stage(), c.arity(Pairing::Separate)), (3, 16));
    }

    #[test]
    fn self_test_is_perfect_for_every_target() {
        let corpus = parse_corpus_str(EXAMPLE, TagScheme::Iob1).unwrap();
        for scheme in TagScheme::COMPLETE {
            let cfg = StageConfig::single(scheme, ClassifierConfig::stage1(WindowSpec::new(1, 1).unwrap(), 1));
            let r = run_experiment(&corpus, &corpus, &cfg).unwrap();
            assert_eq!(r.score.accuracy, Some(1.0), "{scheme}");
            assert_eq!(r.score.f_beta, 1.0);
        }
        for target in [Target::OpenClose, Target::OpenIo, Target::IoClose] {
            let cc = ClassifierConfig::stage1(WindowSpec::new(1, 1).unwrap(), 1);
            let cfg = StageConfig::pair(target, cc.clone(), cc);
            let r = run_experiment(&corpus, &corpus, &cfg).unwrap();
            assert_eq!(r.score.accuracy, None);
            assert_eq!(r.score.f_beta, 1.0, "{target}");
        }
    }

    #[test]
    fn config_shape_is_validated() {
        let cc = ClassifierConfig::default();
        let mut cfg = StageConfig::pair(Target::OpenClose, cc.clone(), cc);
        cfg.classifiers.pop();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cv_statistics_of_identical_folds() {
        let s = ChunkScore {
            accuracy: None,
            precision: 0.5,
            recall: 0.5,
            f_beta: 0.5,
            beta: 1.0,
            found: 2,
            correct: 1,
            gold: 2,
        };
        let cv = CvSummary::from_scores(vec![s; 5]);
        assert_eq!(cv.f_std, 0.0);
        assert_eq!(cv.to_string(), "f1_mean=50.00 f1_std=0.00");
        assert_eq!(cv.table_cell(), "50.00 \u{b1} 0.00");
    }
}

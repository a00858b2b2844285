//! Column corpora: one `WORD POS TAG` line per token, blank line between
//! sentences.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::representation::{self, Tag, TagScheme, TagSequence};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub word: String,
    pub pos: String,
}

impl Token {
    pub fn new(word: impl Into<String>, pos: impl Into<String>) -> Result<Self> {
        let word = word.into();
        let pos = pos.into();
        for (what, s) in [("word", &word), ("pos", &pos)] {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::arg(format!("{what} `{s}` must be non-empty without whitespace")));
            }
        }
        Ok(Token { word, pos })
    }
}

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChunkSpan {
    pub start: usize,
    pub end: usize,
}

impl ChunkSpan {
    pub fn new(start: usize, end: usize) -> Self {
        ChunkSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub chunks: Vec<ChunkSpan>,
}

impl Sentence {
    /// Builds a sentence, checking that the chunks are sorted, disjoint and
    /// within bounds.
    pub fn new(tokens: Vec<Token>, chunks: Vec<ChunkSpan>) -> Result<Self> {
        representation::validate_spans(&chunks, tokens.len())?;
        Ok(Sentence { tokens, chunks })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tags(&self, scheme: TagScheme) -> TagSequence {
        representation::encode(&self.chunks, self.len(), scheme)
            .expect("sentence chunks are validated on construction")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Corpus { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn gold_chunks(&self) -> Vec<Vec<ChunkSpan>> {
        self.sentences.iter().map(|s| s.chunks.clone()).collect()
    }

    pub fn tag_sequences(&self, scheme: TagScheme) -> Vec<TagSequence> {
        self.sentences.iter().map(|s| s.tags(scheme)).collect()
    }
}

/// A sentence as it appears on disk, before its tag column is interpreted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSentence {
    pub tokens: Vec<Token>,
    /// Third-column symbols; `None` for two-column (untagged) lines.
    pub tags: Vec<Option<String>>,
    /// 1-based line number of every token.
    pub lines: Vec<usize>,
}

impl RawSentence {
    /// Interprets the tag column under `scheme`.
    pub fn tag_sequence(&self, scheme: TagScheme) -> Result<TagSequence> {
        let mut tags = Vec::with_capacity(self.tags.len());
        for (t, &line) in self.tags.iter().zip(&self.lines) {
            let symbol = t.as_deref().ok_or_else(|| Error::Parse {
                line,
                message: "missing tag column".into(),
            })?;
            let tag = scheme.parse_tag(symbol).map_err(|_| Error::Tag {
                line,
                tag: symbol.to_string(),
                scheme,
            })?;
            tags.push(tag);
        }
        TagSequence::new(scheme, tags)
    }
}

/// Reads sentences without interpreting the tag column.
///
/// With `allow_untagged`, two-column `WORD POS` lines are accepted as well.
/// Runs of blank lines count as a single separator and a missing final
/// newline is tolerated.
pub fn read_raw<R: BufRead>(input: R, allow_untagged: bool) -> Result<Vec<RawSentence>> {
    let mut out = Vec::new();
    let mut cur = RawSentence {
        tokens: Vec::new(),
        tags: Vec::new(),
        lines: Vec::new(),
    };
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            if !cur.tokens.is_empty() {
                out.push(std::mem::replace(
                    &mut cur,
                    RawSentence {
                        tokens: Vec::new(),
                        tags: Vec::new(),
                        lines: Vec::new(),
                    },
                ));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(' ').collect();
        let ok_shape = cols.len() == 3 || (allow_untagged && cols.len() == 2);
        if !ok_shape || cols.iter().any(|c| c.is_empty() || c.contains(char::is_whitespace)) {
            return Err(Error::Parse {
                line: lineno,
                message: format!(
                    "expected {} single-space separated columns, got `{line}`",
                    if allow_untagged { "2 or 3" } else { "3" }
                ),
            });
        }
        cur.tokens.push(Token {
            word: cols[0].to_string(),
            pos: cols[1].to_string(),
        });
        cur.tags.push(cols.get(2).map(|s| s.to_string()));
        cur.lines.push(lineno);
    }
    if !cur.tokens.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

/// Parses a corpus whose tag column uses `scheme`.
///
/// Only schemes that decode on their own are accepted: the four complete
/// schemes and IO (which merges adjacent chunks).
pub fn parse_corpus<R: BufRead>(input: R, scheme: TagScheme) -> Result<Corpus> {
    if matches!(scheme, TagScheme::OpenBracket | TagScheme::CloseBracket) {
        return Err(Error::UnsupportedScheme(scheme));
    }
    let raw = read_raw(input, false)?;
    let mut sentences = Vec::with_capacity(raw.len());
    for r in raw {
        let tags = r.tag_sequence(scheme)?;
        let chunks = representation::decode(&tags)?;
        sentences.push(Sentence {
            tokens: r.tokens,
            chunks,
        });
    }
    Ok(Corpus { sentences })
}

pub fn parse_corpus_str(input: &str, scheme: TagScheme) -> Result<Corpus> {
    parse_corpus(input.as_bytes(), scheme)
}

/// Serializes `corpus` with its chunks encoded under `scheme`.
pub fn write_corpus(corpus: &Corpus, scheme: TagScheme) -> String {
    let tagged: Vec<(&Sentence, Vec<Tag>)> = corpus
        .sentences
        .iter()
        .map(|s| (s, s.tags(scheme).into_tags()))
        .collect();
    write_tagged(tagged.iter().map(|(s, t)| (s.tokens.as_slice(), t.as_slice())))
}

/// Serializes sentences with explicit tag columns.
pub fn write_tagged<'a, I>(sentences: I) -> String
where
    I: IntoIterator<Item = (&'a [Token], &'a [Tag])>,
{
    let mut out = String::new();
    for (i, (tokens, tags)) in sentences.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (tok, tag) in tokens.iter().zip(tags) {
            let _ = writeln!(out, "{} {} {}", tok.word, tok.pos, tag);
        }
    }
    out
}

/// Splits the corpus into `n_folds` contiguous blocks of sentences.
///
/// The first `len % n_folds` folds take one extra sentence. Each item is
/// `(train, test)` where `train` is everything outside the test block.
pub fn split_folds(corpus: &Corpus, n_folds: usize) -> Result<Vec<(Corpus, Corpus)>> {
    if n_folds < 2 {
        return Err(Error::arg(format!("need at least 2 folds, got {n_folds}")));
    }
    if corpus.len() < n_folds {
        return Err(Error::arg(format!(
            "{} sentences cannot fill {n_folds} folds",
            corpus.len()
        )));
    }
    let base = corpus.len() / n_folds;
    let extra = corpus.len() % n_folds;
    let mut folds = Vec::with_capacity(n_folds);
    let mut start = 0;
    for f in 0..n_folds {
        let size = base + usize::from(f < extra);
        let end = start + size;
        let test = Corpus::new(corpus.sentences[start..end].to_vec());
        let train = Corpus::new(
            corpus.sentences[..start]
                .iter()
                .chain(&corpus.sentences[end..])
                .cloned()
                .collect(),
        );
        folds.push((train, test));
        start = end;
    }
    Ok(folds)
}

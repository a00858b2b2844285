//! Chunk tag representations.
//!
//! Four complete schemes (IOB1, IOB2, IOE1, IOE2) encode a chunking on
//! their own. Three partial schemes (IO, open brackets, close brackets)
//! only recover it when combined in pairs: `[`+`]`, `[`+IO and IO+`]`.
//!
//! Decoding accepts every sequence over a scheme's alphabet. Classifier
//! output is frequently inconsistent, so stray boundary tags are read in the
//! way that keeps the most chunks:
//!
//! * begin-style schemes (IOB1, IOB2): a chunk starts at every `B` and at
//!   every `I` that follows `O` or the sentence start;
//! * end-style schemes (IOE1, IOE2): a chunk ends at every `E` and at every
//!   `I` that precedes `O` or the sentence end.

use std::fmt;
use std::str::FromStr;

use crate::corpus::ChunkSpan;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagScheme {
    Iob1,
    Iob2,
    Ioe1,
    Ioe2,
    Io,
    OpenBracket,
    CloseBracket,
}

impl TagScheme {
    pub const ALL: [TagScheme; 7] = [
        TagScheme::Iob1,
        TagScheme::Iob2,
        TagScheme::Ioe1,
        TagScheme::Ioe2,
        TagScheme::Io,
        TagScheme::OpenBracket,
        TagScheme::CloseBracket,
    ];

    pub const COMPLETE: [TagScheme; 4] = [
        TagScheme::Iob1,
        TagScheme::Iob2,
        TagScheme::Ioe1,
        TagScheme::Ioe2,
    ];

    /// Whether the scheme alone determines the chunking.
    pub fn is_complete(self) -> bool {
        matches!(
            self,
            TagScheme::Iob1 | TagScheme::Iob2 | TagScheme::Ioe1 | TagScheme::Ioe2
        )
    }

    pub fn alphabet(self) -> &'static [Tag] {
        match self {
            TagScheme::Iob1 | TagScheme::Iob2 => &[Tag::I, Tag::O, Tag::B],
            TagScheme::Ioe1 | TagScheme::Ioe2 => &[Tag::I, Tag::O, Tag::E],
            TagScheme::Io => &[Tag::I, Tag::O],
            TagScheme::OpenBracket => &[Tag::Open, Tag::Dot],
            TagScheme::CloseBracket => &[Tag::Close, Tag::Dot],
        }
    }

    pub fn admits(self, tag: Tag) -> bool {
        self.alphabet().contains(&tag)
    }

    /// The tag written for tokens outside any chunk.
    pub fn outside(self) -> Tag {
        match self {
            TagScheme::OpenBracket | TagScheme::CloseBracket => Tag::Dot,
            _ => Tag::O,
        }
    }

    /// Canonical lower-case name, as accepted on the command line.
    pub fn name(self) -> &'static str {
        match self {
            TagScheme::Iob1 => "iob1",
            TagScheme::Iob2 => "iob2",
            TagScheme::Ioe1 => "ioe1",
            TagScheme::Ioe2 => "ioe2",
            TagScheme::Io => "io",
            TagScheme::OpenBracket => "open",
            TagScheme::CloseBracket => "close",
        }
    }

    /// Parses a tag symbol and checks it against the alphabet.
    pub fn parse_tag(self, symbol: &str) -> Result<Tag> {
        symbol
            .parse::<Tag>()
            .ok()
            .filter(|&t| self.admits(t))
            .ok_or_else(|| Error::InvalidTag {
                tag: symbol.to_string(),
                scheme: self,
            })
    }
}

impl fmt::Display for TagScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TagScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let scheme = match s.to_ascii_lowercase().as_str() {
            "iob1" => TagScheme::Iob1,
            "iob2" => TagScheme::Iob2,
            "ioe1" => TagScheme::Ioe1,
            "ioe2" => TagScheme::Ioe2,
            "io" => TagScheme::Io,
            "open" | "[" => TagScheme::OpenBracket,
            "close" | "]" => TagScheme::CloseBracket,
            _ => return Err(Error::arg(format!("unknown tag scheme `{s}`"))),
        };
        Ok(scheme)
    }
}

/// A single chunk tag symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    I,
    O,
    B,
    E,
    /// `[`
    Open,
    /// `]`
    Close,
    /// `.`
    Dot,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::I => "I",
            Tag::O => "O",
            Tag::B => "B",
            Tag::E => "E",
            Tag::Open => "[",
            Tag::Close => "]",
            Tag::Dot => ".",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "I" => Tag::I,
            "O" => Tag::O,
            "B" => Tag::B,
            "E" => Tag::E,
            "[" => Tag::Open,
            "]" => Tag::Close,
            "." => Tag::Dot,
            _ => return Err(Error::arg(format!("unknown tag symbol `{s}`"))),
        })
    }
}

/// Per-token chunk tags under one scheme. Every tag is in the scheme's
/// alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TagSequence {
    scheme: TagScheme,
    tags: Vec<Tag>,
}

impl TagSequence {
    pub fn new(scheme: TagScheme, tags: Vec<Tag>) -> Result<Self> {
        if let Some(&bad) = tags.iter().find(|&&t| !scheme.admits(t)) {
            return Err(Error::InvalidTag {
                tag: bad.to_string(),
                scheme,
            });
        }
        Ok(TagSequence { scheme, tags })
    }

    /// Builds a sequence from whitespace-separated tag symbols.
    pub fn parse(scheme: TagScheme, symbols: &str) -> Result<Self> {
        let tags = symbols
            .split_whitespace()
            .map(|s| scheme.parse_tag(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(TagSequence { scheme, tags })
    }

    pub fn scheme(&self) -> TagScheme {
        self.scheme
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn into_tags(self) -> Vec<Tag> {
        self.tags
    }
}

impl fmt::Display for TagSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tags.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

/// Checks that `chunks` are sorted, disjoint and inside `0..len`.
pub fn validate_spans(chunks: &[ChunkSpan], len: usize) -> Result<()> {
    let mut prev_end = 0;
    for (i, c) in chunks.iter().enumerate() {
        if c.start >= c.end || c.end > len {
            return Err(Error::arg(format!(
                "chunk [{}, {}) is empty or exceeds sentence length {len}",
                c.start, c.end
            )));
        }
        if i > 0 && c.start < prev_end {
            return Err(Error::arg(format!(
                "chunk [{}, {}) overlaps or precedes the previous chunk",
                c.start, c.end
            )));
        }
        prev_end = c.end;
    }
    Ok(())
}

/// Encodes a chunking of a `len`-token sentence under `scheme`.
pub fn encode(chunks: &[ChunkSpan], len: usize, scheme: TagScheme) -> Result<TagSequence> {
    validate_spans(chunks, len)?;
    let mut tags = vec![scheme.outside(); len];
    for (ci, c) in chunks.iter().enumerate() {
        let after_chunk = ci > 0 && chunks[ci - 1].end == c.start;
        let before_chunk = chunks.get(ci + 1).is_some_and(|n| n.start == c.end);
        let last = c.end - 1;
        match scheme {
            TagScheme::Iob1 | TagScheme::Iob2 => {
                tags[c.start..c.end].fill(Tag::I);
                if scheme == TagScheme::Iob2 || after_chunk {
                    tags[c.start] = Tag::B;
                }
            }
            TagScheme::Ioe1 | TagScheme::Ioe2 => {
                tags[c.start..c.end].fill(Tag::I);
                if scheme == TagScheme::Ioe2 || before_chunk {
                    tags[last] = Tag::E;
                }
            }
            TagScheme::Io => tags[c.start..c.end].fill(Tag::I),
            TagScheme::OpenBracket => tags[c.start] = Tag::Open,
            TagScheme::CloseBracket => tags[last] = Tag::Close,
        }
    }
    Ok(TagSequence { scheme, tags })
}

/// Decodes a complete-scheme or IO sequence into chunk spans.
///
/// IO decoding merges adjacent chunks since the format has no boundary tag.
/// Bracket schemes are refused: use [`combine_brackets`],
/// [`combine_open_io`] or [`combine_io_close`].
pub fn decode(tags: &TagSequence) -> Result<Vec<ChunkSpan>> {
    match tags.scheme {
        TagScheme::Iob1 | TagScheme::Iob2 => Ok(decode_begin(&tags.tags)),
        TagScheme::Ioe1 | TagScheme::Ioe2 => Ok(decode_end(&tags.tags)),
        TagScheme::Io => Ok(decode_begin(&tags.tags)),
        s @ (TagScheme::OpenBracket | TagScheme::CloseBracket) => Err(Error::UnsupportedScheme(s)),
    }
}

fn decode_begin(tags: &[Tag]) -> Vec<ChunkSpan> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &t) in tags.iter().enumerate() {
        match t {
            Tag::B => {
                if let Some(s) = open {
                    spans.push(ChunkSpan::new(s, i));
                }
                open = Some(i);
            }
            Tag::I => {
                if open.is_none() {
                    open = Some(i);
                }
            }
            _ => {
                if let Some(s) = open.take() {
                    spans.push(ChunkSpan::new(s, i));
                }
            }
        }
    }
    if let Some(s) = open {
        spans.push(ChunkSpan::new(s, tags.len()));
    }
    spans
}

fn decode_end(tags: &[Tag]) -> Vec<ChunkSpan> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &t) in tags.iter().enumerate() {
        match t {
            Tag::E => {
                spans.push(ChunkSpan::new(open.take().unwrap_or(i), i + 1));
            }
            Tag::I => {
                if open.is_none() {
                    open = Some(i);
                }
            }
            _ => {
                if let Some(s) = open.take() {
                    spans.push(ChunkSpan::new(s, i));
                }
            }
        }
    }
    if let Some(s) = open {
        spans.push(ChunkSpan::new(s, tags.len()));
    }
    spans
}

fn expect_pair(a: &TagSequence, a_scheme: TagScheme, b: &TagSequence, b_scheme: TagScheme) -> Result<()> {
    if a.scheme != a_scheme || b.scheme != b_scheme {
        return Err(Error::arg(format!(
            "expected {a_scheme} + {b_scheme} sequences, got {} + {}",
            a.scheme, b.scheme
        )));
    }
    if a.len() != b.len() {
        return Err(Error::arg(format!(
            "sequence lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Combines open- and close-bracket sequences.
///
/// A window `[i, j]` is a chunk when `i` carries `[`, `j` carries `]`, and
/// no other bracket of either kind lies inside the window. Such windows can
/// never overlap, so a single greedy left-to-right scan finds them all.
pub fn combine_brackets(open: &TagSequence, close: &TagSequence) -> Result<Vec<ChunkSpan>> {
    expect_pair(open, TagScheme::OpenBracket, close, TagScheme::CloseBracket)?;
    let open = &open.tags;
    let close = &close.tags;
    let n = open.len();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        if open[i] != Tag::Open {
            i += 1;
            continue;
        }
        let mut j = i;
        let mut matched = None;
        while j < n {
            if j > i && open[j] == Tag::Open {
                break;
            }
            if close[j] == Tag::Close {
                matched = Some(j);
                break;
            }
            j += 1;
        }
        match matched {
            Some(j) => {
                spans.push(ChunkSpan::new(i, j + 1));
                i = j + 1;
            }
            None => i += 1,
        }
    }
    Ok(spans)
}

/// `I` tokens carrying `[` become `B`; the result is read as IOB2.
pub fn combine_open_io(open: &TagSequence, io: &TagSequence) -> Result<Vec<ChunkSpan>> {
    expect_pair(open, TagScheme::OpenBracket, io, TagScheme::Io)?;
    let rewritten: Vec<Tag> = io
        .tags
        .iter()
        .zip(&open.tags)
        .map(|(&t, &o)| if t == Tag::I && o == Tag::Open { Tag::B } else { t })
        .collect();
    Ok(decode_begin(&rewritten))
}

/// `I` tokens carrying `]` become `E`; the result is read as IOE2.
pub fn combine_io_close(io: &TagSequence, close: &TagSequence) -> Result<Vec<ChunkSpan>> {
    expect_pair(io, TagScheme::Io, close, TagScheme::CloseBracket)?;
    let rewritten: Vec<Tag> = io
        .tags
        .iter()
        .zip(&close.tags)
        .map(|(&t, &c)| if t == Tag::I && c == Tag::Close { Tag::E } else { t })
        .collect();
    Ok(decode_end(&rewritten))
}

/// Re-encodes a complete-scheme sequence under `target`.
pub fn convert(tags: &TagSequence, target: TagScheme) -> Result<TagSequence> {
    if !tags.scheme.is_complete() {
        return Err(Error::UnsupportedScheme(tags.scheme));
    }
    encode(&decode(tags)?, tags.len(), target)
}

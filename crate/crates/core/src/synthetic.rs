//! Seeded synthetic chunk corpora.
//!
//! Chunks are the maximal runs of tokens whose POS is in [`CHUNK_POS`].
//! Every word belongs to exactly one POS, so the chunking is a deterministic
//! function of a one-token window. Label noise flips the in-chunk membership
//! of random tokens before runs are collected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ChunkSpan, Corpus, Sentence, Token};

pub const CHUNK_POS: [&str; 3] = ["DT", "JJ", "NN"];
pub const OTHER_POS: [&str; 5] = ["VB", "IN", "RB", "CC", "PU"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub sentences: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Vocabulary size per POS.
    pub words_per_pos: usize,
    /// Probability of flipping a token's chunk membership.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            sentences: 200,
            min_len: 4,
            max_len: 16,
            words_per_pos: 4,
            noise: 0.0,
            seed: 0,
        }
    }
}

pub fn generate(spec: &SyntheticSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // Separate stream: noisy and clean corpora share their tokens.
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let all_pos: Vec<&str> = CHUNK_POS.iter().chain(&OTHER_POS).copied().collect();
    let mut sentences = Vec::with_capacity(spec.sentences);
    for _ in 0..spec.sentences {
        let len = rng.gen_range(spec.min_len.max(1)..=spec.max_len.max(spec.min_len.max(1)));
        let mut tokens = Vec::with_capacity(len);
        let mut inside = Vec::with_capacity(len);
        for _ in 0..len {
            let pos = all_pos[rng.gen_range(0..all_pos.len())];
            let word = format!("{}{}", pos.to_ascii_lowercase(), rng.gen_range(0..spec.words_per_pos.max(1)));
            let mut member = CHUNK_POS.contains(&pos);
            if spec.noise > 0.0 && noise_rng.gen_bool(spec.noise) {
                member = !member;
            }
            tokens.push(Token { word, pos: pos.to_string() });
            inside.push(member);
        }
        sentences.push(Sentence::new(tokens, runs(&inside)).expect("runs are disjoint"));
    }
    Corpus::new(sentences)
}

fn runs(inside: &[bool]) -> Vec<ChunkSpan> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &m) in inside.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(ChunkSpan::new(s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(ChunkSpan::new(s, inside.len()));
    }
    out
}

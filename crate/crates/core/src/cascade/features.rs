//! Windowed feature vectors.
//!
//! Layout of one instance, in order:
//!
//! 1. words at offsets `-L..=R`,
//! 2. POS tags at offsets `-L..=R` (absent when words and tags are fused),
//! 3. for each predicted-tag run, its tags at offsets `-tL..=-1` then
//!    `1..=tR`. The focus token's own predicted tag is never a feature.
//!
//! Offsets that fall outside the sentence get `__L<d>__` or `__R<d>__`,
//! where `d` is the distance past the sentence edge.

use crate::cascade::{Pairing, Prediction, WindowSpec};
use crate::corpus::{Corpus, Token};
use crate::error::{Error, Result};
use crate::mbl::Instance;
use crate::representation::{Tag, TagScheme};

/// Placeholder for a position `offset` tokens away from `index` that falls
/// outside a sentence of length `len`.
pub fn sentinel(index: usize, offset: isize, len: usize) -> String {
    let pos = index as isize + offset;
    if pos < 0 {
        format!("__L{}__", -pos)
    } else {
        format!("__R{}__", pos as usize - len + 1)
    }
}

fn at(index: usize, offset: isize, len: usize) -> Option<usize> {
    let pos = index as isize + offset;
    (pos >= 0 && (pos as usize) < len).then_some(pos as usize)
}

fn offsets(win: WindowSpec) -> impl Iterator<Item = isize> {
    -(win.left as isize)..=win.right as isize
}

/// Number of features produced by [`push_word_pos`].
pub fn word_pos_arity(win: WindowSpec, pairing: Pairing) -> usize {
    let span = win.left + win.right + 1;
    match pairing {
        Pairing::Separate => 2 * span,
        Pairing::Fused => span,
    }
}

pub fn push_word_pos(tokens: &[Token], i: usize, win: WindowSpec, pairing: Pairing, out: &mut Vec<String>) {
    let n = tokens.len();
    match pairing {
        Pairing::Separate => {
            for o in offsets(win) {
                out.push(at(i, o, n).map_or_else(|| sentinel(i, o, n), |p| tokens[p].word.clone()));
            }
            for o in offsets(win) {
                out.push(at(i, o, n).map_or_else(|| sentinel(i, o, n), |p| tokens[p].pos.clone()));
            }
        }
        Pairing::Fused => {
            for o in offsets(win) {
                out.push(at(i, o, n).map_or_else(
                    || sentinel(i, o, n),
                    |p| format!("{} {}", tokens[p].word, tokens[p].pos),
                ));
            }
        }
    }
}

pub fn push_tags(tags: &[Tag], i: usize, tagwin: WindowSpec, out: &mut Vec<String>) {
    let n = tags.len();
    let left = (1..=tagwin.left as isize).rev().map(|d| -d);
    let right = 1..=tagwin.right as isize;
    for o in left.chain(right) {
        out.push(at(i, o, n).map_or_else(|| sentinel(i, o, n), |p| tags[p].as_str().to_string()));
    }
}

/// Feature vectors for every token of every sentence, with predicted-tag
/// blocks drawn from `runs` (one block per run).
pub fn feature_rows(
    sentences: &[&[Token]],
    win: WindowSpec,
    pairing: Pairing,
    tagwin: WindowSpec,
    runs: &[&Prediction],
) -> Result<Vec<Vec<String>>> {
    for run in runs {
        run.check_shape(sentences)?;
    }
    let arity = word_pos_arity(win, pairing) + runs.len() * (tagwin.left + tagwin.right);
    let mut rows = Vec::with_capacity(sentences.iter().map(|s| s.len()).sum());
    for (si, tokens) in sentences.iter().enumerate() {
        for i in 0..tokens.len() {
            let mut f = Vec::with_capacity(arity);
            push_word_pos(tokens, i, win, pairing, &mut f);
            for run in runs {
                push_tags(&run.tags[si], i, tagwin, &mut f);
            }
            rows.push(f);
        }
    }
    Ok(rows)
}

fn with_classes(corpus: &Corpus, scheme: TagScheme, rows: Vec<Vec<String>>) -> Vec<Instance> {
    let classes = corpus
        .sentences
        .iter()
        .flat_map(|s| s.tags(scheme).into_tags());
    rows.into_iter()
        .zip(classes)
        .map(|(f, c)| Instance::new(f, c.as_str()))
        .collect()
}

pub(crate) fn token_slices(corpus: &Corpus) -> Vec<&[Token]> {
    corpus.sentences.iter().map(|s| s.tokens.as_slice()).collect()
}

/// Word/POS window instances, one per token, classed by the gold tag.
pub fn make_stage1_instances(corpus: &Corpus, scheme: TagScheme, win: WindowSpec, pairing: Pairing) -> Vec<Instance> {
    let rows = feature_rows(&token_slices(corpus), win, pairing, WindowSpec::ZERO, &[])
        .expect("no prediction runs to mismatch");
    with_classes(corpus, scheme, rows)
}

/// Stage-1 features plus the surrounding tags predicted by a first cascade.
pub fn make_stage2_instances(
    corpus: &Corpus,
    scheme: TagScheme,
    win: WindowSpec,
    pairing: Pairing,
    stage1: &Prediction,
    tagwin: WindowSpec,
) -> Result<Vec<Instance>> {
    make_stage3_instances(corpus, scheme, win, pairing, tagwin, std::slice::from_ref(stage1))
}

/// Stage-1 features plus one surrounding-tag block per prediction run.
pub fn make_stage3_instances(
    corpus: &Corpus,
    scheme: TagScheme,
    win: WindowSpec,
    pairing: Pairing,
    tagwin: WindowSpec,
    runs: &[Prediction],
) -> Result<Vec<Instance>> {
    let refs: Vec<&Prediction> = runs.iter().collect();
    let rows = feature_rows(&token_slices(corpus), win, pairing, tagwin, &refs)?;
    Ok(with_classes(corpus, scheme, rows))
}

impl Prediction {
    pub(crate) fn check_shape(&self, sentences: &[&[Token]]) -> Result<()> {
        if self.tags.len() != sentences.len() {
            return Err(Error::arg(format!(
                "prediction covers {} sentences, corpus has {}",
                self.tags.len(),
                sentences.len()
            )));
        }
        for (si, (t, s)) in self.tags.iter().zip(sentences).enumerate() {
            if t.len() != s.len() {
                return Err(Error::arg(format!(
                    "sentence {si}: {} predicted tags for {} tokens",
                    t.len(),
                    s.len()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus_str;

    fn example() -> Corpus {
        let text = "In IN O\nearly JJ I\ntrading NN I\nin IN O\nHong NNP I\nKong NNP I\nMonday NNP B\n\
                    , , O\ngold NN I\nwas VBD O\nquoted VBN O\nat IN O\n$ $ I\n366.50 CD I\nan DT B\n\
                    ounce NN I\n. . O\n";
        parse_corpus_str(text, TagScheme::Iob1).unwrap()
    }

    #[test]
    fn stage1_layout_at_sentence_start() {
        let inst = make_stage1_instances(&example(), TagScheme::Iob1, WindowSpec::new(2, 1).unwrap(), Pairing::Separate);
        assert_eq!(inst.len(), 17);
        assert!(inst.iter().all(|i| i.features.len() == 8));
        assert_eq!(
            inst[0].features,
            ["__L2__", "__L1__", "In", "early", "__L2__", "__L1__", "IN", "JJ"]
        );
        assert_eq!(inst[0].class, "O");
        assert_eq!(inst[16].features[3], "__R1__");
        assert_eq!(inst[6].class, "B");
    }

    #[test]
    fn zero_window_is_focus_only() {
        let inst = make_stage1_instances(&example(), TagScheme::Iob2, WindowSpec::ZERO, Pairing::Separate);
        assert_eq!(inst[1].features, ["early", "JJ"]);
        let fused = make_stage1_instances(&example(), TagScheme::Iob2, WindowSpec::ZERO, Pairing::Fused);
        assert_eq!(fused[1].features, ["early JJ"]);
    }

    #[test]
    fn stage2_excludes_focus_tag() {
        let c = example();
        let pred = Prediction::gold(&c, TagScheme::Iob1);
        let s1 = make_stage1_instances(&c, TagScheme::Iob1, WindowSpec::new(1, 1).unwrap(), Pairing::Separate);
        let s2 = make_stage2_instances(
            &c,
            TagScheme::Iob1,
            WindowSpec::new(1, 1).unwrap(),
            Pairing::Separate,
            &pred,
            WindowSpec::new(1, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(s2[6].features.len(), s1[6].features.len() + 3);
        // Monday: left tag of Kong, right tags of "," and gold
        assert_eq!(&s2[6].features[6..], ["I", "O", "I"]);
        let same = make_stage2_instances(&c, TagScheme::Iob1, WindowSpec::new(1, 1).unwrap(), Pairing::Separate, &pred, WindowSpec::ZERO).unwrap();
        assert_eq!(same, s1);
    }

    #[test]
    fn stage3_repeats_tag_block_per_run() {
        let c = example();
        let pred = Prediction::gold(&c, TagScheme::Iob1);
        let runs = vec![pred.clone(), pred.clone(), pred.clone(), pred];
        let s3 = make_stage3_instances(&c, TagScheme::Iob1, WindowSpec::new(3, 3).unwrap(), Pairing::Separate, WindowSpec::new(1, 1).unwrap(), &runs).unwrap();
        assert_eq!(s3[0].features.len(), 14 + 8);
        let none = make_stage3_instances(&c, TagScheme::Iob1, WindowSpec::new(3, 3).unwrap(), Pairing::Separate, WindowSpec::new(1, 1).unwrap(), &[]).unwrap();
        assert_eq!(none, make_stage1_instances(&c, TagScheme::Iob1, WindowSpec::new(3, 3).unwrap(), Pairing::Separate));
    }

    #[test]
    fn prediction_shape_is_checked() {
        let c = example();
        let mut pred = Prediction::gold(&c, TagScheme::Iob1);
        pred.tags[0].pop();
        assert!(make_stage2_instances(&c, TagScheme::Iob1, WindowSpec::ZERO, Pairing::Separate, &pred, WindowSpec::new(1, 0).unwrap()).is_err());
    }
}

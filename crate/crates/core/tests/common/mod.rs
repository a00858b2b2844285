//! Test-only oracles and random generators. Nothing here calls into the
//! implementation paths it is used to check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use npchunk::{ChunkSpan, Instance, Tag};
use rand::Rng;

/// Random sorted, disjoint chunking of a `len`-token sentence, including
/// adjacent chunks.
pub fn random_chunking<R: Rng>(rng: &mut R, len: usize) -> Vec<ChunkSpan> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < len {
        if rng.gen_bool(0.45) {
            let max = (len - i).min(5);
            let l = rng.gen_range(1..=max);
            out.push(ChunkSpan::new(i, i + l));
            i += l;
        } else {
            i += 1;
        }
    }
    out
}

/// Every window `[i, j]` where `i` has `[`, `j` has `]`, and no other
/// bracket is assigned to any word of the window.
pub fn bracket_windows(open: &[Tag], close: &[Tag]) -> Vec<ChunkSpan> {
    let n = open.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if open[i] != Tag::Open || close[j] != Tag::Close {
                continue;
            }
            let mut brackets = 0;
            for p in i..=j {
                if open[p] == Tag::Open {
                    brackets += 1;
                }
                if close[p] == Tag::Close {
                    brackets += 1;
                }
            }
            // exactly the opening and the closing bracket
            if brackets == 2 {
                out.push(ChunkSpan::new(i, j + 1));
            }
        }
    }
    out
}

/// Literal IOB2 reading: `B` starts a chunk, `I` continues one or starts
/// one after `O`/sentence start.
pub fn read_iob2(tags: &[Tag]) -> Vec<ChunkSpan> {
    let mut chunks: Vec<ChunkSpan> = Vec::new();
    for (i, &t) in tags.iter().enumerate() {
        let continues = i > 0 && tags[i - 1] != Tag::O && t == Tag::I;
        match t {
            Tag::O => {}
            _ if continues => chunks.last_mut().unwrap().end = i + 1,
            _ => chunks.push(ChunkSpan::new(i, i + 1)),
        }
    }
    chunks
}

/// Literal IOE2 reading, right to left: `E` ends a chunk, `I` continues one
/// or ends one before `O`/sentence end.
pub fn read_ioe2(tags: &[Tag]) -> Vec<ChunkSpan> {
    let n = tags.len();
    let mut chunks: Vec<ChunkSpan> = Vec::new();
    for i in (0..n).rev() {
        let t = tags[i];
        let continues = i + 1 < n && tags[i + 1] != Tag::O && t == Tag::I;
        match t {
            Tag::O => {}
            _ if continues => chunks.last_mut().unwrap().start = i,
            _ => chunks.push(ChunkSpan::new(i, i + 1)),
        }
    }
    chunks.reverse();
    chunks
}

/// Merges chunks that touch.
pub fn merge_adjacent(chunks: &[ChunkSpan]) -> Vec<ChunkSpan> {
    let mut out: Vec<ChunkSpan> = Vec::new();
    for c in chunks {
        match out.last_mut() {
            Some(last) if last.end == c.start => last.end = c.end,
            _ => out.push(*c),
        }
    }
    out
}

fn entropy_of(counts: &BTreeMap<&str, f64>) -> f64 {
    let total: f64 = counts.values().sum();
    counts
        .values()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.ln() / std::f64::consts::LN_2
        })
        .sum()
}

/// Brute-force information gain (`ratio = false`) or gain ratio.
pub fn entropy_oracle(instances: &[Instance], ratio: bool) -> Vec<f64> {
    let n = instances.len() as f64;
    let mut class_counts: BTreeMap<&str, f64> = BTreeMap::new();
    for inst in instances {
        *class_counts.entry(&inst.class).or_default() += 1.0;
    }
    let h = entropy_of(&class_counts);
    let arity = instances[0].features.len();
    (0..arity)
        .map(|f| {
            let mut per_value: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
            for inst in instances {
                *per_value
                    .entry(&inst.features[f])
                    .or_default()
                    .entry(&inst.class)
                    .or_default() += 1.0;
            }
            if per_value.len() == 1 {
                return 0.0;
            }
            let mut remainder = 0.0;
            let mut split = 0.0;
            for counts in per_value.values() {
                let p = counts.values().sum::<f64>() / n;
                remainder += p * entropy_of(counts);
                split -= p * p.ln() / std::f64::consts::LN_2;
            }
            let gain = (h - remainder).max(0.0);
            if ratio {
                gain / split
            } else {
                gain
            }
        })
        .collect()
}

/// Sort every training instance by distance, keep the `k` smallest distinct
/// distances, vote, break ties by global class frequency then label.
pub fn knn_oracle(instances: &[Instance], weights: &[f64], query: &[String], k: usize) -> String {
    let mut scored: Vec<(f64, &str)> = instances
        .iter()
        .map(|inst| {
            let mut d = 0.0;
            for (f, w) in inst.features.iter().zip(query).zip(weights).map(|((a, b), w)| (a != b, *w)) {
                if f {
                    d += w;
                }
            }
            (d, inst.class.as_str())
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut distinct: Vec<f64> = scored.iter().map(|s| s.0).collect();
    distinct.dedup();
    let cutoff = distinct[(k - 1).min(distinct.len() - 1)];
    let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
    for (d, c) in &scored {
        if *d <= cutoff {
            *votes.entry(c).or_default() += 1;
        }
    }
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for inst in instances {
        *freq.entry(&inst.class).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = votes.into_iter().collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(freq[b.0].cmp(&freq[a.0]))
            .then(a.0.cmp(b.0))
    });
    ranked[0].0.to_string()
}

/// Random small instance base over a tiny alphabet so that ties abound.
pub fn random_base<R: Rng>(rng: &mut R, max_n: usize, max_arity: usize, max_values: usize) -> Vec<Instance> {
    let n = rng.gen_range(1..=max_n);
    let arity = rng.gen_range(1..=max_arity);
    let values = rng.gen_range(1..=max_values);
    let classes = ["A", "B", "C"];
    let n_classes = rng.gen_range(1..=3);
    (0..n)
        .map(|_| {
            let f = (0..arity).map(|_| format!("v{}", rng.gen_range(0..values))).collect();
            Instance::new(f, classes[rng.gen_range(0..n_classes)])
        })
        .collect()
}

/// Word/POS/tag window oracle: builds the feature vector of token `i` by
/// direct indexing.
#[allow(clippy::too_many_arguments)]
pub fn naive_window(
    words: &[&str],
    pos: &[&str],
    runs: &[Vec<&str>],
    i: usize,
    l: usize,
    r: usize,
    tl: usize,
    tr: usize,
) -> Vec<String> {
    let n = words.len() as isize;
    let get = |seq: &[&str], o: isize| -> String {
        let p = i as isize + o;
        if p < 0 {
            format!("__L{}__", -p)
        } else if p >= n {
            format!("__R{}__", p - n + 1)
        } else {
            seq[p as usize].to_string()
        }
    };
    let mut out = Vec::new();
    for o in -(l as isize)..=r as isize {
        out.push(get(words, o));
    }
    for o in -(l as isize)..=r as isize {
        out.push(get(pos, o));
    }
    for run in runs {
        for o in -(tl as isize)..=tr as isize {
            if o != 0 {
                out.push(get(run, o));
            }
        }
    }
    out
}

//! IB1-IG memory-based learning.
//!
//! Training stores every instance verbatim. Distances are weighted overlap:
//! each mismatching feature contributes its information-gain weight. The
//! classifier collects every stored instance lying at one of the `k`
//! smallest distinct distances from the query (the `k` nearest "shells")
//! and returns the majority class among them.
//!
//! Vote ties go to the class that is more frequent in the training data,
//! then to the lexicographically smallest label, so the result never depends
//! on instance order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Feature-weighting variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Plain information gain.
    Gain,
    /// Information gain divided by the feature's split info.
    #[default]
    GainRatio,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gain" | "ig" => Ok(Weighting::Gain),
            "gainratio" | "gr" => Ok(Weighting::GainRatio),
            _ => Err(Error::arg(format!("unknown weighting `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub features: Vec<String>,
    pub class: String,
}

impl Instance {
    pub fn new(features: Vec<String>, class: impl Into<String>) -> Self {
        Instance {
            features,
            class: class.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights(Vec<f64>);

impl FeatureWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::arg(format!("feature weight {w} is not a finite non-negative number")));
        }
        Ok(FeatureWeights(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

const UNKNOWN: u32 = u32::MAX;

#[derive(Debug, Clone, Default)]
struct Interner {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(s.to_string(), id);
        self.names.push(s.to_string());
        id
    }

    fn get(&self, s: &str) -> u32 {
        self.ids.get(s).copied().unwrap_or(UNKNOWN)
    }
}

/// Training instances with symbol tables and class statistics.
///
/// Identical feature vectors are additionally grouped into exemplars that
/// carry per-class counts. Every member of a group sits at the same distance
/// from any query, so scanning exemplars is equivalent to scanning all
/// instances.
#[derive(Debug, Clone)]
pub struct InstanceBase {
    arity: usize,
    symbols: Interner,
    classes: Interner,
    /// Row-major `len × arity` symbol ids.
    features: Vec<u32>,
    labels: Vec<u32>,
    class_counts: Vec<usize>,
    /// Class ids ordered by descending frequency, then ascending label.
    class_rank: Vec<usize>,
    exemplars: Vec<u32>,
    /// Row-major `exemplar × class` counts.
    exemplar_votes: Vec<u32>,
}

impl InstanceBase {
    pub fn from_instances(instances: &[Instance]) -> Result<Self> {
        let first = instances
            .first()
            .ok_or_else(|| Error::arg("cannot build an instance base from zero instances"))?;
        let arity = first.features.len();
        let mut symbols = Interner::default();
        let mut classes = Interner::default();
        let mut features = Vec::with_capacity(instances.len() * arity);
        let mut labels = Vec::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            if inst.features.len() != arity {
                return Err(Error::arg(format!(
                    "instance {i} has {} features, expected {arity}",
                    inst.features.len()
                )));
            }
            features.extend(inst.features.iter().map(|f| symbols.intern(f)));
            labels.push(classes.intern(&inst.class));
        }

        let n_classes = classes.names.len();
        let mut class_counts = vec![0usize; n_classes];
        for &l in &labels {
            class_counts[l as usize] += 1;
        }
        let mut class_rank_order: Vec<usize> = (0..n_classes).collect();
        class_rank_order.sort_by(|&a, &b| {
            class_counts[b]
                .cmp(&class_counts[a])
                .then_with(|| classes.names[a].cmp(&classes.names[b]))
        });
        let mut class_rank = vec![0; n_classes];
        for (rank, &c) in class_rank_order.iter().enumerate() {
            class_rank[c] = rank;
        }

        let mut exemplars = Vec::new();
        let mut exemplar_votes: Vec<u32> = Vec::new();
        if arity == 0 {
            // every instance is the same empty vector
            exemplar_votes = class_counts.iter().map(|&c| c as u32).collect();
        } else {
            let mut groups: HashMap<&[u32], usize> = HashMap::new();
            for (row, &label) in features.chunks_exact(arity).zip(&labels) {
                let next = groups.len();
                let g = *groups.entry(row).or_insert(next);
                if g == next {
                    exemplars.extend_from_slice(row);
                    exemplar_votes.resize(exemplar_votes.len() + n_classes, 0);
                }
                exemplar_votes[g * n_classes + label as usize] += 1;
            }
        }

        Ok(InstanceBase {
            arity,
            symbols,
            classes,
            features,
            labels,
            class_counts,
            class_rank,
            exemplars,
            exemplar_votes,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of distinct feature vectors.
    pub fn exemplar_count(&self) -> usize {
        self.exemplar_votes.len() / self.classes.names.len().max(1)
    }

    pub fn class_frequencies(&self) -> Vec<(&str, usize)> {
        let mut out: Vec<(&str, usize)> = self
            .classes
            .names
            .iter()
            .map(String::as_str)
            .zip(self.class_counts.iter().copied())
            .collect();
        out.sort();
        out
    }

    pub fn instance(&self, i: usize) -> Instance {
        let row = &self.features[i * self.arity..(i + 1) * self.arity];
        Instance {
            features: row.iter().map(|&s| self.symbols.names[s as usize].clone()).collect(),
            class: self.classes.names[self.labels[i] as usize].clone(),
        }
    }

    pub fn instances(&self) -> impl Iterator<Item = Instance> + '_ {
        (0..self.len()).map(move |i| self.instance(i))
    }

    fn encode_query<S: AsRef<str>>(&self, query: &[S]) -> Result<Vec<u32>> {
        if query.len() != self.arity {
            return Err(Error::arg(format!(
                "query has {} features, base arity is {}",
                query.len(),
                self.arity
            )));
        }
        Ok(query.iter().map(|q| self.symbols.get(q.as_ref())).collect())
    }
}

fn entropy(counts: impl IntoIterator<Item = usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Per-feature information gain (or gain ratio) over the base's classes.
///
/// A feature with a single observed value gets weight 0.
pub fn information_gain(base: &InstanceBase, weighting: Weighting) -> Result<FeatureWeights> {
    if base.is_empty() {
        return Err(Error::arg("information gain of an empty base"));
    }
    let n = base.len();
    let n_classes = base.classes.names.len();
    let class_entropy = entropy(base.class_counts.iter().copied(), n);
    let mut weights = Vec::with_capacity(base.arity);
    for f in 0..base.arity {
        let mut by_value: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, &label) in base.labels.iter().enumerate() {
            let v = base.features[i * base.arity + f];
            by_value.entry(v).or_insert_with(|| vec![0; n_classes])[label as usize] += 1;
        }
        if by_value.len() < 2 {
            weights.push(0.0);
            continue;
        }
        let mut conditional = 0.0;
        let mut split_info = 0.0;
        for counts in by_value.values() {
            let nv: usize = counts.iter().sum();
            let pv = nv as f64 / n as f64;
            conditional += pv * entropy(counts.iter().copied(), nv);
            split_info -= pv * pv.log2();
        }
        let gain = (class_entropy - conditional).max(0.0);
        let w = match weighting {
            Weighting::Gain => gain,
            Weighting::GainRatio if split_info > 0.0 => gain / split_info,
            Weighting::GainRatio => 0.0,
        };
        weights.push(w);
    }
    FeatureWeights::new(weights)
}

/// Weighted overlap distance.
pub fn distance<S: AsRef<str>>(a: &[S], b: &[S], weights: &FeatureWeights) -> Result<f64> {
    if a.len() != b.len() || a.len() != weights.len() {
        return Err(Error::arg(format!(
            "arity mismatch: {} vs {} with {} weights",
            a.len(),
            b.len(),
            weights.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .zip(weights.as_slice())
        .filter(|((x, y), _)| x.as_ref() != y.as_ref())
        .map(|(_, w)| *w)
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub label: String,
    /// Per-class vote counts within the selected shells, sorted by label.
    pub votes: Vec<(String, usize)>,
}

/// Classifies `query` against the `k` nearest distance shells.
pub fn classify<S: AsRef<str>>(
    base: &InstanceBase,
    weights: &FeatureWeights,
    query: &[S],
    k: usize,
) -> Result<Classification> {
    if k < 1 {
        return Err(Error::arg("k must be at least 1"));
    }
    if base.is_empty() {
        return Err(Error::arg("cannot classify against an empty base"));
    }
    if weights.len() != base.arity {
        return Err(Error::arg(format!(
            "{} weights for a base of arity {}",
            weights.len(),
            base.arity
        )));
    }
    let q = base.encode_query(query)?;
    let votes = nearest_votes(base, weights.as_slice(), &q, k);
    let best = (0..votes.len())
        .filter(|&c| votes[c] > 0)
        .max_by(|&a, &b| {
            votes[a]
                .cmp(&votes[b])
                .then_with(|| base.class_rank[b].cmp(&base.class_rank[a]))
        })
        .expect("at least one exemplar votes");
    let mut dist: Vec<(String, usize)> = votes
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(c, &v)| (base.classes.names[c].clone(), v))
        .collect();
    dist.sort();
    Ok(Classification {
        label: base.classes.names[best].clone(),
        votes: dist,
    })
}

/// Summed class votes over the `k` nearest shells.
fn nearest_votes(base: &InstanceBase, weights: &[f64], query: &[u32], k: usize) -> Vec<usize> {
    let arity = base.arity;
    let n_classes = base.classes.names.len();
    // (distance, per-class votes), ascending, at most k entries
    let mut shells: Vec<(f64, Vec<usize>)> = Vec::with_capacity(k + 1);
    let n_exemplars = base.exemplar_count();
    for e in 0..n_exemplars {
        let row = &base.exemplars[e * arity..(e + 1) * arity];
        let bound = if shells.len() == k { shells[k - 1].0 } else { f64::INFINITY };
        let mut d = 0.0;
        let mut abandoned = false;
        for ((&x, &y), &w) in row.iter().zip(query).zip(weights) {
            if x != y {
                d += w;
                if d > bound {
                    abandoned = true;
                    break;
                }
            }
        }
        if abandoned {
            continue;
        }
        let ev = &base.exemplar_votes[e * n_classes..(e + 1) * n_classes];
        let pos = shells.partition_point(|(sd, _)| *sd < d);
        if pos < shells.len() && shells[pos].0 == d {
            for (acc, &v) in shells[pos].1.iter_mut().zip(ev) {
                *acc += v as usize;
            }
        } else if pos < k {
            shells.insert(pos, (d, ev.iter().map(|&v| v as usize).collect()));
            shells.truncate(k);
        }
    }
    let mut total = vec![0usize; n_classes];
    for (_, v) in &shells {
        for (acc, &x) in total.iter_mut().zip(v) {
            *acc += x;
        }
    }
    total
}

/// Stores every instance and computes its feature weights.
pub fn train(instances: &[Instance], weighting: Weighting) -> Result<(InstanceBase, FeatureWeights)> {
    let base = InstanceBase::from_instances(instances)?;
    let weights = information_gain(&base, weighting)?;
    Ok((base, weights))
}

/// A trained base together with its weights.
#[derive(Debug, Clone)]
pub struct Model {
    pub base: InstanceBase,
    pub weights: FeatureWeights,
}

impl Model {
    pub fn train(instances: &[Instance], weighting: Weighting) -> Result<Self> {
        let (base, weights) = train(instances, weighting)?;
        Ok(Model { base, weights })
    }

    pub fn classify<S: AsRef<str>>(&self, query: &[S], k: usize) -> Result<Classification> {
        classify(&self.base, &self.weights, query, k)
    }

    /// Labels for many queries. Output order follows input order.
    pub fn classify_batch<Q>(&self, queries: &[Q], k: usize, exec: Execution) -> Result<Vec<String>>
    where
        Q: AsRef<[String]> + Sync,
    {
        par::map(exec, queries, |q| self.classify(q.as_ref(), k).map(|c| c.label))
            .into_iter()
            .collect()
    }

    /// Writes the base in the line-oriented dump format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ARITY k={}", self.base.arity);
        for inst in self.base.instances() {
            for f in &inst.features {
                out.push_str(f);
                out.push('\t');
            }
            out.push_str(&inst.class);
            out.push('\n');
        }
        out.push_str("WEIGHTS");
        for w in self.weights.as_slice() {
            let _ = write!(out, " {w:.11e}");
        }
        out.push('\n');
        out
    }

    /// Reads a dump written by [`Model::dump`]. Weights are taken from the
    /// file, not recomputed.
    pub fn load<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let parse_err = |line: usize, message: String| Error::Parse { line: line + 1, message };
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty model file".into()))?;
        let header = header?;
        let arity: usize = header
            .strip_prefix("ARITY k=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| parse_err(0, format!("bad header `{header}`")))?;
        let mut instances = Vec::new();
        let mut weights = None;
        for (i, line) in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("WEIGHTS") {
                let ws = rest
                    .split_whitespace()
                    .map(|w| w.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| parse_err(i, format!("bad weight: {e}")))?;
                if ws.len() != arity {
                    return Err(parse_err(i, format!("{} weights for arity {arity}", ws.len())));
                }
                weights = Some(FeatureWeights::new(ws).map_err(|e| parse_err(i, e.to_string()))?);
                continue;
            }
            let mut cols: Vec<String> = line.split('\t').map(str::to_string).collect();
            if cols.len() != arity + 1 {
                return Err(parse_err(i, format!("expected {} tab-separated fields", arity + 1)));
            }
            let class = cols.pop().expect("non-empty");
            instances.push(Instance::new(cols, class));
        }
        let weights = weights.ok_or_else(|| parse_err(0, "missing WEIGHTS line".into()))?;
        let base = InstanceBase::from_instances(&instances)?;
        Ok(Model { base, weights })
    }
}

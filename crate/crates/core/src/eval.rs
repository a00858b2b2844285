//! Chunk-level precision, recall and F-beta; tag-level accuracy.

use std::collections::HashSet;
use std::fmt;

use crate::corpus::ChunkSpan;
use crate::error::{Error, Result};
use crate::representation::TagSequence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkScore {
    /// Fraction of correct tags. `None` for partial-scheme pairs.
    pub accuracy: Option<f64>,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    pub found: usize,
    pub correct: usize,
    pub gold: usize,
}

impl ChunkScore {
    pub fn with_accuracy(mut self, accuracy: f64) -> Self {
        self.accuracy = Some(accuracy);
        self
    }

    /// F-beta on the percent scale, as printed in reports.
    pub fn f_percent(&self) -> f64 {
        100.0 * self.f_beta
    }
}

/// `accuracy=<x>% precision=<x>% recall=<x>% f<beta>=<x>`, two decimals.
impl fmt::Display for ChunkScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.accuracy {
            Some(a) => write!(f, "accuracy={:.2}%", 100.0 * a)?,
            None => f.write_str("accuracy=-")?,
        }
        write!(
            f,
            " precision={:.2}% recall={:.2}% f{}={:.2}",
            100.0 * self.precision,
            100.0 * self.recall,
            self.beta,
            100.0 * self.f_beta
        )
    }
}

/// `(1 + β²)·P·R / (β²·P + R)`, or 0 when the denominator vanishes.
pub fn f_measure(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

/// Scores predicted chunks against gold chunks, sentence by sentence. A
/// prediction is correct only when a gold chunk has the same boundaries.
pub fn score_chunks(gold: &[Vec<ChunkSpan>], pred: &[Vec<ChunkSpan>], beta: f64) -> Result<ChunkScore> {
    if gold.len() != pred.len() {
        return Err(Error::arg(format!(
            "{} gold sentences but {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::arg(format!("beta must be positive, got {beta}")));
    }
    let (mut n_gold, mut found, mut correct) = (0, 0, 0);
    for (g, p) in gold.iter().zip(pred) {
        let gs: HashSet<&ChunkSpan> = g.iter().collect();
        let ps: HashSet<&ChunkSpan> = p.iter().collect();
        n_gold += gs.len();
        found += ps.len();
        correct += ps.intersection(&gs).count();
    }
    if n_gold == 0 && found == 0 {
        log::warn!("scoring a test set without gold or predicted chunks; F is reported as 0");
    }
    let precision = if found == 0 { 0.0 } else { correct as f64 / found as f64 };
    let recall = if n_gold == 0 { 0.0 } else { correct as f64 / n_gold as f64 };
    Ok(ChunkScore {
        accuracy: None,
        precision,
        recall,
        f_beta: f_measure(precision, recall, beta),
        beta,
        found,
        correct,
        gold: n_gold,
    })
}

/// Fraction of positions where predicted and gold tags agree.
pub fn score_tags(gold: &[TagSequence], pred: &[TagSequence]) -> Result<f64> {
    if gold.len() != pred.len() {
        return Err(Error::arg(format!(
            "{} gold sequences but {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let (mut total, mut same) = (0usize, 0usize);
    for (g, p) in gold.iter().zip(pred) {
        for s in [g.scheme(), p.scheme()] {
            if !s.is_complete() {
                return Err(Error::UnsupportedScheme(s));
            }
        }
        if g.scheme() != p.scheme() || g.len() != p.len() {
            return Err(Error::arg(format!(
                "cannot compare {} tags ({}) with {} tags ({})",
                g.len(),
                g.scheme(),
                p.len(),
                p.scheme()
            )));
        }
        total += g.len();
        same += g.tags().iter().zip(p.tags()).filter(|(a, b)| a == b).count();
    }
    Ok(if total == 0 { 0.0 } else { same as f64 / total as f64 })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::TagScheme;

    fn spans(v: &[(usize, usize)]) -> Vec<ChunkSpan> {
        v.iter().map(|&(s, e)| ChunkSpan::new(s, e)).collect()
    }

    #[test]
    fn published_f_values() {
        assert_eq!(format!("{:.2}", 100.0 * f_measure(0.9250, 0.9225, 1.0)), "92.37");
        assert_eq!(format!("{:.2}", 100.0 * f_measure(0.9180, 0.9227, 1.0)), "92.03");
        assert!((f_measure(0.7, 0.7, 1.0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn counts_exact_boundary_matches() {
        let gold = vec![spans(&[(0, 2), (3, 4)]), spans(&[(1, 3)])];
        let pred = vec![spans(&[(0, 2), (3, 5)]), spans(&[])];
        let s = score_chunks(&gold, &pred, 1.0).unwrap();
        assert_eq!((s.found, s.correct, s.gold), (2, 1, 3));
        assert_eq!(s.precision, 0.5);
        assert!((s.recall - 1.0 / 3.0).abs() < 1e-15);
        let swapped = score_chunks(&pred, &gold, 1.0).unwrap();
        assert_eq!(swapped.precision, s.recall);
        assert_eq!(swapped.recall, s.precision);
    }

    #[test]
    fn empty_sets_score_zero() {
        let s = score_chunks(&[vec![]], &[vec![]], 1.0).unwrap();
        assert_eq!(s.f_beta, 0.0);
        assert!(score_chunks(&[vec![]], &[], 1.0).is_err());
    }

    #[test]
    fn report_format() {
        let s = ChunkScore {
            accuracy: Some(0.9758),
            precision: 0.925,
            recall: 0.9225,
            f_beta: f_measure(0.925, 0.9225, 1.0),
            beta: 1.0,
            found: 0,
            correct: 0,
            gold: 0,
        };
        assert_eq!(s.to_string(), "accuracy=97.58% precision=92.50% recall=92.25% f1=92.37");
        let s = ChunkScore { accuracy: None, beta: 0.5, ..s };
        assert!(s.to_string().starts_with("accuracy=- "));
        assert!(s.to_string().contains(" f0.5="));
    }

    #[test]
    fn tag_accuracy() {
        let g = TagSequence::parse(TagScheme::Iob1, "O I I O I I B O I O O O I I B I O").unwrap();
        let p = TagSequence::parse(TagScheme::Iob1, "O I I O I I I O I O O O I I B I O").unwrap();
        assert_eq!(score_tags(std::slice::from_ref(&g), std::slice::from_ref(&g)).unwrap(), 1.0);
        assert_eq!(score_tags(std::slice::from_ref(&g), &[p]).unwrap(), 16.0 / 17.0);
        let io = TagSequence::parse(TagScheme::Io, "O").unwrap();
        assert!(matches!(score_tags(std::slice::from_ref(&io), std::slice::from_ref(&io)), Err(Error::UnsupportedScheme(_))));
    }

    #[test]
    fn fold_statistics() {
        let (m, s) = mean_std(&[90.0, 91.0, 92.0, 89.0, 88.0]);
        assert!((m - 90.0).abs() < 1e-12);
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[3.0; 5]).1, 0.0);
    }
}

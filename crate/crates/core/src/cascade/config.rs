//! Line-oriented `key=value` experiment configuration.
//!
//! ```text
//! # IOB1, word/POS 3/3, tags 1/1 from four first-cascade runs
//! scheme=iob1
//! L=3
//! R=3
//! tag_L=1
//! tag_R=1
//! combos=0/0(1);1/1(1);2/2(3);3/3(3)
//! k=3
//! ```
//!
//! Paired targets take one value per classifier joined by `+`
//! (`scheme=open+io`, `L=2+1`, `combos=-+0/1;1/2`); a single value applies to
//! both. `-` stands for an empty combination list. Lines starting with `#`
//! are comments.

use std::fmt;
use std::str::FromStr;

use super::{ClassifierConfig, CombinationRun, Pairing, StageConfig, StageInput, Target, WindowSpec};
use crate::error::{Error, Result};
use crate::mbl::Weighting;

impl FromStr for StageInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "crosstag" => Ok(StageInput::CrossTag),
            "gold" => Ok(StageInput::Gold),
            "selftag" => Ok(StageInput::SelfTag),
            _ => Err(Error::arg(format!("unknown stage_input `{s}`"))),
        }
    }
}

impl fmt::Display for StageInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageInput::CrossTag => "crosstag",
            StageInput::Gold => "gold",
            StageInput::SelfTag => "selftag",
        })
    }
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "separate" => Ok(Pairing::Separate),
            "fused" => Ok(Pairing::Fused),
            _ => Err(Error::arg(format!("unknown pairing `{s}`"))),
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::Separate => "separate",
            Pairing::Fused => "fused",
        })
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Gain => "gain",
            Weighting::GainRatio => "gainratio",
        })
    }
}

#[derive(Default)]
struct Sides {
    left: Option<(usize, Vec<usize>)>,
    right: Option<(usize, Vec<usize>)>,
    tag_left: Option<(usize, Vec<usize>)>,
    tag_right: Option<(usize, Vec<usize>)>,
    combos: Option<(usize, Vec<Vec<CombinationRun>>)>,
    k: Option<(usize, Vec<usize>)>,
}

fn split_sides<T>(line: usize, value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<(usize, Vec<T>)> {
    let vals = value
        .split('+')
        .map(|v| parse(v.trim()))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config {
            line,
            message: e.to_string(),
        })?;
    Ok((line, vals))
}

fn parse_count(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::arg(format!("`{s}` is not a count")))
}

fn parse_combos(s: &str) -> Result<Vec<CombinationRun>> {
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

fn pick<T: Clone>(field: &Option<(usize, Vec<T>)>, side: usize, sides: usize, default: T) -> Result<T> {
    match field {
        None => Ok(default),
        Some((_, v)) if v.len() == 1 => Ok(v[0].clone()),
        Some((_, v)) if v.len() == sides => Ok(v[side].clone()),
        Some((line, v)) => Err(Error::Config {
            line: *line,
            message: format!("{} values given for {sides} classifier(s)", v.len()),
        }),
    }
}

impl StageConfig {
    /// Parses the `key=value` configuration format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut target = None;
        let mut sides = Sides::default();
        let mut cfg = StageConfig::single(super::TagScheme::Iob1, ClassifierConfig::default());
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected key=value, got `{content}`"),
            })?;
            let value = value.trim();
            let wrap = |e: Error| Error::Config {
                line,
                message: e.to_string(),
            };
            match key.trim().to_ascii_lowercase().as_str() {
                "scheme" => target = Some(value.parse::<Target>().map_err(wrap)?),
                "l" => sides.left = Some(split_sides(line, value, parse_count)?),
                "r" => sides.right = Some(split_sides(line, value, parse_count)?),
                "tag_l" => sides.tag_left = Some(split_sides(line, value, parse_count)?),
                "tag_r" => sides.tag_right = Some(split_sides(line, value, parse_count)?),
                "combos" => sides.combos = Some(split_sides(line, value, parse_combos)?),
                "k" => sides.k = Some(split_sides(line, value, parse_count)?),
                "weighting" => cfg.weighting = value.parse().map_err(wrap)?,
                "stage_input" => cfg.stage_input = value.parse().map_err(wrap)?,
                "pairing" => cfg.pairing = value.parse().map_err(wrap)?,
                "folds" => cfg.folds = parse_count(value).map_err(wrap)?,
                "seed" => cfg.seed = Some(value.parse().map_err(|_| wrap(Error::arg(format!("bad seed `{value}`"))))?),
                other => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        cfg.target = target.ok_or(Error::Config {
            line: 0,
            message: "missing `scheme`".into(),
        })?;
        let n = cfg.target.schemes().len();
        let d = ClassifierConfig::default();
        cfg.classifiers = (0..n)
            .map(|i| {
                let window_at = |l: &Option<(usize, Vec<usize>)>,
                                 r: &Option<(usize, Vec<usize>)>,
                                 default: WindowSpec|
                 -> Result<WindowSpec> {
                    let left = pick(l, i, n, default.left)?;
                    let right = pick(r, i, n, default.right)?;
                    WindowSpec::new(left, right).map_err(|e| Error::Config {
                        line: l.as_ref().or(r.as_ref()).map_or(0, |x| x.0),
                        message: e.to_string(),
                    })
                };
                let k = pick(&sides.k, i, n, d.k)?;
                if k == 0 {
                    return Err(Error::Config {
                        line: sides.k.as_ref().map_or(0, |x| x.0),
                        message: "k must be at least 1".into(),
                    });
                }
                Ok(ClassifierConfig {
                    window: window_at(&sides.left, &sides.right, d.window)?,
                    tag_window: window_at(&sides.tag_left, &sides.tag_right, WindowSpec::ZERO)?,
                    combinations: pick(&sides.combos, i, n, Vec::new())?,
                    k,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        cfg.validate().map_err(|e| Error::Config {
            line: 0,
            message: e.to_string(),
        })?;
        Ok(cfg)
    }
}

/// Writes the configuration back in the file format.
impl fmt::Display for StageConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |g: &dyn Fn(&ClassifierConfig) -> String| -> String {
            self.classifiers.iter().map(g).collect::<Vec<_>>().join("+")
        };
        writeln!(f, "scheme={}", self.target)?;
        writeln!(f, "L={}", join(&|c| c.window.left.to_string()))?;
        writeln!(f, "R={}", join(&|c| c.window.right.to_string()))?;
        writeln!(f, "tag_L={}", join(&|c| c.tag_window.left.to_string()))?;
        writeln!(f, "tag_R={}", join(&|c| c.tag_window.right.to_string()))?;
        writeln!(
            f,
            "combos={}",
            join(&|c| {
                if c.combinations.is_empty() {
                    "-".to_string()
                } else {
                    c.combinations.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
                }
            })
        )?;
        writeln!(f, "k={}", join(&|c| c.k.to_string()))?;
        writeln!(f, "weighting={}", self.weighting)?;
        writeln!(f, "stage_input={}", self.stage_input)?;
        writeln!(f, "pairing={}", self.pairing)?;
        writeln!(f, "folds={}", self.folds)?;
        if let Some(seed) = self.seed {
            writeln!(f, "seed={seed}")?;
        }
        Ok(())
    }
}

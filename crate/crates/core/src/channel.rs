//! Erasure-channel simulation over symbol positions.
//!
//! Pattern text is whitespace separated:
//! `20* 42v 14* 8v [cyclic]`, `iid 0.1 seed=7` (or `0.1 iid seed=7`),
//! or `mask FILE` where FILE uses the stream format and only `?` matters.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::ErasureStream;
use crate::error::{Error, Result};

/// Generator used by the i.i.d. mode, as recorded in reports.
pub const IID_PRNG: &str = "ChaCha8Rng::seed_from_u64, one f64 draw per symbol";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Run {
    pub count: usize,
    pub erased: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PatternSpec {
    /// Run-length tokens, applied once from symbol 0 or repeated.
    Runs { runs: Vec<Run>, cyclic: bool },
    /// Each symbol erased independently with probability `eps`.
    Iid { eps: f64, seed: u64 },
    /// Explicit per-symbol flags, true where erased.
    Mask { mask: Vec<bool> },
}

impl PatternSpec {
    /// Per-symbol erasure flags for a stream of `len` positions.
    pub fn flags(&self, len: usize) -> Result<Vec<bool>> {
        match self {
            PatternSpec::Runs { runs, cyclic } => {
                let period: usize = runs.iter().map(|r| r.count).sum();
                if !cyclic && period > len {
                    return Err(Error::LengthMismatch(format!(
                        "pattern covers {period} symbols, stream has {len}"
                    )));
                }
                let one: Vec<bool> = runs
                    .iter()
                    .flat_map(|r| std::iter::repeat(r.erased).take(r.count))
                    .collect();
                Ok(if *cyclic {
                    one.iter().copied().cycle().take(len).collect()
                } else {
                    let mut out = one;
                    out.resize(len, false);
                    out
                })
            }
            PatternSpec::Iid { eps, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..len).map(|_| rng.gen::<f64>() < *eps).collect())
            }
            PatternSpec::Mask { mask } => {
                if mask.len() > len {
                    return Err(Error::LengthMismatch(format!(
                        "mask covers {} symbols, stream has {len}",
                        mask.len()
                    )));
                }
                let mut out = mask.clone();
                out.resize(len, false);
                Ok(out)
            }
        }
    }
}

fn token_error(idx: usize, tok: &str, msg: &str) -> Error {
    Error::parse(format!("token {} ({tok:?})", idx + 1), msg)
}

/// Parse the pattern language. `mask FILE` reads the file relative to the
/// current directory.
pub fn parse_pattern(text: &str) -> Result<PatternSpec> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.is_empty() {
        return Err(Error::parse("token 1", "empty pattern"));
    }
    if toks[0] == "mask" {
        if toks.len() != 2 {
            return Err(Error::parse("token 2", "expected exactly one mask file"));
        }
        return mask_from_file(Path::new(toks[1]));
    }
    if let Some(pos) = toks.iter().position(|t| *t == "iid") {
        return parse_iid(&toks, pos);
    }
    let mut runs = Vec::new();
    let mut cyclic = false;
    for (i, tok) in toks.iter().enumerate() {
        if *tok == "cyclic" {
            if i + 1 != toks.len() {
                return Err(token_error(i, tok, "'cyclic' must come last"));
            }
            cyclic = true;
            continue;
        }
        let (count, erased) = match (tok.strip_suffix('*'), tok.strip_suffix('v')) {
            (Some(c), _) => (c, true),
            (_, Some(c)) => (c, false),
            _ => return Err(token_error(i, tok, "run must end in '*' or 'v'")),
        };
        let count: usize = count
            .parse()
            .map_err(|_| token_error(i, tok, "run count must be a positive integer"))?;
        if count == 0 {
            return Err(token_error(i, tok, "run count must be at least 1"));
        }
        runs.push(Run { count, erased });
    }
    if runs.is_empty() {
        return Err(Error::parse("token 1", "no runs given"));
    }
    Ok(PatternSpec::Runs { runs, cyclic })
}

fn parse_iid(toks: &[&str], pos: usize) -> Result<PatternSpec> {
    let mut eps = None;
    let mut seed = None;
    for (i, tok) in toks.iter().enumerate() {
        if i == pos {
            continue;
        }
        if let Some(s) = tok.strip_prefix("seed=") {
            seed = Some(s.parse::<u64>().map_err(|_| token_error(i, tok, "bad seed"))?);
        } else if eps.is_none() {
            let e: f64 = tok.parse().map_err(|_| token_error(i, tok, "bad probability"))?;
            if !(0.0..=1.0).contains(&e) {
                return Err(token_error(i, tok, "probability must lie in [0, 1]"));
            }
            eps = Some(e);
        } else {
            return Err(token_error(i, tok, "unexpected token"));
        }
    }
    Ok(PatternSpec::Iid {
        eps: eps.ok_or_else(|| Error::parse("iid", "missing probability"))?,
        seed: seed.ok_or_else(|| Error::parse("iid", "stochastic mode needs seed=S"))?,
    })
}

/// Mask from stream-format text: `?` erased, any other symbol received.
pub fn mask_from_text(text: &str) -> PatternSpec {
    let mask = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(|t| t == "?")
        .collect();
    PatternSpec::Mask { mask }
}

pub fn mask_from_file(path: &Path) -> Result<PatternSpec> {
    Ok(mask_from_text(&std::fs::read_to_string(path)?))
}

/// Erase the flagged symbols. Values are never altered.
pub fn corrupt(stream: &ErasureStream, pattern: &PatternSpec) -> Result<ErasureStream> {
    let flags = pattern.flags(stream.symbols())?;
    let mut out = stream.clone();
    for (sym, &erase) in out.blocks.iter_mut().flatten().zip(&flags) {
        if erase {
            *sym = None;
        }
    }
    Ok(out)
}

/// Block-level variant: pattern position t erases the whole block `v_t`.
pub fn corrupt_blocks(stream: &ErasureStream, pattern: &PatternSpec) -> Result<ErasureStream> {
    let flags = pattern.flags(stream.len())?;
    let mut out = stream.clone();
    for (block, &erase) in out.blocks.iter_mut().zip(&flags) {
        if erase {
            block.iter_mut().for_each(|s| *s = None);
        }
    }
    Ok(out)
}

/// [`corrupt`] on stream text without interpreting symbols: header and
/// comment lines pass through, flagged tokens become `?`.
pub fn corrupt_text(text: &str, pattern: &PatternSpec, block_level: bool) -> Result<String> {
    let data: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| l.split_whitespace().collect())
        .collect();
    let symbols: usize = data.iter().map(Vec::len).sum();
    let flags = if block_level {
        let per_block = pattern.flags(data.len())?;
        data.iter()
            .zip(per_block)
            .flat_map(|(b, e)| std::iter::repeat(e).take(b.len()))
            .collect()
    } else {
        pattern.flags(symbols)?
    };
    let mut flags = flags.into_iter();
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            out.push_str(line);
        } else {
            let toks: Vec<&str> = line
                .split_whitespace()
                .map(|t| if flags.next() == Some(true) { "?" } else { t })
                .collect();
            out.push_str(&toks.join(" "));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Erasure counts of every length-`window` slice of `mask`.
pub fn window_counts(mask: &[bool], window: usize) -> Vec<usize> {
    if window == 0 || window > mask.len() {
        return Vec::new();
    }
    let mut count = mask[..window].iter().filter(|&&e| e).count();
    let mut out = Vec::with_capacity(mask.len() - window + 1);
    out.push(count);
    for i in window..mask.len() {
        count += mask[i] as usize;
        count -= mask[i - window] as usize;
        out.push(count);
    }
    out
}

pub fn window_stats(stream: &ErasureStream, window: usize) -> Vec<usize> {
    window_counts(&stream.mask(), window)
}

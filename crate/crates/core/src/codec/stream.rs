//! Received streams with symbol-level erasures and their text format.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::polymat::PolyVector;

/// Short content hash identifying a field in stream headers.
pub fn field_ref(f: &Field) -> String {
    let json = serde_json::to_string(&f.to_json()).expect("field spec serialises");
    let digest = Sha256::digest(json.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Blocks `v_0, v_1, …` of a received word; `None` marks an erased symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureStream {
    pub n: usize,
    pub blocks: Vec<Vec<Option<FieldElement>>>,
    /// `deg v(z)` when the receiver knows it.
    pub origin_degree: Option<usize>,
}

impl ErasureStream {
    /// Clean stream of a codeword, with its degree recorded.
    pub fn from_codeword(v: &PolyVector) -> Self {
        let len = v.degree().map_or(1, |d| d + 1);
        let blocks = v
            .blocks(len)
            .into_iter()
            .map(|b| b.into_iter().map(Some).collect())
            .collect();
        ErasureStream {
            n: v.cols(),
            blocks,
            origin_degree: Some(len - 1),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn symbols(&self) -> usize {
        self.blocks.len() * self.n
    }

    pub fn erasures(&self) -> usize {
        self.blocks.iter().flatten().filter(|s| s.is_none()).count()
    }

    pub fn block_erasures(&self, t: usize) -> usize {
        self.blocks
            .get(t)
            .map_or(0, |b| b.iter().filter(|s| s.is_none()).count())
    }

    /// Flat symbol-level mask, true where erased.
    pub fn mask(&self) -> Vec<bool> {
        self.blocks.iter().flatten().map(|s| s.is_none()).collect()
    }

    pub fn to_text(&self, f: &Field) -> String {
        let deg = self
            .origin_degree
            .map_or_else(|| "unknown".to_string(), |d| d.to_string());
        let mut out = format!("#n={} field={} deg={}\n", self.n, field_ref(f), deg);
        for block in &self.blocks {
            let tokens: Vec<String> = block
                .iter()
                .map(|s| s.as_ref().map_or_else(|| "?".to_string(), |e| f.to_hex(e)))
                .collect();
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, f: &Field) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse("line 1", "missing stream header"))?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::parse("line 1", "header must start with '#'"))?;
        let (mut n, mut deg, mut fref) = (None, None, None);
        for kv in header.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::parse("line 1", format!("bad header field {kv:?}")))?;
            match k {
                "n" => {
                    n = Some(v.parse::<usize>().map_err(|_| Error::parse("line 1", "bad n"))?)
                }
                "field" => fref = Some(v.to_string()),
                "deg" if v == "unknown" => deg = Some(None),
                "deg" => {
                    deg = Some(Some(
                        v.parse::<usize>().map_err(|_| Error::parse("line 1", "bad deg"))?,
                    ))
                }
                _ => return Err(Error::parse("line 1", format!("unknown header field {k:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse("line 1", "header lacks n"))?;
        if n == 0 {
            return Err(Error::parse("line 1", "n must be positive"));
        }
        if let Some(r) = fref {
            if r != field_ref(f) {
                return Err(Error::FieldMismatch);
            }
        }
        let mut blocks = Vec::new();
        for (no, line) in lines {
            let pos = format!("line {}", no + 1);
            if line.trim_start().starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != n {
                return Err(Error::parse(&pos, format!("expected {n} symbols, found {}", toks.len())));
            }
            let block = toks
                .iter()
                .map(|t| match *t {
                    "?" => Ok(None),
                    t => f.parse_hex(t).map(Some).map_err(|_| Error::parse(&pos, format!("bad symbol {t:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        Ok(ErasureStream {
            n,
            blocks,
            origin_degree: deg.flatten(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{gf_make, ModulusChoice};

    #[test]
    fn text_round_trip() {
        let f = gf_make(2, 8, ModulusChoice::Auto).unwrap();
        let s = ErasureStream {
            n: 3,
            blocks: vec![
                vec![Some(f.from_index(0x53)), None, Some(f.one())],
                vec![None, None, Some(f.zero())],
            ],
            origin_degree: None,
        };
        let text = s.to_text(&f);
        assert!(text.starts_with("#n=3 field="));
        assert!(text.contains("deg=unknown"));
        assert_eq!(ErasureStream::parse(&text, &f).unwrap(), s);
        let other = gf_make(3, 2, ModulusChoice::Auto).unwrap();
        assert!(matches!(ErasureStream::parse(&text, &other), Err(Error::FieldMismatch)));
        assert!(matches!(
            ErasureStream::parse("#n=2 deg=1\n1 ? 0\n", &f),
            Err(Error::Parse { .. })
        ));
    }
}

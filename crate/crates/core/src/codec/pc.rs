//! Decoding with the parity-check matrix: the erased symbols themselves are
//! the unknowns of `𝓗_j (v_{s}, …, v_{s+ν+j})^T = 0`.

use super::{
    finish, gm::message_from_stream, reencode, solve_rows, Column, Ctx, DecodeOptions,
    DecodeReport, Engine, ErasureStream, LostInterval, RowState, Solved, WindowKind,
    WindowRecord,
};
use crate::error::{Error, Result};
use crate::gf::{DenseMatrix, FieldElement};
use crate::polymat::ConvCode;
use crate::sliding::build_cal_h;

struct ParityWindows {
    nu: usize,
    /// `𝓗_j^T` by j.
    cache: Vec<Option<DenseMatrix>>,
}

impl ParityWindows {
    fn new(code: &ConvCode) -> Result<Self> {
        Ok(ParityWindows {
            nu: code.nu().ok_or(Error::NoParityCheck)?,
            cache: Vec::new(),
        })
    }

    fn get(&mut self, code: &ConvCode, j: usize) -> Result<&DenseMatrix> {
        if self.cache.len() <= j {
            self.cache.resize(j + 1, None);
        }
        if self.cache[j].is_none() {
            self.cache[j] = Some(build_cal_h(code, j)?.transpose());
        }
        Ok(self.cache[j].as_ref().unwrap())
    }
}

/// Solve one parity window over blocks `s..=s+ν+j`. Returns per block the
/// completed symbols when all its unknowns are determined.
fn window(
    ctx: &Ctx,
    pw: &mut ParityWindows,
    cur: &[Vec<Column>],
    s: isize,
    j: usize,
) -> Result<(Vec<(isize, Option<Vec<FieldElement>>)>, Solved)> {
    let n = ctx.code.n();
    let f = ctx.code.field().clone();
    let span = pw.nu + j + 1;
    let symbols: Vec<Column> = (0..span as isize).flat_map(|b| ctx.block(cur, s + b)).collect();
    let rows: Vec<RowState> = symbols
        .iter()
        .map(|x| match x {
            Some(x) => RowState::Known(x.clone()),
            None => RowState::Unknown,
        })
        .collect();
    let p = n - ctx.code.k();
    let cols: Vec<Column> = vec![Some(f.zero()); (j + 1) * p];
    let solved = solve_rows(pw.get(ctx.code, j)?, &rows, &cols)?;
    let mut blocks = Vec::with_capacity(span);
    let mut idx = 0;
    for b in 0..span {
        let mut out = Some(Vec::with_capacity(n));
        for l in 0..n {
            let val = match &symbols[b * n + l] {
                Some(x) => Some(x.clone()),
                None => {
                    idx += 1;
                    solved.values[idx - 1].clone()
                }
            };
            out = match (out, val) {
                (Some(mut acc), Some(x)) => {
                    acc.push(x);
                    Some(acc)
                }
                _ => None,
            };
        }
        blocks.push((s + b as isize, out));
    }
    Ok((blocks, solved))
}

fn store(cur: &mut Vec<Vec<Column>>, t: isize, block: Vec<FieldElement>) {
    let t = t as usize;
    if t < cur.len() {
        cur[t] = block.into_iter().map(Some).collect();
    }
}

fn guard_try(
    ctx: &mut Ctx,
    pw: &mut ParityWindows,
    cur: &mut Vec<Vec<Column>>,
    pos: isize,
    j: usize,
) -> Result<Option<isize>> {
    let p = ctx.code.n() - ctx.code.k();
    let span = pw.nu + j + 1;
    let e = ctx.erasures(cur, pos, span);
    if e > (j + 1) * p {
        return Ok(None);
    }
    let (blocks, solved) = window(ctx, pw, cur, pos, j)?;
    let last = pos + span as isize - 1;
    let rec = WindowRecord {
        t: pos as usize,
        j,
        kind: WindowKind::ParityGuard,
        unknowns: solved.unknowns,
        equations: solved.equations,
        rank: solved.rank,
        outcome: super::outcome_label(&solved, 0),
        recovered: solved.unique.then_some((pos as usize, last as usize)),
    };
    ctx.record(rec, &solved);
    if solved.inconsistent {
        return Err(Error::InconsistentStream { block: pos as usize });
    }
    if !solved.unique {
        return Ok(None);
    }
    for (t, b) in blocks {
        store(cur, t, b.expect("unique solve"));
    }
    Ok(Some(last + 1))
}

/// Parity-check decoding with the same window policy as the generator-matrix
/// decoder. Blocks before time 0 are taken as zero.
pub fn pc_decode_forward(
    code: &ConvCode,
    stream: &ErasureStream,
    opts: &DecodeOptions,
) -> Result<DecodeReport> {
    let mut pw = ParityWindows::new(code)?;
    let mut ctx = Ctx::new(code, stream, opts)?;
    ctx.notes.push("zero state assumed before time 0".into());
    let nu = pw.nu as isize;
    let mut cur = ctx.received();
    let len = cur.len().max((ctx.v_last + 1).max(0) as usize);
    cur.resize(len, vec![None; code.n()]);
    let mut lost = Vec::new();
    let mut t: isize = 0;
    while t <= ctx.v_last {
        if ctx.erasures(&cur, t, 1) == 0 {
            t += 1;
            continue;
        }
        let mut advanced = false;
        for j in 0..=ctx.big_j {
            if ctx.erasures(&cur, t, j + 1) >= ctx.dcj(j) {
                continue;
            }
            let (blocks, solved) = window(&ctx, &mut pw, &cur, t - nu, j)?;
            let prefix: Vec<(isize, Vec<FieldElement>)> = blocks
                .into_iter()
                .filter(|(b, _)| *b >= t && *b <= ctx.v_last)
                .map_while(|(b, x)| x.map(|x| (b, x)))
                .collect();
            let rec = WindowRecord {
                t: t as usize,
                j,
                kind: WindowKind::ParityForward,
                unknowns: solved.unknowns,
                equations: solved.equations,
                rank: solved.rank,
                outcome: super::outcome_label(&solved, prefix.len()),
                recovered: prefix.last().map(|&(b, _)| (t as usize, b as usize)),
            };
            ctx.record(rec, &solved);
            if solved.inconsistent {
                return Err(Error::InconsistentStream { block: t as usize });
            }
            if !prefix.is_empty() {
                t += prefix.len() as isize;
                for (b, x) in prefix {
                    store(&mut cur, b, x);
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            continue;
        }
        let mut next = None;
        if opts.guard {
            'search: for pos in t..=ctx.v_last {
                for j in 0..=ctx.big_j {
                    if let Some(after) = guard_try(&mut ctx, &mut pw, &mut cur, pos, j)? {
                        if pos > t {
                            lost.push(LostInterval {
                                start: t as usize,
                                end: pos as usize - 1,
                            });
                        }
                        next = Some(after);
                        break 'search;
                    }
                }
            }
        }
        match next {
            Some(after) => t = after,
            None => {
                lost.push(LostInterval {
                    start: t as usize,
                    end: ctx.v_last as usize,
                });
                break;
            }
        }
    }
    cur.truncate(stream.len().max(if ctx.deg_known() { len } else { 0 }));
    let msg = message_from_stream(&mut ctx, &cur, 0)?;
    reencode(&ctx, &msg, &cur)?;
    Ok(finish(ctx, Engine::Pc, msg, cur, lost))
}

/// Guard-space recovery at block `pos` with `𝓗_j`: every erased symbol in
/// `v_pos..v_{pos+ν+j}` is unknown. Returns the completed blocks on a unique
/// solution.
pub fn pc_guard_recover(
    code: &ConvCode,
    stream: &ErasureStream,
    pos: usize,
    j: usize,
) -> Result<Option<Vec<Vec<FieldElement>>>> {
    let mut pw = ParityWindows::new(code)?;
    let opts = DecodeOptions {
        max_delay: Some(0),
        ..DecodeOptions::default()
    };
    let mut ctx = Ctx::new(code, stream, &opts)?;
    let cur = ctx.received();
    let span = pw.nu + j + 1;
    let e = ctx.erasures(&cur, pos as isize, span);
    if e > (j + 1) * (code.n() - code.k()) {
        return Ok(None);
    }
    let (blocks, solved) = window(&ctx, &mut pw, &cur, pos as isize, j)?;
    ctx.totals.solves += 1;
    if solved.inconsistent {
        return Err(Error::InconsistentStream { block: pos });
    }
    if !solved.unique {
        return Ok(None);
    }
    Ok(Some(blocks.into_iter().map(|(_, b)| b.expect("unique solve")).collect()))
}

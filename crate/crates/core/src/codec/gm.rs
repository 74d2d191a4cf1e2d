//! Decoding with the generator matrix: forward windows over `G_j^c` with the
//! known history moved to the right-hand side, and guard-space recovery from
//! `𝓖^c_j` / `𝓖^c_{μ+j}` when no history is available.

use super::{
    finish, reencode, solve_rows, Column, Ctx, DecodeOptions, DecodeReport, Engine, ErasureStream,
    LostInterval, RowState, Solved, WindowKind, WindowRecord,
};
use crate::error::{Error, Result};
use crate::gf::FieldElement;
use crate::polymat::ConvCode;

type Message = Vec<Option<Vec<FieldElement>>>;

/// Which guard-space system to set up at a candidate position i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardEquation {
    /// Unknowns `u_{i-μ}..u_{i+j}` against `v_i..v_{i+j}`.
    Small,
    /// Unknowns `u_{i-2μ}..u_{i+j}` against `v_{i-μ}..v_{i+j}`.
    Enlarged,
}

/// Per-time results of one window: `(τ, u_τ)` for the message times the
/// window touches inside the horizon, `u_τ` present when fully determined.
type WindowTimes = Vec<(isize, Option<Vec<FieldElement>>)>;

/// Solve the window whose codeword blocks are `v_s..v_{s+j}`. Known rows come
/// from `msg` when `use_history` is set, and from the fixed zeros otherwise.
fn window(
    ctx: &mut Ctx,
    v: &[Vec<Column>],
    msg: &Message,
    s: isize,
    j: usize,
    use_history: bool,
) -> Result<(WindowTimes, Solved, usize)> {
    let (k, mu) = (ctx.code.k(), ctx.code.mu());
    let f = ctx.code.field().clone();
    let mut rows = Vec::with_capacity((j + 1 + mu) * k);
    for a in 0..(j + 1 + mu) {
        let tau = s - mu as isize + a as isize;
        for i in 0..k {
            let state = if ctx.fixed_zero(tau, i) {
                RowState::Known(f.zero())
            } else {
                match msg.get(tau as usize).and_then(|u| u.as_ref()) {
                    Some(u) if use_history => RowState::Known(u[i].clone()),
                    _ => RowState::Unknown,
                }
            };
            rows.push(state);
        }
    }
    let cols: Vec<Column> = (0..=j as isize).flat_map(|c| ctx.block(v, s + c)).collect();
    let unknown_rows = rows.iter().filter(|r| matches!(r, RowState::Unknown)).count();
    let solved = solve_rows(ctx.cal_g(j), &rows, &cols)?;

    let mut times = Vec::new();
    let mut idx = 0;
    for a in 0..(j + 1 + mu) {
        let tau = s - mu as isize + a as isize;
        let mut u = Some(Vec::with_capacity(k));
        for i in 0..k {
            let val = match &rows[a * k + i] {
                RowState::Known(x) => Some(x.clone()),
                RowState::Unknown => {
                    idx += 1;
                    solved.values[idx - 1].clone()
                }
            };
            u = match (u, val) {
                (Some(mut acc), Some(x)) => {
                    acc.push(x);
                    Some(acc)
                }
                _ => None,
            };
        }
        if tau >= 0 && tau <= ctx.msg_last {
            times.push((tau, u));
        }
    }
    Ok((times, solved, unknown_rows))
}

fn determined_prefix(times: &WindowTimes, from: isize) -> Vec<(isize, Vec<FieldElement>)> {
    times
        .iter()
        .filter(|(tau, _)| *tau >= from)
        .map_while(|(tau, u)| u.clone().map(|u| (*tau, u)))
        .collect()
}

/// One guard-space attempt at position `i`. Returns the recovered times when
/// every unknown of the system is uniquely determined.
fn guard_try(
    ctx: &mut Ctx,
    v: &[Vec<Column>],
    i: isize,
    j: usize,
    eq: GuardEquation,
) -> Result<Option<Vec<(isize, Vec<FieldElement>)>>> {
    let (n, k, mu) = (ctx.code.n(), ctx.code.k(), ctx.code.mu());
    let (s, jj) = match eq {
        GuardEquation::Small => (i, j),
        GuardEquation::Enlarged => (i - mu as isize, j + mu),
    };
    let free_rows = (0..(jj + 1 + mu) as isize)
        .flat_map(|a| (0..k).map(move |c| (s - mu as isize + a, c)))
        .filter(|&(tau, c)| !ctx.fixed_zero(tau, c))
        .count();
    let equations = n * (jj + 1) - ctx.erasures(v, s, jj + 1);
    if free_rows == 0 || free_rows > equations {
        return Ok(None);
    }
    let empty: Message = Vec::new();
    let (times, solved, unknowns) = window(ctx, v, &empty, s, jj, false)?;
    let first = (s - mu as isize).max(0) as usize;
    let recovered = solved.unique.then(|| {
        let a = times.first().map_or(first, |t| t.0 as usize);
        (a, times.last().map_or(a, |t| t.0 as usize))
    });
    let kind = match eq {
        GuardEquation::Small => WindowKind::Guard,
        GuardEquation::Enlarged => WindowKind::GuardEnlarged,
    };
    let rec = WindowRecord {
        t: first,
        j: jj,
        kind,
        unknowns,
        equations: solved.equations,
        rank: solved.rank,
        outcome: super::outcome_label(&solved, 0),
        recovered,
    };
    ctx.record(rec, &solved);
    if solved.inconsistent {
        return Err(Error::InconsistentStream { block: s.max(0) as usize });
    }
    if !solved.unique {
        return Ok(None);
    }
    Ok(Some(times.into_iter().map(|(t, u)| (t, u.expect("unique solve"))).collect()))
}

/// Scan forward from `t` for a position where a guard-space system is
/// uniquely solvable. On success the recovered times are written to `msg`
/// and `(first recovered time, next time to decode)` is returned.
fn guard_search(
    ctx: &mut Ctx,
    v: &[Vec<Column>],
    msg: &mut Message,
    t: isize,
) -> Result<Option<(isize, isize)>> {
    for i in t..=ctx.msg_last {
        for j in 0..=ctx.big_j {
            for eq in [GuardEquation::Small, GuardEquation::Enlarged] {
                if let Some(times) = guard_try(ctx, v, i, j, eq)? {
                    let first = times.first().map_or(i, |x| x.0);
                    let last = times.last().map_or(i, |x| x.0);
                    for (tau, u) in times {
                        msg[tau as usize] = Some(u);
                    }
                    return Ok(Some((first, last + 1)));
                }
            }
        }
    }
    Ok(None)
}

/// Generator-matrix decoding: at each time the smallest window whose erasure
/// count is below `d_j^c` is solved and the longest uniquely determined
/// prefix of `u_t, u_{t+1}, …` is kept. When no window up to J helps, the
/// decoder looks for a guard space and reports the skipped times as lost.
pub fn gm_decode_forward(
    code: &ConvCode,
    stream: &ErasureStream,
    opts: &DecodeOptions,
) -> Result<DecodeReport> {
    let mut ctx = Ctx::new(code, stream, opts)?;
    let v = ctx.received();
    let mut msg: Message = vec![None; ctx.message_len()];
    let mut lost = Vec::new();
    let mut t: isize = 0;
    while t <= ctx.msg_last {
        let mut advanced = false;
        for j in 0..=ctx.big_j {
            if ctx.erasures(&v, t, j + 1) >= ctx.dcj(j) {
                continue;
            }
            let (times, solved, unknowns) = window(&mut ctx, &v, &msg, t, j, true)?;
            let prefix = determined_prefix(&times, t);
            let rec = WindowRecord {
                t: t as usize,
                j,
                kind: WindowKind::Forward,
                unknowns,
                equations: solved.equations,
                rank: solved.rank,
                outcome: super::outcome_label(&solved, prefix.len()),
                recovered: prefix
                    .last()
                    .map(|&(last, _)| (t as usize, last as usize)),
            };
            ctx.record(rec, &solved);
            if solved.inconsistent {
                return Err(Error::InconsistentStream { block: t as usize });
            }
            if !prefix.is_empty() {
                t += prefix.len() as isize;
                for (tau, u) in prefix {
                    msg[tau as usize] = Some(u);
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            continue;
        }
        let found = if opts.guard {
            guard_search(&mut ctx, &v, &mut msg, t)?
        } else {
            None
        };
        match found {
            Some((first, next)) => {
                if first > t {
                    lost.push(LostInterval {
                        start: t as usize,
                        end: first as usize - 1,
                    });
                }
                t = next;
            }
            None => {
                lost.push(LostInterval {
                    start: t as usize,
                    end: ctx.msg_last as usize,
                });
                break;
            }
        }
    }
    if !opts.guard && !lost.is_empty() {
        ctx.notes.push("forward decoding stalled; guard-space search disabled".into());
    }
    let blocks = reencode(&ctx, &msg, &v)?;
    Ok(finish(ctx, Engine::Gm, msg, blocks, lost))
}

/// Attempt guard-space recovery at position `i` with window index `j`
/// without assuming any earlier message block. Returns `(τ, u_τ)` for every
/// recovered time, or `None` when the system is not uniquely solvable.
pub fn gm_guard_recover(
    code: &ConvCode,
    stream: &ErasureStream,
    i: usize,
    j: usize,
    eq: GuardEquation,
) -> Result<Option<Vec<(usize, Vec<FieldElement>)>>> {
    let opts = DecodeOptions {
        max_delay: Some(0),
        ..DecodeOptions::default()
    };
    let mut ctx = Ctx::new(code, stream, &opts)?;
    let v = ctx.received();
    Ok(guard_try(&mut ctx, &v, i as isize, j, eq)?
        .map(|times| times.into_iter().map(|(t, u)| (t as usize, u)).collect()))
}

/// Message blocks from a stream by window solves with growing j, using
/// whatever history is already known. Entries past the horizon are zero.
pub(super) fn message_from_stream(ctx: &mut Ctx, v: &[Vec<Column>], upto: usize) -> Result<Message> {
    let k = ctx.code.k();
    let zero = ctx.code.field().zero();
    let mut msg: Message = vec![None; ctx.message_len()];
    for t in 0..ctx.message_len() {
        if msg[t].is_some() {
            continue;
        }
        for j in 0..=ctx.big_j {
            let (times, solved, unknowns) = window(ctx, v, &msg, t as isize, j, true)?;
            let prefix = determined_prefix(&times, t as isize);
            let rec = WindowRecord {
                t,
                j,
                kind: WindowKind::Extract,
                unknowns,
                equations: solved.equations,
                rank: solved.rank,
                outcome: super::outcome_label(&solved, prefix.len()),
                recovered: prefix.last().map(|&(last, _)| (t, last as usize)),
            };
            ctx.record(rec, &solved);
            if solved.inconsistent {
                return Err(Error::InconsistentStream { block: t });
            }
            if !prefix.is_empty() {
                for (tau, u) in prefix {
                    msg[tau as usize] = Some(u);
                }
                break;
            }
        }
    }
    while msg.len() < upto {
        msg.push(Some(vec![zero.clone(); k]));
    }
    Ok(msg)
}

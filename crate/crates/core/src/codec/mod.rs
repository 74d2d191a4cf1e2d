//! Sliding-window erasure decoding with the generator matrix (`gm`) or the
//! parity-check matrix (`pc`), over a shared stream model.

mod gm;
mod pc;
mod rates;
mod stream;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distance::{decoding_distances, l_of, DecodingDistances, DistanceSource};
use crate::error::Result;
use crate::gf::{solve_right_with_stats, DenseMatrix, Field, FieldElement, SolveOutcome};
use crate::polymat::ConvCode;
use crate::sliding::build_cal_g;
use crate::Budget;

pub use gm::{gm_decode_forward, gm_guard_recover, GuardEquation};
pub use pc::{pc_decode_forward, pc_guard_recover};
pub use rates::{forward_rate, rates, Rate, Rates};
pub use stream::{field_ref, ErasureStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Gm,
    Pc,
}

#[derive(Clone, Debug)]
pub struct DecodeOptions {
    /// Largest window index J; defaults to L.
    pub max_delay: Option<usize>,
    /// Search for a guard space after forward decoding stalls.
    pub guard: bool,
    pub budget: Budget,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            max_delay: None,
            guard: true,
            budget: Budget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Forward,
    /// Guard search with `𝓖^c_j`, no prior message known.
    Guard,
    /// Guard search with the enlarged `𝓖^c_{μ+j}`.
    GuardEnlarged,
    ParityForward,
    ParityGuard,
    Extract,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRecord {
    /// First message time (gm) or codeword block (pc) the window targets.
    pub t: usize,
    pub j: usize,
    pub kind: WindowKind,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub outcome: String,
    /// Inclusive range of times recovered by this window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovered: Option<(usize, usize)>,
}

/// Inclusive range of message times (gm) or blocks (pc) given up on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LostInterval {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub erasures_seen: usize,
    pub erasures_recovered: usize,
    pub solve_ops_estimate: u64,
    pub solves: usize,
}

#[derive(Clone, Debug)]
pub struct DecodeReport {
    pub engine: Engine,
    /// `u_t` for t = 0..=horizon, `None` where not recovered.
    pub message: Vec<Option<Vec<FieldElement>>>,
    pub corrected: ErasureStream,
    pub windows: Vec<WindowRecord>,
    pub lost_intervals: Vec<LostInterval>,
    pub totals: Totals,
    pub distances: DecodingDistances,
    pub notes: Vec<String>,
    pub wall_time_ms: u64,
}

impl DecodeReport {
    pub fn message_complete(&self) -> bool {
        self.message.iter().all(|u| u.is_some())
    }

    pub fn to_json(&self, f: &Field) -> Value {
        let msg: Vec<Value> = self
            .message
            .iter()
            .map(|u| match u {
                Some(u) => json!(u.iter().map(|e| f.to_hex(e)).collect::<Vec<_>>()),
                None => Value::Null,
            })
            .collect();
        json!({
            "engine": self.engine,
            "recovered_message": msg,
            "message_complete": self.message_complete(),
            "corrected_stream": self.corrected.to_text(f),
            "windows": self.windows,
            "lost_intervals": self.lost_intervals,
            "totals": self.totals,
            "distance_profile": self.distances.dcj,
            "distance_source": self.distances.sources,
            "notes": self.notes,
            "wall_time_ms": self.wall_time_ms,
        })
    }
}

/// Values of a window's columns: `Some` when known, `None` when erased.
type Column = Option<FieldElement>;

enum RowState {
    Known(FieldElement),
    Unknown,
}

struct Solved {
    /// Values of the unknowns, `None` where not uniquely determined.
    values: Vec<Option<FieldElement>>,
    unique: bool,
    inconsistent: bool,
    unknowns: usize,
    equations: usize,
    rank: usize,
    mults: u64,
}

/// `x·A = b` for the unknown rows of `m` against its known columns.
fn solve_rows(m: &DenseMatrix, rows: &[RowState], cols: &[Column]) -> Result<Solved> {
    let f = m.field().clone();
    let unknown: Vec<usize> = (0..rows.len())
        .filter(|&r| matches!(rows[r], RowState::Unknown))
        .collect();
    let kept: Vec<usize> = (0..cols.len()).filter(|&c| cols[c].is_some()).collect();
    let a = m.select_rows(&unknown).select_cols(&kept);
    let mut rhs: Vec<FieldElement> = kept.iter().map(|&c| cols[c].clone().unwrap()).collect();
    for (r, state) in rows.iter().enumerate() {
        if let RowState::Known(x) = state {
            if x.is_zero() {
                continue;
            }
            for (slot, &c) in rhs.iter_mut().zip(&kept) {
                *slot = f.sub(slot, &f.mul(x, m.get(r, c)));
            }
        }
    }
    let b = DenseMatrix::from_rows(&f, vec![rhs])?;
    let (outcome, stats) = solve_right_with_stats(&a, &b)?;
    let mut out = Solved {
        values: vec![None; unknown.len()],
        unique: false,
        inconsistent: false,
        unknowns: stats.unknowns,
        equations: stats.equations,
        rank: stats.rank,
        mults: stats.field_mults,
    };
    match outcome {
        SolveOutcome::Inconsistent => out.inconsistent = true,
        SolveOutcome::Unique(x) => {
            out.unique = true;
            out.values = x.row(0).iter().cloned().map(Some).collect();
        }
        SolveOutcome::Underdetermined { particular, kernel } => {
            for i in 0..unknown.len() {
                if (0..kernel.rows()).all(|r| kernel.get(r, i).is_zero()) {
                    out.values[i] = Some(particular.get(0, i).clone());
                }
            }
        }
    }
    Ok(out)
}

/// Shared decoding state: code, received stream, horizons and thresholds.
struct Ctx<'a> {
    code: &'a ConvCode,
    stream: &'a ErasureStream,
    dist: DecodingDistances,
    big_j: usize,
    /// Last codeword block that may be nonzero.
    v_last: isize,
    /// Last message time that may be nonzero.
    msg_last: isize,
    /// Component i of `u_t` is zero for `t >= zero_from[i]`.
    zero_from: Vec<isize>,
    cal_g: Vec<Option<DenseMatrix>>,
    totals: Totals,
    windows: Vec<WindowRecord>,
    notes: Vec<String>,
}

impl<'a> Ctx<'a> {
    fn new(code: &'a ConvCode, stream: &'a ErasureStream, opts: &DecodeOptions) -> Result<Self> {
        if stream.n != code.n() {
            return Err(crate::error::Error::dims(format!(
                "stream has n={}, code has n={}",
                stream.n,
                code.n()
            )));
        }
        if !code.flags().delay_free {
            return Err(crate::error::Error::NotDelayFree);
        }
        let big_j = opts
            .max_delay
            .unwrap_or_else(|| l_of(code.n(), code.k(), code.delta()));
        let dist = decoding_distances(code, big_j, &opts.budget)?;
        let mut notes = Vec::new();
        if dist.sources.contains(&DistanceSource::Assumed) {
            notes.push("some column distances exceed the budget; the column bound gates those windows".into());
        }
        let k = code.k();
        let (v_last, msg_last, zero_from) = match stream.origin_degree {
            Some(d) => {
                let d = d as isize;
                if code.flags().row_reduced {
                    let zf: Vec<isize> = code.row_degrees().iter().map(|&nu| d - nu as isize + 1).collect();
                    let last = zf.iter().copied().max().unwrap_or(0) - 1;
                    (d, last, zf)
                } else {
                    notes.push("generator not row reduced; message horizon taken as deg v".into());
                    (d, d, vec![d + 1; k])
                }
            }
            None => {
                notes.push("deg v unknown; symbols past the stream are treated as erased".into());
                let last = stream.len() as isize - 1;
                (last, last, vec![last + 1; k])
            }
        };
        Ok(Ctx {
            code,
            stream,
            dist,
            big_j,
            v_last,
            msg_last,
            zero_from,
            cal_g: Vec::new(),
            totals: Totals {
                erasures_seen: stream.erasures(),
                ..Totals::default()
            },
            windows: Vec::new(),
            notes,
        })
    }

    fn deg_known(&self) -> bool {
        self.stream.origin_degree.is_some()
    }

    fn cal_g(&mut self, j: usize) -> &DenseMatrix {
        if self.cal_g.len() <= j {
            self.cal_g.resize(j + 1, None);
        }
        if self.cal_g[j].is_none() {
            self.cal_g[j] = Some(build_cal_g(self.code, j));
        }
        self.cal_g[j].as_ref().unwrap()
    }

    /// Received symbol `l` of block `t` under the end-of-stream policy.
    fn symbol(&self, v: &[Vec<Column>], t: isize, l: usize) -> Column {
        let f = self.code.field();
        if t < 0 || (self.deg_known() && t > self.v_last) {
            return Some(f.zero());
        }
        v.get(t as usize).and_then(|b| b[l].clone())
    }

    fn block(&self, v: &[Vec<Column>], t: isize) -> Vec<Column> {
        (0..self.code.n()).map(|l| self.symbol(v, t, l)).collect()
    }

    fn erasures(&self, v: &[Vec<Column>], from: isize, len: usize) -> usize {
        (from..from + len as isize)
            .map(|t| self.block(v, t).iter().filter(|s| s.is_none()).count())
            .sum()
    }

    fn fixed_zero(&self, t: isize, i: usize) -> bool {
        t < 0 || t > self.msg_last || t >= self.zero_from[i]
    }

    fn record(&mut self, rec: WindowRecord, s: &Solved) {
        self.totals.solves += 1;
        self.totals.solve_ops_estimate += s.mults;
        self.windows.push(rec);
    }

    fn received(&self) -> Vec<Vec<Column>> {
        self.stream.blocks.clone()
    }

    fn message_len(&self) -> usize {
        (self.msg_last + 1).max(0) as usize
    }

    fn dcj(&self, j: usize) -> usize {
        self.dist.dcj[j]
    }
}

fn outcome_label(s: &Solved, prefix: usize) -> String {
    if s.inconsistent {
        "inconsistent".into()
    } else if s.unique {
        "unique".into()
    } else if prefix > 0 {
        format!("prefix:{prefix}")
    } else {
        "underdetermined".into()
    }
}

/// Message blocks `u_range` from a fully known stretch of the codeword.
/// Fails with `NonUnique` when some `u_t` in the range is not determined by
/// windows of index at most `max_j`.
pub fn extract_message(
    code: &ConvCode,
    corrected: &ErasureStream,
    range: std::ops::Range<usize>,
    max_j: usize,
) -> Result<Vec<Vec<FieldElement>>> {
    // thresholds are not consulted here, so only d_0^c is computed
    let opts = DecodeOptions {
        max_delay: Some(0),
        guard: false,
        budget: Budget::default(),
    };
    let mut ctx = Ctx::new(code, corrected, &opts)?;
    ctx.big_j = max_j;
    let v = ctx.received();
    let msg = gm::message_from_stream(&mut ctx, &v, range.end)?;
    range
        .map(|t| msg.get(t).cloned().flatten().ok_or(crate::error::Error::NonUnique))
        .collect()
}

/// Decode with either engine.
pub fn decode(
    code: &ConvCode,
    stream: &ErasureStream,
    engine: Engine,
    opts: &DecodeOptions,
) -> Result<DecodeReport> {
    let started = Instant::now();
    let mut report = match engine {
        Engine::Gm => gm_decode_forward(code, stream, opts)?,
        Engine::Pc => pc_decode_forward(code, stream, opts)?,
    };
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

/// Codeword blocks `v_0..=v_last` from a message, with a consistency check
/// against every received symbol. Blocks whose message history is incomplete
/// keep their received values.
fn reencode(ctx: &Ctx, msg: &[Option<Vec<FieldElement>>], v: &[Vec<Column>]) -> Result<Vec<Vec<Column>>> {
    let code = ctx.code;
    let f = code.field();
    let (n, k, mu) = (code.n(), code.k(), code.mu());
    let u_at = |t: isize| -> Option<Vec<FieldElement>> {
        if t < 0 || t > ctx.msg_last {
            return Some(vec![f.zero(); k]);
        }
        msg.get(t as usize).cloned().flatten()
    };
    let len = v.len().max((ctx.v_last + 1).max(0) as usize);
    let mut out = Vec::with_capacity(len);
    for t in 0..len as isize {
        let received = ctx.block(v, t);
        let hist: Option<Vec<Vec<FieldElement>>> = (0..=mu as isize).map(|i| u_at(t - i)).collect();
        match hist {
            Some(hist) => {
                let mut block = vec![f.zero(); n];
                for (i, u) in hist.iter().enumerate() {
                    let row = code.g_block(i).left_mul_vec(u)?;
                    for (b, x) in block.iter_mut().zip(row) {
                        *b = f.add(b, &x);
                    }
                }
                for (r, b) in received.iter().zip(&block) {
                    if r.as_ref().is_some_and(|r| r != b) {
                        return Err(crate::error::Error::InconsistentStream { block: t as usize });
                    }
                }
                out.push(block.into_iter().map(Some).collect());
            }
            None => out.push(received),
        }
    }
    if ctx.deg_known() {
        out.truncate(ctx.stream.len().max((ctx.v_last + 1) as usize));
    } else {
        out.truncate(ctx.stream.len());
    }
    Ok(out)
}

fn finish(
    ctx: Ctx,
    engine: Engine,
    message: Vec<Option<Vec<FieldElement>>>,
    blocks: Vec<Vec<Column>>,
    lost: Vec<LostInterval>,
) -> DecodeReport {
    let corrected = ErasureStream {
        n: ctx.stream.n,
        blocks,
        origin_degree: ctx.stream.origin_degree,
    };
    let mut totals = ctx.totals;
    let left = corrected
        .blocks
        .iter()
        .take(ctx.stream.len())
        .flatten()
        .filter(|s| s.is_none())
        .count();
    totals.erasures_recovered = totals.erasures_seen.saturating_sub(left);
    DecodeReport {
        engine,
        message,
        corrected,
        windows: ctx.windows,
        lost_intervals: lost,
        totals,
        distances: ctx.dist,
        notes: ctx.notes,
        wall_time_ms: 0,
    }
}

#[cfg(test)]
mod tests;

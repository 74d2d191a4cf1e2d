//! Seeded decoder comparison: system dimensions per solve and wall time.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use convec_core::channel::{corrupt, parse_pattern, PatternSpec, IID_PRNG};
use convec_core::gf::FieldElement;
use convec_core::codec::{decode, DecodeOptions, DecodeReport, Engine, ErasureStream, WindowKind};
use convec_core::polymat::{encode, parity_check_basis, ConvCode, PolyMatrix};
use convec_core::Budget;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::io::{emit_report, envelope, load_code, CliResult, Failure, Input};

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    code: PathBuf,
    /// Pattern in the channel grammar; iid seeds are offset by the trial index.
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value = "gm,pc", value_delimiter = ',')]
    engines: Vec<String>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Message coefficients per trial; defaults to 4(L+1).
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_delay: Option<usize>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn engine(name: &str) -> CliResult<Engine> {
    match name.trim() {
        "gm" => Ok(Engine::Gm),
        "pc" => Ok(Engine::Pc),
        other => Err(Failure::usage(format!("unknown engine {other:?}"))),
    }
}

/// Forward windows of either decoder: the systems the cost comparison is about.
fn is_forward(kind: WindowKind) -> bool {
    matches!(kind, WindowKind::Forward | WindowKind::ParityForward)
}

struct Trial {
    per_engine: Vec<Value>,
}

fn run_trial(
    code: &ConvCode,
    engines: &[Engine],
    pattern: &PatternSpec,
    len: usize,
    seed: u64,
    idx: usize,
    opts: &DecodeOptions,
) -> CliResult<Trial> {
    let f = code.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
    let blocks: Vec<_> = (0..len)
        .map(|_| (0..code.k()).map(|_| f.random(&mut rng)).collect())
        .collect();
    let u = PolyMatrix::from_blocks(f, code.k(), &blocks)?;
    let clean = ErasureStream::from_codeword(&encode(code, &u)?);
    let pattern = match pattern {
        PatternSpec::Iid { eps, seed } => PatternSpec::Iid {
            eps: *eps,
            seed: seed.wrapping_add(idx as u64),
        },
        p => p.clone(),
    };
    let received = corrupt(&clean, &pattern)?;
    let mut per_engine = Vec::new();
    for &e in engines {
        let started = Instant::now();
        let rep: DecodeReport = decode(code, &received, e, opts)?;
        let wall = started.elapsed().as_secs_f64() * 1e3;
        let exact = rep.message_complete() && same_message(&rep, &blocks);
        let fwd: Vec<&_> = rep.windows.iter().filter(|w| is_forward(w.kind)).collect();
        per_engine.push(json!({
            "engine": e,
            "erasures": received.erasures(),
            "exact": exact,
            "lost_intervals": rep.lost_intervals.len(),
            "solves": rep.totals.solves,
            "forward_solves": fwd.len(),
            "forward_unknowns": fwd.iter().map(|w| w.unknowns).sum::<usize>(),
            "forward_equations": fwd.iter().map(|w| w.equations).sum::<usize>(),
            "max_unknowns": rep.windows.iter().map(|w| w.unknowns).max().unwrap_or(0),
            "all_unknowns": rep.windows.iter().map(|w| w.unknowns).sum::<usize>(),
            "solve_ops_estimate": rep.totals.solve_ops_estimate,
            "wall_time_ms": wall,
        }));
    }
    Ok(Trial { per_engine })
}

/// Recovered message equals the sent one, with zeros past either end.
fn same_message(rep: &DecodeReport, sent: &[Vec<FieldElement>]) -> bool {
    let zero = |u: &[FieldElement]| u.iter().all(FieldElement::is_zero);
    (0..sent.len().max(rep.message.len())).all(|t| match (rep.message.get(t), sent.get(t)) {
        (Some(Some(a)), Some(b)) => a == b,
        (Some(Some(a)), None) => zero(a),
        (None, Some(b)) => zero(b),
        _ => false,
    })
}

fn summarise(engine: Engine, rows: &[&Value]) -> Value {
    let sum = |key: &str| rows.iter().map(|r| r[key].as_u64().unwrap_or(0)).sum::<u64>();
    let fwd = sum("forward_solves");
    let unknowns = sum("forward_unknowns");
    let wall: f64 = rows.iter().map(|r| r["wall_time_ms"].as_f64().unwrap_or(0.0)).sum();
    json!({
        "engine": engine,
        "trials": rows.len(),
        "exact_recoveries": rows.iter().filter(|r| r["exact"] == true).count(),
        "solves": sum("solves"),
        "forward_solves": fwd,
        "forward_unknowns": unknowns,
        "forward_equations": sum("forward_equations"),
        "mean_forward_unknowns": if fwd > 0 { unknowns as f64 / fwd as f64 } else { 0.0 },
        "max_unknowns": rows.iter().map(|r| r["max_unknowns"].as_u64().unwrap_or(0)).max().unwrap_or(0),
        "solve_ops_estimate": sum("solve_ops_estimate"),
        "wall_time_ms": wall,
    })
}

pub fn run(args: BenchArgs, budget: &Budget, timings: bool) -> CliResult<()> {
    let code_in = Input::read(&args.code)?;
    let mut code = load_code(&code_in)?;
    let engines = args.engines.iter().map(|e| engine(e)).collect::<CliResult<Vec<_>>>()?;
    let mut notes = Vec::new();
    if engines.contains(&Engine::Pc) && code.h().is_none() {
        let h = parity_check_basis(code.g(), code.delta())?;
        code = code.with_parity_check(h)?;
        notes.push("parity-check matrix derived as a minimal basis of the kernel of G");
    }
    let pattern = parse_pattern(&args.pattern)?;
    let l = convec_core::distance::l_of(code.n(), code.k(), code.delta());
    let len = args.length.unwrap_or(4 * (l + 1));
    let opts = DecodeOptions {
        max_delay: args.max_delay,
        guard: true,
        budget: *budget,
    };
    let trials: Vec<Trial> = (0..args.trials)
        .into_par_iter()
        .map(|i| run_trial(&code, &engines, &pattern, len, args.seed, i, &opts))
        .collect::<CliResult<Vec<_>>>()?;
    let summary: Vec<Value> = engines
        .iter()
        .enumerate()
        .map(|(e, &eng)| {
            let rows: Vec<&Value> = trials.iter().map(|t| &t.per_engine[e]).collect();
            summarise(eng, &rows)
        })
        .collect();
    let body = json!({
        "code": { "n": code.n(), "k": code.k(), "delta": code.delta(), "mu": code.mu(), "nu": code.nu() },
        "pattern": args.pattern,
        "prng": IID_PRNG,
        "seed": args.seed,
        "message_length": len,
        "summary": summary,
        "trials": trials.iter().map(|t| json!(t.per_engine)).collect::<Vec<_>>(),
        "notes": notes,
    });
    emit_report(args.report.as_deref(), envelope("bench", &[("code", &code_in)], body), timings)
}

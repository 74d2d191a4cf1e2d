mod bench;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use convec_core::channel::{corrupt_text, parse_pattern};
use convec_core::codec::{decode, rates, DecodeOptions, Engine, ErasureStream};
use convec_core::construct::{build_complete_mdp, random_code, ConstructOptions, Want};
use convec_core::distance::{
    column_optimal_report_g, distance_profile, is_complete_jmdp_via_g, is_complete_jmdp_via_h,
    l_of,
};
use convec_core::gf::FieldElement;
use convec_core::polymat::{encode, ConvCode, PolyMatrix};
use convec_core::Budget;
use serde_json::{json, Value};

use io::{emit_report, envelope, load_code, CliResult, Failure, Input};

#[derive(Parser)]
#[command(name = "convec", version, about = "Convolutional codes over erasure channels")]
struct Cli {
    /// Omit wall-clock fields so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Gm,
    Pc,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Gm => Engine::Gm,
            EngineArg::Pc => Engine::Pc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    DelayFree,
    RowReduced,
    Noncatastrophic,
    Mdp,
    #[value(name = "complete-jmdp:G")]
    CompleteJmdpG,
    #[value(name = "complete-jmdp:H")]
    CompleteJmdpH,
    /// Column distances by brute force and a d_free bracket.
    Profile,
}

#[derive(Subcommand)]
enum Cmd {
    /// v(z) = u(z) G(z) as a stream file.
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Erase symbols of a stream file.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        /// Run-length pattern such as "20* 42v 14* 8v", or "mask FILE".
        #[arg(long, conflicts_with = "iid")]
        pattern: Option<String>,
        /// Erasure probability per symbol.
        #[arg(long, requires = "seed")]
        iid: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Pattern positions address whole blocks instead of symbols.
        #[arg(long)]
        blocks: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sliding-window erasure decoding.
    Decode {
        #[arg(long, value_enum)]
        engine: EngineArg,
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        max_delay: Option<usize>,
        #[arg(long, value_enum, default_value = "on")]
        guard: Switch,
        /// Also write the corrected stream here.
        #[arg(long)]
        corrected: Option<PathBuf>,
        /// Also write the recovered message here when it is complete.
        #[arg(long)]
        message_out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a structural or distance property of a code.
    Verify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        /// Window index; defaults to L.
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The explicit complete-MDP construction over GF(p^N).
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Use this N instead of the smallest N above the bound.
        #[arg(long)]
        extension_degree: Option<usize>,
        /// Refuse N above this.
        #[arg(long)]
        max_extension: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded random search for a small code with a verified property.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// none, mdp, or complete-jmdp:J
        #[arg(long, default_value = "mdp")]
        want: String,
        #[arg(long, default_value_t = 10_000)]
        attempts: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forward and guard-space recovering rates as exact fractions.
    Rates {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        json: bool,
    },
    /// Compare decoder system sizes and wall times over seeded trials.
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let timings = !cli.no_timings;
    let budget = Budget::from_env();
    match cli.cmd {
        Cmd::Encode { code, message, out } => cmd_encode(&code, &message, &out),
        Cmd::Corrupt {
            input,
            pattern,
            iid,
            seed,
            blocks,
            out,
        } => {
            let spec = match (pattern, iid) {
                (Some(p), None) => parse_pattern(&p)?,
                (None, Some(eps)) => {
                    parse_pattern(&format!("iid {eps} seed={}", seed.expect("clap requires seed")))?
                }
                _ => return Err(Failure::usage("give exactly one of --pattern or --iid")),
            };
            let input = Input::read(&input)?;
            io::write(&out, &corrupt_text(&input.text, &spec, blocks)?)
        }
        Cmd::Decode {
            engine,
            code,
            input,
            max_delay,
            guard,
            corrected,
            message_out,
            report,
        } => {
            let opts = DecodeOptions {
                max_delay,
                guard: matches!(guard, Switch::On),
                budget,
            };
            let outputs = DecodeOutputs {
                corrected: corrected.as_deref(),
                message: message_out.as_deref(),
                report: report.as_deref(),
            };
            cmd_decode(engine.into(), &code, &input, &opts, &outputs, timings)
        }
        Cmd::Verify {
            code,
            property,
            j,
            report,
        } => cmd_verify(&code, property, j, &budget, report.as_deref(), timings),
        Cmd::Construct {
            n,
            k,
            delta,
            p,
            extension_degree,
            max_extension,
            out,
        } => {
            let opts = ConstructOptions {
                extension_degree,
                max_extension,
            };
            let (code, prov) = build_complete_mdp(n, k, delta, p, &opts)?;
            write_code(&out, &code, Some(prov.to_value()))
        }
        Cmd::Search {
            n,
            k,
            delta,
            q,
            seed,
            want,
            attempts,
            out,
        } => {
            let want = parse_want(&want)?;
            let code = random_code(n, k, delta, q, seed, want, attempts, &budget)?;
            let prov = json!({
                "construction": "random_search",
                "q": q,
                "seed": seed,
                "want": format!("{want:?}"),
                "prng": "ChaCha8Rng::seed_from_u64",
            });
            write_code(&out, &code, Some(prov))
        }
        Cmd::Rates { n, k, delta, j, json } => {
            if k == 0 || k >= n {
                return Err(Failure::usage("need 0 < k < n"));
            }
            let r = rates(n, k, delta, j);
            if json {
                println!("{}", serde_json::to_string_pretty(&r).expect("rates serialise"));
            } else {
                let show = |r: Option<_>| r.map_or("—".to_string(), |r: convec_core::codec::Rate| r.to_string());
                println!("{} {} {}", r.forward, show(r.guard_g), show(r.guard_h));
            }
            Ok(())
        }
        Cmd::Bench(args) => bench::run(args, &budget, timings),
    }
}

fn parse_want(s: &str) -> CliResult<Want> {
    match s {
        "none" => Ok(Want::None),
        "mdp" => Ok(Want::Mdp),
        _ => s
            .strip_prefix("complete-jmdp:")
            .and_then(|j| j.parse().ok())
            .map(Want::CompleteJmdp)
            .ok_or_else(|| Failure::usage(format!("bad --want {s:?}; use none, mdp or complete-jmdp:J"))),
    }
}

fn write_code(out: &Path, code: &ConvCode, provenance: Option<Value>) -> CliResult<()> {
    let file = code.to_json(provenance);
    io::write(out, &(serde_json::to_string_pretty(&file).expect("code serialises") + "\n"))
}

fn cmd_encode(code: &Path, message: &Path, out: &Path) -> CliResult<()> {
    let code_in = Input::read(code)?;
    let code = load_code(&code_in)?;
    let f = code.field().clone();
    let blocks = io::parse_message(&Input::read(message)?.text, &f, code.k())?;
    let u = PolyMatrix::from_blocks(&f, code.k(), &blocks)?;
    let v = encode(&code, &u)?;
    let mut stream = ErasureStream::from_codeword(&v);
    // a zero codeword still occupies the message's time span
    if v.is_zero() {
        stream.blocks = vec![vec![Some(f.zero()); code.n()]; blocks.len() + code.mu()];
        stream.origin_degree = None;
    }
    io::write(out, &stream.to_text(&f))
}

/// Per-component coefficient lists of a fully recovered message.
fn message_polys(f: &convec_core::gf::Field, msg: &[Vec<FieldElement>], k: usize) -> Value {
    let comps: Vec<Vec<String>> = (0..k)
        .map(|i| {
            let mut c: Vec<&FieldElement> = msg.iter().map(|u| &u[i]).collect();
            while c.last().is_some_and(|e| e.is_zero()) {
                c.pop();
            }
            c.into_iter().map(|e| f.to_hex(e)).collect()
        })
        .collect();
    json!(comps)
}

struct DecodeOutputs<'a> {
    corrected: Option<&'a Path>,
    message: Option<&'a Path>,
    report: Option<&'a Path>,
}

fn cmd_decode(
    engine: Engine,
    code: &Path,
    input: &Path,
    opts: &DecodeOptions,
    outputs: &DecodeOutputs,
    timings: bool,
) -> CliResult<()> {
    let code_in = Input::read(code)?;
    let stream_in = Input::read(input)?;
    let code = load_code(&code_in)?;
    let f = code.field().clone();
    let stream = ErasureStream::parse(&stream_in.text, &f)?;
    if stream.n != code.n() {
        return Err(convec_core::Error::DimensionMismatch(format!(
            "stream has n={}, code has n={}",
            stream.n,
            code.n()
        ))
        .into());
    }
    let rep = decode(&code, &stream, engine, opts)?;
    if let Some(path) = outputs.corrected {
        io::write(path, &rep.corrected.to_text(&f))?;
    }
    let complete: Option<Vec<Vec<FieldElement>>> = rep.message.iter().cloned().collect();
    if let Some(path) = outputs.message {
        let msg = complete.as_ref().ok_or(Failure {
            code: "incomplete",
            message: "message not fully recovered; see the report's lost_intervals".into(),
        })?;
        io::write(path, &io::format_message(&f, msg))?;
    }
    let mut body = rep.to_json(&f);
    body["recovered_polynomials"] =
        complete.as_ref().map_or(Value::Null, |m| message_polys(&f, m, code.k()));
    body["options"] = json!({
        "max_delay": opts.max_delay,
        "guard": opts.guard,
        "budget": { "enumeration": opts.budget.enumeration, "brute_force": opts.budget.brute_force },
    });
    let out = envelope("decode", &[("code", &code_in), ("stream", &stream_in)], body);
    emit_report(outputs.report, out, timings)
}

fn cmd_verify(
    code: &Path,
    property: Property,
    j: Option<usize>,
    budget: &Budget,
    report: Option<&Path>,
    timings: bool,
) -> CliResult<()> {
    let code_in = Input::read(code)?;
    let code = load_code(&code_in)?;
    let flags = code.flags();
    let l = l_of(code.n(), code.k(), code.delta());
    let j = j.unwrap_or(l);
    let (name, passed, details) = match property {
        Property::DelayFree => ("delay-free", flags.delay_free, Value::Null),
        Property::RowReduced => ("row-reduced", flags.row_reduced, Value::Null),
        Property::Noncatastrophic => ("noncatastrophic", flags.noncatastrophic_certified, Value::Null),
        Property::Mdp => {
            let r = column_optimal_report_g(&code, l, budget)?;
            ("mdp", r.passed, json!([r]))
        }
        Property::CompleteJmdpG => {
            let r = is_complete_jmdp_via_g(&code, j, budget)?;
            ("complete-jmdp:G", r.passed, json!([r]))
        }
        Property::CompleteJmdpH => {
            let r = is_complete_jmdp_via_h(&code, j, budget)?;
            ("complete-jmdp:H", r.passed, json!([r]))
        }
        Property::Profile => {
            let p = distance_profile(&code, Some(j), None, budget)?;
            let optimal = p.dcj.iter().zip(&p.column_bounds).all(|(d, b)| d == b);
            ("profile", optimal, json!(p))
        }
    };
    let body = json!({
        "property": name,
        "j": j,
        "L": l,
        "code": { "n": code.n(), "k": code.k(), "delta": code.delta(), "mu": code.mu(), "nu": code.nu() },
        "flags": flags,
        "passed": passed,
        "details": details,
    });
    emit_report(report, envelope("verify", &[("code", &code_in)], body), timings)
}


mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use mrgrid::bounds::{bound, BoundName, Param, Params};
use mrgrid::mr::{
    attack_t3, attack_t4, certify_mr_capped, search_mr_traced, SearchParams, Strategy, Verdict,
    DEFAULT_INSTANCE_CAP,
};
use mrgrid::patterns::{enumerate_types_capped, DEFAULT_ENUMERATION_CAP};
use mrgrid::{Error, FieldSpec, GridWord, TensorCode};

use output::{Emit, Format};

/// Maximally recoverable tensor-product codes on grid topologies.
#[derive(Parser, Debug)]
#[command(name = "mrgrid", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "MRGRID_THREADS", default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the regular irreducible pattern types of T(m×n; 1, b, 0).
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Decide whether a code is maximally recoverable.
    Certify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP)]
        cap: u64,
    },
    /// Sweep field sizes for an MR code.
    Search {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q_min: u32,
        #[arg(long, default_value_t = 1024)]
        q_max: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::GreedyIndep)]
        strategy: StrategyArg,
        /// Which field orders to try.
        #[arg(long, value_enum, default_value_t = Family::All)]
        fields: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random strategy: row parities sampled per field.
        #[arg(long, default_value_t = 200)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP)]
        cap: u64,
        /// Also write the code found to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for an uncorrectable regular pattern caused by a small field.
    Attack {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, value_enum)]
        topology: AttackKind,
    },
    /// Recover the erased cells of a word.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Evaluate a closed-form field-size bound.
    Bounds {
        #[arg(long)]
        name: String,
        /// Extra parameters as key=value (repeatable).
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, String)>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long = "N")]
        big_n: Option<u64>,
        #[arg(long)]
        nv: Option<u64>,
        #[arg(long)]
        delta: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        c_r: Option<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    #[value(name = "greedy_indep")]
    GreedyIndep,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    All,
    Binary,
    Prime,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AttackKind {
    T4,
    T3,
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// A failure and the exit status it maps to.
struct Failure {
    code: u8,
    error: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 2, error: e.name(), message: e.to_string() }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, error: "Usage", message }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure { code: 2, error: "InvalidInput", message: format!("{}: {e}", path.display()) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(cli.command) {
        Ok((emit, status)) => {
            print!("{}", emit.render(cli.format));
            ExitCode::from(status)
        }
        Err(f) => {
            eprintln!("{}", json!({"schema": 1, "error": f.error, "message": f.message}));
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Result<(Emit, u8), Failure> {
    match cmd {
        Command::Enumerate { m, b, cap } => {
            let types = enumerate_types_capped(m, b, cap)?;
            let rows = types
                .iter()
                .map(|t| vec![t.u.to_string(), t.v.to_string(), t.mask().join("/")])
                .collect();
            let text = types.iter().map(|t| format!("{}x{}\n{t}", t.u, t.v)).collect::<Vec<_>>().join("\n");
            let emit = Emit::new(
                json!({"command": "enumerate", "m": m, "b": b, "count": types.len(), "types": types}),
                &["u", "v", "mask"],
                rows,
                format!("{} type(s) for m = {m}, b = {b}\n{text}", types.len()),
            );
            Ok((emit, 0))
        }
        Command::Certify { code, cap } => {
            let code: TensorCode = read_json(&code)?;
            let report = certify_mr_capped(&code, cap)?;
            let status = u8::from(report.verdict != Verdict::Certified);
            let pattern = report
                .counterexample
                .as_ref()
                .map(output::cells_field)
                .unwrap_or_default();
            let verdict = serde_json::to_value(report.verdict).unwrap();
            let verdict = verdict.as_str().unwrap_or_default().to_string();
            let rank = report.rank_found.map(|r| r.to_string()).unwrap_or_default();
            let mut text = format!("{verdict} after {} pattern(s)\n", report.patterns_checked);
            if let Some(e) = &report.counterexample {
                text += &format!("rank {rank} < {}\n{e}", e.len());
            }
            let emit = Emit::new(
                json!({"command": "certify", "report": report}),
                &["verdict", "patterns_checked", "rank_found", "counterexample"],
                vec![vec![verdict, report.patterns_checked.to_string(), rank, pattern]],
                text,
            );
            Ok((emit, status))
        }
        Command::Search { m, b, n, q_min, q_max, strategy, fields, seed, budget, cap, out } => {
            search(m, b, n, q_min, q_max, strategy, fields, seed, budget, cap, out)
        }
        Command::Attack { code, topology } => {
            let code: TensorCode = read_json(&code)?;
            let t = code.topology();
            let (want, found) = match topology {
                AttackKind::T4 => ((4, 2), attack_t4(code.h_row())?),
                AttackKind::T3 => ((3, 3), attack_t3(code.h_row())?),
            };
            if (t.m, t.b) != want {
                return Err(usage(format!(
                    "this attack targets m = {}, b = {}; the code has m = {}, b = {}",
                    want.0, want.1, t.m, t.b
                )));
            }
            let Some(attack) = found else {
                let emit = Emit::new(
                    json!({"command": "attack", "found": false}),
                    &["found"],
                    vec![vec!["false".into()]],
                    "no witness found\n".into(),
                );
                return Ok((emit, 1));
            };
            let rank = code.restricted_rank(&attack.pattern)?;
            let size = attack.pattern.len();
            let emit = Emit::new(
                json!({
                    "command": "attack",
                    "found": true,
                    "pattern": attack.pattern,
                    "witness": attack.witness,
                    "rank": rank,
                    "rank_all_ones": attack.rank,
                    "size": size,
                }),
                &["found", "rank", "size", "pattern"],
                vec![vec![
                    "true".into(),
                    rank.to_string(),
                    size.to_string(),
                    output::cells_field(&attack.pattern),
                ]],
                format!("rank {rank} < {size}\n{}", attack.pattern),
            );
            Ok((emit, 0))
        }
        Command::Decode { code, word } => {
            let code: TensorCode = read_json(&code)?;
            let word: GridWord = read_json(&word)?;
            match code.decode(&word) {
                Ok(grid) => {
                    let rows = grid.iter().map(|r| r.iter().map(u32::to_string).collect()).collect();
                    let text = grid
                        .iter()
                        .map(|r| r.iter().map(|x| format!("{x:>4}")).collect::<String>() + "\n")
                        .collect();
                    let header: Vec<String> = (0..code.topology().n).map(|j| format!("c{j}")).collect();
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    let emit = Emit::new(
                        json!({"command": "decode", "grid": grid, "recovered": word.erased()}),
                        &header,
                        rows,
                        text,
                    );
                    Ok((emit, 0))
                }
                Err(e @ (Error::Uncorrectable | Error::InconsistentWord)) => {
                    Err(Failure { code: 1, error: e.name(), message: e.to_string() })
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Bounds { name, params, m, b, n, big_n, nv, delta, r, c_r, c1, c2 } => {
            let name: BoundName = name.parse().map_err(|e: Error| usage(e.to_string()))?;
            let mut p: Params = BTreeMap::new();
            for (k, v) in [("m", m), ("b", b), ("n", n), ("N", big_n), ("nv", nv), ("delta", delta), ("r", r)] {
                if let Some(v) = v {
                    p.insert(k.into(), Param::Int(v));
                }
            }
            for (k, v) in [("c_r", c_r), ("c1", c1), ("c2", c2)] {
                if let Some(v) = v {
                    p.insert(k.into(), Param::Real(v));
                }
            }
            for (k, v) in params {
                let parsed = match v.parse::<u64>() {
                    Ok(x) => Param::Int(x),
                    Err(_) => Param::Real(
                        v.parse().map_err(|_| usage(format!("parameter {k} is not a number")))?,
                    ),
                };
                p.insert(k, parsed);
            }
            let report = bound(name, &p)?;
            let emit = Emit::new(
                json!({"command": "bounds", "report": report}),
                &["name", "value", "approx"],
                vec![vec![name.to_string(), report.value.to_string(), report.approx.to_string()]],
                format!("{name} = {} (≈ {})\n{}\n", report.value, report.approx, report.applicability),
            );
            Ok((emit, 0))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    m: usize,
    b: usize,
    n: usize,
    q_min: u32,
    q_max: u32,
    strategy: StrategyArg,
    fields: Family,
    seed: u64,
    budget: u64,
    cap: u64,
    out: Option<PathBuf>,
) -> Result<(Emit, u8), Failure> {
    let strategy = match strategy {
        StrategyArg::GreedyIndep => Strategy::GreedyIndep,
        StrategyArg::Random => Strategy::Random,
    };
    let mut progress: Vec<Value> = Vec::new();
    let mut rows = Vec::new();
    let mut found = None;
    for q in q_min.max(2)..=q_max {
        let Some(spec) = FieldSpec::for_order(q) else { continue };
        let wanted = match fields {
            Family::All => true,
            Family::Binary => spec.p == 2,
            Family::Prime => spec.k == 1,
        };
        if !wanted {
            continue;
        }
        let mut params = SearchParams::new(m, b, n, spec, strategy);
        params.seed = seed;
        params.budget = budget;
        params.instance_cap = cap;
        let trace = search_mr_traced(&params);
        let outcome = match &trace.outcome {
            Ok(_) => "certified",
            Err(Error::NotFound(_)) => "not_found",
            Err(e @ (Error::UnsupportedShape(_) | Error::InvalidTopology(_))) => {
                return Err(e.clone().into())
            }
            Err(e) => e.name(),
        };
        progress.push(json!({"q": q, "trials": trace.trials, "outcome": outcome}));
        rows.push(vec![q.to_string(), trace.trials.to_string(), outcome.to_string()]);
        if let Ok(code) = trace.outcome {
            found = Some((q, code));
            break;
        }
    }
    let text: String = rows.iter().map(|r| format!("q = {:>6}  trials = {:>6}  {}\n", r[0], r[1], r[2])).collect();
    match found {
        Some((q, code)) => {
            if let Some(path) = out {
                let body = serde_json::to_string_pretty(&code).unwrap() + "\n";
                fs::write(&path, body)
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let emit = Emit::new(
                json!({"command": "search", "progress": progress, "q": q, "code": code}),
                &["q", "trials", "outcome"],
                rows,
                format!("{text}found an MR code over GF({q})\n"),
            );
            Ok((emit, 0))
        }
        None => {
            let emit = Emit::new(
                json!({"command": "search", "progress": progress, "q": null, "code": null}),
                &["q", "trials", "outcome"],
                rows,
                format!("{text}NotFound: no certified code for q in [{q_min}, {q_max}]\n"),
            );
            Ok((emit, 1))
        }
    }
}

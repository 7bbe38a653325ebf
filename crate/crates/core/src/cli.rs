//! Command-line front end. Every command prints one JSON document
//! `{"status": ..., "payload": ...}` (or CSV where offered) on stdout and
//! reports its wall time on stderr, so stdout is byte-identical across runs.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance;
use crate::cantor::{ClopenSet, PrunedTree, TernaryCode, DEFAULT_MAX_ENUM_DEPTH};
use crate::capacity::{
    capacity_bruteforce, capacity_clopen, choquet_invert, oracle_for, recover_mu_star,
    CapacityOracle, CapacityTable,
};
use crate::constructions::{
    build_measure_zero_positive_capacity, build_usc_capacity, DEFAULT_LEAF_BUDGET,
};
use crate::error::Error;
use crate::measure::{lebesgue, MeasureSpec};
use crate::random_lab::{
    claim1_check, classify_regime, mc_capacity, mc_intersection, ml_test_indices, pn_enclosure,
    pn_exact, sample_tree, PN_EXACT_MAX,
};
use crate::rational::{self, Rational};

pub const MAX_ENUM_DEPTH_VAR: &str = "CAPLAB_MAX_ENUM_DEPTH";

#[derive(Parser, Debug)]
#[command(
    name = "caplab",
    version,
    about = "Exact capacities and random closed sets on Cantor space"
)]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity of a clopen set by the splitting recursion (uniform specs).
    Capacity {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        clopen: String,
    },
    /// Capacity by summing over every tree of the given height.
    CapacityBrute {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        clopen: String,
        /// Tree height; defaults to the longest leaf.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Validate a spec, or evaluate it on a code or tree.
    Measure {
        #[arg(long)]
        spec: String,
        #[arg(long, conflicts_with = "tree")]
        code: Option<String>,
        /// Tree JSON `{"height":n,"nodes":[...]}`.
        #[arg(long)]
        tree: Option<String>,
    },
    /// Fair-coin measure of a clopen set.
    Lebesgue {
        #[arg(long)]
        clopen: String,
    },
    /// Ternary code of a tree.
    Encode {
        #[arg(long)]
        tree: String,
    },
    /// Tree of a ternary code.
    Decode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        height: usize,
    },
    /// Intersection probabilities p_0..p_n.
    Pn {
        #[arg(long, value_parser = parse_rational)]
        b0: Rational,
        #[arg(long, value_parser = parse_rational)]
        b1: Rational,
        #[arg(long)]
        n: usize,
        /// Precision of the certified brackets used past the exact range.
        #[arg(long, default_value_t = 128)]
        bits: usize,
    },
    /// Zero or positive capacity regime.
    Classify {
        #[arg(long, value_parser = parse_rational)]
        b0: Rational,
        #[arg(long, value_parser = parse_rational)]
        b1: Rational,
    },
    /// Indices m_0..m_R with p_(m_r) < 2^(-2r-1).
    Mltest {
        #[arg(long, value_parser = parse_rational)]
        b0: Rational,
        #[arg(long, value_parser = parse_rational)]
        b1: Rational,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 100_000)]
        cutoff: usize,
    },
    /// One random tree.
    Sample {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Monte Carlo frequency of intersecting pairs against p_depth.
    McIntersect {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Monte Carlo hit frequency of a clopen set against its capacity.
    McCapacity {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        clopen: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Mass of often-hit patterns against 2^n p_m.
    Claim1 {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Branching weights from a capacity.
    ChoquetInvert {
        #[arg(long, required_unless_present = "table")]
        spec: Option<String>,
        /// Capacity table, a list of {clopen, value}.
        #[arg(long, conflicts_with = "spec")]
        table: Option<String>,
        #[arg(long)]
        depth: usize,
    },
    /// Tree probabilities from a capacity by inclusion-exclusion.
    RecoverMustar {
        #[arg(long, required_unless_present = "table")]
        spec: Option<String>,
        #[arg(long, conflicts_with = "spec")]
        table: Option<String>,
        #[arg(long)]
        height: usize,
    },
    /// Nested clopen sets tracking decreasing capacity targets.
    ConstructUsc {
        #[arg(long, value_parser = parse_rational)]
        b0: Rational,
        #[arg(long, value_parser = parse_rational)]
        b1: Rational,
        /// JSON list of rationals, starting at "1".
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = DEFAULT_LEAF_BUDGET)]
        leaf_budget: usize,
    },
    /// Measure-zero set with positive capacity.
    ConstructT6 {
        #[arg(long, value_parser = parse_rational)]
        b: Rational,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        cutoff: usize,
    },
    /// Run the acceptance suite.
    Selftest,
}

/// What a finished invocation produced.
#[derive(Debug)]
pub struct Invocation {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

enum Output {
    Json(Value),
    Csv(String),
    /// Payload plus a failing status that still counts as a result.
    Failed(Value),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Inline JSON when the argument looks like JSON, a file path otherwise.
fn read_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Outcome<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') || trimmed.starts_with('"') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| usage(format!("cannot read {what} file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("bad {what} JSON: {e}")))
}

fn approx_value(v: &Rational) -> Value {
    json!({ "value": v.to_string(), "approx": rational::approx(v) })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize")
}

fn max_enum_depth() -> Outcome<usize> {
    match std::env::var(MAX_ENUM_DEPTH_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            usage(format!(
                "{MAX_ENUM_DEPTH_VAR} must be a natural number, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_ENUM_DEPTH),
    }
}

fn capacity_source(
    spec: Option<&str>,
    table: Option<&str>,
    max_depth: usize,
) -> Outcome<Box<dyn CapacityOracle>> {
    match (spec, table) {
        (Some(s), None) => Ok(oracle_for(
            &read_json::<MeasureSpec>(s, "spec")?,
            max_depth,
        )?),
        (None, Some(t)) => Ok(Box::new(read_json::<CapacityTable>(t, "capacity table")?)),
        _ => Err(usage("give exactly one of --spec and --table")),
    }
}

fn execute(command: &Command, format: Format) -> Outcome<Output> {
    let csv = format == Format::Csv;
    let csv_only = |name: &str| -> Outcome<()> {
        if csv {
            Err(usage(format!("{name} has no CSV output")))
        } else {
            Ok(())
        }
    };
    match command {
        Command::Capacity { spec, clopen } => {
            csv_only("capacity")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            let q: ClopenSet = read_json(clopen, "clopen")?;
            let v = capacity_clopen(&spec, &q)?;
            Ok(Output::Json(
                json!({ "clopen": q, "value": v.to_string(), "approx": rational::approx(&v) }),
            ))
        }
        Command::CapacityBrute {
            spec,
            clopen,
            depth,
        } => {
            csv_only("capacity-brute")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            let q: ClopenSet = read_json(clopen, "clopen")?;
            let depth = depth.unwrap_or(q.max_leaf_len());
            let v = capacity_bruteforce(&spec, &q, depth, max_enum_depth()?)?;
            Ok(Output::Json(json!({
                "clopen": q, "depth": depth, "value": v.to_string(), "approx": rational::approx(&v)
            })))
        }
        Command::Measure { spec, code, tree } => {
            csv_only("measure")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            let report = spec.validate();
            if let Some(code) = code {
                let code: TernaryCode = code.parse().map_err(|e: Error| usage(e.to_string()))?;
                spec.ensure_valid()?;
                let v = spec.mu_code(&code)?;
                return Ok(Output::Json(
                    json!({ "code": code, "value": v.to_string(), "approx": rational::approx(&v) }),
                ));
            }
            if let Some(tree) = tree {
                let tree: PrunedTree = read_json(tree, "tree")?;
                spec.ensure_valid()?;
                let v = spec.mu_star_tree(&tree)?;
                return Ok(Output::Json(json!({
                    "code": tree.encode(), "value": v.to_string(), "approx": rational::approx(&v)
                })));
            }
            Ok(if report.valid {
                Output::Json(to_value(&report))
            } else {
                Output::Failed(to_value(&report))
            })
        }
        Command::Lebesgue { clopen } => {
            csv_only("lebesgue")?;
            let q: ClopenSet = read_json(clopen, "clopen")?;
            Ok(Output::Json(approx_value(&lebesgue(&q))))
        }
        Command::Encode { tree } => {
            csv_only("encode")?;
            let tree: PrunedTree = read_json(tree, "tree")?;
            Ok(Output::Json(
                json!({ "code": tree.encode(), "height": tree.height() }),
            ))
        }
        Command::Decode { code, height } => {
            csv_only("decode")?;
            let code: TernaryCode = code.parse().map_err(|e: Error| usage(e.to_string()))?;
            let tree = PrunedTree::decode(&code, *height)?;
            Ok(Output::Json(to_value(&tree)))
        }
        Command::Pn { b0, b1, n, bits } => {
            if *n <= PN_EXACT_MAX {
                let seq = pn_exact(b0, b1, *n)?;
                Ok(if csv {
                    Output::Csv(seq.to_csv())
                } else {
                    Output::Json(to_value(&seq))
                })
            } else {
                let enc = pn_enclosure(b0, b1, *n, *bits)?;
                Ok(if csv {
                    Output::Csv(enc.to_csv())
                } else {
                    Output::Json(to_value(&enc))
                })
            }
        }
        Command::Classify { b0, b1 } => {
            csv_only("classify")?;
            Ok(Output::Json(to_value(&classify_regime(b0, b1)?)))
        }
        Command::Mltest { b0, b1, r, cutoff } => {
            let m = ml_test_indices(b0, b1, *r, *cutoff)?;
            if csv {
                let mut out = String::from("r,m_r\n");
                for (i, v) in m.iter().enumerate() {
                    writeln!(out, "{i},{v}").expect("write to string");
                }
                return Ok(Output::Csv(out));
            }
            Ok(Output::Json(
                json!({ "b0": b0.to_string(), "b1": b1.to_string(), "indices": m }),
            ))
        }
        Command::Sample { spec, depth, seed } => {
            csv_only("sample")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            let tree = sample_tree(&spec, *depth, *seed)?;
            Ok(Output::Json(
                json!({ "seed": seed, "code": tree.encode(), "tree": tree }),
            ))
        }
        Command::McIntersect {
            spec,
            depth,
            trials,
            seed,
        } => {
            csv_only("mc-intersect")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            Ok(Output::Json(to_value(&mc_intersection(
                &spec, *depth, *trials, *seed,
            )?)))
        }
        Command::McCapacity {
            spec,
            clopen,
            trials,
            seed,
        } => {
            csv_only("mc-capacity")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            let q: ClopenSet = read_json(clopen, "clopen")?;
            Ok(Output::Json(to_value(&mc_capacity(
                &spec,
                &q,
                *trials,
                *seed,
                max_enum_depth()?,
            )?)))
        }
        Command::Claim1 { spec, m, n } => {
            csv_only("claim1")?;
            let spec: MeasureSpec = read_json(spec, "spec")?;
            let report = claim1_check(&spec, *m, *n)?;
            Ok(if report.holds {
                Output::Json(to_value(&report))
            } else {
                Output::Failed(to_value(&report))
            })
        }
        Command::ChoquetInvert { spec, table, depth } => {
            csv_only("choquet-invert")?;
            let max_depth = max_enum_depth()?;
            let cap = capacity_source(spec.as_deref(), table.as_deref(), max_depth)?;
            Ok(Output::Json(to_value(&choquet_invert(
                cap.as_ref(),
                *depth,
                max_depth,
            )?)))
        }
        Command::RecoverMustar {
            spec,
            table,
            height,
        } => {
            let max_depth = max_enum_depth()?;
            let cap = capacity_source(spec.as_deref(), table.as_deref(), max_depth)?;
            let masses = recover_mu_star(cap.as_ref(), *height, max_depth)?;
            if csv {
                let mut out = String::from("code,mass,mass_approx\n");
                for (t, m) in &masses {
                    writeln!(out, "{},{m},{}", t.encode(), rational::approx(m))
                        .expect("write to string");
                }
                return Ok(Output::Csv(out));
            }
            let rows: Vec<Value> = masses
                .iter()
                .map(|(t, m)| json!({ "code": t.encode(), "mass": m.to_string(), "approx": rational::approx(m) }))
                .collect();
            Ok(Output::Json(json!({ "height": height, "trees": rows })))
        }
        Command::ConstructUsc {
            b0,
            b1,
            targets,
            leaf_budget,
        } => {
            let texts: Vec<String> = read_json(targets, "targets")?;
            let targets = texts
                .iter()
                .map(|t| rational::parse(t).map_err(|e| usage(e.to_string())))
                .collect::<Outcome<Vec<Rational>>>()?;
            let trace = build_usc_capacity(b0, b1, &targets, *leaf_budget)?;
            if csv {
                let mut out = String::from("stage,target,s,capacity,capacity_approx,leaves\n");
                for (n, st) in trace.stages.iter().enumerate() {
                    writeln!(
                        out,
                        "{n},{},{},{},{},{}",
                        trace.targets[n],
                        st.s,
                        st.capacity,
                        st.approx,
                        st.clopen.leaves().len()
                    )
                    .expect("write to string");
                }
                return Ok(Output::Csv(out));
            }
            Ok(Output::Json(to_value(&trace)))
        }
        Command::ConstructT6 { b, k, cutoff } => {
            let res = build_measure_zero_positive_capacity(b, *k, *cutoff)?;
            if csv {
                let mut out = String::from("k,index,capacity,capacity_approx,threshold\n");
                for i in 0..res.indices.len() {
                    writeln!(
                        out,
                        "{i},{},{},{},{}",
                        res.indices[i],
                        res.capacities[i],
                        res.capacities_approx[i],
                        res.thresholds[i]
                    )
                    .expect("write to string");
                }
                return Ok(Output::Csv(out));
            }
            Ok(Output::Json(to_value(&res)))
        }
        Command::Selftest => {
            csv_only("selftest")?;
            let outcomes = acceptance::run_all();
            let passed = outcomes.iter().all(|o| o.passed);
            // Timings vary between runs; keep them out of the payload.
            let lines: Vec<Value> = outcomes
                .iter()
                .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }))
                .collect();
            let payload = json!({ "passed": passed, "criteria": lines });
            Ok(if passed {
                Output::Json(payload)
            } else {
                Output::Failed(payload)
            })
        }
    }
}

fn render(status: &str, payload: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "status": status, "payload": payload }))
        .expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation {
                    exit_code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Invocation {
                    exit_code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let start = Instant::now();
    let result = execute(&cli.command, cli.format);
    let timing = format!("elapsed_ms={}\n", start.elapsed().as_millis());
    let (exit_code, body, mut stderr) = match result {
        Ok(Output::Json(v)) => (0, render("ok", v), String::new()),
        Ok(Output::Csv(text)) => (0, text, String::new()),
        Ok(Output::Failed(v)) => (1, render("failed", v), String::new()),
        Err(Failure::Domain(e)) => (
            1,
            render(
                "error",
                json!({ "kind": e.kind(), "message": e.to_string() }),
            ),
            format!("error: {e}\n"),
        ),
        Err(Failure::Usage(msg)) => {
            return Invocation {
                exit_code: 2,
                stdout: String::new(),
                stderr: format!("usage error: {msg}\n"),
            }
        }
    };
    stderr.push_str(&timing);
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Invocation {
                exit_code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Invocation {
                exit_code: 2,
                stdout: String::new(),
                stderr: format!("cannot write {}: {e}\n", path.display()),
            },
        },
        None => Invocation {
            exit_code,
            stdout: body,
            stderr,
        },
    }
}

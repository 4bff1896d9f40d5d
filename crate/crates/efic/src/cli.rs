//! The `efic` command line.
//!
//! Exit codes: 0 on success (including analyses that find a property fails),
//! 2 when the requested object does not exist (payments on a graph with a
//! negative cycle, a partition whose hypothesis fails), 3 on input errors.
//! Errors are written to stderr as a JSON object.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use efic_core::fixtures::{gen_example, ExampleId};
use efic_core::{
    build_graph, classify, compute_payments, pareto_frontier, partition_payments, prune_graph,
    shift_graph, verify_on_graph, ConstraintGraph, Error, Instance, TrustPartition,
    DEFAULT_TOLERANCE,
};
use serde::Serialize;

use crate::document::{instance_to_json, parse_instance, FormatError};
use crate::dot::to_dot;
use crate::report::{
    check_view, frontier_csv, frontier_view, parse_payments, partition_view, payment_rows,
    payments_csv, violation_view, witness_view, PaymentsView, ShiftView, ViolationView,
    WitnessView,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISSING: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "efic",
    version,
    about = "Envy-freeness and truthfulness analysis of tabulated allocation functions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Comparison tolerance for negativity and violations.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write the analyzed constraint graph as Graphviz text.
    #[arg(long, global = true, value_name = "PATH")]
    export_graph: Option<PathBuf>,
    /// Output format; csv is available for `payments` and `frontier`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide EF-, IC- and joint implementability, with witness cycles.
    Check {
        /// Instance document; stdin when absent or `-`.
        input: Option<PathBuf>,
    },
    /// Shortest-path payments, optionally on a shifted graph.
    Payments {
        input: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["EF", "IC"], allow_negative_numbers = true)]
        shift: Option<Vec<f64>>,
    },
    /// Minimal (c_ef, c_ic) shifts removing every negative cycle.
    Frontier { input: Option<PathBuf> },
    /// Payments envy-free for trusted agents and truthful for the rest.
    Partition {
        input: Option<PathBuf>,
        /// Comma-separated 0-based agent indices; empty for none.
        #[arg(long, value_name = "LIST")]
        trusted: String,
    },
    /// Measure EF and IC violations of a payment table (JSON or CSV).
    Verify {
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        payments: PathBuf,
    },
    /// Write a built-in example instance.
    GenExample {
        /// fig1-single-item, claim1-dictator, claim2-proportional or claim3-8cycle
        /// (the part before the first `-` is enough).
        name: String,
        /// Override a parameter; lists are comma-separated.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    witness: Option<WitnessView>,
}

impl Failure {
    fn input(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            kind,
            message: message.into(),
            witness: None,
        }
    }

    fn from_format(e: FormatError) -> Self {
        let kind = match e {
            FormatError::Json(_) | FormatError::Csv(_) => "parse",
            FormatError::Model(_) => "validation",
            FormatError::Payments(_) => "payments",
        };
        Self::input(kind, e.to_string())
    }

    fn from_core(g: &ConstraintGraph, e: Error) -> Self {
        let message = e.to_string();
        let missing = |kind, w| Self {
            code: EXIT_MISSING,
            kind,
            message: message.clone(),
            witness: Some(witness_view(g, w)),
        };
        match &e {
            Error::NegativeCycle(w) => missing("negative_cycle", w),
            Error::PurelyOneKindCycle { witness, .. } => missing("partition_hypothesis", witness),
            Error::PrunedGraphNegativeCycle(w) => missing("pruned_negative_cycle", w),
            Error::InfeasibleAxis { witness, .. } => missing("infeasible_axis", witness),
            Error::Model(_) => Self::input("validation", message),
            _ => Self::input("argument", message),
        }
    }
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: i32,
    kind: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a WitnessView>,
}

#[derive(Serialize)]
struct VerifyView {
    envy_free: bool,
    incentive_compatible: bool,
    #[serde(flatten)]
    violations: ViolationView,
}

/// Runs one invocation; returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let f = Failure::input("usage", e.to_string().trim_end());
            return report_failure(&f, stderr);
        }
    };
    match execute(&cli, stdin) {
        Ok(Output { text, graph }) => {
            if let Some(path) = &cli.export_graph {
                if let Some(g) = &graph {
                    if let Err(e) = std::fs::write(path, to_dot(g)) {
                        return report_failure(
                            &Failure::input("io", format!("{}: {e}", path.display())),
                            stderr,
                        );
                    }
                }
            }
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        return report_failure(
                            &Failure::input("io", format!("{}: {e}", path.display())),
                            stderr,
                        );
                    }
                }
                None => {
                    if stdout.write_all(text.as_bytes()).is_err() {
                        return EXIT_INPUT;
                    }
                }
            }
            EXIT_OK
        }
        Err(f) => report_failure(&f, stderr),
    }
}

fn report_failure(f: &Failure, stderr: &mut dyn Write) -> i32 {
    let doc = ErrorDoc {
        error: ErrorBody {
            code: f.code,
            kind: f.kind,
            message: &f.message,
            witness: f.witness.as_ref(),
        },
    };
    let _ = writeln!(
        stderr,
        "{}",
        serde_json::to_string_pretty(&doc).expect("error documents serialize")
    );
    f.code
}

struct Output {
    text: String,
    graph: Option<ConstraintGraph>,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn read_input(path: Option<&Path>, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::input("io", format!("{}: {e}", p.display())))?;
        }
        _ => {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::input("io", format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn load(cli: &Cli, path: Option<&Path>, stdin: &mut dyn Read) -> Result<Instance, Failure> {
    let text = read_input(path, stdin)?;
    let inst = parse_instance(&text).map_err(Failure::from_format)?;
    inst.with_tolerance(cli.tolerance)
        .map_err(|e| Failure::input("argument", e.to_string()))
}

fn require_json(cli: &Cli, command: &str) -> Result<(), Failure> {
    match cli.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::input(
            "argument",
            format!("{command} has no csv output"),
        )),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Output, Failure> {
    match &cli.command {
        Command::Check { input } => {
            require_json(cli, "check")?;
            let inst = load(cli, input.as_deref(), stdin)?;
            let g = build_graph(&inst);
            let text = json(&check_view(&g, &classify(&inst)));
            Ok(Output {
                text,
                graph: Some(g),
            })
        }
        Command::Payments { input, shift } => {
            let inst = load(cli, input.as_deref(), stdin)?;
            let g = build_graph(&inst);
            let (c_ef, c_ic) = match shift.as_deref() {
                Some([x, y]) => (*x, *y),
                _ => (0.0, 0.0),
            };
            let shifted = shift_graph(&g, c_ef, c_ic).map_err(|e| Failure::from_core(&g, e))?;
            let p = compute_payments(&shifted).map_err(|e| Failure::from_core(&g, e))?;
            let rows = payment_rows(&g, &p);
            let text = match cli.format {
                Format::Csv => payments_csv(&rows).map_err(Failure::from_format)?,
                Format::Json => {
                    let r = verify_on_graph(&g, &p).map_err(|e| Failure::from_core(&g, e))?;
                    json(&PaymentsView {
                        shift: ShiftView { c_ef, c_ic },
                        payments: rows,
                        violations: violation_view(&g, &r),
                    })
                }
            };
            Ok(Output {
                text,
                graph: Some(shifted),
            })
        }
        Command::Frontier { input } => {
            let inst = load(cli, input.as_deref(), stdin)?;
            let g = build_graph(&inst);
            let f = pareto_frontier(&g);
            let text = match cli.format {
                Format::Csv => frontier_csv(&f).map_err(Failure::from_format)?,
                Format::Json => json(&frontier_view(&g, &f)),
            };
            Ok(Output {
                text,
                graph: Some(g),
            })
        }
        Command::Partition { input, trusted } => {
            require_json(cli, "partition")?;
            let inst = load(cli, input.as_deref(), stdin)?;
            let g = build_graph(&inst);
            let agents = parse_agent_list(trusted)?;
            let part = TrustPartition::new(inst.num_agents(), agents)
                .map_err(|e| Failure::from_core(&g, e))?;
            let out = partition_payments(&inst, &part).map_err(|e| Failure::from_core(&g, e))?;
            let text = json(&partition_view(&g, &part, &out));
            Ok(Output {
                text,
                graph: Some(prune_graph(&g, &part)),
            })
        }
        Command::Verify { input, payments } => {
            require_json(cli, "verify")?;
            let inst = load(cli, input.as_deref(), stdin)?;
            let g = build_graph(&inst);
            let text = std::fs::read_to_string(payments)
                .map_err(|e| Failure::input("io", format!("{}: {e}", payments.display())))?;
            let p = parse_payments(&g, &text).map_err(Failure::from_format)?;
            let r = verify_on_graph(&g, &p).map_err(|e| Failure::from_core(&g, e))?;
            let tol = inst.tolerance();
            let text = json(&VerifyView {
                envy_free: r.is_envy_free(tol),
                incentive_compatible: r.is_incentive_compatible(tol),
                violations: violation_view(&g, &r),
            });
            Ok(Output {
                text,
                graph: Some(g),
            })
        }
        Command::GenExample { name, params } => {
            require_json(cli, "gen-example")?;
            let mut id = ExampleId::by_name(name).ok_or_else(|| {
                Failure::input(
                    "argument",
                    format!(
                        "unknown example {name:?}; expected one of {}",
                        ExampleId::NAMES.join(", ")
                    ),
                )
            })?;
            for p in params {
                apply_param(&mut id, p)?;
            }
            let inst = gen_example(&id).map_err(|e| Failure::input("argument", e.to_string()))?;
            let mut text = instance_to_json(&inst);
            text.push('\n');
            Ok(Output {
                text,
                graph: Some(build_graph(&inst)),
            })
        }
    }
}

fn parse_agent_list(list: &str) -> Result<Vec<usize>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| {
                Failure::input("argument", format!("bad agent index {s:?} in --trusted"))
            })
        })
        .collect()
}

fn parse_reals(key: &str, value: &str) -> Result<Vec<f64>, Failure> {
    value
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Failure::input("argument", format!("parameter {key}: bad number {s:?}"))
            })
        })
        .collect()
}

fn parse_real(key: &str, value: &str) -> Result<f64, Failure> {
    match parse_reals(key, value)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(Failure::input(
            "argument",
            format!("parameter {key} takes one number"),
        )),
    }
}

fn apply_param(id: &mut ExampleId, param: &str) -> Result<(), Failure> {
    let (key, value) = param.split_once('=').ok_or_else(|| {
        Failure::input("argument", format!("parameter {param:?} is not KEY=VALUE"))
    })?;
    let key = key.trim();
    match (id, key) {
        (ExampleId::Fig1 { agents, .. }, "agents") => {
            *agents = value.trim().parse().map_err(|_| {
                Failure::input("argument", format!("parameter agents: bad count {value:?}"))
            })?;
        }
        (ExampleId::Fig1 { grid, .. }, "grid") => *grid = parse_reals(key, value)?,
        (ExampleId::Claim1 { values }, "values") => *values = parse_reals(key, value)?,
        (ExampleId::Claim2 { z1, .. }, "z1") => *z1 = parse_reals(key, value)?,
        (ExampleId::Claim2 { z2, .. }, "z2") => *z2 = parse_reals(key, value)?,
        (ExampleId::Claim3 { z3, .. }, "z3") => *z3 = parse_real(key, value)?,
        (ExampleId::Claim3 { z1_0, .. }, "z1_0") => *z1_0 = parse_real(key, value)?,
        (ExampleId::Claim3 { z1_1, .. }, "z1_1") => *z1_1 = parse_real(key, value)?,
        (ExampleId::Claim3 { z2_0, .. }, "z2_0") => *z2_0 = parse_real(key, value)?,
        (ExampleId::Claim3 { z2_1, .. }, "z2_1") => *z2_1 = parse_real(key, value)?,
        (id, _) => {
            return Err(Failure::input(
                "argument",
                format!("{} has no parameter {key:?}", id.name()),
            ))
        }
    }
    Ok(())
}

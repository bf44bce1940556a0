// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage, input or
//! parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cells::CellName;
use crate::gate::{Bit, Fredkin};
use crate::io::{emit_netlist, emit_vcd, parse_netlist, read_stimulus, ParseError};
use crate::netlist::{NetId, SequentialCircuit};
use crate::sim::{Simulator, Trace};
use crate::verify::{behavior_table, check_auto, Method, Verdict, DEFAULT_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_WIDTH: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "fredsim", version, about = "Fredkin-gate circuit toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Netlist path, `-` for standard input, or `gen:<cell>`.
    file: String,
    /// Width used for `gen:<cell>` sources.
    #[arg(short = 'n', default_value_t = DEFAULT_WIDTH)]
    n: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate, then verify reversibility and conservativity.
    Check {
        #[command(flatten)]
        source: Source,
        /// Largest number of nets enumerated exhaustively.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Gate, garbage and ancilla counts.
    Metrics {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        json: bool,
    },
    /// Behavior table over the primary inputs and state.
    Table {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Clocked simulation.
    Sim {
        #[command(flatten)]
        source: Source,
        /// CSV file: header of input names, one 0/1 row per step.
        #[arg(long)]
        stimulus: String,
        /// Write a value change dump here.
        #[arg(long)]
        vcd: Option<PathBuf>,
        /// Initial state overrides, `name=bit,...`.
        #[arg(long, value_delimiter = ',')]
        init: Vec<String>,
    },
    /// Print a catalog cell as a netlist.
    Gen {
        cell: String,
        #[arg(short = 'n', default_value_t = DEFAULT_WIDTH)]
        n: usize,
    },
}

/// Error carrying its exit status.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

struct Streams<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Streams<'_> {
    fn read_text(&mut self, path: &str) -> Result<String, Failure> {
        let mut text = String::new();
        if path == "-" {
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| usage(format!("standard input: {e}")))?;
        } else {
            text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
        }
        Ok(text)
    }

    fn load(&mut self, source: &Source) -> Result<Result<SequentialCircuit, ParseError>, Failure> {
        if let Some(cell) = source.file.strip_prefix("gen:") {
            return Ok(Ok(build_cell(cell, source.n)?));
        }
        let text = self.read_text(&source.file)?;
        Ok(parse_netlist(&text))
    }

    /// Loads a circuit, treating any parse error as a usage error.
    fn load_valid(&mut self, source: &Source) -> Result<SequentialCircuit, Failure> {
        self.load(source)?
            .map_err(|e| usage(format!("{}: {e}", source.file)))
    }
}

fn build_cell(name: &str, n: usize) -> Result<SequentialCircuit, Failure> {
    let cell: CellName = name.parse().map_err(|e| {
        let names: Vec<&str> = CellName::ALL.iter().map(|c| c.as_str()).collect();
        usage(format!("{e}; cells: {}", names.join(", ")))
    })?;
    cell.build(n).map_err(|e| usage(e.to_string()))
}

fn write_out(w: &mut dyn Write, text: &str) -> Result<(), Failure> {
    w.write_all(text.as_bytes())
        .map_err(|e| usage(format!("write failed: {e}")))
}

/// Runs the command line `args` (program name first) and returns the exit status.
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
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let mut io = Streams {
        stdin,
        stdout,
        stderr,
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, io: &mut Streams<'_>) -> Result<i32, Failure> {
    match command {
        Command::Check { source, cap } => check(&source, cap, io),
        Command::Metrics { source, json } => {
            let c = io.load_valid(&source)?;
            let m = c.metrics().map_err(|e| usage(e.to_string()))?;
            let text = if json {
                serde_json::to_string(&m).map_err(|e| usage(e.to_string()))? + "\n"
            } else {
                let rows = [
                    ("gate_count", m.gate_count),
                    ("garbage_count", m.garbage_count),
                    ("ancilla_count", m.ancilla_count),
                    ("primary_input_count", m.primary_input_count),
                    ("primary_output_count", m.primary_output_count),
                    ("state_count", m.state_count),
                ];
                rows.iter().map(|(k, v)| format!("{k:<22}{v}\n")).collect()
            };
            write_out(io.stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Table { source, cap } => {
            let c = io.load_valid(&source)?;
            let table = behavior_table(c.core(), cap).map_err(|e| usage(e.to_string()))?;
            let names = |nets: &[NetId]| {
                nets.iter()
                    .map(|n| n.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let bits = |v: &[Bit]| {
                v.iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let mut text = format!(
                "{} | {}\n",
                names(&table.input_nets),
                names(&table.terminal_nets)
            );
            for (i, t) in &table.rows {
                text.push_str(&format!("{} | {}\n", bits(i), bits(t)));
            }
            write_out(io.stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Sim {
            source,
            stimulus,
            vcd,
            init,
        } => simulate(&source, &stimulus, vcd, &init, io),
        Command::Gen { cell, n } => {
            let c = build_cell(&cell, n)?;
            let text = emit_netlist(&c).map_err(|e| usage(e.to_string()))?;
            write_out(io.stdout, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn describe(v: &Verdict) -> String {
    let how = match v.method {
        Method::Exhaustive { assignments } => format!("exhaustive, {assignments} assignments"),
        Method::Compositional => "compositional".to_string(),
    };
    match &v.witness {
        None => format!("ok ({how})"),
        Some(w) => format!("FAILED ({how}): {w:?}"),
    }
}

fn check(source: &Source, cap: usize, io: &mut Streams<'_>) -> Result<i32, Failure> {
    let circuit = match io.load(source)? {
        Ok(c) => c,
        Err(e @ ParseError::Semantic(_)) => {
            write_out(io.stdout, &format!("validate: FAILED\n{e}\n"))?;
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(usage(format!("{}: {e}", source.file))),
    };
    let report = check_auto(circuit.core(), &Fredkin, cap).map_err(|e| usage(e.to_string()))?;
    let text = format!(
        "validate: ok\nreversible: {}\nconservative: {}\n",
        describe(&report.reversible),
        describe(&report.conservative)
    );
    write_out(io.stdout, &text)?;
    Ok(
        if report.reversible.holds() && report.conservative.holds() {
            EXIT_OK
        } else {
            EXIT_FAIL
        },
    )
}

fn parse_init(items: &[String]) -> Result<BTreeMap<NetId, Bit>, Failure> {
    let mut map = BTreeMap::new();
    for item in items.iter().filter(|s| !s.trim().is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("--init expects name=bit, got `{item}`")))?;
        let net = NetId::new(name.trim()).map_err(|e| usage(e.to_string()))?;
        let bit = match value.trim() {
            "0" => Bit::ZERO,
            "1" => Bit::ONE,
            other => return Err(usage(format!("--init value `{other}` is not 0 or 1"))),
        };
        map.insert(net, bit);
    }
    Ok(map)
}

fn render_trace(trace: &Trace) -> String {
    let join = |nets: &[NetId]| {
        nets.iter()
            .map(|n| n.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut text = format!(
        "step | {} | {} | {}\n",
        join(&trace.input_nets),
        join(&trace.output_nets),
        join(&trace.state_nets)
    );
    let bits = |m: &crate::sim::BitMap| {
        m.values()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for s in &trace.steps {
        text.push_str(&format!(
            "{} | {} | {} | {}\n",
            s.step_index,
            bits(&s.inputs),
            bits(&s.outputs),
            bits(&s.state_after)
        ));
    }
    let last: Vec<String> = trace
        .final_state()
        .iter()
        .map(|(n, b)| format!("{n}={b}"))
        .collect();
    text.push_str(&format!("final {}\n", last.join(" ")));
    text
}

fn simulate(
    source: &Source,
    stimulus: &str,
    vcd: Option<PathBuf>,
    init: &[String],
    io: &mut Streams<'_>,
) -> Result<i32, Failure> {
    let circuit = io.load_valid(source)?;
    let stim_text = io.read_text(stimulus)?;
    let stim =
        read_stimulus(stim_text.as_bytes()).map_err(|e| usage(format!("{stimulus}: {e}")))?;
    let overrides = parse_init(init)?;
    let sim = Simulator::new(&circuit).map_err(|e| usage(e.to_string()))?;
    let trace = sim
        .run(&stim, &overrides)
        .map_err(|e| usage(e.to_string()))?;
    for s in &trace.steps {
        for w in &s.warnings {
            let _ = writeln!(io.stderr, "warning: step {}: {w}", s.step_index);
        }
    }
    write_out(io.stdout, &render_trace(&trace))?;
    if let Some(path) = vcd {
        let text = emit_vcd(&trace).map_err(|e| usage(e.to_string()))?;
        fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

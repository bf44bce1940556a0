// SPDX-License-Identifier: Apache-2.0

//! Line-oriented netlist language.
//!
//! ```text
//! circuit <name>
//! input <id>...
//! const0 <id>...
//! const1 <id>...
//! state <fb> init <0|1> next <next>
//! gate <gid> F <x1> <x2> <x3> -> <y1> <y2> <y3>
//! output <id>...
//! garbage <id>...
//! end
//! ```
//!
//! `#` starts a comment. After the `circuit` line, declarations may appear in
//! any order and groups may repeat; gates must still be listed in
//! topological order. The emitter writes the canonical order shown above.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::gate::Bit;
use crate::netlist::{
    Circuit, Driver, GateInstance, NetId, NetlistError, Reference, SequentialCircuit, SinkRole,
    SourceRole, StateElement, Violation,
};

/// A structural violation with the line it is attributed to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatedViolation {
    pub line: usize,
    pub violation: Violation,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.violation)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    Semantic(Vec<LocatedViolation>),
}

impl ParseError {
    /// Line of the first reported problem.
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } => *line,
            ParseError::Semantic(v) => v.first().map_or(0, |v| v.line),
        }
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

impl<'a> Line<'a> {
    fn error(&self, at: usize, expected: &[&str]) -> ParseError {
        let (column, found) = match self.tokens.get(at) {
            Some(t) => (t.column, format!("`{}`", t.text)),
            None => (self.end_column, "end of line".to_string()),
        };
        ParseError::Syntax {
            line: self.number,
            column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn ident(&self, at: usize, what: &str) -> Result<NetId, ParseError> {
        self.tokens
            .get(at)
            .and_then(|t| NetId::new(t.text).ok())
            .ok_or_else(|| self.error(at, &[what]))
    }

    fn keyword(&self, at: usize, kw: &str) -> Result<(), ParseError> {
        match self.tokens.get(at) {
            Some(t) if t.text == kw => Ok(()),
            _ => Err(self.error(at, &[&format!("`{kw}`")])),
        }
    }

    fn finish(&self, at: usize) -> Result<(), ParseError> {
        if at < self.tokens.len() {
            Err(self.error(at, &["end of line"]))
        } else {
            Ok(())
        }
    }

    /// One or more identifiers from `at` to the end of the line.
    fn ident_list(&self, at: usize) -> Result<Vec<NetId>, ParseError> {
        if at >= self.tokens.len() {
            return Err(self.error(at, &["identifier"]));
        }
        (at..self.tokens.len())
            .map(|i| self.ident(i, "identifier"))
            .collect()
    }
}

fn lex(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body
            .char_indices()
            .chain(std::iter::once((body.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &body[s..pos],
                        column: body[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            lines.push(Line {
                number: i + 1,
                tokens,
                end_column: body.trim_end().chars().count() + 1,
            });
        }
    }
    lines
}

const DECLARATIONS: [&str; 8] = [
    "input", "const0", "const1", "state", "gate", "output", "garbage", "end",
];

/// Line numbers of everything declared, for attributing violations.
#[derive(Default)]
struct Provenance {
    sources: HashMap<NetId, Vec<usize>>,
    gate_outputs: HashMap<NetId, usize>,
    gates: Vec<usize>,
    sinks: HashMap<NetId, Vec<usize>>,
    states: Vec<usize>,
    circuit: usize,
}

impl Provenance {
    fn declared(&self, net: &NetId) -> Option<usize> {
        self.sources
            .get(net)
            .and_then(|l| l.first().copied())
            .or_else(|| self.gate_outputs.get(net).copied())
    }

    fn sink(&self, net: &NetId, last: bool) -> Option<usize> {
        self.sinks
            .get(net)
            .and_then(|l| if last { l.last() } else { l.first() })
            .copied()
    }

    fn state_mentioning(&self, states: &[StateElement], net: &NetId) -> Option<usize> {
        states
            .iter()
            .position(|s| &s.feedback == net || &s.next == net)
            .map(|i| self.states[i])
    }

    fn locate(&self, v: &Violation, circuit: &SequentialCircuit) -> usize {
        let line = match v {
            Violation::DuplicateDriver { net, driver } => match driver {
                Driver::Gate(g) => Some(self.gates[*g]),
                Driver::Source => self.sources.get(net).and_then(|l| l.last().copied()),
            },
            Violation::MultipleReaders { gate, .. }
            | Violation::RepeatedPin { gate }
            | Violation::DuplicateGateId { gate }
            | Violation::OutOfOrder { gate, .. } => Some(self.gates[*gate]),
            Violation::Cycle { gates } => gates.first().map(|g| self.gates[*g]),
            Violation::DanglingNet { net } => self.declared(net),
            Violation::UndeclaredNet { net, at } => match at {
                Reference::GateInput(g) => Some(self.gates[*g]),
                Reference::Sink(_) => self.sink(net, false),
                Reference::State(s) => Some(self.states[*s]),
            },
            Violation::SinkConsumed { net } => self.sink(net, false),
            Violation::DuplicateSink { net } => self.sink(net, true),
            Violation::UnpairedState { net } => self
                .state_mentioning(circuit.states(), net)
                .or_else(|| self.declared(net))
                .or_else(|| self.sink(net, false)),
        };
        line.unwrap_or(self.circuit)
    }
}

/// Parses and validates a netlist document.
pub fn parse_netlist(text: &str) -> Result<SequentialCircuit, ParseError> {
    let lines = lex(text);
    let mut iter = lines.iter();
    let first = iter.next().ok_or(ParseError::Syntax {
        line: 1,
        column: 1,
        expected: vec!["`circuit`".into()],
        found: "end of input".into(),
    })?;
    first.keyword(0, "circuit")?;
    let name = first.ident(1, "circuit name")?;
    first.finish(2)?;

    let mut prov = Provenance {
        circuit: first.number,
        ..Provenance::default()
    };
    let mut sources = Vec::new();
    let mut gates = Vec::new();
    let mut sinks = Vec::new();
    let mut states = Vec::new();
    let mut ended = false;

    for line in iter {
        if ended {
            return Err(line.error(0, &["end of input"]));
        }
        let n = line.number;
        let mut add_sources = |role: SourceRole, nets: Vec<NetId>| {
            for net in nets {
                prov.sources.entry(net.clone()).or_default().push(n);
                sources.push((net, role));
            }
        };
        match line.tokens[0].text {
            "input" => add_sources(SourceRole::PrimaryInput, line.ident_list(1)?),
            "const0" => add_sources(SourceRole::Const0, line.ident_list(1)?),
            "const1" => add_sources(SourceRole::Const1, line.ident_list(1)?),
            "state" => {
                let fb = line.ident(1, "state feedback net")?;
                line.keyword(2, "init")?;
                let init = match line.tokens.get(3).map(|t| t.text) {
                    Some("0") => Bit::ZERO,
                    Some("1") => Bit::ONE,
                    _ => return Err(line.error(3, &["`0`", "`1`"])),
                };
                line.keyword(4, "next")?;
                let next = line.ident(5, "state next net")?;
                line.finish(6)?;
                add_sources(SourceRole::StateFeedback, vec![fb.clone()]);
                prov.sinks.entry(next.clone()).or_default().push(n);
                sinks.push((next.clone(), SinkRole::StateNext));
                prov.states.push(n);
                states.push(StateElement {
                    feedback: fb,
                    next,
                    init,
                });
            }
            "gate" => {
                let id = line.ident(1, "gate id")?;
                line.keyword(2, "F")?;
                let x = [3, 4, 5].map(|i| line.ident(i, "input net"));
                let x = [x[0].clone()?, x[1].clone()?, x[2].clone()?];
                line.keyword(6, "->")?;
                let y = [7, 8, 9].map(|i| line.ident(i, "output net"));
                let y = [y[0].clone()?, y[1].clone()?, y[2].clone()?];
                line.finish(10)?;
                for net in &y {
                    prov.gate_outputs.entry(net.clone()).or_insert(n);
                }
                prov.gates.push(n);
                gates.push(GateInstance {
                    id: id.as_str().to_string(),
                    inputs: x,
                    outputs: y,
                });
            }
            "output" | "garbage" => {
                let role = if line.tokens[0].text == "output" {
                    SinkRole::PrimaryOutput
                } else {
                    SinkRole::Garbage
                };
                for net in line.ident_list(1)? {
                    prov.sinks.entry(net.clone()).or_default().push(n);
                    sinks.push((net, role));
                }
            }
            "end" => {
                line.finish(1)?;
                ended = true;
            }
            _ => {
                let expected: Vec<String> = DECLARATIONS.iter().map(|d| format!("`{d}`")).collect();
                let refs: Vec<&str> = expected.iter().map(String::as_str).collect();
                return Err(line.error(0, &refs));
            }
        }
    }
    if !ended {
        let (line, column) = lines.last().map_or((1, 1), |l| (l.number, l.end_column));
        return Err(ParseError::Syntax {
            line,
            column,
            expected: vec!["`end`".into()],
            found: "end of input".into(),
        });
    }

    let circuit =
        SequentialCircuit::new(Circuit::new(name.as_str(), sources, gates, sinks), states);
    let violations = circuit.validate();
    if violations.is_empty() {
        return Ok(circuit);
    }
    let mut located: Vec<LocatedViolation> = violations
        .into_iter()
        .map(|v| LocatedViolation {
            line: prov.locate(&v, &circuit),
            violation: v,
        })
        .collect();
    located.sort_by_key(|v| v.line);
    Err(ParseError::Semantic(located))
}

/// Canonical text of a valid circuit.
pub fn emit_netlist(circuit: &SequentialCircuit) -> Result<String, NetlistError> {
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(NetlistError::Invalid(violations));
    }
    let core = circuit.core();
    let mut out = String::new();
    let group = |out: &mut String, kw: &str, nets: Vec<&NetId>| {
        if !nets.is_empty() {
            out.push_str(kw);
            for n in nets {
                out.push(' ');
                out.push_str(n.as_str());
            }
            out.push('\n');
        }
    };
    writeln!(out, "circuit {}", core.name()).expect("string write");
    group(
        &mut out,
        "input",
        core.sources_with(SourceRole::PrimaryInput).collect(),
    );
    group(
        &mut out,
        "const0",
        core.sources_with(SourceRole::Const0).collect(),
    );
    group(
        &mut out,
        "const1",
        core.sources_with(SourceRole::Const1).collect(),
    );
    for s in circuit.states() {
        writeln!(out, "state {} init {} next {}", s.feedback, s.init, s.next)
            .expect("string write");
    }
    for g in core.gates() {
        let [x1, x2, x3] = &g.inputs;
        let [y1, y2, y3] = &g.outputs;
        writeln!(out, "gate {} F {x1} {x2} {x3} -> {y1} {y2} {y3}", g.id).expect("string write");
    }
    group(
        &mut out,
        "output",
        core.sinks_with(SinkRole::PrimaryOutput).collect(),
    );
    group(
        &mut out,
        "garbage",
        core.sinks_with(SinkRole::Garbage).collect(),
    );
    out.push_str("end\n");
    Ok(out)
}

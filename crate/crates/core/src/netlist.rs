// SPDX-License-Identifier: Apache-2.0

//! Structural circuit model.
//!
//! A [`Circuit`] is a DAG of Fredkin gate instances over named nets. Every
//! net has exactly one driver (a source role or one gate output pin) and is
//! consumed by at most one gate input pin. A net that no gate consumes must
//! carry exactly one sink role, so fan-out never happens implicitly and every
//! garbage line is declared.
//!
//! Feedback only exists through [`SequentialCircuit`] state elements, which
//! pair a `StateNext` sink with a `StateFeedback` source.

mod builder;
mod compiled;

pub use builder::CircuitBuilder;
pub use compiled::Compiled;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::gate::{Bit, Fredkin};

/// A net name: `[A-Za-z_][A-Za-z0-9_]*`, case-sensitive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(String);

impl NetId {
    pub fn new(name: impl Into<String>) -> Result<Self, NetlistError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(NetId(name))
        } else {
            Err(NetlistError::BadIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for NetId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceRole {
    PrimaryInput,
    Const0,
    Const1,
    StateFeedback,
}

impl SourceRole {
    /// Value of a constant source.
    pub fn constant(self) -> Option<Bit> {
        match self {
            SourceRole::Const0 => Some(Bit::ZERO),
            SourceRole::Const1 => Some(Bit::ONE),
            _ => None,
        }
    }

    /// Inputs and feedback vary during simulation; constants do not.
    pub fn is_free(self) -> bool {
        self.constant().is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SinkRole {
    PrimaryOutput,
    Garbage,
    StateNext,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateInstance {
    pub id: String,
    /// Bound to `(x1, x2, x3)`; `x1` is the control line.
    pub inputs: [NetId; 3],
    /// Bound to `(y1, y2, y3)`.
    pub outputs: [NetId; 3],
}

/// Combinational Fredkin network.
///
/// Sources and sinks are kept grouped by role, in the order `SourceRole` and
/// `SinkRole` declare, with declaration order preserved inside each group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    sources: Vec<(NetId, SourceRole)>,
    gates: Vec<GateInstance>,
    sinks: Vec<(NetId, SinkRole)>,
}

impl Circuit {
    pub fn new(
        name: impl Into<String>,
        mut sources: Vec<(NetId, SourceRole)>,
        gates: Vec<GateInstance>,
        mut sinks: Vec<(NetId, SinkRole)>,
    ) -> Self {
        sources.sort_by_key(|(_, role)| *role);
        sinks.sort_by_key(|(_, role)| *role);
        Circuit {
            name: name.into(),
            sources,
            gates,
            sinks,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sources(&self) -> &[(NetId, SourceRole)] {
        &self.sources
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn sinks(&self) -> &[(NetId, SinkRole)] {
        &self.sinks
    }

    pub fn sources_with(&self, role: SourceRole) -> impl Iterator<Item = &NetId> {
        self.sources
            .iter()
            .filter(move |(_, r)| *r == role)
            .map(|(n, _)| n)
    }

    pub fn sinks_with(&self, role: SinkRole) -> impl Iterator<Item = &NetId> {
        self.sinks
            .iter()
            .filter(move |(_, r)| *r == role)
            .map(|(n, _)| n)
    }

    pub fn source_role(&self, net: &str) -> Option<SourceRole> {
        self.sources
            .iter()
            .find(|(n, _)| n.as_str() == net)
            .map(|(_, r)| *r)
    }

    pub fn sink_role(&self, net: &str) -> Option<SinkRole> {
        self.sinks
            .iter()
            .find(|(n, _)| n.as_str() == net)
            .map(|(_, r)| *r)
    }

    /// Primary inputs followed by state feedback: the variables of a behavior table.
    pub fn input_nets(&self) -> Vec<NetId> {
        self.sources
            .iter()
            .filter(|(_, r)| r.is_free())
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Outputs, garbage and state-next nets, in that order.
    pub fn terminal_nets(&self) -> Vec<NetId> {
        self.sinks.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Drops the sink tag of `net`, returning the role it had.
    pub fn remove_sink(&mut self, net: &str) -> Option<SinkRole> {
        let pos = self.sinks.iter().position(|(n, _)| n.as_str() == net)?;
        Some(self.sinks.remove(pos).1)
    }

    pub fn gates_mut(&mut self) -> &mut Vec<GateInstance> {
        &mut self.gates
    }

    pub(crate) fn reorder_state_nets(&mut self, feedback: &[NetId], next: &[NetId]) {
        let rank = |order: &[NetId], net: &NetId| {
            order.iter().position(|n| n == net).unwrap_or(usize::MAX)
        };
        // stable within role groups; only the state groups get a new order
        self.sources.sort_by_key(|(n, role)| {
            let r = if *role == SourceRole::StateFeedback {
                rank(feedback, n)
            } else {
                0
            };
            (*role, r)
        });
        self.sinks.sort_by_key(|(n, role)| {
            let r = if *role == SinkRole::StateNext {
                rank(next, n)
            } else {
                0
            };
            (*role, r)
        });
    }

    /// Every structural rule this circuit breaks; empty means valid.
    ///
    /// State pairing is a property of [`SequentialCircuit`] and is checked there.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut drivers: HashMap<&NetId, Driver> = HashMap::new();
        for (net, _) in &self.sources {
            if drivers.insert(net, Driver::Source).is_some() {
                out.push(Violation::DuplicateDriver {
                    net: net.clone(),
                    driver: Driver::Source,
                });
            }
        }

        let mut gate_ids = HashSet::new();
        for (g, gate) in self.gates.iter().enumerate() {
            if !gate_ids.insert(gate.id.as_str()) {
                out.push(Violation::DuplicateGateId { gate: g });
            }
            let pins: HashSet<&NetId> = gate.inputs.iter().chain(&gate.outputs).collect();
            if pins.len() != 6 {
                out.push(Violation::RepeatedPin { gate: g });
            }
            for net in &gate.outputs {
                if drivers.insert(net, Driver::Gate(g)).is_some() {
                    out.push(Violation::DuplicateDriver {
                        net: net.clone(),
                        driver: Driver::Gate(g),
                    });
                }
            }
        }

        let mut readers: HashMap<&NetId, usize> = HashMap::new();
        for (g, gate) in self.gates.iter().enumerate() {
            for net in &gate.inputs {
                if !drivers.contains_key(net) {
                    out.push(Violation::UndeclaredNet {
                        net: net.clone(),
                        at: Reference::GateInput(g),
                    });
                }
                if readers.insert(net, g).is_some() {
                    out.push(Violation::MultipleReaders {
                        net: net.clone(),
                        gate: g,
                    });
                }
            }
        }

        let mut tagged: HashSet<&NetId> = HashSet::new();
        for (i, (net, _)) in self.sinks.iter().enumerate() {
            if !drivers.contains_key(net) {
                out.push(Violation::UndeclaredNet {
                    net: net.clone(),
                    at: Reference::Sink(i),
                });
            }
            if readers.contains_key(net) {
                out.push(Violation::SinkConsumed { net: net.clone() });
            }
            if !tagged.insert(net) {
                out.push(Violation::DuplicateSink { net: net.clone() });
            }
        }

        let driven = self
            .sources
            .iter()
            .map(|(n, _)| n)
            .chain(self.gates.iter().flat_map(|g| g.outputs.iter()));
        let mut seen = HashSet::new();
        for net in driven {
            if seen.insert(net) && !readers.contains_key(net) && !tagged.contains(net) {
                out.push(Violation::DanglingNet { net: net.clone() });
            }
        }

        out.extend(self.ordering_violations(&drivers));
        out
    }

    fn ordering_violations(&self, drivers: &HashMap<&NetId, Driver>) -> Vec<Violation> {
        let n = self.gates.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut late = Vec::new();
        for (g, gate) in self.gates.iter().enumerate() {
            for net in &gate.inputs {
                if let Some(Driver::Gate(h)) = drivers.get(net) {
                    preds[g].push(*h);
                    if *h >= g {
                        late.push((g, net.clone()));
                    }
                }
            }
        }
        if late.is_empty() {
            return Vec::new();
        }

        // Kahn's algorithm; whatever survives sits on or behind a cycle
        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (g, ps) in preds.iter().enumerate() {
            for &p in ps {
                succs[p].push(g);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&g| indegree[g] == 0).collect();
        let mut done = 0;
        while let Some(g) = ready.pop() {
            done += 1;
            for &s in &succs[g] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(s);
                }
            }
        }
        if done < n {
            let gates: Vec<usize> = (0..n).filter(|&g| indegree[g] > 0).collect();
            vec![Violation::Cycle { gates }]
        } else {
            late.into_iter()
                .map(|(gate, net)| Violation::OutOfOrder { gate, net })
                .collect()
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn compile(&self) -> Result<Compiled, NetlistError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(NetlistError::Invalid(violations));
        }
        Ok(Compiled::new(self))
    }

    /// Evaluates every net for one assignment of the primary inputs and state feedback.
    pub fn eval_combinational(
        &self,
        assignment: &BTreeMap<NetId, Bit>,
    ) -> Result<IndexMap<NetId, Bit>, NetlistError> {
        let compiled = self.compile()?;
        let free = compiled.free_nets();
        let missing: Vec<NetId> = free
            .iter()
            .filter(|n| !assignment.contains_key(*n))
            .cloned()
            .collect();
        let extra: Vec<NetId> = assignment
            .keys()
            .filter(|k| !free.contains(k))
            .cloned()
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(NetlistError::Arity { missing, extra });
        }
        let values: Vec<Bit> = free.iter().map(|n| assignment[n]).collect();
        let nets = compiled.eval(&values, &Fredkin);
        Ok(compiled.net_names().iter().cloned().zip(nets).collect())
    }

    pub fn metrics(&self) -> Result<Metrics, NetlistError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(NetlistError::Invalid(violations));
        }
        Ok(self.metrics_unchecked())
    }

    fn metrics_unchecked(&self) -> Metrics {
        let count_src = |role| self.sources_with(role).count();
        let count_sink = |role| self.sinks_with(role).count();
        Metrics {
            gate_count: self.gates.len(),
            garbage_count: count_sink(SinkRole::Garbage),
            ancilla_count: count_src(SourceRole::Const0) + count_src(SourceRole::Const1),
            primary_input_count: count_src(SourceRole::PrimaryInput),
            primary_output_count: count_sink(SinkRole::PrimaryOutput),
            state_count: count_src(SourceRole::StateFeedback),
        }
    }
}

/// What drives a net.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Driver {
    Source,
    Gate(usize),
}

/// Where a net is referenced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    GateInput(usize),
    /// Index into [`Circuit::sinks`].
    Sink(usize),
    /// Index into [`SequentialCircuit::states`].
    State(usize),
}

/// One broken structural rule. Gate references are indices into [`Circuit::gates`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `driver` is the second driver found.
    DuplicateDriver {
        net: NetId,
        driver: Driver,
    },
    /// `gate` is the second reader found.
    MultipleReaders {
        net: NetId,
        gate: usize,
    },
    DanglingNet {
        net: NetId,
    },
    UndeclaredNet {
        net: NetId,
        at: Reference,
    },
    SinkConsumed {
        net: NetId,
    },
    DuplicateSink {
        net: NetId,
    },
    RepeatedPin {
        gate: usize,
    },
    DuplicateGateId {
        gate: usize,
    },
    Cycle {
        gates: Vec<usize>,
    },
    OutOfOrder {
        gate: usize,
        net: NetId,
    },
    UnpairedState {
        net: NetId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateDriver { net, .. } => {
                write!(f, "net `{net}` has more than one driver")
            }
            Violation::MultipleReaders { net, .. } => {
                write!(
                    f,
                    "net `{net}` feeds more than one gate input (fan-out needs a copy gate)"
                )
            }
            Violation::DanglingNet { net } => {
                write!(
                    f,
                    "net `{net}` is neither consumed nor tagged as output/garbage/state"
                )
            }
            Violation::UndeclaredNet { net, .. } => {
                write!(f, "net `{net}` is used but never driven")
            }
            Violation::SinkConsumed { net } => {
                write!(
                    f,
                    "net `{net}` is consumed by a gate and also tagged as a sink"
                )
            }
            Violation::DuplicateSink { net } => write!(f, "net `{net}` is tagged more than once"),
            Violation::RepeatedPin { gate } => {
                write!(f, "gate #{gate} uses a net on more than one pin")
            }
            Violation::DuplicateGateId { gate } => {
                write!(f, "gate #{gate} reuses an existing gate id")
            }
            Violation::Cycle { gates } => {
                write!(f, "gate wiring has a cycle through gates {gates:?}")
            }
            Violation::OutOfOrder { gate, net } => {
                write!(f, "gate #{gate} reads `{net}` before it is produced")
            }
            Violation::UnpairedState { net } => {
                write!(
                    f,
                    "state net `{net}` is not paired by exactly one state element"
                )
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Metrics {
    pub gate_count: usize,
    pub garbage_count: usize,
    /// Constant-input lines.
    pub ancilla_count: usize,
    pub primary_input_count: usize,
    pub primary_output_count: usize,
    pub state_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateElement {
    pub feedback: NetId,
    pub next: NetId,
    pub init: Bit,
}

/// A combinational core with its feedback pairings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialCircuit {
    core: Circuit,
    states: Vec<StateElement>,
}

impl SequentialCircuit {
    pub fn new(mut core: Circuit, states: Vec<StateElement>) -> Self {
        let fb: Vec<NetId> = states.iter().map(|s| s.feedback.clone()).collect();
        let next: Vec<NetId> = states.iter().map(|s| s.next.clone()).collect();
        core.reorder_state_nets(&fb, &next);
        SequentialCircuit { core, states }
    }

    pub fn combinational(core: Circuit) -> Self {
        SequentialCircuit::new(core, Vec::new())
    }

    pub fn core(&self) -> &Circuit {
        &self.core
    }

    pub fn core_mut(&mut self) -> &mut Circuit {
        &mut self.core
    }

    pub fn into_core(self) -> Circuit {
        self.core
    }

    pub fn states(&self) -> &[StateElement] {
        &self.states
    }

    pub fn name(&self) -> &str {
        self.core.name()
    }

    pub fn state(&self, feedback: &str) -> Option<&StateElement> {
        self.states.iter().find(|s| s.feedback.as_str() == feedback)
    }

    /// Replaces the reset value of one state element.
    pub fn set_init(&mut self, feedback: &str, init: Bit) -> Result<(), NetlistError> {
        let state = self
            .states
            .iter_mut()
            .find(|s| s.feedback.as_str() == feedback)
            .ok_or_else(|| NetlistError::UnknownNet(feedback.to_string()))?;
        state.init = init;
        Ok(())
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.core.validate();
        let mut fb_count: HashMap<&str, usize> = HashMap::new();
        let mut next_count: HashMap<&str, usize> = HashMap::new();
        for s in &self.states {
            *fb_count.entry(s.feedback.as_str()).or_default() += 1;
            *next_count.entry(s.next.as_str()).or_default() += 1;
        }
        for (net, role) in self.core.sources() {
            if *role == SourceRole::StateFeedback && fb_count.get(net.as_str()) != Some(&1) {
                out.push(Violation::UnpairedState { net: net.clone() });
            }
        }
        for (net, role) in self.core.sinks() {
            if *role == SinkRole::StateNext && next_count.get(net.as_str()) != Some(&1) {
                out.push(Violation::UnpairedState { net: net.clone() });
            }
        }
        let mut reported = HashSet::new();
        for s in &self.states {
            let fb_ok = self.core.source_role(s.feedback.as_str())
                == Some(SourceRole::StateFeedback)
                && fb_count[s.feedback.as_str()] == 1;
            let next_ok = self.core.sink_role(s.next.as_str()) == Some(SinkRole::StateNext)
                && next_count[s.next.as_str()] == 1;
            if !fb_ok && reported.insert(s.feedback.clone()) {
                out.push(Violation::UnpairedState {
                    net: s.feedback.clone(),
                });
            }
            if !next_ok && reported.insert(s.next.clone()) {
                out.push(Violation::UnpairedState {
                    net: s.next.clone(),
                });
            }
        }
        out.dedup();
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn metrics(&self) -> Result<Metrics, NetlistError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(NetlistError::Invalid(violations));
        }
        Ok(self.core.metrics_unchecked())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
    #[error("circuit is structurally invalid: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(
        "assignment does not match the circuit inputs (missing {missing:?}, unexpected {extra:?})"
    )]
    Arity {
        missing: Vec<NetId>,
        extra: Vec<NetId>,
    },
    #[error("unknown net `{0}`")]
    UnknownNet(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

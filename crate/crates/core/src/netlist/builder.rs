// SPDX-License-Identifier: Apache-2.0

use super::{
    Circuit, GateInstance, NetId, NetlistError, SequentialCircuit, SinkRole, SourceRole,
    StateElement,
};
use crate::gate::Bit;

/// Incremental construction of a circuit in topological gate order.
///
/// Net names are trusted: an invalid identifier is a programming error and
/// panics. Structural rules are only enforced by [`CircuitBuilder::finish`].
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    name: String,
    sources: Vec<(NetId, SourceRole)>,
    gates: Vec<GateInstance>,
    sinks: Vec<(NetId, SinkRole)>,
    states: Vec<StateElement>,
}

fn net(name: &str) -> NetId {
    NetId::new(name).unwrap_or_else(|e| panic!("{e}"))
}

impl CircuitBuilder {
    pub fn new(name: &str) -> Self {
        CircuitBuilder {
            name: name.to_string(),
            sources: Vec::new(),
            gates: Vec::new(),
            sinks: Vec::new(),
            states: Vec::new(),
        }
    }

    fn source(&mut self, name: &str, role: SourceRole) -> NetId {
        let id = net(name);
        self.sources.push((id.clone(), role));
        id
    }

    pub fn input(&mut self, name: &str) -> NetId {
        self.source(name, SourceRole::PrimaryInput)
    }

    pub fn const0(&mut self, name: &str) -> NetId {
        self.source(name, SourceRole::Const0)
    }

    pub fn const1(&mut self, name: &str) -> NetId {
        self.source(name, SourceRole::Const1)
    }

    /// Declares a state element and returns its feedback net. Some gate must
    /// later produce a net called `next`.
    pub fn state(&mut self, feedback: &str, next: &str, init: Bit) -> NetId {
        let fb = self.source(feedback, SourceRole::StateFeedback);
        let nx = net(next);
        self.sinks.push((nx.clone(), SinkRole::StateNext));
        self.states.push(StateElement {
            feedback: fb.clone(),
            next: nx,
            init,
        });
        fb
    }

    /// Appends a Fredkin gate with an automatically numbered id.
    pub fn gate(&mut self, inputs: [&NetId; 3], outputs: [&str; 3]) -> [NetId; 3] {
        let id = format!("g{}", self.gates.len() + 1);
        let outputs = outputs.map(net);
        self.gates.push(GateInstance {
            id,
            inputs: inputs.map(NetId::clone),
            outputs: outputs.clone(),
        });
        outputs
    }

    pub fn output(&mut self, net: &NetId) {
        self.sinks.push((net.clone(), SinkRole::PrimaryOutput));
    }

    pub fn garbage(&mut self, net: &NetId) {
        self.sinks.push((net.clone(), SinkRole::Garbage));
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Assembles the circuit without validating it.
    pub fn build_unchecked(self) -> SequentialCircuit {
        let core = Circuit::new(self.name, self.sources, self.gates, self.sinks);
        SequentialCircuit::new(core, self.states)
    }

    pub fn finish(self) -> Result<SequentialCircuit, NetlistError> {
        let seq = self.build_unchecked();
        let violations = seq.validate();
        if violations.is_empty() {
            Ok(seq)
        } else {
            Err(NetlistError::Invalid(violations))
        }
    }
}

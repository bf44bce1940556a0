// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::{Circuit, NetId, SinkRole, SourceRole};
use crate::gate::{Bit, ReversibleGate};

/// A validated circuit with nets resolved to dense indices.
///
/// Source nets occupy indices `0..sources().len()` in source order; gate
/// outputs follow in gate order, three per gate.
#[derive(Clone, Debug)]
pub struct Compiled {
    names: Vec<NetId>,
    index: HashMap<NetId, usize>,
    sources: Vec<SourceRole>,
    free: Vec<usize>,
    free_names: Vec<NetId>,
    gates: Vec<([usize; 3], [usize; 3])>,
    sinks: Vec<(usize, SinkRole)>,
}

impl Compiled {
    /// Caller guarantees `circuit` validates.
    pub(super) fn new(circuit: &Circuit) -> Self {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        let mut add = |net: &NetId, names: &mut Vec<NetId>| {
            let i = names.len();
            names.push(net.clone());
            index.insert(net.clone(), i);
            i
        };
        let mut sources = Vec::new();
        let mut free = Vec::new();
        let mut free_names = Vec::new();
        for (net, role) in circuit.sources() {
            let i = add(net, &mut names);
            sources.push(*role);
            if role.is_free() {
                free.push(i);
                free_names.push(net.clone());
            }
        }
        let mut gate_pins = Vec::with_capacity(circuit.gates().len());
        for g in circuit.gates() {
            let outs = g.outputs.each_ref().map(|n| add(n, &mut names));
            gate_pins.push((g.inputs.clone(), outs));
        }
        let gates = gate_pins
            .into_iter()
            .map(|(ins, outs)| (ins.map(|n| index[&n]), outs))
            .collect();
        let sinks = circuit
            .sinks()
            .iter()
            .map(|(n, r)| (index[n], *r))
            .collect();
        Compiled {
            names,
            index,
            sources,
            free,
            free_names,
            gates,
            sinks,
        }
    }

    pub fn net_names(&self) -> &[NetId] {
        &self.names
    }

    pub fn net_count(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, net: &str) -> Option<usize> {
        self.index.get(net).copied()
    }

    pub fn source_roles(&self) -> &[SourceRole] {
        &self.sources
    }

    /// Primary inputs then state feedback.
    pub fn free_nets(&self) -> &[NetId] {
        &self.free_names
    }

    pub fn free_indices(&self) -> &[usize] {
        &self.free
    }

    pub fn gate_pins(&self) -> &[([usize; 3], [usize; 3])] {
        &self.gates
    }

    pub fn sinks(&self) -> &[(usize, SinkRole)] {
        &self.sinks
    }

    /// Net values with constants pinned; `free` follows [`Compiled::free_nets`].
    pub fn eval<G: ReversibleGate + ?Sized>(&self, free: &[Bit], gate: &G) -> Vec<Bit> {
        let mut values = vec![Bit::ZERO; self.names.len()];
        self.eval_into(free, gate, &mut values);
        values
    }

    pub fn eval_into<G: ReversibleGate + ?Sized>(
        &self,
        free: &[Bit],
        gate: &G,
        values: &mut [Bit],
    ) {
        assert_eq!(free.len(), self.free.len(), "free input arity");
        for (i, role) in self.sources.iter().enumerate() {
            if let Some(c) = role.constant() {
                values[i] = c;
            }
        }
        for (&i, &b) in self.free.iter().zip(free) {
            values[i] = b;
        }
        self.propagate(gate, values);
    }

    /// Net values with every source, constants included, taken from `sources`.
    pub fn eval_all_sources<G: ReversibleGate + ?Sized>(
        &self,
        sources: &[Bit],
        gate: &G,
    ) -> Vec<Bit> {
        assert_eq!(sources.len(), self.sources.len(), "source arity");
        let mut values = vec![Bit::ZERO; self.names.len()];
        values[..sources.len()].copy_from_slice(sources);
        self.propagate(gate, &mut values);
        values
    }

    fn propagate<G: ReversibleGate + ?Sized>(&self, gate: &G, values: &mut [Bit]) {
        for (ins, outs) in &self.gates {
            let y = gate.eval(ins.map(|i| values[i]));
            for (o, v) in outs.iter().zip(y) {
                values[*o] = v;
            }
        }
    }

    /// Sink values in sink order.
    pub fn terminals(&self, values: &[Bit]) -> Vec<Bit> {
        self.sinks.iter().map(|(i, _)| values[*i]).collect()
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Synchronous simulation of sequential circuits.
//!
//! Each step evaluates the combinational core once with the current state on
//! the feedback nets, then every state element takes the value of its next
//! net at the same time.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use thiserror::Error;

use crate::cells::CellName;
use crate::gate::{Bit, Fredkin};
use crate::netlist::{Compiled, NetId, NetlistError, SequentialCircuit, SinkRole, SourceRole};

pub type BitMap = IndexMap<NetId, Bit>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("{what} do not match the circuit (missing {missing:?}, unexpected {extra:?})")]
    Arity {
        what: &'static str,
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("stimulus row {row} has {got} values, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        got: usize,
    },
}

/// Flags steps where every listed input is high.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputWarning {
    pub when_high: Vec<NetId>,
    pub message: String,
}

impl InputWarning {
    pub fn new(when_high: Vec<NetId>, message: &str) -> Self {
        InputWarning {
            when_high,
            message: message.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stimulus {
    pub input_names: Vec<NetId>,
    pub steps: Vec<Vec<Bit>>,
}

impl Stimulus {
    pub fn new(input_names: Vec<NetId>) -> Self {
        Stimulus {
            input_names,
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Bit>) {
        self.steps.push(row);
    }

    /// Appends one clock pulse: the row with `clock` high, then with it low.
    pub fn push_pulse(&mut self, clock: &str, mut row: Vec<Bit>) {
        let c = self
            .input_names
            .iter()
            .position(|n| n.as_str() == clock)
            .unwrap_or_else(|| panic!("no clock input `{clock}`"));
        row[c] = Bit::ONE;
        self.steps.push(row.clone());
        row[c] = Bit::ZERO;
        self.steps.push(row);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step_index: usize,
    pub inputs: BitMap,
    pub outputs: BitMap,
    pub state_before: BitMap,
    pub state_after: BitMap,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub circuit_name: String,
    pub input_nets: Vec<NetId>,
    pub output_nets: Vec<NetId>,
    pub state_nets: Vec<NetId>,
    pub initial_state: BitMap,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn final_state(&self) -> &BitMap {
        self.steps
            .last()
            .map_or(&self.initial_state, |s| &s.state_after)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Values of `prefix0..prefix{n-1}` in the final state, leftmost first.
    pub fn final_word(&self, prefix: &str, n: usize) -> String {
        let state = self.final_state();
        (0..n)
            .map(|i| state[format!("{prefix}{i}").as_str()].to_char())
            .collect()
    }
}

/// A compiled sequential circuit ready to be stepped.
#[derive(Clone, Debug)]
pub struct Simulator {
    name: String,
    compiled: Compiled,
    inputs: Vec<NetId>,
    outputs: Vec<(NetId, usize)>,
    /// Feedback net, index of its next net, default initial value.
    states: Vec<(NetId, usize, Bit)>,
    warnings: Vec<(Vec<usize>, String)>,
}

impl Simulator {
    /// Compiles `circuit`. Circuits named after a catalog cell get that
    /// cell's input warnings.
    pub fn new(circuit: &SequentialCircuit) -> Result<Self, SimError> {
        let violations = circuit.validate();
        if !violations.is_empty() {
            return Err(NetlistError::Invalid(violations).into());
        }
        let core = circuit.core();
        let compiled = core.compile()?;
        let inputs: Vec<NetId> = core
            .sources_with(SourceRole::PrimaryInput)
            .cloned()
            .collect();
        let outputs = core
            .sinks_with(SinkRole::PrimaryOutput)
            .map(|n| {
                (
                    n.clone(),
                    compiled.index_of(n.as_str()).expect("compiled net"),
                )
            })
            .collect();
        let states = circuit
            .states()
            .iter()
            .map(|s| {
                let next = compiled.index_of(s.next.as_str()).expect("compiled net");
                (s.feedback.clone(), next, s.init)
            })
            .collect();
        let mut sim = Simulator {
            name: circuit.name().to_string(),
            compiled,
            inputs,
            outputs,
            states,
            warnings: Vec::new(),
        };
        if let Some(cell) = CellName::from_circuit_name(circuit.name()) {
            sim.set_warnings(&cell.input_warnings());
        }
        Ok(sim)
    }

    /// Replaces the warning rules. Rules naming nets that are not primary
    /// inputs are dropped.
    pub fn set_warnings(&mut self, rules: &[InputWarning]) {
        self.warnings = rules
            .iter()
            .filter_map(|w| {
                let idx: Option<Vec<usize>> = w
                    .when_high
                    .iter()
                    .map(|n| self.inputs.iter().position(|i| i == n))
                    .collect();
                Some((idx?, w.message.clone()))
            })
            .collect();
    }

    pub fn input_nets(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn state_nets(&self) -> Vec<NetId> {
        self.states.iter().map(|s| s.0.clone()).collect()
    }

    pub fn output_nets(&self) -> Vec<NetId> {
        self.outputs.iter().map(|o| o.0.clone()).collect()
    }

    pub fn default_state(&self) -> BitMap {
        self.states
            .iter()
            .map(|(n, _, b)| (n.clone(), *b))
            .collect()
    }

    /// One step on positional vectors: inputs in primary-input order, state in
    /// state order. Returns outputs and the next state.
    pub fn step_raw(&self, inputs: &[Bit], state: &[Bit]) -> (Vec<Bit>, Vec<Bit>) {
        let mut free = Vec::with_capacity(inputs.len() + state.len());
        free.extend_from_slice(inputs);
        free.extend_from_slice(state);
        let values = self.compiled.eval(&free, &Fredkin);
        let outputs = self.outputs.iter().map(|(_, i)| values[*i]).collect();
        let next = self.states.iter().map(|(_, i, _)| values[*i]).collect();
        (outputs, next)
    }

    fn warnings_for(&self, inputs: &[Bit]) -> Vec<String> {
        self.warnings
            .iter()
            .filter(|(idx, _)| idx.iter().all(|&i| inputs[i].is_high()))
            .map(|(_, m)| m.clone())
            .collect()
    }

    fn step_indexed(&self, step_index: usize, inputs: &[Bit], state: &[Bit]) -> TraceStep {
        let (outputs, next) = self.step_raw(inputs, state);
        let names = |nets: &mut dyn Iterator<Item = NetId>, bits: &[Bit]| -> BitMap {
            nets.zip(bits.iter().copied()).collect()
        };
        TraceStep {
            step_index,
            inputs: names(&mut self.inputs.iter().cloned(), inputs),
            outputs: names(&mut self.outputs.iter().map(|o| o.0.clone()), &outputs),
            state_before: names(&mut self.states.iter().map(|s| s.0.clone()), state),
            state_after: names(&mut self.states.iter().map(|s| s.0.clone()), &next),
            warnings: self.warnings_for(inputs),
        }
    }

    /// One step on named maps, which must cover exactly the primary inputs
    /// and the state elements.
    pub fn step(&self, state: &BitMap, inputs: &BitMap) -> Result<TraceStep, SimError> {
        let ins = ordered("inputs", &self.inputs, inputs)?;
        let st = ordered("state values", &self.state_nets(), state)?;
        Ok(self.step_indexed(0, &ins, &st))
    }

    /// Runs `stimulus` from the default initial state with `overrides` applied.
    pub fn run(
        &self,
        stimulus: &Stimulus,
        overrides: &BTreeMap<NetId, Bit>,
    ) -> Result<Trace, SimError> {
        let columns = column_order(&self.inputs, &stimulus.input_names)?;
        let unknown: Vec<String> = overrides
            .keys()
            .filter(|k| !self.states.iter().any(|s| &s.0 == *k))
            .map(|k| k.to_string())
            .collect();
        if !unknown.is_empty() {
            return Err(SimError::Arity {
                what: "initial state values",
                missing: Vec::new(),
                extra: unknown,
            });
        }
        let mut state: Vec<Bit> = self
            .states
            .iter()
            .map(|(n, _, b)| overrides.get(n).copied().unwrap_or(*b))
            .collect();
        let initial_state: BitMap = self
            .state_nets()
            .into_iter()
            .zip(state.iter().copied())
            .collect();

        let mut steps = Vec::with_capacity(stimulus.len());
        let mut inputs = vec![Bit::ZERO; self.inputs.len()];
        for (k, row) in stimulus.steps.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(SimError::RowWidth {
                    row: k,
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            for (slot, &c) in inputs.iter_mut().zip(&columns) {
                *slot = row[c];
            }
            let step = self.step_indexed(k, &inputs, &state);
            state = step.state_after.values().copied().collect();
            steps.push(step);
        }
        Ok(Trace {
            circuit_name: self.name.clone(),
            input_nets: self.inputs.clone(),
            output_nets: self.output_nets(),
            state_nets: self.state_nets(),
            initial_state,
            steps,
        })
    }

    /// Independent runs over the same circuit.
    pub fn run_batch(
        &self,
        stimuli: &[Stimulus],
        overrides: &BTreeMap<NetId, Bit>,
    ) -> Vec<Result<Trace, SimError>> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            stimuli.par_iter().map(|s| self.run(s, overrides)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.run_batch_sequential(stimuli, overrides)
        }
    }

    pub fn run_batch_sequential(
        &self,
        stimuli: &[Stimulus],
        overrides: &BTreeMap<NetId, Bit>,
    ) -> Vec<Result<Trace, SimError>> {
        stimuli.iter().map(|s| self.run(s, overrides)).collect()
    }
}

/// Position in `given` of each net of `expected`.
fn column_order(expected: &[NetId], given: &[NetId]) -> Result<Vec<usize>, SimError> {
    let missing: Vec<String> = expected
        .iter()
        .filter(|n| !given.contains(n))
        .map(|n| n.to_string())
        .collect();
    let mut extra: Vec<String> = given
        .iter()
        .filter(|n| !expected.contains(n))
        .map(|n| n.to_string())
        .collect();
    for (i, n) in given.iter().enumerate() {
        if given[..i].contains(n) {
            extra.push(n.to_string());
        }
    }
    if !missing.is_empty() || !extra.is_empty() {
        return Err(SimError::Arity {
            what: "stimulus columns",
            missing,
            extra,
        });
    }
    Ok(expected
        .iter()
        .map(|n| given.iter().position(|g| g == n).expect("checked"))
        .collect())
}

fn ordered(what: &'static str, expected: &[NetId], given: &BitMap) -> Result<Vec<Bit>, SimError> {
    let keys: Vec<NetId> = given.keys().cloned().collect();
    let cols = column_order(expected, &keys).map_err(|e| match e {
        SimError::Arity { missing, extra, .. } => SimError::Arity {
            what,
            missing,
            extra,
        },
        other => other,
    })?;
    Ok(cols.iter().map(|&c| given[c]).collect())
}

// SPDX-License-Identifier: Apache-2.0

//! Exhaustive semantic checks for small circuits.
//!
//! Two views of a circuit are used. Functional behavior pins constants to
//! their declared values and enumerates the primary inputs and state
//! feedback. Reversibility and conservativity are properties of the gate
//! network itself, so they are judged at full width with every source line,
//! constants included, left free. With constants pinned the map is usually
//! not injective (a latch forgets `D` while its enable is low).

pub mod scan;

use thiserror::Error;

use crate::gate::{
    pack_msb_first, truth_table, unpack_msb_first, weight, Bit, Fredkin, ReversibleGate, Triple,
};
use crate::netlist::{Circuit, NetId, NetlistError};
use scan::LineProgram;

/// Default ceiling on the number of enumerated nets (about a million assignments).
pub const DEFAULT_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("enumeration over {width} nets exceeds the cap of {cap}")]
    CapExceeded { width: usize, cap: usize },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("oracle returned {got} bits, expected {expected}")]
    OracleArity { expected: usize, got: usize },
    #[error("`{0}` is not a terminal net of the circuit")]
    UnknownTerminal(String),
}

fn check_cap(width: usize, cap: usize) -> Result<(), VerifyError> {
    if width > cap {
        Err(VerifyError::CapExceeded { width, cap })
    } else {
        Ok(())
    }
}

/// Input vector to terminal vector, for every input vector in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorTable {
    pub input_nets: Vec<NetId>,
    pub terminal_nets: Vec<NetId>,
    pub rows: Vec<(Vec<Bit>, Vec<Bit>)>,
}

impl BehaviorTable {
    /// Whether no two rows share a terminal vector.
    pub fn is_injective(&self) -> bool {
        let mut images: Vec<&[Bit]> = self.rows.iter().map(|(_, t)| t.as_slice()).collect();
        images.sort_unstable();
        images.windows(2).all(|w| w[0] != w[1])
    }

    pub fn terminal_index(&self, net: &str) -> Option<usize> {
        self.terminal_nets.iter().position(|n| n.as_str() == net)
    }
}

/// Behavior over primary inputs and state feedback, constants pinned.
pub fn behavior_table(circuit: &Circuit, cap: usize) -> Result<BehaviorTable, VerifyError> {
    let compiled = circuit.compile()?;
    let k = compiled.free_nets().len();
    check_cap(k, cap)?;
    let rows = (0..1u64 << k)
        .map(|r| {
            let inputs = unpack_msb_first(r, k);
            let values = compiled.eval(&inputs, &Fredkin);
            (inputs, compiled.terminals(&values))
        })
        .collect();
    Ok(BehaviorTable {
        input_nets: compiled.free_nets().to_vec(),
        terminal_nets: circuit.terminal_nets(),
        rows,
    })
}

/// Behavior with every source free, constants included. Evaluated net by net,
/// independently of the line-register engine behind [`check_reversible`].
pub fn full_width_table<G: ReversibleGate + ?Sized>(
    circuit: &Circuit,
    gate: &G,
    cap: usize,
) -> Result<BehaviorTable, VerifyError> {
    let compiled = circuit.compile()?;
    let w = circuit.sources().len();
    check_cap(w, cap)?;
    let rows = (0..1u64 << w)
        .map(|r| {
            let sources = unpack_msb_first(r, w);
            let values = compiled.eval_all_sources(&sources, gate);
            (sources, compiled.terminals(&values))
        })
        .collect();
    Ok(BehaviorTable {
        input_nets: circuit.sources().iter().map(|(n, _)| n.clone()).collect(),
        terminal_nets: circuit.terminal_nets(),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exhaustive {
        assignments: u64,
    },
    /// Gate-local enumeration plus structural validity.
    Compositional,
}

/// Counterexample to a failed check. Source vectors follow [`Circuit::sources`]
/// order, terminal vectors follow [`Circuit::sinks`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Collision {
        first: Vec<Bit>,
        second: Vec<Bit>,
        image: Vec<Bit>,
    },
    Weight {
        sources: Vec<Bit>,
        terminals: Vec<Bit>,
    },
    Mismatch {
        inputs: Vec<Bit>,
        expected: Vec<Bit>,
        observed: Vec<Bit>,
    },
    /// Two gate input rows with the same output, or one row that changes weight.
    GateRows {
        inputs: Vec<Triple>,
        outputs: Vec<Triple>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub method: Method,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Reversibility and conservativity found in one pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullWidthReport {
    pub reversible: Verdict,
    pub conservative: Verdict,
}

fn source_terminals(program: &LineProgram, packed: u64) -> Vec<Bit> {
    let w = program.width();
    program
        .terminal_lines()
        .iter()
        .map(|&l| Bit::new((packed >> (w - 1 - l)) & 1 == 1))
        .collect()
}

/// Exhaustive full-width scan checking both properties.
pub fn check_full_width<G: ReversibleGate + ?Sized>(
    circuit: &Circuit,
    gate: &G,
    cap: usize,
) -> Result<FullWidthReport, VerifyError> {
    let compiled = circuit.compile()?;
    let program = LineProgram::new(&compiled);
    let w = program.width();
    check_cap(w, cap)?;
    let result = scan::scan(&program, gate);
    let method = Method::Exhaustive {
        assignments: result.assignments,
    };

    let collision = result.collision.map(|second| {
        let image = program.apply(gate, second);
        let first = (0..1u64 << w)
            .find(|&r| r != second && program.apply(gate, r) == image)
            .expect("collision has an earlier preimage");
        Witness::Collision {
            first: unpack_msb_first(first, w),
            second: unpack_msb_first(second, w),
            image: source_terminals(&program, image),
        }
    });
    let weight = result.weight.map(|r| Witness::Weight {
        sources: unpack_msb_first(r, w),
        terminals: source_terminals(&program, program.apply(gate, r)),
    });
    Ok(FullWidthReport {
        reversible: Verdict {
            method,
            witness: collision,
        },
        conservative: Verdict {
            method,
            witness: weight,
        },
    })
}

/// Whether the full-width map (all sources free to all terminals) is injective.
pub fn check_reversible(circuit: &Circuit, cap: usize) -> Result<Verdict, VerifyError> {
    check_reversible_with(circuit, &Fredkin, cap)
}

pub fn check_reversible_with<G: ReversibleGate + ?Sized>(
    circuit: &Circuit,
    gate: &G,
    cap: usize,
) -> Result<Verdict, VerifyError> {
    Ok(check_full_width(circuit, gate, cap)?.reversible)
}

/// Whether every full-width assignment has as many ones in as out.
pub fn check_conservative(circuit: &Circuit, cap: usize) -> Result<Verdict, VerifyError> {
    check_conservative_with(circuit, &Fredkin, cap)
}

pub fn check_conservative_with<G: ReversibleGate + ?Sized>(
    circuit: &Circuit,
    gate: &G,
    cap: usize,
) -> Result<Verdict, VerifyError> {
    Ok(check_full_width(circuit, gate, cap)?.conservative)
}

/// Full-width properties argued from the gate alone.
///
/// In a valid netlist each gate's input lines range over all values whenever
/// the lines before it do, so the network is a bijection exactly when the gate
/// is (or there are no gates), and it preserves weight exactly when the gate
/// does. Only the gate's 8 rows are enumerated, so this works at any width.
pub fn check_compositional<G: ReversibleGate + ?Sized>(
    circuit: &Circuit,
    gate: &G,
) -> Result<FullWidthReport, VerifyError> {
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(NetlistError::Invalid(violations).into());
    }
    let rows = truth_table(gate);
    let mut reversible = None;
    let mut conservative = None;
    if !circuit.gates().is_empty() {
        'outer: for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                if a.outputs == b.outputs {
                    reversible = Some(Witness::GateRows {
                        inputs: vec![a.inputs, b.inputs],
                        outputs: vec![a.outputs, b.outputs],
                    });
                    break 'outer;
                }
            }
        }
        conservative = rows
            .iter()
            .find(|r| r.input_weight() != r.output_weight())
            .map(|r| Witness::GateRows {
                inputs: vec![r.inputs],
                outputs: vec![r.outputs],
            });
    }
    Ok(FullWidthReport {
        reversible: Verdict {
            method: Method::Compositional,
            witness: reversible,
        },
        conservative: Verdict {
            method: Method::Compositional,
            witness: conservative,
        },
    })
}

/// Exhaustive at full width when it fits under `cap`, compositional otherwise.
pub fn check_auto<G: ReversibleGate + ?Sized>(
    circuit: &Circuit,
    gate: &G,
    cap: usize,
) -> Result<FullWidthReport, VerifyError> {
    match check_full_width(circuit, gate, cap) {
        Err(VerifyError::CapExceeded { .. }) => check_compositional(circuit, gate),
        other => other,
    }
}

/// Named read access to one input vector, for writing oracles.
#[derive(Clone, Copy, Debug)]
pub struct Inputs<'a> {
    names: &'a [NetId],
    bits: &'a [Bit],
}

impl<'a> Inputs<'a> {
    pub fn new(names: &'a [NetId], bits: &'a [Bit]) -> Self {
        Inputs { names, bits }
    }

    /// Value of the named input. Panics on an unknown name.
    pub fn get(&self, name: &str) -> Bit {
        let i = self
            .names
            .iter()
            .position(|n| n.as_str() == name)
            .unwrap_or_else(|| panic!("oracle asked for unknown input `{name}`"));
        self.bits[i]
    }

    pub fn bits(&self) -> &[Bit] {
        self.bits
    }

    /// The named inputs `prefix0..prefix{n-1}` as bits.
    pub fn vector(&self, prefix: &str, n: usize) -> Vec<Bit> {
        (0..n).map(|i| self.get(&format!("{prefix}{i}"))).collect()
    }
}

/// A reference function from inputs to the observed terminals.
pub trait Oracle: Sync {
    fn eval(&self, inputs: Inputs<'_>) -> Vec<Bit>;
}

impl<F> Oracle for F
where
    F: Fn(Inputs<'_>) -> Vec<Bit> + Sync,
{
    fn eval(&self, inputs: Inputs<'_>) -> Vec<Bit> {
        self(inputs)
    }
}

/// Compares `observed` terminals with `oracle` on every input/state
/// assignment, constants pinned.
pub fn check_equivalence<O: Oracle + ?Sized>(
    circuit: &Circuit,
    oracle: &O,
    observed: &[&str],
    cap: usize,
) -> Result<Verdict, VerifyError> {
    let compiled = circuit.compile()?;
    let k = compiled.free_nets().len();
    check_cap(k, cap)?;
    let sink_nets = circuit.terminal_nets();
    let picks: Vec<usize> = observed
        .iter()
        .map(|name| {
            sink_nets
                .iter()
                .position(|n| n.as_str() == *name)
                .and_then(|s| compiled.index_of(sink_nets[s].as_str()))
                .ok_or_else(|| VerifyError::UnknownTerminal(name.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let names = compiled.free_nets();
    let check = |r: u64| -> Result<Option<Witness>, VerifyError> {
        let inputs = unpack_msb_first(r, k);
        let expected = oracle.eval(Inputs::new(names, &inputs));
        if expected.len() != picks.len() {
            return Err(VerifyError::OracleArity {
                expected: picks.len(),
                got: expected.len(),
            });
        }
        let values = compiled.eval(&inputs, &Fredkin);
        let got: Vec<Bit> = picks.iter().map(|&i| values[i]).collect();
        Ok((got != expected).then_some(Witness::Mismatch {
            inputs,
            expected,
            observed: got,
        }))
    };

    let total = 1u64 << k;
    #[cfg(feature = "parallel")]
    let found = {
        use rayon::prelude::*;
        (0..total)
            .into_par_iter()
            .map(check)
            .find_map_first(|res| match res {
                Ok(None) => None,
                other => Some(other),
            })
    };
    #[cfg(not(feature = "parallel"))]
    let found = (0..total).map(check).find_map(|res| match res {
        Ok(None) => None,
        other => Some(other),
    });

    let witness = match found {
        Some(res) => res?,
        None => None,
    };
    Ok(Verdict {
        method: Method::Exhaustive { assignments: total },
        witness,
    })
}

/// Oracle reproducing a recorded behavior table.
pub fn table_oracle<'t>(table: &'t BehaviorTable, observed: &[&str]) -> impl Oracle + 't {
    let picks: Vec<usize> = observed
        .iter()
        .map(|n| table.terminal_index(n).expect("observed net in table"))
        .collect();
    move |inputs: Inputs<'_>| {
        let row = &table.rows[pack_msb_first(inputs.bits()) as usize];
        picks.iter().map(|&i| row.1[i]).collect::<Vec<Bit>>()
    }
}

/// Weight of a vector; re-exported for oracle writers.
pub fn popcount(bits: &[Bit]) -> usize {
    weight(bits)
}

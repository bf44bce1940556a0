// SPDX-License-Identifier: Apache-2.0

//! Value change dump of a simulation trace.
//!
//! One scalar wire per primary input, primary output and state net. Step `k`
//! is written at time `#k`; state nets carry the value committed by that step.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gate::Bit;
use crate::sim::Trace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VcdError {
    #[error("cannot dump an empty trace")]
    EmptyTrace,
}

/// Identifier code for variable `i`: base-94 over printable ASCII.
pub fn id_code(mut i: usize) -> String {
    let mut code = String::new();
    loop {
        code.push((b'!' + (i % 94) as u8) as char);
        i /= 94;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    code
}

pub fn emit_vcd(trace: &Trace) -> Result<String, VcdError> {
    if trace.steps.is_empty() {
        return Err(VcdError::EmptyTrace);
    }
    let vars: Vec<&str> = trace
        .input_nets
        .iter()
        .chain(&trace.output_nets)
        .chain(&trace.state_nets)
        .map(|n| n.as_str())
        .collect();
    let codes: Vec<String> = (0..vars.len()).map(id_code).collect();

    let mut out = String::new();
    out.push_str("$version fredsim $end\n$timescale 1 ns $end\n");
    writeln!(out, "$scope module {} $end", trace.circuit_name).expect("string write");
    for (name, code) in vars.iter().zip(&codes) {
        writeln!(out, "$var wire 1 {code} {name} $end").expect("string write");
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");

    let mut previous: Option<Vec<Bit>> = None;
    for step in &trace.steps {
        let values: Vec<Bit> = step
            .inputs
            .values()
            .chain(step.outputs.values())
            .chain(step.state_after.values())
            .copied()
            .collect();
        writeln!(out, "#{}", step.step_index).expect("string write");
        match &previous {
            None => {
                out.push_str("$dumpvars\n");
                for (v, code) in values.iter().zip(&codes) {
                    writeln!(out, "{v}{code}").expect("string write");
                }
                out.push_str("$end\n");
            }
            Some(prev) => {
                for ((v, p), code) in values.iter().zip(prev).zip(&codes) {
                    if v != p {
                        writeln!(out, "{v}{code}").expect("string write");
                    }
                }
            }
        }
        previous = Some(values);
    }
    Ok(out)
}

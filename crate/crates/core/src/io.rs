// SPDX-License-Identifier: Apache-2.0

//! Text formats: the netlist language, stimulus CSV and VCD traces.

mod netlist_text;
mod stimulus;
mod vcd;

pub use netlist_text::{emit_netlist, parse_netlist, LocatedViolation, ParseError};
pub use stimulus::{read_stimulus, write_stimulus, StimulusError};
pub use vcd::{emit_vcd, id_code, VcdError};

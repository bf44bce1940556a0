// SPDX-License-Identifier: Apache-2.0

//! Fredkin-gate circuits: netlists, exhaustive verification, a cell library
//! of latches, flip-flops and serial datapaths, and clocked simulation.

pub mod cells;
pub mod cli;
pub mod gate;
pub mod io;
pub mod netlist;
pub mod sim;
pub mod verify;

// SPDX-License-Identifier: Apache-2.0

//! Full-width enumeration engine.
//!
//! Every source net, constants included, becomes one line of a `w`-bit
//! register. A gate overwrites its three input lines with its outputs, so the
//! whole circuit is an in-place map on `w`-bit words and the final word holds
//! the terminal values. 64 assignments are evaluated at once, one per bit
//! lane, and the lanes are transposed back into words for the injectivity
//! bitmap and the weight comparison.

use crate::gate::ReversibleGate;
use crate::netlist::Compiled;

/// Gate list rewritten onto register lines.
#[derive(Clone, Debug)]
pub struct LineProgram {
    width: usize,
    gates: Vec<[usize; 3]>,
    /// Register line holding each terminal, in sink order.
    terminal_lines: Vec<usize>,
}

impl LineProgram {
    pub fn new(compiled: &Compiled) -> Self {
        let width = compiled.source_roles().len();
        let mut line_of = vec![usize::MAX; compiled.net_count()];
        for (i, slot) in line_of.iter_mut().enumerate().take(width) {
            *slot = i;
        }
        let mut gates = Vec::with_capacity(compiled.gate_pins().len());
        for (ins, outs) in compiled.gate_pins() {
            let lines = ins.map(|n| line_of[n]);
            for (o, l) in outs.iter().zip(lines) {
                line_of[*o] = l;
            }
            gates.push(lines);
        }
        let terminal_lines = compiled.sinks().iter().map(|(n, _)| line_of[*n]).collect();
        LineProgram {
            width,
            gates,
            terminal_lines,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terminal_lines(&self) -> &[usize] {
        &self.terminal_lines
    }

    /// Bit position of a line inside a packed word; line 0 is the most significant.
    fn pos(&self, line: usize) -> usize {
        self.width - 1 - line
    }

    /// Scalar evaluation of one packed assignment.
    pub fn apply<G: ReversibleGate + ?Sized>(&self, gate: &G, word: u64) -> u64 {
        let table = gate.table();
        let mut w = word;
        for lines in &self.gates {
            let p = lines.map(|l| self.pos(l));
            let idx = (((w >> p[0]) & 1) << 2) | (((w >> p[1]) & 1) << 1) | ((w >> p[2]) & 1);
            let out = table[idx as usize] as u64;
            for (k, &pk) in p.iter().enumerate() {
                let bit = (out >> (2 - k)) & 1;
                w = (w & !(1 << pk)) | (bit << pk);
            }
        }
        w
    }

    fn lane_bits(&self) -> usize {
        self.width.min(6)
    }

    /// Number of 64-lane blocks covering all `2^width` assignments.
    pub fn block_count(&self) -> u64 {
        1u64 << (self.width - self.lane_bits())
    }

    /// Packed results for every lane of block `h`: `out[lane]` is the image of
    /// assignment `(h << lane_bits) | lane`.
    pub fn eval_block<G: ReversibleGate + ?Sized>(&self, gate: &G, h: u64, out: &mut [u64; 64]) {
        const PATTERNS: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        let lb = self.lane_bits();
        let mut lines = [0u64; 64];
        for (line, word) in lines.iter_mut().enumerate().take(self.width) {
            let p = self.pos(line);
            *word = if p < lb {
                PATTERNS[p]
            } else if (h >> (p - lb)) & 1 == 1 {
                !0
            } else {
                0
            };
        }
        for g in &self.gates {
            let y = gate.eval_sliced([lines[g[0]], lines[g[1]], lines[g[2]]]);
            lines[g[0]] = y[0];
            lines[g[1]] = y[1];
            lines[g[2]] = y[2];
        }
        // row p of the matrix is the word for bit position p
        out.fill(0);
        for line in 0..self.width {
            out[self.pos(line)] = lines[line];
        }
        transpose64(out);
    }
}

/// In-place transpose of a 64x64 bit matrix: afterwards bit `c` of row `r`
/// is what bit `r` of row `c` was.
pub fn transpose64(a: &mut [u64; 64]) {
    let mut j = 32usize;
    let mut m: u64 = 0x0000_0000_FFFF_FFFF;
    while j != 0 {
        let mut k = 0usize;
        while k < 64 {
            let t = ((a[k] >> j) ^ a[k + j]) & m;
            a[k + j] ^= t;
            a[k] ^= t << j;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        m ^= m << j;
    }
}

/// First failures found by a full-width scan, as packed assignments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanResult {
    /// An assignment whose image was already produced by another assignment.
    pub collision: Option<u64>,
    /// An assignment whose image has a different number of ones.
    pub weight: Option<u64>,
    pub assignments: u64,
}

fn bitmap_words(width: usize) -> usize {
    if width >= 6 {
        1 << (width - 6)
    } else {
        1
    }
}

pub fn scan_sequential<G: ReversibleGate + ?Sized>(program: &LineProgram, gate: &G) -> ScanResult {
    let lanes = 1usize << program.lane_bits();
    let lb = program.lane_bits();
    let mut seen = vec![0u64; bitmap_words(program.width)];
    let mut result = ScanResult {
        assignments: 1u64 << program.width,
        ..ScanResult::default()
    };
    let mut out = [0u64; 64];
    for h in 0..program.block_count() {
        program.eval_block(gate, h, &mut out);
        for (lane, &img) in out.iter().enumerate().take(lanes) {
            let r = (h << lb) | lane as u64;
            let (w, b) = ((img >> 6) as usize, 1u64 << (img & 63));
            if seen[w] & b != 0 {
                result.collision.get_or_insert(r);
            }
            seen[w] |= b;
            if img.count_ones() != r.count_ones() {
                result.weight.get_or_insert(r);
            }
        }
        if result.collision.is_some() && result.weight.is_some() {
            break;
        }
    }
    result
}

#[cfg(feature = "parallel")]
pub fn scan_parallel<G: ReversibleGate + ?Sized>(program: &LineProgram, gate: &G) -> ScanResult {
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicU64, Ordering};

    const BLOCKS_PER_TASK: u64 = 256;
    let lanes = 1usize << program.lane_bits();
    let lb = program.lane_bits();
    let seen: Vec<AtomicU64> = (0..bitmap_words(program.width))
        .map(|_| AtomicU64::new(0))
        .collect();
    let blocks = program.block_count();
    let tasks = blocks.div_ceil(BLOCKS_PER_TASK);

    let (collision, weight) = (0..tasks)
        .into_par_iter()
        .map(|t| {
            let mut found: (Option<u64>, Option<u64>) = (None, None);
            let mut out = [0u64; 64];
            let end = ((t + 1) * BLOCKS_PER_TASK).min(blocks);
            for h in t * BLOCKS_PER_TASK..end {
                program.eval_block(gate, h, &mut out);
                for (lane, &img) in out.iter().enumerate().take(lanes) {
                    let r = (h << lb) | lane as u64;
                    let b = 1u64 << (img & 63);
                    if seen[(img >> 6) as usize].fetch_or(b, Ordering::Relaxed) & b != 0 {
                        found.0.get_or_insert(r);
                    }
                    if img.count_ones() != r.count_ones() {
                        found.1.get_or_insert(r);
                    }
                }
            }
            found
        })
        .reduce(|| (None, None), |a, b| (a.0.or(b.0), a.1.or(b.1)));

    ScanResult {
        collision,
        weight,
        assignments: 1u64 << program.width,
    }
}

/// Runs the parallel scan when it can help, the sequential one otherwise.
pub fn scan<G: ReversibleGate + ?Sized>(program: &LineProgram, gate: &G) -> ScanResult {
    #[cfg(feature = "parallel")]
    {
        const PARALLEL_MIN_WIDTH: usize = 16;
        if program.width >= PARALLEL_MIN_WIDTH && rayon::current_num_threads() > 1 {
            return scan_parallel(program, gate);
        }
    }
    scan_sequential(program, gate)
}

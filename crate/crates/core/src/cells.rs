// SPDX-License-Identifier: Apache-2.0

//! Builders for the standard cell catalog.
//!
//! Every cell uses Fredkin gates only. Duplication is always an explicit
//! copy gate `F(a, 0, 1) = (a, a, ¬a)` with fresh ancilla.
//!
//! Gate-level wiring:
//!
//! * D latch: `F(E, Q, D)` puts `Ē·Q ∨ E·D` on its second output; a copy gate
//!   splits that into the state-next line, `Q_out` and `Q_bar`. The enable
//!   pass-through and the third output are garbage (2 gates, 2 garbage, 2 ancilla).
//! * SR, JK and T latches put an input stage in front of the D latch core that
//!   computes the next state as the equivalent `D`:
//!   JK uses `F(Q, J, ¬K)`, T uses `F(Q, T, ¬T)` and SR uses
//!   `F(Q, S, S ∨ ¬R)`. The state line passes through the control pin of that
//!   first gate on its way into the latch gate, so it needs no copy.
//! * Master-slave flip-flops copy `CP` into `CP` and `¬CP`; the master latch is
//!   enabled by `CP`, the D slave latch by `¬CP`.
//! * Multi-stage cells (shift register, serial transfer, serial adder) copy the
//!   clock once and pass `CP`/`¬CP` from stage to stage through the enable
//!   pass-through outputs of the master and slave latch gates.
//! * A loop back into a register (recirculation, sum feedback) is taken from a
//!   copy of the last stage's state feedback, so the wiring stays acyclic. While
//!   `CP` is high the slaves hold, so that copy equals the slave output.
//! * The register distributes its enable through a breadth-first tree of
//!   `n - 1` copy gates; their complement lines are garbage.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::gate::Bit;
use crate::netlist::{Circuit, CircuitBuilder, Metrics, NetId, NetlistError, SequentialCircuit};
use crate::sim::InputWarning;
use crate::verify::{Inputs, Oracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatchKind {
    D,
    SR,
    JK,
    T,
}

impl LatchKind {
    pub const ALL: [LatchKind; 4] = [LatchKind::D, LatchKind::SR, LatchKind::JK, LatchKind::T];

    /// Names of the data inputs, in order.
    pub fn data_inputs(self) -> &'static [&'static str] {
        match self {
            LatchKind::D => &["D"],
            LatchKind::SR => &["S", "R"],
            LatchKind::JK => &["J", "K"],
            LatchKind::T => &["T"],
        }
    }

    /// Next state while enabled.
    pub fn characteristic(self, data: &[Bit], q: Bit) -> Bit {
        match self {
            LatchKind::D => data[0],
            LatchKind::SR => data[0] | (!data[1] & q),
            LatchKind::JK => (data[0] & !q) | (!data[1] & q),
            LatchKind::T => data[0] ^ q,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            LatchKind::D => "d",
            LatchKind::SR => "sr",
            LatchKind::JK => "jk",
            LatchKind::T => "t",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Copy,
    Not,
    And,
    Or,
    Xor,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error("cell width must be at least 1")]
    ZeroWidth,
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

fn net(name: &str) -> NetId {
    NetId::new(name).expect("cell net names are identifiers")
}

fn copy(cb: &mut CircuitBuilder, p: &str, a: &NetId) -> [NetId; 3] {
    let z = cb.const0(&format!("{p}_c0"));
    let o = cb.const1(&format!("{p}_c1"));
    cb.gate(
        [a, &z, &o],
        [&format!("{p}_a"), &format!("{p}_b"), &format!("{p}_n")],
    )
}

pub fn build_logic_primitive(kind: Primitive) -> Circuit {
    let seq = match kind {
        Primitive::Copy => {
            let mut cb = CircuitBuilder::new("copy");
            let a = cb.input("a");
            let z = cb.const0("z");
            let o = cb.const1("o");
            for y in cb.gate([&a, &z, &o], ["a1", "a2", "na"]) {
                cb.output(&y);
            }
            cb.finish()
        }
        Primitive::Not => {
            let mut cb = CircuitBuilder::new("not");
            let a = cb.input("a");
            let z = cb.const0("z");
            let o = cb.const1("o");
            let [a1, a2, y] = cb.gate([&a, &z, &o], ["a1", "a2", "y"]);
            cb.garbage(&a1);
            cb.garbage(&a2);
            cb.output(&y);
            cb.finish()
        }
        Primitive::And => {
            // F(a, b, 0): y3 = a·b
            let mut cb = CircuitBuilder::new("and");
            let a = cb.input("a");
            let b = cb.input("b");
            let z = cb.const0("z");
            let [ga, gb, y] = cb.gate([&a, &b, &z], ["ga", "gb", "y"]);
            cb.garbage(&ga);
            cb.garbage(&gb);
            cb.output(&y);
            cb.finish()
        }
        Primitive::Or => {
            // F(a, 1, b): y3 = a ∨ b
            let mut cb = CircuitBuilder::new("or");
            let a = cb.input("a");
            let b = cb.input("b");
            let o = cb.const1("o");
            let [ga, gb, y] = cb.gate([&a, &o, &b], ["ga", "gb", "y"]);
            cb.garbage(&ga);
            cb.garbage(&gb);
            cb.output(&y);
            cb.finish()
        }
        Primitive::Xor => {
            // copy a, then F(b, a, ¬a): y2 = a ⊕ b
            let mut cb = CircuitBuilder::new("xor");
            let a = cb.input("a");
            let b = cb.input("b");
            let z = cb.const0("z");
            let o = cb.const1("o");
            let [a0, a1, na] = cb.gate([&a, &z, &o], ["a0", "a1", "na"]);
            let [gb, y, xn] = cb.gate([&b, &a1, &na], ["gb", "y", "xn"]);
            cb.garbage(&a0);
            cb.garbage(&gb);
            cb.garbage(&xn);
            cb.output(&y);
            cb.finish()
        }
    };
    seq.expect("primitive cells are valid").into_core()
}

/// Nets leaving one latch instance. Internal garbage is already tagged.
struct LatchOut {
    enable_pass: NetId,
    q: NetId,
    q_bar: NetId,
}

/// Names for the three lines of a latch's output copy gate.
struct LatchNames<'a> {
    next: &'a str,
    q: &'a str,
    q_bar: &'a str,
}

/// One latch of `kind`. `state` carries the current state value (the feedback
/// net itself or a copy of it).
fn latch(
    cb: &mut CircuitBuilder,
    p: &str,
    kind: LatchKind,
    enable: &NetId,
    data: &[NetId],
    state: &NetId,
    names: LatchNames<'_>,
) -> LatchOut {
    let (state_line, d_eq) = match kind {
        LatchKind::D => (state.clone(), data[0].clone()),
        LatchKind::T => {
            let [t_a, t_b, t_n] = copy(cb, &format!("{p}_t"), &data[0]);
            cb.garbage(&t_a);
            let [q, d, r] = cb.gate(
                [state, &t_b, &t_n],
                [&format!("{p}_qp"), &format!("{p}_de"), &format!("{p}_xr")],
            );
            cb.garbage(&r);
            (q, d)
        }
        LatchKind::JK => {
            let [k_a, k_b, nk] = copy(cb, &format!("{p}_k"), &data[1]);
            cb.garbage(&k_a);
            cb.garbage(&k_b);
            let [q, d, r] = cb.gate(
                [state, &data[0], &nk],
                [&format!("{p}_qp"), &format!("{p}_de"), &format!("{p}_mr")],
            );
            cb.garbage(&r);
            (q, d)
        }
        LatchKind::SR => {
            let [s_a, s_b, s_n] = copy(cb, &format!("{p}_s"), &data[0]);
            cb.garbage(&s_n);
            let one = cb.const1(&format!("{p}_or_c1"));
            // F(R, 1, S): y2 = ¬R ∨ S
            let [r_p, s_or_nr, or_r] = cb.gate(
                [&data[1], &one, &s_b],
                [&format!("{p}_rp"), &format!("{p}_sor"), &format!("{p}_orr")],
            );
            cb.garbage(&r_p);
            cb.garbage(&or_r);
            let [q, d, r] = cb.gate(
                [state, &s_a, &s_or_nr],
                [&format!("{p}_qp"), &format!("{p}_de"), &format!("{p}_mr")],
            );
            cb.garbage(&r);
            (q, d)
        }
    };
    let [en, q_plus, r] = cb.gate(
        [enable, &state_line, &d_eq],
        [&format!("{p}_en"), &format!("{p}_qn"), &format!("{p}_r")],
    );
    cb.garbage(&r);
    let z = cb.const0(&format!("{p}_c0"));
    let o = cb.const1(&format!("{p}_c1"));
    let [_, q, q_bar] = cb.gate([&q_plus, &z, &o], [names.next, names.q, names.q_bar]);
    LatchOut {
        enable_pass: en,
        q,
        q_bar,
    }
}

pub fn build_latch(kind: LatchKind) -> SequentialCircuit {
    let mut cb = CircuitBuilder::new(&format!("{}_latch", kind.tag()));
    let e = cb.input("E");
    let data: Vec<NetId> = kind.data_inputs().iter().map(|n| cb.input(n)).collect();
    let q = cb.state("Q", "Q_next", Bit::ZERO);
    let out = latch(
        &mut cb,
        "L",
        kind,
        &e,
        &data,
        &q,
        LatchNames {
            next: "Q_next",
            q: "Q_out",
            q_bar: "Q_bar",
        },
    );
    cb.garbage(&out.enable_pass);
    cb.output(&out.q);
    cb.output(&out.q_bar);
    cb.finish().expect("latch cells are valid")
}

struct StageOut {
    cp_pass: NetId,
    ncp_pass: NetId,
    q: NetId,
    q_bar: NetId,
}

/// Master latch of `kind` on `cp`, D slave latch on `ncp`. The master's own
/// output feeds the slave and its complement is garbage.
#[allow(clippy::too_many_arguments)]
fn ms_stage(
    cb: &mut CircuitBuilder,
    p: &str,
    kind: LatchKind,
    cp: &NetId,
    ncp: &NetId,
    data: &[NetId],
    master: &NetId,
    master_next: &str,
    slave: &NetId,
    slave_names: LatchNames<'_>,
) -> StageOut {
    let m = latch(
        cb,
        &format!("{p}m"),
        kind,
        cp,
        data,
        master,
        LatchNames {
            next: master_next,
            q: &format!("{p}m_q"),
            q_bar: &format!("{p}m_qb"),
        },
    );
    cb.garbage(&m.q_bar);
    let s = latch(
        cb,
        &format!("{p}s"),
        LatchKind::D,
        ncp,
        &[m.q],
        slave,
        slave_names,
    );
    StageOut {
        cp_pass: m.enable_pass,
        ncp_pass: s.enable_pass,
        q: s.q,
        q_bar: s.q_bar,
    }
}

/// Copies `CP` into the master and slave clock lines plus a spare copy.
fn clock_split(cb: &mut CircuitBuilder, cp: &NetId) -> (NetId, NetId) {
    let [cp_a, cp_b, ncp] = copy(cb, "clk", cp);
    cb.garbage(&cp_b);
    (cp_a, ncp)
}

pub fn build_ms_flipflop(kind: LatchKind) -> SequentialCircuit {
    let mut cb = CircuitBuilder::new(&format!("ms_{}", kind.tag()));
    let cp = cb.input("CP");
    let data: Vec<NetId> = kind.data_inputs().iter().map(|n| cb.input(n)).collect();
    let m = cb.state("M", "M_next", Bit::ZERO);
    let q = cb.state("Q", "Q_next", Bit::ZERO);
    let (cp_m, ncp) = clock_split(&mut cb, &cp);
    let out = ms_stage(
        &mut cb,
        "",
        kind,
        &cp_m,
        &ncp,
        &data,
        &m,
        "M_next",
        &q,
        LatchNames {
            next: "Q_next",
            q: "Q_out",
            q_bar: "Q_bar",
        },
    );
    cb.garbage(&out.cp_pass);
    cb.garbage(&out.ncp_pass);
    cb.output(&out.q);
    cb.output(&out.q_bar);
    cb.finish().expect("flip-flop cells are valid")
}

pub fn build_register(n: usize) -> Result<SequentialCircuit, CellError> {
    if n == 0 {
        return Err(CellError::ZeroWidth);
    }
    let mut cb = CircuitBuilder::new("register");
    let e = cb.input("E");
    let data: Vec<NetId> = (0..n).map(|i| cb.input(&format!("D{i}"))).collect();
    let states: Vec<NetId> = (0..n)
        .map(|i| cb.state(&format!("Q{i}"), &format!("Q{i}_next"), Bit::ZERO))
        .collect();

    let mut clocks = std::collections::VecDeque::from([e]);
    let mut k = 0;
    while clocks.len() < n {
        let line = clocks.pop_front().expect("non-empty");
        let [a, b, nb] = copy(&mut cb, &format!("e{k}"), &line);
        cb.garbage(&nb);
        clocks.push_back(a);
        clocks.push_back(b);
        k += 1;
    }

    for (i, ((en, d), q)) in clocks.iter().zip(&data).zip(&states).enumerate() {
        let out = latch(
            &mut cb,
            &format!("L{i}"),
            LatchKind::D,
            en,
            std::slice::from_ref(d),
            q,
            LatchNames {
                next: &format!("Q{i}_next"),
                q: &format!("Q{i}_out"),
                q_bar: &format!("Q{i}_bar"),
            },
        );
        cb.garbage(&out.enable_pass);
        cb.output(&out.q);
        cb.output(&out.q_bar);
    }
    Ok(cb.finish()?)
}

/// State nets of one shift-register chain.
struct Chain {
    prefix: String,
    masters: Vec<NetId>,
    slaves: Vec<NetId>,
}

impl Chain {
    fn declare(cb: &mut CircuitBuilder, prefix: &str, n: usize) -> Chain {
        let mut masters = Vec::new();
        let mut slaves = Vec::new();
        for i in 0..n {
            masters.push(cb.state(
                &format!("{prefix}M{i}"),
                &format!("{prefix}M{i}_next"),
                Bit::ZERO,
            ));
            slaves.push(cb.state(
                &format!("{prefix}Q{i}"),
                &format!("{prefix}Q{i}_next"),
                Bit::ZERO,
            ));
        }
        Chain {
            prefix: prefix.to_string(),
            masters,
            slaves,
        }
    }

    /// Copies the last slave's feedback: returns the line for the slave latch
    /// and the tapped value.
    fn tap(&self, cb: &mut CircuitBuilder) -> (NetId, NetId) {
        let last = self.slaves.last().expect("n >= 1");
        let [line, tap, tap_n] = copy(cb, &format!("{}tap", self.prefix), last);
        cb.garbage(&tap_n);
        (line, tap)
    }

    /// Emits the MS-D stages. `last_slave_line` replaces the last slave's
    /// feedback net when it has been tapped. Returns the clock pass-throughs
    /// and the last stage's output lines.
    fn emit(
        &self,
        cb: &mut CircuitBuilder,
        clock: (NetId, NetId),
        serial_in: NetId,
        last_slave_line: Option<NetId>,
        serial_out: &str,
    ) -> StageOut {
        let n = self.masters.len();
        let (mut cp, mut ncp) = clock;
        let mut d = serial_in;
        for i in 0..n {
            let p = &self.prefix;
            let slave_line = match (&last_slave_line, i + 1 == n) {
                (Some(line), true) => line.clone(),
                _ => self.slaves[i].clone(),
            };
            let q_name = if i + 1 == n {
                serial_out.to_string()
            } else {
                format!("{p}Q{i}_out")
            };
            let out = ms_stage(
                cb,
                &format!("{p}F{i}"),
                LatchKind::D,
                &cp,
                &ncp,
                &[d],
                &self.masters[i],
                &format!("{p}M{i}_next"),
                &slave_line,
                LatchNames {
                    next: &format!("{p}Q{i}_next"),
                    q: &q_name,
                    q_bar: &format!("{p}Q{i}_bar"),
                },
            );
            if i + 1 == n {
                return out;
            }
            cb.garbage(&out.q_bar);
            cp = out.cp_pass;
            ncp = out.ncp_pass;
            d = out.q;
        }
        unreachable!("n >= 1")
    }
}

pub fn build_shift_register(n: usize) -> Result<SequentialCircuit, CellError> {
    if n == 0 {
        return Err(CellError::ZeroWidth);
    }
    let mut cb = CircuitBuilder::new("shift_register");
    let cp = cb.input("CP");
    let si = cb.input("SI");
    let chain = Chain::declare(&mut cb, "", n);
    let clock = clock_split(&mut cb, &cp);
    let out = chain.emit(&mut cb, clock, si, None, "SO");
    cb.garbage(&out.cp_pass);
    cb.garbage(&out.ncp_pass);
    cb.garbage(&out.q_bar);
    cb.output(&out.q);
    Ok(cb.finish()?)
}

pub fn build_serial_transfer(n: usize) -> Result<SequentialCircuit, CellError> {
    if n == 0 {
        return Err(CellError::ZeroWidth);
    }
    let mut cb = CircuitBuilder::new("serial_transfer");
    let cp = cb.input("CP");
    let a = Chain::declare(&mut cb, "A_", n);
    let b = Chain::declare(&mut cb, "B_", n);
    let clock = clock_split(&mut cb, &cp);
    let (a_line, a_rec) = a.tap(&mut cb);
    let a_out = a.emit(&mut cb, clock, a_rec, Some(a_line), "A_SO");
    cb.garbage(&a_out.q_bar);
    let b_out = b.emit(
        &mut cb,
        (a_out.cp_pass, a_out.ncp_pass),
        a_out.q,
        None,
        "SO",
    );
    cb.garbage(&b_out.cp_pass);
    cb.garbage(&b_out.ncp_pass);
    cb.garbage(&b_out.q_bar);
    cb.output(&b_out.q);
    Ok(cb.finish()?)
}

/// Full adder from five Fredkin gates and four ancilla:
/// `p = a ⊕ b`, `cout = p ? cin : a`, `sum = p ⊕ cin`.
fn full_adder(
    cb: &mut CircuitBuilder,
    p: &str,
    a: &NetId,
    b: &NetId,
    cin: &NetId,
    sum_name: &str,
    cout_name: &str,
) -> (NetId, NetId) {
    let [a1, a2, na] = copy(cb, &format!("{p}a"), a);
    let [b_p, x, nx] = cb.gate(
        [b, &a1, &na],
        [&format!("{p}bp"), &format!("{p}x"), &format!("{p}nx")],
    );
    let [c1, c2, nc] = copy(cb, &format!("{p}c"), cin);
    let [x1, cout, mr] = cb.gate(
        [&x, &a2, &c1],
        [&format!("{p}x1"), cout_name, &format!("{p}mr")],
    );
    let [x2, sum, nsum] = cb.gate(
        [&x1, &c2, &nc],
        [&format!("{p}x2"), sum_name, &format!("{p}ns")],
    );
    for g in [b_p, nx, mr, x2, nsum] {
        cb.garbage(&g);
    }
    (sum, cout)
}

pub fn build_full_adder() -> Circuit {
    let mut cb = CircuitBuilder::new("full_adder");
    let a = cb.input("a");
    let b = cb.input("b");
    let cin = cb.input("cin");
    let (sum, cout) = full_adder(&mut cb, "", &a, &b, &cin, "sum", "cout");
    cb.output(&sum);
    cb.output(&cout);
    cb.finish().expect("full adder is valid").into_core()
}

/// Serial adder: A and B shift out LSB first through a full adder; the sum
/// shifts back into A, B recirculates, and the carry sits in an MS-D flip-flop.
pub fn build_serial_adder(n: usize) -> Result<SequentialCircuit, CellError> {
    if n == 0 {
        return Err(CellError::ZeroWidth);
    }
    let mut cb = CircuitBuilder::new("serial_adder");
    let cp = cb.input("CP");
    let a = Chain::declare(&mut cb, "A_", n);
    let b = Chain::declare(&mut cb, "B_", n);
    let carry = Chain::declare(&mut cb, "C_", 1);
    let clock = clock_split(&mut cb, &cp);
    let (a_line, a_tap) = a.tap(&mut cb);
    let (b_line, b_tap) = b.tap(&mut cb);
    let (c_line, c_tap) = carry.tap(&mut cb);

    let b_out = b.emit(&mut cb, clock, b_tap, Some(b_line), "B_SO");
    cb.garbage(&b_out.q_bar);
    let (sum, cout) = full_adder(
        &mut cb, "fa_", &a_tap, &b_out.q, &c_tap, "fa_sum", "fa_cout",
    );
    let a_out = a.emit(
        &mut cb,
        (b_out.cp_pass, b_out.ncp_pass),
        sum,
        Some(a_line),
        "SO",
    );
    cb.garbage(&a_out.q_bar);
    cb.output(&a_out.q);
    let c_out = carry.emit(
        &mut cb,
        (a_out.cp_pass, a_out.ncp_pass),
        cout,
        Some(c_line),
        "CARRY",
    );
    cb.garbage(&c_out.cp_pass);
    cb.garbage(&c_out.ncp_pass);
    cb.garbage(&c_out.q_bar);
    cb.output(&c_out.q);
    Ok(cb.finish()?)
}

/// Catalog cell names, as used by the `gen` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellName {
    Copy,
    Not,
    And,
    Or,
    Xor,
    DLatch,
    SrLatch,
    JkLatch,
    TLatch,
    MsD,
    MsSr,
    MsJk,
    MsT,
    Register,
    ShiftRegister,
    SerialTransfer,
    FullAdder,
    SerialAdder,
}

impl CellName {
    pub const ALL: [CellName; 18] = [
        CellName::Copy,
        CellName::Not,
        CellName::And,
        CellName::Or,
        CellName::Xor,
        CellName::DLatch,
        CellName::SrLatch,
        CellName::JkLatch,
        CellName::TLatch,
        CellName::MsD,
        CellName::MsSr,
        CellName::MsJk,
        CellName::MsT,
        CellName::Register,
        CellName::ShiftRegister,
        CellName::SerialTransfer,
        CellName::FullAdder,
        CellName::SerialAdder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CellName::Copy => "copy",
            CellName::Not => "not",
            CellName::And => "and",
            CellName::Or => "or",
            CellName::Xor => "xor",
            CellName::DLatch => "d_latch",
            CellName::SrLatch => "sr_latch",
            CellName::JkLatch => "jk_latch",
            CellName::TLatch => "t_latch",
            CellName::MsD => "ms_d",
            CellName::MsSr => "ms_sr",
            CellName::MsJk => "ms_jk",
            CellName::MsT => "ms_t",
            CellName::Register => "register",
            CellName::ShiftRegister => "shift_register",
            CellName::SerialTransfer => "serial_transfer",
            CellName::FullAdder => "full_adder",
            CellName::SerialAdder => "serial_adder",
        }
    }

    /// Whether the cell takes a bit width.
    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            CellName::Register
                | CellName::ShiftRegister
                | CellName::SerialTransfer
                | CellName::SerialAdder
        )
    }

    fn latch_kind(self) -> Option<(LatchKind, bool)> {
        Some(match self {
            CellName::DLatch => (LatchKind::D, false),
            CellName::SrLatch => (LatchKind::SR, false),
            CellName::JkLatch => (LatchKind::JK, false),
            CellName::TLatch => (LatchKind::T, false),
            CellName::MsD => (LatchKind::D, true),
            CellName::MsSr => (LatchKind::SR, true),
            CellName::MsJk => (LatchKind::JK, true),
            CellName::MsT => (LatchKind::T, true),
            _ => return None,
        })
    }

    /// Builds the cell; `n` is ignored by fixed-size cells.
    pub fn build(self, n: usize) -> Result<SequentialCircuit, CellError> {
        let comb = |c: Circuit| Ok(SequentialCircuit::combinational(c));
        match self {
            CellName::Copy => comb(build_logic_primitive(Primitive::Copy)),
            CellName::Not => comb(build_logic_primitive(Primitive::Not)),
            CellName::And => comb(build_logic_primitive(Primitive::And)),
            CellName::Or => comb(build_logic_primitive(Primitive::Or)),
            CellName::Xor => comb(build_logic_primitive(Primitive::Xor)),
            CellName::FullAdder => comb(build_full_adder()),
            CellName::Register => build_register(n),
            CellName::ShiftRegister => build_shift_register(n),
            CellName::SerialTransfer => build_serial_transfer(n),
            CellName::SerialAdder => build_serial_adder(n),
            other => {
                let (kind, ms) = other.latch_kind().expect("latch cell");
                Ok(if ms {
                    build_ms_flipflop(kind)
                } else {
                    build_latch(kind)
                })
            }
        }
    }

    /// Input combinations the simulator should flag.
    pub fn input_warnings(self) -> Vec<InputWarning> {
        let enable = match self {
            CellName::SrLatch => "E",
            CellName::MsSr => "CP",
            _ => return Vec::new(),
        };
        vec![InputWarning::new(
            [enable, "S", "R"].map(net).to_vec(),
            "S and R both high while enabled",
        )]
    }

    pub fn from_circuit_name(name: &str) -> Option<CellName> {
        name.parse().ok()
    }
}

impl fmt::Display for CellName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CellName {
    type Err = CellError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CellError::UnknownCell(s.to_string()))
    }
}

/// Reference next-state/output function of a cell over its behavior-table inputs.
#[derive(Clone)]
pub struct CellOracle {
    pub observed: Vec<NetId>,
    func: Arc<dyn Fn(Inputs<'_>) -> Vec<Bit> + Send + Sync>,
}

impl CellOracle {
    fn new(
        observed: Vec<String>,
        func: impl Fn(Inputs<'_>) -> Vec<Bit> + Send + Sync + 'static,
    ) -> Self {
        CellOracle {
            observed: observed.iter().map(|s| net(s)).collect(),
            func: Arc::new(func),
        }
    }

    pub fn observed_names(&self) -> Vec<&str> {
        self.observed.iter().map(NetId::as_str).collect()
    }
}

impl Oracle for CellOracle {
    fn eval(&self, inputs: Inputs<'_>) -> Vec<Bit> {
        (self.func)(inputs)
    }
}

impl fmt::Debug for CellOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CellOracle")
            .field("observed", &self.observed)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct CellCatalogEntry {
    pub name: CellName,
    pub circuit: SequentialCircuit,
    pub metrics: Metrics,
    pub oracle: CellOracle,
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Next master/slave values of one MS-D style stage.
fn ms_next(cp: Bit, master_d: Bit, m: Bit, q: Bit) -> (Bit, Bit) {
    if cp.is_high() {
        (master_d, q)
    } else {
        (m, m)
    }
}

/// Observed nets of a shift chain: master/slave next values per stage.
fn chain_observed(prefix: &str, n: usize) -> Vec<String> {
    (0..n)
        .flat_map(|i| [format!("{prefix}M{i}_next"), format!("{prefix}Q{i}_next")])
        .collect()
}

/// Next values of a chain given what shifts into stage 0.
fn chain_next(i: &Inputs<'_>, prefix: &str, n: usize, cp: Bit, serial_in: Bit) -> Vec<Bit> {
    let m = i.vector(&format!("{prefix}M"), n);
    let q = i.vector(&format!("{prefix}Q"), n);
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        let d = if k == 0 { serial_in } else { q[k - 1] };
        let (mn, qn) = ms_next(cp, d, m[k], q[k]);
        out.push(mn);
        out.push(qn);
    }
    out
}

fn oracle_for(name: CellName, n: usize) -> CellOracle {
    match name {
        CellName::Copy => CellOracle::new(strs(&["a1", "a2", "na"]), |i| {
            let a = i.get("a");
            vec![a, a, !a]
        }),
        CellName::Not => CellOracle::new(strs(&["y"]), |i| vec![!i.get("a")]),
        CellName::And => CellOracle::new(strs(&["y"]), |i| vec![i.get("a") & i.get("b")]),
        CellName::Or => CellOracle::new(strs(&["y"]), |i| vec![i.get("a") | i.get("b")]),
        CellName::Xor => CellOracle::new(strs(&["y"]), |i| vec![i.get("a") ^ i.get("b")]),
        CellName::FullAdder => CellOracle::new(strs(&["sum", "cout"]), |i| {
            let total = [i.get("a"), i.get("b"), i.get("cin")]
                .iter()
                .filter(|b| b.is_high())
                .count();
            vec![Bit::new(total % 2 == 1), Bit::new(total >= 2)]
        }),
        CellName::DLatch | CellName::SrLatch | CellName::JkLatch | CellName::TLatch => {
            let (kind, _) = name.latch_kind().expect("latch");
            CellOracle::new(strs(&["Q_next", "Q_out", "Q_bar"]), move |i| {
                let data: Vec<Bit> = kind.data_inputs().iter().map(|d| i.get(d)).collect();
                let q = i.get("Q");
                let next = if i.get("E").is_high() {
                    kind.characteristic(&data, q)
                } else {
                    q
                };
                vec![next, next, !next]
            })
        }
        CellName::MsD | CellName::MsSr | CellName::MsJk | CellName::MsT => {
            let (kind, _) = name.latch_kind().expect("latch");
            CellOracle::new(strs(&["M_next", "Q_next", "Q_out", "Q_bar"]), move |i| {
                let data: Vec<Bit> = kind.data_inputs().iter().map(|d| i.get(d)).collect();
                let (m, q) = (i.get("M"), i.get("Q"));
                let (mn, qn) = ms_next(i.get("CP"), kind.characteristic(&data, m), m, q);
                vec![mn, qn, qn, !qn]
            })
        }
        CellName::Register => {
            let mut observed = Vec::new();
            for k in 0..n {
                observed.push(format!("Q{k}_out"));
                observed.push(format!("Q{k}_bar"));
            }
            observed.extend((0..n).map(|k| format!("Q{k}_next")));
            CellOracle::new(observed, move |i| {
                let e = i.get("E");
                let next: Vec<Bit> = (0..n)
                    .map(|k| {
                        if e.is_high() {
                            i.get(&format!("D{k}"))
                        } else {
                            i.get(&format!("Q{k}"))
                        }
                    })
                    .collect();
                let mut out: Vec<Bit> = next.iter().flat_map(|&b| [b, !b]).collect();
                out.extend(next);
                out
            })
        }
        CellName::ShiftRegister => {
            let mut observed = strs(&["SO"]);
            observed.extend(chain_observed("", n));
            CellOracle::new(observed, move |i| {
                let next = chain_next(&i, "", n, i.get("CP"), i.get("SI"));
                let mut out = vec![next[2 * n - 1]];
                out.extend(next);
                out
            })
        }
        CellName::SerialTransfer => {
            let mut observed = strs(&["SO"]);
            observed.extend(chain_observed("A_", n));
            observed.extend(chain_observed("B_", n));
            CellOracle::new(observed, move |i| {
                let cp = i.get("CP");
                let a_last = i.get(&format!("A_Q{}", n - 1));
                let a = chain_next(&i, "A_", n, cp, a_last);
                let b = chain_next(&i, "B_", n, cp, a_last);
                let mut out = vec![b[2 * n - 1]];
                out.extend(a);
                out.extend(b);
                out
            })
        }
        CellName::SerialAdder => {
            let mut observed = strs(&["SO", "CARRY"]);
            observed.extend(chain_observed("A_", n));
            observed.extend(chain_observed("B_", n));
            observed.extend(chain_observed("C_", 1));
            CellOracle::new(observed, move |i| {
                let cp = i.get("CP");
                let a_lsb = i.get(&format!("A_Q{}", n - 1));
                let b_lsb = i.get(&format!("B_Q{}", n - 1));
                let c = i.get("C_Q0");
                let total = [a_lsb, b_lsb, c].iter().filter(|b| b.is_high()).count();
                let (sum, cout) = (Bit::new(total % 2 == 1), Bit::new(total >= 2));
                let a = chain_next(&i, "A_", n, cp, sum);
                let b = chain_next(&i, "B_", n, cp, b_lsb);
                let carry = chain_next(&i, "C_", 1, cp, cout);
                let mut out = vec![a[2 * n - 1], carry[1]];
                out.extend(a);
                out.extend(b);
                out.extend(carry);
                out
            })
        }
    }
}

pub fn catalog_entry(name: CellName, n: usize) -> Result<CellCatalogEntry, CellError> {
    let circuit = name.build(n)?;
    let metrics = circuit.metrics()?;
    Ok(CellCatalogEntry {
        name,
        circuit,
        metrics,
        oracle: oracle_for(name, n),
    })
}

/// Every catalog cell, parameterized cells at width `n`.
pub fn catalog(n: usize) -> Result<Vec<CellCatalogEntry>, CellError> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        CellName::ALL
            .par_iter()
            .map(|&c| catalog_entry(c, n))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        CellName::ALL.iter().map(|&c| catalog_entry(c, n)).collect()
    }
}

// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use fredsim::gate::Bit;
use fredsim::netlist::{
    Circuit, GateInstance, NetId, SequentialCircuit, SinkRole, SourceRole, StateElement,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn id(s: &str) -> NetId {
    NetId::new(s).unwrap()
}

pub fn bits(s: &str) -> Vec<Bit> {
    s.chars().map(|c| Bit::from_char(c).unwrap()).collect()
}

pub fn word(v: u32, n: usize) -> Vec<Bit> {
    (0..n).rev().map(|i| Bit::new((v >> i) & 1 == 1)).collect()
}

pub fn value(bits: &[Bit]) -> u32 {
    bits.iter().fold(0, |acc, b| (acc << 1) | b.as_u8() as u32)
}

/// Random valid sequential circuit: sources, a gate list drawn from the pool
/// of unconsumed nets, state nexts on gate outputs, everything else tagged.
pub fn random_circuit<R: Rng>(rng: &mut R, serial: usize) -> SequentialCircuit {
    let mut names = 0usize;
    let mut fresh = |rng: &mut R| {
        names += 1;
        let stem: String = (0..rng.gen_range(1..4))
            .map(|_| {
                *b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_"
                    .choose(rng)
                    .unwrap() as char
            })
            .collect();
        id(&format!("{stem}{names}"))
    };
    let inputs = rng.gen_range(0..5);
    let c0 = rng.gen_range(0..3);
    let c1 = rng.gen_range(0..3);
    let nstates = rng.gen_range(0..3);
    let mut sources = Vec::new();
    for (count, role) in [
        (inputs, SourceRole::PrimaryInput),
        (c0, SourceRole::Const0),
        (c1, SourceRole::Const1),
        (nstates, SourceRole::StateFeedback),
    ] {
        for _ in 0..count {
            sources.push((fresh(rng), role));
        }
    }
    // every gate needs three distinct unconsumed nets
    while sources.len() < 3 {
        sources.push((fresh(rng), SourceRole::Const0));
    }
    sources.shuffle(rng);
    let mut pool: Vec<(NetId, bool)> = sources.iter().map(|(n, _)| (n.clone(), false)).collect();
    let mut gates = Vec::new();
    for g in 0..rng.gen_range(1..9) {
        pool.shuffle(rng);
        let take: Vec<NetId> = pool.drain(..3).map(|(n, _)| n).collect();
        let outputs = [fresh(rng), fresh(rng), fresh(rng)];
        pool.extend(outputs.iter().map(|n| (n.clone(), true)));
        gates.push(GateInstance {
            id: format!("u{g}"),
            inputs: [take[0].clone(), take[1].clone(), take[2].clone()],
            outputs,
        });
    }
    pool.shuffle(rng);
    let mut sinks = Vec::new();
    let mut states = Vec::new();
    let fbs: Vec<NetId> = sources
        .iter()
        .filter(|(_, r)| *r == SourceRole::StateFeedback)
        .map(|(n, _)| n.clone())
        .collect();
    for fb in fbs {
        let pos = pool.iter().position(|(_, from_gate)| *from_gate).unwrap();
        let (next, _) = pool.remove(pos);
        sinks.push((next.clone(), SinkRole::StateNext));
        states.push(StateElement {
            feedback: fb,
            next,
            init: Bit::new(rng.gen()),
        });
    }
    for (n, _) in pool {
        let role = if rng.gen_bool(0.5) {
            SinkRole::PrimaryOutput
        } else {
            SinkRole::Garbage
        };
        sinks.push((n, role));
    }
    let c = SequentialCircuit::new(
        Circuit::new(format!("rand{serial}"), sources, gates, sinks),
        states,
    );
    assert!(
        c.is_valid(),
        "generator produced an invalid circuit: {:?}",
        c.validate()
    );
    c
}

/// Parsed value change dump.
#[derive(Debug, Default)]
pub struct Vcd {
    pub timescale: Option<String>,
    pub scope: Option<String>,
    /// Code to variable name, in declaration order.
    pub vars: Vec<(String, String)>,
    pub timestamps: Vec<u64>,
    /// Changes recorded at each timestamp, by variable name.
    pub changes: Vec<Vec<(String, char)>>,
    pub saw_enddefinitions: bool,
    pub saw_dumpvars: bool,
}

impl Vcd {
    pub fn parse(text: &str) -> Result<Vcd, String> {
        let mut vcd = Vcd::default();
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut names: HashMap<String, String> = HashMap::new();
        let mut i = 0;
        let until_end = |i: &mut usize| -> Result<Vec<&str>, String> {
            let start = *i;
            while *i < tokens.len() && tokens[*i] != "$end" {
                *i += 1;
            }
            if *i == tokens.len() {
                return Err("unterminated section".into());
            }
            let body = tokens[start..*i].to_vec();
            *i += 1;
            Ok(body)
        };
        while i < tokens.len() {
            let t = tokens[i];
            i += 1;
            match t {
                "$timescale" => vcd.timescale = Some(until_end(&mut i)?.join(" ")),
                "$scope" => vcd.scope = Some(until_end(&mut i)?.join(" ")),
                "$var" => {
                    let body = until_end(&mut i)?;
                    if body.len() != 4 || body[0] != "wire" || body[1] != "1" {
                        return Err(format!("bad $var {body:?}"));
                    }
                    if names
                        .insert(body[2].to_string(), body[3].to_string())
                        .is_some()
                    {
                        return Err(format!("duplicate code {}", body[2]));
                    }
                    vcd.vars.push((body[2].to_string(), body[3].to_string()));
                }
                "$enddefinitions" => {
                    until_end(&mut i)?;
                    vcd.saw_enddefinitions = true;
                }
                "$dumpvars" => vcd.saw_dumpvars = true,
                "$end" => {}
                "$version" | "$upscope" | "$date" | "$comment" => {
                    until_end(&mut i)?;
                }
                _ if t.starts_with('#') => {
                    let time = t[1..].parse().map_err(|_| format!("bad timestamp {t}"))?;
                    vcd.timestamps.push(time);
                    vcd.changes.push(Vec::new());
                }
                _ => {
                    let mut chars = t.chars();
                    let v = chars.next().unwrap();
                    if !matches!(v, '0' | '1') {
                        return Err(format!("unexpected token {t}"));
                    }
                    let name = names
                        .get(chars.as_str())
                        .ok_or_else(|| format!("unknown code in {t}"))?;
                    vcd.changes
                        .last_mut()
                        .ok_or("value before first timestamp")?
                        .push((name.clone(), v));
                }
            }
        }
        Ok(vcd)
    }

    /// Value of every variable after each timestamp.
    pub fn values(&self) -> Vec<BTreeMap<String, char>> {
        let mut cur = BTreeMap::new();
        self.changes
            .iter()
            .map(|ch| {
                for (n, v) in ch {
                    cur.insert(n.clone(), *v);
                }
                cur.clone()
            })
            .collect()
    }
}

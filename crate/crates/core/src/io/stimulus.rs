// SPDX-License-Identifier: Apache-2.0

//! Stimulus CSV: a header row of input names, then one row of 0/1 per step.

use std::io::{Read, Write};

use thiserror::Error;

use crate::gate::Bit;
use crate::netlist::NetId;
use crate::sim::Stimulus;

#[derive(Debug, Error)]
pub enum StimulusError {
    #[error("stimulus line {line}: {message}")]
    Format { line: u64, message: String },
    #[error("stimulus: {0}")]
    Csv(#[from] csv::Error),
}

pub fn read_stimulus<R: Read>(reader: R) -> Result<Stimulus, StimulusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header_line = rdr.position().line().max(1);
    let names = rdr
        .headers()?
        .iter()
        .map(|h| {
            NetId::new(h).map_err(|_| StimulusError::Format {
                line: header_line,
                message: format!("`{h}` is not an input name"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut stimulus = Stimulus::new(names);
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != stimulus.input_names.len() {
            return Err(StimulusError::Format {
                line,
                message: format!(
                    "expected {} values, found {}",
                    stimulus.input_names.len(),
                    record.len()
                ),
            });
        }
        let row = record
            .iter()
            .map(|v| match v {
                "0" => Ok(Bit::ZERO),
                "1" => Ok(Bit::ONE),
                other => Err(StimulusError::Format {
                    line,
                    message: format!("`{other}` is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        stimulus.push(row);
    }
    Ok(stimulus)
}

pub fn write_stimulus<W: Write>(stimulus: &Stimulus, writer: W) -> Result<(), StimulusError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(stimulus.input_names.iter().map(NetId::as_str))?;
    for row in &stimulus.steps {
        w.write_record(row.iter().map(|b| if b.is_high() { "1" } else { "0" }))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

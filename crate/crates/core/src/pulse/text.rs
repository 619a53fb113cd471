//! Line-oriented text form of a pulse program.
//!
//! ```text
//! spinchain-program 1
//! n 4
//! w 100 200 300 400
//! J 4
//! J2 0.4
//! segment prep 0 70
//! pulses 70
//! pulse 0 -1 -1 3.141592653589793 1.5707963267948966 0.1 0
//! ```
//!
//! Pulse fields are `k mu nu phi angle rabi t_start`. Floats use the shortest
//! representation that parses back to the same bits; `t_start` is checked
//! against the recomputed cumulative start time on read.

use std::fmt::Write as _;

use super::{PulseProgram, PulseSpec, Segment};
use crate::chain::ChainParameters;
use crate::error::{Error, Result};

const MAGIC: &str = "spinchain-program";
const VERSION: u32 = 1;

pub fn write_program(params: &ChainParameters, program: &PulseProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "n {}", params.n());
    let w: Vec<String> = params.larmor().iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "w {}", w.join(" "));
    let _ = writeln!(out, "J {}", params.coupling_j());
    let _ = writeln!(out, "J2 {}", params.coupling_j2());
    for s in program.segments() {
        let _ = writeln!(out, "segment {} {} {}", s.label, s.range.start, s.range.end);
    }
    let _ = writeln!(out, "pulses {}", program.len());
    for (p, t) in program.pulses().iter().zip(program.start_times()) {
        let _ = writeln!(
            out,
            "pulse {} {} {} {} {} {} {}",
            p.k, p.mu, p.nu, p.phase, p.angle, p.rabi, t
        );
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !fields.is_empty() {
                return Some((i + 1, fields));
            }
        }
        None
    }

    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.next_fields() {
            Some((line, f)) if f[0] == key => Ok((line, f[1..].to_vec())),
            Some((line, f)) => Err(fmt_err(line, format!("expected `{key}`, found `{}`", f[0]))),
            None => Err(fmt_err(0, format!("unexpected end of input, expected `{key}`"))),
        }
    }
}

fn fmt_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

fn parse_one<T: std::str::FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| fmt_err(line, format!("cannot parse `{field}`")))
}

fn single<'a>(line: usize, fields: &[&'a str]) -> Result<&'a str> {
    match fields {
        [f] => Ok(f),
        _ => Err(fmt_err(line, format!("expected one value, found {}", fields.len()))),
    }
}

pub fn parse_program(input: &str) -> Result<(ChainParameters, PulseProgram)> {
    let mut lines = Lines {
        inner: input.lines().enumerate(),
    };
    let (line, f) = lines.expect(MAGIC)?;
    let version: u32 = parse_one(line, single(line, &f)?)?;
    if version != VERSION {
        return Err(fmt_err(line, format!("unsupported version {version}")));
    }
    let (line, f) = lines.expect("n")?;
    let n: usize = parse_one(line, single(line, &f)?)?;
    let (line, f) = lines.expect("w")?;
    if f.len() != n {
        return Err(fmt_err(line, format!("expected {n} Larmor frequencies, found {}", f.len())));
    }
    let larmor = f.iter().map(|v| parse_one(line, v)).collect::<Result<Vec<f64>>>()?;
    let (line, f) = lines.expect("J")?;
    let j: f64 = parse_one(line, single(line, &f)?)?;
    let (line, f) = lines.expect("J2")?;
    let j2: f64 = parse_one(line, single(line, &f)?)?;
    let params = ChainParameters::new(larmor, j, j2).map_err(|e| fmt_err(line, e.to_string()))?;

    let mut segments = Vec::new();
    let count = loop {
        match lines.next_fields() {
            Some((line, f)) if f[0] == "segment" => {
                if f.len() != 4 {
                    return Err(fmt_err(line, "segment needs label, start, end"));
                }
                let start: usize = parse_one(line, f[2])?;
                let end: usize = parse_one(line, f[3])?;
                if start > end {
                    return Err(fmt_err(line, "segment start after end"));
                }
                segments.push((
                    line,
                    Segment {
                        label: f[1].to_string(),
                        range: start..end,
                    },
                ));
            }
            Some((line, f)) if f[0] == "pulses" => {
                break parse_one::<usize>(line, single(line, &f[1..])?)?;
            }
            Some((line, f)) => return Err(fmt_err(line, format!("unexpected `{}`", f[0]))),
            None => return Err(fmt_err(0, "missing `pulses` line")),
        }
    };

    let mut program = PulseProgram::new();
    for _ in 0..count {
        let (line, f) = lines.expect("pulse")?;
        if f.len() != 7 {
            return Err(fmt_err(line, format!("pulse needs 7 fields, found {}", f.len())));
        }
        let pulse = PulseSpec::new(
            parse_one(line, f[0])?,
            parse_one(line, f[1])?,
            parse_one(line, f[2])?,
            parse_one(line, f[3])?,
            parse_one(line, f[4])?,
            parse_one(line, f[5])?,
        );
        let t_start: f64 = parse_one(line, f[6])?;
        pulse.validate(&params).map_err(|e| fmt_err(line, e.to_string()))?;
        if t_start.to_bits() != program.total_duration().to_bits() {
            return Err(fmt_err(
                line,
                format!(
                    "start time {t_start} does not match cumulative duration {}",
                    program.total_duration()
                ),
            ));
        }
        program.push(pulse);
    }
    if let Some((line, f)) = lines.next_fields() {
        return Err(fmt_err(line, format!("trailing content `{}`", f[0])));
    }
    for (line, s) in segments {
        if s.range.end > program.len() {
            return Err(fmt_err(line, format!("segment `{}` exceeds program length", s.label)));
        }
        program.segments.push(s);
    }
    Ok((params, program))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> PulseProgram {
        let mut prog = PulseProgram::new();
        prog.push_segment(
            "prep",
            [
                PulseSpec::new(0, -1, -1, PI, PI / 2.0, 0.1007905261357939),
                PulseSpec::new(2, 0, 1, PI / 2.0, PI / 2.0, 0.1007905261357939),
            ],
        );
        prog.push_segment("step1.oracle", [PulseSpec::new(1, -2, -1, 0.0, 2.0 * PI, 0.1007905261357939)]);
        prog
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let params = ChainParameters::default();
        let prog = sample();
        let text = write_program(&params, &prog);
        let (p2, prog2) = parse_program(&text).unwrap();
        assert_eq!(p2, params);
        assert_eq!(prog2, prog);
        assert_eq!(write_program(&p2, &prog2), text);
    }

    #[test]
    fn rejects_tampered_start_time() {
        let params = ChainParameters::default();
        let text = write_program(&params, &sample());
        let last = text.lines().last().unwrap().to_string();
        let mut fields: Vec<&str> = last.split_whitespace().collect();
        fields[7] = "1";
        let bad = text.replace(&last, &fields.join(" "));
        assert!(matches!(parse_program(&bad), Err(Error::Format { .. })));
    }

    #[test]
    fn rejects_unrealizable_pulse() {
        let params = ChainParameters::default();
        let text = write_program(&params, &sample()).replace("pulse 0 -1 -1", "pulse 0 -2 -1");
        assert!(parse_program(&text).is_err());
    }

    #[test]
    fn rejects_bad_header() {
        assert!(parse_program("").is_err());
        assert!(parse_program("spinchain-program 2\n").is_err());
    }
}

//! Plain-text `key=value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Chain files accept
//! `n`, `w0…w{n-1}`, `J` and `J2`; run files additionally accept `alpha`,
//! `steps`, `strategy`, `mode`, `rabi` and `seed`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::chain::ChainParameters;
use crate::compiler::Strategy;
use crate::error::{Error, Result};
use crate::propagation::Mode;

const RUN_KEYS: [&str; 6] = ["alpha", "steps", "strategy", "mode", "rabi", "seed"];

/// Parsed entries with their 1-based line numbers.
fn entries(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(map)
}

fn parse_value<T: FromStr>(key: &str, (line, value): &(usize, String)) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: bad value `{value}` for `{key}`")))
}

fn chain_from_entries(map: &mut BTreeMap<String, (usize, String)>) -> Result<ChainParameters> {
    let default = ChainParameters::default();
    let n = match map.remove("n") {
        Some(v) => parse_value::<usize>("n", &v)?,
        None => default.n(),
    };
    let mut larmor = Vec::with_capacity(n);
    for k in 0..n {
        let key = format!("w{k}");
        match map.remove(&key) {
            Some(v) => larmor.push(parse_value::<f64>(&key, &v)?),
            None if n == default.n() => larmor.push(default.larmor()[k]),
            None => return Err(Error::Config(format!("missing `{key}` for n={n}"))),
        }
    }
    let j = map.remove("J").map(|v| parse_value("J", &v)).transpose()?;
    let j2 = map.remove("J2").map(|v| parse_value("J2", &v)).transpose()?;
    ChainParameters::new(
        larmor,
        j.unwrap_or(default.coupling_j()),
        j2.unwrap_or(default.coupling_j2()),
    )
}

fn reject_unknown(map: &BTreeMap<String, (usize, String)>) -> Result<()> {
    match map.iter().next() {
        Some((key, (line, _))) => Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
        None => Ok(()),
    }
}

/// Chain parameters from a chain file. Missing keys take default values.
///
/// Only structural checks run here; physics checks are
/// [`ChainParameters::validate`] and [`crate::chain::addressability_report`].
pub fn parse_chain(text: &str) -> Result<ChainParameters> {
    let mut map = entries(text)?;
    let params = chain_from_entries(&mut map)?;
    reject_unknown(&map)?;
    Ok(params)
}

/// Run settings read from a file. Unset fields stay `None` so that
/// command-line flags can fill them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunFile {
    pub chain: ChainParameters,
    pub alpha: Option<u32>,
    pub steps: Option<usize>,
    pub strategy: Option<Strategy>,
    pub mode: Option<Mode>,
    pub rabi: Option<f64>,
    pub seed: Option<u64>,
}

pub fn parse_run(text: &str) -> Result<RunFile> {
    let mut map = entries(text)?;
    let chain = chain_from_entries(&mut map)?;
    let mut take = |key: &str| map.remove(key).map(|v| (key.to_string(), v));
    let mut run = RunFile {
        chain,
        ..RunFile::default()
    };
    for key in RUN_KEYS {
        let Some((key, v)) = take(key) else { continue };
        match key.as_str() {
            "alpha" => run.alpha = Some(parse_value(&key, &v)?),
            "steps" => run.steps = Some(parse_value(&key, &v)?),
            "strategy" => run.strategy = Some(v.1.parse()?),
            "mode" => run.mode = Some(v.1.parse()?),
            "rabi" => run.rabi = Some(parse_value(&key, &v)?),
            "seed" => run.seed = Some(parse_value(&key, &v)?),
            _ => unreachable!(),
        }
    }
    reject_unknown(&map)?;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_chain("# nothing\n\n").unwrap(), ChainParameters::default());
    }

    #[test]
    fn chain_keys() {
        let p = parse_chain("n=3\nw0=10\nw1 = 20\nw2=35\nJ=2\nJ2=0.1\n").unwrap();
        assert_eq!(p.larmor(), &[10.0, 20.0, 35.0]);
        assert_eq!((p.coupling_j(), p.coupling_j2()), (2.0, 0.1));
    }

    #[test]
    fn chain_errors() {
        assert!(parse_chain("alpha=5").unwrap_err().to_string().contains("unknown key"));
        assert!(parse_chain("n=5").unwrap_err().to_string().contains("missing `w0`"));
        assert!(parse_chain("J=four").is_err());
        assert!(parse_chain("J=1\nJ=2").is_err());
        assert!(parse_chain("J").is_err());
        assert!(parse_chain("w4=1").is_err());
    }

    #[test]
    fn run_keys() {
        let r = parse_run("J2=0.5\nalpha=13\nsteps=1\nstrategy=naive\nmode=rk4\nrabi=0.2\nseed=9").unwrap();
        assert_eq!(r.chain.coupling_j2(), 0.5);
        assert_eq!(r.alpha, Some(13));
        assert_eq!(r.steps, Some(1));
        assert_eq!(r.strategy, Some(Strategy::Naive));
        assert_eq!(r.mode, Some(Mode::Rk4));
        assert_eq!(r.rabi, Some(0.2));
        assert_eq!(r.seed, Some(9));
        assert!(parse_run("colour=red").is_err());
        assert!(parse_run("mode=lab").is_err());
    }
}

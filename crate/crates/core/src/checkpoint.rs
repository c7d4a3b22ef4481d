//! On-disk snapshots of a training run.
//!
//! A checkpoint directory holds: `generators.bin` / `classifiers.bin`
//! (length-prefixed network blobs), `matrix.csv` (estimated payoff matrix),
//! `ne.csv` (current equilibrium value and weights), `history.csv`
//! (per-iteration test records), and `meta.csv` (iteration counter and
//! termination flag). All floats are written in shortest round-trip form, so
//! write -> read -> write is byte-identical; per-iteration wall-clock stays
//! in memory only.

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PayoffMatrix};
use crate::neural::MlpNet;
use crate::pnm::{IterationRecord, PnmState};
use crate::solver::GameSolution;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const NET_LIST_MAGIC: &[u8; 4] = b"NETL";

/// Serializes a list of networks: magic, u32 count, then per network a u64
/// byte length and the network blob.
pub fn nets_to_bytes(nets: &[MlpNet]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(NET_LIST_MAGIC);
    out.extend_from_slice(&(nets.len() as u32).to_le_bytes());
    for net in nets {
        let blob = net.to_bytes();
        out.extend_from_slice(&(blob.len() as u64).to_le_bytes());
        out.extend_from_slice(&blob);
    }
    out
}

pub fn nets_from_bytes(bytes: &[u8]) -> Result<Vec<MlpNet>> {
    let take = |bytes: &[u8], at: &mut usize, n: usize| -> Result<Vec<u8>> {
        if *at + n > bytes.len() {
            return Err(Error::Parse("network list truncated".to_string()));
        }
        let out = bytes[*at..*at + n].to_vec();
        *at += n;
        Ok(out)
    };
    let mut at = 0;
    if take(bytes, &mut at, 4)? != NET_LIST_MAGIC {
        return Err(Error::Parse("bad network list magic".to_string()));
    }
    let count = u32::from_le_bytes(take(bytes, &mut at, 4)?.try_into().expect("4 bytes"));
    let mut nets = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let len = u64::from_le_bytes(take(bytes, &mut at, 8)?.try_into().expect("8 bytes"));
        let blob = take(bytes, &mut at, len as usize)?;
        nets.push(MlpNet::from_bytes(&blob)?);
    }
    if at != bytes.len() {
        return Err(Error::Parse("trailing bytes after network list".to_string()));
    }
    Ok(nets)
}

pub fn write_nets(path: &Path, nets: &[MlpNet]) -> Result<()> {
    fs::write(path, nets_to_bytes(nets))?;
    Ok(())
}

pub fn read_nets(path: &Path) -> Result<Vec<MlpNet>> {
    nets_from_bytes(&fs::read(path)?)
}

fn ne_to_csv(ne: &GameSolution) -> String {
    let mut out = String::new();
    writeln!(out, "value,{}", ne.value).expect("string write");
    for (i, w) in ne.row_strategy.probs().iter().enumerate() {
        writeln!(out, "row,{i},{w}").expect("string write");
    }
    for (j, w) in ne.col_strategy.probs().iter().enumerate() {
        writeln!(out, "col,{j},{w}").expect("string write");
    }
    out
}

fn parse_f64(text: &str, what: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} value '{text}'")))
}

fn ne_from_csv(text: &str) -> Result<GameSolution> {
    let mut value = None;
    let mut row = Vec::new();
    let mut col = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        match (fields.first().copied(), fields.len()) {
            (Some("value"), 2) => value = Some(parse_f64(fields[1], "equilibrium")?),
            (Some("row"), 3) => row.push(parse_f64(fields[2], "row weight")?),
            (Some("col"), 3) => col.push(parse_f64(fields[2], "column weight")?),
            _ => {
                return Err(Error::Parse(format!(
                    "unrecognized equilibrium line '{line}'"
                )))
            }
        }
    }
    Ok(GameSolution {
        row_strategy: MixedStrategy::from_normalized(row)?,
        col_strategy: MixedStrategy::from_normalized(col)?,
        value: value.ok_or_else(|| Error::Parse("equilibrium value missing".to_string()))?,
    })
}

fn history_to_csv(history: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,u_brs_g,u_brs_c,u_brs,accepted,value\n");
    for r in history {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iteration, r.u_brs_g, r.u_brs_c, r.u_brs, r.accepted, r.value
        )
        .expect("string write");
    }
    out
}

fn history_from_csv(text: &str) -> Result<Vec<IterationRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some("iteration,u_brs_g,u_brs_c,u_brs,accepted,value") => {}
        other => {
            return Err(Error::Parse(format!(
                "bad history header {other:?}"
            )))
        }
    }
    let mut history = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(Error::Parse(format!("bad history line '{line}'")));
        }
        history.push(IterationRecord {
            iteration: f[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad iteration '{}'", f[0])))?,
            u_brs_g: parse_f64(f[1], "u_brs_g")?,
            u_brs_c: parse_f64(f[2], "u_brs_c")?,
            u_brs: parse_f64(f[3], "u_brs")?,
            accepted: f[4]
                .parse()
                .map_err(|_| Error::Parse(format!("bad accepted flag '{}'", f[4])))?,
            value: parse_f64(f[5], "value")?,
            wall_secs: 0.0,
        });
    }
    Ok(history)
}

/// Writes a complete snapshot into `dir`, creating it if needed.
pub fn write_checkpoint(dir: &Path, state: &PnmState) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_nets(&dir.join("generators.bin"), state.g_strats())?;
    write_nets(&dir.join("classifiers.bin"), state.c_strats())?;
    fs::write(dir.join("matrix.csv"), state.matrix().to_csv())?;
    fs::write(dir.join("ne.csv"), ne_to_csv(state.ne()))?;
    fs::write(dir.join("history.csv"), history_to_csv(state.history()))?;
    fs::write(
        dir.join("meta.csv"),
        format!(
            "iteration,{}\nterminated,{}\n",
            state.iteration(),
            state.terminated()
        ),
    )?;
    Ok(())
}

/// Reads a snapshot written by [`write_checkpoint`], revalidating the state
/// invariants. Wall-clock diagnostics are not stored and read back as zero.
pub fn read_checkpoint(dir: &Path) -> Result<PnmState> {
    let g_strats = read_nets(&dir.join("generators.bin"))?;
    let c_strats = read_nets(&dir.join("classifiers.bin"))?;
    let matrix = PayoffMatrix::from_csv(&fs::read_to_string(dir.join("matrix.csv"))?)?;
    let ne = ne_from_csv(&fs::read_to_string(dir.join("ne.csv"))?)?;
    let history = history_from_csv(&fs::read_to_string(dir.join("history.csv"))?)?;
    let meta = fs::read_to_string(dir.join("meta.csv"))?;
    let mut iteration = None;
    let mut terminated = None;
    for line in meta.lines().filter(|l| !l.trim().is_empty()) {
        match line.split_once(',') {
            Some(("iteration", v)) => {
                iteration = Some(v.trim().parse().map_err(|_| {
                    Error::Parse(format!("bad iteration counter '{v}'"))
                })?)
            }
            Some(("terminated", v)) => {
                terminated = Some(v.trim().parse().map_err(|_| {
                    Error::Parse(format!("bad terminated flag '{v}'"))
                })?)
            }
            _ => return Err(Error::Parse(format!("unrecognized meta line '{line}'"))),
        }
    }
    PnmState::from_parts(
        g_strats,
        c_strats,
        matrix,
        ne,
        history,
        iteration.ok_or_else(|| Error::Parse("meta missing iteration".to_string()))?,
        terminated.ok_or_else(|| Error::Parse("meta missing terminated".to_string()))?,
    )
}

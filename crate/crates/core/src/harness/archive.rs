//! Realization archives: JSON lines with a header, then one stream per suite listing, for each
//! realization, its seed and a summary (jump records, per-node Gaussian checksums, compensators).
//!
//! The summary is enough to confirm that a regenerated realization is the archived one, so
//! suites can be rerun from an archive's seeds.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::Experiment;
use super::registry::{Sampler, SuiteId};
use super::{pool, stream_len};
use crate::channel::{ChannelJump, ChannelSampler, KernelRealization};
use crate::error::{Error, Result};
use crate::levy::{sample_path, JumpRecord, PathSample};
use crate::numeric::exact_sum;
use crate::seed::{derive_seed, RngSeed};

pub const ARCHIVE_FORMAT: &str = "sio-channel-archive/1";

/// Realizations generated per parallel batch while writing.
const BATCH: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: String,
    pub master_seed: u64,
    pub n_reps: usize,
    /// SHA-256 of the canonical TOML rendering of the config.
    pub config_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamHeader {
    pub suite: SuiteId,
    pub sampler: Sampler,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub index: usize,
    pub seed: RngSeed,
    pub jumps: Vec<ChannelJump>,
    /// SHA-256 of the Gaussian cell increments at each time node.
    pub gaussian_sha256: Vec<String>,
    /// Total large-jump compensator and small-jump compensator over the delay grid, per time node.
    pub compensators: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub index: usize,
    pub seed: RngSeed,
    pub jumps: Vec<JumpRecord>,
    /// SHA-256 of the Gaussian path values.
    pub gaussian_sha256: String,
    /// Small-jump compensator at each delay node.
    pub compensator: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(Header),
    Stream(StreamHeader),
    Channel(ChannelRecord),
    Path(PathRecord),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Channel(Vec<ChannelRecord>),
    Path(Vec<PathRecord>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub header: StreamHeader,
    pub records: Records,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub header: Header,
    pub streams: Vec<Stream>,
}

fn sha256_hex(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

pub fn config_digest(exp: &Experiment) -> String {
    hex::encode(Sha256::digest(exp.config.to_toml().as_bytes()))
}

pub fn channel_record(index: usize, seed: RngSeed, real: &KernelRealization) -> ChannelRecord {
    let nc = real.n_cells();
    let rows = 0..real.tgrid.len();
    ChannelRecord {
        index,
        seed,
        jumps: real.jumps.clone(),
        gaussian_sha256: rows
            .clone()
            .map(|ti| sha256_hex(&real.gaussian[ti * nc..(ti + 1) * nc]))
            .collect(),
        compensators: rows
            .map(|ti| {
                let r = ti * nc..(ti + 1) * nc;
                (
                    exact_sum(real.drift[r.clone()].iter().copied()),
                    exact_sum(real.small_compensator[r].iter().copied()),
                )
            })
            .collect(),
    }
}

pub fn path_record(index: usize, seed: RngSeed, path: &PathSample) -> PathRecord {
    PathRecord {
        index,
        seed,
        jumps: path.jumps.clone(),
        gaussian_sha256: sha256_hex(&path.gaussian),
        compensator: path.small_compensator.clone(),
    }
}

fn write_line<W: Write>(out: &mut W, line: &Line) -> Result<()> {
    serde_json::to_writer(&mut *out, line)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Writes the archive of every configured suite's realization stream.
pub fn write_archive<W: Write>(exp: &Experiment, workers: usize, out: &mut W) -> Result<()> {
    let header = Header {
        format: ARCHIVE_FORMAT.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        master_seed: exp.config.master_seed,
        n_reps: exp.config.n_reps,
        config_sha256: config_digest(exp),
    };
    write_line(out, &Line::Header(header))?;
    let ids = exp.config.suite_ids()?;
    let pool = pool(workers)?;
    let sampler = ChannelSampler::new(&exp.spec, &exp.tgrid, &exp.ugrid)?;
    for id in ids {
        let count = stream_len(exp, id);
        if count == 0 {
            continue;
        }
        write_line(
            out,
            &Line::Stream(StreamHeader {
                suite: id,
                sampler: id.sampler(),
                count,
            }),
        )?;
        let master = exp.config.master_seed;
        for start in (0..count).step_by(BATCH) {
            let end = (start + BATCH).min(count);
            let lines: Vec<Line> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|i| {
                        let seed = derive_seed(master, id.as_str(), i as u64);
                        Ok(match id.sampler() {
                            Sampler::Channel => Line::Channel(channel_record(i, seed, &sampler.sample(seed))),
                            Sampler::Path => {
                                Line::Path(path_record(i, seed, &sample_path(&exp.spec.triplet, &exp.ugrid, seed)?))
                            }
                        })
                    })
                    .collect::<Result<_>>()
            })?;
            for line in &lines {
                write_line(out, line)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

impl Archive {
    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut header = None;
        let mut streams: Vec<Stream> = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line =
                serde_json::from_str(&line).map_err(|e| Error::Archive(format!("line {}: {e}", n + 1)))?;
            let bad = |msg: &str| Error::Archive(format!("line {}: {msg}", n + 1));
            match parsed {
                Line::Header(h) => {
                    if header.is_some() || n != 0 {
                        return Err(bad("the header must be the first line, once"));
                    }
                    if h.format != ARCHIVE_FORMAT {
                        return Err(bad(&format!("unknown archive format `{}`", h.format)));
                    }
                    header = Some(h);
                }
                Line::Stream(s) => {
                    let records = match s.sampler {
                        Sampler::Channel => Records::Channel(Vec::new()),
                        Sampler::Path => Records::Path(Vec::new()),
                    };
                    streams.push(Stream { header: s, records });
                }
                Line::Channel(r) => match streams.last_mut().map(|s| &mut s.records) {
                    Some(Records::Channel(v)) if r.index == v.len() => v.push(r),
                    _ => return Err(bad("channel record out of place")),
                },
                Line::Path(r) => match streams.last_mut().map(|s| &mut s.records) {
                    Some(Records::Path(v)) if r.index == v.len() => v.push(r),
                    _ => return Err(bad("path record out of place")),
                },
            }
        }
        let header = header.ok_or_else(|| Error::Archive("missing header".into()))?;
        for s in &streams {
            let len = match &s.records {
                Records::Channel(v) => v.len(),
                Records::Path(v) => v.len(),
            };
            if len != s.header.count {
                return Err(Error::Archive(format!(
                    "stream {} announces {} records but holds {len}",
                    s.header.suite, s.header.count
                )));
            }
        }
        Ok(Archive { header, streams })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::config("--archive", format!("cannot open {}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(file))
    }

    /// Recorded seeds per suite.
    pub fn seeds(&self) -> BTreeMap<SuiteId, Vec<RngSeed>> {
        self.streams
            .iter()
            .map(|s| {
                let seeds = match &s.records {
                    Records::Channel(v) => v.iter().map(|r| r.seed).collect(),
                    Records::Path(v) => v.iter().map(|r| r.seed).collect(),
                };
                (s.header.suite, seeds)
            })
            .collect()
    }

    /// Checks that the archive belongs to `exp` and that every realization regenerated from its
    /// seed reproduces the recorded summary exactly.
    pub fn validate(&self, exp: &Experiment, workers: usize) -> Result<()> {
        if self.header.config_sha256 != config_digest(exp) {
            return Err(Error::Archive("archive was written for a different config".into()));
        }
        let pool = pool(workers)?;
        let sampler = ChannelSampler::new(&exp.spec, &exp.tgrid, &exp.ugrid)?;
        for s in &self.streams {
            let id = s.header.suite;
            let mismatch = pool.install(|| -> Result<Option<usize>> {
                Ok(match &s.records {
                    Records::Channel(v) => v
                        .par_iter()
                        .find_first(|r| channel_record(r.index, r.seed, &sampler.sample(r.seed)) != **r)
                        .map(|r| r.index),
                    Records::Path(v) => {
                        let bad = v
                            .par_iter()
                            .map(|r| {
                                let p = sample_path(&exp.spec.triplet, &exp.ugrid, r.seed)?;
                                Ok((path_record(r.index, r.seed, &p) != *r).then_some(r.index))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        bad.into_iter().flatten().next()
                    }
                })
            })?;
            if let Some(i) = mismatch {
                return Err(Error::Archive(format!(
                    "realization {i} of stream {id} does not regenerate from its seed"
                )));
            }
        }
        Ok(())
    }
}

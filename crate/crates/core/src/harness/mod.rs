//! Experiment driver: configs, realization archives, the verification suites and their reports.
//!
//! Every realization is generated from its own seed, derived from the master seed, the suite id
//! and the realization index, and all reductions run in index order. Reports therefore do not
//! depend on the number of worker threads.

pub mod archive;
pub mod config;
pub mod registry;
pub mod report;
mod suites;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use archive::{write_archive, Archive};
pub use config::{Experiment, ExperimentConfig, MIN_STATISTICAL_REPS};
pub use registry::{Sampler, SuiteId};
pub use report::{Environment, Format, Report, Row, Summary};

use crate::channel::{ChannelSampler, KernelRealization};
use crate::error::{Error, Result};
use crate::levy::{sample_path, PathSample};
use crate::seed::{derive_seed, RngSeed};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "SIO_WORKERS";

/// Worker count from `SIO_WORKERS`, defaulting to the available parallelism.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::config(WORKERS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(WORKERS_ENV, e.to_string()))
}

/// Number of realizations suite `id` draws.
pub fn stream_len(exp: &Experiment, id: SuiteId) -> usize {
    let n = exp.config.n_reps;
    if n == 0 {
        return 0;
    }
    match id {
        SuiteId::FubiniSigma | SuiteId::EtaSpreading => exp.config.checks.representation_realizations,
        _ => n,
    }
}

/// Everything a suite needs: the experiment, a sampler, a worker pool and the seed source.
pub(crate) struct Context<'a> {
    pub exp: &'a Experiment,
    pub sampler: ChannelSampler,
    pool: rayon::ThreadPool,
    seeds: Option<&'a BTreeMap<SuiteId, Vec<RngSeed>>>,
}

impl<'a> Context<'a> {
    fn new(exp: &'a Experiment, workers: usize, seeds: Option<&'a BTreeMap<SuiteId, Vec<RngSeed>>>) -> Result<Self> {
        Ok(Context {
            exp,
            sampler: ChannelSampler::new(&exp.spec, &exp.tgrid, &exp.ugrid)?,
            pool: pool(workers)?,
            seeds,
        })
    }

    pub fn n_reps(&self) -> usize {
        self.exp.config.n_reps
    }

    pub fn master_seed(&self) -> u64 {
        self.exp.config.master_seed
    }

    fn seed(&self, id: SuiteId, index: usize) -> Result<RngSeed> {
        match self.seeds {
            Some(map) => map
                .get(&id)
                .and_then(|s| s.get(index))
                .copied()
                .ok_or_else(|| Error::Archive(format!("archive has no realization {index} for suite {id}"))),
            None => Ok(derive_seed(self.master_seed(), id.as_str(), index as u64)),
        }
    }

    /// `f` applied to the first `n` channel realizations of the suite's stream, in index order.
    pub fn observe<T, F>(&self, id: SuiteId, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&KernelRealization) -> Result<T> + Sync,
    {
        self.pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|i| f(&self.sampler.sample(self.seed(id, i)?)))
                .collect()
        })
    }

    /// `f` applied to the first `n` sampled additive paths on the delay grid.
    pub fn observe_paths<T, F>(&self, id: SuiteId, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&PathSample) -> Result<T> + Sync,
    {
        self.pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|i| f(&sample_path(&self.exp.spec.triplet, &self.exp.ugrid, self.seed(id, i)?)?))
                .collect()
        })
    }

    /// Order-preserving parallel map.
    pub fn par_map<I, T, F>(&self, items: &[I], f: F) -> Result<Vec<T>>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> Result<T> + Sync,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }
}

fn environment(exp: &Experiment) -> Environment {
    Environment {
        master_seed: exp.config.master_seed,
        n_reps: exp.config.n_reps,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Runs the given suites in order and assembles one report.
///
/// With an archive, realizations are regenerated from its recorded seeds after the archive has
/// been checked against the experiment.
pub fn run_suites(exp: &Experiment, ids: &[SuiteId], workers: usize, archive: Option<&Archive>) -> Result<Report> {
    if exp.config.n_reps < MIN_STATISTICAL_REPS {
        return Err(Error::config(
            "n_reps",
            format!("statistical suites need at least {MIN_STATISTICAL_REPS} realizations"),
        ));
    }
    let seeds = match archive {
        Some(a) => {
            a.validate(exp, workers)?;
            Some(a.seeds())
        }
        None => None,
    };
    let ctx = Context::new(exp, workers, seeds.as_ref())?;
    let mut rows = Vec::new();
    for &id in ids {
        rows.extend(suites::run(&ctx, id)?);
    }
    Ok(Report::new(environment(exp), rows))
}

pub fn run_suite(exp: &Experiment, id: SuiteId, workers: usize) -> Result<Report> {
    run_suites(exp, &[id], workers, None)
}

/// Converts a saved report (JSON, or CSV with an empty environment) to `format`.
pub fn report_render(input: &[u8], format: Format) -> Result<Vec<u8>> {
    let report = if input.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        Report::from_json(input)?
    } else {
        Report::from_csv(
            input,
            Environment {
                master_seed: 0,
                n_reps: 0,
                version: String::new(),
            },
        )?
    };
    report.render(format)
}

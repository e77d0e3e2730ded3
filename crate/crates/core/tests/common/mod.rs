//! Shared helpers for the Monte Carlo integration tests.
#![allow(dead_code)]

use rayon::prelude::*;

use sio_channel::channel::{ChannelSampler, ChannelSpec, ChannelWindow, CorrFn, KernelRealization};
use sio_channel::grid::{DelayGrid, TimeGrid};
use sio_channel::levy::{sample_path, LevyTriplet, PathSample, Profile, SizeDist};
use sio_channel::measures::MeasureRepr;
use sio_channel::seed::derive_seed;
use sio_channel::stats::Estimate;

pub const N: usize = 100_000;
pub const WINDOW: ChannelWindow = ChannelWindow { t_max: 1.0, u_max: 4.0 };

/// `f` over `n` independently seeded paths, in index order.
pub fn over_paths<T: Send>(
    triplet: &LevyTriplet,
    grid: &DelayGrid,
    label: &str,
    n: usize,
    f: impl Fn(&PathSample) -> T + Sync,
) -> Vec<T> {
    (0..n)
        .into_par_iter()
        .map(|i| f(&sample_path(triplet, grid, derive_seed(17, label, i as u64)).unwrap()))
        .collect()
}

/// `f` over `n` independently seeded channel realizations, in index order.
pub fn over_channels<T: Send>(
    spec: &ChannelSpec,
    tgrid: &TimeGrid,
    ugrid: &DelayGrid,
    label: &str,
    n: usize,
    f: impl Fn(&KernelRealization) -> T + Sync,
) -> Vec<T> {
    let sampler = ChannelSampler::new(spec, tgrid, ugrid).unwrap();
    (0..n)
        .into_par_iter()
        .map(|i| f(&sampler.sample(derive_seed(29, label, i as u64))))
        .collect()
}

pub fn triplet(variance: Profile, density: f64, size: SizeDist, truncation: f64) -> LevyTriplet {
    let lambda = if density == 0.0 {
        MeasureRepr::zero((-4.0, 4.0)).unwrap()
    } else {
        MeasureRepr::uniform(-4.0, 4.0, density).unwrap()
    };
    LevyTriplet::new(Profile::Zero, variance, lambda, size, truncation).unwrap()
}

pub fn spec(triplet: LevyTriplet, rc: CorrFn, rj: CorrFn) -> ChannelSpec {
    ChannelSpec::new(triplet, rc, rj, None, WINDOW).unwrap()
}

/// Asserts `|mean - target| <= 5·SE`.
#[track_caller]
pub fn assert_within_se(est: Estimate, target: f64, what: &str) {
    assert!(
        (est.mean - target).abs() <= 5.0 * est.se,
        "{what}: {} vs {target} (se {})",
        est.mean,
        est.se
    );
}

//! Suite implementations. Each returns its rows in a fixed order.

mod correlation;
mod laws;
mod moments;
mod representation;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::registry::SuiteId;
use super::report::Row;
use super::Context;
use crate::error::Result;
use crate::grid::DelayGrid;
use crate::operator::StepSignal;
use crate::seed::derive_seed;
use crate::stats::Verdict;

pub(super) fn run(ctx: &Context, id: SuiteId) -> Result<Vec<Row>> {
    match id {
        SuiteId::SioIsometry => moments::sio_isometry(ctx),
        SuiteId::WeakUs => moments::weak_us(ctx),
        SuiteId::WssusIsometry => moments::wssus_isometry(ctx),
        SuiteId::CfComponents => laws::cf_components(ctx),
        SuiteId::LevyKhinchine => laws::levy_khinchine(ctx),
        SuiteId::PoissonCounts => laws::poisson_counts(ctx),
        SuiteId::FubiniSigma => representation::fubini_sigma(ctx),
        SuiteId::EtaSpreading => representation::eta_spreading(ctx),
        SuiteId::RhoCs => correlation::rho_cs(ctx),
        SuiteId::Decomposition => correlation::decomposition(ctx),
    }
}

fn row(id: SuiteId, check: impl Into<String>, v: Verdict) -> Row {
    Row::new(id.as_str(), check, id.anchor(), v)
}

/// Column `k` of per-realization observation vectors.
fn column(obs: &[Vec<f64>], k: usize) -> Vec<f64> {
    obs.iter().map(|o| o[k]).collect()
}

/// Deterministic generator for the random cases of a suite (signals, sets, triples).
fn case_rng(ctx: &Context, id: SuiteId, label: &str) -> ChaCha8Rng {
    derive_seed(ctx.master_seed(), &format!("{}/{label}", id.as_str()), 0).rng()
}

/// Delay-grid nodes `u` with `|u| <= limit`.
fn nodes_within(ugrid: &DelayGrid, limit: f64) -> Vec<f64> {
    ugrid.nodes().iter().copied().filter(|u| u.abs() <= limit).collect()
}

/// `k` distinct sorted picks from `pool`.
fn pick_sorted<R: Rng>(rng: &mut R, pool: &[f64], k: usize) -> Vec<f64> {
    let mut idx = rand::seq::index::sample(rng, pool.len(), k.min(pool.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| pool[i]).collect()
}

/// A step signal at output time `t` whose breakpoints `b` all have `t - b` in `delays`, with
/// `cells` cells and standard normal coefficients.
fn random_signal<R: Rng>(rng: &mut R, t: f64, delays: &[f64], cells: usize) -> Result<StepSignal> {
    let mut breaks: Vec<f64> = pick_sorted(rng, delays, cells + 1).into_iter().map(|u| t - u).collect();
    breaks.reverse();
    let coeffs = (0..breaks.len() - 1).map(|_| StandardNormal.sample(rng)).collect();
    StepSignal::new(breaks, coeffs)
}

//! Per-realization agreement of the channel's representations: kernel vs impulse response
//! (exact), Kohn–Nirenberg symbol, and spreading symbol.

use rand::Rng;

use super::{case_rng, nodes_within, random_signal, row, Context};
use crate::channel::KernelRealization;
use crate::error::{Error, Result};
use crate::harness::registry::SuiteId;
use crate::harness::report::Row;
use crate::operator::{
    apply_impulse, apply_kernel, kohn_nirenberg_apply, relative_error, spreading_apply, StepSignal, SymbolGrid,
};
use crate::stats::Verdict;

/// Relative error budget of the Kohn–Nirenberg route.
pub(crate) const SIGMA_TOLERANCE: f64 = 1e-3;
/// Relative error budget of the spreading route.
pub(crate) const ETA_TOLERANCE: f64 = 5e-3;

/// Random `(f, t)` cases: `t` a time node strictly inside the symmetric window, `f` with one to four cells whose
/// breakpoints map to delay nodes inside the symmetric part of the delay grid.
fn cases(ctx: &Context, id: SuiteId) -> Result<Vec<(StepSignal, f64)>> {
    let exp = ctx.exp;
    let big_t = time_half_width(ctx);
    let interior: Vec<f64> = exp.tgrid.nodes().iter().copied().filter(|t| t.abs() < big_t).collect();
    if interior.is_empty() {
        return Err(Error::config("grids.t_nodes", "representation suites need a time node inside (-T, T)"));
    }
    let delays = nodes_within(&exp.ugrid, exp.ugrid.first().abs().min(exp.ugrid.last()));
    let mut rng = case_rng(ctx, id, "cases");
    (0..exp.config.checks.representation_cases)
        .map(|_| {
            let t = interior[rng.random_range(0..interior.len())];
            let cells = rng.random_range(1..=4);
            Ok((random_signal(&mut rng, t, &delays, cells)?, t))
        })
        .collect()
}

/// Symmetric time window `[-T, T]` spanned by the time grid.
fn time_half_width(ctx: &Context) -> f64 {
    let t = ctx.exp.tgrid.nodes();
    t[0].abs().min(t[t.len() - 1])
}

pub(super) fn fubini_sigma(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::FubiniSigma;
    let cases = cases(ctx, id)?;
    let m = cases.len();
    let per_real = ctx.observe(id, super::super::stream_len(ctx.exp, id), |r| {
        let mut mismatches = 0usize;
        let mut worst = 0.0f64;
        for (f, t) in &cases {
            let kernel = apply_kernel(r, f, *t)?;
            if kernel.to_bits() != apply_impulse(r, f, *t)?.to_bits() {
                mismatches += 1;
            }
            let grid = SymbolGrid::kohn_nirenberg_default(r, f, *t)?;
            let sigma = kohn_nirenberg_apply(r, f, *t, &grid)?;
            worst = worst.max(relative_error(r, f, *t, sigma, kernel)?);
        }
        Ok((mismatches, worst))
    })?;
    let mut rows = Vec::new();
    for (i, (mismatches, worst)) in per_real.into_iter().enumerate() {
        rows.push(row(id, format!("kernel-impulse/r{i}"), Verdict::new(mismatches as f64, 0.0, 0.0, 0.0, m)));
        rows.push(row(id, format!("sigma/r{i}"), Verdict::new(worst, 0.0, SIGMA_TOLERANCE, 0.0, m)));
    }
    Ok(rows)
}

pub(super) fn eta_spreading(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::EtaSpreading;
    let cases = cases(ctx, id)?;
    let m = cases.len();
    let big_t = time_half_width(ctx);
    let eval = |r: &KernelRealization| -> Result<f64> {
        let grid = SymbolGrid::spreading_default(r, big_t)?;
        let mut worst = 0.0f64;
        for (f, t) in &cases {
            let eta = spreading_apply(r, f, *t, &grid)?;
            worst = worst.max(relative_error(r, f, *t, eta, apply_kernel(r, f, *t)?)?);
        }
        Ok(worst)
    };
    let per_real = ctx.observe(id, super::super::stream_len(ctx.exp, id), eval)?;
    Ok(per_real
        .into_iter()
        .enumerate()
        .map(|(i, worst)| row(id, format!("eta/r{i}"), Verdict::new(worst, 0.0, ETA_TOLERANCE, 0.0, m)))
        .collect())
}

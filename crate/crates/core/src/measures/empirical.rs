//! Monte Carlo estimates of `μ_t` and `ρ_{s,t}` from kernel realizations.

use serde::{Deserialize, Serialize};

use super::repr::CellUnion;
use crate::channel::{kernel_increment, KernelRealization};
use crate::error::{Error, Result};
use crate::stats::{mean_estimate, Estimate};

fn check_nonempty(reals: &[KernelRealization]) -> Result<()> {
    if reals.is_empty() {
        return Err(Error::domain("no realizations to estimate from"));
    }
    Ok(())
}

/// `X(t, B)` for a union of kernel delay intervals.
pub fn kernel_set_increment(real: &KernelRealization, t: f64, set: &CellUnion) -> Result<f64> {
    set.intervals().iter().map(|&(a, b)| kernel_increment(real, t, a, b)).sum()
}

/// `Y(t, B)` for a union of impulse-response delay intervals.
pub fn y_set_increment(real: &KernelRealization, t: f64, set: &CellUnion) -> Result<f64> {
    let ti = real.tgrid.index_of(t)?;
    set.intervals().iter().map(|&(a, b)| real.y_increment(ti, a, b)).sum()
}

/// Monte Carlo mean of `|X(t, B)|²`, cross terms between the intervals of `B` included.
pub fn mu_empirical(reals: &[KernelRealization], t: f64, set: &CellUnion) -> Result<Estimate> {
    check_nonempty(reals)?;
    let squares = reals
        .iter()
        .map(|r| kernel_set_increment(r, t, set).map(|x| x * x))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_estimate(&squares))
}

/// Monte Carlo mean of `Y(s, A) Y(t, B)`.
pub fn y_product_moment(
    reals: &[KernelRealization],
    s: f64,
    first: &CellUnion,
    t: f64,
    second: &CellUnion,
) -> Result<Estimate> {
    check_nonempty(reals)?;
    let products = reals
        .iter()
        .map(|r| Ok(y_set_increment(r, s, first)? * y_set_increment(r, t, second)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_estimate(&products))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    /// Mean of `Y(s, B) Y(t, B)`.
    pub direct: Estimate,
    /// `(β - ρ_{t,t} - ρ_{s,s}) / 2` with `β = E|Y(t, B) + Y(s, B)|²` estimated from the samples.
    pub polarization: Estimate,
    /// Per-sample `polarization - direct`.
    pub difference: Estimate,
    /// `difference` standardized; `0` when the two estimators coincide.
    pub agreement_z: f64,
}

/// Direct and polarization estimates of `ρ_{s,t}(B)` for impulse-response delays `B`.
///
/// With `diagonals = Some((ρ_tt, ρ_ss))` the polarization estimate subtracts those (closed-form)
/// diagonal values, which makes it a genuinely different estimator from the direct product;
/// with `None` the diagonals are estimated from the same samples.
pub fn rho_empirical(
    reals: &[KernelRealization],
    s: f64,
    t: f64,
    set: &CellUnion,
    diagonals: Option<(f64, f64)>,
) -> Result<RhoEstimate> {
    check_nonempty(reals)?;
    let pairs = reals
        .iter()
        .map(|r| Ok((y_set_increment(r, t, set)?, y_set_increment(r, s, set)?)))
        .collect::<Result<Vec<_>>>()?;
    rho_from_pairs(&pairs, diagonals)
}

/// [`rho_empirical`] from precomputed pairs `(Y(t, B), Y(s, B))`.
pub fn rho_from_pairs(pairs: &[(f64, f64)], diagonals: Option<(f64, f64)>) -> Result<RhoEstimate> {
    if pairs.is_empty() {
        return Err(Error::domain("no realizations to estimate from"));
    }
    let products: Vec<f64> = pairs.iter().map(|(yt, ys)| yt * ys).collect();
    let direct = mean_estimate(&products);
    let (rtt, rss) = diagonals.unwrap_or_else(|| {
        let n = pairs.len() as f64;
        (
            pairs.iter().map(|(yt, _)| yt * yt).sum::<f64>() / n,
            pairs.iter().map(|(_, ys)| ys * ys).sum::<f64>() / n,
        )
    });
    let (polar, diff): (Vec<f64>, Vec<f64>) = pairs
        .iter()
        .map(|(yt, ys)| {
            let p = 0.5 * ((yt + ys).powi(2) - rtt - rss);
            (p, p - yt * ys)
        })
        .unzip();
    let polarization = mean_estimate(&polar);
    let difference = mean_estimate(&diff);
    Ok(RhoEstimate {
        direct,
        polarization,
        difference,
        agreement_z: difference.z(0.0),
    })
}

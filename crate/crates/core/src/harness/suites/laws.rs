//! Distributional suites: component characteristic functions, the Lévy–Khinchine formula for
//! sampled paths, and Poisson jump counts.

use num_complex::Complex64;

use super::{column, row, Context};
use crate::channel::{theoretical_component_cf, Component};
use crate::error::Result;
use crate::harness::registry::SuiteId;
use crate::harness::report::Row;
use crate::levy::{count_measure, levy_cf, LevyTriplet, SizeDist, SizeSet};
use crate::operator::apply_component;
use crate::stats::{
    cf_tolerance, empirical_cf, jackknife_cov, linspace, mean_estimate, variance_estimate, SampleSet, Verdict,
};

/// Budget for quadrature error in the closed-form characteristic functions.
const CF_QUADRATURE_BUDGET: f64 = 1e-6;

const RANDOM_COMPONENTS: [Component; 3] = [Component::Gaussian, Component::LargeJumps, Component::SmallJumps];

/// `sup_γ |φ̂(γ) - φ(γ)|` over the grid, with the closed form supplied per node.
fn sup_cf_error(samples: Vec<f64>, gammas: &[f64], exact: impl Fn(f64) -> Result<Complex64>) -> Result<f64> {
    let nodes = empirical_cf(&SampleSet::unlabelled(samples)?, gammas)?;
    nodes
        .iter()
        .map(|node| Ok((node.value - exact(node.gamma)?).norm()))
        .try_fold(0.0f64, |acc, e: Result<f64>| Ok(acc.max(e?)))
}

fn cf_verdict(sup: f64, n: usize) -> Verdict {
    Verdict::new(sup, 0.0, cf_tolerance(n) + CF_QUADRATURE_BUDGET, 1.0 / (n as f64).sqrt(), n)
}

pub(super) fn cf_components(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::CfComponents;
    let exp = ctx.exp;
    let k = &exp.config.checks;
    let gammas = linspace(-k.cf_gamma_max, k.cf_gamma_max, k.cf_nodes);
    let cases: Vec<(&str, _, f64, Component)> = exp
        .probes
        .iter()
        .flat_map(|(name, f)| {
            exp.config
                .probe_times
                .iter()
                .flat_map(move |&t| RANDOM_COMPONENTS.map(|c| (name.as_str(), f, t, c)))
        })
        .collect();
    let n = ctx.n_reps();
    let obs = ctx.observe(id, n, |r| {
        cases
            .iter()
            .map(|&(_, f, t, c)| apply_component(r, c, f, t))
            .collect::<Result<Vec<f64>>>()
    })?;
    let idx: Vec<usize> = (0..cases.len()).collect();
    let sups = ctx.par_map(&idx, |&j| {
        let (_, f, t, c) = cases[j];
        sup_cf_error(column(&obs, j), &gammas, |g| theoretical_component_cf(&exp.spec, c, f, t, g))
    })?;
    Ok(cases
        .iter()
        .zip(sups)
        .map(|(&(name, _, t, c), sup)| row(id, format!("{}/{name}@t={t}", c.label()), cf_verdict(sup, n)))
        .collect())
}

pub(super) fn levy_khinchine(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::LevyKhinchine;
    let exp = ctx.exp;
    let k = &exp.config.checks;
    let gammas = linspace(-k.cf_gamma_max, k.cf_gamma_max, k.cf_nodes);
    let triplet = &exp.spec.triplet;
    let idx: Vec<usize> = k
        .levy_delays
        .iter()
        .map(|&u| exp.ugrid.index_of(u))
        .collect::<Result<_>>()?;
    let n = ctx.n_reps();
    let obs = ctx.observe_paths(id, n, |p| Ok(idx.iter().map(|&i| p.value(i)).collect::<Vec<f64>>()))?;
    let cols: Vec<usize> = (0..idx.len()).collect();
    let sups = ctx.par_map(&cols, |&j| {
        let u = k.levy_delays[j];
        sup_cf_error(column(&obs, j), &gammas, |g| levy_cf(triplet, u, g))
    })?;
    Ok(k.levy_delays
        .iter()
        .zip(sups)
        .map(|(u, sup)| row(id, format!("cf@u={u}"), cf_verdict(sup, n)))
        .collect())
}

/// `F(B)` for a union of closed size intervals, overlapping pieces merged first.
fn size_probability(dist: &SizeDist, set: &SizeSet) -> f64 {
    let mut iv = set.intervals().to_vec();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged.iter().map(|&(lo, hi)| dist.interval_probability(lo, hi)).sum()
}

/// `λ` of the delay span counted by `N(u, ·)`: `(0, u]` for `u >= 0`, `[u, 0)` otherwise.
fn span_intensity(triplet: &LevyTriplet, u: f64) -> f64 {
    let lam = &triplet.jump_intensity;
    let atom = |x: f64| -> f64 { lam.atoms().iter().filter(|a| a.point == x).map(|a| a.mass).sum() };
    if u >= 0.0 {
        triplet.lambda_mass(0.0, u) - atom(0.0) + atom(u)
    } else {
        triplet.lambda_mass(u, 0.0)
    }
}

fn size_set_label(set: &SizeSet) -> String {
    set.intervals()
        .iter()
        .map(|(lo, hi)| format!("[{lo},{hi}]"))
        .collect::<Vec<_>>()
        .join("+")
}

fn disjoint_sizes(a: &SizeSet, b: &SizeSet) -> bool {
    a.intervals()
        .iter()
        .all(|&(al, ah)| b.intervals().iter().all(|&(bl, bh)| ah < bl || bh < al))
}

pub(super) fn poisson_counts(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::PoissonCounts;
    let exp = ctx.exp;
    let triplet = &exp.spec.triplet;
    let cells: Vec<(f64, &SizeSet)> = exp
        .config
        .checks
        .levy_delays
        .iter()
        .flat_map(|&u| exp.size_sets.iter().map(move |b| (u, b)))
        .collect();
    let n = ctx.n_reps();
    let obs = ctx.observe_paths(id, n, |p| {
        cells
            .iter()
            .map(|&(u, b)| Ok(count_measure(p, u, b)? as f64))
            .collect::<Result<Vec<f64>>>()
    })?;
    let cols: Vec<Vec<f64>> = (0..cells.len()).map(|j| column(&obs, j)).collect();
    let mut rows = Vec::new();
    for (j, &(u, b)) in cells.iter().enumerate() {
        let target = span_intensity(triplet, u) * size_probability(&triplet.jump_size, b);
        let label = format!("u={u},B={}", size_set_label(b));
        rows.push(row(id, format!("mean/{label}"), Verdict::within_se(mean_estimate(&cols[j]), target)));
        rows.push(row(id, format!("variance/{label}"), Verdict::within_se(variance_estimate(&cols[j]), target)));
    }
    // Counts over disjoint (delay span × size set) cells are independent.
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let ((u1, b1), (u2, b2)) = (cells[i], cells[j]);
            let spans_disjoint = (u1 < 0.0) != (u2 < 0.0);
            if !(spans_disjoint || disjoint_sizes(b1, b2)) {
                continue;
            }
            let cov = jackknife_cov(&cols[i], &cols[j])?;
            let label = format!(
                "covariance/u={u1},B={}|u={u2},B={}",
                size_set_label(b1),
                size_set_label(b2)
            );
            rows.push(row(id, label, Verdict::within_se(cov, 0.0)));
        }
    }
    Ok(rows)
}

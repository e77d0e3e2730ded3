//! Second-moment suites: the isometry, weak uncorrelated scattering, and the stationary isometry
//! against an atomic output-weight measure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{column, pick_sorted, row, Context};
use crate::error::Result;
use crate::harness::registry::SuiteId;
use crate::harness::report::Row;
use crate::measures::{convolve_measures, mu_closed_form, mu_measure, weighted_l2, Atom, MeasureRepr};
use crate::operator::{apply_kernel, StepSignal};
use crate::stats::{mean_estimate, Verdict};

/// Probe × probe-time cases, probe-major.
fn probe_cases<'a>(ctx: &Context<'a>) -> Vec<(&'a str, &'a StepSignal, f64)> {
    let exp = ctx.exp;
    exp.probes
        .iter()
        .flat_map(|(name, f)| exp.config.probe_times.iter().map(move |&t| (name.as_str(), f, t)))
        .collect()
}

pub(super) fn sio_isometry(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::SioIsometry;
    let cases = probe_cases(ctx);
    let obs = ctx.observe(id, ctx.n_reps(), |r| {
        cases.iter().map(|&(_, f, t)| Ok(apply_kernel(r, f, t)?.powi(2))).collect()
    })?;
    cases
        .iter()
        .enumerate()
        .map(|(k, &(name, f, t))| {
            let target = weighted_l2(f, &mu_measure(&ctx.exp.spec, t)?);
            let est = mean_estimate(&column(&obs, k));
            Ok(row(id, format!("{name}@t={t}"), Verdict::within_se(est, target)))
        })
        .collect()
}

pub(super) fn weak_us(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::WeakUs;
    let exp = ctx.exp;
    let mut rng = super::case_rng(ctx, id, "pairs");
    let delays = exp.ugrid.nodes();
    let times = &exp.config.probe_times;
    let mut pairs = Vec::new();
    for i in 0..exp.config.checks.weak_us_pairs {
        let t = times[i % times.len()];
        // 4 to 6 breakpoints; f takes the first few, g the rest, sharing the split point for
        // even i (adjacent supports) and starting one breakpoint later for odd i.
        let k = 4 + i % 3;
        let mut pts: Vec<f64> = pick_sorted(&mut rng, delays, k).into_iter().map(|u| t - u).collect();
        pts.reverse();
        let split = rng.random_range(1..=k - 3);
        let g_start = if i % 2 == 0 { split } else { split + 1 };
        let coeffs = |n: usize, rng: &mut ChaCha8Rng| (0..n).map(|_| StandardNormal.sample(rng)).collect::<Vec<f64>>();
        let f = StepSignal::new(pts[..=split].to_vec(), coeffs(split, &mut rng))?;
        let g = StepSignal::new(pts[g_start..].to_vec(), coeffs(k - 1 - g_start, &mut rng))?;
        pairs.push((i, t, f, g));
    }
    let obs = ctx.observe(id, ctx.n_reps(), |r| {
        pairs
            .iter()
            .map(|(_, t, f, g)| Ok(apply_kernel(r, f, *t)? * apply_kernel(r, g, *t)?))
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(k, (i, t, f, g))| {
            let (fl, fh) = f.support();
            let (gl, gh) = g.support();
            let est = mean_estimate(&column(&obs, k));
            row(id, format!("pair{i}[{fl},{fh})x[{gl},{gh})@t={t}"), Verdict::within_se(est, 0.0))
        })
        .collect())
}

pub(super) fn wssus_isometry(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::WssusIsometry;
    let exp = ctx.exp;
    let spec = &exp.spec;
    if !spec.is_stationary() {
        // The shift law and the convolution identity are statements about stationary channels.
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for (name, set) in &exp.sets {
        for &t in &exp.config.probe_times {
            // Kernel delays B seen at time t are the impulse-response delays t - set.
            let b = set.reflect(t);
            let at_t = mu_closed_form(spec, t, &b)?.total;
            let at_0 = mu_closed_form(spec, 0.0, &b.shift(-t))?.total;
            rows.push(row(id, format!("shift/{name}@t={t}"), Verdict::new(at_t, at_0, 0.0, 0.0, 0)));
        }
    }
    let atoms: Vec<Atom> = exp
        .config
        .checks
        .wssus_atoms
        .iter()
        .map(|&(point, mass)| Atom { point, mass })
        .collect();
    let times = exp.tgrid.nodes();
    let nu = MeasureRepr::positive(Vec::new(), atoms.clone(), (times[0], times[times.len() - 1]))?;
    let law = convolve_measures(&mu_measure(spec, 0.0)?, &nu)?;
    let probes: Vec<&StepSignal> = exp.probes.iter().map(|(_, f)| f).collect();
    let obs = ctx.observe(id, ctx.n_reps(), |r| {
        probes
            .iter()
            .map(|f| {
                atoms
                    .iter()
                    .map(|a| Ok(a.mass * apply_kernel(r, f, a.point)?.powi(2)))
                    .sum::<Result<f64>>()
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    for (k, (name, f)) in exp.probes.iter().enumerate() {
        let est = mean_estimate(&column(&obs, k));
        rows.push(row(id, format!("energy/{name}"), Verdict::within_se(est, weighted_l2(f, &law))));
    }
    Ok(rows)
}

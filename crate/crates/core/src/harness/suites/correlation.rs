//! Correlation-measure suites: Cauchy–Schwarz, polarization and closed forms of `ρ`, and the
//! Lévy–Itô decomposition of the channel.

use rand::Rng;

use super::{case_rng, column, pick_sorted, row, Context};
use crate::channel::{Component, KernelRealization};
use crate::error::Result;
use crate::harness::registry::SuiteId;
use crate::harness::report::Row;
use crate::measures::{
    mu_closed_form, mu_measure, rho_from_pairs, scattering_eval, scattering_eval_stationary, y_set_increment,
    CellUnion, ClosedFormRho, RhoPart, RhoProvider,
};
use crate::operator::{apply_component, apply_kernel};
use crate::stats::{independence_check, linspace, mean_estimate, SampleSet, Verdict};

/// Relative rounding allowance for identities that hold exactly in real arithmetic.
const ROUNDING: f64 = 1e-12;

/// `(s, t)` pairs `s < t` from the probe times.
fn time_pairs(ctx: &Context) -> Vec<(f64, f64)> {
    let times = &ctx.exp.config.probe_times;
    let mut pairs = Vec::new();
    for (i, &s) in times.iter().enumerate() {
        for &t in &times[i + 1..] {
            if s != t {
                pairs.push((s.min(t), s.max(t)));
            }
        }
    }
    pairs
}

/// Cases `(set name, set, s, t)`.
fn rho_cases<'a>(ctx: &Context<'a>) -> Vec<(&'a str, &'a CellUnion, f64, f64)> {
    let pairs = time_pairs(ctx);
    ctx.exp
        .sets
        .iter()
        .flat_map(|(name, set)| pairs.iter().map(move |&(s, t)| (name.as_str(), set, s, t)))
        .collect()
}

/// A random union of one to three impulse-response delay intervals with grid-node endpoints.
fn random_set<R: Rng>(rng: &mut R, nodes: &[f64]) -> Result<CellUnion> {
    let k = rng.random_range(1..=3);
    let ends = pick_sorted(rng, nodes, 2 * k);
    CellUnion::new(ends.chunks(2).map(|c| (c[0], c[1])).collect())
}

pub(super) fn rho_cs(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::RhoCs;
    let exp = ctx.exp;
    let spec = &exp.spec;
    let rho = ClosedFormRho::new(spec);
    let mut rng = case_rng(ctx, id, "triples");
    let times = exp.tgrid.nodes();
    let triples = (0..exp.config.checks.rho_triples)
        .map(|_| {
            let s = times[rng.random_range(0..times.len())];
            let t = times[rng.random_range(0..times.len())];
            Ok((s, t, random_set(&mut rng, exp.ugrid.nodes())?))
        })
        .collect::<Result<Vec<_>>>()?;
    // Worst relative excess of ρ_{s,t}(B)² over ρ_{s,s}(B) ρ_{t,t}(B); negative when it holds.
    let excess = ctx.par_map(&triples, |(s, t, b)| {
        let st = rho.rho(*s, *t, b)?;
        let bound = rho.rho(*s, *s, b)? * rho.rho(*t, *t, b)?;
        Ok(if bound > 0.0 {
            (st * st - bound) / bound
        } else if st == 0.0 {
            0.0
        } else {
            f64::INFINITY
        })
    })?;
    let worst = excess.into_iter().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let mut rows = vec![row(
        id,
        "cauchy-schwarz",
        Verdict::new(worst, 0.0, ROUNDING, 0.0, triples.len()),
    )];

    let cases = rho_cases(ctx);
    let obs = ctx.observe(id, ctx.n_reps(), |r| {
        cases
            .iter()
            .map(|&(_, set, s, t)| Ok((y_set_increment(r, t, set)?, y_set_increment(r, s, set)?)))
            .collect::<Result<Vec<(f64, f64)>>>()
    })?;
    for (k, &(name, set, s, t)) in cases.iter().enumerate() {
        let pairs: Vec<(f64, f64)> = obs.iter().map(|o| o[k]).collect();
        let diagonals = (rho.rho(t, t, set)?, rho.rho(s, s, set)?);
        let est = rho_from_pairs(&pairs, Some(diagonals))?;
        let label = format!("{name}@s={s},t={t}");
        let d = est.difference;
        rows.push(row(
            id,
            format!("polarization/{label}"),
            Verdict::new(est.polarization.mean, est.direct.mean, 5.0 * d.se, d.se, d.n),
        ));
        rows.push(row(
            id,
            format!("closed-form/{label}"),
            Verdict::within_se(est.direct, rho.rho(s, t, set)?),
        ));
    }
    Ok(rows)
}

/// `Y_x(t, B)` for one component, with the large jumps centred by their compensator.
fn centred_component(r: &KernelRealization, part: RhoPart, t: f64, set: &CellUnion) -> Result<f64> {
    let ti = r.tgrid.index_of(t)?;
    let sum = |c: Component| -> Result<f64> {
        set.intervals()
            .iter()
            .map(|&(a, b)| Ok(r.component_sum(c, ti, r.delay_cells(a, b)?)))
            .sum()
    };
    Ok(match part {
        RhoPart::Gaussian => sum(Component::Gaussian)?,
        RhoPart::LargeJumps => sum(Component::LargeJumps)? - sum(Component::Deterministic)?,
        RhoPart::SmallJumps => sum(Component::SmallJumps)?,
        RhoPart::Total => y_set_increment(r, t, set)?,
    })
}

const PARTS: [RhoPart; 3] = [RhoPart::Gaussian, RhoPart::LargeJumps, RhoPart::SmallJumps];

/// Largest deviation of the channel from its recombined components on one realization: the
/// operator output against `-d + c + j + small-j`, and the jump fields against a rebuild from the
/// scatterer records.
fn pathwise_defect(ctx: &Context, r: &KernelRealization) -> Result<f64> {
    let exp = ctx.exp;
    let mut worst = 0.0f64;
    for (_, f) in &exp.probes {
        for &t in &exp.config.probe_times {
            let full = apply_kernel(r, f, t)?;
            let parts = -apply_component(r, Component::Deterministic, f, t)?
                + apply_component(r, Component::Gaussian, f, t)?
                + apply_component(r, Component::LargeJumps, f, t)?
                + apply_component(r, Component::SmallJumps, f, t)?;
            worst = worst.max((full - parts).abs());
        }
    }
    let nc = r.n_cells();
    let nodes = r.ugrid.nodes();
    let mut large = vec![0.0; r.large.len()];
    let mut small = vec![0.0; r.small.len()];
    for jump in &r.jumps {
        let k = nodes.partition_point(|&u| u <= jump.delay) - 1;
        for (ti, size) in jump.sizes.iter().enumerate() {
            if let Some(y) = *size {
                match jump.class {
                    crate::levy::JumpClass::Large => large[ti * nc + k] += y,
                    crate::levy::JumpClass::Small => small[ti * nc + k] += y,
                }
            }
        }
    }
    for i in 0..large.len() {
        worst = worst
            .max((large[i] - r.large[i]).abs())
            .max((small[i] - r.small_compensator[i] - r.small[i]).abs());
    }
    Ok(worst)
}

pub(super) fn decomposition(ctx: &Context) -> Result<Vec<Row>> {
    let id = SuiteId::Decomposition;
    let exp = ctx.exp;
    let spec = &exp.spec;
    let checks = &exp.config.checks;
    let n = ctx.n_reps();
    let mut rows = Vec::new();

    let m = checks.pathwise_realizations.min(n);
    let defects = ctx.observe(id, m, |r| pathwise_defect(ctx, r))?;
    let worst = defects.into_iter().fold(0.0, f64::max);
    rows.push(row(id, "pathwise", Verdict::new(worst, 0.0, 0.0, 0.0, m)));

    // Closed-form parts against the assembled measure μ_t.
    for (name, set) in &exp.sets {
        for &t in &exp.config.probe_times {
            let b = set.reflect(t);
            let parts = mu_closed_form(spec, t, &b)?;
            let total = mu_measure(spec, t)?.measure_of(&b);
            let sum = parts.c + parts.j + parts.small_j;
            let tol = ROUNDING * total.abs().max(f64::MIN_POSITIVE);
            rows.push(row(id, format!("mu-parts/{name}@t={t}"), Verdict::new(sum, total, tol, 0.0, 0)));
        }
    }

    // Component correlation estimates summed, against the total; cross terms average out.
    let cases = rho_cases(ctx);
    let probes: Vec<_> = exp.probes.iter().collect();
    let t0 = exp.config.probe_times[0];
    let obs = ctx.observe(id, n, |r| {
        let mut out = Vec::with_capacity(cases.len() * 2 + probes.len() * 3);
        for &(_, set, s, t) in &cases {
            let mut sum = 0.0;
            for part in PARTS {
                sum += centred_component(r, part, s, set)? * centred_component(r, part, t, set)?;
            }
            out.push(sum);
            out.push(y_set_increment(r, s, set)? * y_set_increment(r, t, set)?);
        }
        for (_, f) in &probes {
            for c in [Component::Gaussian, Component::LargeJumps, Component::SmallJumps] {
                out.push(apply_component(r, c, f, t0)?);
            }
        }
        Ok(out)
    })?;
    for (k, &(name, _, s, t)) in cases.iter().enumerate() {
        let parts = column(&obs, 2 * k);
        let total = column(&obs, 2 * k + 1);
        let diff: Vec<f64> = total.iter().zip(&parts).map(|(a, b)| a - b).collect();
        let (p, tot, d) = (mean_estimate(&parts), mean_estimate(&total), mean_estimate(&diff));
        rows.push(row(
            id,
            format!("rho-sum/{name}@s={s},t={t}"),
            Verdict::new(p.mean, tot.mean, 5.0 * d.se, d.se, n),
        ));
    }

    // Component scattering functions add up to the total.
    let window = spec.window.t_max;
    for (name, set) in &exp.sets {
        for &(g, gt) in &checks.scattering_freqs {
            let eval = |p: &dyn RhoProvider| {
                if p.is_stationary() {
                    scattering_eval_stationary(p, g, gt, set, window, window, checks.scattering_nodes)
                } else {
                    scattering_eval(p, g, gt, set, window, window, checks.scattering_nodes)
                }
            };
            let total = eval(&ClosedFormRho::new(spec))?.value;
            let mut sum = num_complex::Complex64::new(0.0, 0.0);
            for part in PARTS {
                sum += eval(&ClosedFormRho::new(spec).with_part(part))?.value;
            }
            rows.push(row(
                id,
                format!("scattering/{name}@gamma={g},gamma_tilde={gt}"),
                Verdict::new((sum - total).norm(), 0.0, 1e-9, 0.0, checks.scattering_nodes),
            ));
        }
    }

    // Pairwise independence of the random components' outputs.
    let gammas = linspace(-checks.cf_gamma_max, checks.cf_gamma_max, checks.independence_nodes);
    let base = 2 * cases.len();
    let labels = ["c", "j", "small-j"];
    for (p, (name, _)) in probes.iter().enumerate() {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let xa = SampleSet::unlabelled(column(&obs, base + 3 * p + a))?;
            let xb = SampleSet::unlabelled(column(&obs, base + 3 * p + b))?;
            let chk = independence_check(&xa, &xb, &gammas)?;
            rows.push(row(
                id,
                format!("independence/{}-{}/{name}@t={t0}", labels[a], labels[b]),
                Verdict::new(chk.defect, 0.0, chk.threshold, 1.0 / (n as f64).sqrt(), n),
            ));
        }
    }
    Ok(rows)
}

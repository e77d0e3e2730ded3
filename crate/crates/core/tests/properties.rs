//! Invariants over randomly generated inputs.

use std::sync::OnceLock;

use proptest::prelude::*;
use sio_channel::channel::{ChannelSampler, ChannelSpec, ChannelWindow, CorrFn};
use sio_channel::grid::{DelayGrid, TimeGrid};
use sio_channel::harness::{Environment, Format, Report, Row};
use sio_channel::levy::{levy_cf, LevyTriplet, Profile, SizeDist};
use sio_channel::measures::{mu_closed_form, rho_closed_form, CellUnion, MeasureRepr};
use sio_channel::numeric::exact_sum;
use sio_channel::operator::{absolute_scale, apply_impulse, apply_kernel, StepSignal};
use sio_channel::seed::derive_seed;
use sio_channel::stats::Verdict;

const STEP: f64 = 0.125;

fn mixed() -> &'static ChannelSpec {
    static SPEC: OnceLock<ChannelSpec> = OnceLock::new();
    SPEC.get_or_init(|| {
        let triplet = LevyTriplet::new(
            Profile::Zero,
            Profile::Linear { slope: 0.8 },
            MeasureRepr::uniform(-4.0, 4.0, 1.5).unwrap(),
            SizeDist::mixture(vec![(-1.5, 0.3), (0.4, 0.3), (2.0, 0.4)]).unwrap(),
            1.0,
        )
        .unwrap();
        ChannelSpec::new(
            triplet,
            CorrFn::Exponential { tau: 1.0 },
            CorrFn::Gaussian { tau: 1.5 },
            None,
            ChannelWindow { t_max: 1.0, u_max: 4.0 },
        )
        .unwrap()
    })
}

fn sampler() -> &'static ChannelSampler {
    static SAMPLER: OnceLock<ChannelSampler> = OnceLock::new();
    SAMPLER.get_or_init(|| {
        let tg = TimeGrid::lattice(0.25, -1.0, 1.0).unwrap();
        let ug = DelayGrid::lattice(STEP, -4.0, 4.0).unwrap();
        ChannelSampler::new(mixed(), &tg, &ug).unwrap()
    })
}

/// Step signal with lattice breakpoints whose support stays within `t - [-4, 4]` for `|t| <= 1`.
fn signal() -> impl Strategy<Value = StepSignal> {
    (proptest::collection::btree_set(-24i32..=24, 2..7), proptest::collection::vec(-2.0f64..2.0, 6))
        .prop_map(|(ks, cs)| {
            let bp: Vec<f64> = ks.iter().map(|&k| k as f64 * STEP).collect();
            let n = bp.len() - 1;
            StepSignal::new(bp, cs[..n].to_vec()).unwrap()
        })
}

fn time() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(|k| k as f64 * 0.25)
}

/// A disjoint union of up to three intervals inside [-3, 3].
fn cell_union() -> impl Strategy<Value = CellUnion> {
    proptest::collection::btree_set(-48i32..=48, 2..7).prop_map(|ks| {
        let pts: Vec<f64> = ks.iter().map(|&k| k as f64 / 16.0).collect();
        CellUnion::new(pts.chunks_exact(2).map(|p| (p[0], p[1])).collect()).unwrap()
    })
}

fn row() -> impl Strategy<Value = Row> {
    (
        "[a-z-]{1,10}",
        "[ -~]{0,16}",
        "[ -~]{0,16}",
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1e6f64..1e6,
        0.0f64..1e3,
        0.0f64..1e3,
        0usize..1_000_000,
    )
        .prop_map(|(suite, check, anchor, stat, target, tol, se, n)| {
            Row::new(&suite, check, &anchor, Verdict::new(stat, target, tol, se, n))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_and_impulse_forms_agree_bitwise(f in signal(), t in time(), idx in 0u64..1000) {
        let r = sampler().sample(derive_seed(1, "prop", idx));
        let k = apply_kernel(&r, &f, t).unwrap();
        let i = apply_impulse(&r, &f, t).unwrap();
        prop_assert_eq!(k.to_bits(), i.to_bits());
    }

    #[test]
    fn operator_is_linear(f in signal(), g in signal(), a in -3.0f64..3.0, b in -3.0f64..3.0, t in time(), idx in 0u64..1000) {
        let r = sampler().sample(derive_seed(2, "prop", idx));
        let lhs = apply_kernel(&r, &StepSignal::combine(a, &f, b, &g), t).unwrap();
        let rhs = a * apply_kernel(&r, &f, t).unwrap() + b * apply_kernel(&r, &g, t).unwrap();
        let scale = a.abs() * absolute_scale(&r, &f, t).unwrap() + b.abs() * absolute_scale(&r, &g, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn same_seed_same_realization(f in signal(), t in time(), idx in 0u64..1000) {
        let a = sampler().sample(derive_seed(3, "prop", idx));
        let b = sampler().sample(derive_seed(3, "prop", idx));
        prop_assert_eq!(apply_kernel(&a, &f, t).unwrap().to_bits(), apply_kernel(&b, &f, t).unwrap().to_bits());
        prop_assert_ne!(derive_seed(3, "prop", idx), derive_seed(3, "prop", idx + 1));
        prop_assert_ne!(derive_seed(3, "prop", idx), derive_seed(4, "prop", idx));
    }

    #[test]
    fn reflection_is_an_involution(b in cell_union(), t in -2.0f64..2.0) {
        prop_assert_eq!(b.reflect(t).reflect(t).intervals().len(), b.intervals().len());
        for (x, y) in b.reflect(t).reflect(t).intervals().iter().zip(b.intervals()) {
            prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
        }
        prop_assert!((b.reflect(t).lebesgue() - b.lebesgue()).abs() < 1e-12);
    }

    #[test]
    fn mu_is_additive_over_components(b in cell_union(), t in time()) {
        let spec = mixed();
        let whole = mu_closed_form(spec, t, &b).unwrap().total;
        let sum: f64 = b
            .intervals()
            .iter()
            .map(|&(lo, hi)| mu_closed_form(spec, t, &CellUnion::interval(lo, hi).unwrap()).unwrap().total)
            .sum();
        prop_assert!(whole >= 0.0);
        prop_assert!((whole - sum).abs() <= 1e-12 * whole.max(1e-300));
    }

    #[test]
    fn rho_obeys_cauchy_schwarz(b in cell_union(), s in time(), t in time()) {
        let spec = mixed();
        let st = rho_closed_form(spec, s, t, &b).unwrap().total;
        let ss = rho_closed_form(spec, s, s, &b).unwrap().total;
        let tt = rho_closed_form(spec, t, t, &b).unwrap().total;
        prop_assert!(st * st <= ss * tt * (1.0 + 1e-12) + 1e-300);
        prop_assert_eq!(st.to_bits(), rho_closed_form(spec, t, s, &b).unwrap().total.to_bits());
    }

    #[test]
    fn exact_sum_ignores_order(mut xs in proptest::collection::vec(-1e20f64..1e20, 0..40), seed in any::<u64>()) {
        let forward = exact_sum(xs.iter().copied());
        let n = xs.len();
        if n > 1 {
            xs.rotate_left((seed as usize) % n);
            xs.swap(0, (seed as usize / 7) % n);
        }
        prop_assert_eq!(forward.to_bits(), exact_sum(xs.iter().copied()).to_bits());
    }

    #[test]
    fn levy_cf_is_a_characteristic_function(u in -4.0f64..4.0, g in -6.0f64..6.0) {
        let l = &mixed().triplet;
        let phi = levy_cf(l, u, g).unwrap();
        prop_assert!(phi.norm() <= 1.0 + 1e-12);
        prop_assert_eq!(levy_cf(l, u, 0.0).unwrap(), num_complex::Complex64::new(1.0, 0.0));
        prop_assert!((levy_cf(l, u, -g).unwrap() - phi.conj()).norm() < 1e-12);
    }

    #[test]
    fn verdict_passes_exactly_within_tolerance(stat in -10.0f64..10.0, target in -10.0f64..10.0, tol in 0.0f64..10.0) {
        let v = Verdict::new(stat, target, tol, 0.0, 1);
        prop_assert_eq!(v.passed, (stat - target).abs() <= tol);
    }

    #[test]
    fn reports_round_trip(rows in proptest::collection::vec(row(), 0..8), seed in any::<u64>()) {
        let env = Environment { master_seed: seed, n_reps: 1000, version: "0.1.0".into() };
        let report = Report::new(env.clone(), rows);
        let json = report.render(Format::Json).unwrap();
        prop_assert_eq!(&Report::from_json(&json).unwrap(), &report);
        let csv = report.render(Format::Csv).unwrap();
        prop_assert_eq!(&Report::from_csv(&csv, env).unwrap(), &report);
    }
}

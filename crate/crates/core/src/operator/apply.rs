use crate::channel::{Component, KernelRealization};
use crate::error::Result;
use crate::numeric::exact_sum;

use super::signal::StepSignal;

/// Products `coefficient × cell increment` of one component, one per delay cell under `f`,
/// enumerated cell by cell of `f` (kernel form).
fn kernel_terms(real: &KernelRealization, component: Component, f: &StepSignal, t: f64) -> Result<Vec<f64>> {
    let ti = real.tgrid.index_of(t)?;
    let mut terms = Vec::new();
    for (a, b, c) in f.cells() {
        for k in real.delay_cells(t - b, t - a)? {
            terms.push(c * real.component_cell(component, ti, k));
        }
    }
    Ok(terms)
}

/// The same products enumerated over impulse-response delay cells, weighting each by `f(t - u)`.
fn impulse_terms(real: &KernelRealization, component: Component, f: &StepSignal, t: f64) -> Result<Vec<f64>> {
    let ti = real.tgrid.index_of(t)?;
    for &b in f.breakpoints() {
        real.ugrid.index_of(t - b)?;
    }
    let (lo, hi) = f.support();
    let nodes = real.ugrid.nodes();
    let mut terms = Vec::new();
    for k in real.delay_cells(t - hi, t - lo)? {
        let mid = 0.5 * (nodes[k] + nodes[k + 1]);
        terms.push(f.value(t - mid) * real.component_cell(component, ti, k));
    }
    Ok(terms)
}

fn combine<F>(real: &KernelRealization, mut component_value: F) -> Result<f64>
where
    F: FnMut(Component) -> Result<f64>,
{
    match real.view {
        Some(c) => component_value(c),
        None => Ok(-component_value(Component::Deterministic)?
            + component_value(Component::Gaussian)?
            + component_value(Component::LargeJumps)?
            + component_value(Component::SmallJumps)?),
    }
}

/// `Hf(t) = Σ_k c_k (X(t, u_k) - X(t, u_{k-1}))`, summed exactly.
///
/// The full channel is assembled as `-H_d f + H_c f + H_j f + H̃_j f` from the component sums, so
/// the component views reproduce it bit for bit.
pub fn apply_kernel(real: &KernelRealization, f: &StepSignal, t: f64) -> Result<f64> {
    combine(real, |c| Ok(exact_sum(kernel_terms(real, c, f, t)?)))
}

/// `H_x f(t)` for a single component `x`, whatever the realization's view.
pub fn apply_component(real: &KernelRealization, component: Component, f: &StepSignal, t: f64) -> Result<f64> {
    Ok(exact_sum(kernel_terms(real, component, f, t)?))
}

/// `∫ f(t - u) Y(t, du)`, summed exactly over impulse-response delay cells.
pub fn apply_impulse(real: &KernelRealization, f: &StepSignal, t: f64) -> Result<f64> {
    combine(real, |c| Ok(exact_sum(impulse_terms(real, c, f, t)?)))
}

/// `Σ |c_k · ΔY|` over the cells under `f`: the scale against which quadrature errors of the
/// spectral representations are measured.
pub fn absolute_scale(real: &KernelRealization, f: &StepSignal, t: f64) -> Result<f64> {
    let ti = real.tgrid.index_of(t)?;
    let mut acc = 0.0;
    for (a, b, c) in f.cells() {
        for k in real.delay_cells(t - b, t - a)? {
            acc += (c * real.cell_increment(ti, k)).abs();
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{component_fields, kernel_increment, sample_channel, ChannelSpec, ChannelWindow, CorrFn};
    use crate::grid::{DelayGrid, TimeGrid};
    use crate::levy::{LevyTriplet, Profile, SizeDist};
    use crate::measures::repr::MeasureRepr;
    use crate::seed::RngSeed;

    fn realization(seed: u64) -> KernelRealization {
        let triplet = LevyTriplet::new(
            Profile::Zero,
            Profile::Linear { slope: 1.0 },
            MeasureRepr::uniform(-4.0, 4.0, 1.5).unwrap(),
            SizeDist::gaussian(0.2, 1.0).unwrap(),
            0.7,
        )
        .unwrap();
        let spec = ChannelSpec::new(
            triplet,
            CorrFn::Exponential { tau: 1.0 },
            CorrFn::Exponential { tau: 2.0 },
            None,
            ChannelWindow { t_max: 1.0, u_max: 4.0 },
        )
        .unwrap();
        sample_channel(
            &spec,
            &TimeGrid::lattice(0.25, -1.0, 1.0).unwrap(),
            &DelayGrid::lattice(0.125, -4.0, 4.0).unwrap(),
            RngSeed::from_u64(seed),
        )
        .unwrap()
    }

    #[test]
    fn indicator_probe_is_a_kernel_increment() {
        let real = realization(1);
        let f = StepSignal::indicator(-0.5, 1.25, 1.0).unwrap();
        let v = apply_kernel(&real, &f, 0.25).unwrap();
        assert_eq!(v.to_bits(), kernel_increment(&real, 0.25, -0.5, 1.25).unwrap().to_bits());
        assert_eq!(v.to_bits(), apply_impulse(&real, &f, 0.25).unwrap().to_bits());
    }

    #[test]
    fn kernel_and_impulse_forms_agree_bitwise() {
        let real = realization(2);
        let f = StepSignal::new(vec![-1.0, -0.375, 0.5, 2.0], vec![0.3, -1.7, 2.25]).unwrap();
        for &t in real.tgrid.nodes() {
            let k = apply_kernel(&real, &f, t).unwrap();
            let i = apply_impulse(&real, &f, t).unwrap();
            assert_eq!(k.to_bits(), i.to_bits(), "t = {t}");
        }
        let zero = StepSignal::indicator(0.0, 1.0, 0.0).unwrap();
        assert_eq!(apply_kernel(&real, &zero, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn component_views_sum_to_channel() {
        let real = realization(3);
        let f = StepSignal::new(vec![-1.0, 0.0, 2.0], vec![1.0, -0.5]).unwrap();
        let [d, c, j, s] = component_fields(&real);
        let parts = -apply_kernel(&d, &f, 0.5).unwrap()
            + apply_kernel(&c, &f, 0.5).unwrap()
            + apply_kernel(&j, &f, 0.5).unwrap()
            + apply_kernel(&s, &f, 0.5).unwrap();
        assert_eq!(parts.to_bits(), apply_kernel(&real, &f, 0.5).unwrap().to_bits());
    }

    #[test]
    fn linear_in_the_signal() {
        let real = realization(4);
        let f = StepSignal::new(vec![-1.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        let g = StepSignal::indicator(0.25, 2.0, -3.0).unwrap();
        let h = StepSignal::combine(0.5, &f, 2.0, &g);
        let lhs = apply_kernel(&real, &h, 0.0).unwrap();
        let rhs = 0.5 * apply_kernel(&real, &f, 0.0).unwrap() + 2.0 * apply_kernel(&real, &g, 0.0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-13 * absolute_scale(&real, &h, 0.0).unwrap().max(1.0));
    }

    #[test]
    fn off_lattice_signals_are_rejected() {
        let real = realization(5);
        let f = StepSignal::indicator(0.0, 0.3, 1.0).unwrap();
        assert!(apply_kernel(&real, &f, 0.0).is_err());
        assert!(apply_impulse(&real, &f, 0.0).is_err());
    }
}

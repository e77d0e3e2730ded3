use num_complex::Complex64;

use super::realization::Component;
use super::spec::ChannelSpec;
use crate::error::{Error, Result};
use crate::levy::SizeRegion;
use crate::measures::repr::CellUnion;
use crate::operator::signal::StepSignal;

/// Closed-form characteristic function `E exp(iγ H_x f(t))` of one random channel component.
///
/// Cell `[u_{k-1}, u_k)` of `f` sees the impulse-response delays `[t - u_k, t - u_{k-1})`.
pub fn theoretical_component_cf(
    spec: &ChannelSpec,
    component: Component,
    f: &StepSignal,
    t: f64,
    gamma: f64,
) -> Result<Complex64> {
    if !gamma.is_finite() {
        return Err(Error::domain(format!("frequency {gamma} is not finite")));
    }
    spec.check_time(t)?;
    let (lo, hi) = f.support();
    spec.check_delays(&CellUnion::interval(t - hi, t - lo)?)?;
    let tr = &spec.triplet;
    let one = Complex64::new(1.0, 0.0);
    let mut exponent = Complex64::new(0.0, 0.0);
    match component {
        Component::Gaussian => {
            let scale = spec.alpha_scale(t);
            let energy: f64 = f.cells().map(|(a, b, c)| c * c * scale * tr.alpha_mass(t - b, t - a)).sum();
            exponent.re = -0.5 * gamma * gamma * energy;
        }
        Component::LargeJumps | Component::SmallJumps => {
            let kappa = spec.lambda_scale(t);
            let small = component == Component::SmallJumps;
            let region = if small {
                SizeRegion::Small(tr.truncation)
            } else {
                SizeRegion::Large(tr.truncation)
            };
            for (a, b, c) in f.cells() {
                let lam = kappa * tr.lambda_mass(t - b, t - a);
                if lam == 0.0 || c == 0.0 {
                    continue;
                }
                let g = gamma * c;
                let integral = tr.jump_size.integrate(region, |y| {
                    let e = Complex64::from_polar(1.0, g * y) - one;
                    if small {
                        e - Complex64::new(0.0, g * y)
                    } else {
                        e
                    }
                });
                exponent += integral * lam;
            }
        }
        Component::Deterministic => {
            return Err(Error::Unsupported(
                "the deterministic component has no random characteristic function".into(),
            ))
        }
    }
    Ok(exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::spec::{ChannelWindow, CorrFn};
    use crate::levy::{LevyTriplet, Profile, SizeDist};
    use crate::measures::repr::MeasureRepr;

    fn spec(alpha: Profile, lambda: MeasureRepr, size: SizeDist) -> ChannelSpec {
        let triplet = LevyTriplet::new(Profile::Zero, alpha, lambda, size, 1.0).unwrap();
        ChannelSpec::new(triplet, CorrFn::Constant, CorrFn::Constant, None, ChannelWindow { t_max: 1.0, u_max: 4.0 }).unwrap()
    }

    #[test]
    fn gaussian_component() {
        let s = spec(
            Profile::Linear { slope: 1.0 },
            MeasureRepr::zero((-4.0, 4.0)).unwrap(),
            SizeDist::point_mass(1.0).unwrap(),
        );
        let f = StepSignal::indicator(0.0, 1.0, 1.0).unwrap();
        let v = theoretical_component_cf(&s, Component::Gaussian, &f, 0.5, 1.0).unwrap();
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-15);
        for c in [Component::Gaussian, Component::LargeJumps, Component::SmallJumps] {
            assert_eq!(theoretical_component_cf(&s, c, &f, 0.0, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        }
        assert!(matches!(
            theoretical_component_cf(&s, Component::Deterministic, &f, 0.0, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn jump_component_matches_poisson_mixture() {
        // λ = 2 on every unit delay interval seen by f = 1_[0,1), F = δ_2.
        let s = spec(Profile::Zero, MeasureRepr::uniform(-4.0, 4.0, 2.0).unwrap(), SizeDist::point_mass(2.0).unwrap());
        let f = StepSignal::indicator(0.0, 1.0, 1.0).unwrap();
        let got = theoretical_component_cf(&s, Component::LargeJumps, &f, 0.25, 0.5).unwrap();
        let mut oracle = Complex64::new(0.0, 0.0);
        let mut w = (-2.0f64).exp();
        for k in 0..=60 {
            if k > 0 {
                w *= 2.0 / k as f64;
            }
            oracle += Complex64::from_polar(w, k as f64);
        }
        assert!((got - oracle).norm() < 1e-14);
        let small = theoretical_component_cf(&s, Component::SmallJumps, &f, 0.25, 0.5).unwrap();
        assert_eq!(small, Complex64::new(1.0, 0.0));
    }
}

//! Scattering functions `∫∫ e^{2πi(sγ̃ - tγ)} ρ_{s,t}(B) ds dt` over a finite time window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed_form::ClosedFormRho;
use super::repr::CellUnion;
use crate::error::{Error, Result};
use crate::numeric::trapezoid_weights;

/// Fewest trapezoid nodes per time axis.
pub const MIN_SCATTERING_NODES: usize = 64;

/// Anything that can evaluate a correlation measure `ρ_{s,t}(B)`.
pub trait RhoProvider: Sync {
    fn rho(&self, s: f64, t: f64, set: &CellUnion) -> Result<f64>;

    /// Whether `ρ_{s,t}` depends on `(s, t)` only through `t - s`.
    fn is_stationary(&self) -> bool {
        false
    }
}

impl RhoProvider for ClosedFormRho<'_> {
    fn rho(&self, s: f64, t: f64, set: &CellUnion) -> Result<f64> {
        Ok(self.parts(s, t, set)?.get(self.part()))
    }

    fn is_stationary(&self) -> bool {
        self.spec().is_stationary()
    }
}

/// A correlation measure that does not depend on time: `ρ_{s,t}(B) = value(B)`.
pub struct ConstantRho<F: Fn(&CellUnion) -> f64 + Sync>(pub F);

impl<F: Fn(&CellUnion) -> f64 + Sync> RhoProvider for ConstantRho<F> {
    fn rho(&self, _s: f64, _t: f64, set: &CellUnion) -> Result<f64> {
        Ok((self.0)(set))
    }

    fn is_stationary(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringEval {
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub s_max: f64,
    pub t_max: f64,
    pub nodes: usize,
    pub value: Complex64,
}

fn check(gamma: f64, gamma_tilde: f64, s_max: f64, t_max: f64, nodes: usize) -> Result<()> {
    if !(gamma.is_finite() && gamma_tilde.is_finite()) {
        return Err(Error::domain("scattering frequencies must be finite"));
    }
    if !(s_max > 0.0 && t_max > 0.0 && s_max.is_finite() && t_max.is_finite()) {
        return Err(Error::domain("scattering windows must be positive"));
    }
    if nodes < MIN_SCATTERING_NODES {
        return Err(Error::domain(format!(
            "scattering quadrature needs at least {MIN_SCATTERING_NODES} nodes per axis, got {nodes}"
        )));
    }
    Ok(())
}

fn axis(half: f64, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * half / (nodes - 1) as f64;
    let x = (0..nodes).map(|i| -half + step * i as f64).collect();
    (x, trapezoid_weights(nodes, step))
}

fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x)
}

/// Composite trapezoid double sum over `[-S, S] × [-T, T]` with `nodes` points per axis.
pub fn scattering_eval(
    provider: &dyn RhoProvider,
    gamma: f64,
    gamma_tilde: f64,
    set: &CellUnion,
    s_max: f64,
    t_max: f64,
    nodes: usize,
) -> Result<ScatteringEval> {
    check(gamma, gamma_tilde, s_max, t_max, nodes)?;
    let (sx, sw) = axis(s_max, nodes);
    let (tx, tw) = axis(t_max, nodes);
    let mut value = Complex64::new(0.0, 0.0);
    for (s, ws) in sx.iter().zip(&sw) {
        let mut row = Complex64::new(0.0, 0.0);
        for (t, wt) in tx.iter().zip(&tw) {
            row += phase(-t * gamma) * (wt * provider.rho(*s, *t, set)?);
        }
        value += phase(s * gamma_tilde) * row * *ws;
    }
    Ok(ScatteringEval {
        gamma,
        gamma_tilde,
        s_max,
        t_max,
        nodes,
        value,
    })
}

/// The same trapezoid sum for a stationary provider, grouped by lag `t - s = kΔ`:
/// `Σ_k ρ(kΔ) e^{-2πi kΔγ} Σ_i w_i w_{i+k} e^{2πi x_i (γ̃ - γ)}`, with the inner sums taken as
/// geometric series corrected at the half-weight end nodes. Needs `S = T`.
pub fn scattering_eval_stationary(
    provider: &dyn RhoProvider,
    gamma: f64,
    gamma_tilde: f64,
    set: &CellUnion,
    s_max: f64,
    t_max: f64,
    nodes: usize,
) -> Result<ScatteringEval> {
    check(gamma, gamma_tilde, s_max, t_max, nodes)?;
    if !provider.is_stationary() {
        return Err(Error::Unsupported("the lag-grouped scattering sum needs a stationary correlation".into()));
    }
    if s_max != t_max {
        return Err(Error::Unsupported(format!(
            "the lag-grouped scattering sum needs equal windows, got S = {s_max}, T = {t_max}"
        )));
    }
    let (x, _) = axis(t_max, nodes);
    let n = nodes as i64;
    let step = x[1] - x[0];
    let nu = gamma_tilde - gamma;
    let z = phase(step * nu);
    let half = |i: i64| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    // Σ_{i=lo}^{hi} z^i
    let geometric = |lo: i64, hi: i64| -> Complex64 {
        if (z - 1.0).norm() < 1e-6 {
            (lo..=hi).map(|i| z.powi(i as i32)).sum()
        } else {
            (z.powi((hi + 1) as i32) - z.powi(lo as i32)) / (z - 1.0)
        }
    };
    let mut value = Complex64::new(0.0, 0.0);
    for k in -(n - 1)..n {
        let (lo, hi) = (0.max(-k), (n - 1).min(n - 1 - k));
        let mut inner = geometric(lo, hi);
        let mut ends = vec![lo, hi, 0, n - 1, -k, n - 1 - k];
        ends.retain(|i| (lo..=hi).contains(i));
        ends.sort_unstable();
        ends.dedup();
        for i in ends {
            let c = half(i) * half(i + k);
            if c != 1.0 {
                inner += z.powi(i as i32) * (c - 1.0);
            }
        }
        let (si, ti) = if k >= 0 { (0, k as usize) } else { ((-k) as usize, 0) };
        let rho = provider.rho(x[si], x[ti], set)?;
        value += phase(-(k as f64) * step * gamma) * inner * (rho * step * step);
    }
    // The x_i = -T + iΔ offset of the inner sums.
    value *= phase(-t_max * nu);
    Ok(ScatteringEval {
        gamma,
        gamma_tilde,
        s_max,
        t_max,
        nodes,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelSpec, ChannelWindow, CorrFn};
    use crate::measures::closed_form::RhoPart;
    use crate::levy::{LevyTriplet, Profile, SizeDist};
    use crate::measures::repr::MeasureRepr;
    use crate::numeric::sinc;

    fn spec() -> ChannelSpec {
        let triplet = LevyTriplet::new(
            Profile::Zero,
            Profile::Linear { slope: 1.0 },
            MeasureRepr::uniform(-4.0, 4.0, 0.5).unwrap(),
            SizeDist::gaussian(0.4, 0.8).unwrap(),
            0.6,
        )
        .unwrap();
        ChannelSpec::new(
            triplet,
            CorrFn::Exponential { tau: 0.7 },
            CorrFn::Gaussian { tau: 1.5 },
            None,
            ChannelWindow { t_max: 2.0, u_max: 4.0 },
        )
        .unwrap()
    }

    #[test]
    fn constant_correlation_gives_product_of_sincs() {
        // ρ ≡ 1: the trapezoid sum of e^{2πi(sγ̃ - tγ)} is close to 4ST sinc(2Sγ̃) sinc(2Tγ).
        let p = ConstantRho(|_: &CellUnion| 1.0);
        let b = CellUnion::interval(0.0, 1.0).unwrap();
        let v = scattering_eval(&p, 0.3, 0.1, &b, 1.0, 1.5, 401).unwrap().value;
        let exact = 4.0 * 1.5 * sinc(2.0 * 0.1) * sinc(3.0 * 0.3);
        assert!((v.re - exact).abs() < 1e-4, "{v} vs {exact}");
        assert!(v.im.abs() < 1e-12);
        assert!(scattering_eval(&p, 0.3, 0.1, &b, 1.0, 1.5, 10).is_err());
    }

    #[test]
    fn fast_path_matches_direct_sum() {
        let s = spec();
        let p = ClosedFormRho::new(&s);
        let b = CellUnion::new(vec![(-1.0, 0.5), (1.0, 2.0)]).unwrap();
        for (g, gt) in [(0.0, 0.0), (0.4, 0.4), (0.7, -0.2), (1.3, 0.25)] {
            let d = scattering_eval(&p, g, gt, &b, 2.0, 2.0, 64).unwrap().value;
            let f = scattering_eval_stationary(&p, g, gt, &b, 2.0, 2.0, 64).unwrap().value;
            assert!((d - f).norm() <= 1e-10 * d.norm().max(1e-3), "{g},{gt}: {d} vs {f}");
        }
        assert!(matches!(
            scattering_eval_stationary(&p, 0.0, 0.0, &b, 1.0, 2.0, 64),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn components_add_up() {
        let s = spec();
        let b = CellUnion::interval(-0.5, 0.75).unwrap();
        let total = scattering_eval(&ClosedFormRho::new(&s), 0.2, 0.5, &b, 1.0, 1.0, 64).unwrap().value;
        let sum: Complex64 = [RhoPart::Gaussian, RhoPart::LargeJumps, RhoPart::SmallJumps]
            .iter()
            .map(|&part| {
                let p = ClosedFormRho::new(&s).with_part(part);
                scattering_eval(&p, 0.2, 0.5, &b, 1.0, 1.0, 64).unwrap().value
            })
            .sum();
        assert!((sum - total).norm() <= 1e-9 * total.norm());
    }
}

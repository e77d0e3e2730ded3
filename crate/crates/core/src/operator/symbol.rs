//! Finite-window Kohn–Nirenberg and spreading symbols, and the channel evaluated through them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::apply::absolute_scale;
use super::signal::StepSignal;
use crate::channel::KernelRealization;
use crate::error::{Error, Result};
use crate::numeric::{raised_cosine_hat, trapezoid_weights};

/// Symmetric uniform frequency grid `[-span, span]` plus the window half-width `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolGrid {
    pub span: f64,
    pub count: usize,
    pub half_width_t: f64,
}

impl SymbolGrid {
    pub fn new(span: f64, count: usize, half_width_t: f64) -> Result<Self> {
        if !(span.is_finite() && span > 0.0 && count >= 2 && half_width_t.is_finite() && half_width_t > 0.0) {
            return Err(Error::domain(format!(
                "symbol grid needs span > 0, count >= 2, T > 0 (got {span}, {count}, {half_width_t})"
            )));
        }
        Ok(SymbolGrid {
            span,
            count,
            half_width_t,
        })
    }

    /// Frequency span `±32/w` and the smallest window that holds the delays `f` sees at time `t`.
    /// `w` is the shortest cell of `f` or of the delay grid, whichever is shorter. The node count is
    /// 4096, raised when needed so that the aliasing period exceeds the window by two delay cells.
    pub fn kohn_nirenberg_default(real: &KernelRealization, f: &StepSignal, t: f64) -> Result<Self> {
        let (lo, hi) = f.support();
        let h = real
            .ugrid
            .nodes()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let span = 32.0 / f.min_width().min(h);
        let half_width = (t - lo).abs().max((t - hi).abs());
        let needed = (2.0 * span * (2.0 * half_width + 2.0 * h)).ceil() as usize + 1;
        Self::new(span, needed.max(4096), half_width)
    }

    /// One period `[-1/(2Δt), 1/(2Δt)]` of the sampled-time spectrum, with one interval per time
    /// node in `[-T, T]`.
    pub fn spreading_default(real: &KernelRealization, half_width_t: f64) -> Result<Self> {
        let m = window_nodes(real, half_width_t).len().max(1);
        Self::new(0.5 / real.tgrid.step(), m + 1, half_width_t)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.span / (self.count - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count).map(|m| -self.span + m as f64 * h).collect()
    }
}

/// Symbol values: `values[row * count + m]` at row coordinate `rows[row]` and frequency node `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub grid: SymbolGrid,
    pub rows: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Symbol {
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.values[r * self.grid.count..(r + 1) * self.grid.count]
    }
}

/// `σ_T(t, ξ) = ∫_{-T}^{T} e^{-2πiuξ} Y(t, du)` on the frequency grid.
///
/// Inside each delay cell the increment is spread with the raised-cosine density
/// `(1 + cos(2π(u - u_mid)/h)) / h`, the finest resolution the sampled field carries. Its transform
/// decays like `ξ⁻³`, which keeps the frequency quadrature of the Fubini identity accurate.
pub fn kohn_nirenberg_symbol(real: &KernelRealization, t: f64, grid: &SymbolGrid) -> Result<Symbol> {
    let ti = real.tgrid.index_of(t)?;
    let big_t = grid.half_width_t;
    let cells = real.delay_cells(-big_t, big_t)?;
    let nodes = real.ugrid.nodes();
    let xi = grid.nodes();
    let mut values = vec![Complex64::new(0.0, 0.0); xi.len()];
    for k in cells {
        let dy = real.cell_increment(ti, k);
        if dy == 0.0 {
            continue;
        }
        let (lo, hi) = (nodes[k], nodes[k + 1]);
        let mid = 0.5 * (lo + hi);
        let h = hi - lo;
        for (v, &x) in values.iter_mut().zip(&xi) {
            *v += Complex64::from_polar(dy * raised_cosine_hat(h * x), -2.0 * PI * mid * x);
        }
    }
    Ok(Symbol {
        grid: *grid,
        rows: vec![t],
        values,
    })
}

/// `Hf(t) = ∫ e^{2πitξ} f̂(ξ) σ_T(t, ξ) dξ` by the trapezoid rule, with `f̂` in closed form.
pub fn kohn_nirenberg_apply(real: &KernelRealization, f: &StepSignal, t: f64, grid: &SymbolGrid) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let (lo, hi) = f.support();
    let big_t = grid.half_width_t;
    if t - hi < -big_t - 1e-12 || t - lo > big_t + 1e-12 {
        return Err(Error::domain(format!(
            "signal support [{lo}, {hi}) does not fit in the window [t - T, t + T] with t = {t}, T = {big_t}"
        )));
    }
    let nodes = real.ugrid.nodes();
    let h_max = real
        .delay_cells(-big_t, big_t)?
        .map(|k| nodes[k + 1] - nodes[k])
        .fold(0.0, f64::max);
    let h_min = real
        .delay_cells(-big_t, big_t)?
        .map(|k| nodes[k + 1] - nodes[k])
        .fold(f64::INFINITY, f64::min);
    let period = 1.0 / grid.step();
    // Bound on ∫_{|ξ|>span} |f̂(ξ) ŵ(hξ)| dξ per unit coefficient, from |f̂| <= Σ|c|/(π|ξ|) and
    // |ŵ(x)| <= 1/(π|x|(x²-1)).
    let hs = h_min * grid.span;
    let tail_mass = if hs > 2.0 { 2.0 / (3.0 * PI * PI * hs.powi(3)) } else { f64::INFINITY };
    if period <= 2.0 * big_t + h_max || tail_mass > 1e-4 {
        return Err(Error::Accuracy {
            message: format!(
                "frequency grid (span {}, {} nodes) cannot resolve a window of half-width {big_t}",
                grid.span, grid.count
            ),
            tail_mass,
        });
    }
    let sigma = kohn_nirenberg_symbol(real, t, grid)?;
    let weights = trapezoid_weights(grid.count, grid.step());
    let mut acc = Complex64::new(0.0, 0.0);
    for ((x, w), s) in grid.nodes().into_iter().zip(weights).zip(sigma.row(0)) {
        acc += Complex64::from_polar(w, 2.0 * PI * t * x) * f.fourier(x) * s;
    }
    Ok(acc.re)
}

/// Time nodes inside `[-T, T]`.
fn window_nodes(real: &KernelRealization, big_t: f64) -> Vec<usize> {
    let tol = 1e-9 * big_t.max(1.0);
    (0..real.tgrid.len())
        .filter(|&j| real.tgrid.nodes()[j].abs() <= big_t + tol)
        .collect()
}

/// `η_T(u, γ) = ∫_{-T}^{T} e^{-2πitγ} Y(t, u) dt` at the given delay nodes, by the trapezoid rule
/// over the time nodes in `[-T, T]`.
pub fn spreading_symbol(real: &KernelRealization, delays: &[f64], grid: &SymbolGrid) -> Result<Symbol> {
    let idx = window_nodes(real, grid.half_width_t);
    let tw = trapezoid_weights(idx.len(), real.tgrid.step());
    let gamma = grid.nodes();
    let mut values = Vec::with_capacity(delays.len() * gamma.len());
    for &u in delays {
        let y: Vec<f64> = idx.iter().map(|&j| real.y_value(j, u)).collect::<Result<_>>()?;
        for &g in &gamma {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&j, &w), &yj) in idx.iter().zip(&tw).zip(&y) {
                acc += Complex64::from_polar(w * yj, -2.0 * PI * real.tgrid.nodes()[j] * g);
            }
            values.push(acc);
        }
    }
    Ok(Symbol {
        grid: *grid,
        rows: delays.to_vec(),
        values,
    })
}

/// `1_{[-T,T]}(t) ∫ f(t - u) Y(t, du) = ∬ e^{2πitγ} f(t - u) η_T(du, γ) dγ`, with the `γ` integral by
/// the trapezoid rule.
///
/// With the default grid the `γ` quadrature inverts the time quadrature exactly at interior time
/// nodes; a time node on `±T` carries the half trapezoid weight.
pub fn spreading_apply(real: &KernelRealization, f: &StepSignal, t: f64, grid: &SymbolGrid) -> Result<f64> {
    if t.abs() > grid.half_width_t {
        return Ok(0.0);
    }
    real.tgrid.index_of(t)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let n_time = window_nodes(real, grid.half_width_t).len();
    if grid.count <= n_time {
        return Err(Error::Accuracy {
            message: format!(
                "{} Doppler nodes alias the {n_time} time nodes in [-T, T]",
                grid.count
            ),
            tail_mass: f64::INFINITY,
        });
    }
    let reflected: Vec<f64> = f.breakpoints().iter().map(|b| t - b).collect();
    let eta = spreading_symbol(real, &reflected, grid)?;
    let weights = trapezoid_weights(grid.count, grid.step());
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, (g, w)) in grid.nodes().into_iter().zip(weights).enumerate() {
        let mut inner = Complex64::new(0.0, 0.0);
        for (k, &c) in f.coeffs().iter().enumerate() {
            inner += (eta.row(k)[m] - eta.row(k + 1)[m]) * c;
        }
        acc += Complex64::from_polar(w, 2.0 * PI * t * g) * inner;
    }
    Ok(acc.re)
}

/// `|a - b|` relative to the absolute scale of `f` against the realization (at least 1e-300).
pub fn relative_error(real: &KernelRealization, f: &StepSignal, t: f64, a: f64, b: f64) -> Result<f64> {
    Ok((a - b).abs() / absolute_scale(real, f, t)?.max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelSpec, ChannelWindow, CorrFn};
    use crate::grid::{DelayGrid, TimeGrid};
    use crate::levy::{LevyTriplet, Profile, SizeDist};
    use crate::measures::repr::MeasureRepr;
    use crate::operator::apply::{apply_impulse, apply_kernel};
    use crate::seed::RngSeed;

    fn realization(seed: u64) -> KernelRealization {
        let triplet = LevyTriplet::new(
            Profile::Zero,
            Profile::Linear { slope: 0.5 },
            MeasureRepr::uniform(-4.0, 4.0, 1.0).unwrap(),
            SizeDist::mixture(vec![(-1.0, 0.5), (0.4, 0.5)]).unwrap(),
            0.5,
        )
        .unwrap();
        let spec = ChannelSpec::new(
            triplet,
            CorrFn::Gaussian { tau: 1.0 },
            CorrFn::Exponential { tau: 1.0 },
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
    fn kohn_nirenberg_matches_kernel_form() {
        let real = realization(11);
        let f = StepSignal::new(vec![-1.0, -0.25, 0.5, 2.0], vec![1.0, -2.0, 0.5]).unwrap();
        for &t in &[-0.5, 0.0, 0.75] {
            let grid = SymbolGrid::kohn_nirenberg_default(&real, &f, t).unwrap();
            let kn = kohn_nirenberg_apply(&real, &f, t, &grid).unwrap();
            let direct = apply_kernel(&real, &f, t).unwrap();
            assert!(relative_error(&real, &f, t, kn, direct).unwrap() < 1e-6, "t = {t}: {kn} vs {direct}");
        }
    }

    #[test]
    fn wider_frequency_span_reduces_error() {
        let real = realization(12);
        let f = StepSignal::indicator(-0.5, 1.0, 1.0).unwrap();
        let direct = apply_kernel(&real, &f, 0.0).unwrap();
        let coarse = SymbolGrid::new(80.0, 801, 1.0).unwrap();
        let fine = SymbolGrid::new(160.0, 1601, 1.0).unwrap();
        let e1 = (kohn_nirenberg_apply(&real, &f, 0.0, &coarse).unwrap() - direct).abs();
        let e2 = (kohn_nirenberg_apply(&real, &f, 0.0, &fine).unwrap() - direct).abs();
        assert!(e2 < e1, "{e2} !< {e1}");
    }

    #[test]
    fn coarse_frequency_grids_are_rejected() {
        let real = realization(13);
        let f = StepSignal::indicator(-0.5, 1.0, 1.0).unwrap();
        let aliased = SymbolGrid::new(100.0, 201, 1.0).unwrap();
        assert!(matches!(kohn_nirenberg_apply(&real, &f, 0.0, &aliased), Err(Error::Accuracy { .. })));
        let narrow = SymbolGrid::new(4.0, 4001, 1.0).unwrap();
        assert!(matches!(kohn_nirenberg_apply(&real, &f, 0.0, &narrow), Err(Error::Accuracy { .. })));
        let zero = StepSignal::indicator(-0.5, 1.0, 0.0).unwrap();
        assert_eq!(kohn_nirenberg_apply(&real, &zero, 0.0, &narrow).unwrap(), 0.0);
    }

    #[test]
    fn spreading_matches_impulse_form() {
        let real = realization(14);
        let f = StepSignal::new(vec![-1.0, 0.0, 0.75, 2.0], vec![2.0, -1.0, 0.5]).unwrap();
        let grid = SymbolGrid::spreading_default(&real, 1.0).unwrap();
        for &t in &[-0.75, 0.0, 0.5] {
            let eta = spreading_apply(&real, &f, t, &grid).unwrap();
            let direct = apply_impulse(&real, &f, t).unwrap();
            assert!(relative_error(&real, &f, t, eta, direct).unwrap() < 1e-12, "t = {t}");
        }
        // Boundary nodes carry half the trapezoid weight; outside the window the indicator vanishes.
        let edge = spreading_apply(&real, &f, 1.0, &grid).unwrap();
        assert!((edge - 0.5 * apply_impulse(&real, &f, 1.0).unwrap()).abs() < 1e-12);
        let small = SymbolGrid::spreading_default(&real, 0.5).unwrap();
        assert_eq!(spreading_apply(&real, &f, 0.75, &small).unwrap(), 0.0);
    }
}

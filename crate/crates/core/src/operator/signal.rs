use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::sinc;

/// Piecewise-constant probe: value `coeffs[k]` on `[breakpoints[k], breakpoints[k + 1])`, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSignal {
    breakpoints: Vec<f64>,
    coeffs: Vec<f64>,
}

impl StepSignal {
    pub fn new(breakpoints: Vec<f64>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || breakpoints.len() != coeffs.len() + 1 {
            return Err(Error::domain(format!(
                "a step signal needs n >= 1 coefficients and n + 1 breakpoints (got {} and {})",
                coeffs.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.iter().chain(&coeffs).any(|x| !x.is_finite()) {
            return Err(Error::domain("step signal values must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("step signal breakpoints must be strictly increasing"));
        }
        Ok(StepSignal { breakpoints, coeffs })
    }

    /// `c · 1_{[a, b)}`.
    pub fn indicator(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![c])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(lo, hi, value)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.coeffs)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Shortest cell length.
    pub fn min_width(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&b| b <= x) - 1;
        self.coeffs[k]
    }

    /// `f(· - tau)`.
    pub fn shifted(&self, tau: f64) -> Self {
        StepSignal {
            breakpoints: self.breakpoints.iter().map(|b| b + tau).collect(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// `∫ |f|² du`.
    pub fn energy(&self) -> f64 {
        self.cells().map(|(a, b, c)| c * c * (b - a)).sum()
    }

    /// `f̂(ξ) = ∫ f(x) e^{-2πixξ} dx`, as a sum of modulated sinc terms.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        self.cells()
            .map(|(a, b, c)| {
                let w = b - a;
                let centre = 0.5 * (a + b);
                Complex64::from_polar(c * w * sinc(w * xi), -2.0 * std::f64::consts::PI * centre * xi)
            })
            .sum()
    }

    /// `alpha·f + beta·g` on the common refinement of both breakpoint sets.
    pub fn combine(alpha: f64, f: &StepSignal, beta: f64, g: &StepSignal) -> Self {
        let mut cuts: Vec<f64> = f.breakpoints.iter().chain(&g.breakpoints).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let coeffs = cuts
            .windows(2)
            .map(|w| alpha * f.value(w[0]) + beta * g.value(w[0]))
            .collect();
        StepSignal {
            breakpoints: cuts,
            coeffs,
        }
    }
}

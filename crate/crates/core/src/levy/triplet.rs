use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::size_dist::{SizeDist, SizeRegion};
use crate::error::{Error, Result};
use crate::measures::repr::{Cell, MeasureRepr};

/// A continuous real function of delay with value 0 at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    Linear { slope: f64 },
    /// Linear interpolation between knots `(u, value)`, constant beyond the end knots.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl Profile {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Linear { slope } => slope * u,
            Profile::PiecewiseLinear { knots } => {
                let (first, last) = (knots[0], knots[knots.len() - 1]);
                if u <= first.0 {
                    return first.1;
                }
                if u >= last.0 {
                    return last.1;
                }
                let k = knots.partition_point(|&(x, _)| x <= u);
                let (x0, y0) = knots[k - 1];
                let (x1, y1) = knots[k];
                y0 + (y1 - y0) * ((u - x0) / (x1 - x0))
            }
        }
    }

    /// `value(b) - value(a)`.
    pub fn increment(&self, a: f64, b: f64) -> f64 {
        self.eval(b) - self.eval(a)
    }

    fn validate(&self, what: &str, monotone: bool) -> Result<()> {
        match self {
            Profile::Zero => {}
            Profile::Linear { slope } => {
                if !slope.is_finite() || (monotone && *slope < 0.0) {
                    return Err(Error::domain(format!("{what}: slope {slope} is not admissible")));
                }
            }
            Profile::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return Err(Error::domain(format!("{what}: no knots")));
                }
                if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::domain(format!("{what}: knots must be finite")));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::domain(format!("{what}: knot positions must increase")));
                }
                if monotone && knots.windows(2).any(|w| w[1].1 < w[0].1) {
                    return Err(Error::domain(format!("{what}: must be non-decreasing")));
                }
            }
        }
        if self.eval(0.0).abs() > 1e-12 {
            return Err(Error::domain(format!("{what}: must vanish at the origin")));
        }
        Ok(())
    }

    /// The increment measure `[a, b) -> value(b) - value(a)` restricted to `window`.
    pub fn as_measure(&self, window: (f64, f64)) -> Result<MeasureRepr> {
        let (lo, hi) = window;
        let mut cuts = vec![lo, hi];
        if let Profile::PiecewiseLinear { knots } = self {
            cuts.extend(knots.iter().map(|k| k.0).filter(|&x| x > lo && x < hi));
        }
        cuts.sort_by(f64::total_cmp);
        let cells = cuts
            .windows(2)
            .map(|w| Cell {
                lo: w[0],
                hi: w[1],
                mass: self.increment(w[0], w[1]),
            })
            .filter(|c| c.mass != 0.0)
            .collect();
        MeasureRepr::positive(cells, Vec::new(), window)
    }
}

/// Finite-activity Lévy triplet `(m, α, ν = λ ⊗ F)` with truncation level `a`.
///
/// The admissible delay window is the window of `jump_intensity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub drift: Profile,
    pub variance: Profile,
    pub jump_intensity: MeasureRepr,
    pub jump_size: SizeDist,
    pub truncation: f64,
}

/// Delay span `I_u` between the origin and `u`, with the sign the path picks up there:
/// `[0, u)` with `+1` for `u >= 0`, `[u, 0)` with `-1` otherwise.
pub fn span(u: f64) -> (f64, f64, f64) {
    if u >= 0.0 {
        (0.0, u, 1.0)
    } else {
        (u, 0.0, -1.0)
    }
}

impl LevyTriplet {
    pub fn new(
        drift: Profile,
        variance: Profile,
        jump_intensity: MeasureRepr,
        jump_size: SizeDist,
        truncation: f64,
    ) -> Result<Self> {
        let t = LevyTriplet {
            drift,
            variance,
            jump_intensity,
            jump_size,
            truncation,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.drift.validate("drift", false)?;
        self.variance.validate("variance profile", true)?;
        self.jump_size.validate()?;
        if self.jump_intensity.is_signed() {
            return Err(Error::domain("jump intensity must be a positive measure"));
        }
        let (lo, hi) = self.window();
        if !(lo <= 0.0 && 0.0 <= hi) {
            return Err(Error::domain(format!("triplet window [{lo}, {hi}] must contain the origin")));
        }
        if !(self.truncation.is_finite() && self.truncation > 0.0) {
            return Err(Error::domain(format!("truncation level {} must be positive", self.truncation)));
        }
        Ok(())
    }

    pub fn window(&self) -> (f64, f64) {
        self.jump_intensity.window()
    }

    pub fn check_delay(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.window();
        if !u.is_finite() || u < lo || u > hi {
            return Err(Error::domain(format!("delay {u} outside the admissible window [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn large(&self) -> SizeRegion {
        SizeRegion::Large(self.truncation)
    }

    pub fn small(&self) -> SizeRegion {
        SizeRegion::Small(self.truncation)
    }

    /// `α([a, b))`.
    pub fn alpha_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            0.0
        } else {
            self.variance.increment(a, b)
        }
    }

    /// `λ([a, b))`.
    pub fn lambda_mass(&self, a: f64, b: f64) -> f64 {
        self.jump_intensity.measure(a, b)
    }

    /// `E Z_u = -m(u) + sign · λ(I_u) ∫_{|y|>=a} y F(dy)`.
    pub fn mean(&self, u: f64) -> f64 {
        let (lo, hi, sign) = span(u);
        -self.drift.eval(u) + sign * self.lambda_mass(lo, hi) * self.jump_size.first_moment(self.large())
    }

    /// `Var Z_u = α(I_u) + λ(I_u) ∫ y² F(dy)`.
    pub fn variance_at(&self, u: f64) -> f64 {
        let (lo, hi, _) = span(u);
        self.alpha_mass(lo, hi) + self.lambda_mass(lo, hi) * self.jump_size.second_moment(SizeRegion::All)
    }

    /// The drift that makes the path centred: `m(u) = sign · λ(I_u) ∫_{|y|>=a} y F(dy)`.
    pub fn centring_drift(&self, u: f64) -> f64 {
        let (lo, hi, sign) = span(u);
        sign * self.lambda_mass(lo, hi) * self.jump_size.first_moment(self.large())
    }

    /// Jump part of the Lévy–Khinchine exponent on `[a, b)`, at frequency `g`.
    pub fn jump_exponent(&self, a: f64, b: f64, g: f64) -> Complex64 {
        let lam = self.lambda_mass(a, b);
        if lam == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let one = Complex64::new(1.0, 0.0);
        let large = self
            .jump_size
            .integrate(self.large(), |y| Complex64::from_polar(1.0, g * y) - one);
        let small = self.jump_size.integrate(self.small(), |y| {
            Complex64::from_polar(1.0, g * y) - one - Complex64::new(0.0, g * y)
        });
        (large + small) * lam
    }
}

/// Characteristic function `E exp(iγ Z_u)` of the additive path with triplet `triplet`.
///
/// For `u < 0` the path is `-(Z_0 - Z_u)`, so the jump integrals are evaluated at `-γ`.
pub fn levy_cf(triplet: &LevyTriplet, u: f64, gamma: f64) -> Result<Complex64> {
    if !gamma.is_finite() {
        return Err(Error::domain(format!("frequency {gamma} is not finite")));
    }
    triplet.check_delay(u)?;
    let (lo, hi, sign) = span(u);
    let mut psi = Complex64::new(
        -triplet.alpha_mass(lo, hi) * gamma * gamma / 2.0,
        -gamma * triplet.drift.eval(u),
    );
    psi += triplet.jump_exponent(lo, hi, sign * gamma);
    Ok(psi.exp())
}

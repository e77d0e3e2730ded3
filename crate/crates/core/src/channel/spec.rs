use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{LevyTriplet, Profile, SizeRegion};
use crate::measures::repr::CellUnion;

/// Cross-time correlation functions `r(τ)` with `r(0) = 1`; every member is positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrFn {
    /// `exp(-|τ| / tau)`
    Exponential { tau: f64 },
    /// `exp(-τ² / tau²)`
    Gaussian { tau: f64 },
    Constant,
}

impl CorrFn {
    pub fn eval(&self, lag: f64) -> f64 {
        match *self {
            CorrFn::Exponential { tau } => (-lag.abs() / tau).exp(),
            CorrFn::Gaussian { tau } => (-(lag / tau).powi(2)).exp(),
            CorrFn::Constant => 1.0,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        match *self {
            CorrFn::Exponential { tau } | CorrFn::Gaussian { tau } if !(tau.is_finite() && tau > 0.0) => {
                Err(Error::domain(format!("{what}: correlation time {tau} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// Piecewise-constant-in-time scaling of the triplet, for non-stationary (US but not WSSUS) channels.
///
/// Segment `i` covers `[breakpoints[i-1], breakpoints[i])`; the variance profile is multiplied by
/// `alpha_scale[i]` and jumps are thinned to intensity `lambda_scale[i] · λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeModulation {
    pub breakpoints: Vec<f64>,
    pub alpha_scale: Vec<f64>,
    pub lambda_scale: Vec<f64>,
}

impl TimeModulation {
    fn segment(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= t)
    }

    fn validate(&self) -> Result<()> {
        let n = self.breakpoints.len() + 1;
        if self.alpha_scale.len() != n || self.lambda_scale.len() != n {
            return Err(Error::domain(format!(
                "time modulation with {} breakpoints needs {n} alpha and lambda scales",
                self.breakpoints.len()
            )));
        }
        if self.breakpoints.windows(2).any(|w| w[1] <= w[0]) || self.breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("time modulation breakpoints must be finite and increasing"));
        }
        if self.alpha_scale.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::domain("alpha scales must be non-negative"));
        }
        if self.lambda_scale.iter().any(|k| !(*k >= 0.0 && *k <= 1.0)) {
            return Err(Error::domain("lambda scales are thinning probabilities and must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Time and delay half-widths: `t ∈ [-t_max, t_max]`, impulse-response delays in `[-u_max, u_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelWindow {
    pub t_max: f64,
    pub u_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub triplet: LevyTriplet,
    pub time_corr_gaussian: CorrFn,
    pub time_corr_jump: CorrFn,
    /// `None` for a stationary (WSSUS) channel.
    pub modulation: Option<TimeModulation>,
    pub window: ChannelWindow,
}

impl ChannelSpec {
    pub fn new(
        triplet: LevyTriplet,
        time_corr_gaussian: CorrFn,
        time_corr_jump: CorrFn,
        modulation: Option<TimeModulation>,
        window: ChannelWindow,
    ) -> Result<Self> {
        let spec = ChannelSpec {
            triplet,
            time_corr_gaussian,
            time_corr_jump,
            modulation,
            window,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.triplet.validate()?;
        if self.triplet.drift != Profile::Zero {
            return Err(Error::domain(
                "channel drift is fixed to the centring compensator; the triplet drift must be zero",
            ));
        }
        self.time_corr_gaussian.validate("gaussian time correlation")?;
        self.time_corr_jump.validate("jump time correlation")?;
        if let Some(m) = &self.modulation {
            m.validate()?;
        }
        let ChannelWindow { t_max, u_max } = self.window;
        if !(t_max.is_finite() && t_max > 0.0 && u_max.is_finite() && u_max > 0.0) {
            return Err(Error::domain("channel window half-widths must be positive"));
        }
        let (lo, hi) = self.triplet.window();
        if lo > -u_max || hi < u_max {
            return Err(Error::domain(format!(
                "delay window [-{u_max}, {u_max}] exceeds the triplet window [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    pub fn is_stationary(&self) -> bool {
        self.modulation.is_none()
    }

    /// Multiplier `a(t)` of the variance profile at time `t`.
    pub fn alpha_scale(&self, t: f64) -> f64 {
        match &self.modulation {
            None => 1.0,
            Some(m) => m.alpha_scale[m.segment(t)],
        }
    }

    /// Thinning probability `κ(t)`; the jump intensity at time `t` is `κ(t) λ`.
    pub fn lambda_scale(&self, t: f64) -> f64 {
        match &self.modulation {
            None => 1.0,
            Some(m) => m.lambda_scale[m.segment(t)],
        }
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t.abs() > self.window.t_max {
            return Err(Error::window(format!("time {t} outside [-{0}, {0}]", self.window.t_max)));
        }
        Ok(())
    }

    /// Checks that a set of impulse-response delays lies in the delay window.
    pub fn check_delays(&self, set: &CellUnion) -> Result<()> {
        let u = self.window.u_max;
        if !set.within(-u, u) {
            return Err(Error::window(format!(
                "delay set {:?} leaves the delay window [-{u}, {u}]",
                set.intervals()
            )));
        }
        Ok(())
    }

    /// Closed-form measure parts `(c, j, small_j)` of a set of impulse-response delays at time `t`:
    /// `a(t) α(B)`, `κ(t) λ(B) ∫_{|y|>=a} y² dF` and `κ(t) λ(B) ∫_{|y|<a} y² dF`.
    pub fn y_measure_parts(&self, t: f64, set: &CellUnion) -> (f64, f64, f64) {
        let tr = &self.triplet;
        let alpha: f64 = set.intervals().iter().map(|&(a, b)| tr.alpha_mass(a, b)).sum();
        let lambda = tr.jump_intensity.measure_of(set);
        let (kappa, scale) = (self.lambda_scale(t), self.alpha_scale(t));
        (
            scale * alpha,
            kappa * lambda * tr.jump_size.second_moment(SizeRegion::Large(tr.truncation)),
            kappa * lambda * tr.jump_size.second_moment(SizeRegion::Small(tr.truncation)),
        )
    }
}

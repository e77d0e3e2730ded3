//! Closed-form variance measures `μ_t` and correlation measures `ρ_{s,t}` of a channel spec.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::convolution::add_measures;
use super::repr::{Cell, CellUnion, MeasureRepr};
use crate::channel::ChannelSpec;
use crate::error::Result;
use crate::levy::{JumpClass, SizeRegion};

/// `μ_t(B)` split by component; `total = c + j + small_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuParts {
    pub total: f64,
    pub c: f64,
    pub j: f64,
    pub small_j: f64,
}

/// `μ_t(B) = E|X(t, B)|²` for a kernel delay set `B`, evaluated through the impulse-response
/// delays `t - B`.
pub fn mu_closed_form(spec: &ChannelSpec, t: f64, set: &CellUnion) -> Result<MuParts> {
    spec.check_time(t)?;
    let delays = set.reflect(t);
    spec.check_delays(&delays)?;
    let (c, j, small_j) = spec.y_measure_parts(t, &delays);
    Ok(MuParts {
        total: c + j + small_j,
        c,
        j,
        small_j,
    })
}

/// `μ_t` as a measure on kernel delays, for use in convolution identities.
pub fn mu_measure(spec: &ChannelSpec, t: f64) -> Result<MeasureRepr> {
    spec.check_time(t)?;
    let tr = &spec.triplet;
    let u = spec.window.u_max;
    let window = (-u, u);
    let alpha = tr.variance.as_measure(window)?.scaled(spec.alpha_scale(t))?;
    let lambda = MeasureRepr::positive(
        tr.jump_intensity
            .cells()
            .iter()
            .filter_map(|c| {
                let (lo, hi) = (c.lo.max(-u), c.hi.min(u));
                (hi > lo).then(|| Cell {
                    lo,
                    hi,
                    mass: c.mass * ((hi - lo) / (c.hi - c.lo)),
                })
            })
            .collect(),
        tr.jump_intensity
            .atoms()
            .iter()
            .filter(|a| a.point >= -u && a.point < u)
            .copied()
            .collect(),
        window,
    )?;
    let lambda = lambda.scaled(spec.lambda_scale(t) * tr.jump_size.second_moment(SizeRegion::All))?;
    // Y-measure on impulse-response delays, mapped to kernel delays by v = t - u.
    let y = add_measures(&[alpha, lambda])?;
    y.reflected().shifted(t)
}

/// `ρ_{s,t}(B)` split by component; `total = c + j + small_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoParts {
    pub total: f64,
    pub c: f64,
    pub j: f64,
    pub small_j: f64,
}

/// Which piece of `ρ` a provider reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoPart {
    Total,
    Gaussian,
    LargeJumps,
    SmallJumps,
}

impl RhoParts {
    pub fn get(&self, part: RhoPart) -> f64 {
        match part {
            RhoPart::Total => self.total,
            RhoPart::Gaussian => self.c,
            RhoPart::LargeJumps => self.j,
            RhoPart::SmallJumps => self.small_j,
        }
    }
}

const COPULA_LATTICE: f64 = (1u64 << 40) as f64;

/// `P(class) · C_{F|class}(r)` for both classes.
#[derive(Debug, Clone, Copy)]
struct CopulaParts {
    large: f64,
    small: f64,
}

/// Closed-form correlation measures of one spec, caching the jump-size copula moments by
/// correlation value.
#[derive(Debug)]
pub struct ClosedFormRho<'a> {
    spec: &'a ChannelSpec,
    part: RhoPart,
    cache: Mutex<HashMap<u64, CopulaParts>>,
}

impl<'a> ClosedFormRho<'a> {
    pub fn new(spec: &'a ChannelSpec) -> Self {
        ClosedFormRho {
            spec,
            part: RhoPart::Total,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// The same provider reporting one piece of `ρ` instead of the total.
    pub fn with_part(self, part: RhoPart) -> Self {
        ClosedFormRho { part, ..self }
    }

    pub fn part(&self) -> RhoPart {
        self.part
    }

    pub fn spec(&self) -> &ChannelSpec {
        self.spec
    }

    fn copula(&self, r: f64) -> CopulaParts {
        // Snap r to a 2^-40 lattice and evaluate at the snapped value, so nearby lags that differ
        // only by rounding share one entry and the result does not depend on evaluation order.
        let r = (r * COPULA_LATTICE).round() / COPULA_LATTICE;
        let key = r.to_bits();
        if let Some(p) = self.cache.lock().expect("copula cache poisoned").get(&key) {
            return *p;
        }
        let f = &self.spec.triplet.jump_size;
        let a = self.spec.triplet.truncation;
        let class = |c: JumpClass| {
            let law = f.class_law(c, a);
            law.prob() * law.copula_moment(f, r)
        };
        let parts = CopulaParts {
            large: class(JumpClass::Large),
            small: class(JumpClass::Small),
        };
        self.cache.lock().expect("copula cache poisoned").insert(key, parts);
        parts
    }

    /// `ρ_{s,t}(B) = E[Y(s, B) Y(t, B)]` for a set `B` of impulse-response delays.
    ///
    /// Off the diagonal: `r_c(t-s) √(a(s)a(t)) α(B) + min(κ(s), κ(t)) λ(B) Σ_class P(class) C_class(r_j(t-s))`,
    /// where `C_class` is the copula moment of F restricted to the class. On the diagonal the measure parts are shared with `μ`, so `ρ_{t,t}(t - B) = μ_t(B)` holds
    /// bit for bit.
    pub fn parts(&self, s: f64, t: f64, set: &CellUnion) -> Result<RhoParts> {
        let spec = self.spec;
        spec.check_time(s)?;
        spec.check_time(t)?;
        spec.check_delays(set)?;
        if s == t {
            let (c, j, small_j) = spec.y_measure_parts(t, set);
            return Ok(RhoParts {
                total: c + j + small_j,
                c,
                j,
                small_j,
            });
        }
        let tr = &spec.triplet;
        let lag = t - s;
        let alpha: f64 = set.intervals().iter().map(|&(a, b)| tr.alpha_mass(a, b)).sum();
        let c = spec.time_corr_gaussian.eval(lag) * (spec.alpha_scale(s) * spec.alpha_scale(t)).sqrt() * alpha;
        let lam = spec.lambda_scale(s).min(spec.lambda_scale(t)) * tr.jump_intensity.measure_of(set);
        let cop = self.copula(spec.time_corr_jump.eval(lag));
        let (j, small_j) = (lam * cop.large, lam * cop.small);
        Ok(RhoParts {
            total: c + j + small_j,
            c,
            j,
            small_j,
        })
    }

    pub fn rho(&self, s: f64, t: f64, set: &CellUnion) -> Result<f64> {
        Ok(self.parts(s, t, set)?.total)
    }
}

/// One-shot `ρ_{s,t}(B)`.
pub fn rho_closed_form(spec: &ChannelSpec, s: f64, t: f64, set: &CellUnion) -> Result<RhoParts> {
    ClosedFormRho::new(spec).parts(s, t, set)
}

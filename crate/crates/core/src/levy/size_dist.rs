//! Jump-size distributions F on the punctured real line.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gauss_hermite_32, gauss_legendre_64, std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// Which jumps an integral over F runs over, relative to a truncation level `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeRegion {
    All,
    /// `|y| >= a`
    Large(f64),
    /// `|y| < a`
    Small(f64),
}

impl SizeRegion {
    pub fn contains(&self, y: f64) -> bool {
        match *self {
            SizeRegion::All => true,
            SizeRegion::Large(a) => y.abs() >= a,
            SizeRegion::Small(a) => y.abs() < a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SizeDist {
    PointMass { value: f64 },
    /// Atoms `(value, probability)`, sorted by value.
    Mixture { atoms: Vec<(f64, f64)> },
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl SizeDist {
    pub fn point_mass(value: f64) -> Result<Self> {
        let d = SizeDist::PointMass { value };
        d.validate()?;
        Ok(d)
    }

    pub fn mixture(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let d = SizeDist::Mixture { atoms };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = SizeDist::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        let d = SizeDist::Gaussian { mean, sd };
        d.validate()?;
        Ok(d)
    }

    /// Checks that F is a probability measure with no atom at zero.
    pub fn validate(&self) -> Result<()> {
        match self {
            SizeDist::PointMass { value } => {
                if !value.is_finite() || *value == 0.0 {
                    return Err(Error::domain(format!("point-mass jump size must be finite and non-zero, got {value}")));
                }
            }
            SizeDist::Mixture { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::domain("jump-size mixture has no atoms"));
                }
                let mut total = 0.0;
                for &(y, p) in atoms {
                    if !y.is_finite() || y == 0.0 {
                        return Err(Error::domain(format!("mixture atom {y} must be finite and non-zero")));
                    }
                    if !(p.is_finite() && p > 0.0) {
                        return Err(Error::domain(format!("mixture probability {p} must be positive")));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::domain(format!("mixture probabilities sum to {total}, not 1")));
                }
                if atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::domain("mixture atoms must be distinct and sorted by value"));
                }
            }
            SizeDist::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::domain(format!("uniform jump sizes need lo < hi, got [{lo}, {hi}]")));
                }
            }
            SizeDist::Gaussian { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && *sd > 0.0) {
                    return Err(Error::domain(format!("Gaussian jump sizes need sd > 0, got {sd}")));
                }
            }
        }
        Ok(())
    }

    /// `∫ g dF` over `region`; atoms are summed exactly, densities by composite 64-node
    /// Gauss–Legendre with the support split at `±a`.
    pub fn integrate<G>(&self, region: SizeRegion, mut g: G) -> Complex64
    where
        G: FnMut(f64) -> Complex64,
    {
        match self {
            SizeDist::PointMass { value } => {
                if region.contains(*value) {
                    g(*value)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            SizeDist::Mixture { atoms } => atoms
                .iter()
                .filter(|(y, _)| region.contains(*y))
                .map(|&(y, p)| g(y) * p)
                .sum(),
            SizeDist::Uniform { lo, hi } => {
                let density = 1.0 / (hi - lo);
                integrate_pieces(*lo, *hi, 1.0, region, |y| g(y) * density)
            }
            SizeDist::Gaussian { mean, sd } => {
                let (m, s) = (*mean, *sd);
                integrate_pieces(m - 10.0 * s, m + 10.0 * s, s, region, |y| {
                    g(y) * (std_normal_pdf((y - m) / s) / s)
                })
            }
        }
    }

    pub fn expect<G: FnMut(f64) -> f64>(&self, region: SizeRegion, mut g: G) -> f64 {
        self.integrate(region, |y| Complex64::new(g(y), 0.0)).re
    }

    pub fn probability(&self, region: SizeRegion) -> f64 {
        self.expect(region, |_| 1.0)
    }

    pub fn first_moment(&self, region: SizeRegion) -> f64 {
        self.expect(region, |y| y)
    }

    pub fn second_moment(&self, region: SizeRegion) -> f64 {
        self.expect(region, |y| y * y)
    }

    /// `F([lo, hi])` for a closed interval, from the distribution function.
    pub fn interval_probability(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        match self {
            SizeDist::PointMass { value } => f64::from(lo <= *value && *value <= hi),
            SizeDist::Mixture { atoms } => atoms.iter().filter(|(y, _)| lo <= *y && *y <= hi).map(|(_, p)| p).sum(),
            SizeDist::Uniform { lo: a, hi: b } => (hi.min(*b) - lo.max(*a)).max(0.0) / (b - a),
            SizeDist::Gaussian { mean, sd } => {
                let (zl, zh) = ((lo - mean) / sd, (hi - mean) / sd);
                // Difference of the smaller tails, to keep relative accuracy far from the mean.
                if zl > 0.0 {
                    std_normal_cdf(-zl) - std_normal_cdf(-zh)
                } else {
                    std_normal_cdf(zh) - std_normal_cdf(zl)
                }
            }
        }
    }

    /// Right-continuous generalized inverse `q(p) = inf{y : F(y) > p}`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            SizeDist::PointMass { value } => *value,
            SizeDist::Mixture { atoms } => {
                let mut cum = 0.0;
                for &(y, prob) in atoms {
                    cum += prob;
                    if cum > p {
                        return y;
                    }
                }
                atoms[atoms.len() - 1].0
            }
            SizeDist::Uniform { lo, hi } => lo + (hi - lo) * p,
            SizeDist::Gaussian { mean, sd } => mean + sd * std_normal_quantile(p),
        }
    }

    /// `q(Φ(z))`: maps a standard normal variate to a size with law F.
    pub fn from_normal(&self, z: f64) -> f64 {
        match self {
            SizeDist::Gaussian { mean, sd } => mean + sd * z,
            _ => self.quantile(std_normal_cdf(z)),
        }
    }

    /// `C_F(r) = E[q(Φ(ζ₀)) q(Φ(ζ₁))]` for standard normals with correlation `r`.
    pub fn copula_moment(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return self.second_moment(SizeRegion::All);
        }
        match self {
            SizeDist::PointMass { value } => value * value,
            SizeDist::Gaussian { mean, sd } => mean * mean + sd * sd * r,
            SizeDist::Uniform { .. } => {
                let rule = gauss_hermite_32();
                let s = (1.0 - r * r).sqrt();
                let mut acc = 0.0;
                for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
                    let z0 = std::f64::consts::SQRT_2 * xi;
                    let y0 = self.from_normal(z0);
                    let mut inner = 0.0;
                    for (xj, wj) in rule.nodes.iter().zip(&rule.weights) {
                        let z1 = r * z0 + s * std::f64::consts::SQRT_2 * xj;
                        inner += wj * self.from_normal(z1);
                    }
                    acc += wi * y0 * inner;
                }
                acc / std::f64::consts::PI
            }
            SizeDist::Mixture { atoms } => mixture_copula_moment(atoms, r),
        }
    }
}

/// Integrates over `[lo, hi]` intersected with `region`, using panels no wider than `panel`.
fn integrate_pieces<G>(lo: f64, hi: f64, panel: f64, region: SizeRegion, mut g: G) -> Complex64
where
    G: FnMut(f64) -> Complex64,
{
    let rule = gauss_legendre_64();
    let pieces: Vec<(f64, f64)> = match region {
        SizeRegion::All => vec![(lo, hi)],
        SizeRegion::Large(a) => vec![(lo, hi.min(-a)), (lo.max(a), hi)],
        SizeRegion::Small(a) => vec![(lo.max(-a), hi.min(a))],
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in pieces {
        if b > a {
            let panels = ((b - a) / panel).ceil().max(1.0) as usize;
            acc += rule.integrate_panels(a, b, panels, &mut g);
        }
    }
    acc
}

/// Conditional form of the copula moment for a finite mixture: given ζ₀ in the normal band of
/// atom k, the partner atom probabilities are differences of normal CDFs; the outer integral over
/// that band uses composite Gauss–Legendre against the normal density.
pub(crate) fn mixture_copula_moment(atoms: &[(f64, f64)], r: f64) -> f64 {
    let s = (1.0 - r * r).sqrt();
    let mut cum = Vec::with_capacity(atoms.len() + 1);
    cum.push(0.0);
    let mut c = 0.0;
    for &(_, p) in atoms {
        c += p;
        cum.push(c);
    }
    let last = atoms.len();
    cum[last] = 1.0;
    let bounds: Vec<f64> = cum
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i == 0 {
                f64::NEG_INFINITY
            } else if i == last {
                f64::INFINITY
            } else {
                std_normal_quantile(p)
            }
        })
        .collect();
    let partner_mean = |x: f64| -> f64 {
        let mut acc = 0.0;
        for (l, &(y, _)) in atoms.iter().enumerate() {
            let hi = if bounds[l + 1].is_finite() { std_normal_cdf((bounds[l + 1] - r * x) / s) } else { 1.0 };
            let lo = if bounds[l].is_finite() { std_normal_cdf((bounds[l] - r * x) / s) } else { 0.0 };
            acc += y * (hi - lo);
        }
        acc
    };
    let rule = gauss_legendre_64();
    let mut total = 0.0;
    for (k, &(y, _)) in atoms.iter().enumerate() {
        let (lo, hi) = (bounds[k].max(-10.0), bounds[k + 1].min(10.0));
        if hi <= lo {
            continue;
        }
        let panels = (hi - lo).ceil() as usize;
        let band = rule.integrate_panels(lo, hi, panels, |x| {
            Complex64::new(partner_mean(x) * std_normal_pdf(x), 0.0)
        });
        total += y * band.re;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_window_moments(m: f64, s: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
        // Truncated-normal moments over [lo, hi] in closed form.
        let (al, be) = ((lo - m) / s, (hi - m) / s);
        let p = std_normal_cdf(be) - std_normal_cdf(al);
        let ez = std_normal_pdf(al) - std_normal_pdf(be);
        let ez2 = p + al * std_normal_pdf(al) - be * std_normal_pdf(be);
        (p, m * p + s * ez, m * m * p + 2.0 * m * s * ez + s * s * ez2)
    }

    #[test]
    fn gaussian_region_moments_match_truncated_normal() {
        let d = SizeDist::gaussian(0.3, 0.8).unwrap();
        let a = 0.5;
        let (p, m1, m2) = gaussian_window_moments(0.3, 0.8, -a, a);
        assert!((d.probability(SizeRegion::Small(a)) - p).abs() < 1e-13);
        assert!((d.first_moment(SizeRegion::Small(a)) - m1).abs() < 1e-13);
        assert!((d.second_moment(SizeRegion::Small(a)) - m2).abs() < 1e-13);
        assert!((d.second_moment(SizeRegion::All) - (0.09 + 0.64)).abs() < 1e-13);
        let large = d.second_moment(SizeRegion::Large(a)) + m2;
        assert!((large - 0.73).abs() < 1e-13);
    }

    #[test]
    fn uniform_moments_are_exact() {
        let d = SizeDist::uniform(-1.0, 3.0).unwrap();
        assert!((d.first_moment(SizeRegion::All) - 1.0).abs() < 1e-14);
        // ∫_{|y|<0.5} y²/4 dy = (2 * 0.125 / 3) / 4
        assert!((d.second_moment(SizeRegion::Small(0.5)) - 0.25 / 12.0).abs() < 1e-15);
        assert!((d.probability(SizeRegion::Large(0.5)) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn interval_probabilities() {
        let g = SizeDist::gaussian(1.0, 2.0).unwrap();
        assert!((g.interval_probability(-1.0, 3.0) - 0.682_689_492_137_085_9).abs() < 1e-14);
        assert_eq!(g.interval_probability(2.0, 1.0), 0.0);
        let m = SizeDist::mixture(vec![(-1.0, 0.25), (2.0, 0.75)]).unwrap();
        assert_eq!(m.interval_probability(2.0, 2.0), 0.75);
        assert_eq!(m.interval_probability(-1.0, 2.0), 1.0);
        let u = SizeDist::uniform(-1.0, 3.0).unwrap();
        assert_eq!(u.interval_probability(0.0, 10.0), 0.75);
        assert_eq!(SizeDist::point_mass(3.0).unwrap().interval_probability(3.0, 3.0), 1.0);
    }

    #[test]
    fn mixture_quantile_is_right_continuous() {
        let d = SizeDist::mixture(vec![(1.0, 0.5), (-1.0, 0.5)]).unwrap();
        assert_eq!(d.quantile(0.0), -1.0);
        assert_eq!(d.quantile(0.4999), -1.0);
        assert_eq!(d.quantile(0.5), 1.0);
        assert_eq!(d.quantile(0.9), 1.0);
        assert!(SizeDist::mixture(vec![(0.0, 1.0)]).is_err());
        assert!(SizeDist::mixture(vec![(1.0, 0.3)]).is_err());
        assert!(SizeDist::point_mass(0.0).is_err());
    }

    #[test]
    fn copula_moment_limits() {
        let d = SizeDist::mixture(vec![(-1.0, 0.25), (2.0, 0.75)]).unwrap();
        let mean = -0.25 + 1.5;
        assert!((d.copula_moment(0.0) - mean * mean).abs() < 1e-10);
        assert!((d.copula_moment(1.0) - (0.25 + 3.0)).abs() < 1e-15);
        assert!((d.copula_moment(0.999_999) - 3.25).abs() < 1e-2);
        let g = SizeDist::gaussian(1.0, 2.0).unwrap();
        assert_eq!(g.copula_moment(0.5), 1.0 + 4.0 * 0.5);
        assert_eq!(SizeDist::point_mass(3.0).unwrap().copula_moment(0.2), 9.0);
    }

    #[test]
    fn mixture_copula_matches_bivariate_orthant_probability() {
        // Symmetric ±1 atoms: E[sgn ζ₀ sgn ζ₁] = (2/π) asin r.
        let d = SizeDist::mixture(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        for &r in &[0.1, 0.3679, 0.7, 0.95] {
            let oracle = 2.0 / std::f64::consts::PI * f64::asin(r);
            assert!((d.copula_moment(r) - oracle).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn uniform_copula_matches_conditional_oracle() {
        // E[U₀U₁] for the uniform copula on [0,1]: 1/4 + asin(r/2) / (2π).
        let d = SizeDist::uniform(0.0, 1.0).unwrap();
        for &r in &[0.2, 0.6, 0.9] {
            let oracle = 0.25 + f64::asin(r / 2.0) / (2.0 * std::f64::consts::PI);
            assert!((d.copula_moment(r) - oracle).abs() < 1e-6, "r = {r}");
        }
    }
}

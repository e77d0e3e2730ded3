//! The law of F restricted to one size class (`|y| >= a` or `|y| < a`), and its Gaussian-copula
//! moments.
//!
//! A channel scatterer keeps its class for its whole life; its sizes at different times are drawn
//! from the class law through correlated normals, so that large and small scatterers form
//! independent Poisson populations.

use num_complex::Complex64;

use super::path::JumpClass;
use super::size_dist::{mixture_copula_moment, SizeDist, SizeRegion};
use crate::numeric::{gauss_legendre_16, std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// A slice `[lo, hi]` of a continuous base law carrying F-mass `mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Empty,
    Point(f64),
    /// Renormalized mixture of the atoms inside the class.
    Atoms(SizeDist),
    Pieces { base: SizeDist, pieces: Vec<Piece> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassLaw {
    region: SizeRegion,
    prob: f64,
    kind: Kind,
}

fn region_intervals(region: SizeRegion) -> Vec<(f64, f64)> {
    match region {
        SizeRegion::All => vec![(f64::NEG_INFINITY, f64::INFINITY)],
        SizeRegion::Large(a) => vec![(f64::NEG_INFINITY, -a), (a, f64::INFINITY)],
        SizeRegion::Small(a) => vec![(-a, a)],
    }
}

/// `P(lo <= Z <= hi)` for a standard normal, taken from the tail it is smaller in.
fn normal_mass(zl: f64, zh: f64) -> f64 {
    if zl > 0.0 {
        std_normal_cdf(-zl) - std_normal_cdf(-zh)
    } else {
        std_normal_cdf(zh) - std_normal_cdf(zl)
    }
}

impl SizeDist {
    pub fn class_law(&self, class: JumpClass, truncation: f64) -> ClassLaw {
        let region = match class {
            JumpClass::Large => SizeRegion::Large(truncation),
            JumpClass::Small => SizeRegion::Small(truncation),
        };
        self.region_law(region)
    }

    /// F conditioned on `region`.
    pub fn region_law(&self, region: SizeRegion) -> ClassLaw {
        let empty = ClassLaw {
            region,
            prob: 0.0,
            kind: Kind::Empty,
        };
        match self {
            SizeDist::PointMass { value } => {
                if region.contains(*value) {
                    ClassLaw {
                        region,
                        prob: 1.0,
                        kind: Kind::Point(*value),
                    }
                } else {
                    empty
                }
            }
            SizeDist::Mixture { atoms } => {
                let inside: Vec<(f64, f64)> = atoms.iter().copied().filter(|(y, _)| region.contains(*y)).collect();
                let prob: f64 = inside.iter().map(|a| a.1).sum();
                if inside.is_empty() || prob == 0.0 {
                    return empty;
                }
                let atoms = inside.into_iter().map(|(y, p)| (y, p / prob)).collect();
                ClassLaw {
                    region,
                    prob,
                    kind: Kind::Atoms(SizeDist::Mixture { atoms }),
                }
            }
            SizeDist::Uniform { lo, hi } => {
                let pieces: Vec<Piece> = region_intervals(region)
                    .into_iter()
                    .map(|(a, b)| (a.max(*lo), b.min(*hi)))
                    .filter(|(a, b)| b > a)
                    .map(|(a, b)| Piece {
                        lo: a,
                        hi: b,
                        mass: (b - a) / (hi - lo),
                    })
                    .collect();
                Self::pieces_law(self, region, pieces)
            }
            SizeDist::Gaussian { mean, sd } => {
                let pieces: Vec<Piece> = region_intervals(region)
                    .into_iter()
                    .filter(|(a, b)| b > a)
                    .map(|(a, b)| Piece {
                        lo: a,
                        hi: b,
                        mass: normal_mass((a - mean) / sd, (b - mean) / sd),
                    })
                    .filter(|p| p.mass > 0.0)
                    .collect();
                Self::pieces_law(self, region, pieces)
            }
        }
    }

    fn pieces_law(base: &SizeDist, region: SizeRegion, pieces: Vec<Piece>) -> ClassLaw {
        let prob: f64 = pieces.iter().map(|p| p.mass).sum();
        if pieces.is_empty() || prob == 0.0 {
            return ClassLaw {
                region,
                prob: 0.0,
                kind: Kind::Empty,
            };
        }
        ClassLaw {
            region,
            prob,
            kind: Kind::Pieces {
                base: base.clone(),
                pieces,
            },
        }
    }
}

impl ClassLaw {
    /// `P(y ∈ class)` under F.
    pub fn prob(&self) -> f64 {
        self.prob
    }

    pub fn region(&self) -> SizeRegion {
        self.region
    }

    pub fn is_empty(&self) -> bool {
        self.kind == Kind::Empty
    }

    /// `E[g(y) | class]`.
    pub fn expect<G: FnMut(f64) -> f64>(&self, base: &SizeDist, g: G) -> f64 {
        if self.prob == 0.0 {
            return 0.0;
        }
        base.expect(self.region, g) / self.prob
    }

    /// Inverse of the class law's distribution function at `Φ(z)`. Positive `z` are mapped from
    /// the upper end so that both tails keep full precision.
    pub fn from_normal(&self, z: f64) -> f64 {
        let y = self.from_normal_closed(z);
        match self.region {
            // Pieces are closed; keep small sizes strictly inside (-a, a).
            SizeRegion::Small(a) if y.abs() >= a => y.signum() * a * (1.0 - f64::EPSILON),
            _ => y,
        }
    }

    fn from_normal_closed(&self, z: f64) -> f64 {
        match &self.kind {
            Kind::Empty => 0.0,
            Kind::Point(v) => *v,
            Kind::Atoms(d) => d.from_normal(z),
            Kind::Pieces { base, pieces } => {
                if z <= 0.0 {
                    let mut left = std_normal_cdf(z) * self.prob;
                    for (i, p) in pieces.iter().enumerate() {
                        if left <= p.mass || i + 1 == pieces.len() {
                            return piece_from_left(base, p, left.min(p.mass));
                        }
                        left -= p.mass;
                    }
                } else {
                    let mut right = std_normal_cdf(-z) * self.prob;
                    for (i, p) in pieces.iter().enumerate().rev() {
                        if right <= p.mass || i == 0 {
                            return piece_from_right(base, p, right.min(p.mass));
                        }
                        right -= p.mass;
                    }
                }
                unreachable!("class law without pieces")
            }
        }
    }

    /// Standard-normal levels where `from_normal` jumps, inside `(-10, 10)`.
    fn normal_breaks(&self) -> Vec<f64> {
        let levels: Vec<f64> = match &self.kind {
            Kind::Empty | Kind::Point(_) => Vec::new(),
            Kind::Atoms(SizeDist::Mixture { atoms }) => {
                let mut cum = 0.0;
                atoms[..atoms.len() - 1]
                    .iter()
                    .map(|&(_, p)| {
                        cum += p;
                        std_normal_quantile(cum)
                    })
                    .collect()
            }
            Kind::Atoms(_) => Vec::new(),
            Kind::Pieces { pieces, .. } => {
                let mut cum = 0.0;
                pieces[..pieces.len() - 1]
                    .iter()
                    .map(|p| {
                        cum += p.mass;
                        std_normal_quantile(cum / self.prob)
                    })
                    .collect()
            }
        };
        let mut b: Vec<f64> = levels.into_iter().filter(|x| x.is_finite() && x.abs() < 10.0).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `E[y₀ y₁]` for `yᵢ = from_normal(ζᵢ)` and standard normals with correlation `r`.
    ///
    /// Conditions on ζ₀: the inner integral over `ζ₁ = rζ₀ + √(1-r²) z` and the outer one are
    /// composite 16-node Gauss–Legendre (panels of width <= 2) on `[-10, 10]`, split where
    /// `from_normal` jumps.
    pub fn copula_moment(&self, base: &SizeDist, r: f64) -> f64 {
        match &self.kind {
            Kind::Empty => return 0.0,
            Kind::Point(v) => return v * v,
            Kind::Atoms(SizeDist::Mixture { atoms }) if r < 1.0 => return mixture_copula_moment(atoms, r),
            _ => {}
        }
        if r >= 1.0 {
            return self.expect(base, |y| y * y);
        }
        let breaks = self.normal_breaks();
        let pieces = |shift: f64, scale: f64| -> Vec<(f64, f64)> {
            let mut edges = vec![-10.0];
            edges.extend(breaks.iter().map(|b| (b - shift) / scale).filter(|z| z.abs() < 10.0));
            edges.push(10.0);
            edges.sort_by(f64::total_cmp);
            edges.windows(2).map(|w| (w[0], w[1])).filter(|(x, y)| y > x).collect()
        };
        let rule = gauss_legendre_16();
        let s = (1.0 - r * r).sqrt();
        let integral = |lo: f64, hi: f64, g: &mut dyn FnMut(f64) -> f64| -> f64 {
            let panels = (0.5 * (hi - lo)).ceil().max(1.0) as usize;
            rule.integrate_panels(lo, hi, panels, |x| Complex64::new(g(x), 0.0)).re
        };
        let mut total = 0.0;
        for (lo, hi) in pieces(0.0, 1.0) {
            total += integral(lo, hi, &mut |x| {
                let inner: f64 = pieces(r * x, s)
                    .into_iter()
                    .map(|(zl, zh)| integral(zl, zh, &mut |z| self.from_normal(r * x + s * z) * std_normal_pdf(z)))
                    .sum();
                self.from_normal(x) * inner * std_normal_pdf(x)
            });
        }
        total
    }
}

/// The point of piece `p` with F-mass `v` to its left.
fn piece_from_left(base: &SizeDist, p: &Piece, v: f64) -> f64 {
    let y = match *base {
        SizeDist::Uniform { lo, hi } => p.lo + (hi - lo) * v,
        SizeDist::Gaussian { mean, sd } => {
            let zl = (p.lo - mean) / sd;
            let c = std_normal_cdf(zl) + v;
            let z = if c <= 0.5 {
                std_normal_quantile(c)
            } else {
                -std_normal_quantile(std_normal_cdf(-zl) - v)
            };
            mean + sd * z
        }
        _ => unreachable!("pieces only cut continuous laws"),
    };
    y.clamp(p.lo, p.hi)
}

/// The point of piece `p` with F-mass `w` to its right.
fn piece_from_right(base: &SizeDist, p: &Piece, w: f64) -> f64 {
    let y = match *base {
        SizeDist::Uniform { lo, hi } => p.hi - (hi - lo) * w,
        SizeDist::Gaussian { mean, sd } => {
            let zh = (p.hi - mean) / sd;
            let s = std_normal_cdf(-zh) + w;
            let z = if s <= 0.5 {
                -std_normal_quantile(s)
            } else {
                std_normal_quantile(std_normal_cdf(zh) - w)
            };
            mean + sd * z
        }
        _ => unreachable!("pieces only cut continuous laws"),
    };
    y.clamp(p.lo, p.hi)
}

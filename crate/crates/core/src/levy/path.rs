use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::size_dist::SizeDist;
use super::triplet::{span, LevyTriplet};
use crate::error::{Error, Result};
use crate::grid::DelayGrid;
use crate::measures::repr::MeasureRepr;
use crate::seed::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpClass {
    Large,
    Small,
}

impl JumpClass {
    pub fn of(size: f64, truncation: f64) -> Self {
        if size.abs() >= truncation {
            JumpClass::Large
        } else {
            JumpClass::Small
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub delay: f64,
    pub size: f64,
    pub class: JumpClass,
}

/// One sampled additive path, anchored at `Z_0 = 0`, kept as its Lévy–Itô parts.
///
/// Node values: `Z = -drift + gaussian + large + small`, with `small` already compensated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub grid: DelayGrid,
    pub truncation: f64,
    pub drift: Vec<f64>,
    pub gaussian: Vec<f64>,
    pub jumps: Vec<JumpRecord>,
    pub large: Vec<f64>,
    pub small: Vec<f64>,
    /// `sign · λ(I_u) ∫_{|y|<a} y F(dy)` per node, already subtracted from `small`.
    pub small_compensator: Vec<f64>,
}

impl PathSample {
    pub fn value(&self, k: usize) -> f64 {
        -self.drift[k] + self.gaussian[k] + self.large[k] + self.small[k]
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|k| self.value(k)).collect()
    }

    /// Deterministic part of the path: drift plus small-jump compensator.
    pub fn compensator(&self, k: usize) -> f64 {
        self.drift[k] + self.small_compensator[k]
    }
}

/// The four node-indexed parts of a path; `-deterministic + gaussian + large + small = Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyItoParts {
    pub deterministic: Vec<f64>,
    pub gaussian: Vec<f64>,
    pub large: Vec<f64>,
    pub small: Vec<f64>,
}

impl LevyItoParts {
    pub fn reconstruct(&self, k: usize) -> f64 {
        -self.deterministic[k] + self.gaussian[k] + self.large[k] + self.small[k]
    }
}

pub fn split_levy_ito(path: &PathSample) -> LevyItoParts {
    LevyItoParts {
        deterministic: path.drift.clone(),
        gaussian: path.gaussian.clone(),
        large: path.large.clone(),
        small: path.small.clone(),
    }
}

/// Draws Poisson points of `intensity` restricted to `[lo, hi)`; delays only, in draw order.
pub(crate) fn poisson_points<R: Rng + ?Sized>(
    intensity: &MeasureRepr,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut points = Vec::new();
    for cell in intensity.cells() {
        let (a, b) = (cell.lo.max(lo), cell.hi.min(hi));
        if b <= a || cell.mass <= 0.0 {
            continue;
        }
        let mass = if a == cell.lo && b == cell.hi {
            cell.mass
        } else {
            cell.mass * ((b - a) / (cell.hi - cell.lo))
        };
        for _ in 0..poisson(mass, rng) {
            let u: f64 = rng.random();
            points.push((a + (b - a) * u).min(b.next_down()));
        }
    }
    for atom in intensity.atoms() {
        if atom.point >= lo && atom.point < hi && atom.mass > 0.0 {
            for _ in 0..poisson(atom.mass, rng) {
                points.push(atom.point);
            }
        }
    }
    points
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-positive or non-finite means, excluded above and by validation.
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

pub(crate) fn sample_size<R: Rng + ?Sized>(dist: &SizeDist, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    dist.from_normal(z)
}

/// Samples the path on `grid`: independent Gaussian increments per cell, Poisson jump delays with
/// intensity λ over the grid span, i.i.d. sizes from F, and the deterministic compensator.
pub fn sample_path(triplet: &LevyTriplet, grid: &DelayGrid, seed: RngSeed) -> Result<PathSample> {
    let (wlo, whi) = triplet.window();
    if grid.first() < wlo || grid.last() > whi {
        return Err(Error::domain(format!(
            "grid [{}, {}] leaves the triplet window [{wlo}, {whi}]",
            grid.first(),
            grid.last()
        )));
    }
    let mut rng = seed.rng();
    let nodes = grid.nodes();
    let n = nodes.len();
    let z0 = grid.zero_index();

    let increments: Vec<f64> = nodes
        .windows(2)
        .map(|w| {
            let z: f64 = StandardNormal.sample(&mut rng);
            triplet.alpha_mass(w[0], w[1]).sqrt() * z
        })
        .collect();
    let mut gaussian = vec![0.0; n];
    for k in z0..n - 1 {
        gaussian[k + 1] = gaussian[k] + increments[k];
    }
    for k in (0..z0).rev() {
        gaussian[k] = gaussian[k + 1] - increments[k];
    }

    let delays = poisson_points(&triplet.jump_intensity, grid.first(), grid.last(), &mut rng);
    let mut jumps: Vec<JumpRecord> = delays
        .into_iter()
        .map(|delay| {
            let size = sample_size(&triplet.jump_size, &mut rng);
            JumpRecord {
                delay,
                size,
                class: JumpClass::of(size, triplet.truncation),
            }
        })
        .collect();
    jumps.sort_by(|a, b| a.delay.total_cmp(&b.delay));

    let small_mean = triplet.jump_size.first_moment(triplet.small());
    let mut large = vec![0.0; n];
    let mut small_raw = vec![0.0; n];
    // Positive side: jumps in [0, u_k).
    let mut next = jumps.partition_point(|j| j.delay < 0.0);
    let (mut acc_l, mut acc_s) = (0.0, 0.0);
    for k in z0..n {
        while next < jumps.len() && jumps[next].delay < nodes[k] {
            match jumps[next].class {
                JumpClass::Large => acc_l += jumps[next].size,
                JumpClass::Small => acc_s += jumps[next].size,
            }
            next += 1;
        }
        large[k] = acc_l;
        small_raw[k] = acc_s;
    }
    // Negative side: minus the jumps in [u_k, 0).
    let mut next = jumps.partition_point(|j| j.delay < 0.0);
    let (mut acc_l, mut acc_s) = (0.0, 0.0);
    for k in (0..z0).rev() {
        while next > 0 && jumps[next - 1].delay >= nodes[k] {
            next -= 1;
            match jumps[next].class {
                JumpClass::Large => acc_l -= jumps[next].size,
                JumpClass::Small => acc_s -= jumps[next].size,
            }
        }
        large[k] = acc_l;
        small_raw[k] = acc_s;
    }

    let mut drift = vec![0.0; n];
    let mut small_compensator = vec![0.0; n];
    let mut small = vec![0.0; n];
    for k in 0..n {
        let (lo, hi, sign) = span(nodes[k]);
        drift[k] = triplet.drift.eval(nodes[k]);
        small_compensator[k] = sign * triplet.lambda_mass(lo, hi) * small_mean;
        small[k] = small_raw[k] - small_compensator[k];
    }

    Ok(PathSample {
        grid: grid.clone(),
        truncation: triplet.truncation,
        drift,
        gaussian,
        jumps,
        large,
        small,
        small_compensator,
    })
}

/// A finite union of closed size intervals whose closure stays away from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSet {
    intervals: Vec<(f64, f64)>,
}

impl SizeSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::domain(format!("[{lo}, {hi}] is not a size interval")));
            }
            if lo <= 0.0 && 0.0 <= hi {
                return Err(Error::domain(format!(
                    "size interval [{lo}, {hi}] touches 0; count sets must stay away from the origin"
                )));
            }
        }
        Ok(SizeSet { intervals })
    }

    pub fn point(y: f64) -> Result<Self> {
        Self::new(vec![(y, y)])
    }

    pub fn contains(&self, y: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= y && y <= hi)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }
}

/// `N(u, B)`: jumps with delay in `(0, u]` (or `[u, 0)` for `u < 0`) and size in `B`.
pub fn count_measure(path: &PathSample, u: f64, sizes: &SizeSet) -> Result<u64> {
    if !u.is_finite() || u < path.grid.first() || u > path.grid.last() {
        return Err(Error::window(format!(
            "delay {u} outside the sampled span [{}, {}]",
            path.grid.first(),
            path.grid.last()
        )));
    }
    let in_span = |d: f64| if u >= 0.0 { d > 0.0 && d <= u } else { d >= u && d < 0.0 };
    Ok(path
        .jumps
        .iter()
        .filter(|j| in_span(j.delay) && sizes.contains(j.size))
        .count() as u64)
}

use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::spec::ChannelSpec;
use crate::error::{Error, Result};
use crate::grid::{DelayGrid, TimeGrid};
use crate::levy::path::poisson_points;
use crate::levy::{ClassLaw, JumpClass};
use crate::numeric::{exact_sum, semidefinite_cholesky};
use crate::seed::RngSeed;

/// The four Lévy–Itô components of the channel: `Y = -Y_d + Y_c + Y_j + Ỹ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    /// `Y_d`, the compensator of the large jumps (enters the channel with a minus sign).
    Deterministic,
    Gaussian,
    LargeJumps,
    /// Compensated small jumps.
    SmallJumps,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Deterministic,
        Component::Gaussian,
        Component::LargeJumps,
        Component::SmallJumps,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Component::Deterministic => "d",
            Component::Gaussian => "c",
            Component::LargeJumps => "j",
            Component::SmallJumps => "small-j",
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        Component::ALL.into_iter().find(|c| c.label() == label)
    }
}

/// A static scatterer: fixed delay, thinning mark, size class, and its size at every time node
/// (`None` where the scatterer is thinned out).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJump {
    pub delay: f64,
    pub mark: f64,
    /// Fixed for the scatterer's lifetime.
    pub class: JumpClass,
    pub sizes: Vec<Option<f64>>,
}

/// One sampled channel, stored as per-(time node, delay cell) increments of each component of the
/// impulse-response field `Y(t, ·)`.
///
/// `view` restricts every accessor to a single component; `None` is the full channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRealization {
    pub tgrid: TimeGrid,
    pub ugrid: DelayGrid,
    pub truncation: f64,
    pub gaussian: Vec<f64>,
    pub large: Vec<f64>,
    pub small: Vec<f64>,
    pub drift: Vec<f64>,
    /// Compensator already subtracted inside `small`, kept for the archive.
    pub small_compensator: Vec<f64>,
    pub jumps: Vec<ChannelJump>,
    pub view: Option<Component>,
}

impl KernelRealization {
    pub fn n_cells(&self) -> usize {
        self.ugrid.len() - 1
    }

    pub fn field(&self, component: Component) -> &[f64] {
        match component {
            Component::Deterministic => &self.drift,
            Component::Gaussian => &self.gaussian,
            Component::LargeJumps => &self.large,
            Component::SmallJumps => &self.small,
        }
    }

    pub fn component_cell(&self, component: Component, ti: usize, k: usize) -> f64 {
        self.field(component)[ti * self.n_cells() + k]
    }

    /// Increment of `Y(t_i, ·)` over delay cell `k` in the current view.
    pub fn cell_increment(&self, ti: usize, k: usize) -> f64 {
        let i = ti * self.n_cells() + k;
        match self.view {
            Some(c) => self.field(c)[i],
            None => -self.drift[i] + self.gaussian[i] + self.large[i] + self.small[i],
        }
    }

    /// Delay cells covering `[a, b)`; both ends must be grid nodes.
    pub fn delay_cells(&self, a: f64, b: f64) -> Result<Range<usize>> {
        if b < a {
            return Err(Error::domain(format!("[{a}, {b}) is not an interval")));
        }
        if a == b {
            return Ok(0..0);
        }
        let lo = self.ugrid.index_of(a)?;
        let hi = self.ugrid.index_of(b)?;
        Ok(lo..hi)
    }

    /// Correctly rounded sum of one component over a cell range.
    pub fn component_sum(&self, component: Component, ti: usize, cells: Range<usize>) -> f64 {
        let row = &self.field(component)[ti * self.n_cells()..(ti + 1) * self.n_cells()];
        exact_sum(row[cells].iter().copied())
    }

    /// `Y(t_i, b) - Y(t_i, a)` in the current view; the full channel combines component sums.
    pub fn y_increment(&self, ti: usize, a: f64, b: f64) -> Result<f64> {
        let cells = self.delay_cells(a, b)?;
        Ok(match self.view {
            Some(c) => self.component_sum(c, ti, cells),
            None => {
                -self.component_sum(Component::Deterministic, ti, cells.clone())
                    + self.component_sum(Component::Gaussian, ti, cells.clone())
                    + self.component_sum(Component::LargeJumps, ti, cells.clone())
                    + self.component_sum(Component::SmallJumps, ti, cells)
            }
        })
    }

    /// `Y(t_i, u)`, anchored at `Y(t_i, 0) = 0`.
    pub fn y_value(&self, ti: usize, u: f64) -> Result<f64> {
        if u >= 0.0 {
            self.y_increment(ti, 0.0, u)
        } else {
            Ok(-self.y_increment(ti, u, 0.0)?)
        }
    }

    pub fn with_view(&self, view: Option<Component>) -> Self {
        KernelRealization {
            view,
            ..self.clone()
        }
    }
}

/// `X(t, b) - X(t, a) = Y(t, t - a) - Y(t, t - b)`: the kernel increment over `[a, b)` at time node `t`.
pub fn kernel_increment(real: &KernelRealization, t: f64, a: f64, b: f64) -> Result<f64> {
    if b < a {
        return Err(Error::domain(format!("[{a}, {b}) is not an interval")));
    }
    let ti = real.tgrid.index_of(t)?;
    if a == b {
        return Ok(0.0);
    }
    real.y_increment(ti, t - b, t - a)
}

/// The four component views `(d, c, j, small-j)`; `-d + c + j + small-j` reproduces the channel.
pub fn component_fields(real: &KernelRealization) -> [KernelRealization; 4] {
    Component::ALL.map(|c| real.with_view(Some(c)))
}

/// Precomputed sampler for one (spec, grids) pair; `sample` is cheap and pure in the seed.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    spec: ChannelSpec,
    tgrid: TimeGrid,
    ugrid: DelayGrid,
    chol_c: Vec<f64>,
    chol_j: Vec<f64>,
    alpha_cells: Vec<f64>,
    lambda_cells: Vec<f64>,
    alpha_scale: Vec<f64>,
    lambda_scale: Vec<f64>,
    mean_large: f64,
    mean_small: f64,
    large_law: ClassLaw,
    small_law: ClassLaw,
}

fn corr_matrix(r: impl Fn(f64) -> f64, t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = if i == j { 1.0 } else { r(t[i] - t[j]) };
        }
    }
    m
}

impl ChannelSampler {
    pub fn new(spec: &ChannelSpec, tgrid: &TimeGrid, ugrid: &DelayGrid) -> Result<Self> {
        let w = spec.window;
        if tgrid.nodes().iter().any(|t| t.abs() > w.t_max) {
            return Err(Error::window(format!("time grid leaves the window [-{0}, {0}]", w.t_max)));
        }
        if ugrid.first() < -w.u_max || ugrid.last() > w.u_max {
            return Err(Error::window(format!("delay grid leaves the window [-{0}, {0}]", w.u_max)));
        }
        if ugrid.len() < 2 {
            return Err(Error::domain("delay grid needs at least one cell"));
        }
        let t = tgrid.nodes();
        let tr = &spec.triplet;
        let cells = ugrid.nodes().windows(2);
        Ok(ChannelSampler {
            chol_c: semidefinite_cholesky(&corr_matrix(|x| spec.time_corr_gaussian.eval(x), t), t.len()),
            chol_j: semidefinite_cholesky(&corr_matrix(|x| spec.time_corr_jump.eval(x), t), t.len()),
            alpha_cells: cells.clone().map(|c| tr.alpha_mass(c[0], c[1])).collect(),
            lambda_cells: cells.map(|c| tr.lambda_mass(c[0], c[1])).collect(),
            alpha_scale: t.iter().map(|&x| spec.alpha_scale(x)).collect(),
            lambda_scale: t.iter().map(|&x| spec.lambda_scale(x)).collect(),
            mean_large: tr.jump_size.first_moment(tr.large()),
            mean_small: tr.jump_size.first_moment(tr.small()),
            large_law: tr.jump_size.class_law(JumpClass::Large, tr.truncation),
            small_law: tr.jump_size.class_law(JumpClass::Small, tr.truncation),
            spec: spec.clone(),
            tgrid: tgrid.clone(),
            ugrid: ugrid.clone(),
        })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn ugrid(&self) -> &DelayGrid {
        &self.ugrid
    }

    /// Stationary unit Gaussian vector over the time nodes with the factor `chol`.
    fn correlated<R: Rng>(chol: &[f64], nt: usize, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..nt).map(|_| StandardNormal.sample(rng)).collect();
        (0..nt)
            .map(|i| (0..=i).map(|k| chol[i * nt + k] * z[k]).sum())
            .collect()
    }

    pub fn sample(&self, seed: RngSeed) -> KernelRealization {
        let mut rng = seed.rng();
        let nt = self.tgrid.len();
        let nc = self.ugrid.len() - 1;
        let tr = &self.spec.triplet;
        let a = tr.truncation;

        let mut gaussian = vec![0.0; nt * nc];
        for k in 0..nc {
            if self.alpha_cells[k] == 0.0 {
                continue;
            }
            let zeta = Self::correlated(&self.chol_c, nt, &mut rng);
            for ti in 0..nt {
                gaussian[ti * nc + k] = (self.alpha_scale[ti] * self.alpha_cells[k]).sqrt() * zeta[ti];
            }
        }

        let delays = poisson_points(&tr.jump_intensity, self.ugrid.first(), self.ugrid.last(), &mut rng);
        let mut jumps: Vec<ChannelJump> = delays
            .into_iter()
            .map(|delay| {
                let mark: f64 = rng.random();
                let coin: f64 = rng.random();
                let (class, law) = if coin < self.large_law.prob() {
                    (JumpClass::Large, &self.large_law)
                } else {
                    (JumpClass::Small, &self.small_law)
                };
                let zeta = Self::correlated(&self.chol_j, nt, &mut rng);
                let sizes = (0..nt)
                    .map(|ti| (mark < self.lambda_scale[ti]).then(|| law.from_normal(zeta[ti])))
                    .collect();
                ChannelJump {
                    delay,
                    mark,
                    class,
                    sizes,
                }
            })
            .collect();
        jumps.sort_by(|x, y| x.delay.total_cmp(&y.delay));

        let mut large = vec![0.0; nt * nc];
        let mut small = vec![0.0; nt * nc];
        let nodes = self.ugrid.nodes();
        for jump in &jumps {
            let k = nodes.partition_point(|&u| u <= jump.delay) - 1;
            for (ti, size) in jump.sizes.iter().enumerate() {
                if let Some(y) = *size {
                    match jump.class {
                        JumpClass::Large => large[ti * nc + k] += y,
                        JumpClass::Small => small[ti * nc + k] += y,
                    }
                }
            }
        }
        let mut drift = vec![0.0; nt * nc];
        let mut small_compensator = vec![0.0; nt * nc];
        for ti in 0..nt {
            for k in 0..nc {
                let i = ti * nc + k;
                let lam = self.lambda_scale[ti] * self.lambda_cells[k];
                drift[i] = lam * self.mean_large;
                small_compensator[i] = lam * self.mean_small;
                small[i] -= small_compensator[i];
            }
        }

        KernelRealization {
            tgrid: self.tgrid.clone(),
            ugrid: self.ugrid.clone(),
            truncation: a,
            gaussian,
            large,
            small,
            drift,
            small_compensator,
            jumps,
            view: None,
        }
    }
}

pub fn sample_channel(
    spec: &ChannelSpec,
    tgrid: &TimeGrid,
    ugrid: &DelayGrid,
    seed: RngSeed,
) -> Result<KernelRealization> {
    Ok(ChannelSampler::new(spec, tgrid, ugrid)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::spec::{ChannelWindow, CorrFn};
    use crate::levy::{LevyTriplet, Profile, SizeDist};
    use crate::measures::repr::MeasureRepr;

    fn spec(rc: CorrFn, rj: CorrFn) -> ChannelSpec {
        let triplet = LevyTriplet::new(
            Profile::Zero,
            Profile::Linear { slope: 0.5 },
            MeasureRepr::uniform(-4.0, 4.0, 1.0).unwrap(),
            SizeDist::mixture(vec![(-1.5, 0.5), (0.25, 0.5)]).unwrap(),
            0.5,
        )
        .unwrap();
        ChannelSpec::new(triplet, rc, rj, None, ChannelWindow { t_max: 1.0, u_max: 4.0 }).unwrap()
    }

    fn grids() -> (TimeGrid, DelayGrid) {
        (TimeGrid::lattice(0.25, -1.0, 1.0).unwrap(), DelayGrid::lattice(0.25, -4.0, 4.0).unwrap())
    }

    #[test]
    fn coherent_channel_is_constant_in_time() {
        let (tg, ug) = grids();
        let real = sample_channel(&spec(CorrFn::Constant, CorrFn::Constant), &tg, &ug, RngSeed::from_u64(3)).unwrap();
        let nc = real.n_cells();
        for ti in 1..tg.len() {
            for k in 0..nc {
                assert_eq!(real.cell_increment(ti, k).to_bits(), real.cell_increment(0, k).to_bits());
            }
        }
        assert!(!real.jumps.is_empty());
    }

    #[test]
    fn views_reconstruct_increments_exactly() {
        let (tg, ug) = grids();
        let real = sample_channel(
            &spec(CorrFn::Exponential { tau: 1.0 }, CorrFn::Gaussian { tau: 0.5 }),
            &tg,
            &ug,
            RngSeed::from_u64(5),
        )
        .unwrap();
        let [d, c, j, s] = component_fields(&real);
        for &t in tg.nodes() {
            for (a, b) in [(-1.0, 0.5), (0.0, 2.0), (1.25, 1.5)] {
                let full = kernel_increment(&real, t, a, b).unwrap();
                let parts = -kernel_increment(&d, t, a, b).unwrap()
                    + kernel_increment(&c, t, a, b).unwrap()
                    + kernel_increment(&j, t, a, b).unwrap()
                    + kernel_increment(&s, t, a, b).unwrap();
                assert_eq!(full.to_bits(), parts.to_bits());
            }
        }
    }

    #[test]
    fn increments_are_additive_over_partitions() {
        let (tg, ug) = grids();
        let real = sample_channel(&spec(CorrFn::Exponential { tau: 1.0 }, CorrFn::Constant), &tg, &ug, RngSeed::from_u64(8))
            .unwrap();
        let whole = kernel_increment(&real, 0.5, -1.0, 2.0).unwrap();
        let parts = kernel_increment(&real, 0.5, -1.0, 0.25).unwrap() + kernel_increment(&real, 0.5, 0.25, 2.0).unwrap();
        assert!((whole - parts).abs() <= 1e-13 * (1.0 + whole.abs()));
        assert_eq!(kernel_increment(&real, 0.5, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn off_grid_requests_are_window_errors() {
        let (tg, ug) = grids();
        let real = sample_channel(&spec(CorrFn::Constant, CorrFn::Constant), &tg, &ug, RngSeed::from_u64(1)).unwrap();
        assert!(matches!(kernel_increment(&real, 0.5, 0.1, 1.0), Err(Error::Window(_))));
        assert!(matches!(kernel_increment(&real, 0.3, 0.0, 1.0), Err(Error::Window(_))));
        assert!(matches!(kernel_increment(&real, 1.0, -3.5, 0.0), Err(Error::Window(_))));
        let tight = DelayGrid::lattice(0.25, -5.0, 5.0).unwrap();
        assert!(sample_channel(&spec(CorrFn::Constant, CorrFn::Constant), &tg, &tight, RngSeed::from_u64(1)).is_err());
    }

    #[test]
    fn zero_channel_has_zero_increments() {
        let triplet = LevyTriplet::new(
            Profile::Zero,
            Profile::Zero,
            MeasureRepr::zero((-4.0, 4.0)).unwrap(),
            SizeDist::point_mass(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let spec = ChannelSpec::new(triplet, CorrFn::Constant, CorrFn::Constant, None, ChannelWindow { t_max: 1.0, u_max: 4.0 })
            .unwrap();
        let (tg, ug) = grids();
        let real = sample_channel(&spec, &tg, &ug, RngSeed::from_u64(2)).unwrap();
        assert_eq!(kernel_increment(&real, 0.0, -2.0, 3.0).unwrap(), 0.0);
    }
}

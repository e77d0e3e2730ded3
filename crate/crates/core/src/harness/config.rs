//! Experiment configuration: a TOML document with nested sections, unknown keys rejected.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, ChannelWindow, CorrFn, TimeModulation};
use crate::error::{Error, Result};
use crate::grid::{DelayGrid, TimeGrid};
use crate::levy::{LevyTriplet, Profile, SizeDist, SizeSet};
use crate::measures::{Atom, Cell, CellUnion, MeasureRepr};
use crate::operator::StepSignal;

use super::registry::SuiteId;

/// Fewest realizations a statistical suite accepts.
pub const MIN_STATISTICAL_REPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub n_reps: usize,
    #[serde(default)]
    pub suites: Vec<String>,
    pub channel: ChannelConfig,
    pub grids: GridConfig,
    /// Output times at which every probe is evaluated.
    pub probe_times: Vec<f64>,
    pub probes: Vec<ProbeConfig>,
    /// Impulse-response delay sets `B` for the correlation-measure checks.
    #[serde(default)]
    pub sets: Vec<SetConfig>,
    #[serde(default)]
    pub checks: ChecksConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub t_max: f64,
    pub u_max: f64,
    pub truncation: f64,
    pub variance: Profile,
    pub jump_intensity: IntensityConfig,
    pub jump_size: SizeDist,
    pub time_corr_gaussian: CorrFn,
    pub time_corr_jump: CorrFn,
    #[serde(default)]
    pub modulation: Option<TimeModulation>,
}

/// Jump intensity λ on `[-u_max, u_max)`: a uniform density, or explicit cells and atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityConfig {
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub cells: Vec<Cell>,
    #[serde(default)]
    pub atoms: Vec<Atom>,
}

/// Uniform grids `[min, max]` with the given node counts; both must contain 0 as a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_nodes: usize,
    pub u_min: f64,
    pub u_max: f64,
    pub u_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub name: String,
    pub breakpoints: Vec<f64>,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub name: String,
    pub intervals: Vec<(f64, f64)>,
}

/// Per-suite knobs; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    /// Characteristic-function nodes, evenly spaced on `[-cf_gamma_max, cf_gamma_max]`.
    pub cf_nodes: usize,
    pub cf_gamma_max: f64,
    pub weak_us_pairs: usize,
    /// Delays at which sampled Lévy paths are compared with the Lévy–Khinchine formula.
    pub levy_delays: Vec<f64>,
    /// Jump-size sets for the Poisson count checks, each a union of closed intervals.
    pub size_sets: Vec<Vec<(f64, f64)>>,
    pub representation_realizations: usize,
    pub representation_cases: usize,
    pub rho_triples: usize,
    pub scattering_nodes: usize,
    /// `(γ, γ̃)` pairs.
    pub scattering_freqs: Vec<(f64, f64)>,
    /// Atoms `(time, weight)` of the output-weight measure ν.
    pub wssus_atoms: Vec<(f64, f64)>,
    pub independence_nodes: usize,
    pub pathwise_realizations: usize,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            cf_nodes: 33,
            cf_gamma_max: 4.0,
            weak_us_pairs: 24,
            levy_delays: vec![-2.0, 1.0, 3.0],
            size_sets: vec![vec![(1.0, 4.0)], vec![(-4.0, -1.0)], vec![(0.25, 0.75)]],
            representation_realizations: 4,
            representation_cases: 100,
            rho_triples: 1000,
            scattering_nodes: 64,
            scattering_freqs: vec![(0.0, 0.0), (0.25, 0.25), (0.5, -0.25)],
            wssus_atoms: vec![(-0.5, 1.0), (0.0, 0.5), (0.75, 2.0)],
            independence_nodes: 9,
            pathwise_realizations: 16,
        }
    }
}

/// A parsed and validated configuration with its derived objects.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub spec: ChannelSpec,
    pub tgrid: TimeGrid,
    pub ugrid: DelayGrid,
    pub probes: Vec<(String, StepSignal)>,
    pub sets: Vec<(String, CellUnion)>,
    pub size_sets: Vec<SizeSet>,
}

impl ExperimentConfig {
    /// Parses TOML; deserialization failures carry the path of the offending field.
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let message = e.into_inner().message().to_string();
            Error::config(if path == "." { "<document>".into() } else { path }, message)
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialize")
    }

    /// Suites to run: the listed ones, or the whole registry when the list is empty.
    pub fn suite_ids(&self) -> Result<Vec<SuiteId>> {
        if self.suites.is_empty() {
            return Ok(SuiteId::ALL.to_vec());
        }
        self.suites
            .iter()
            .enumerate()
            .map(|(i, s)| SuiteId::parse(s).map_err(|_| Error::config(format!("suites[{i}]"), format!("unknown suite id `{s}`"))))
            .collect()
    }

    /// Validates the whole document and builds the channel, grids, probes and sets.
    pub fn build(&self) -> Result<Experiment> {
        self.suite_ids()?;
        let at = |path: &str| {
            let path = path.to_string();
            move |e: Error| Error::config(path.clone(), e.to_string())
        };
        let c = &self.channel;
        let window = (-c.u_max, c.u_max);
        if !(c.u_max.is_finite() && c.u_max > 0.0) {
            return Err(Error::config("channel.u_max", "must be positive"));
        }
        let intensity = match (c.jump_intensity.density, c.jump_intensity.cells.is_empty()) {
            (Some(_), false) => {
                return Err(Error::config("channel.jump_intensity", "give either `density` or `cells`, not both"))
            }
            (Some(d), true) => {
                let cells = if d == 0.0 {
                    Vec::new()
                } else {
                    vec![Cell {
                        lo: -c.u_max,
                        hi: c.u_max,
                        mass: d * 2.0 * c.u_max,
                    }]
                };
                MeasureRepr::positive(cells, c.jump_intensity.atoms.clone(), window)
            }
            (None, _) => MeasureRepr::positive(c.jump_intensity.cells.clone(), c.jump_intensity.atoms.clone(), window),
        }
        .map_err(at("channel.jump_intensity"))?;
        c.jump_size.validate().map_err(at("channel.jump_size"))?;
        let triplet = LevyTriplet::new(Profile::Zero, c.variance.clone(), intensity, c.jump_size.clone(), c.truncation)
            .map_err(at("channel"))?;
        let spec = ChannelSpec::new(
            triplet,
            c.time_corr_gaussian,
            c.time_corr_jump,
            c.modulation.clone(),
            ChannelWindow {
                t_max: c.t_max,
                u_max: c.u_max,
            },
        )
        .map_err(at("channel"))?;

        let g = &self.grids;
        let tgrid = lattice(g.t_min, g.t_max, g.t_nodes, "grids.t")
            .and_then(|step| TimeGrid::lattice(step, g.t_min, g.t_max).map_err(at("grids.t_nodes")))?;
        let ugrid = lattice(g.u_min, g.u_max, g.u_nodes, "grids.u")
            .and_then(|step| DelayGrid::lattice(step, g.u_min, g.u_max).map_err(at("grids.u_nodes")))?;
        if g.t_min < -c.t_max || g.t_max > c.t_max {
            return Err(Error::config("grids.t_max", "time grid leaves the channel window"));
        }
        if g.u_min < -c.u_max || g.u_max > c.u_max {
            return Err(Error::config("grids.u_max", "delay grid leaves the channel window"));
        }
        // Every check set has delay-node endpoints, and the sampler files a jump on a node under the
        // cell to its right. An atom there would sit on a set boundary, where kernel-side and
        // impulse-side half-open conventions disagree.
        for (i, a) in c.jump_intensity.atoms.iter().enumerate() {
            if ugrid.index_of(a.point).is_ok() {
                return Err(Error::config(
                    format!("channel.jump_intensity.atoms[{i}]"),
                    format!("atom at {} lies on a delay-grid node", a.point),
                ));
            }
        }
        if self.n_reps < MIN_STATISTICAL_REPS && self.n_reps != 0 {
            return Err(Error::config(
                "n_reps",
                format!("statistical suites need at least {MIN_STATISTICAL_REPS} realizations"),
            ));
        }

        if self.probe_times.is_empty() {
            return Err(Error::config("probe_times", "needs at least one time"));
        }
        for (i, &t) in self.probe_times.iter().enumerate() {
            tgrid
                .index_of(t)
                .map_err(|e| Error::config(format!("probe_times[{i}]"), e.to_string()))?;
        }
        let mut probes = Vec::with_capacity(self.probes.len());
        for (i, p) in self.probes.iter().enumerate() {
            let path = format!("probes[{i}]");
            let f = StepSignal::new(p.breakpoints.clone(), p.coeffs.clone()).map_err(at(&path))?;
            for &t in &self.probe_times {
                for &b in f.breakpoints() {
                    ugrid.index_of(t - b).map_err(|e| {
                        Error::config(format!("{path}.breakpoints"), format!("at probe time {t}: {e}"))
                    })?;
                }
            }
            probes.push((p.name.clone(), f));
        }
        if probes.is_empty() {
            return Err(Error::config("probes", "needs at least one probe signal"));
        }
        let mut sets = Vec::with_capacity(self.sets.len());
        for (i, s) in self.sets.iter().enumerate() {
            let path = format!("sets[{i}].intervals");
            let set = CellUnion::new(s.intervals.clone()).map_err(at(&path))?;
            for &(a, b) in set.intervals() {
                ugrid.index_of(a).map_err(at(&path))?;
                ugrid.index_of(b).map_err(at(&path))?;
            }
            sets.push((s.name.clone(), set));
        }
        let k = &self.checks;
        if k.cf_nodes < 2 || !(k.cf_gamma_max > 0.0) {
            return Err(Error::config("checks.cf_nodes", "needs at least two nodes on a positive range"));
        }
        for (i, &u) in k.levy_delays.iter().enumerate() {
            ugrid
                .index_of(u)
                .map_err(|e| Error::config(format!("checks.levy_delays[{i}]"), e.to_string()))?;
        }
        let size_sets = k
            .size_sets
            .iter()
            .enumerate()
            .map(|(i, s)| SizeSet::new(s.clone()).map_err(at(&format!("checks.size_sets[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        for (i, &(t, _)) in k.wssus_atoms.iter().enumerate() {
            for (name, f) in &probes {
                for &b in f.breakpoints() {
                    ugrid.index_of(t - b).map_err(|e| {
                        Error::config(format!("checks.wssus_atoms[{i}]"), format!("probe `{name}` at time {t}: {e}"))
                    })?;
                }
            }
        }
        if k.wssus_atoms.len() > 8 {
            return Err(Error::config("checks.wssus_atoms", "at most 8 atoms"));
        }
        for (i, &(t, w)) in k.wssus_atoms.iter().enumerate() {
            let path = format!("checks.wssus_atoms[{i}]");
            tgrid.index_of(t).map_err(at(&path))?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(path, "weights must be non-negative"));
            }
        }
        if k.scattering_nodes < crate::measures::scattering::MIN_SCATTERING_NODES {
            return Err(Error::config("checks.scattering_nodes", "at least 64 nodes per axis"));
        }
        if k.independence_nodes < 2 {
            return Err(Error::config("checks.independence_nodes", "at least two nodes"));
        }
        Ok(Experiment {
            config: self.clone(),
            spec,
            tgrid,
            ugrid,
            probes,
            sets,
            size_sets,
        })
    }
}

/// Step of an `n`-node uniform grid on `[lo, hi]` that has 0 as a node.
fn lattice(lo: f64, hi: f64, n: usize, path: &str) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo <= 0.0 && hi >= 0.0 && hi > lo) {
        return Err(Error::config(format!("{path}_min"), "grid must be a finite interval containing 0"));
    }
    if n < 2 {
        return Err(Error::config(format!("{path}_nodes"), "needs at least two nodes"));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let k = -lo / step;
    if (k - k.round()).abs() > 1e-9 {
        return Err(Error::config(format!("{path}_nodes"), "0 is not a grid node"));
    }
    Ok(step)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
master_seed = 7
n_reps = 1000
probe_times = [0.0, 0.5]

[channel]
t_max = 1.0
u_max = 4.0
truncation = 1.0
variance = { kind = "linear", slope = 1.0 }
jump_intensity = { density = 0.5 }
jump_size = { kind = "gaussian", mean = 0.0, sd = 1.0 }
time_corr_gaussian = { kind = "exponential", tau = 1.0 }
time_corr_jump = { kind = "constant" }

[grids]
t_min = -1.0
t_max = 1.0
t_nodes = 9
u_min = -4.0
u_max = 4.0
u_nodes = 65

[[probes]]
name = "box"
breakpoints = [-0.5, 0.5]
coeffs = [1.0]
"#;

    #[test]
    fn minimal_config_builds() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let exp = cfg.build().unwrap();
        assert_eq!(exp.tgrid.len(), 9);
        assert_eq!(exp.ugrid.len(), 65);
        assert_eq!(cfg.checks, ChecksConfig::default());
        assert_eq!(cfg.suite_ids().unwrap().len(), SuiteId::ALL.len());
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let text = MINIMAL.replace("truncation = 1.0", "truncation = 1.0\ntrunaction = 2.0");
        match ExperimentConfig::from_toml(&text) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "channel.trunaction");
                assert!(message.contains("trunaction"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("sd = 1.0", "sd = \"one\"");
        match ExperimentConfig::from_toml(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "channel.jump_size"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let check = |text: String, expected: &str| match ExperimentConfig::from_toml(&text).unwrap().build() {
            Err(Error::Config { path, .. }) => assert_eq!(path, expected),
            other => panic!("{other:?}"),
        };
        check(MINIMAL.replace("n_reps = 1000", "n_reps = 10"), "n_reps");
        check(MINIMAL.replace("sd = 1.0", "sd = -1.0"), "channel.jump_size");
        check(MINIMAL.replace("[-0.5, 0.5]", "[-0.5, 0.3]"), "probes[0].breakpoints");
        check(MINIMAL.replace("t_nodes = 9", "t_nodes = 4"), "grids.t_nodes");
        check(MINIMAL.replace("probe_times = [0.0, 0.5]", "probe_times = [0.1]"), "probe_times[0]");
        check(MINIMAL.replace("n_reps = 1000", "n_reps = 1000\nsuites = [\"nope\"]"), "suites[0]");
    }
}

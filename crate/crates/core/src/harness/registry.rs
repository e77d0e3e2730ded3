//! The verification suites and the property each one checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    SioIsometry,
    WeakUs,
    CfComponents,
    LevyKhinchine,
    PoissonCounts,
    FubiniSigma,
    EtaSpreading,
    WssusIsometry,
    RhoCs,
    Decomposition,
}

/// What a suite draws its realizations from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Channel,
    Path,
}

impl SuiteId {
    pub const ALL: [SuiteId; 10] = [
        SuiteId::SioIsometry,
        SuiteId::WeakUs,
        SuiteId::CfComponents,
        SuiteId::LevyKhinchine,
        SuiteId::PoissonCounts,
        SuiteId::FubiniSigma,
        SuiteId::EtaSpreading,
        SuiteId::WssusIsometry,
        SuiteId::RhoCs,
        SuiteId::Decomposition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::SioIsometry => "sio-isometry",
            SuiteId::WeakUs => "weak-us",
            SuiteId::CfComponents => "cf-components",
            SuiteId::LevyKhinchine => "levy-khinchine",
            SuiteId::PoissonCounts => "poisson-counts",
            SuiteId::FubiniSigma => "fubini-sigma",
            SuiteId::EtaSpreading => "eta-spreading",
            SuiteId::WssusIsometry => "wssus-isometry",
            SuiteId::RhoCs => "rho-cs",
            SuiteId::Decomposition => "decomposition",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }

    /// The property the suite's rows are evidence for.
    pub fn anchor(self) -> &'static str {
        match self {
            SuiteId::SioIsometry => "E|Hf(t)|^2 equals the integral of |f|^2 against mu_t",
            SuiteId::WeakUs => "outputs of disjointly supported signals are uncorrelated",
            SuiteId::CfComponents => "component outputs follow their closed-form infinitely divisible laws",
            SuiteId::LevyKhinchine => "path marginals have the characteristic exponent of the triplet",
            SuiteId::PoissonCounts => "jump counts are Poisson with intensity lambda_u(B)",
            SuiteId::FubiniSigma => "kernel, impulse-response and Kohn-Nirenberg forms agree",
            SuiteId::EtaSpreading => "the delay-Doppler spreading form reproduces Hf(t)",
            SuiteId::WssusIsometry => "stationary output energy is the L2 norm against mu convolved with nu",
            SuiteId::RhoCs => "rho_{s,t} is a signed measure obeying Cauchy-Schwarz",
            SuiteId::Decomposition => "the channel splits into independent Levy-Ito components",
        }
    }

    pub fn sampler(self) -> Sampler {
        match self {
            SuiteId::LevyKhinchine | SuiteId::PoissonCounts => Sampler::Path,
            _ => Sampler::Channel,
        }
    }
}

impl std::fmt::Display for SuiteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

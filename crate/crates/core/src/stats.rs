//! Monte Carlo estimators with standard errors, empirical characteristic functions, and the
//! tolerance policy used by every verification check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the acceptance band in standard errors.
pub const SIGMA_LEVEL: f64 = 5.0;

/// Where a sample came from, for exact reproduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub master_seed: u64,
    pub experiment: String,
    pub first: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet<T = f64> {
    values: Vec<T>,
    lineage: Lineage,
}

impl<T> SampleSet<T> {
    pub fn new(values: Vec<T>, lineage: Lineage) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("a sample set needs at least one value"));
        }
        Ok(SampleSet { values, lineage })
    }

    /// Sample set without a recorded lineage (ad hoc data, tests).
    pub fn unlabelled(values: Vec<T>) -> Result<Self> {
        let count = values.len() as u64;
        Self::new(
            values,
            Lineage {
                master_seed: 0,
                experiment: String::new(),
                first: 0,
                count,
            },
        )
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn lineage(&self) -> &Lineage {
        &self.lineage
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    /// `(mean - target) / se`, 0 when both the error and the SE vanish.
    pub fn z(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d == 0.0 {
            0.0
        } else {
            d / self.se
        }
    }
}

/// Sample mean and `sd / √n`.
pub fn mean_estimate(x: &[f64]) -> Estimate {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Estimate {
        mean,
        se: (var / n as f64).sqrt(),
        n,
    }
}

/// Unbiased sample variance, with the standard error from the fourth central moment.
pub fn variance_estimate(x: &[f64]) -> Estimate {
    let n = x.len();
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let var = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
    let se = ((m4 - m2 * m2).max(0.0) / nf).sqrt();
    Estimate { mean: var, se, n }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfNode {
    pub gamma: f64,
    pub value: Complex64,
    /// `1/√n`, the standard-error scale of the node.
    pub se_bound: f64,
}

/// `(1/n) Σ e^{iγx_k}` on every node of `gammas`.
pub fn empirical_cf(samples: &SampleSet, gammas: &[f64]) -> Result<Vec<CfNode>> {
    let n = samples.len();
    if n < 100 {
        return Err(Error::domain(format!("empirical characteristic functions need n >= 100, got {n}")));
    }
    Ok(gammas
        .iter()
        .map(|&g| {
            let sum: Complex64 = samples.values().iter().map(|&x| Complex64::from_polar(1.0, g * x)).sum();
            CfNode {
                gamma: g,
                value: sum / n as f64,
                se_bound: 1.0 / (n as f64).sqrt(),
            }
        })
        .collect())
}

/// Tolerance for a characteristic-function node: `5/√n`.
pub fn cf_tolerance(n: usize) -> f64 {
    SIGMA_LEVEL / (n as f64).sqrt()
}

/// `n` evenly spaced nodes on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Sample covariance of paired samples with its delete-one jackknife standard error.
pub fn jackknife_cov(a: &[f64], b: &[f64]) -> Result<Estimate> {
    let n = a.len();
    if n != b.len() || n < 3 {
        return Err(Error::domain("covariance needs two paired samples of length >= 3"));
    }
    let nf = n as f64;
    let ma = a.iter().sum::<f64>() / nf;
    let mb = b.iter().sum::<f64>() / nf;
    let da: Vec<f64> = a.iter().map(|x| x - ma).collect();
    let db: Vec<f64> = b.iter().map(|x| x - mb).collect();
    let sa: f64 = da.iter().sum();
    let sb: f64 = db.iter().sum();
    let sab: f64 = da.iter().zip(&db).map(|(x, y)| x * y).sum();
    let cov = (sab - sa * sb / nf) / (nf - 1.0);
    // Leave-one-out covariances from running sums.
    let m = nf - 1.0;
    let loo: Vec<f64> = (0..n)
        .map(|i| {
            let (sa_i, sb_i) = (sa - da[i], sb - db[i]);
            (sab - da[i] * db[i] - sa_i * sb_i / m) / (m - 1.0)
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let var = (nf - 1.0) / nf * loo.iter().map(|c| (c - loo_mean).powi(2)).sum::<f64>();
    Ok(Estimate {
        mean: cov,
        se: var.sqrt(),
        n,
    })
}

/// Sample covariance divided by its jackknife standard error; exactly 0 if either input is constant.
pub fn cov_zscore(a: &SampleSet, b: &SampleSet) -> Result<f64> {
    let (x, y) = (a.values(), b.values());
    let constant = |v: &[f64]| v.iter().all(|&e| e == v[0]);
    if x.len() != y.len() {
        return Err(Error::domain("covariance needs paired samples of equal length"));
    }
    if constant(x) || constant(y) {
        return Ok(0.0);
    }
    let est = jackknife_cov(x, y)?;
    Ok(est.z(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceCheck {
    pub defect: f64,
    pub threshold: f64,
    pub n: usize,
}

impl IndependenceCheck {
    pub fn passed(&self) -> bool {
        self.defect < self.threshold
    }
}

/// `max |φ̂_{a,b}(γ₁, γ₂) - φ̂_a(γ₁) φ̂_b(γ₂)|` over the product grid, with threshold `3(2/√n + 1/n)`.
pub fn independence_check(a: &SampleSet, b: &SampleSet, gammas: &[f64]) -> Result<IndependenceCheck> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::domain("independence check needs paired samples"));
    }
    let nf = n as f64;
    let ea: Vec<Vec<Complex64>> = gammas
        .iter()
        .map(|&g| a.values().iter().map(|&x| Complex64::from_polar(1.0, g * x)).collect())
        .collect();
    let eb: Vec<Vec<Complex64>> = gammas
        .iter()
        .map(|&g| b.values().iter().map(|&x| Complex64::from_polar(1.0, g * x)).collect())
        .collect();
    let phi_a: Vec<Complex64> = ea.iter().map(|v| v.iter().sum::<Complex64>() / nf).collect();
    let phi_b: Vec<Complex64> = eb.iter().map(|v| v.iter().sum::<Complex64>() / nf).collect();
    let mut defect: f64 = 0.0;
    for (i, va) in ea.iter().enumerate() {
        for (j, vb) in eb.iter().enumerate() {
            let joint: Complex64 = va.iter().zip(vb).map(|(x, y)| x * y).sum::<Complex64>() / nf;
            defect = defect.max((joint - phi_a[i] * phi_b[j]).norm());
        }
    }
    Ok(IndependenceCheck {
        defect,
        threshold: 3.0 * (2.0 / nf.sqrt() + 1.0 / nf),
        n,
    })
}

/// Outcome of one check: `passed ⇔ |statistic - target| <= tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub statistic: f64,
    pub target: f64,
    pub tolerance: f64,
    pub se: f64,
    pub n_reps: usize,
    pub passed: bool,
}

impl Verdict {
    pub fn new(statistic: f64, target: f64, tolerance: f64, se: f64, n_reps: usize) -> Self {
        Verdict {
            statistic,
            target,
            tolerance,
            se,
            n_reps,
            passed: (statistic - target).abs() <= tolerance,
        }
    }

    /// Estimate against a target with the `5·SE` band.
    pub fn within_se(est: Estimate, target: f64) -> Self {
        Self::new(est.mean, target, SIGMA_LEVEL * est.se, est.se, est.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn cf_of_constant_and_at_zero() {
        let s = SampleSet::unlabelled(vec![0.7; 200]).unwrap();
        let cf = empirical_cf(&s, &[0.0, 1.5]).unwrap();
        assert_eq!(cf[0].value, Complex64::new(1.0, 0.0));
        let exact = Complex64::from_polar(1.0, 1.5 * 0.7);
        assert!((cf[1].value - exact).norm() < 1e-14);
        assert!(empirical_cf(&SampleSet::unlabelled(vec![0.0; 99]).unwrap(), &[1.0]).is_err());
    }

    #[test]
    fn cf_of_normal_samples() {
        let n = 100_000;
        let s = SampleSet::unlabelled(normals(1, n)).unwrap();
        let cf = empirical_cf(&s, &[1.0]).unwrap();
        assert!((cf[0].value - Complex64::new((-0.5f64).exp(), 0.0)).norm() < cf_tolerance(n));
        assert!(cf[0].value.norm() <= 1.0);
    }

    #[test]
    fn covariance_z_scores() {
        let a = SampleSet::unlabelled(normals(2, 20_000)).unwrap();
        let b = SampleSet::unlabelled(normals(3, 20_000)).unwrap();
        assert!(cov_zscore(&a, &a).unwrap() > 10.0);
        assert!(cov_zscore(&a, &b).unwrap().abs() < 4.0);
        let c = SampleSet::unlabelled(vec![0.1; 20_000]).unwrap();
        assert_eq!(cov_zscore(&a, &c).unwrap(), 0.0);
    }

    #[test]
    fn jackknife_matches_delta_method_for_independent_normals() {
        // For independent standard normals, SE(cov) ≈ 1/√n.
        let n = 40_000;
        let est = jackknife_cov(&normals(4, n), &normals(5, n)).unwrap();
        assert!((est.se * (n as f64).sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn independence_defect() {
        let n = 20_000;
        let a = SampleSet::unlabelled(normals(6, n)).unwrap();
        let b = SampleSet::unlabelled(normals(7, n)).unwrap();
        let grid = linspace(-2.0, 2.0, 5);
        let indep = independence_check(&a, &b, &grid).unwrap();
        assert!(indep.passed(), "{indep:?}");
        let same = independence_check(&a, &a, &grid).unwrap();
        assert!(!same.passed());
        // |φ(2γ) - φ(γ)²| at γ = 1 for a standard normal.
        assert!(same.defect > (-0.5f64).exp().powi(2) - (-2.0f64).exp() - 0.02);
        let big = 4 * n;
        let a4 = SampleSet::unlabelled(normals(8, big)).unwrap();
        let b4 = SampleSet::unlabelled(normals(9, big)).unwrap();
        let indep4 = independence_check(&a4, &b4, &grid).unwrap();
        assert!(indep4.defect < indep.defect);
    }

    #[test]
    fn variance_estimate_of_normals() {
        let est = variance_estimate(&normals(10, 100_000));
        assert!((est.mean - 1.0).abs() < SIGMA_LEVEL * est.se);
        // SE of the variance for a normal is √(2/n).
        assert!((est.se / (2.0f64 / 100_000.0).sqrt() - 1.0).abs() < 0.05);
        assert!(Verdict::new(1.0, 1.05, 0.1, 0.0, 1).passed);
        assert!(!Verdict::new(1.0, 1.2, 0.1, 0.0, 1).passed);
    }
}

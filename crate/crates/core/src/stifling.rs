//! The stifling-experience law `R`: how many stifling experiences a freshly
//! informed individual tolerates before it stops spreading.
//!
//! Every family is represented by [`StiflingDistribution`], an immutable value
//! holding its moments and a cumulative table for inverse-transform sampling.
//! Draws that land beyond the table fall through to a family-specific exact
//! tail sampler, so unbounded laws are sampled without truncation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest value a draw may take. Heavy-tailed draws are clamped here so that
/// sums of many draws still fit into a `u64`.
pub const SAMPLE_CAP: u64 = 1 << 62;

const TABLE_MASS: f64 = 1.0 - 1e-13;
const TABLE_LEN_CAP: usize = 1 << 16;
const EXPLICIT_NORMALIZE_TOL: f64 = 1e-9;

/// Parametric family (or explicit table) behind a [`StiflingDistribution`].
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `R = kappa` almost surely.
    Constant(u64),
    /// `P(R = i) = p (1-p)^(i-1)` for `i >= 1`.
    Geometric(f64),
    /// `R ~ Poisson(lambda)`.
    Poisson(f64),
    /// Finite table; entry `i` is `P(R = i)`.
    Explicit(Vec<f64>),
    /// `P(R = i) = i^(-s) / zeta(s)` for `i >= 1`.
    ZetaTail(f64),
}

#[derive(Debug, Clone)]
pub struct StiflingDistribution {
    family: Family,
    mean: f64,
    variance: f64,
    /// `cdf[i] = P(R <= i)`.
    cdf: Vec<f64>,
    zeta_norm: f64,
}

impl StiflingDistribution {
    pub fn constant(kappa: u64) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::Distribution(
                "constant stifling count must be positive (mean must exceed 0)".into(),
            ));
        }
        Ok(Self::build(Family::Constant(kappa)))
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Distribution(format!(
                "geometric success probability must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self::build(Family::Geometric(p)))
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Distribution(format!(
                "poisson rate must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self::build(Family::Poisson(lambda)))
    }

    pub fn zeta(s: f64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::Distribution(format!(
                "zeta exponent must exceed 1, got {s}"
            )));
        }
        Ok(Self::build(Family::ZetaTail(s)))
    }

    /// Builds an explicit law from `(value, probability)` pairs.
    ///
    /// Repeated values accumulate. A total within 1e-9 of one is renormalized;
    /// anything further off is rejected, as is a law with zero mean.
    pub fn explicit<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut pmf: Vec<f64> = Vec::new();
        for (i, p) in entries {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::Distribution(format!(
                    "probability for value {i} must lie in [0, 1], got {p}"
                )));
            }
            let i = usize::try_from(i)
                .ok()
                .filter(|&i| i < (1 << 24))
                .ok_or_else(|| Error::Distribution(format!("support value {i} too large")))?;
            if pmf.len() <= i {
                pmf.resize(i + 1, 0.0);
            }
            pmf[i] += p;
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > EXPLICIT_NORMALIZE_TOL {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        for p in &mut pmf {
            *p /= total;
        }
        while pmf.len() > 1 && pmf.last() == Some(&0.0) {
            pmf.pop();
        }
        if pmf.iter().skip(1).all(|&p| p == 0.0) {
            return Err(Error::Distribution(
                "law puts all mass on 0, so its mean is 0".into(),
            ));
        }
        Ok(Self::build(Family::Explicit(pmf)))
    }

    fn build(family: Family) -> Self {
        let zeta_norm = match family {
            Family::ZetaTail(s) => hurwitz_zeta(s, 1),
            _ => 1.0,
        };
        let (mean, variance) = match &family {
            Family::Constant(k) => (*k as f64, 0.0),
            Family::Geometric(p) => (1.0 / p, (1.0 - p) / (p * p)),
            Family::Poisson(l) => (*l, *l),
            Family::Explicit(pmf) => {
                let mean: f64 = pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
                let second: f64 = pmf
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i as f64 - mean).powi(2) * p)
                    .sum();
                (mean, second)
            }
            Family::ZetaTail(s) => {
                let mean = if *s > 2.0 {
                    hurwitz_zeta(s - 1.0, 1) / zeta_norm
                } else {
                    f64::INFINITY
                };
                let variance = if *s > 3.0 {
                    hurwitz_zeta(s - 2.0, 1) / zeta_norm - mean * mean
                } else {
                    f64::INFINITY
                };
                (mean, variance)
            }
        };
        let mut dist = Self {
            family,
            mean,
            variance,
            cdf: Vec::new(),
            zeta_norm,
        };
        dist.cdf = dist.build_table();
        dist
    }

    fn build_table(&self) -> Vec<f64> {
        let mut cdf = Vec::new();
        match &self.family {
            Family::Explicit(pmf) => {
                let mut acc = 0.0;
                for p in pmf {
                    acc += p;
                    cdf.push(acc);
                }
                *cdf.last_mut().unwrap() = 1.0;
            }
            Family::Constant(k) => {
                cdf.resize(*k as usize, 0.0);
                cdf.push(1.0);
            }
            Family::Poisson(l) => {
                // log-space recurrence: ln p_i = ln p_{i-1} + ln(lambda) - ln(i)
                let ln_l = l.ln();
                let mut ln_p = -l;
                let mut acc = 0.0;
                for i in 0..TABLE_LEN_CAP {
                    if i > 0 {
                        ln_p += ln_l - (i as f64).ln();
                    }
                    acc += ln_p.exp();
                    cdf.push(acc);
                    if acc >= TABLE_MASS && i as f64 > *l {
                        break;
                    }
                }
            }
            _ => {
                let mut acc = 0.0;
                for i in 0..TABLE_LEN_CAP {
                    acc += self.pmf(i as u64);
                    cdf.push(acc);
                    if acc >= TABLE_MASS {
                        break;
                    }
                }
            }
        }
        cdf
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `P(R = i)`; zero outside the support.
    pub fn pmf(&self, i: u64) -> f64 {
        match &self.family {
            Family::Constant(k) => (i == *k) as u8 as f64,
            Family::Geometric(p) => {
                if i == 0 {
                    0.0
                } else {
                    p * (1.0 - p).powf((i - 1) as f64)
                }
            }
            Family::Poisson(l) => {
                let i = i as f64;
                (i * l.ln() - l - ln_gamma(i + 1.0)).exp()
            }
            Family::Explicit(pmf) => pmf.get(i as usize).copied().unwrap_or(0.0),
            Family::ZetaTail(s) => {
                if i == 0 {
                    0.0
                } else {
                    (i as f64).powf(-s) / self.zeta_norm
                }
            }
        }
    }

    /// `P(R >= i)`.
    pub fn survival(&self, i: u64) -> f64 {
        if i == 0 {
            return 1.0;
        }
        match &self.family {
            Family::Constant(k) => (i <= *k) as u8 as f64,
            Family::Geometric(p) => (1.0 - p).powf((i - 1) as f64),
            Family::ZetaTail(s) => hurwitz_zeta(*s, i) / self.zeta_norm,
            Family::Explicit(pmf) => pmf.iter().skip(i as usize).sum(),
            Family::Poisson(l) => {
                if (i as f64) > *l {
                    // sum the upper tail directly; terms decay geometrically
                    let mut term = self.pmf(i);
                    let mut acc = 0.0;
                    let mut j = i as f64;
                    while term > acc * 1e-17 && term > 0.0 {
                        acc += term;
                        j += 1.0;
                        term *= l / j;
                    }
                    acc
                } else {
                    let lower: f64 = (0..i).map(|j| self.pmf(j)).sum();
                    (1.0 - lower).max(0.0)
                }
            }
        }
    }

    /// `E[R]`, possibly infinite.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `Var[R]`, possibly infinite.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `(E[R], Var[R])`.
    pub fn moments(&self) -> (f64, f64) {
        (self.mean, self.variance)
    }

    /// Largest value with positive mass, when the support is bounded.
    pub fn max_support(&self) -> Option<u64> {
        match &self.family {
            Family::Constant(k) => Some(*k),
            Family::Explicit(pmf) => Some(pmf.len() as u64 - 1),
            _ => None,
        }
    }

    /// Inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if let Family::Constant(k) = self.family {
            return k;
        }
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        if idx < self.cdf.len() {
            return idx as u64;
        }
        self.sample_beyond_table(u, rng)
    }

    /// Draw conditioned on `R >= 1`.
    pub fn sample_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        loop {
            let r = self.sample(rng);
            if r >= 1 {
                return r;
            }
        }
    }

    fn sample_beyond_table<R: Rng + ?Sized>(&self, u: f64, rng: &mut R) -> u64 {
        let start = self.cdf.len() as u64;
        match &self.family {
            Family::Geometric(p) => {
                // memoryless: R - start is the failure count of a fresh geometric
                let extra = Geometric::new(*p).expect("p in (0,1]").sample(rng);
                start.saturating_add(extra).min(SAMPLE_CAP)
            }
            Family::Poisson(l) => {
                let mut acc = *self.cdf.last().unwrap();
                let mut term = self.pmf(start - 1);
                let mut i = start;
                loop {
                    term *= l / i as f64;
                    acc += term;
                    if u < acc || term == 0.0 {
                        return i;
                    }
                    i += 1;
                }
            }
            Family::ZetaTail(s) => sample_zeta_tail(*s, start, rng),
            // tables for bounded laws always end at cumulative mass 1
            Family::Constant(k) => *k,
            Family::Explicit(pmf) => pmf.len() as u64 - 1,
        }
    }

    /// The law of `min(R, k)`: mass beyond `k` folded onto `k`.
    pub fn truncate(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Distribution("truncation level must be positive".into()));
        }
        let mut entries: Vec<(u64, f64)> = (0..k).map(|i| (i, self.pmf(i))).collect();
        entries.push((k, self.survival(k)));
        Self::explicit(entries)
    }

    /// Checks `P(self >= i) <= P(other >= i)` for `1 <= i <= horizon`.
    ///
    /// Returns the first violating index, if any.
    pub fn stochastic_order_violation(&self, other: &Self, horizon: u64) -> Option<u64> {
        (1..=horizon).find(|&i| self.survival(i) > other.survival(i) + 1e-12)
    }

    /// Horizon over which survival functions need comparing: the larger
    /// bounded support, or a fixed window for unbounded laws.
    pub fn comparison_horizon(&self, other: &Self) -> u64 {
        match (self.max_support(), other.max_support()) {
            (Some(a), Some(b)) => a.max(b),
            _ => 4096,
        }
    }
}

impl PartialEq for StiflingDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

/// Exact draw from `P(R = i) ∝ i^(-s)`, `i >= start`, by rejection from a
/// floored Pareto proposal.
fn sample_zeta_tail<R: Rng + ?Sized>(s: f64, start: u64, rng: &mut R) -> u64 {
    let start_f = start as f64;
    let bound = (1.0 + 1.0 / start_f).powf(s);
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let y = start_f * u.powf(-1.0 / (s - 1.0));
        if y >= SAMPLE_CAP as f64 {
            return SAMPLE_CAP;
        }
        let i = y.floor();
        // target / proposal, up to constants: (s-1) / (i (1 - (1 + 1/i)^(1-s)))
        let gap = -((1.0 - s) * (1.0 / i).ln_1p()).exp_m1();
        let ratio = (s - 1.0) / (i * gap);
        let v: f64 = rng.random();
        if v * bound <= ratio {
            return i as u64;
        }
    }
}

/// Hurwitz zeta `sum_{i >= a} i^(-s)` for integer `a >= 1` and `s > 1`,
/// via Euler-Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: u64) -> f64 {
    const DIRECT: u64 = 32;
    // B_{2k} / (2k)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum = 0.0;
    for i in a..a + DIRECT {
        sum += (i as f64).powf(-s);
    }
    let n = (a + DIRECT) as f64;
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s (s+1) ... (s+2k-2) times n^(-s-2k+1)
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * power;
        let m = 2.0 * k as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= n * n;
    }
    sum
}

impl fmt::Display for StiflingDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Constant(k) => write!(f, "constant:{k}"),
            Family::Geometric(p) => write!(f, "geometric:{p}"),
            Family::Poisson(l) => write!(f, "poisson:{l}"),
            Family::ZetaTail(s) => write!(f, "zeta:{s}"),
            Family::Explicit(pmf) => {
                write!(f, "pmf:")?;
                let mut first = true;
                for (i, p) in pmf.iter().enumerate().filter(|(_, &p)| p > 0.0) {
                    if !first {
                        write!(f, ",")?;
                    }
                    first = false;
                    write!(f, "{i}={p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for StiflingDistribution {
    type Err = Error;

    /// Parses `constant:K`, `geometric:P`, `poisson:L`, `zeta:S` or
    /// `pmf:0=0.1,1=0.4,2=0.5`.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: String| Error::DistributionSpec {
            spec: spec.to_string(),
            reason,
        };
        let (kind, arg) = spec.trim().split_once(':').ok_or_else(|| {
            bad("expected `family:parameter` (constant, geometric, poisson, zeta, pmf)".into())
        })?;
        let real = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("`{s}` is not a number ({e})")))
        };
        let dist = match kind.trim().to_ascii_lowercase().as_str() {
            "constant" | "kappa" => {
                let k = arg
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| bad(format!("`{arg}` is not a nonnegative integer ({e})")))?;
                Self::constant(k)
            }
            "geometric" => Self::geometric(real(arg)?),
            "poisson" => Self::poisson(real(arg)?),
            "zeta" => Self::zeta(real(arg)?),
            "pmf" => {
                let mut entries = Vec::new();
                for item in arg.split(',').filter(|s| !s.trim().is_empty()) {
                    let (i, p) = item
                        .split_once('=')
                        .ok_or_else(|| bad(format!("pmf entry `{item}` is not `value=prob`")))?;
                    let i = i
                        .trim()
                        .parse::<u64>()
                        .map_err(|e| bad(format!("pmf value `{i}` is not an integer ({e})")))?;
                    entries.push((i, real(p)?));
                }
                if entries.is_empty() {
                    return Err(bad("pmf has no entries".into()));
                }
                Self::explicit(entries)
            }
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        dist.map_err(|e| bad(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_families() -> Vec<StiflingDistribution> {
        vec![
            StiflingDistribution::constant(1).unwrap(),
            StiflingDistribution::constant(3).unwrap(),
            StiflingDistribution::geometric(0.5).unwrap(),
            StiflingDistribution::geometric(0.1).unwrap(),
            StiflingDistribution::poisson(1.1).unwrap(),
            StiflingDistribution::poisson(40.0).unwrap(),
            StiflingDistribution::zeta(1.5).unwrap(),
            StiflingDistribution::zeta(3.5).unwrap(),
            "pmf:0=0.1,1=0.4,2=0.5".parse().unwrap(),
        ]
    }

    #[test]
    fn pmf_examples() {
        let c2 = StiflingDistribution::constant(2).unwrap();
        assert_eq!(c2.pmf(2), 1.0);
        assert_eq!(c2.pmf(1), 0.0);
        let g = StiflingDistribution::geometric(0.5).unwrap();
        assert!((g.pmf(3) - 0.125).abs() < 1e-15);
        assert_eq!(g.pmf(0), 0.0);
        let p = StiflingDistribution::poisson(1.1).unwrap();
        assert!((p.pmf(0) - (-1.1f64).exp()).abs() < 1e-15);
        assert!((p.pmf(0) - 0.3329).abs() < 1e-4);
    }

    #[test]
    fn moment_examples() {
        assert_eq!(StiflingDistribution::constant(3).unwrap().moments(), (3.0, 0.0));
        assert_eq!(StiflingDistribution::geometric(0.5).unwrap().moments(), (2.0, 2.0));
        let (m, v) = StiflingDistribution::zeta(1.5).unwrap().moments();
        assert!(m.is_infinite() && v.is_infinite());
        let (m, v) = StiflingDistribution::zeta(2.5).unwrap().moments();
        assert!(m.is_finite() && v.is_infinite());
        let (m, v) = StiflingDistribution::poisson(0.7).unwrap().moments();
        assert_eq!((m, v), (0.7, 0.7));
    }

    #[test]
    fn zeta_moments_match_direct_sums() {
        let d = StiflingDistribution::zeta(4.5).unwrap();
        let (mut m1, mut m2) = (0.0, 0.0);
        for i in 1..2_000_000u64 {
            let p = d.pmf(i);
            m1 += i as f64 * p;
            m2 += (i as f64).powi(2) * p;
        }
        assert!((d.mean() - m1).abs() < 1e-8);
        assert!((d.variance() - (m2 - m1 * m1)).abs() < 1e-5);
    }

    #[test]
    fn hurwitz_zeta_known_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1) - pi2_6).abs() < 1e-14);
        assert!((hurwitz_zeta(1.5, 1) - 2.612_375_348_685_488).abs() < 1e-13);
        assert!((hurwitz_zeta(2.0, 3) - (pi2_6 - 1.25)).abs() < 1e-14);
    }

    #[test]
    fn pmfs_sum_to_one() {
        for d in all_families() {
            let total: f64 = match d.family() {
                Family::ZetaTail(s) => {
                    // finite part plus analytic tail
                    let k = 10_000;
                    (0..k).map(|i| d.pmf(i)).sum::<f64>() + hurwitz_zeta(*s, k) / hurwitz_zeta(*s, 1)
                }
                _ => (0..5_000).map(|i| d.pmf(i)).sum(),
            };
            assert!((total - 1.0).abs() < 1e-12, "{d}: {total}");
        }
    }

    #[test]
    fn explicit_validation() {
        assert!(StiflingDistribution::explicit([(0, 1.0)]).is_err());
        assert!(StiflingDistribution::explicit([(1, 0.5), (2, 0.4)]).is_err());
        assert!(StiflingDistribution::explicit([(1, -0.1), (2, 1.1)]).is_err());
        let d = StiflingDistribution::explicit([(1, 0.5), (2, 0.5 + 5e-10)]).unwrap();
        assert!(((0..3).map(|i| d.pmf(i)).sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(StiflingDistribution::constant(0).is_err());
        assert!(StiflingDistribution::geometric(0.0).is_err());
        assert!(StiflingDistribution::geometric(1.5).is_err());
        assert!(StiflingDistribution::poisson(-1.0).is_err());
        assert!(StiflingDistribution::zeta(1.0).is_err());
    }

    #[test]
    fn parse_specs() {
        let d: StiflingDistribution = "constant:2".parse().unwrap();
        assert_eq!(d, StiflingDistribution::constant(2).unwrap());
        let d: StiflingDistribution = "pmf:0=0.1,1=0.4,2=0.5".parse().unwrap();
        assert!((d.mean() - 1.4).abs() < 1e-15);
        assert_eq!(d.to_string(), "pmf:0=0.1,1=0.4,2=0.5");
        for bad in ["", "constant", "constant:x", "weibull:2", "pmf:0=1.0", "pmf:1", "geometric:2"] {
            assert!(bad.parse::<StiflingDistribution>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sample_constant_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(StiflingDistribution::constant(2).unwrap().sample(&mut rng), 2);
        let g = StiflingDistribution::geometric(0.5).unwrap();
        let a: Vec<u64> = {
            let mut r = ChaCha8Rng::seed_from_u64(99);
            (0..20).map(|_| g.sample(&mut r)).collect()
        };
        let b: Vec<u64> = {
            let mut r = ChaCha8Rng::seed_from_u64(99);
            (0..20).map(|_| g.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_means_within_four_standard_errors() {
        let n = 1_000_000;
        for d in all_families() {
            if !d.variance().is_finite() {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let sum: f64 = (0..n).map(|_| d.sample(&mut rng) as f64).sum();
            let mean = sum / n as f64;
            let se = (d.variance() / n as f64).sqrt();
            assert!(
                (mean - d.mean()).abs() <= 4.0 * se + 1e-12,
                "{d}: {mean} vs {}",
                d.mean()
            );
        }
    }

    #[test]
    fn zeta_tail_sampler_matches_survival() {
        // frequencies of R >= k for k far beyond the sampling table
        let d = StiflingDistribution::zeta(1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 400_000;
        let draws: Vec<u64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        for k in [2u64, 10, 1000, 1 << 17, 1 << 20] {
            let freq = draws.iter().filter(|&&r| r >= k).count() as f64 / n as f64;
            let p = d.survival(k);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.5 * se, "k={k}: {freq} vs {p}");
        }
        let direct = sample_zeta_tail(1.5, 100, &mut rng);
        assert!(direct >= 100);
    }

    #[test]
    fn truncate_examples() {
        let c2 = StiflingDistribution::constant(2).unwrap().truncate(5).unwrap();
        assert_eq!(c2.pmf(2), 1.0);
        assert_eq!(c2.max_support(), Some(2));
        let g = StiflingDistribution::geometric(0.5).unwrap();
        let t1 = g.truncate(1).unwrap();
        assert_eq!(t1.pmf(1), 1.0);
        let t2 = g.truncate(2).unwrap();
        assert!((t2.pmf(1) - 0.5).abs() < 1e-15);
        assert!((t2.pmf(2) - 0.5).abs() < 1e-15);
        assert!(g.truncate(0).is_err());
    }

    #[test]
    fn truncation_is_stochastically_smaller_and_mean_converges() {
        for d in all_families() {
            let mut last = 0.0;
            for k in [1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89] {
                let t = d.truncate(k).unwrap();
                for i in 1..=200 {
                    assert!(t.survival(i) <= d.survival(i) + 1e-12, "{d} k={k} i={i}");
                }
                assert!(t.mean() >= last - 1e-12);
                last = t.mean();
            }
            if d.mean().is_finite() {
                let t = d.truncate(100_000).unwrap();
                assert!((t.mean() - d.mean()).abs() < 1e-6, "{d}");
            } else {
                let small = d.truncate(1_000).unwrap().mean();
                assert!(d.truncate(100_000).unwrap().mean() > 5.0 * small);
            }
        }
    }

    #[test]
    fn stochastic_order_check() {
        let c1 = StiflingDistribution::constant(1).unwrap();
        let c2 = StiflingDistribution::constant(2).unwrap();
        let h = c1.comparison_horizon(&c2);
        assert_eq!(c1.stochastic_order_violation(&c2, h), None);
        assert_eq!(c2.stochastic_order_violation(&c1, h), Some(2));
    }
}

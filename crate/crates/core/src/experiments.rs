//! Monte Carlo checks of the limit theorems.
//!
//! Every experiment runs `M` independent replicas of the reduced engine in
//! parallel. Replica `r` always uses random stream `r` of the master seed and
//! results are folded in replica order, so a report depends only on its
//! inputs and not on the number of threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, Sigma2};
use crate::error::{Error, Result};
use crate::sim::{run_reduced_replica, Scenario, SimulationOutcome};
use crate::stats::{ks_critical_001, ks_distance_normal, mean_variance, std_error};
use crate::stifling::StiflingDistribution;

/// Pass/fail thresholds. The defaults are empirical choices: the limit
/// theorems give no finite-N rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Standard errors allowed before a mean is declared off target.
    pub std_errors: f64,
    /// LLN floor `c / sqrt(N)`.
    pub lln_floor: f64,
    /// Relative band for the CLT sample variance.
    pub clt_variance_rel: f64,
    /// Multiplier on the level-0.01 KS critical value.
    pub ks_slack: f64,
    /// Absolute floor for transitions per capita.
    pub transitions_floor: f64,
    /// Largest admissible estimate at the largest N when mu is infinite.
    pub mu_infinity_final: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            std_errors: 3.0,
            lln_floor: 2.0,
            clt_variance_rel: 0.15,
            ks_slack: 1.5,
            transitions_floor: 0.02,
            mu_infinity_final: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub experiment: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub replicas: u64,
    pub seed: u64,
    pub dist: String,
    pub target: f64,
    pub estimate: f64,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardized_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_band: Option<f64>,
    #[serde(skip)]
    pub standardized_samples: Option<Vec<f64>>,
    pub pass: bool,
    pub criterion: String,
}

impl MonteCarloReport {
    /// `sqrt(N)(X_r/N - x_inf)` per replica, one value per line.
    pub fn standardized_csv(&self) -> Option<String> {
        self.standardized_samples.as_ref().map(|s| {
            let mut out = String::from("replica,standardized\n");
            for (r, v) in s.iter().enumerate() {
                out.push_str(&format!("{r},{v}\n"));
            }
            out
        })
    }
}

/// Runs replicas `first..first + m` of the reduced engine, in replica order.
pub fn simulate_replicas(
    scenario: &Scenario,
    m: u64,
    seed: u64,
    first: u64,
) -> Result<Vec<SimulationOutcome>> {
    (first..first + m)
        .into_par_iter()
        .map(|r| run_reduced_replica(scenario, seed, r))
        .collect()
}

fn final_fractions(outcomes: &[SimulationOutcome]) -> Vec<f64> {
    outcomes
        .iter()
        .map(|o| o.final_ignorants as f64 / o.n as f64)
        .collect()
}

fn check_replicas(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::Config("M must be at least 1".into()));
    }
    Ok(())
}

/// Law of large numbers: mean final ignorant fraction against `x_inf`.
pub fn mc_lln(scenario: &Scenario, m: u64, seed: u64, tol: &Tolerances) -> Result<MonteCarloReport> {
    check_replicas(m)?;
    let mu = scenario.dist.mean();
    if !mu.is_finite() {
        return Err(Error::Domain("the law of large numbers check needs a finite mean".into()));
    }
    let target = analytic::limit_fraction(mu, scenario.ic.x0(), scenario.ic.w0())?;
    let fractions = final_fractions(&simulate_replicas(scenario, m, seed, 0)?);
    let (estimate, _) = mean_variance(&fractions);
    let se = std_error(&fractions);
    let band = (tol.std_errors * se).max(tol.lln_floor / (scenario.n as f64).sqrt());
    Ok(MonteCarloReport {
        experiment: "lln".into(),
        n: scenario.n,
        replicas: m,
        seed,
        dist: scenario.dist.to_string(),
        target,
        estimate,
        std_error: se,
        sample_variance: None,
        standardized_mean: None,
        ks_distance: None,
        ks_band: None,
        standardized_samples: None,
        pass: (estimate - target).abs() <= band,
        criterion: format!(
            "|mean(X/N) - x_inf| <= max({} SE, {}/sqrt(N)) = {band:.3e}",
            tol.std_errors, tol.lln_floor
        ),
    })
}

/// Central limit theorem: variance and KS distance of the standardized
/// final fractions against `Normal(0, sigma2)`.
pub fn mc_clt(scenario: &Scenario, m: u64, seed: u64, tol: &Tolerances) -> Result<MonteCarloReport> {
    check_replicas(m)?;
    let (mu, nu2) = scenario.dist.moments();
    let (x0, w0) = (scenario.ic.x0(), scenario.ic.w0());
    if !mu.is_finite() {
        return Err(Error::InfiniteVariance);
    }
    let sigma2 = match analytic::clt_variance(mu, nu2, x0, w0)? {
        Sigma2::Value(v) => v,
        Sigma2::HypothesesViolated => return Err(Error::CltHypotheses),
    };
    let x_inf = analytic::limit_fraction(mu, x0, w0)?;
    let root_n = (scenario.n as f64).sqrt();
    let standardized: Vec<f64> = final_fractions(&simulate_replicas(scenario, m, seed, 0)?)
        .into_iter()
        .map(|f| root_n * (f - x_inf))
        .collect();
    let (z_mean, variance) = mean_variance(&standardized);
    let ks = ks_distance_normal(&standardized, sigma2);
    let ks_band = tol.ks_slack * ks_critical_001(standardized.len());
    let variance_ok = (variance / sigma2 - 1.0).abs() <= tol.clt_variance_rel;
    Ok(MonteCarloReport {
        experiment: "clt".into(),
        n: scenario.n,
        replicas: m,
        seed,
        dist: scenario.dist.to_string(),
        target: sigma2,
        estimate: variance,
        std_error: variance * (2.0 / (m as f64 - 1.0).max(1.0)).sqrt(),
        sample_variance: Some(variance),
        standardized_mean: Some(z_mean),
        ks_distance: Some(ks),
        ks_band: Some(ks_band),
        standardized_samples: Some(standardized),
        pass: variance_ok && ks < ks_band,
        criterion: format!(
            "|var/sigma2 - 1| <= {} and KS < {} x 1.63/sqrt(M) = {ks_band:.4}",
            tol.clt_variance_rel, tol.ks_slack
        ),
    })
}

/// Mean number of jumps per capita against the stop time `t_inf`.
pub fn mc_transitions(scenario: &Scenario, m: u64, seed: u64, tol: &Tolerances) -> Result<MonteCarloReport> {
    check_replicas(m)?;
    let (mu, nu2) = scenario.dist.moments();
    if !nu2.is_finite() {
        return Err(Error::InfiniteVariance);
    }
    let target = analytic::stop_time(mu, scenario.ic.x0(), scenario.ic.w0())?;
    let per_capita: Vec<f64> = simulate_replicas(scenario, m, seed, 0)?
        .iter()
        .map(|o| o.transitions as f64 / o.n as f64)
        .collect();
    let (estimate, _) = mean_variance(&per_capita);
    let se = std_error(&per_capita);
    let band = (tol.std_errors * se).max(tol.transitions_floor);
    Ok(MonteCarloReport {
        experiment: "transitions".into(),
        n: scenario.n,
        replicas: m,
        seed,
        dist: scenario.dist.to_string(),
        target,
        estimate,
        std_error: se,
        sample_variance: None,
        standardized_mean: None,
        ks_distance: None,
        ks_band: None,
        standardized_samples: None,
        pass: (estimate - target).abs() <= band,
        criterion: format!(
            "|mean(m/N) - t_inf| <= max({} SE, {}) = {band:.3e}",
            tol.std_errors, tol.transitions_floor
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuInfinityReport {
    pub reports: Vec<MonteCarloReport>,
    pub pass: bool,
    pub criterion: String,
}

/// Infinite-mean law: final fractions must decrease along the `N` grid and
/// be small at its end.
pub fn mc_mu_infinity(
    template: &Scenario,
    n_grid: &[u64],
    m: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<MuInfinityReport> {
    check_replicas(m)?;
    if template.dist.mean().is_finite() {
        return Err(Error::FiniteMean);
    }
    if n_grid.is_empty() {
        return Err(Error::Config("the N grid is empty".into()));
    }
    let mut reports = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let scenario = Scenario { n, ..template.clone() };
        let fractions = final_fractions(&simulate_replicas(&scenario, m, seed, 0)?);
        let (estimate, _) = mean_variance(&fractions);
        reports.push(MonteCarloReport {
            experiment: "muinf".into(),
            n,
            replicas: m,
            seed,
            dist: scenario.dist.to_string(),
            target: 0.0,
            estimate,
            std_error: std_error(&fractions),
            sample_variance: None,
            standardized_mean: None,
            ks_distance: None,
            ks_band: None,
            standardized_samples: None,
            pass: true,
            criterion: "component of a decreasing sequence".into(),
        });
    }
    let decreasing = reports.windows(2).all(|w| w[1].estimate < w[0].estimate);
    let last = reports.last().map(|r| r.estimate).unwrap_or(f64::NAN);
    let small = last < tol.mu_infinity_final;
    if let Some(r) = reports.last_mut() {
        r.pass = small;
        r.criterion = format!("mean(X/N) < {}", tol.mu_infinity_final);
    }
    Ok(MuInfinityReport {
        reports,
        pass: decreasing && small,
        criterion: format!(
            "estimates strictly decreasing in N and final estimate < {}",
            tol.mu_infinity_final
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub replicas: u64,
    pub seed: u64,
    pub dist_low: String,
    pub dist_high: String,
    pub mean_low: f64,
    pub mean_high: f64,
    pub pooled_std_error: f64,
    pub pass: bool,
    pub criterion: String,
}

/// Compares mean final ignorants under `low <=st high`; the larger law must
/// not leave more ignorants beyond noise.
///
/// The two samples use disjoint replica streams (`0..M` and `M..2M`).
pub fn mc_monotone(
    template: &Scenario,
    m: u64,
    low: &StiflingDistribution,
    high: &StiflingDistribution,
    seed: u64,
    tol: &Tolerances,
) -> Result<MonotoneReport> {
    check_replicas(m)?;
    if let Some(at) = low.stochastic_order_violation(high, low.comparison_horizon(high)) {
        return Err(Error::StochasticOrder { at });
    }
    let sample = |dist: &StiflingDistribution, first: u64| -> Result<Vec<f64>> {
        let scenario = Scenario {
            dist: dist.clone(),
            ..template.clone()
        };
        Ok(simulate_replicas(&scenario, m, seed, first)?
            .iter()
            .map(|o| o.final_ignorants as f64)
            .collect())
    };
    let lows = sample(low, 0)?;
    let highs = sample(high, m)?;
    let (mean_low, _) = mean_variance(&lows);
    let (mean_high, _) = mean_variance(&highs);
    let pooled = std_error(&lows).hypot(std_error(&highs));
    Ok(MonotoneReport {
        n: template.n,
        replicas: m,
        seed,
        dist_low: low.to_string(),
        dist_high: high.to_string(),
        mean_low,
        mean_high,
        pooled_std_error: pooled,
        pass: mean_high <= mean_low + tol.std_errors * pooled,
        criterion: format!("mean(high) <= mean(low) + {} pooled SE", tol.std_errors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::InitialCondition;

    fn c(k: u64) -> StiflingDistribution {
        StiflingDistribution::constant(k).unwrap()
    }

    #[test]
    fn lln_small_runs() {
        let tol = Tolerances::default();
        let r = mc_lln(&Scenario::classical(10_000, StiflingDistribution::geometric(0.5).unwrap()), 200, 3, &tol)
            .unwrap();
        assert!((r.estimate - 0.0595).abs() < 0.005, "{r:?}");
        assert!(r.pass);

        let ic = InitialCondition::new(0.4, 0.0).unwrap();
        let r = mc_lln(&Scenario::new(1_000, ic, c(1)), 100, 3, &tol).unwrap();
        assert_eq!(r.target, 0.4);
        assert!((r.estimate - 0.4).abs() < 0.01, "{r:?}");
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let sc = Scenario::classical(2_000, c(1));
        let tol = Tolerances::default();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_clt(&sc, 64, 5, &tol).unwrap());
        let b = four.install(|| mc_clt(&sc, 64, 5, &tol).unwrap());
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn clt_rejects_violated_hypotheses() {
        let ic = InitialCondition::new(0.4, 0.0).unwrap();
        let sc = Scenario::new(1_000, ic, c(1));
        assert_eq!(mc_clt(&sc, 10, 1, &Tolerances::default()), Err(Error::CltHypotheses));
        let sc = Scenario::classical(1_000, StiflingDistribution::zeta(2.5).unwrap());
        assert_eq!(mc_clt(&sc, 10, 1, &Tolerances::default()), Err(Error::InfiniteVariance));
    }

    #[test]
    fn transitions_vanish_without_spread() {
        let ic = InitialCondition::new(0.4, 0.0).unwrap();
        let tol = Tolerances::default();
        let small = mc_transitions(&Scenario::new(1_000, ic.clone(), c(1)), 200, 1, &tol).unwrap();
        let large = mc_transitions(&Scenario::new(100_000, ic, c(1)), 200, 1, &tol).unwrap();
        assert_eq!(small.target, 0.0);
        assert!(large.estimate < small.estimate);
        assert!(large.pass);
    }

    #[test]
    fn mu_infinity_rejects_finite_mean() {
        let sc = Scenario::classical(10, StiflingDistribution::geometric(0.5).unwrap());
        assert_eq!(
            mc_mu_infinity(&sc, &[10, 100], 5, 1, &Tolerances::default()),
            Err(Error::FiniteMean)
        );
    }

    #[test]
    fn mu_infinity_boundary_exponent() {
        let sc = Scenario::classical(1, StiflingDistribution::zeta(2.0).unwrap());
        let r = mc_mu_infinity(&sc, &[1_000, 10_000, 100_000], 100, 17, &Tolerances::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn monotone_cases() {
        let tol = Tolerances::default();
        let sc = Scenario::classical(1_000, c(1));
        let g = StiflingDistribution::geometric(0.5).unwrap();
        let r = mc_monotone(&sc, 2_000, &g.truncate(2).unwrap(), &g, 8, &tol).unwrap();
        assert!(r.pass && r.mean_high < r.mean_low, "{r:?}");
        let r = mc_monotone(&sc, 2_000, &c(1), &c(1), 8, &tol).unwrap();
        assert!(r.pass);
        assert!((r.mean_high - r.mean_low).abs() < 4.0 * r.pooled_std_error);
        assert_eq!(
            mc_monotone(&sc, 10, &c(2), &c(1), 8, &tol),
            Err(Error::StochasticOrder { at: 2 })
        );
    }
}

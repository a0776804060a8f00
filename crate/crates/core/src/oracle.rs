//! Exact law of the final number of ignorants for small populations, by
//! pushing probability mass forward through the reduced embedded chain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::{plan_start, InitialSpreaders, Scenario};

pub const DEFAULT_STATE_CAP: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalDistribution {
    #[serde(rename = "N")]
    pub n: u64,
    /// Entry `x` is `P(final ignorants = x)`.
    pub probabilities: Vec<f64>,
    pub mean: f64,
    /// Expected number of jumps until absorption.
    pub mean_transitions: f64,
}

impl FinalDistribution {
    pub fn prob(&self, x: u64) -> f64 {
        self.probabilities.get(x as usize).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Total-variation distance to an empirical sample of final counts.
    pub fn tv_distance_to_sample(&self, finals: &[u64]) -> f64 {
        let mut counts = vec![0u64; self.probabilities.len()];
        let mut outside = 0u64;
        for &x in finals {
            match counts.get_mut(x as usize) {
                Some(c) => *c += 1,
                None => outside += 1,
            }
        }
        let m = finals.len() as f64;
        let inside: f64 = counts
            .iter()
            .zip(&self.probabilities)
            .map(|(&c, &p)| (c as f64 / m - p).abs())
            .sum();
        0.5 * (inside + outside as f64 / m)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("final_x,probability\n");
        for (x, p) in self.probabilities.iter().enumerate() {
            out.push_str(&format!("{x},{p}\n"));
        }
        out
    }
}

pub fn exact_final_distribution(scenario: &Scenario) -> Result<FinalDistribution> {
    exact_final_distribution_capped(scenario, DEFAULT_STATE_CAP)
}

/// Forward DP over `(X, W)`.
///
/// Layers are visited by decreasing `X`; inside a layer mass only moves to
/// smaller `W`, so `W` is swept downwards and each state is settled before it
/// is read. Mass reaching `W = 0` is absorbed with final count `X`.
pub fn exact_final_distribution_capped(scenario: &Scenario, cap: usize) -> Result<FinalDistribution> {
    let dist = &scenario.dist;
    let max_support = dist.max_support().ok_or(Error::UnboundedSupport)?;
    let plan = plan_start(scenario)?;
    let n = scenario.n;

    // initial W as a law over values
    let initial_w: Vec<(u64, f64)> = match &plan.spreaders {
        InitialSpreaders::Counts(counts) => {
            vec![(counts.iter().map(|(&i, &c)| i * c).sum(), 1.0)]
        }
        InitialSpreaders::OneFromLaw => {
            let positive = 1.0 - dist.pmf(0);
            (1..=max_support)
                .map(|i| (i, dist.pmf(i) / positive))
                .filter(|&(_, p)| p > 0.0)
                .collect()
        }
    };
    let w_start_max = initial_w.iter().map(|&(w, _)| w).max().unwrap_or(0);
    let x_start = plan.x;
    let w_cap = w_start_max + max_support * x_start;
    let width = usize::try_from(w_cap + 1).map_err(|_| Error::StateSpace {
        states: usize::MAX,
        cap,
    })?;
    let states = width.saturating_mul(x_start as usize + 1);
    if states > cap {
        return Err(Error::StateSpace { states, cap });
    }

    let jumps: Vec<(usize, f64)> = (0..=max_support)
        .map(|i| (i as usize, dist.pmf(i)))
        .filter(|&(_, p)| p > 0.0)
        .collect();

    let mut probabilities = vec![0.0; x_start as usize + 1];
    let mut mean_transitions = 0.0;
    let mut layer = vec![0.0f64; width];
    for &(w, p) in &initial_w {
        layer[w as usize] += p;
    }
    let mut next = vec![0.0f64; width];
    // highest W that can hold mass in the current layer
    let mut top = w_start_max as usize;
    for x in (0..=x_start).rev() {
        let contact = x as f64 / n as f64;
        let idle = 1.0 - contact;
        for w in (1..=top).rev() {
            let m = layer[w];
            if m == 0.0 {
                continue;
            }
            mean_transitions += m;
            layer[w] = 0.0;
            layer[w - 1] += m * idle;
            if x > 0 && contact > 0.0 {
                let flow = m * contact;
                for &(i, r) in &jumps {
                    next[w + i] += flow * r;
                }
            }
        }
        probabilities[x as usize] = layer[0];
        layer[0] = 0.0;
        std::mem::swap(&mut layer, &mut next);
        top = (top + max_support as usize).min(width - 1);
    }

    let mean = probabilities
        .iter()
        .enumerate()
        .map(|(x, p)| x as f64 * p)
        .sum();
    Ok(FinalDistribution {
        n,
        probabilities,
        mean,
        mean_transitions,
    })
}

pub fn exact_mean_ignorants(scenario: &Scenario) -> Result<f64> {
    exact_final_distribution(scenario).map(|d| d.mean)
}

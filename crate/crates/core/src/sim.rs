//! Stochastic simulation of the rumour process on `N + 1` individuals.
//!
//! Two engines are provided. The reduced engine follows the embedded jump
//! chain of `(X, W)`, where `W` is the total number of stifling experiences
//! still owed by the current spreaders; from `(X, W)` the next jump is a
//! contact `(X-1, W+i)` with probability `r_i X / N` or a stifling experience
//! `(X, W-1)` with probability `(N-X)/N`. The full engine tracks spreaders by
//! type and can attach exponential clocks to recover the absorption time.
//! Both end at the same law for the final number of ignorants.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric};
use serde::Serialize;

use crate::analytic::InitialCondition;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::stifling::StiflingDistribution;

/// Everything that defines a run except the random stream.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Population size minus one.
    pub n: u64,
    pub ic: InitialCondition,
    pub dist: StiflingDistribution,
    /// Type of the lone initial spreader when the start has no spreader
    /// proportions. `None` draws it from `R` conditioned on `R >= 1`.
    pub initial_type: Option<u64>,
}

impl Scenario {
    pub fn new(n: u64, ic: InitialCondition, dist: StiflingDistribution) -> Self {
        Self {
            n,
            ic,
            dist,
            initial_type: None,
        }
    }

    pub fn classical(n: u64, dist: StiflingDistribution) -> Self {
        Self::new(n, InitialCondition::classical(), dist)
    }

    pub fn with_initial_type(mut self, kind: u64) -> Self {
        self.initial_type = Some(kind);
        self
    }
}

/// Moving state of the reduced chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducedState {
    pub x: u64,
    pub w: u64,
    pub n: u64,
}

impl ReducedState {
    pub fn is_absorbed(&self) -> bool {
        self.w == 0
    }
}

const DENSE_TYPES: u64 = 1024;

/// Spreader counts by remaining stifling budget: a dense array for small
/// types and a map for the rest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpreaderCounts {
    dense: Vec<u64>,
    overflow: BTreeMap<u64, u64>,
    total: u64,
}

impl SpreaderCounts {
    pub fn get(&self, kind: u64) -> u64 {
        if kind < DENSE_TYPES {
            self.dense.get(kind as usize).copied().unwrap_or(0)
        } else {
            self.overflow.get(&kind).copied().unwrap_or(0)
        }
    }

    pub fn add(&mut self, kind: u64, count: u64) {
        debug_assert!(kind >= 1);
        if count == 0 {
            return;
        }
        if kind < DENSE_TYPES {
            let k = kind as usize;
            if self.dense.len() <= k {
                self.dense.resize(k + 1, 0);
            }
            self.dense[k] += count;
        } else {
            *self.overflow.entry(kind).or_insert(0) += count;
        }
        self.total += count;
    }

    fn remove_one(&mut self, kind: u64) {
        if kind < DENSE_TYPES {
            self.dense[kind as usize] -= 1;
        } else if let Some(c) = self.overflow.get_mut(&kind) {
            *c -= 1;
            if *c == 0 {
                self.overflow.remove(&kind);
            }
        }
        self.total -= 1;
    }

    /// Total number of spreaders.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `sum_i i * Y_i`.
    pub fn weighted(&self) -> u64 {
        let dense: u64 = self
            .dense
            .iter()
            .enumerate()
            .map(|(i, &c)| i as u64 * c)
            .sum();
        self.overflow
            .iter()
            .fold(dense, |acc, (&i, &c)| acc.saturating_add(i.saturating_mul(c)))
    }

    /// Type of the spreader at position `index` when spreaders are listed
    /// by increasing type.
    fn kind_at(&self, mut index: u64) -> u64 {
        for (i, &c) in self.dense.iter().enumerate() {
            if index < c {
                return i as u64;
            }
            index -= c;
        }
        for (&i, &c) in &self.overflow {
            if index < c {
                return i;
            }
            index -= c;
        }
        unreachable!("spreader index beyond total")
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u64, c))
            .chain(self.overflow.iter().map(|(&i, &c)| (i, c)))
    }
}

/// Type-resolved state: ignorants, spreaders by type, stiflers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullState {
    pub x: u64,
    pub spreaders: SpreaderCounts,
    pub z: u64,
    pub n: u64,
}

impl FullState {
    pub fn population(&self) -> u64 {
        self.x + self.spreaders.total() + self.z
    }

    pub fn reduced(&self) -> ReducedState {
        ReducedState {
            x: self.x,
            w: self.spreaders.weighted(),
            n: self.n,
        }
    }
}

/// Initial spreaders before any randomness is resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpreaders {
    Counts(BTreeMap<u64, u64>),
    /// One spreader whose type is drawn from `R` given `R >= 1`.
    OneFromLaw,
}

/// Integer start of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartPlan {
    pub x: u64,
    pub z: u64,
    pub spreaders: InitialSpreaders,
}

/// Rounds the initial proportions to counts.
///
/// Rounding slack goes to the stiflers. Without explicit spreader types,
/// `w0 > 0` seeds type-1 spreaders of proportion `w0`, and `w0 = 0` places a
/// single spreader.
pub fn plan_start(scenario: &Scenario) -> Result<StartPlan> {
    let n = scenario.n;
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    let ic = &scenario.ic;
    let pop = n + 1;
    let round = |p: f64| (pop as f64 * p).round() as u64;

    let proportions: Option<BTreeMap<u64, f64>> = match ic.spreaders() {
        Some(y0) => Some(y0.clone()),
        None if ic.w0() > 0.0 => {
            if ic.x0() + ic.w0() > 1.0 + 1e-12 {
                return Err(Error::InitialCondition(format!(
                    "x0 + w0 = {} exceeds 1; give spreader types explicitly",
                    ic.x0() + ic.w0()
                )));
            }
            Some([(1, ic.w0())].into_iter().collect())
        }
        None => None,
    };

    match proportions {
        Some(y0) => {
            let mut x = round(ic.x0()).min(pop);
            let mut counts: BTreeMap<u64, u64> = y0
                .iter()
                .map(|(&i, &y)| (i, round(y)))
                .filter(|&(_, c)| c > 0)
                .collect();
            let mut spread: u64 = counts.values().sum();
            if spread == 0 {
                match scenario.initial_type {
                    Some(kind) if kind >= 1 => {
                        counts.insert(kind, 1);
                        spread = 1;
                    }
                    _ => {
                        return Err(Error::InitialCondition(format!(
                            "rounding the spreader proportions at N = {n} leaves no spreader"
                        )))
                    }
                }
            }
            // rounding overshoot: take from ignorants, then from the largest spreader class
            while x + spread > pop {
                if x > 0 {
                    x -= 1;
                } else {
                    let (&k, c) = counts.iter_mut().max_by_key(|(_, c)| **c).unwrap();
                    *c -= 1;
                    if *c == 0 {
                        counts.remove(&k);
                    }
                    spread -= 1;
                }
            }
            Ok(StartPlan {
                x,
                z: pop - x - spread,
                spreaders: InitialSpreaders::Counts(counts),
            })
        }
        None => {
            let x = round(ic.x0()).min(n);
            let spreaders = match scenario.initial_type {
                Some(0) => {
                    return Err(Error::InitialCondition(
                        "initial spreader type must be at least 1".into(),
                    ))
                }
                Some(kind) => InitialSpreaders::Counts([(kind, 1)].into_iter().collect()),
                None => InitialSpreaders::OneFromLaw,
            };
            Ok(StartPlan {
                x,
                z: n - x,
                spreaders,
            })
        }
    }
}

/// Integer initial state, resolving the random type of a lone spreader.
pub fn init_state<R: Rng + ?Sized>(
    scenario: &Scenario,
    rng: &mut R,
) -> Result<(ReducedState, FullState)> {
    let plan = plan_start(scenario)?;
    let mut spreaders = SpreaderCounts::default();
    match plan.spreaders {
        InitialSpreaders::Counts(counts) => {
            for (kind, c) in counts {
                spreaders.add(kind, c);
            }
        }
        InitialSpreaders::OneFromLaw => spreaders.add(scenario.dist.sample_positive(rng), 1),
    }
    let full = FullState {
        x: plan.x,
        spreaders,
        z: plan.z,
        n: scenario.n,
    };
    Ok((full.reduced(), full))
}

/// One jump of the reduced embedded chain.
///
/// # Panics
///
/// If the state is already absorbed (`w == 0`).
pub fn step_reduced<R: Rng + ?Sized>(
    state: ReducedState,
    dist: &StiflingDistribution,
    rng: &mut R,
) -> ReducedState {
    assert!(state.w > 0, "stepping an absorbed state");
    if rng.random_range(0..state.n) < state.x {
        ReducedState {
            x: state.x - 1,
            w: state.w.saturating_add(dist.sample(rng)),
            n: state.n,
        }
    } else {
        ReducedState {
            w: state.w - 1,
            ..state
        }
    }
}

/// Final state of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutcome {
    pub seed: u64,
    pub replica: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub initial_ignorants: u64,
    pub final_ignorants: u64,
    /// Number of jumps until absorption.
    pub transitions: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorption_time: Option<f64>,
}

/// Reduced-chain run on replica stream 0 of `seed`.
pub fn run_reduced(scenario: &Scenario, seed: u64) -> Result<SimulationOutcome> {
    run_reduced_replica(scenario, seed, 0)
}

/// Reduced-chain run on replica stream `replica` of `seed`.
///
/// Runs of stifling experiences between contacts are drawn in one go: while
/// `X` is fixed, the number of `(X, W-1)` jumps before the next contact is
/// geometric with success probability `X/N`. The embedded chain is the same
/// as repeated [`step_reduced`], at a cost linear in the number of contacts.
pub fn run_reduced_replica(scenario: &Scenario, seed: u64, replica: u64) -> Result<SimulationOutcome> {
    let mut rng = stream_rng(seed, replica);
    let (mut state, _) = init_state(scenario, &mut rng)?;
    let initial_ignorants = state.x;
    let n = state.n;
    let mut transitions: u64 = 0;
    while state.w > 0 {
        if state.x == 0 {
            transitions = transitions.saturating_add(state.w);
            state.w = 0;
            break;
        }
        let idle = if state.x == n {
            0
        } else {
            Geometric::new(state.x as f64 / n as f64)
                .expect("probability in (0, 1]")
                .sample(&mut rng)
        };
        if idle >= state.w {
            transitions = transitions.saturating_add(state.w);
            state.w = 0;
            break;
        }
        state.w -= idle;
        transitions = transitions.saturating_add(idle + 1);
        state.x -= 1;
        state.w = state.w.saturating_add(scenario.dist.sample(&mut rng));
    }
    Ok(SimulationOutcome {
        seed,
        replica,
        n,
        initial_ignorants,
        final_ignorants: state.x,
        transitions,
        absorption_time: None,
    })
}

/// Reduced-chain run taking one [`step_reduced`] per jump.
pub fn run_reduced_stepwise(scenario: &Scenario, seed: u64, replica: u64) -> Result<SimulationOutcome> {
    let mut rng = stream_rng(seed, replica);
    let (mut state, _) = init_state(scenario, &mut rng)?;
    let initial_ignorants = state.x;
    let mut transitions = 0u64;
    while !state.is_absorbed() {
        state = step_reduced(state, &scenario.dist, &mut rng);
        transitions += 1;
    }
    Ok(SimulationOutcome {
        seed,
        replica,
        n: state.n,
        initial_ignorants,
        final_ignorants: state.x,
        transitions,
        absorption_time: None,
    })
}

/// Type-resolved run on replica stream 0 of `seed`.
pub fn run_full(scenario: &Scenario, seed: u64, with_clocks: bool) -> Result<SimulationOutcome> {
    run_full_replica(scenario, seed, 0, with_clocks)
}

pub fn run_full_replica(
    scenario: &Scenario,
    seed: u64,
    replica: u64,
    with_clocks: bool,
) -> Result<SimulationOutcome> {
    run_full_observed(scenario, seed, replica, with_clocks, |_| {})
}

/// Type-resolved run calling `observe` on the state after every jump.
///
/// A jump is a contact with an ignorant with probability `X/N` (the ignorant
/// draws its budget from `R` and stifles at once on 0), otherwise a stifling
/// experience of a uniformly chosen spreader. With clocks the holding time in
/// a state is exponential with total rate `N * Y`.
pub fn run_full_observed<F>(
    scenario: &Scenario,
    seed: u64,
    replica: u64,
    with_clocks: bool,
    mut observe: F,
) -> Result<SimulationOutcome>
where
    F: FnMut(&FullState),
{
    let mut rng = stream_rng(seed, replica);
    let (_, mut state) = init_state(scenario, &mut rng)?;
    let initial_ignorants = state.x;
    let n = state.n;
    let mut transitions = 0u64;
    let mut clock = with_clocks.then_some(0.0f64);
    while state.spreaders.total() > 0 {
        if let Some(t) = clock.as_mut() {
            let rate = n as f64 * state.spreaders.total() as f64;
            *t += Exp::new(rate).expect("positive rate").sample(&mut rng);
        }
        if rng.random_range(0..n) < state.x {
            state.x -= 1;
            match scenario.dist.sample(&mut rng) {
                0 => state.z += 1,
                kind => state.spreaders.add(kind, 1),
            }
        } else {
            let pick = rng.random_range(0..state.spreaders.total());
            let kind = state.spreaders.kind_at(pick);
            state.spreaders.remove_one(kind);
            if kind > 1 {
                state.spreaders.add(kind - 1, 1);
            } else {
                state.z += 1;
            }
        }
        transitions += 1;
        observe(&state);
    }
    Ok(SimulationOutcome {
        seed,
        replica,
        n,
        initial_ignorants,
        final_ignorants: state.x,
        transitions,
        absorption_time: clock,
    })
}

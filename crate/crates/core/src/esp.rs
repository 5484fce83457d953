//! The evolving set process with exact integer kernel rows.
//!
//! From a current set S, the next set is a level set of the one-step walk
//! probabilities into S. On a regular graph of degree d those probabilities
//! are rationals with common denominator 2d: a node v moves into the next
//! set when its numerator `slots of v inside S, plus d if v is a member`
//! beats an integer drawn uniformly from [0, 2d). All candidate level sets,
//! their probabilities, and the volume-biased reweighting are therefore
//! exact integer data; no floating-point sampling error enters the process.
//!
//! The process is run with the volume-biased kernel, which never dies out,
//! under a three-part stopping rule (conductance target, step horizon, cost
//! budget). The cost charged is the volume of the start set plus, per step,
//! the volume of the symmetric difference and the boundary size of the set
//! being left.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{boundary_size, cut_edges, Graph, NodeSet};

// ---- kernel rows ----

/// One row of the evolving-set kernel: every candidate next set with exact
/// integer weights. Candidate 0 is the empty set; the rest are nested level
/// sets ordered from the highest numerator threshold (smallest set) down.
#[derive(Debug, Clone)]
pub struct KernelRow {
    denominator: u32,
    candidates: Vec<NodeSet>,
    levels: Vec<u32>,
    unbiased: Vec<u32>,
    biased: Vec<u64>,
    biased_total: u64,
}

impl KernelRow {
    /// Common denominator 2d of the transition probabilities.
    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    /// Candidate next sets; index 0 is the empty set.
    pub fn candidates(&self) -> &[NodeSet] {
        &self.candidates
    }

    /// Numerator thresholds of the nonempty candidates, strictly descending;
    /// `levels()[j]` defines `candidates()[j + 1]`.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Integer probability numerators per candidate; they sum to the
    /// denominator.
    pub fn unbiased_numerators(&self) -> &[u32] {
        &self.unbiased
    }

    /// Volume-biased weights per candidate (volume times probability
    /// numerator); the empty set always weighs zero.
    pub fn biased_weights(&self) -> &[u64] {
        &self.biased
    }

    /// Total biased weight; equals `denominator * volume(S)` exactly, which
    /// is the set-volume martingale property of the unbiased kernel.
    pub fn biased_total(&self) -> u64 {
        self.biased_total
    }

    /// Candidate probabilities under the unbiased kernel.
    pub fn probabilities(&self) -> Vec<f64> {
        self.unbiased
            .iter()
            .map(|&w| w as f64 / self.denominator as f64)
            .collect()
    }

    /// Candidate probabilities under the volume-biased kernel.
    pub fn biased_probabilities(&self) -> Vec<f64> {
        self.biased
            .iter()
            .map(|&w| w as f64 / self.biased_total as f64)
            .collect()
    }

    /// Samples a candidate index from the unbiased kernel.
    pub fn sample_unbiased<R: rand::Rng>(&self, rng: &mut R) -> usize {
        let mut draw = rng.gen_range(0..self.denominator);
        for (index, &weight) in self.unbiased.iter().enumerate() {
            if draw < weight {
                return index;
            }
            draw -= weight;
        }
        unreachable!("unbiased numerators sum to the denominator");
    }

    /// Samples a candidate index from the volume-biased kernel.
    pub fn sample_biased<R: rand::Rng>(&self, rng: &mut R) -> usize {
        let mut draw = rng.gen_range(0..self.biased_total);
        for (index, &weight) in self.biased.iter().enumerate() {
            if draw < weight {
                return index;
            }
            draw -= weight;
        }
        unreachable!("draw is below the total biased weight");
    }
}

/// Builds the kernel row of `set`. Requires a regular graph, where the
/// transition probabilities share the denominator 2d, and a nonempty set.
pub fn kernel_row(graph: &Graph, set: &NodeSet) -> Result<KernelRow> {
    let d = graph.regular_degree().ok_or(Error::NotRegular)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let denominator = 2 * d;

    // Numerator of the walk probability into `set`, times 2d: the number of
    // slots with endpoint inside, plus d for members (the lazy half-step).
    let mut numerator = vec![0u32; graph.node_count()];
    let mut touched: Vec<u32> = Vec::new();
    for u in set.iter() {
        for &w in graph.neighbors(u) {
            if numerator[w as usize] == 0 {
                touched.push(w);
            }
            numerator[w as usize] += 1;
        }
    }
    for u in set.iter() {
        if numerator[u as usize] == 0 {
            touched.push(u);
        }
        numerator[u as usize] += d;
    }
    touched.sort_unstable();

    let mut levels: Vec<u32> = touched.iter().map(|&v| numerator[v as usize]).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();

    let mut candidates = Vec::with_capacity(levels.len() + 1);
    let mut unbiased = Vec::with_capacity(levels.len() + 1);
    let mut biased = Vec::with_capacity(levels.len() + 1);
    candidates.push(NodeSet::new(graph, Vec::new())?);
    unbiased.push(denominator - levels[0]);
    biased.push(0u64);
    for (j, &level) in levels.iter().enumerate() {
        let members: Vec<u32> = touched
            .iter()
            .copied()
            .filter(|&v| numerator[v as usize] >= level)
            .collect();
        let candidate = NodeSet::new(graph, members)?;
        let gap = level - levels.get(j + 1).copied().unwrap_or(0);
        unbiased.push(gap);
        biased.push(candidate.volume() * gap as u64);
        candidates.push(candidate);
    }
    let biased_total = biased.iter().sum();
    Ok(KernelRow {
        denominator,
        candidates,
        levels,
        unbiased,
        biased,
        biased_total,
    })
}

/// Which kernel to sample a step from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Unbiased,
    VolumeBiased,
}

/// Samples one evolving-set step from `set`.
pub fn esp_step<R: rand::Rng>(
    graph: &Graph,
    set: &NodeSet,
    kind: KernelKind,
    rng: &mut R,
) -> Result<NodeSet> {
    let row = kernel_row(graph, set)?;
    let index = match kind {
        KernelKind::Unbiased => row.sample_unbiased(rng),
        KernelKind::VolumeBiased => row.sample_biased(rng),
    };
    Ok(row.candidates[index].clone())
}

// ---- stopping rule and transcripts ----

/// Three-part stopping rule, checked in priority order after every step
/// (and before the first): conductance target, then step horizon, then cost
/// budget. The budget is never consulted at step zero, so even a zero budget
/// allows one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once the current set reaches this conductance or less.
    pub theta: f64,
    /// Stop after this many steps.
    pub horizon: u64,
    /// Stop once the accumulated cost exceeds this.
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Conductance,
    Horizon,
    Budget,
}

/// Per-step summary of an evolving-set run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub step: u64,
    pub size: usize,
    pub volume: u64,
    pub conductance: f64,
    /// Cumulative cost up to and including this step.
    pub cost: u64,
}

/// Full record of an evolving-set run: the visited sets, one summary row
/// per set, the stop reason, and the final cost.
#[derive(Debug, Clone)]
pub struct EspTranscript {
    pub path: Vec<NodeSet>,
    pub rows: Vec<StepRow>,
    pub reason: StopReason,
    pub cost: u64,
}

impl EspTranscript {
    /// The set the process stopped on.
    pub fn stopped(&self) -> &NodeSet {
        self.path.last().expect("transcripts hold the start set")
    }

    /// Number of steps taken.
    pub fn steps(&self) -> u64 {
        self.path.len() as u64 - 1
    }

    /// Smallest conductance seen along the path.
    pub fn min_conductance(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.conductance)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Conductance with the absorbing-state convention: the empty and the full
/// set both report zero, so they always satisfy the conductance target.
fn stop_conductance(graph: &Graph, set: &NodeSet) -> f64 {
    if set.is_empty() || set.volume() == graph.total_degree() {
        0.0
    } else {
        cut_edges(graph, set) as f64 / set.volume() as f64
    }
}

/// Runs the volume-biased evolving set process from `start` until the
/// stopping rule fires.
pub fn run_esp<R: rand::Rng>(
    graph: &Graph,
    start: &NodeSet,
    rule: &StopRule,
    rng: &mut R,
) -> Result<EspTranscript> {
    if start.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut current = start.clone();
    let mut cost = current.volume();
    let mut path = vec![current.clone()];
    let mut rows = vec![StepRow {
        step: 0,
        size: current.len(),
        volume: current.volume(),
        conductance: stop_conductance(graph, &current),
        cost,
    }];
    let reason = loop {
        let step = rows.last().expect("at least the start row").step;
        if rows.last().expect("at least the start row").conductance <= rule.theta {
            break StopReason::Conductance;
        }
        if step >= rule.horizon {
            break StopReason::Horizon;
        }
        if step > 0 && cost > rule.budget {
            break StopReason::Budget;
        }
        let next = esp_step(graph, &current, KernelKind::VolumeBiased, rng)?;
        cost += current.symmetric_difference_volume(graph, &next) + boundary_size(graph, &current);
        rows.push(StepRow {
            step: step + 1,
            size: next.len(),
            volume: next.volume(),
            conductance: stop_conductance(graph, &next),
            cost,
        });
        path.push(next.clone());
        current = next;
    };
    Ok(EspTranscript {
        path,
        rows,
        reason,
        cost,
    })
}

// ---- seed-set growth ----

/// Stopping rule for growing a seed set around a node of a set with
/// conductance at most `gamma`: the conductance target is `gamma` itself,
/// the horizon is `ceil(4 * rate * ln(m) / gamma^2)` steps, and the budget
/// is `ceil(5 * rate * volume_cap * sqrt(horizon * ln(m)))`, where `m`
/// counts edge records.
pub fn seed_growth_rule(
    gamma: f64,
    rate: f64,
    volume_cap: u64,
    edge_records: u64,
) -> Result<StopRule> {
    if !gamma.is_finite() || gamma <= 0.0 || gamma > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "seed growth needs a conductance target in (0, 1], got {gamma}"
        )));
    }
    if !rate.is_finite() || rate < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "seed growth rate must be at least 1, got {rate}"
        )));
    }
    let ln_m = (edge_records as f64).ln();
    let horizon = (4.0 * rate * ln_m / (gamma * gamma)).ceil() as u64;
    let budget = (5.0 * rate * volume_cap as f64 * (horizon as f64 * ln_m).sqrt()).ceil() as u64;
    Ok(StopRule {
        theta: gamma,
        horizon,
        budget,
    })
}

/// Grows a set around `seed_node` by running the volume-biased evolving set
/// process under [`seed_growth_rule`].
pub fn grow_seed_set<R: rand::Rng>(
    graph: &Graph,
    seed_node: u32,
    gamma: f64,
    rate: f64,
    volume_cap: u64,
    rng: &mut R,
) -> Result<EspTranscript> {
    let rule = seed_growth_rule(gamma, rate, volume_cap, graph.edge_count())?;
    run_esp(graph, &NodeSet::singleton(graph, seed_node)?, &rule, rng)
}

//! Lazy random walks: dense propagation, sampling, and diffusion cores.
//!
//! The walk is the half-lazy walk on a multigraph: from `v` it stays put with
//! probability 1/2 and otherwise follows a uniformly random adjacency slot,
//! so a self-loop slot also leads back to `v`. On regular graphs the
//! transition matrix is symmetric and the uniform distribution is stationary.
//!
//! Dense propagation keeps the full probability vector, which makes small
//! and mid-sized instances exact: collision probabilities, stay
//! probabilities, and diffusion cores all come out as plain floating-point
//! arithmetic instead of Monte Carlo estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cut_edges, Graph, NodeSet};

// ---- distributions ----

/// A probability distribution over the nodes of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Uniform distribution over all nodes.
    pub fn uniform(graph: &Graph) -> Self {
        let n = graph.node_count();
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass at `v`.
    pub fn point(graph: &Graph, v: u32) -> Result<Self> {
        if v as usize >= graph.node_count() {
            return Err(Error::NodeRange {
                node: v as usize,
                n: graph.node_count(),
            });
        }
        let mut weights = vec![0.0; graph.node_count()];
        weights[v as usize] = 1.0;
        Ok(Self { weights })
    }

    /// Uniform distribution over the members of `set`.
    pub fn uniform_on(graph: &Graph, set: &NodeSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut weights = vec![0.0; graph.node_count()];
        let share = 1.0 / set.len() as f64;
        for v in set.iter() {
            weights[v as usize] = share;
        }
        Ok(Self { weights })
    }

    /// Wraps a raw weight vector, validating length, sign, and total mass.
    pub fn from_weights(graph: &Graph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.node_count() {
            return Err(Error::LengthMismatch {
                expected: graph.node_count(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidParameter(
                "distribution weights must lie in [0, 1]".into(),
            ));
        }
        let mass: f64 = weights.iter().sum();
        if mass > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "distribution mass {mass} exceeds 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Euclidean norm of the weight vector.
    pub fn norm2(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// 1-norm distance to another distribution.
    pub fn l1_distance(&self, other: &Distribution) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

// ---- dense propagation ----

/// Applies the lazy-walk transition matrix to a raw vector (not necessarily
/// a distribution). Isolated nodes hold their value.
pub fn apply_walk_matrix(graph: &Graph, vector: &[f64]) -> Result<Vec<f64>> {
    let n = graph.node_count();
    if vector.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: vector.len(),
        });
    }
    let mut next = vec![0.0f64; n];
    for (v, &p) in vector.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let degree = graph.degree(v as u32);
        if degree == 0 {
            next[v] += p;
            continue;
        }
        next[v] += p / 2.0;
        let share = p / (2.0 * degree as f64);
        for &w in graph.neighbors(v as u32) {
            next[w as usize] += share;
        }
    }
    Ok(next)
}

/// One lazy-walk step of a distribution.
pub fn walk_step(graph: &Graph, dist: &Distribution) -> Result<Distribution> {
    Ok(Distribution {
        weights: apply_walk_matrix(graph, &dist.weights)?,
    })
}

/// `t` lazy-walk steps of a distribution.
pub fn propagate(graph: &Graph, dist: &Distribution, t: u64) -> Result<Distribution> {
    let mut current = dist.clone();
    for _ in 0..t {
        current = walk_step(graph, &current)?;
    }
    Ok(current)
}

/// Distribution of a `t`-step lazy walk started uniformly on `set`.
pub fn walk_power(graph: &Graph, set: &NodeSet, t: u64) -> Result<Distribution> {
    propagate(graph, &Distribution::uniform_on(graph, set)?, t)
}

/// Probability that two independent `t`-step lazy walks from `v` end at the
/// same node; equals the squared 2-norm of the walk distribution.
pub fn collision_probability(graph: &Graph, v: u32, t: u64) -> Result<f64> {
    let dist = propagate(graph, &Distribution::point(graph, v)?, t)?;
    Ok(dist.weights.iter().map(|w| w * w).sum())
}

// ---- walk sampling ----

/// One sampled lazy-walk step from `v`: stay with probability 1/2, otherwise
/// follow a uniformly random slot (loop slots lead back to `v`).
pub fn sample_step<R: rand::Rng>(graph: &Graph, v: u32, rng: &mut R) -> u32 {
    let degree = graph.degree(v);
    if degree == 0 {
        return v;
    }
    let r = rng.gen_range(0..2 * degree);
    if r < degree {
        v
    } else {
        graph.neighbors(v)[(r - degree) as usize]
    }
}

/// Endpoint of a sampled `t`-step lazy walk from `v`.
pub fn sample_endpoint<R: rand::Rng>(graph: &Graph, v: u32, t: u64, rng: &mut R) -> u32 {
    (0..t).fold(v, |node, _| sample_step(graph, node, rng))
}

// ---- stay probabilities and diffusion cores ----

/// For each member of `set` (in member order), the probability that a lazy
/// walk started there remains inside `set` for all of the first `horizon`
/// steps. Computed exactly by propagating the all-ones vector through the
/// walk restricted to `set`.
pub fn stay_probabilities(graph: &Graph, set: &NodeSet, horizon: u64) -> Vec<f64> {
    let n = graph.node_count();
    let mut inside = vec![false; n];
    for v in set.iter() {
        inside[v as usize] = true;
    }
    let mut stay = vec![0.0f64; n];
    for v in set.iter() {
        stay[v as usize] = 1.0;
    }
    let mut next = stay.clone();
    for _ in 0..horizon {
        for v in set.iter() {
            let degree = graph.degree(v);
            if degree == 0 {
                continue;
            }
            let mut acc = stay[v as usize] / 2.0;
            let share = 1.0 / (2.0 * degree as f64);
            for &w in graph.neighbors(v) {
                if inside[w as usize] {
                    acc += share * stay[w as usize];
                }
            }
            next[v as usize] = acc;
        }
        for v in set.iter() {
            stay[v as usize] = next[v as usize];
        }
    }
    set.iter().map(|v| stay[v as usize]).collect()
}

/// Stay probability of a single member of `set` over `horizon` steps.
pub fn stay_probability(graph: &Graph, set: &NodeSet, v: u32, horizon: u64) -> Result<f64> {
    let index = set
        .members()
        .binary_search(&v)
        .map_err(|_| Error::NotInSet { node: v as usize })?;
    Ok(stay_probabilities(graph, set, horizon)[index])
}

/// Parameters of a diffusion core: walks must stay inside the set for
/// `floor(alpha / conductance)` steps with probability at least `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreParams {
    pub alpha: f64,
    pub beta: f64,
}

impl CoreParams {
    /// The canonical core used when locating a low-expansion witness.
    pub fn canonical() -> Self {
        Self {
            alpha: 1.0 / 40.0,
            beta: 3.0 / 4.0,
        }
    }

    /// A tighter core nested inside the canonical one: a longer horizon and
    /// a stay requirement close to 1.
    pub fn inner() -> Self {
        Self {
            alpha: 1.0 / 30.0,
            beta: 39.0 / 40.0,
        }
    }
}

/// Horizon of a diffusion core over `set`: `floor(alpha / conductance)`.
/// Errors with [`Error::NoBoundary`] when no edge leaves the set, since the
/// conductance is then zero and the horizon unbounded.
pub fn core_horizon(graph: &Graph, set: &NodeSet, alpha: f64) -> Result<u64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let cut = cut_edges(graph, set);
    if cut == 0 {
        return Err(Error::NoBoundary);
    }
    Ok((alpha * set.volume() as f64 / cut as f64 + 1e-9).floor() as u64)
}

/// The diffusion core of `set`: members whose walk stays inside `set` for
/// the core horizon with probability at least `params.beta`.
pub fn diffusion_core(graph: &Graph, set: &NodeSet, params: CoreParams) -> Result<NodeSet> {
    let horizon = core_horizon(graph, set, params.alpha)?;
    let stay = stay_probabilities(graph, set, horizon);
    let members = set
        .iter()
        .zip(stay)
        .filter_map(|(v, s)| (s >= params.beta - 1e-12).then_some(v))
        .collect();
    NodeSet::new(graph, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::rng;
    use proptest::prelude::*;

    fn two_nodes() -> Graph {
        Graph::from_edges(2, &[(0, 1)]).unwrap()
    }

    fn dumbbell8() -> Graph {
        GraphSpec::Dumbbell {
            half: 8,
            d: 8,
            bridges: 1,
        }
        .generate(0)
        .unwrap()
    }

    #[test]
    fn single_edge_walk_mixes_in_one_step() {
        let graph = two_nodes();
        let out = propagate(&graph, &Distribution::point(&graph, 0).unwrap(), 1).unwrap();
        assert_eq!(out.weights(), &[0.5, 0.5]);
        assert_eq!(collision_probability(&graph, 0, 1).unwrap(), 0.5);
    }

    #[test]
    fn loop_slots_feed_the_stay_probability() {
        // Node 0 has one loop and one edge: stay 1/2 + 1/4, leave 1/4.
        let graph = Graph::from_edges(2, &[(0, 1), (0, 0)]).unwrap();
        let out = walk_step(&graph, &Distribution::point(&graph, 0).unwrap()).unwrap();
        assert_eq!(out.weights(), &[0.75, 0.25]);
    }

    #[test]
    fn uniform_is_stationary_on_regular_graphs() {
        let graph = dumbbell8();
        let uniform = Distribution::uniform(&graph);
        let stepped = walk_step(&graph, &uniform).unwrap();
        for (a, b) in uniform.weights().iter().zip(stepped.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn collision_probability_equals_return_probability_of_doubled_walk() {
        // P is symmetric on regular graphs, so ||P^t e_v||^2 = (P^{2t} e_v)(v).
        let graph = dumbbell8();
        for t in [1, 3, 7] {
            let collision = collision_probability(&graph, 0, t).unwrap();
            let doubled = propagate(&graph, &Distribution::point(&graph, 0).unwrap(), 2 * t)
                .unwrap();
            assert!((collision - doubled.weights()[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_walk_matches_dense_propagation() {
        let graph = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 0)]).unwrap();
        let t = 3;
        let dense = propagate(&graph, &Distribution::point(&graph, 0).unwrap(), t).unwrap();
        let mut rng = rng::stream(5, &[rng::WALK]);
        let samples = 20_000;
        let mut counts = [0u32; 3];
        for _ in 0..samples {
            counts[sample_endpoint(&graph, 0, t, &mut rng) as usize] += 1;
        }
        for (count, expected) in counts.iter().zip(dense.weights()) {
            let freq = *count as f64 / samples as f64;
            assert!(
                (freq - expected).abs() < 0.02,
                "freq {freq} vs expected {expected}"
            );
        }
    }

    #[test]
    fn bridge_endpoint_stay_probability_is_fifteen_sixteenths() {
        let graph = dumbbell8();
        let side = NodeSet::new(&graph, (0..8).collect()).unwrap();
        let stay = stay_probabilities(&graph, &side, 1);
        // Node 0 holds the bridge: 1/2 lazy + 7 of 8 slots stay inside.
        assert_eq!(stay[0], 15.0 / 16.0);
        for &s in &stay[1..] {
            assert_eq!(s, 1.0);
        }
        assert_eq!(
            stay_probability(&graph, &side, 0, 1).unwrap(),
            15.0 / 16.0
        );
        assert!(matches!(
            stay_probability(&graph, &side, 12, 1),
            Err(Error::NotInSet { node: 12 })
        ));
    }

    #[test]
    fn canonical_core_of_dumbbell_side_keeps_everything() {
        let graph = dumbbell8();
        let side = NodeSet::new(&graph, (0..8).collect()).unwrap();
        // conductance 1/64, so the horizon is floor(64/40) = 1.
        assert_eq!(core_horizon(&graph, &side, 1.0 / 40.0).unwrap(), 1);
        let core = diffusion_core(&graph, &side, CoreParams::canonical()).unwrap();
        assert_eq!(core.members(), side.members());
    }

    #[test]
    fn inner_core_drops_the_bridge_endpoint() {
        let graph = dumbbell8();
        let side = NodeSet::new(&graph, (0..8).collect()).unwrap();
        // Horizon floor(64/30) = 2; node 0 stays with probability 29/32,
        // shy of 39/40, while the other seven stay with 255/256.
        let core = diffusion_core(&graph, &side, CoreParams::inner()).unwrap();
        assert_eq!(core.members(), &[1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn core_horizon_needs_a_boundary() {
        let graph =
            Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let triangle = NodeSet::new(&graph, vec![0, 1, 2]).unwrap();
        assert!(matches!(
            core_horizon(&graph, &triangle, 1.0 / 40.0),
            Err(Error::NoBoundary)
        ));
    }

    proptest! {
        #[test]
        fn walks_preserve_mass_and_respect_the_norm_floor(
            (n, edges, v, t) in (2u32..8).prop_flat_map(|n| {
                (
                    Just(n),
                    prop::collection::vec((0..n, 0..n), 1..24),
                    0..n,
                    0u64..6,
                )
            })
        ) {
            let graph = Graph::from_edges(n, &edges).unwrap();
            let start = Distribution::point(&graph, v).unwrap();
            let out = propagate(&graph, &start, t).unwrap();
            prop_assert!((out.mass() - 1.0).abs() < 1e-9);
            prop_assert!(out.weights().iter().all(|&w| w >= 0.0));
            // Any probability vector on n nodes has 2-norm at least 1/sqrt(n).
            prop_assert!(out.norm2() >= 1.0 / (n as f64).sqrt() - 1e-9);
        }
    }
}

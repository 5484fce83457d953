//! Query-cost accounting.
//!
//! Each tester run owns one ledger. Classical oracle accesses (uniform node,
//! degree, neighbor) are counted directly; the evolving-set-process cost and
//! the quantum estimator are charged in their own modeled units so that
//! complexity trends can be fit per component.

use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    /// Uniform random node draws.
    pub uniform_node: u64,
    /// Degree queries.
    pub degree: u64,
    /// Neighbor-slot queries (classical walk steps).
    pub neighbor: u64,
    /// Evolving-set-process cost units: d(S_0) + Σ (d(S_i △ S_{i-1}) + |∂S_{i-1}|).
    pub esp_cost: u64,
    /// Modeled quantum query units charged by the norm estimator.
    pub quantum_queries: u64,
    /// Modeled QRAM units: seed-set preparation plus estimator reflections.
    pub qram_units: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total modeled cost: ESP classical cost + estimator quantum cost + QRAM cost.
    pub fn total_modeled(&self) -> u64 {
        self.esp_cost + self.quantum_queries + self.qram_units
    }

    /// Accumulates another ledger into this one.
    pub fn absorb(&mut self, other: &QueryLedger) {
        self.uniform_node += other.uniform_node;
        self.degree += other.degree;
        self.neighbor += other.neighbor;
        self.esp_cost += other.esp_cost;
        self.quantum_queries += other.quantum_queries;
        self.qram_units += other.qram_units;
    }
}

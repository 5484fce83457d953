//! Expansion testers: the classical endpoint-collision baseline, the
//! fast-forwarded singleton tester, and the seeded tester that grows
//! candidate sets before probing them.
//!
//! All three consume a regular graph, decide between "expander" and "far
//! from every expander", and account for their work in a [`QueryLedger`].
//! A tester run is a pure function of the graph, the configuration, and
//! the random stream: identical inputs yield identical verdicts, ledgers
//! included.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esp::{run_esp, StopReason, StopRule};
use crate::graph::{set_expansion, Graph, NodeSet};
use crate::ledger::QueryLedger;
use crate::qff::{estimate_norm, qram_prep_cost, NormBackend};
use crate::walk::sample_endpoint;

/// Testers selectable at the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TesterKind {
    /// Classical random-walk endpoint-collision baseline.
    Gr,
    /// Fast-forwarded collision-norm tester probing single nodes.
    Qff,
    /// Fast-forwarded tester probing grown seed sets.
    SeededQff,
}

/// Parameter regime. `Paper` instantiates the analysis constants verbatim;
/// `Desk` shrinks repetition and step counts so full experiment grids
/// finish on a workstation while preserving the scaling exponents under
/// study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Paper,
    Desk,
}

/// Iterations per run under the desk profile (fast-forwarded testers
/// only; the collision baseline keeps its own start count).
pub const DESK_ITERATIONS: u64 = 40;

/// Desk divisor applied to the probe walk length and the growth horizon.
pub const DESK_TIME_SCALE: f64 = 64.0;

/// Desk divisor applied to the growth budget: exactly the safety constant
/// of the budget formula, so the desk budget keeps every instance-dependent
/// factor. Reusing [`DESK_TIME_SCALE`] here would leave the budget so loose
/// that grown sets engulf whole instances, flattening the size dependence
/// the desk grid exists to expose.
pub fn desk_budget_scale() -> f64 {
    800.0 * 5.0_f64.sqrt()
}

/// Explicit parameter replacements, applied after profile scaling. Each
/// field mirrors one `--override` key.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    /// `K`: iterations per run (start nodes, for the collision baseline).
    pub iterations: Option<u64>,
    /// `t`: walk length probed by the norm estimator.
    pub walk_len: Option<u64>,
    /// `T`: growth step horizon.
    pub horizon: Option<u64>,
    /// `B`: growth cost budget.
    pub budget: Option<u64>,
    /// `theta`: growth conductance target.
    pub theta: Option<f64>,
    /// `time_scale`: divisor for the walk length and the horizon.
    pub time_scale: Option<f64>,
    /// `budget_scale`: divisor for the budget.
    pub budget_scale: Option<f64>,
    /// `backend`: how norm estimates are produced.
    pub backend: Option<NormBackend>,
}

/// What a tester is asked to distinguish: `d`-regular instances on `n`
/// nodes with expansion at least `phi`, versus instances `eps_dist`-far
/// from every such expander.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TesterConfig {
    pub n: usize,
    pub d: u32,
    /// Expansion the accept class is tested against.
    pub phi: f64,
    /// Distance parameter of the reject class.
    pub eps_dist: f64,
    /// Degree-dependent constant in the far-instance characterization;
    /// recorded alongside experiments, never consulted by the testers.
    pub rd_constant: f64,
    pub profile: Profile,
    pub overrides: Overrides,
}

impl TesterConfig {
    /// A paper-profile configuration with the default far-instance
    /// constant and no overrides.
    pub fn new(n: usize, d: u32, phi: f64, eps_dist: f64) -> Result<Self> {
        let cfg = TesterConfig {
            n,
            d,
            phi,
            eps_dist,
            rd_constant: 1.0,
            profile: Profile::Paper,
            overrides: Overrides::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    /// Checks the documented parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "testers need at least two nodes, got {}",
                self.n
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameter(
                "testers need a positive degree".into(),
            ));
        }
        if !(self.phi > 0.0 && self.phi <= self.d as f64) {
            return Err(Error::InvalidParameter(format!(
                "expansion target must lie in (0, d], got {}",
                self.phi
            )));
        }
        if !(self.eps_dist > 0.0 && self.eps_dist < 1.0 / 16.0) {
            return Err(Error::InvalidParameter(format!(
                "distance parameter must lie in (0, 1/16), got {}",
                self.eps_dist
            )));
        }
        if !self.rd_constant.is_finite() || self.rd_constant <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "far-instance constant must be positive, got {}",
                self.rd_constant
            )));
        }
        if self.overrides.iterations == Some(0) {
            return Err(Error::InvalidParameter(
                "iteration override must be positive".into(),
            ));
        }
        for (name, scale) in [
            ("time scale", self.overrides.time_scale),
            ("budget scale", self.overrides.budget_scale),
        ] {
            if let Some(scale) = scale {
                if !scale.is_finite() || scale <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "{name} override must be positive, got {scale}"
                    )));
                }
            }
        }
        if let Some(theta) = self.overrides.theta {
            if !theta.is_finite() || theta < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "conductance target override must be nonnegative, got {theta}"
                )));
            }
        }
        Ok(())
    }
}

/// Concrete run parameters for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    /// `K`: iterations per run.
    pub iterations: u64,
    /// `t`: walk length probed by the norm estimator.
    pub walk_len: u64,
    /// Estimator failure probability.
    pub delta: f64,
    /// `theta`: growth conductance target.
    pub theta: f64,
    /// `M`: volume cap entering the budget formula.
    pub volume_cap: u64,
    /// `B`: growth cost budget.
    pub budget: u64,
    /// `T`: growth step horizon.
    pub horizon: u64,
    pub backend: NormBackend,
}

/// Instantiates the tester parameter schedule for `cfg`:
/// `t = ceil(16 d^2 phi^-2 ln n)`, `delta = eps/1000`,
/// `K = ceil(200 / (eps (1 - delta)))`, `theta = phi / (2d)`,
/// `M = ceil(n^(1/3) d)`, `B = ceil(800 sqrt(5) M d phi^-1 ln m)`, and
/// `T = ceil(320 phi^-2 d^2 ln m)` with `m = nd/2`, then applies the
/// profile divisors and finally any explicit overrides.
pub fn resolve_params(cfg: &TesterConfig) -> Result<ResolvedParams> {
    cfg.validate()?;
    let n = cfg.n as f64;
    let d = cfg.d as f64;
    let phi = cfg.phi;
    let eps = cfg.eps_dist;
    let m = n * d / 2.0;
    let delta = eps / 1000.0;
    let walk_len = (16.0 * d * d / (phi * phi) * n.ln()).ceil() as u64;
    let iterations = (200.0 / (eps * (1.0 - delta))).ceil() as u64;
    let theta = phi / (2.0 * d);
    let volume_cap = (n.cbrt() * d).ceil() as u64;
    let budget =
        (800.0 * 5.0_f64.sqrt() * volume_cap as f64 * d / phi * m.ln()).ceil() as u64;
    let horizon = (320.0 / (phi * phi) * d * d * m.ln()).ceil() as u64;

    let (default_iterations, time_scale, budget_scale) = match cfg.profile {
        Profile::Paper => (iterations, 1.0, 1.0),
        Profile::Desk => (DESK_ITERATIONS, DESK_TIME_SCALE, desk_budget_scale()),
    };
    let time_scale = cfg.overrides.time_scale.unwrap_or(time_scale);
    let budget_scale = cfg.overrides.budget_scale.unwrap_or(budget_scale);
    let shrink = |full: u64, scale: f64| ((full as f64 / scale).ceil() as u64).max(1);

    Ok(ResolvedParams {
        iterations: cfg.overrides.iterations.unwrap_or(default_iterations),
        walk_len: cfg
            .overrides
            .walk_len
            .unwrap_or_else(|| shrink(walk_len, time_scale)),
        delta,
        theta: cfg.overrides.theta.unwrap_or(theta),
        volume_cap,
        budget: cfg
            .overrides
            .budget
            .unwrap_or_else(|| shrink(budget, budget_scale)),
        horizon: cfg
            .overrides
            .horizon
            .unwrap_or_else(|| shrink(horizon, time_scale)),
        backend: cfg.overrides.backend.unwrap_or(NormBackend::Noisy),
    })
}

/// Estimator accuracy used for a seed set of `size` nodes out of `n`:
/// `sqrt(size / n) * (sqrt(1 + 1/256) - 1) / 4`.
pub fn eps_prime(size: usize, n: usize) -> f64 {
    (size as f64 / n as f64).sqrt() * ((1.0 + 1.0 / 256.0_f64).sqrt() - 1.0) / 4.0
}

/// Acceptance threshold compared against the norm estimate for a seed set
/// of `size` nodes: `sqrt(size/n * (1 + 1/n)) + eps_prime(size, n)`.
pub fn accept_threshold(size: usize, n: usize) -> f64 {
    let nf = n as f64;
    (size as f64 / nf * (1.0 + 1.0 / nf)).sqrt() + eps_prime(size, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Accept,
    Reject,
}

/// Why a run rejected. The collision baseline reports
/// [`RejectReason::NormThreshold`] as well: a pairwise endpoint-collision
/// excess and a large walk norm are the same event measured two ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    CutWitness,
    NormThreshold,
}

/// One tester iteration: the drawn seed node plus whatever the tester
/// measured for it. Fields a given tester does not produce stay `None`
/// (growth data for the singleton testers, collision counts for the
/// fast-forwarded ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub iteration: u64,
    pub seed_node: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub esp_stop: Option<StopReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collisions: Option<u64>,
}

/// Outcome of one tester run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<RejectReason>,
    /// Sorted members of the rejecting cut, when one was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
    pub rows: Vec<IterationRow>,
    pub ledger: QueryLedger,
}

fn check_instance(graph: &Graph, cfg: &TesterConfig) -> Result<()> {
    if graph.node_count() != cfg.n {
        return Err(Error::InvalidParameter(format!(
            "configuration expects {} nodes, graph has {}",
            cfg.n,
            graph.node_count()
        )));
    }
    if graph.regular_degree() != Some(cfg.d) {
        return Err(Error::InvalidParameter(format!(
            "testers need a {}-regular graph; regularize the input first",
            cfg.d
        )));
    }
    Ok(())
}

/// Runs the selected tester.
pub fn run_tester<R: Rng>(
    kind: TesterKind,
    graph: &Graph,
    cfg: &TesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    match kind {
        TesterKind::Gr => gr_tester(graph, cfg, rng),
        TesterKind::Qff => qff_tester(graph, cfg, rng),
        TesterKind::SeededQff => seeded_qff_tester(graph, cfg, rng),
    }
}

/// The seeded tester. Each iteration draws a uniform node, grows a
/// candidate set around it, rejects outright when the grown set is a small
/// sparse cut (at most half the nodes with expansion at most `phi / 2`),
/// and otherwise compares a norm estimate for the grown set against
/// [`accept_threshold`]. Accepts once no iteration has rejected.
pub fn seeded_qff_tester<R: Rng>(
    graph: &Graph,
    cfg: &TesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    check_instance(graph, cfg)?;
    let params = resolve_params(cfg)?;
    let rule = StopRule {
        theta: params.theta,
        horizon: params.horizon,
        budget: params.budget,
    };
    let mut ledger = QueryLedger::new();
    let mut rows = Vec::new();
    for iteration in 0..params.iterations {
        let seed_node = rng.gen_range(0..graph.node_count() as u32);
        ledger.uniform_node += 1;
        let start = NodeSet::singleton(graph, seed_node)?;
        let transcript = run_esp(graph, &start, &rule, rng)?;
        ledger.esp_cost += transcript.cost;
        let set = transcript.stopped();
        if 2 * set.len() <= cfg.n && set_expansion(graph, set)? <= cfg.phi / 2.0 {
            rows.push(IterationRow {
                iteration,
                seed_node,
                esp_stop: Some(transcript.reason),
                set_size: Some(set.len()),
                estimate: None,
                threshold: None,
                collisions: None,
            });
            return Ok(Verdict {
                decision: Decision::Reject,
                reason: Some(RejectReason::CutWitness),
                witness: Some(set.members().to_vec()),
                rows,
                ledger,
            });
        }
        let accuracy = eps_prime(set.len(), cfg.n);
        let estimate = estimate_norm(
            graph,
            set,
            params.walk_len,
            accuracy,
            params.delta,
            params.backend,
            rng,
        )?;
        ledger.quantum_queries += estimate.modeled_query_cost;
        ledger.qram_units += estimate.modeled_qram_cost + qram_prep_cost(set.len(), cfg.n);
        let threshold = accept_threshold(set.len(), cfg.n);
        rows.push(IterationRow {
            iteration,
            seed_node,
            esp_stop: Some(transcript.reason),
            set_size: Some(set.len()),
            estimate: Some(estimate.value),
            threshold: Some(threshold),
            collisions: None,
        });
        if estimate.value > threshold {
            return Ok(Verdict {
                decision: Decision::Reject,
                reason: Some(RejectReason::NormThreshold),
                witness: None,
                rows,
                ledger,
            });
        }
    }
    Ok(Verdict {
        decision: Decision::Accept,
        reason: None,
        witness: None,
        rows,
        ledger,
    })
}

/// The singleton tester: fast-forwarded norm probes at uniformly drawn
/// nodes, no growth stage.
pub fn qff_tester<R: Rng>(graph: &Graph, cfg: &TesterConfig, rng: &mut R) -> Result<Verdict> {
    check_instance(graph, cfg)?;
    let params = resolve_params(cfg)?;
    let accuracy = eps_prime(1, cfg.n);
    let threshold = accept_threshold(1, cfg.n);
    let mut ledger = QueryLedger::new();
    let mut rows = Vec::new();
    for iteration in 0..params.iterations {
        let seed_node = rng.gen_range(0..graph.node_count() as u32);
        ledger.uniform_node += 1;
        let set = NodeSet::singleton(graph, seed_node)?;
        let estimate = estimate_norm(
            graph,
            &set,
            params.walk_len,
            accuracy,
            params.delta,
            params.backend,
            rng,
        )?;
        ledger.quantum_queries += estimate.modeled_query_cost;
        ledger.qram_units += estimate.modeled_qram_cost + qram_prep_cost(1, cfg.n);
        rows.push(IterationRow {
            iteration,
            seed_node,
            esp_stop: None,
            set_size: Some(1),
            estimate: Some(estimate.value),
            threshold: Some(threshold),
            collisions: None,
        });
        if estimate.value > threshold {
            return Ok(Verdict {
                decision: Decision::Reject,
                reason: Some(RejectReason::NormThreshold),
                witness: None,
                rows,
                ledger,
            });
        }
    }
    Ok(Verdict {
        decision: Decision::Accept,
        reason: None,
        witness: None,
        rows,
        ledger,
    })
}

/// Number of start nodes the collision baseline uses: `ceil(8 / eps)`.
pub fn gr_start_count(eps_dist: f64) -> u64 {
    (8.0 / eps_dist).ceil() as u64
}

/// Number of walks per start node: `ceil(4 sqrt(n))`.
pub fn gr_walk_count(n: usize) -> u64 {
    (4.0 * (n as f64).sqrt()).ceil() as u64
}

/// Pairwise equal-endpoint collisions within one endpoint sample.
pub fn count_pair_collisions(endpoints: &mut [u32]) -> u64 {
    if endpoints.is_empty() {
        return 0;
    }
    endpoints.sort_unstable();
    let mut total = 0u64;
    let mut run = 1u64;
    for pair in endpoints.windows(2) {
        if pair[0] == pair[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// The classical baseline: from each of `ceil(8 / eps)` uniform start
/// nodes, run `ceil(4 sqrt(n))` independent lazy walks of the probe length
/// and count pairwise endpoint collisions. Rejects when the total across
/// all starts exceeds `(1 + 1/16)` times its expander-side expectation
/// `starts * C(walks, 2) / n`; the aggregate statistic is what separates
/// the two classes with workable confidence at these instance sizes.
pub fn gr_tester<R: Rng>(graph: &Graph, cfg: &TesterConfig, rng: &mut R) -> Result<Verdict> {
    check_instance(graph, cfg)?;
    let params = resolve_params(cfg)?;
    let starts = cfg
        .overrides
        .iterations
        .unwrap_or_else(|| gr_start_count(cfg.eps_dist));
    let walks = gr_walk_count(cfg.n);
    let pairs = walks * (walks - 1) / 2;
    let threshold = (1.0 + 1.0 / 16.0) * (starts * pairs) as f64 / cfg.n as f64;
    let mut ledger = QueryLedger::new();
    let mut rows = Vec::with_capacity(starts as usize);
    let mut endpoints = vec![0u32; walks as usize];
    let mut total = 0u64;
    for iteration in 0..starts {
        let seed_node = rng.gen_range(0..graph.node_count() as u32);
        ledger.uniform_node += 1;
        for endpoint in endpoints.iter_mut() {
            *endpoint = sample_endpoint(graph, seed_node, params.walk_len, rng);
        }
        ledger.neighbor += walks * params.walk_len;
        let collisions = count_pair_collisions(&mut endpoints);
        total += collisions;
        rows.push(IterationRow {
            iteration,
            seed_node,
            esp_stop: None,
            set_size: None,
            estimate: None,
            threshold: None,
            collisions: Some(collisions),
        });
    }
    if total as f64 > threshold {
        Ok(Verdict {
            decision: Decision::Reject,
            reason: Some(RejectReason::NormThreshold),
            witness: None,
            rows,
            ledger,
        })
    } else {
        Ok(Verdict {
            decision: Decision::Accept,
            reason: None,
            witness: None,
            rows,
            ledger,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::rng::{stream, TRIAL};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reference_instance_parameters() {
        let cfg = TesterConfig::new(1024, 4, 0.5, 0.01).unwrap();
        let params = resolve_params(&cfg).unwrap();
        assert_eq!(params.walk_len, 7098);
        assert_eq!(params.iterations, 20001);
        assert!(close(params.delta, 1e-5, 1e-12));
        assert!(close(params.theta, 0.0625, 0.0));
        assert_eq!(params.volume_cap, 41);
        assert_eq!(params.budget, 4_473_702);
        assert_eq!(params.horizon, 156_153);
        assert_eq!(params.backend, NormBackend::Noisy);
    }

    #[test]
    fn desk_profile_divides_time_and_budget() {
        let cfg = TesterConfig::new(1024, 4, 0.5, 0.01)
            .unwrap()
            .with_profile(Profile::Desk);
        let params = resolve_params(&cfg).unwrap();
        assert_eq!(params.iterations, 40);
        assert_eq!(params.walk_len, 111);
        assert_eq!(params.horizon, 2440);
        assert_eq!(params.budget, 2501);
        // Unscaled quantities are untouched.
        assert!(close(params.theta, 0.0625, 0.0));
        assert_eq!(params.volume_cap, 41);
    }

    #[test]
    fn explicit_overrides_replace_resolved_values() {
        let cfg = TesterConfig::new(1024, 4, 0.5, 0.01)
            .unwrap()
            .with_profile(Profile::Desk)
            .with_overrides(Overrides {
                iterations: Some(7),
                walk_len: Some(5000),
                horizon: Some(3),
                budget: Some(9),
                theta: Some(0.125),
                backend: Some(NormBackend::Exact),
                ..Overrides::default()
            });
        let params = resolve_params(&cfg).unwrap();
        assert_eq!(params.iterations, 7);
        assert_eq!(params.walk_len, 5000);
        assert_eq!(params.horizon, 3);
        assert_eq!(params.budget, 9);
        assert!(close(params.theta, 0.125, 0.0));
        assert_eq!(params.backend, NormBackend::Exact);
    }

    #[test]
    fn scale_overrides_divide_the_full_values() {
        let cfg = TesterConfig::new(1024, 4, 0.5, 0.01)
            .unwrap()
            .with_overrides(Overrides {
                time_scale: Some(64.0),
                budget_scale: Some(64.0),
                ..Overrides::default()
            });
        let params = resolve_params(&cfg).unwrap();
        assert_eq!(params.walk_len, 111); // ceil(7098 / 64)
        assert_eq!(params.horizon, 2440); // ceil(156153 / 64)
        assert_eq!(params.budget, 69_902); // ceil(4473702 / 64)
        assert_eq!(params.iterations, 20001); // paper default kept
    }

    #[test]
    fn config_bounds_are_enforced() {
        assert!(TesterConfig::new(1, 4, 0.5, 0.01).is_err());
        assert!(TesterConfig::new(16, 0, 0.5, 0.01).is_err());
        assert!(TesterConfig::new(16, 4, 0.0, 0.01).is_err());
        assert!(TesterConfig::new(16, 4, 4.5, 0.01).is_err());
        assert!(TesterConfig::new(16, 4, 0.5, 0.0625).is_err());
        assert!(TesterConfig::new(16, 4, 0.5, 0.0).is_err());
        let zero_iterations = TesterConfig::new(16, 4, 0.5, 0.01)
            .unwrap()
            .with_overrides(Overrides {
                iterations: Some(0),
                ..Overrides::default()
            });
        assert!(zero_iterations.validate().is_err());
    }

    #[test]
    fn graph_and_config_must_agree() {
        let graph = Graph::complete(4).unwrap(); // 3-regular
        let cfg = TesterConfig::new(4, 4, 0.5, 0.01).unwrap();
        let mut rng = stream(1, &[TRIAL]);
        let err = seeded_qff_tester(&graph, &cfg, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));

        let eight = Graph::complete(8).unwrap();
        let mismatched = TesterConfig::new(16, 7, 0.5, 0.01).unwrap();
        let err = qff_tester(&eight, &mismatched, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn estimator_accuracy_and_threshold_are_frozen() {
        assert!(close(eps_prime(41, 1024), 9.760869399528e-5, 1e-15));
        assert!(close(accept_threshold(41, 1024), 0.200292921194, 1e-11));
        // Monotone in the set size, as the estimates it guards are.
        assert!(eps_prime(1, 1024) < eps_prime(41, 1024));
        assert!(accept_threshold(1, 1024) < accept_threshold(41, 1024));
    }

    #[test]
    fn two_node_instance_accepts_with_exact_charges() {
        let graph = Graph::complete(2).unwrap();
        let cfg = TesterConfig::new(2, 1, 1.0, 0.01)
            .unwrap()
            .with_overrides(Overrides {
                iterations: Some(3),
                backend: Some(NormBackend::Exact),
                ..Overrides::default()
            });
        let mut rng = stream(5, &[TRIAL]);
        let verdict = qff_tester(&graph, &cfg, &mut rng).unwrap();
        // The walk settles on the uniform distribution, whose norm
        // sqrt(1/2) clears the small-instance threshold sqrt(3)/2 plus
        // slack by a wide margin, so even this degenerate instance
        // accepts.
        assert_eq!(verdict.decision, Decision::Accept);
        assert_eq!(verdict.reason, None);
        assert_eq!(verdict.rows.len(), 3);
        for row in &verdict.rows {
            assert!(close(row.estimate.unwrap(), 0.5f64.sqrt(), 1e-12));
            assert!(close(row.threshold.unwrap(), 0.8663703, 1e-6));
        }
        // t = 12, eps' = sqrt(1/2) * (sqrt(257/256) - 1) / 4, delta = 1e-5:
        // ceil(sqrt 12) * ceil(sqrt 1) * ceil(1/eps') * ceil(ln 1e5)
        //   = 4 * 1 * 2900 * 12 per iteration, reflections 2900 * 12,
        // QRAM prep 1 * ceil(ln 2) = 1.
        let expected = QueryLedger {
            uniform_node: 3,
            degree: 0,
            neighbor: 0,
            esp_cost: 0,
            quantum_queries: 3 * 139_200,
            qram_units: 3 * 34_801,
        };
        assert_eq!(verdict.ledger, expected);
        assert_eq!(
            verdict.ledger.total_modeled(),
            3 * 139_200 + 3 * 34_801
        );
    }

    #[test]
    fn clique_instance_accepts_every_iteration() {
        let graph = Graph::complete(8).unwrap();
        let cfg = TesterConfig::new(8, 7, 1.0, 0.01)
            .unwrap()
            .with_overrides(Overrides {
                iterations: Some(25),
                ..Overrides::default()
            });
        let mut rng = stream(11, &[TRIAL]);
        let verdict = seeded_qff_tester(&graph, &cfg, &mut rng).unwrap();
        assert_eq!(verdict.decision, Decision::Accept);
        assert_eq!(verdict.rows.len(), 25);
        assert!(verdict.witness.is_none());
        // Growth engulfs the clique, so the sparse-cut check never sees a
        // small set and every iteration falls through to the norm probe.
        for row in &verdict.rows {
            assert!(row.set_size.unwrap() > 4);
            assert!(row.estimate.unwrap() <= row.threshold.unwrap());
        }
        assert!(verdict.ledger.esp_cost > 0);
        assert!(verdict.ledger.quantum_queries > 0);
    }

    #[test]
    fn dumbbell_rejects_with_a_verified_cut_witness() {
        let graph = GraphSpec::Dumbbell {
            half: 8,
            d: 8,
            bridges: 1,
        }
        .generate(3)
        .unwrap();
        let cfg = TesterConfig::new(16, 8, 1.0, 0.01).unwrap();
        let mut cut_witnesses = 0;
        for seed in 0..20 {
            let mut rng = stream(seed, &[TRIAL]);
            let verdict = seeded_qff_tester(&graph, &cfg, &mut rng).unwrap();
            assert_eq!(verdict.decision, Decision::Reject, "seed {seed}");
            if verdict.reason == Some(RejectReason::CutWitness) {
                cut_witnesses += 1;
                let members = verdict.witness.expect("cut rejections carry a witness");
                assert!(2 * members.len() <= 16);
                let set = NodeSet::new(&graph, members).unwrap();
                assert!(set_expansion(&graph, &set).unwrap() <= 0.5);
            }
        }
        assert!(
            cut_witnesses >= 10,
            "expected mostly cut witnesses, saw {cut_witnesses}/20"
        );
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let graph = GraphSpec::Dumbbell {
            half: 8,
            d: 8,
            bridges: 1,
        }
        .generate(3)
        .unwrap();
        let cfg = TesterConfig::new(16, 8, 1.0, 0.01).unwrap();
        let first = seeded_qff_tester(&graph, &cfg, &mut stream(9, &[TRIAL])).unwrap();
        let second = seeded_qff_tester(&graph, &cfg, &mut stream(9, &[TRIAL])).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn collision_counts_match_a_recount() {
        assert_eq!(count_pair_collisions(&mut []), 0);
        assert_eq!(count_pair_collisions(&mut [5]), 0);
        assert_eq!(count_pair_collisions(&mut [1, 2, 1, 1]), 3);
        assert_eq!(count_pair_collisions(&mut [2, 2, 2, 2]), 6);
        assert_eq!(count_pair_collisions(&mut [3, 1, 4, 1, 5]), 1);
    }

    #[test]
    fn two_node_collision_expectation() {
        // Four walks from one endpoint of a single edge: each endpoint
        // lands uniformly, so the expected number of colliding pairs is
        // C(4,2) / 2 = 3.
        let graph = Graph::complete(2).unwrap();
        let mut rng = stream(21, &[TRIAL]);
        let reps = 20_000;
        let mut total = 0u64;
        for _ in 0..reps {
            let mut endpoints: Vec<u32> = (0..4)
                .map(|_| sample_endpoint(&graph, 0, 3, &mut rng))
                .collect();
            total += count_pair_collisions(&mut endpoints);
        }
        let mean = total as f64 / reps as f64;
        assert!(close(mean, 3.0, 0.05), "mean collisions {mean}");
    }

    #[test]
    fn collision_baseline_accepts_the_tiny_expander() {
        let graph = Graph::complete(2).unwrap();
        let cfg = TesterConfig::new(2, 1, 1.0, 0.01).unwrap();
        let mut rng = stream(4, &[TRIAL]);
        let verdict = gr_tester(&graph, &cfg, &mut rng).unwrap();
        assert_eq!(verdict.decision, Decision::Accept);
        assert_eq!(verdict.rows.len(), 800);
        // ceil(8/eps) = 800 starts, ceil(4 sqrt 2) = 6 walks, t = 12.
        assert_eq!(verdict.ledger.uniform_node, 800);
        assert_eq!(verdict.ledger.neighbor, 800 * 6 * 12);
        let recount: u64 = verdict.rows.iter().map(|row| row.collisions.unwrap()).sum();
        let mean = recount as f64 / 800.0;
        // Expected collisions per start: C(6,2) / 2 = 7.5.
        assert!(close(mean, 7.5, 0.25), "mean collisions {mean}");
        let repeat = gr_tester(&graph, &cfg, &mut stream(4, &[TRIAL])).unwrap();
        assert_eq!(verdict, repeat);
    }

    #[test]
    fn baseline_keeps_its_own_start_count_under_desk() {
        let graph = Graph::complete(2).unwrap();
        let cfg = TesterConfig::new(2, 1, 1.0, 0.01)
            .unwrap()
            .with_profile(Profile::Desk);
        let mut rng = stream(6, &[TRIAL]);
        let verdict = gr_tester(&graph, &cfg, &mut rng).unwrap();
        // The desk iteration cut applies to the fast-forwarded testers;
        // the baseline always needs its full start count.
        assert_eq!(verdict.ledger.uniform_node, 800);
        // The probe length is still desk-scaled: ceil(12 / 64) = 1.
        assert_eq!(verdict.ledger.neighbor, 800 * 6);
    }

    #[test]
    fn run_tester_dispatches_by_kind() {
        let graph = Graph::complete(2).unwrap();
        let cfg = TesterConfig::new(2, 1, 1.0, 0.01)
            .unwrap()
            .with_overrides(Overrides {
                iterations: Some(2),
                ..Overrides::default()
            });
        for kind in [TesterKind::Gr, TesterKind::Qff, TesterKind::SeededQff] {
            let verdict = run_tester(kind, &graph, &cfg, &mut stream(8, &[TRIAL])).unwrap();
            assert_eq!(verdict.decision, Decision::Accept);
            match kind {
                TesterKind::Gr => assert!(verdict.rows[0].collisions.is_some()),
                TesterKind::Qff => assert!(verdict.rows[0].esp_stop.is_none()),
                TesterKind::SeededQff => assert!(verdict.rows[0].esp_stop.is_some()),
            }
        }
    }
}

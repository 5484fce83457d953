//! Cost-versus-size trend experiments: run a tester across an ascending
//! ladder of instance sizes, average the modeled query charges per trial,
//! and fit log-log slopes. A constant-per-trial control series is fitted
//! alongside the real costs so a broken pipeline (wrong averaging, wrong
//! transform) shows up as a non-flat control rather than a plausible but
//! meaningless exponent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::parallel::run_batch;
use crate::rng::{self, stream, GEN, TRIAL};
use crate::tester::{run_tester, Overrides, Profile, TesterConfig, TesterKind};

/// What to run at every rung of the size ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPlan {
    pub kind: TesterKind,
    /// Instance sizes, strictly ascending, at least four of them.
    pub sizes: Vec<usize>,
    /// Trials averaged per size.
    pub trials: usize,
    pub degree: u32,
    pub phi: f64,
    pub eps_dist: f64,
    pub profile: Profile,
    #[serde(default)]
    pub overrides: Overrides,
}

impl ScalingPlan {
    /// Desk-profile plan on 4-regular expanders, the configuration the
    /// trend experiments are calibrated for.
    pub fn desk(kind: TesterKind, sizes: Vec<usize>, trials: usize) -> Self {
        ScalingPlan {
            kind,
            sizes,
            trials,
            degree: 4,
            phi: 0.25,
            eps_dist: 0.01,
            profile: Profile::Desk,
            overrides: Overrides::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "a trend fit needs at least four sizes, got {}",
                self.sizes.len()
            )));
        }
        if !self.sizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "sizes must be strictly ascending".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        Ok(())
    }
}

/// Per-size averages of the ledger charges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub trials: usize,
    /// Mean modeled work per trial: walk, estimator, memory-prep and
    /// classical neighbor/degree charges combined.
    pub mean_total: f64,
    pub mean_esp: f64,
    pub mean_quantum: f64,
    pub mean_classical: f64,
    /// Mean seed draws per trial; constant by construction, the control.
    pub mean_control: f64,
}

/// Fitted log-log exponents. Component slopes are absent when that
/// component never charged anything on this tester.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub total_slope: f64,
    pub esp_slope: Option<f64>,
    pub quantum_slope: Option<f64>,
    pub classical_slope: Option<f64>,
    pub control_slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(xs: &[usize], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| ((x as f64).ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let var: f64 = pts.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    cov / var
}

fn component_slope(sizes: &[usize], means: &[f64]) -> Option<f64> {
    means
        .iter()
        .all(|&m| m > 0.0)
        .then(|| log_log_slope(sizes, means))
}

/// Runs the plan: one generated expander per size, `trials` independent
/// tester runs on it, ledger charges averaged, slopes fitted.
pub fn run_scaling(plan: &ScalingPlan, seed: u64, parallel: bool) -> Result<ScalingReport> {
    plan.validate()?;
    let mut points = Vec::with_capacity(plan.sizes.len());
    for &n in &plan.sizes {
        let graph = trend_instance(n, plan.degree, seed)?;
        let cfg = TesterConfig::new(n, plan.degree, plan.phi, plan.eps_dist)?
            .with_profile(plan.profile)
            .with_overrides(plan.overrides);
        let ledgers = run_batch(plan.trials, parallel, |trial| {
            let mut rng = stream(seed, &[TRIAL, n as u64, trial as u64]);
            run_tester(plan.kind, &graph, &cfg, &mut rng).map(|verdict| verdict.ledger)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let count = ledgers.len() as f64;
        let mean = |f: &dyn Fn(&crate::ledger::QueryLedger) -> u64| {
            ledgers.iter().map(|l| f(l) as f64).sum::<f64>() / count
        };
        let mean_esp = mean(&|l| l.esp_cost);
        let mean_quantum = mean(&|l| l.quantum_queries + l.qram_units);
        let mean_classical = mean(&|l| l.neighbor + l.degree);
        points.push(ScalingPoint {
            n,
            trials: ledgers.len(),
            mean_total: mean_esp + mean_quantum + mean_classical,
            mean_esp,
            mean_quantum,
            mean_classical,
            mean_control: mean(&|l| l.uniform_node),
        });
    }
    let sizes = &plan.sizes;
    let collect = |f: &dyn Fn(&ScalingPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
    Ok(ScalingReport {
        total_slope: log_log_slope(sizes, &collect(&|p| p.mean_total)),
        esp_slope: component_slope(sizes, &collect(&|p| p.mean_esp)),
        quantum_slope: component_slope(sizes, &collect(&|p| p.mean_quantum)),
        classical_slope: component_slope(sizes, &collect(&|p| p.mean_classical)),
        control_slope: log_log_slope(sizes, &collect(&|p| p.mean_control)),
        points,
    })
}

/// A connected random regular instance for one rung of the ladder.
fn trend_instance(n: usize, degree: u32, seed: u64) -> Result<Graph> {
    for attempt in 0..64u64 {
        let spec = crate::graph::GraphSpec::RandomRegular {
            n: n as u32,
            d: degree,
        };
        match spec.generate(rng::derive(seed, &[GEN, n as u64, attempt])) {
            Ok(graph) if graph.is_connected() => return Ok(graph),
            Ok(_) | Err(Error::GenerationFailed(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::GenerationFailed(format!(
        "no connected {degree}-regular instance on {n} nodes in 64 attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit_recovers_exact_power_laws() {
        let xs = [256usize, 512, 1024, 2048];
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * (x as f64).powf(0.5)).collect();
        assert!((log_log_slope(&xs, &ys) - 0.5).abs() < 1e-12);
        let flat: Vec<f64> = xs.iter().map(|_| 7.0).collect();
        assert!(log_log_slope(&xs, &flat).abs() < 1e-12);
    }

    #[test]
    fn plans_are_validated() {
        let mut plan = ScalingPlan::desk(TesterKind::Qff, vec![64, 128, 256], 2);
        assert!(run_scaling(&plan, 3, false).is_err());
        plan.sizes = vec![64, 128, 256, 256];
        assert!(run_scaling(&plan, 3, false).is_err());
        plan.sizes = vec![64, 128, 256, 512];
        plan.trials = 0;
        assert!(run_scaling(&plan, 3, false).is_err());
    }

    #[test]
    fn small_ladder_has_flat_control_and_growing_total() {
        let plan = ScalingPlan::desk(TesterKind::Qff, vec![64, 128, 256, 512], 3);
        let report = run_scaling(&plan, 3, true).unwrap();
        assert_eq!(report.points.len(), 4);
        assert!(report.control_slope.abs() <= 0.05, "control {}", report.control_slope);
        assert!(report.total_slope > 0.0, "total {}", report.total_slope);
        assert!(report.esp_slope.is_none());
        assert!(report.classical_slope.is_none());
        let again = run_scaling(&plan, 3, false).unwrap();
        assert_eq!(report, again);
    }
}

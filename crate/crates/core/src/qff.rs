//! Fast-forwarded walk powers and the modeled 2-norm estimator.
//!
//! The t-th power of the lazy walk applied to a unit vector is approximated
//! by a truncated Chebyshev expansion of the monomial x^t. Because the walk
//! matrix of a regular graph is symmetric with spectrum inside [0, 1], the
//! uniform approximation error of the polynomial carries over to the vector:
//! a degree of roughly sqrt(t) suffices for any fixed accuracy, which is the
//! quadratic fast-forwarding that the norm estimator's modeled query cost is
//! based on.
//!
//! The estimator itself reports the 2-norm of the fast-forwarded indicator,
//! either exactly or under an additive noise model: with probability
//! 1 - delta the error is uniform within eps_prime, otherwise within
//! 4 * eps_prime. Modeled query and QRAM costs are charged to the ledger by
//! the testers regardless of backend.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::walk::apply_walk_matrix;

// ---- Chebyshev expansion of x^t ----

/// Truncated Chebyshev expansion of the monomial x^t on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ChebExpansion {
    power: u64,
    epsilon: f64,
    coefficients: Vec<f64>,
}

impl ChebExpansion {
    pub fn power(&self) -> u64 {
        self.power
    }

    /// Target truncation error of the expansion.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Truncation degree D.
    pub fn degree(&self) -> u64 {
        self.coefficients.len() as u64 - 1
    }

    /// Coefficient of the k-th Chebyshev polynomial, for k = 0..=D. Entries
    /// of parity opposite to t are zero.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Evaluates the expansion at a scalar via the three-term recurrence.
    pub fn evaluate(&self, x: f64) -> f64 {
        let mut previous = 1.0;
        let mut current = x;
        let mut total = self.coefficients[0];
        for &c in &self.coefficients[1..] {
            total += c * current;
            let next = 2.0 * x * current - previous;
            previous = current;
            current = next;
        }
        total
    }
}

/// Chebyshev coefficients of x^t truncated at degree
/// `D = min(t, ceil(sqrt(2 t ln(2 / epsilon))))`, which keeps the uniform
/// error on [-1, 1] at most `epsilon`.
///
/// The exact coefficients are central binomial weights: c_k = 2^(1-t) *
/// binom(t, (t-k)/2) for k > 0 of the same parity as t, and half that for
/// k = 0. They are computed from the center of the binomial outward with a
/// multiplicative recurrence, seeded in log space so that 2^-t never
/// underflows.
pub fn cheb_coeffs(power: u64, epsilon: f64) -> Result<ChebExpansion> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation error must lie in (0, 2), got {epsilon}"
        )));
    }
    if power == 0 {
        return Ok(ChebExpansion {
            power,
            epsilon,
            coefficients: vec![1.0],
        });
    }
    let t = power;
    let bound = (2.0 * t as f64 * (2.0 / epsilon).ln()).sqrt().ceil() as u64;
    let degree = bound.min(t);
    let mut coefficients = vec![0.0f64; degree as usize + 1];

    // ln of the central binomial weight 2^-t * binom(t, floor(t/2)).
    let center = t / 2;
    let mut ln_b = -(t as f64) * std::f64::consts::LN_2;
    for i in 0..center {
        ln_b += ((t - center + 1 + i) as f64).ln() - ((i + 1) as f64).ln();
    }

    let mut b = ln_b.exp();
    let mut j = center;
    let mut k = t % 2;
    loop {
        coefficients[k as usize] = if k == 0 { b } else { 2.0 * b };
        k += 2;
        if k > degree {
            break;
        }
        // One step outward: b_(j-1) = b_j * j / (t - j + 1).
        b *= j as f64 / (t - j + 1) as f64;
        j -= 1;
    }
    Ok(ChebExpansion {
        power,
        epsilon,
        coefficients,
    })
}

// ---- fast-forwarded walk powers ----

/// The 2-norm unit indicator of `set`: 1/sqrt(|S|) on members, 0 elsewhere.
pub fn unit_indicator(graph: &Graph, set: &NodeSet) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut vector = vec![0.0f64; graph.node_count()];
    let amplitude = 1.0 / (set.len() as f64).sqrt();
    for v in set.iter() {
        vector[v as usize] = amplitude;
    }
    Ok(vector)
}

/// Applies the t-th walk power to the unit indicator of `set` through the
/// truncated Chebyshev expansion. Each entry is within `epsilon` of the
/// exact power in the 2-norm sense. Requires a regular graph (the expansion
/// needs a symmetric walk matrix); `t = 0` returns the indicator itself.
pub fn fast_forward(graph: &Graph, set: &NodeSet, t: u64, epsilon: f64) -> Result<Vec<f64>> {
    graph.regular_degree().ok_or(Error::NotRegular)?;
    let unit = unit_indicator(graph, set)?;
    if t == 0 {
        return Ok(unit);
    }
    let expansion = cheb_coeffs(t, epsilon)?;
    let coefficients = expansion.coefficients();
    // Three-term recurrence on vectors: T_0 u = u, T_1 u = P u,
    // T_(k+1) u = 2 P T_k u - T_(k-1) u.
    let mut previous = unit;
    let mut current = apply_walk_matrix(graph, &previous)?;
    let mut result: Vec<f64> = previous.iter().map(|&x| coefficients[0] * x).collect();
    for (r, &x) in result.iter_mut().zip(&current) {
        *r += coefficients[1] * x;
    }
    for &c in &coefficients[2..] {
        let mut next = apply_walk_matrix(graph, &current)?;
        for (n, &p) in next.iter_mut().zip(&previous) {
            *n = 2.0 * *n - p;
        }
        for (r, &x) in result.iter_mut().zip(&next) {
            *r += c * x;
        }
        previous = current;
        current = next;
    }
    Ok(result)
}

/// Exact 2-norm of the t-th walk power applied to the unit indicator of
/// `set`, by dense propagation.
pub fn norm_exact(graph: &Graph, set: &NodeSet, t: u64) -> Result<f64> {
    let mut vector = unit_indicator(graph, set)?;
    for _ in 0..t {
        vector = apply_walk_matrix(graph, &vector)?;
    }
    Ok(l2(&vector))
}

fn l2(vector: &[f64]) -> f64 {
    vector.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---- modeled norm estimation ----

/// How the norm estimate is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormBackend {
    /// Report the exact norm; costs are still charged.
    Exact,
    /// Additive noise: uniform within `eps_prime` with probability
    /// `1 - delta`, otherwise uniform within `4 * eps_prime`.
    Noisy,
}

/// A 2-norm estimate together with its accuracy contract and modeled costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub eps_prime: f64,
    pub delta: f64,
    pub backend: NormBackend,
    /// Modeled walk queries:
    /// `ceil(sqrt(t)) * ceil(sqrt(d)) * ceil(1/eps_prime) * ceil(ln(1/delta))`.
    pub modeled_query_cost: u64,
    /// Modeled QRAM reflections: `ceil(1/eps_prime) * ceil(ln(1/delta))`.
    pub modeled_qram_cost: u64,
}

/// Modeled QRAM cost of loading a seed set of the given size once:
/// `size * ceil(ln n)`.
pub fn qram_prep_cost(size: usize, n: usize) -> u64 {
    size as u64 * (n as f64).ln().ceil() as u64
}

/// Estimates the 2-norm of the t-th walk power of the unit indicator of
/// `set` to within `eps_prime` with probability `1 - delta` (see
/// [`NormBackend`]), charging the modeled quantum costs either way.
pub fn estimate_norm<R: rand::Rng>(
    graph: &Graph,
    set: &NodeSet,
    t: u64,
    eps_prime: f64,
    delta: f64,
    backend: NormBackend,
    rng: &mut R,
) -> Result<NormEstimate> {
    let d = graph.regular_degree().ok_or(Error::NotRegular)?;
    if !(eps_prime > 0.0 && eps_prime <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "estimator accuracy must lie in (0, 1], got {eps_prime}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "estimator failure probability must lie in (0, 1), got {delta}"
        )));
    }
    let norm = norm_exact(graph, set, t)?;
    let value = match backend {
        NormBackend::Exact => norm,
        NormBackend::Noisy => {
            let spread = if rng.gen_bool(delta) {
                4.0 * eps_prime
            } else {
                eps_prime
            };
            (norm + rng.gen_range(-spread..spread)).clamp(0.0, 1.0)
        }
    };
    let reflections =
        (1.0 / eps_prime).ceil() as u64 * (1.0 / delta).ln().ceil() as u64;
    let modeled_query_cost =
        (t as f64).sqrt().ceil() as u64 * (d as f64).sqrt().ceil() as u64 * reflections;
    Ok(NormEstimate {
        value,
        eps_prime,
        delta,
        backend,
        modeled_query_cost,
        modeled_qram_cost: reflections,
    })
}

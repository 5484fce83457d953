//! Data-parallel batch helper with a sequential fallback.
//!
//! Batch workloads (independent trials, verification grids, scaling sweeps)
//! funnel through [`run_batch`]. With the `parallel` feature enabled the
//! parallel path fans out over the current rayon pool; without the feature
//! both paths are the same sequential loop. Results are returned in index
//! order either way, so outputs are independent of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to `0..count`, optionally in parallel, preserving index order.
pub fn run_batch<O, F>(count: usize, parallel: bool, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..count).map(f).collect()
}

/// True when the `parallel` feature is compiled in.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_preserves_order() {
        let seq = run_batch(100, false, |i| i * i);
        let par = run_batch(100, true, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }
}

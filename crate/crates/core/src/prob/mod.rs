//! Finite probability calculus: variational distance, n-way overlap, mixing,
//! products and Markov kernels.
//!
//! Distributions over different label sets are compared on the union of
//! their labels, with absent labels carrying weight zero.

mod dist;
mod ops;

pub use dist::{unified_labels, FiniteDistribution, JointDistribution, StochasticKernel};
pub use ops::{
    apply_stochastic, exclusion_failure, mix, overlap, overlap_thresholded, pair_guess_success, product_distribution,
    tuple_label, variational_distance,
};

/// Brute-force reference for the overlap: infimum over every set partition
/// `{Omega_k}` of the union of labels of `sum_k min_j mu_j(Omega_k)`.
///
/// Exponential in the number of labels; limited to 8.
pub mod oracle {
    use super::{unified_labels, FiniteDistribution};
    use crate::error::{Error, Result};

    pub const MAX_LABELS: usize = 8;

    pub fn partition_overlap(mus: &[FiniteDistribution]) -> Result<f64> {
        let labels = unified_labels(mus);
        let n = labels.len();
        if mus.is_empty() || n > MAX_LABELS {
            return Err(Error::InvalidArgument(format!("partition oracle needs 1..={MAX_LABELS} labels, got {n}")));
        }
        let weights: Vec<Vec<f64>> = mus.iter().map(|m| labels.iter().map(|l| m.weight(l)).collect()).collect();
        // restricted growth strings enumerate each set partition once
        let mut block = vec![0usize; n];
        let mut best = f64::INFINITY;
        loop {
            let nblocks = block.iter().max().map_or(0, |m| m + 1);
            let mut total = 0.0;
            for b in 0..nblocks {
                let min_mass = weights
                    .iter()
                    .map(|w| (0..n).filter(|&i| block[i] == b).map(|i| w[i]).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                total += min_mass;
            }
            best = best.min(total);
            if !next_rgs(&mut block) {
                break;
            }
        }
        Ok(best)
    }

    fn next_rgs(a: &mut [usize]) -> bool {
        let n = a.len();
        for i in (1..n).rev() {
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= prefix_max {
                a[i] += 1;
                for x in &mut a[i + 1..] {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }

}

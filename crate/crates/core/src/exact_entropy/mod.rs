//! Exact Shannon entropy over finite measured partitions.
//!
//! All weights are rational, so every entropy is a rational combination of
//! logarithms of primes and identities between entropies are decided
//! exactly rather than up to a tolerance.

mod partition;
mod value;

pub use partition::{
    conditional_entropy, entropy_of_counts, information_function, integrate, shannon_entropy,
    z_entropy_rate_finite, FinitePartition, FiniteRate, Measure, MAX_ATOMS,
};
pub use value::{factorize, EntropyValue, FACTOR_LIMIT};

//! Skew-product actions `(α ×_σ β)_g (x, y) = (α_g x, β_g(y) · σ(g, x))`
//! over finite and Bernoulli bases, coset partitions, and exact verifiers for
//! the partition identities used by the addition formula.

mod bernoulli;
mod cocycle;
mod special;
mod verify;

pub use bernoulli::{BernoulliSkewProcess, GeneratorCocycle};
pub use cocycle::{cocycle_from_section, CocycleWitness, ConjugacyWitness, FiniteCocycle, SectionCocycle};
pub use special::{
    join_special, right_translate, sigma_generated, SpecialPartition, StepBound, StepBoundReport,
    ZSkewSystem, K_of,
};
pub use verify::{
    cocycle_pullback, compare_conditional_star, fiber_process, skew_process,
    verify_cocycle_pullback_identity, verify_generated_algebra, verify_relative_addition,
    verify_window_factorization, RelativeAddition, StarComparison,
};

//! Exact checks of the partition identities behind the skew-product
//! addition formula, on finite skew products.

use serde::Serialize;

use super::cocycle::{invert_perm, FiniteCocycle};
use super::special::{sigma_generated, SpecialPartition};
use crate::error::{Error, Result};
use crate::exact_entropy::{EntropyValue, FinitePartition, Measure};
use crate::f_invariant::{
    f_truncated, relative_F_star, relative_f_truncated, F_star_of, FiniteProcess, FiniteSpaceProcess,
    RateCertificate, ReportCertificate, ReportOptions,
};
use crate::free_group::{ball, FreeWord};

/// The skew product as a process with partition `P × Q`, conditioned on the
/// base σ-algebra (the partition of `X × G` by base point).
pub fn skew_process(c: &FiniteCocycle, p: &FinitePartition, q: &FinitePartition) -> Result<FiniteSpaceProcess> {
    if !c.preserves_measure()? {
        return Err(Error::NotMeasurePreserving);
    }
    FiniteSpaceProcess::new(
        format!("skew({} x {})", c.base_size(), c.group().name()),
        c.skew_generator_maps()?,
        c.product_partition(p, q)?,
        Some(c.base_points()?),
    )
}

/// The fiber action `β` with partition `Q`.
pub fn fiber_process(c: &FiniteCocycle, q: &FinitePartition) -> Result<FiniteSpaceProcess> {
    FiniteSpaceProcess::from_group_action(c.fiber(), q.labels())
}

/// Comparison of `F*(α ×_σ β, (P × Q)^{B(n)} | B_X)` with `F*(β, Q^{B(n)})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarComparison {
    pub n: usize,
    pub relative: EntropyValue,
    pub fiber: EntropyValue,
    pub certificates: [RateCertificate; 2],
    pub equal: bool,
}

/// Evaluates both sides of the conditional `F*` collapse for `n = 0..=n_max`.
pub fn compare_conditional_star(
    skew: &dyn FiniteProcess,
    fiber: &dyn FiniteProcess,
    n_max: usize,
) -> Result<Vec<StarComparison>> {
    let opts = crate::f_invariant::RateOptions::default();
    (0..=n_max)
        .map(|n| {
            let a = relative_F_star(skew, n, opts)?;
            let b = F_star_of(fiber, n, opts)?;
            Ok(StarComparison {
                n,
                equal: a.value == b.value,
                relative: a.value,
                fiber: b.value,
                certificates: [a.certificate, b.certificate],
            })
        })
        .collect()
}

/// `P_g`: the base point `x` is labelled by the coset of `σ(g, x)` modulo
/// `β_g(N)`, i.e. by the `Q`-label of `β_g⁻¹(σ(g, x))`.
pub fn cocycle_pullback(c: &FiniteCocycle, g: &FreeWord, q: &SpecialPartition) -> Result<FinitePartition> {
    let gi = g.inverse();
    FinitePartition::from_labels(
        Measure::uniform(c.base_size())?,
        (0..c.base_size()).map(|x| q.partition().label(c.fiber().apply(&gi, c.value(g, x)) as usize)),
    )
}

/// Image `T(P)` of a partition under a permutation: `z` gets the label of `T⁻¹z`.
fn image(p: &FinitePartition, t: &[usize]) -> Result<FinitePartition> {
    p.pullback(&invert_perm(t))
}

fn product(c: &FiniteCocycle, p: &FinitePartition, q: &FinitePartition) -> Result<FinitePartition> {
    c.product_partition(p, q)
}

/// Checks `(α ×_σ β)_g((P_g ∨ P') × Q) = α_g(P_g ∨ P') × β_g(Q)` as an
/// equality of partitions of `X × G`.
pub fn verify_cocycle_pullback_identity(
    c: &FiniteCocycle,
    g: &FreeWord,
    q: &SpecialPartition,
    p_prime: &FinitePartition,
) -> Result<bool> {
    let pg = cocycle_pullback(c, g, q)?.join(p_prime)?;
    let lhs = image(&product(c, &pg, q.partition())?, &c.skew_word_map(g))?;
    let beta_g: Vec<usize> = c.fiber().word_map(g).iter().map(|&v| v as usize).collect();
    let rhs = product(c, &image(&pg, &c.base_word_map(g))?, &image(q.partition(), &beta_g)?)?;
    Ok(lhs == rhs)
}

/// Checks that the invariant partition generated by `P × Q` equals the one
/// generated by the base points together with `X × Σ(Q)`. `P` must generate
/// the base action.
pub fn verify_generated_algebra(c: &FiniteCocycle, p: &FinitePartition, q: &SpecialPartition) -> Result<bool> {
    if sigma_generated(c.base_maps(), p)?.num_blocks() != c.base_size() {
        return Err(Error::InvalidArgument("base partition is not generating".into()));
    }
    let lhs = sigma_generated(&c.skew_generator_maps()?, &product(c, p, q.partition())?)?;
    let fiber_maps: Vec<Vec<usize>> = c
        .fiber()
        .generator_autos()
        .iter()
        .map(|f| f.iter().map(|&v| v as usize).collect())
        .collect();
    let sq = sigma_generated(&fiber_maps, q.partition())?;
    let points = FinitePartition::points(Measure::uniform(c.base_size())?);
    let rhs = product(c, &points, &sq)?;
    Ok(lhs == rhs)
}

/// Checks `((P ∨ R_n) × Q)^{B(n)} = (P ∨ R_n)^{B(n)} × Q^{B(n)}` with
/// `R_n = ∨_{g ∈ B(n)} P_g`.
pub fn verify_window_factorization(
    c: &FiniteCocycle,
    p: &FinitePartition,
    q: &SpecialPartition,
    n: usize,
) -> Result<bool> {
    let b = ball(c.rank(), n)?;
    let mut pr = p.clone();
    for g in &b {
        pr = pr.join(&cocycle_pullback(c, g, q)?)?;
    }
    let start = product(c, &pr, q.partition())?;
    let mut lhs = FinitePartition::trivial(start.measure().clone());
    let mut base = FinitePartition::trivial(p.measure().clone());
    let mut fib = FinitePartition::trivial(q.partition().measure().clone());
    for w in &b {
        lhs = lhs.join(&image(&start, &c.skew_word_map(w))?)?;
        base = base.join(&image(&pr, &c.base_word_map(w))?)?;
        let bw: Vec<usize> = c.fiber().word_map(w).iter().map(|&v| v as usize).collect();
        fib = fib.join(&image(q.partition(), &bw)?)?;
    }
    Ok(lhs == product(c, &base, &fib)?)
}

/// The three `f` values in `f(P ∨ Q) = f(Q) + f(P | Σ(Q))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelativeAddition {
    pub joint: Option<EntropyValue>,
    pub part_q: Option<EntropyValue>,
    pub relative_p: Option<EntropyValue>,
    pub certificates: [ReportCertificate; 3],
    pub holds: bool,
}

/// Evaluates the relative addition formula on a finite measure-preserving
/// action with uniform measure.
pub fn verify_relative_addition(
    maps: &[Vec<usize>],
    p: &FinitePartition,
    q: &FinitePartition,
    opts: ReportOptions,
) -> Result<RelativeAddition> {
    let joint = FiniteSpaceProcess::new("joint", maps.to_vec(), p.join(q)?, None)?;
    let only_q = FiniteSpaceProcess::new("q", maps.to_vec(), q.clone(), None)?;
    let sq = sigma_generated(maps, q)?;
    let rel = FiniteSpaceProcess::new("p|sigma(q)", maps.to_vec(), p.clone(), Some(sq))?;
    let a = f_truncated(&joint, opts)?;
    let b = f_truncated(&only_q, opts)?;
    let c = relative_f_truncated(&rel, opts)?;
    let certificates = [a.f_certificate, b.f_certificate, c.f_certificate];
    let holds = certificates.iter().all(|c| *c == ReportCertificate::Exact)
        && match (&a.f, &b.f, &c.f) {
            (Some(x), Some(y), Some(z)) => *x == y + z,
            _ => false,
        };
    Ok(RelativeAddition {
        joint: a.f,
        part_q: b.f,
        relative_p: c.f,
        certificates,
        holds,
    })
}

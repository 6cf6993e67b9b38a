//! Seeded random instances and small shared helpers.

use std::collections::BTreeMap;

use flab_core::algebraic_shift::ConvolutionKernel;
use flab_core::exact_entropy::{FinitePartition, Measure};
use flab_core::finite_group::{FiniteGroup, FiniteGroupAction};
use flab_core::free_group::{all_letters, FreeWord};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CliError, Result};

pub fn perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

pub fn labels(rng: &mut impl Rng, n: usize, k: u32) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

pub fn partition(rng: &mut impl Rng, n: usize, k: u32) -> FinitePartition {
    FinitePartition::from_labels(Measure::uniform(n).expect("n > 0"), labels(rng, n, k))
        .expect("labels match the space")
}

/// A word of length at most `max_len` with uniformly drawn letters.
pub fn word(rng: &mut impl Rng, rank: usize, max_len: usize) -> FreeWord {
    let letters: Vec<i8> = all_letters(rank).collect();
    let len = rng.gen_range(0..=max_len);
    let raw: Vec<i64> = (0..len).map(|_| i64::from(*letters.choose(rng).expect("rank >= 1"))).collect();
    FreeWord::from_letters(rank, raw).expect("letters fit the rank")
}

/// One automorphism per generator drawn from `Aut(G)`.
pub fn action(rng: &mut impl Rng, group: &FiniteGroup, rank: usize) -> FiniteGroupAction {
    let autos = group.automorphisms();
    let pick = (0..rank).map(|_| autos.choose(rng).expect("identity").clone()).collect();
    FiniteGroupAction::new(group.clone(), pick).expect("automorphisms")
}

/// Identity, a deterministic non-identity assignment, and a seeded one,
/// with duplicates removed.
pub fn assignments(rng: &mut impl Rng, group: &FiniteGroup, rank: usize) -> Vec<Vec<Vec<u32>>> {
    let autos = group.automorphisms();
    let ident: Vec<u32> = group.elements().collect();
    let mut out = vec![vec![ident; rank]];
    if autos.len() > 1 {
        let others: Vec<&Vec<u32>> = autos.iter().filter(|a| a.iter().enumerate().any(|(i, &v)| v as usize != i)).collect();
        out.push((0..rank).map(|i| others[i % others.len()].clone()).collect());
    }
    out.push((0..rank).map(|_| autos.choose(rng).expect("identity").clone()).collect());
    let mut seen = Vec::new();
    out.retain(|a| {
        if seen.contains(a) {
            false
        } else {
            seen.push(a.clone());
            true
        }
    });
    out
}

/// `φ_h(x)(g) = Σ_s h(s) x(g s⁻¹)` for a scalar kernel, from the
/// coefficient map alone.
pub fn convolve(k: &ConvolutionKernel, x: &BTreeMap<FreeWord, u32>, g: &FreeWord) -> u32 {
    let p = k.modulus();
    k.coeffs()
        .iter()
        .map(|(s, c)| c[0] * x.get(&(g * &s.inverse())).copied().unwrap_or(0) % p)
        .sum::<u32>()
        % p
}

/// Named scalar kernels.
pub fn kernel_preset(name: &str, p: u64, rank: usize) -> Result<ConvolutionKernel> {
    let terms: &[(&str, i64)] = match name {
        "delta" => &[("e", 1)],
        "two-term" => &[("e", 1), ("a", 1)],
        "three-term" => &[("e", 1), ("a", 1), ("b", 1)],
        _ => return Err(CliError::UnknownKernelPreset(name.into())),
    };
    Ok(ConvolutionKernel::scalar(p, rank, terms)?)
}

/// `(p, k)` when `G ≅ (Z/p)^k`.
pub fn elementary_abelian(g: &FiniteGroup) -> Option<(u64, usize)> {
    if !g.is_abelian() || g.order() < 2 {
        return None;
    }
    let n = g.order() as u64;
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    if m != 1 {
        return None;
    }
    let exponent_p = g.elements().all(|x| (0..p).fold(g.identity(), |acc, _| g.mul(acc, x)) == g.identity());
    exponent_p.then_some((p, k))
}

/// The map `K^Γ → (K^r)^Γ`, `x ↦ (x(g s_i) - x(g))_i`, for `K = (Z/p)^k`.
/// Its kernel is the constant configurations.
pub fn comparison_kernel(p: u64, k: usize, rank: usize) -> Result<ConvolutionKernel> {
    let d_out = k * rank;
    let mut at_e = vec![0i64; d_out * k];
    let mut coeffs = Vec::new();
    for i in 0..rank {
        let mut at_s = vec![0i64; d_out * k];
        for a in 0..k {
            at_e[(i * k + a) * k + a] = -1;
            at_s[(i * k + a) * k + a] = 1;
        }
        coeffs.push((FreeWord::letter(rank, -(i as i64 + 1))?, at_s));
    }
    coeffs.push((FreeWord::identity(rank), at_e));
    Ok(ConvolutionKernel::new(p, rank, k, d_out, coeffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_abelian_detection() {
        let cases = [("Z/2", Some((2, 1))), ("Z/3", Some((3, 1))), ("Z/2xZ/2", Some((2, 2))), ("Z/4", None), ("D4", None)];
        for (name, want) in cases {
            assert_eq!(elementary_abelian(&FiniteGroup::preset(name).unwrap()), want, "{name}");
        }
    }

    #[test]
    fn comparison_kernel_matches_difference_map_for_cyclic_k() {
        for (p, r) in [(2, 2), (3, 3)] {
            let ours = comparison_kernel(p, 1, r).unwrap();
            let theirs = ConvolutionKernel::difference_map(p, r).unwrap();
            assert_eq!(ours.coeffs(), theirs.coeffs());
        }
    }

    #[test]
    fn assignments_are_distinct() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for name in ["Z/4", "Z/2xZ/2", "D4"] {
            let g = FiniteGroup::preset(name).unwrap();
            let a = assignments(&mut rng, &g, 2);
            assert!(a.len() >= 2, "{name}");
        }
    }
}

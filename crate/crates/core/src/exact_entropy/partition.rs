//! Finite probability spaces with rational weights and their partitions.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::value::{factorize, EntropyValue};
use crate::error::{Error, Result};

/// Largest number of atoms a finite space may have.
pub const MAX_ATOMS: usize = 1 << 20;

/// A probability measure on atoms `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    Uniform(usize),
    Weighted(Arc<Vec<BigRational>>),
}

impl Measure {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("empty space".into()));
        }
        if n > MAX_ATOMS {
            return Err(Error::SpaceTooLarge(n));
        }
        Ok(Measure::Uniform(n))
    }

    /// Nonnegative weights summing to exactly one.
    pub fn weighted(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("empty space".into()));
        }
        if weights.len() > MAX_ATOMS {
            return Err(Error::SpaceTooLarge(weights.len()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidMeasure("negative weight".into()));
        }
        let total: BigRational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Measure::Weighted(Arc::new(weights)))
    }

    pub fn len(&self) -> usize {
        match self {
            Measure::Uniform(n) => *n,
            Measure::Weighted(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, atom: usize) -> BigRational {
        match self {
            Measure::Uniform(n) => BigRational::new(BigInt::one(), BigInt::from(*n)),
            Measure::Weighted(w) => w[atom].clone(),
        }
    }

    /// Whether the bijection `t` of the atoms preserves every weight.
    pub fn is_preserved_by(&self, t: &[usize]) -> bool {
        if !is_permutation(t, self.len()) {
            return false;
        }
        match self {
            Measure::Uniform(_) => true,
            Measure::Weighted(w) => (0..w.len()).all(|x| w[t[x]] == w[x]),
        }
    }
}

pub(crate) fn is_permutation(t: &[usize], n: usize) -> bool {
    if t.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &y in t {
        if y >= n || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    true
}

/// A partition of a finite measured space, stored as one block label per
/// atom. Labels are canonical: blocks are numbered by first occurrence, so
/// two partitions are equal as set systems iff their label vectors agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePartition {
    labels: Vec<u32>,
    blocks: usize,
    measure: Measure,
}

fn canonicalize<T: Hash + Eq, I: IntoIterator<Item = T>>(raw: I) -> (Vec<u32>, usize) {
    let mut map: HashMap<T, u32> = HashMap::new();
    let labels: Vec<u32> = raw
        .into_iter()
        .map(|t| {
            let next = map.len() as u32;
            *map.entry(t).or_insert(next)
        })
        .collect();
    (labels, map.len())
}

impl FinitePartition {
    /// Builds a partition from arbitrary hashable labels.
    pub fn from_labels<T: Hash + Eq, I: IntoIterator<Item = T>>(
        measure: Measure,
        raw: I,
    ) -> Result<Self> {
        let (labels, blocks) = canonicalize(raw);
        if labels.len() != measure.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for a space of {} atoms",
                labels.len(),
                measure.len()
            )));
        }
        Ok(FinitePartition {
            labels,
            blocks,
            measure,
        })
    }

    pub fn trivial(measure: Measure) -> Self {
        let n = measure.len();
        FinitePartition {
            labels: vec![0; n],
            blocks: 1,
            measure,
        }
    }

    pub fn points(measure: Measure) -> Self {
        let n = measure.len();
        FinitePartition {
            labels: (0..n as u32).collect(),
            blocks: n,
            measure,
        }
    }

    pub fn space_size(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, atom: usize) -> u32 {
        self.labels[atom]
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    fn check_same_space(&self, other: &FinitePartition) -> Result<()> {
        if let (Measure::Weighted(a), Measure::Weighted(b)) = (&self.measure, &other.measure) {
            if Arc::ptr_eq(a, b) {
                return Ok(());
            }
        }
        if self.measure != other.measure {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Measure of each block, indexed by label.
    pub fn block_weights(&self) -> Vec<BigRational> {
        match &self.measure {
            Measure::Uniform(n) => {
                let counts = self.block_counts();
                let n = BigInt::from(*n);
                counts
                    .into_iter()
                    .map(|c| BigRational::new(BigInt::from(c), n.clone()))
                    .collect()
            }
            Measure::Weighted(w) => {
                let mut out = vec![BigRational::zero(); self.blocks];
                for (x, &l) in self.labels.iter().enumerate() {
                    out[l as usize] += &w[x];
                }
                out
            }
        }
    }

    fn block_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.blocks];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Common refinement `self ∨ other`.
    pub fn join(&self, other: &FinitePartition) -> Result<FinitePartition> {
        self.check_same_space(other)?;
        Ok(self.join_unchecked(other))
    }

    pub(crate) fn join_unchecked(&self, other: &FinitePartition) -> FinitePartition {
        let (labels, blocks) = canonicalize(
            self.labels
                .iter()
                .zip(&other.labels)
                .map(|(&a, &b)| (u64::from(a) << 32) | u64::from(b)),
        );
        FinitePartition {
            labels,
            blocks,
            measure: self.measure.clone(),
        }
    }

    /// Join of a nonempty family.
    pub fn join_all<'a, I: IntoIterator<Item = &'a FinitePartition>>(
        parts: I,
    ) -> Result<FinitePartition> {
        let mut it = parts.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty join".into()))?
            .clone();
        it.try_fold(first, |acc, p| acc.join(p))
    }

    /// The partition `{t^{-1}(A)}`: atom `x` gets the label of `t[x]`.
    pub fn pullback(&self, t: &[usize]) -> Result<FinitePartition> {
        if t.len() != self.space_size() || t.iter().any(|&y| y >= self.space_size()) {
            return Err(Error::DimensionMismatch("map does not act on this space".into()));
        }
        let (labels, blocks) = canonicalize(t.iter().map(|&y| self.labels[y]));
        Ok(FinitePartition {
            labels,
            blocks,
            measure: self.measure.clone(),
        })
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &FinitePartition) -> bool {
        if self.space_size() != other.space_size() {
            return false;
        }
        let mut image: Vec<Option<u32>> = vec![None; self.blocks];
        for (a, &b) in self.labels.iter().zip(&other.labels) {
            match image[*a as usize] {
                None => image[*a as usize] = Some(b),
                Some(prev) if prev != b => return false,
                _ => {}
            }
        }
        true
    }
}

/// Accumulates `Σ c log c` for positive integers `c`, grouped by prime.
fn sum_c_log_c(counts: impl IntoIterator<Item = u64>) -> Result<EntropyValue> {
    let mut acc: HashMap<u64, i128> = HashMap::new();
    let mut cache: HashMap<u64, Vec<(u64, u32)>> = HashMap::new();
    for c in counts {
        if c <= 1 {
            continue;
        }
        let f = match cache.get(&c) {
            Some(f) => f,
            None => cache.entry(c).or_insert(factorize(c)?),
        };
        for &(p, e) in f {
            *acc.entry(p).or_insert(0) += i128::from(c) * i128::from(e);
        }
    }
    let mut out = EntropyValue::zero();
    for (p, k) in acc {
        out += &EntropyValue::log_prime_times(p, BigRational::from_integer(BigInt::from(k)));
    }
    Ok(out)
}

/// Shannon entropy `-Σ ν(A) log ν(A)` with `0 log 0 = 0`.
pub fn shannon_entropy(p: &FinitePartition) -> Result<EntropyValue> {
    match &p.measure {
        Measure::Uniform(n) => {
            let n = *n as u64;
            let s = sum_c_log_c(p.block_counts())?;
            let inv = BigRational::new(BigInt::one(), BigInt::from(n));
            Ok(EntropyValue::log_int(n)? - s.scale(&inv))
        }
        Measure::Weighted(_) => {
            let mut out = EntropyValue::zero();
            for w in p.block_weights() {
                if w.is_zero() {
                    continue;
                }
                out -= &EntropyValue::log_rational(&w)?.scale(&w);
            }
            Ok(out)
        }
    }
}

/// Entropy of the empirical distribution with the given positive counts,
/// `log N - (1/N) Σ c log c` for `N = Σ c`.
pub fn entropy_of_counts(counts: &[u64]) -> Result<EntropyValue> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let s = sum_c_log_c(counts.iter().copied())?;
    let inv = BigRational::new(BigInt::one(), BigInt::from(n));
    Ok(EntropyValue::log_int(n)? - s.scale(&inv))
}

/// `H(p | f) = H(p ∨ f) - H(f)`.
pub fn conditional_entropy(p: &FinitePartition, f: &FinitePartition) -> Result<EntropyValue> {
    let j = p.join(f)?;
    Ok(shannon_entropy(&j)? - shannon_entropy(f)?)
}

/// Pointwise information `I(p|f)(x) = -log(ν(P_x ∩ F_x) / ν(F_x))`.
/// Atoms of measure zero get the value zero.
pub fn information_function(
    p: &FinitePartition,
    f: &FinitePartition,
) -> Result<Vec<EntropyValue>> {
    p.check_same_space(f)?;
    let j = p.join_unchecked(f);
    let jw = j.block_weights();
    let fw = f.block_weights();
    let mut cache: HashMap<(u32, u32), EntropyValue> = HashMap::new();
    (0..p.space_size())
        .map(|x| {
            let (a, b) = (j.labels[x], f.labels[x]);
            if let Some(v) = cache.get(&(a, b)) {
                return Ok(v.clone());
            }
            let num = &jw[a as usize];
            let v = if num.is_zero() {
                EntropyValue::zero()
            } else {
                -EntropyValue::log_rational(&(num / &fw[b as usize]))?
            };
            cache.insert((a, b), v.clone());
            Ok(v)
        })
        .collect()
}

/// Integral of a pointwise function against the partition's measure.
pub fn integrate(measure: &Measure, values: &[EntropyValue]) -> EntropyValue {
    match measure {
        Measure::Uniform(n) => {
            let s: EntropyValue = values.iter().cloned().sum();
            s.scale(&BigRational::new(BigInt::one(), BigInt::from(*n)))
        }
        Measure::Weighted(w) => values
            .iter()
            .zip(w.iter())
            .map(|(v, w)| v.scale(w))
            .sum(),
    }
}

/// Entropy rate of a single measure-preserving bijection on a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRate {
    /// Always zero: the two-sided joins have bounded entropy.
    pub value: EntropyValue,
    /// Smallest `n >= 1` with `J_n = J_{n-1}`, where `J_n = ∨_{|i|<=n} t^i p`.
    /// From there on the joins are constant.
    pub stabilized_at: usize,
}

/// Exact entropy rate of `t` with respect to `p` on a finite space.
pub fn z_entropy_rate_finite(t: &[usize], p: &FinitePartition) -> Result<FiniteRate> {
    if !p.measure.is_preserved_by(t) {
        return Err(Error::NotMeasurePreserving);
    }
    let n = t.len();
    let mut inv = vec![0; n];
    for (x, &y) in t.iter().enumerate() {
        inv[y] = x;
    }
    // t^i p has label p(t^{-i} x); keep the forward and backward powers.
    let mut fwd = p.clone();
    let mut back = p.clone();
    let mut joined = p.clone();
    let mut k = 1;
    loop {
        fwd = fwd.pullback(&inv)?;
        back = back.pullback(t)?;
        let next = joined.join_unchecked(&fwd).join_unchecked(&back);
        if next == joined {
            return Ok(FiniteRate {
                value: EntropyValue::zero(),
                stabilized_at: k,
            });
        }
        joined = next;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn uniform_two_blocks_is_log_two() {
        let m = Measure::uniform(4).unwrap();
        let p = FinitePartition::from_labels(m, [0, 1, 0, 1]).unwrap();
        assert_eq!(shannon_entropy(&p).unwrap(), EntropyValue::log_int(2).unwrap());
    }

    #[test]
    fn single_block_is_zero() {
        let p = FinitePartition::trivial(Measure::uniform(7).unwrap());
        assert!(shannon_entropy(&p).unwrap().is_zero());
    }

    #[test]
    fn three_quarters_one_quarter() {
        // -(3/4)log(3/4) - (1/4)log(1/4) = 2 log 2 - (3/4) log 3
        let oracle = EntropyValue::int_log_prime(2, 2) - EntropyValue::log_prime_times(3, q(3, 4));
        let uni = FinitePartition::from_labels(Measure::uniform(4).unwrap(), [0, 0, 0, 1]).unwrap();
        assert_eq!(shannon_entropy(&uni).unwrap(), oracle);
        let w = Measure::weighted(vec![q(3, 4), q(1, 4)]).unwrap();
        let p = FinitePartition::points(w);
        assert_eq!(shannon_entropy(&p).unwrap(), oracle);
    }

    #[test]
    fn join_laws() {
        let m = Measure::uniform(4).unwrap();
        let a = FinitePartition::from_labels(m.clone(), [0, 0, 1, 1]).unwrap();
        let b = FinitePartition::from_labels(m.clone(), [0, 1, 0, 1]).unwrap();
        assert_eq!(a.join(&a).unwrap(), a);
        assert_eq!(a.join(&FinitePartition::trivial(m.clone())).unwrap(), a);
        let ab = a.join(&b).unwrap();
        assert_eq!(ab, FinitePartition::points(m));
        assert_eq!(shannon_entropy(&ab).unwrap(), EntropyValue::log_int(4).unwrap());
    }

    #[test]
    fn join_rejects_other_spaces() {
        let a = FinitePartition::trivial(Measure::uniform(4).unwrap());
        let b = FinitePartition::trivial(Measure::uniform(5).unwrap());
        assert_eq!(a.join(&b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn correlated_bits() {
        // atoms (0,0),(0,1),(1,0),(1,1) with weights 1/2,0,0,1/2
        let m = Measure::weighted(vec![q(1, 2), q(0, 1), q(0, 1), q(1, 2)]).unwrap();
        let first = FinitePartition::from_labels(m.clone(), [0, 0, 1, 1]).unwrap();
        let second = FinitePartition::from_labels(m.clone(), [0, 1, 0, 1]).unwrap();
        assert!(conditional_entropy(&first, &second).unwrap().is_zero());
        let info = information_function(&first, &second).unwrap();
        assert!(info[0].is_zero() && info[3].is_zero());
    }

    #[test]
    fn conditioning_on_self_and_trivial() {
        let m = Measure::uniform(6).unwrap();
        let p = FinitePartition::from_labels(m.clone(), [0, 0, 1, 2, 2, 2]).unwrap();
        assert!(conditional_entropy(&p, &p).unwrap().is_zero());
        let t = FinitePartition::trivial(m);
        assert_eq!(conditional_entropy(&p, &t).unwrap(), shannon_entropy(&p).unwrap());
        let info = information_function(&p, &t).unwrap();
        assert_eq!(info[3], EntropyValue::log_int(2).unwrap());
        assert_eq!(info[0], EntropyValue::log_int(3).unwrap());
        assert!(information_function(&p, &p).unwrap().iter().all(EntropyValue::is_zero));
    }

    #[test]
    fn three_cycle_rate() {
        let p = FinitePartition::points(Measure::uniform(3).unwrap());
        let r = z_entropy_rate_finite(&[1, 2, 0], &p).unwrap();
        assert!(r.value.is_zero());
        assert_eq!(r.stabilized_at, 1);
        let bits = FinitePartition::from_labels(Measure::uniform(3).unwrap(), [0, 1, 1]).unwrap();
        assert!(z_entropy_rate_finite(&[0, 1, 2], &bits).unwrap().value.is_zero());
    }

    #[test]
    fn rate_rejects_non_measure_preserving() {
        let m = Measure::weighted(vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        let p = FinitePartition::points(m);
        assert_eq!(z_entropy_rate_finite(&[1, 0, 2], &p), Err(Error::NotMeasurePreserving));
        assert!(z_entropy_rate_finite(&[0, 2, 1], &p).is_ok());
    }

    #[test]
    fn size_guard() {
        assert_eq!(Measure::uniform(MAX_ATOMS + 1), Err(Error::SpaceTooLarge(MAX_ATOMS + 1)));
    }
}

//! Measured Γ-processes that answer exact entropy queries on finite windows.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::algebraic_shift::{ConvolutionKernel, KernelSubshift, WindowOptions};
use crate::error::{Error, Result};
use crate::exact_entropy::{shannon_entropy, EntropyValue, FinitePartition, Measure};
use crate::finite_group::FiniteGroupAction;
use crate::free_group::{all_letters, FreeWord, WordSet};

/// What is known about the tail of `n ↦ F(P^{B(n)})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// `P^{B(n)}` is invariant from `from_n` on, so every functional is
    /// constant from there.
    Stabilized { from_n: usize },
    /// The functionals are constant in `n` (i.i.d. coordinates).
    Markov,
    /// Only truncated values are available.
    Unknown,
}

/// A measure-preserving action of the rank-`r` free group together with a
/// finite partition `P`; `entropy(W)` is `H(P^W)` with
/// `P^W = ∨_{w ∈ W} α_w P`.
pub trait FiniteProcess: Send + Sync {
    fn rank(&self) -> usize;

    fn describe(&self) -> String;

    fn entropy(&self, w: &WordSet) -> Result<EntropyValue>;

    /// `H(P^W | G)` for the process's invariant σ-algebra `G`.
    fn conditional_entropy(&self, _w: &WordSet) -> Result<EntropyValue> {
        Err(Error::NoConditionalCapability)
    }

    fn exactness(&self) -> Exactness {
        Exactness::Unknown
    }

    /// Exactness of the functionals conditioned on `G`.
    fn conditional_exactness(&self) -> Exactness {
        Exactness::Unknown
    }
}

/// Memo table for window entropies.
#[derive(Debug, Default)]
struct Memo(Mutex<HashMap<WordSet, EntropyValue>>);

impl Memo {
    fn get_or(&self, w: &WordSet, f: impl FnOnce() -> Result<EntropyValue>) -> Result<EntropyValue> {
        if let Some(v) = self.0.lock().expect("memo lock").get(w) {
            return Ok(v.clone());
        }
        let v = f()?;
        self.0.lock().expect("memo lock").insert(w.clone(), v.clone());
        Ok(v)
    }
}

/// I.i.d. uniform coordinates over an alphabet of size `k`.
#[derive(Clone, Debug)]
pub struct BernoulliProcess {
    rank: usize,
    k: u64,
    log_k: EntropyValue,
}

impl BernoulliProcess {
    pub fn new(rank: usize, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        Ok(BernoulliProcess {
            rank,
            k,
            log_k: EntropyValue::log_int(k)?,
        })
    }
}

impl FiniteProcess for BernoulliProcess {
    fn rank(&self) -> usize {
        self.rank
    }

    fn describe(&self) -> String {
        format!("bernoulli(k={}, r={})", self.k, self.rank)
    }

    fn entropy(&self, w: &WordSet) -> Result<EntropyValue> {
        Ok(self.log_k.scale_int(w.len() as i64))
    }

    fn exactness(&self) -> Exactness {
        Exactness::Markov
    }
}

/// An action by permutations of a finite measured space, with a partition
/// `P` and optionally an invariant partition `G` to condition on.
#[derive(Debug)]
pub struct FiniteSpaceProcess {
    name: String,
    rank: usize,
    maps: Vec<Vec<usize>>,
    inverse_maps: Vec<Vec<usize>>,
    partition: FinitePartition,
    given: Option<FinitePartition>,
    word_maps: Mutex<HashMap<FreeWord, Arc<Vec<usize>>>>,
    memo: Memo,
    cond_memo: Memo,
}

impl FiniteSpaceProcess {
    /// `maps[i]` is the action of `s_{i+1}`; each must preserve the measure.
    pub fn new(
        name: impl Into<String>,
        maps: Vec<Vec<usize>>,
        partition: FinitePartition,
        given: Option<FinitePartition>,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidRank(0));
        }
        for t in &maps {
            if !partition.measure().is_preserved_by(t) {
                return Err(Error::NotMeasurePreserving);
            }
        }
        let inverse_maps: Vec<Vec<usize>> = maps
            .iter()
            .map(|t| {
                let mut inv = vec![0; t.len()];
                for (x, &y) in t.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        let proc = FiniteSpaceProcess {
            name: name.into(),
            rank: maps.len(),
            maps,
            inverse_maps,
            partition,
            given,
            word_maps: Mutex::new(HashMap::new()),
            memo: Memo::default(),
            cond_memo: Memo::default(),
        };
        if let Some(g) = &proc.given {
            if g.measure() != proc.partition.measure() {
                return Err(Error::SpaceMismatch);
            }
            for l in all_letters(proc.rank) {
                if proc.translate(g, &FreeWord::letter(proc.rank, i64::from(l))?) != *g {
                    return Err(Error::NotInvariant);
                }
            }
        }
        Ok(proc)
    }

    /// A finite group with Haar measure, acted on by automorphisms, with the
    /// partition given by `labels` on the group elements.
    pub fn from_group_action(action: &FiniteGroupAction, labels: &[u32]) -> Result<Self> {
        let n = action.group().order();
        let maps = action
            .generator_autos()
            .iter()
            .map(|f| f.iter().map(|&y| y as usize).collect())
            .collect();
        let p = FinitePartition::from_labels(Measure::uniform(n)?, labels.iter().copied())?;
        FiniteSpaceProcess::new(action.group().name().to_string(), maps, p, None)
    }

    /// The points partition of a group action.
    pub fn group_points(action: &FiniteGroupAction) -> Result<Self> {
        let labels: Vec<u32> = action.group().elements().collect();
        FiniteSpaceProcess::from_group_action(action, &labels)
    }

    pub fn with_given(self, given: FinitePartition) -> Result<Self> {
        FiniteSpaceProcess::new(self.name, self.maps, self.partition, Some(given))
    }

    pub fn partition(&self) -> &FinitePartition {
        &self.partition
    }

    pub fn given(&self) -> Option<&FinitePartition> {
        self.given.as_ref()
    }

    pub fn generator_maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    /// The permutation `α_w`, with `α_{l_1 ... l_k} = α_{l_1} ∘ ... ∘ α_{l_k}`.
    pub fn word_map(&self, w: &FreeWord) -> Arc<Vec<usize>> {
        if let Some(m) = self.word_maps.lock().expect("lock").get(w) {
            return m.clone();
        }
        let n = self.partition.space_size();
        let m: Vec<usize> = match w.letters().split_last() {
            None => (0..n).collect(),
            Some((&last, rest)) => {
                let prefix = FreeWord::from_letters(self.rank, rest.iter().map(|&l| i64::from(l)))
                    .expect("valid letters");
                let pm = self.word_map(&prefix);
                let t = self.letter_map(last);
                (0..n).map(|x| pm[t[x]]).collect()
            }
        };
        let m = Arc::new(m);
        self.word_maps
            .lock()
            .expect("lock")
            .insert(w.clone(), m.clone());
        m
    }

    fn letter_map(&self, l: i8) -> &[usize] {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.maps[i]
        } else {
            &self.inverse_maps[i]
        }
    }

    /// `α_w Q`: the atom `x` gets the label of `α_{w^-1} x`.
    pub fn translate(&self, q: &FinitePartition, w: &FreeWord) -> FinitePartition {
        q.pullback(&self.word_map(&w.inverse()))
            .expect("maps act on the space")
    }

    /// `P^W`.
    pub fn partition_for(&self, w: &WordSet) -> FinitePartition {
        let mut acc = FinitePartition::trivial(self.partition.measure().clone());
        for g in w {
            acc = acc.join(&self.translate(&self.partition, g)).expect("same space");
        }
        acc
    }

    /// Smallest `n` with `Q_n = Q_{n+1}`, where `Q_n = P^{B(n)}` joined with
    /// the optional extra partition.
    fn stabilization(&self, extra: Option<&FinitePartition>) -> usize {
        let mut q = self.partition.clone();
        if let Some(e) = extra {
            q = q.join(e).expect("same space");
        }
        let mut n = 0;
        loop {
            let mut next = q.clone();
            for l in all_letters(self.rank) {
                let s = FreeWord::letter(self.rank, i64::from(l)).expect("valid letter");
                next = next.join(&self.translate(&q, &s)).expect("same space");
            }
            if next == q {
                return n;
            }
            q = next;
            n += 1;
        }
    }
}

impl FiniteProcess for FiniteSpaceProcess {
    fn rank(&self) -> usize {
        self.rank
    }

    fn describe(&self) -> String {
        format!("finite-space({}, {} atoms, r={})", self.name, self.partition.space_size(), self.rank)
    }

    fn entropy(&self, w: &WordSet) -> Result<EntropyValue> {
        self.memo.get_or(w, || shannon_entropy(&self.partition_for(w)))
    }

    fn conditional_entropy(&self, w: &WordSet) -> Result<EntropyValue> {
        let g = self.given.as_ref().ok_or(Error::NoConditionalCapability)?;
        self.cond_memo.get_or(w, || {
            let pw = self.partition_for(w);
            Ok(shannon_entropy(&pw.join(g)?)? - shannon_entropy(g)?)
        })
    }

    fn exactness(&self) -> Exactness {
        Exactness::Stabilized {
            from_n: self.stabilization(None),
        }
    }

    fn conditional_exactness(&self) -> Exactness {
        match &self.given {
            Some(g) => Exactness::Stabilized {
                from_n: self.stabilization(Some(g)),
            },
            None => Exactness::Unknown,
        }
    }
}

/// The Haar measure on `X_{h,p}` with the partition by the coordinate at `e`.
#[derive(Debug)]
pub struct KernelProcess {
    subshift: KernelSubshift,
    log_p: EntropyValue,
    memo: Memo,
}

impl KernelProcess {
    pub fn new(kernel: ConvolutionKernel, opts: WindowOptions) -> Self {
        let log_p = EntropyValue::int_log_prime(1, u64::from(kernel.modulus()));
        KernelProcess {
            subshift: KernelSubshift::new(kernel, opts),
            log_p,
            memo: Memo::default(),
        }
    }

    pub fn subshift(&self) -> &KernelSubshift {
        &self.subshift
    }
}

impl FiniteProcess for KernelProcess {
    fn rank(&self) -> usize {
        self.subshift.kernel().rank()
    }

    fn describe(&self) -> String {
        let k = self.subshift.kernel();
        format!(
            "kernel(p={}, r={}, d_in={}, d_out={}, {} terms)",
            k.modulus(),
            k.rank(),
            k.d_in(),
            k.d_out(),
            k.coeffs().len()
        )
    }

    fn entropy(&self, w: &WordSet) -> Result<EntropyValue> {
        self.memo.get_or(w, || {
            let d = self.subshift.projection(w)?.dimension;
            Ok(self.log_p.scale_int(d as i64))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_group::FiniteGroup;
    use crate::free_group::ball;

    #[test]
    fn bernoulli_entropy_counts_coordinates() {
        let b = BernoulliProcess::new(2, 3).unwrap();
        let w = ball(2, 1).unwrap();
        assert_eq!(b.entropy(&w).unwrap(), EntropyValue::int_log_prime(5, 3));
    }

    #[test]
    fn group_points_stabilize_immediately() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let act = FiniteGroupAction::new(g, vec![vec![0, 3, 2, 1], vec![0, 1, 2, 3]]).unwrap();
        let p = FiniteSpaceProcess::group_points(&act).unwrap();
        assert_eq!(p.exactness(), Exactness::Stabilized { from_n: 0 });
        assert_eq!(p.entropy(&ball(2, 2).unwrap()).unwrap(), EntropyValue::log_int(4).unwrap());
    }

    #[test]
    fn translate_matches_coordinate_convention() {
        // On Z/4 with s_1 acting by x -> -x, the partition {x = 1} moved by s_1
        // marks the atom whose s_1^{-1}-image is 1, i.e. the atom 3.
        let g = FiniteGroup::cyclic(4).unwrap();
        let act = FiniteGroupAction::new(g, vec![vec![0, 3, 2, 1]]).unwrap();
        let p = FiniteSpaceProcess::from_group_action(&act, &[0, 1, 0, 0]).unwrap();
        let s = FreeWord::parse("a", 1).unwrap();
        let moved = p.translate(p.partition(), &s);
        assert_eq!(moved.labels(), &[0, 0, 0, 1]);
    }

    #[test]
    fn given_partition_must_be_invariant() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let act = FiniteGroupAction::new(g, vec![vec![0, 3, 2, 1]]).unwrap();
        let p = FiniteSpaceProcess::group_points(&act).unwrap();
        let m = p.partition().measure().clone();
        let bad = FinitePartition::from_labels(m.clone(), [0, 1, 0, 0]).unwrap();
        assert!(matches!(p.with_given(bad), Err(Error::NotInvariant)));
        let p = FiniteSpaceProcess::group_points(&act).unwrap();
        let good = FinitePartition::from_labels(m, [0, 1, 0, 1]).unwrap();
        assert!(p.with_given(good).is_ok());
    }

    #[test]
    fn kernel_entropy_of_two_term_kernel() {
        let k = ConvolutionKernel::scalar(2, 2, &[("e", 1), ("a", 1)]).unwrap();
        let proc = KernelProcess::new(k, WindowOptions::default());
        assert_eq!(proc.entropy(&ball(2, 1).unwrap()).unwrap(), EntropyValue::int_log_prime(3, 2));
        assert!(matches!(
            proc.conditional_entropy(&ball(2, 0).unwrap()),
            Err(Error::NoConditionalCapability)
        ));
    }
}

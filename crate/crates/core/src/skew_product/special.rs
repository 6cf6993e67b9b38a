//! Coset partitions of finite groups, the translation defect `K(Q)`, the
//! invariant partition generated by `Q`, and the per-step entropy bound for
//! skew products over a single transformation.

use std::collections::BTreeSet;

use serde::Serialize;

use super::cocycle::invert_perm;
use crate::error::{Error, Result};
use crate::exact_entropy::{conditional_entropy, shannon_entropy, EntropyValue, FinitePartition, Measure};
use crate::finite_group::FiniteGroup;

/// The partition of `G` into the cosets `gN` of a normal subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialPartition {
    subgroup: BTreeSet<u32>,
    partition: FinitePartition,
}

impl SpecialPartition {
    pub fn new(group: &FiniteGroup, n: &BTreeSet<u32>) -> Result<Self> {
        if !group.is_subgroup(n) {
            return Err(Error::InvalidGroup("not a subgroup".into()));
        }
        if !group.is_normal(n) {
            return Err(Error::NotNormal);
        }
        let partition = FinitePartition::from_labels(Measure::uniform(group.order())?, group.coset_labels(n))?;
        Ok(SpecialPartition {
            subgroup: n.clone(),
            partition,
        })
    }

    pub fn subgroup(&self) -> &BTreeSet<u32> {
        &self.subgroup
    }

    pub fn partition(&self) -> &FinitePartition {
        &self.partition
    }

    pub fn labels(&self) -> &[u32] {
        self.partition.labels()
    }
}

/// Right translate `Qg`: the element `y` gets the label of `y g⁻¹`.
pub fn right_translate(group: &FiniteGroup, q: &FinitePartition, g: u32) -> Result<FinitePartition> {
    let gi = group.inv(g);
    let t: Vec<usize> = group.elements().map(|y| group.mul(y, gi) as usize).collect();
    q.pullback(&t)
}

/// `K(Q) = max_g H(Qg | Q) + H(Q | Qg)`.
#[allow(non_snake_case)]
pub fn K_of(group: &FiniteGroup, q: &FinitePartition) -> Result<EntropyValue> {
    if q.space_size() != group.order() {
        return Err(Error::SpaceMismatch);
    }
    let mut best = EntropyValue::zero();
    for g in group.elements() {
        let qg = right_translate(group, q, g)?;
        let v = conditional_entropy(&qg, q)? + conditional_entropy(q, &qg)?;
        best = best.max(v);
    }
    Ok(best)
}

/// Smallest partition refining `q` that is invariant under every map in
/// `maps` (each a permutation); computed as a fixpoint of joins with
/// preimages under the maps and their inverses.
pub fn sigma_generated(maps: &[Vec<usize>], q: &FinitePartition) -> Result<FinitePartition> {
    let mut all: Vec<Vec<usize>> = maps.to_vec();
    all.extend(maps.iter().map(|t| invert_perm(t)));
    let mut cur = q.clone();
    loop {
        let mut next = cur.clone();
        for t in &all {
            next = next.join(&cur.pullback(t)?)?;
        }
        if next.num_blocks() == cur.num_blocks() {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Image of `N` under an automorphism `t` (a permutation of the elements).
fn image(n: &BTreeSet<u32>, t: &[u32]) -> BTreeSet<u32> {
    n.iter().map(|&x| t[x as usize]).collect()
}

/// `∨_i T_i(Q_i)` for coset partitions `Q_i` of `N_i`: the result is the
/// coset partition of `∩_i T_i(N_i)`. The join is also formed directly and
/// compared with that coset partition.
pub fn join_special(group: &FiniteGroup, parts: &[(SpecialPartition, Vec<u32>)]) -> Result<SpecialPartition> {
    if parts.is_empty() {
        return SpecialPartition::new(group, &group.elements().collect());
    }
    let mut meet: BTreeSet<u32> = group.elements().collect();
    let mut joined = FinitePartition::trivial(Measure::uniform(group.order())?);
    for (q, t) in parts {
        if !group.is_automorphism(t) {
            return Err(Error::NotAutomorphism("join_special".into()));
        }
        let tn = image(q.subgroup(), t);
        meet = meet.intersection(&tn).copied().collect();
        // T(Q): the element y lies in T(A) iff T⁻¹y lies in A
        let inv: Vec<usize> = {
            let mut inv = vec![0usize; t.len()];
            for (x, &y) in t.iter().enumerate() {
                inv[y as usize] = x;
            }
            inv
        };
        joined = joined.join(&q.partition().pullback(&inv)?)?;
    }
    let out = SpecialPartition::new(group, &meet)?;
    if out.partition != joined {
        return Err(Error::InvalidArgument(
            "join of translated coset partitions is not the coset partition of the meet".into(),
        ));
    }
    Ok(out)
}

/// A skew product over a single transformation: `T` permutes the base,
/// `S` is an automorphism of `G`, and `σ(1, ·)` is given; other values follow
/// from `σ(k + 1, x) = S(σ(k, x)) · σ(1, T^k x)`.
#[derive(Clone, Debug)]
pub struct ZSkewSystem {
    pub t: Vec<usize>,
    pub group: FiniteGroup,
    pub s: Vec<u32>,
    pub sigma1: Vec<u32>,
}

/// Both sides of the per-step bound at one base point and one length `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepBound {
    pub x: usize,
    pub m: usize,
    /// `|H(Q^m) - H(Q_x^m)|`.
    pub gap: EntropyValue,
    /// `m K(Q)`.
    pub bound: EntropyValue,
    pub holds: bool,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepBoundReport {
    pub K: EntropyValue,
    pub rows: Vec<StepBound>,
    /// Every row satisfies the bound.
    pub holds: bool,
    /// `K(Q) = 0` and every gap is zero.
    pub equality_when_k_zero: bool,
}

impl ZSkewSystem {
    pub fn new(t: Vec<usize>, group: FiniteGroup, s: Vec<u32>, sigma1: Vec<u32>) -> Result<Self> {
        let n = t.len();
        let mut seen = vec![false; n];
        if n == 0 || t.iter().any(|&y| y >= n || std::mem::replace(&mut seen[y], true)) {
            return Err(Error::InvalidArgument("T must be a permutation".into()));
        }
        if !group.is_automorphism(&s) {
            return Err(Error::NotAutomorphism("S".into()));
        }
        if sigma1.len() != n || sigma1.iter().any(|&v| v as usize >= group.order()) {
            return Err(Error::InvalidCocycle("σ(1, ·) needs one group element per base point".into()));
        }
        Ok(ZSkewSystem { t, group, s, sigma1 })
    }

    /// `σ(k, x)` for `k >= 0`.
    pub fn sigma(&self, k: usize, x: usize) -> u32 {
        let g = &self.group;
        let mut v = g.identity();
        let mut y = x;
        for _ in 0..k {
            v = g.mul(self.s[v as usize], self.sigma1[y]);
            y = self.t[y];
        }
        v
    }

    fn s_power(&self, k: usize, y: u32) -> u32 {
        (0..k).fold(y, |acc, _| self.s[acc as usize])
    }

    /// `Q^m = ∨_{k<m} S^{-k} Q`: `y` is labelled by the `Q`-labels of `S^k y`.
    pub fn q_m(&self, q: &FinitePartition, m: usize) -> Result<FinitePartition> {
        FinitePartition::from_labels(
            Measure::uniform(self.group.order())?,
            self.group
                .elements()
                .map(|y| (0..m).map(|k| q.label(self.s_power(k, y) as usize)).collect::<Vec<_>>()),
        )
    }

    /// `Q_x^m = ∨_{k<m} S^{-k}(Q σ(k, x)⁻¹)`: `y` is labelled by the
    /// `Q`-labels of `S^k(y) · σ(k, x)`.
    pub fn q_x_m(&self, q: &FinitePartition, x: usize, m: usize) -> Result<FinitePartition> {
        let g = &self.group;
        let sig: Vec<u32> = (0..m).map(|k| self.sigma(k, x)).collect();
        FinitePartition::from_labels(
            Measure::uniform(g.order())?,
            g.elements().map(|y| {
                (0..m)
                    .map(|k| q.label(g.mul(self.s_power(k, y), sig[k]) as usize))
                    .collect::<Vec<_>>()
            }),
        )
    }

    /// Checks `|H(Q^m) - H(Q_x^m)| <= m K(Q)` for every base point and
    /// every `1 <= m <= m_max`.
    pub fn verify_step_bound(&self, q: &FinitePartition, m_max: usize) -> Result<StepBoundReport> {
        let k = K_of(&self.group, q)?;
        let mut rows = Vec::new();
        for m in 1..=m_max {
            let hq = shannon_entropy(&self.q_m(q, m)?)?;
            let bound = k.scale_int(m as i64);
            for x in 0..self.t.len() {
                let hx = shannon_entropy(&self.q_x_m(q, x, m)?)?;
                let d = &hq - &hx;
                let gap = if d.is_negative() { -d } else { d };
                let holds = gap <= bound;
                rows.push(StepBound {
                    x,
                    m,
                    gap,
                    bound: bound.clone(),
                    holds,
                });
            }
        }
        let holds = rows.iter().all(|r| r.holds);
        let equality_when_k_zero = k.is_zero() && rows.iter().all(|r| r.gap.is_zero());
        Ok(StepBoundReport {
            K: k,
            rows,
            holds,
            equality_when_k_zero,
        })
    }
}

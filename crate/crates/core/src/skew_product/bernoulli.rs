//! Skew products over a Bernoulli base `{0..k}^Γ` whose cocycle reads the
//! base configuration on a finite window.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact_entropy::{entropy_of_counts, EntropyValue, FinitePartition};
use crate::f_invariant::FiniteProcess;
use crate::finite_group::FiniteGroupAction;
use crate::free_group::{FreeWord, WordSet};

/// Cap on `k^|D| · |G|` for one entropy query.
const MAX_WORK: u64 = 1 << 22;

/// `σ(s_i, x) = table[index of the pattern x|window]`, the pattern index
/// being mixed radix in `k` with the first window word as the lowest digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCocycle {
    pub window: Vec<FreeWord>,
    pub table: Vec<u32>,
}

/// `{0..k}^Γ` with uniform Bernoulli measure, skewed by a finite group action
/// through a cocycle with finite dependence windows. The partition is `P × Q`
/// with `P` the base coordinate at `e`; conditional queries condition on the
/// whole base.
#[derive(Debug)]
pub struct BernoulliSkewProcess {
    k: u64,
    fiber: FiniteGroupAction,
    gens: Vec<GeneratorCocycle>,
    q: FinitePartition,
    memo: Mutex<HashMap<WordSet, EntropyValue>>,
    cond_memo: Mutex<HashMap<WordSet, EntropyValue>>,
}

impl BernoulliSkewProcess {
    pub fn new(k: u64, fiber: FiniteGroupAction, gens: Vec<GeneratorCocycle>, q: FinitePartition) -> Result<Self> {
        let r = fiber.rank();
        if gens.len() != r {
            return Err(Error::RankMismatch(gens.len(), r));
        }
        if k < 2 {
            return Err(Error::InvalidArgument("alphabet needs at least two symbols".into()));
        }
        if q.space_size() != fiber.group().order() {
            return Err(Error::SpaceMismatch);
        }
        for gc in &gens {
            let needed = k.checked_pow(gc.window.len() as u32).filter(|&v| v <= MAX_WORK);
            if needed != Some(gc.table.len() as u64) {
                return Err(Error::InvalidCocycle(format!(
                    "window of {} words needs {k}^{} table entries",
                    gc.window.len(),
                    gc.window.len()
                )));
            }
            if gc.window.iter().any(|w| w.rank() != r) {
                return Err(Error::RankMismatch(r, 0));
            }
            if gc.table.iter().any(|&v| v as usize >= fiber.group().order()) {
                return Err(Error::InvalidCocycle("value outside the fiber group".into()));
            }
        }
        Ok(BernoulliSkewProcess {
            k,
            fiber,
            gens,
            q,
            memo: Mutex::new(HashMap::new()),
            cond_memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn fiber(&self) -> &FiniteGroupAction {
        &self.fiber
    }

    pub fn fiber_partition(&self) -> &FinitePartition {
        &self.q
    }

    /// Base coordinates read by `σ(w, ·)`.
    pub fn dependencies(&self, w: &FreeWord) -> BTreeSet<FreeWord> {
        let r = self.fiber.rank();
        let mut out = BTreeSet::new();
        let mut suffix = FreeWord::identity(r);
        for &l in w.letters().iter().rev() {
            let i = l.unsigned_abs() as usize - 1;
            // σ(t, α_u x) reads (α_u x)(d) = x(u⁻¹ d) for d in the window of t
            let shift = if l > 0 {
                suffix.inverse()
            } else {
                let s = FreeWord::generator(r, i + 1).expect("valid generator");
                &suffix.inverse() * &s
            };
            out.extend(self.gens[i].window.iter().map(|d| &shift * d));
            suffix = &FreeWord::letter(r, i64::from(l)).expect("valid letter") * &suffix;
        }
        out
    }

    /// `σ(w, x)` with the base read through `x`.
    pub fn value(&self, w: &FreeWord, x: &dyn Fn(&FreeWord) -> u64) -> u32 {
        let r = self.fiber.rank();
        let g = self.fiber.group();
        let mut v = g.identity();
        let mut suffix = FreeWord::identity(r);
        for &l in w.letters().iter().rev() {
            let i = l.unsigned_abs() as usize - 1;
            let s = FreeWord::generator(r, i + 1).expect("valid generator");
            let lv = if l > 0 {
                self.generator_value(i, &suffix.inverse(), x)
            } else {
                let base = self.generator_value(i, &(&suffix.inverse() * &s), x);
                self.fiber.letter_map(l)[g.inv(base) as usize]
            };
            v = g.mul(self.fiber.letter_map(l)[v as usize], lv);
            suffix = &FreeWord::letter(r, i64::from(l)).expect("valid letter") * &suffix;
        }
        v
    }

    /// `σ(s_{i+1}, α_u x)` where `shift = u⁻¹`.
    fn generator_value(&self, i: usize, shift: &FreeWord, x: &dyn Fn(&FreeWord) -> u64) -> u32 {
        let gc = &self.gens[i];
        let mut idx = 0u64;
        for d in gc.window.iter().rev() {
            idx = idx * self.k + x(&(shift * d));
        }
        gc.table[idx as usize]
    }

    fn patterns(&self, d: usize) -> Result<u64> {
        let order = self.fiber.group().order() as u64;
        self.k
            .checked_pow(d as u32)
            .filter(|&v| v.saturating_mul(order) <= MAX_WORK)
            .ok_or(Error::SpaceTooLarge(usize::MAX.min(d)))
    }

    /// For each `w ∈ W`, the fiber part of `(α ×_σ β)_{w⁻¹}` as a pair
    /// (automorphism `β_{w⁻¹}`, cocycle values per pattern).
    fn fiber_labels(
        &self,
        w: &WordSet,
        coords: &[FreeWord],
        pattern: u64,
    ) -> Vec<u32> {
        let pos: HashMap<&FreeWord, usize> = coords.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let k = self.k;
        let digit = |d: &FreeWord| -> u64 {
            let i = pos[d];
            (pattern / k.pow(i as u32)) % k
        };
        w.iter().map(|g| self.value(&g.inverse(), &digit)).collect()
    }

    fn fiber_deps(&self, w: &WordSet) -> BTreeSet<FreeWord> {
        w.iter().flat_map(|g| self.dependencies(&g.inverse())).collect()
    }
}

impl FiniteProcess for BernoulliSkewProcess {
    fn rank(&self) -> usize {
        self.fiber.rank()
    }

    fn describe(&self) -> String {
        format!("bernoulli-skew(k={}, {})", self.k, self.fiber.group().name())
    }

    fn entropy(&self, w: &WordSet) -> Result<EntropyValue> {
        if let Some(v) = self.memo.lock().expect("memo lock").get(w) {
            return Ok(v.clone());
        }
        let mut coords = self.fiber_deps(w);
        coords.extend(w.iter().cloned());
        let coords: Vec<FreeWord> = coords.into_iter().collect();
        let npat = self.patterns(coords.len())?;
        let pos: HashMap<&FreeWord, usize> = coords.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let base_idx: Vec<usize> = w.iter().map(|g| pos[g]).collect();
        let g = self.fiber.group();
        let inv_autos: Vec<Vec<u32>> = w.iter().map(|h| self.fiber.word_map(&h.inverse())).collect();
        let mut counts: HashMap<(Vec<u64>, Vec<u32>), u64> = HashMap::new();
        for pat in 0..npat {
            let sig = self.fiber_labels(w, &coords, pat);
            let base: Vec<u64> = base_idx
                .iter()
                .map(|&i| (pat / self.k.pow(i as u32)) % self.k)
                .collect();
            for y in g.elements() {
                let lab: Vec<u32> = inv_autos
                    .iter()
                    .zip(&sig)
                    .map(|(b, &s)| self.q.label(g.mul(b[y as usize], s) as usize))
                    .collect();
                *counts.entry((base.clone(), lab)).or_insert(0) += 1;
            }
        }
        let c: Vec<u64> = counts.into_values().collect();
        let v = entropy_of_counts(&c)?;
        self.memo.lock().expect("memo lock").insert(w.clone(), v.clone());
        Ok(v)
    }

    fn conditional_entropy(&self, w: &WordSet) -> Result<EntropyValue> {
        if let Some(v) = self.cond_memo.lock().expect("memo lock").get(w) {
            return Ok(v.clone());
        }
        let coords: Vec<FreeWord> = self.fiber_deps(w).into_iter().collect();
        let npat = self.patterns(coords.len())?;
        let g = self.fiber.group();
        let inv_autos: Vec<Vec<u32>> = w.iter().map(|h| self.fiber.word_map(&h.inverse())).collect();
        let mut shapes: HashMap<Vec<u64>, u64> = HashMap::new();
        for pat in 0..npat {
            let sig = self.fiber_labels(w, &coords, pat);
            let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
            for y in g.elements() {
                let lab: Vec<u32> = inv_autos
                    .iter()
                    .zip(&sig)
                    .map(|(b, &s)| self.q.label(g.mul(b[y as usize], s) as usize))
                    .collect();
                *counts.entry(lab).or_insert(0) += 1;
            }
            let mut shape: Vec<u64> = counts.into_values().collect();
            shape.sort_unstable();
            *shapes.entry(shape).or_insert(0) += 1;
        }
        let mut total = EntropyValue::zero();
        for (shape, mult) in shapes {
            let h = entropy_of_counts(&shape)?;
            total += &h.scale(&BigRational::new(BigInt::from(mult), BigInt::from(npat)));
        }
        self.cond_memo.lock().expect("memo lock").insert(w.clone(), total.clone());
        Ok(total)
    }
}

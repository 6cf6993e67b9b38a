//! Cocycles over finite base actions and the skew-product action they define.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_entropy::{FinitePartition, Measure};
use crate::finite_group::{FiniteGroup, FiniteGroupAction};
use crate::free_group::{ball, FreeWord};

pub(crate) fn invert_perm(t: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; t.len()];
    for (x, &y) in t.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

fn is_perm(t: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    t.len() == n && t.iter().all(|&y| y < n && !std::mem::replace(&mut seen[y], true))
}

/// A cocycle `σ: Γ × X → G` for a permutation action `α` on `X = {0..n}`
/// and an action `β` of `Γ` on the finite group `G` by automorphisms.
///
/// Only the generator values `σ(s_i, x)` are stored; every other value
/// follows from `σ(gh, x) = β_g(σ(h, x)) · σ(g, α_h x)`.
#[derive(Clone, Debug)]
pub struct FiniteCocycle {
    base_maps: Vec<Vec<usize>>,
    base_inverse: Vec<Vec<usize>>,
    fiber: FiniteGroupAction,
    table: Vec<Vec<u32>>,
    bug: Option<u32>,
}

/// A pair `(g, h)` and base point at which the cocycle identity fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleWitness {
    pub g: String,
    pub h: String,
    pub x: usize,
    /// `σ(gh, x)`.
    pub lhs: u32,
    /// `β_g(σ(h, x)) · σ(g, α_h x)`.
    pub rhs: u32,
}

impl FiniteCocycle {
    /// `table[i][x] = σ(s_{i+1}, x)`.
    pub fn new(base_maps: Vec<Vec<usize>>, fiber: FiniteGroupAction, table: Vec<Vec<u32>>) -> Result<Self> {
        let r = fiber.rank();
        if base_maps.len() != r || table.len() != r {
            return Err(Error::RankMismatch(base_maps.len().max(table.len()), r));
        }
        let n = base_maps[0].len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        for t in &base_maps {
            if !is_perm(t, n) {
                return Err(Error::InvalidCocycle("base map is not a permutation".into()));
            }
        }
        let order = fiber.group().order() as u32;
        for row in &table {
            if row.len() != n || row.iter().any(|&v| v >= order) {
                return Err(Error::InvalidCocycle(format!(
                    "each generator needs {n} values in the fiber group"
                )));
            }
        }
        let base_inverse = base_maps.iter().map(|t| invert_perm(t)).collect();
        Ok(FiniteCocycle {
            base_maps,
            base_inverse,
            fiber,
            table,
            bug: None,
        })
    }

    /// The identity cocycle: the skew product is the direct product.
    pub fn trivial(base_maps: Vec<Vec<usize>>, fiber: FiniteGroupAction) -> Result<Self> {
        let n = base_maps.first().map_or(0, Vec::len);
        let e = fiber.group().identity();
        let table = vec![vec![e; n]; base_maps.len()];
        FiniteCocycle::new(base_maps, fiber, table)
    }

    /// Deliberately broken evaluation: values on words of length two or more
    /// are multiplied on the right by `n0`, so composition no longer follows
    /// the cocycle identity. Used to exercise the verifiers.
    pub fn with_injected_bug(mut self, n0: u32) -> Self {
        self.bug = (n0 != self.fiber.group().identity()).then_some(n0);
        self
    }

    pub fn rank(&self) -> usize {
        self.base_maps.len()
    }

    pub fn base_size(&self) -> usize {
        self.base_maps[0].len()
    }

    pub fn fiber(&self) -> &FiniteGroupAction {
        &self.fiber
    }

    pub fn group(&self) -> &FiniteGroup {
        self.fiber.group()
    }

    pub fn base_maps(&self) -> &[Vec<usize>] {
        &self.base_maps
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }

    fn base_letter(&self, l: i8) -> &[usize] {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.base_maps[i]
        } else {
            &self.base_inverse[i]
        }
    }

    /// `α_w x`.
    pub fn base_apply(&self, w: &FreeWord, x: usize) -> usize {
        w.letters()
            .iter()
            .rev()
            .fold(x, |acc, &l| self.base_letter(l)[acc])
    }

    /// The permutation `α_w` of the base.
    pub fn base_word_map(&self, w: &FreeWord) -> Vec<usize> {
        (0..self.base_size()).map(|x| self.base_apply(w, x)).collect()
    }

    fn letter_value(&self, l: i8, x: usize) -> u32 {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            self.table[i][x]
        } else {
            // σ(s⁻¹, x) = β_s⁻¹(σ(s, α_{s⁻¹} x)⁻¹)
            let g = self.group();
            let v = self.table[i][self.base_inverse[i][x]];
            self.fiber.letter_map(l)[g.inv(v) as usize]
        }
    }

    /// `σ(w, x)`.
    pub fn value(&self, w: &FreeWord, x: usize) -> u32 {
        let g = self.group();
        let mut v = g.identity();
        let mut y = x;
        for &l in w.letters().iter().rev() {
            v = g.mul(self.fiber.letter_map(l)[v as usize], self.letter_value(l, y));
            y = self.base_letter(l)[y];
        }
        match self.bug {
            Some(n0) if w.len() >= 2 => g.mul(v, n0),
            _ => v,
        }
    }

    /// `(α ×_σ β)_w (x, y) = (α_w x, β_w(y) · σ(w, x))`.
    pub fn skew_apply(&self, w: &FreeWord, x: usize, y: u32) -> (usize, u32) {
        let by = self.fiber.apply(w, y);
        (self.base_apply(w, x), self.group().mul(by, self.value(w, x)))
    }

    /// Index of `(x, y)` in the product space.
    pub fn atom(&self, x: usize, y: u32) -> usize {
        x * self.group().order() + y as usize
    }

    pub fn product_size(&self) -> usize {
        self.base_size() * self.group().order()
    }

    /// The permutation `(α ×_σ β)_w` of `X × G`.
    pub fn skew_word_map(&self, w: &FreeWord) -> Vec<usize> {
        let m = self.group().order();
        (0..self.product_size())
            .map(|a| {
                let (x, y) = self.skew_apply(w, a / m, (a % m) as u32);
                self.atom(x, y)
            })
            .collect()
    }

    /// Generator permutations of the skew-product action.
    pub fn skew_generator_maps(&self) -> Result<Vec<Vec<usize>>> {
        let r = self.rank();
        (1..=r)
            .map(|i| Ok(self.skew_word_map(&FreeWord::generator(r, i)?)))
            .collect()
    }

    /// Checks the cocycle identity for all pairs of reduced words of length
    /// at most `max_len` and all base points; returns the first failure.
    pub fn check_identity(&self, max_len: usize) -> Result<Option<CocycleWitness>> {
        let g = self.group();
        let words = ball(self.rank(), max_len)?;
        for a in &words {
            for b in &words {
                let ab = a * b;
                for x in 0..self.base_size() {
                    let lhs = self.value(&ab, x);
                    let inner = self.fiber.apply(a, self.value(b, x));
                    let rhs = g.mul(inner, self.value(a, self.base_apply(b, x)));
                    if lhs != rhs {
                        return Ok(Some(CocycleWitness {
                            g: a.to_text(),
                            h: b.to_text(),
                            x,
                            lhs,
                            rhs,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Whether each generator of the skew action is a bijection of `X × G`;
    /// with the uniform measure this is measure preservation.
    pub fn preserves_measure(&self) -> Result<bool> {
        let m = Measure::uniform(self.product_size())?;
        Ok(self
            .skew_generator_maps()?
            .iter()
            .all(|t| m.is_preserved_by(t)))
    }

    /// The partition `P × Q` of `X × G`.
    pub fn product_partition(&self, p: &FinitePartition, q: &FinitePartition) -> Result<FinitePartition> {
        if p.space_size() != self.base_size() || q.space_size() != self.group().order() {
            return Err(Error::SpaceMismatch);
        }
        let m = self.group().order();
        FinitePartition::from_labels(
            Measure::uniform(self.product_size())?,
            (0..self.product_size()).map(|a| (p.label(a / m), q.label(a % m))),
        )
    }

    /// The partition of `X × G` by base point.
    pub fn base_points(&self) -> Result<FinitePartition> {
        let m = self.group().order();
        FinitePartition::from_labels(
            Measure::uniform(self.product_size())?,
            (0..self.product_size()).map(|a| a / m),
        )
    }
}

/// The cocycle realizing `α` on `G` as a skew product over `G/N` with
/// fiber `N`, together with the section and the conjugacy `Φ(c, n) = n · s(c)`.
#[derive(Clone, Debug)]
pub struct SectionCocycle {
    pub cocycle: FiniteCocycle,
    /// Elements of `N` in increasing order; fiber index `j` is `subgroup[j]`.
    pub subgroup: Vec<u32>,
    /// Least representative of each coset, in increasing order.
    pub section: Vec<u32>,
    /// Coset index of each element of `G`.
    pub coset_of: Vec<usize>,
    action: FiniteGroupAction,
}

/// A point where `Φ` fails to intertwine the two actions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyWitness {
    pub word: String,
    pub coset: usize,
    pub fiber: u32,
    pub via_skew: u32,
    pub direct: u32,
}

/// Builds the section cocycle `σ(g, c) = α_g(s(c)) · s(α_g c)⁻¹ ∈ N` for an
/// invariant normal subgroup `N` of a group acted on by automorphisms.
pub fn cocycle_from_section(action: &FiniteGroupAction, n: &BTreeSet<u32>) -> Result<SectionCocycle> {
    action.check_invariant_normal(n)?;
    let g = action.group();
    let labels = g.coset_labels(n);
    let section: Vec<u32> = labels.iter().copied().collect::<BTreeSet<u32>>().into_iter().collect();
    let coset_of: Vec<usize> = labels
        .iter()
        .map(|l| section.binary_search(l).expect("label is a representative"))
        .collect();
    let subgroup: Vec<u32> = n.iter().copied().collect();
    let pos = |v: u32| subgroup.binary_search(&v).map_err(|_| Error::InvalidCocycle("value outside N".into()));

    let table: Vec<Vec<u32>> = subgroup
        .iter()
        .map(|&a| {
            subgroup
                .iter()
                .map(|&b| pos(g.mul(a, b)).map(|j| j as u32))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n_group = FiniteGroup::from_table(format!("N<{}", g.name()), table)?;
    let autos = action
        .generator_autos()
        .iter()
        .map(|f| subgroup.iter().map(|&a| pos(f[a as usize]).map(|j| j as u32)).collect())
        .collect::<Result<Vec<Vec<u32>>>>()?;
    let fiber = FiniteGroupAction::new(n_group, autos)?;

    let base_maps: Vec<Vec<usize>> = action
        .generator_autos()
        .iter()
        .map(|f| section.iter().map(|&s| coset_of[f[s as usize] as usize]).collect())
        .collect();
    let sigma: Vec<Vec<u32>> = action
        .generator_autos()
        .iter()
        .zip(&base_maps)
        .map(|(f, bm)| {
            section
                .iter()
                .enumerate()
                .map(|(c, &s)| {
                    let v = g.mul(f[s as usize], g.inv(section[bm[c]]));
                    pos(v).map(|j| j as u32)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(SectionCocycle {
        cocycle: FiniteCocycle::new(base_maps, fiber, sigma)?,
        subgroup,
        section,
        coset_of,
        action: action.clone(),
    })
}

impl SectionCocycle {
    /// `Φ(c, n) = n · s(c)`.
    pub fn phi(&self, c: usize, j: u32) -> u32 {
        self.action
            .group()
            .mul(self.subgroup[j as usize], self.section[c])
    }

    pub fn with_injected_bug(mut self, n0: u32) -> Self {
        self.cocycle = self.cocycle.with_injected_bug(n0);
        self
    }

    /// Whether `Φ` is a bijection `G/N × N → G`.
    pub fn phi_is_bijective(&self) -> bool {
        let mut seen = vec![false; self.action.group().order()];
        for c in 0..self.section.len() {
            for j in 0..self.subgroup.len() as u32 {
                if std::mem::replace(&mut seen[self.phi(c, j) as usize], true) {
                    return false;
                }
            }
        }
        seen.iter().all(|&b| b)
    }

    /// Checks `Φ ∘ (α_{G/N} ×_σ α_N)_w = α_w ∘ Φ` for all reduced words of
    /// length at most `max_len` and every point; returns the first failure.
    pub fn check_conjugacy(&self, max_len: usize) -> Result<Option<ConjugacyWitness>> {
        for w in &ball(self.cocycle.rank(), max_len)? {
            for c in 0..self.section.len() {
                for j in 0..self.subgroup.len() as u32 {
                    let (c2, j2) = self.cocycle.skew_apply(w, c, j);
                    let via_skew = self.phi(c2, j2);
                    let direct = self.action.apply(w, self.phi(c, j));
                    if via_skew != direct {
                        return Ok(Some(ConjugacyWitness {
                            word: w.to_text(),
                            coset: c,
                            fiber: j,
                            via_skew,
                            direct,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4_action(a: &[i64]) -> FiniteGroupAction {
        let g = FiniteGroup::cyclic(4).unwrap();
        let autos = a
            .iter()
            .map(|&k| (0..4).map(|x| (x * k).rem_euclid(4) as u32).collect())
            .collect();
        FiniteGroupAction::new(g, autos).unwrap()
    }

    #[test]
    fn z4_over_z2() {
        let act = z4_action(&[1, -1]);
        let n: BTreeSet<u32> = [0, 2].into();
        let sc = cocycle_from_section(&act, &n).unwrap();
        assert_eq!(sc.section, vec![0, 1]);
        assert!(sc.phi_is_bijective());
        assert_eq!(sc.cocycle.check_identity(3).unwrap(), None);
        assert_eq!(sc.check_conjugacy(3).unwrap(), None);
        assert!(sc.cocycle.preserves_measure().unwrap());
        // α_{s2}(1) = 3 = 2 + 1, so σ(s2, coset 1) is the element 2 of N
        assert_eq!(sc.cocycle.table()[1][1], 1);
    }

    #[test]
    fn extreme_subgroups() {
        let act = z4_action(&[1, -1]);
        let trivial = cocycle_from_section(&act, &[0].into()).unwrap();
        assert!(trivial.cocycle.table().iter().flatten().all(|&v| v == 0));
        assert_eq!(trivial.check_conjugacy(2).unwrap(), None);
        let whole = cocycle_from_section(&act, &[0, 1, 2, 3].into()).unwrap();
        assert_eq!(whole.cocycle.base_size(), 1);
        assert_eq!(whole.check_conjugacy(2).unwrap(), None);
    }

    #[test]
    fn non_normal_rejected() {
        let g = FiniteGroup::dihedral8();
        let id: Vec<u32> = g.elements().collect();
        let act = FiniteGroupAction::new(g, vec![id.clone(), id]).unwrap();
        // {e, b} is a reflection subgroup; it is not normal in D4
        assert_eq!(cocycle_from_section(&act, &[0, 4].into()).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn injected_bug_is_detected() {
        let act = z4_action(&[1, -1]);
        let sc = cocycle_from_section(&act, &[0, 2].into()).unwrap().with_injected_bug(1);
        assert!(sc.cocycle.check_identity(2).unwrap().is_some());
    }

    #[test]
    fn inverse_letter_value() {
        let act = z4_action(&[1, -1]);
        let sc = cocycle_from_section(&act, &[0, 2].into()).unwrap();
        let c = &sc.cocycle;
        let r = c.rank();
        for i in 1..=r {
            let s = FreeWord::generator(r, i).unwrap();
            let si = s.inverse();
            for x in 0..c.base_size() {
                for y in 0..2 {
                    let (x1, y1) = c.skew_apply(&s, x, y);
                    assert_eq!(c.skew_apply(&si, x1, y1), (x, y));
                }
            }
        }
    }
}

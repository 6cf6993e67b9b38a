//! Small finite groups given by multiplication tables, their automorphisms,
//! subgroups and cosets, and free-group actions by automorphisms.

use std::collections::BTreeSet;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::free_group::FreeWord;

/// A finite group on elements `0..order`, with `0` the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[a][b] = a*b`) with identity `0`.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<u32>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x as usize >= n)) {
            return Err(Error::InvalidGroup("table is not square over 0..n".into()));
        }
        let flat: Vec<u32> = table.into_iter().flatten().collect();
        let g = FiniteGroup {
            name: name.into(),
            order: n,
            inverses: Vec::new(),
            table: flat,
        };
        for a in 0..n {
            if g.raw_mul(0, a) != a || g.raw_mul(a, 0) != a {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
        }
        let mut inverses = vec![u32::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| g.raw_mul(a, b) == 0) {
                Some(b) if g.raw_mul(b, a) == 0 => inverses[a] = b as u32,
                _ => return Err(Error::InvalidGroup(format!("element {a} has no inverse"))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = g.raw_mul(a, b);
                for c in 0..n {
                    if g.raw_mul(ab, c) != g.raw_mul(a, g.raw_mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup { inverses, ..g })
    }

    fn raw_mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    /// `Z/n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        FiniteGroup::abelian(&[n])
    }

    /// `Z/n_1 x ... x Z/n_k`, elements encoded in mixed radix (first factor fastest).
    pub fn abelian(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&f| f == 0) {
            return Err(Error::InvalidGroup("factors must be positive".into()));
        }
        let n: usize = factors.iter().product();
        if n > 1 << 12 {
            return Err(Error::InvalidGroup(format!("order {n} is too large")));
        }
        let digits = |mut x: usize| -> Vec<usize> {
            factors
                .iter()
                .map(|&f| {
                    let d = x % f;
                    x /= f;
                    d
                })
                .collect()
        };
        let encode = |ds: &[usize]| -> usize {
            ds.iter()
                .zip(factors)
                .rev()
                .fold(0, |acc, (&d, &f)| acc * f + d)
        };
        let table = (0..n)
            .map(|a| {
                let da = digits(a);
                (0..n)
                    .map(|b| {
                        let db = digits(b);
                        let s: Vec<usize> = da
                            .iter()
                            .zip(&db)
                            .zip(factors)
                            .map(|((x, y), f)| (x + y) % f)
                            .collect();
                        encode(&s) as u32
                    })
                    .collect()
            })
            .collect();
        let name = factors
            .iter()
            .map(|f| format!("Z/{f}"))
            .collect::<Vec<_>>()
            .join("x");
        FiniteGroup::from_table(name, table)
    }

    /// Dihedral group of order 8; element `a + 4b` is `r^a s^b`.
    pub fn dihedral8() -> Self {
        let table = (0..8)
            .map(|x: usize| {
                let (a, b) = (x % 4, x / 4);
                (0..8)
                    .map(|y: usize| {
                        let (c, d) = (y % 4, y / 4);
                        let rot = if b == 0 { a + c } else { a + 4 - c } % 4;
                        (rot + 4 * ((b + d) % 2)) as u32
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table("D4", table).expect("dihedral table is a group")
    }

    /// Quaternion group; elements `1, -1, i, -i, j, -j, k, -k` in that order.
    pub fn quaternion8() -> Self {
        // unit products: (u, v) -> (sign, unit) with units 0=1, 1=i, 2=j, 3=k
        let unit = |u: usize, v: usize| -> (bool, usize) {
            match (u, v) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 1) => (true, 3),
                (2, 3) => (false, 1),
                (3, 2) => (true, 1),
                (3, 1) => (false, 2),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|x: usize| {
                (0..8)
                    .map(|y: usize| {
                        let (neg, u) = unit(x / 2, y / 2);
                        let sign = (x % 2) ^ (y % 2) ^ usize::from(neg);
                        (2 * u + sign) as u32
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table("Q8", table).expect("quaternion table is a group")
    }

    /// Named presets: `Z/n`, products such as `Z/2xZ/2`, `D4`, `Q8`.
    pub fn preset(name: &str) -> Result<Self> {
        let t = name.trim();
        match t {
            "D4" => return Ok(FiniteGroup::dihedral8()),
            "Q8" => return Ok(FiniteGroup::quaternion8()),
            _ => {}
        }
        let factors = t
            .split('x')
            .map(|f| {
                f.trim()
                    .strip_prefix("Z/")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidGroup(format!("unknown group preset {name:?}")))?;
        FiniteGroup::abelian(&factors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by a set of elements.
    pub fn generated(&self, gens: &[u32]) -> BTreeSet<u32> {
        let mut set: BTreeSet<u32> = BTreeSet::from([0]);
        let mut frontier = vec![0u32];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// A generating set chosen greedily in element order.
    pub fn generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([0]);
        for g in self.elements() {
            if !span.contains(&g) {
                gens.push(g);
                span = self.generated(&gens);
            }
        }
        gens
    }

    /// Whether the permutation `f` of the elements is a group automorphism.
    pub fn is_automorphism(&self, f: &[u32]) -> bool {
        if f.len() != self.order {
            return false;
        }
        let mut seen = vec![false; self.order];
        for &y in f {
            if y as usize >= self.order || seen[y as usize] {
                return false;
            }
            seen[y as usize] = true;
        }
        self.elements().all(|a| {
            self.elements()
                .all(|b| f[self.mul(a, b) as usize] == self.mul(f[a as usize], f[b as usize]))
        })
    }

    /// All automorphisms, sorted; the identity comes first.
    pub fn automorphisms(&self) -> Vec<Vec<u32>> {
        let gens = self.generators();
        let mut out = BTreeSet::new();
        let mut images = vec![0u32; gens.len()];
        loop {
            if let Some(f) = self.extend_homomorphism(&gens, &images) {
                if self.is_automorphism(&f) {
                    out.insert(f);
                }
            }
            // odometer over generator images
            let mut i = 0;
            loop {
                if i == gens.len() {
                    return out.into_iter().collect();
                }
                images[i] += 1;
                if (images[i] as usize) < self.order {
                    break;
                }
                images[i] = 0;
                i += 1;
            }
        }
    }

    /// The map determined by `gens[i] -> images[i]`, if it is well defined.
    fn extend_homomorphism(&self, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
        let mut f: Vec<Option<u32>> = vec![None; self.order];
        f[0] = Some(0);
        let mut frontier = vec![0u32];
        while let Some(x) = frontier.pop() {
            let fx = f[x as usize].expect("assigned");
            for (&g, &h) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = self.mul(fx, h);
                match f[y as usize] {
                    None => {
                        f[y as usize] = Some(fy);
                        frontier.push(y);
                    }
                    Some(v) if v != fy => return None,
                    _ => {}
                }
            }
        }
        f.into_iter().collect()
    }

    pub fn is_subgroup(&self, h: &BTreeSet<u32>) -> bool {
        h.contains(&0) && h.iter().all(|&a| h.iter().all(|&b| h.contains(&self.mul(a, self.inv(b)))))
    }

    pub fn is_normal(&self, h: &BTreeSet<u32>) -> bool {
        self.is_subgroup(h)
            && self.elements().all(|g| {
                h.iter()
                    .all(|&n| h.contains(&self.mul(self.mul(g, n), self.inv(g))))
            })
    }

    /// Every subgroup, ordered by size and then elementwise.
    pub fn subgroups(&self) -> Vec<BTreeSet<u32>> {
        let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut stack = vec![vec![0u32]];
        found.insert(vec![0]);
        while let Some(h) = stack.pop() {
            for g in self.elements() {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let k: Vec<u32> = self.generated(&gens).into_iter().collect();
                if found.insert(k.clone()) {
                    stack.push(k);
                }
            }
        }
        let mut out: Vec<BTreeSet<u32>> =
            found.into_iter().map(|v| v.into_iter().collect()).collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn normal_subgroups(&self) -> Vec<BTreeSet<u32>> {
        self.subgroups().into_iter().filter(|h| self.is_normal(h)).collect()
    }

    /// Label of the left coset `gN`: its least element.
    pub fn coset_labels(&self, n: &BTreeSet<u32>) -> Vec<u32> {
        self.elements()
            .map(|g| n.iter().map(|&m| self.mul(g, m)).min().expect("nonempty"))
            .collect()
    }
}

/// Whether `h` is mapped into itself by each map in `autos`.
pub fn is_invariant(h: &BTreeSet<u32>, autos: &[Vec<u32>]) -> bool {
    autos.iter().all(|f| h.iter().all(|&x| h.contains(&f[x as usize])))
}

/// An action of the rank-`r` free group on a finite group, one automorphism
/// per generator.
#[derive(Clone, Debug)]
pub struct FiniteGroupAction {
    group: FiniteGroup,
    autos: Vec<Vec<u32>>,
    inverse_autos: Vec<Vec<u32>>,
}

impl FiniteGroupAction {
    pub fn new(group: FiniteGroup, autos: Vec<Vec<u32>>) -> Result<Self> {
        if autos.is_empty() {
            return Err(Error::InvalidRank(0));
        }
        for (i, f) in autos.iter().enumerate() {
            if !group.is_automorphism(f) {
                return Err(Error::NotAutomorphism(format!("generator {}", i + 1)));
            }
        }
        let inverse_autos = autos
            .iter()
            .map(|f| {
                let mut inv = vec![0; f.len()];
                for (x, &y) in f.iter().enumerate() {
                    inv[y as usize] = x as u32;
                }
                inv
            })
            .collect();
        Ok(FiniteGroupAction {
            group,
            autos,
            inverse_autos,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.autos.len()
    }

    pub fn generator_autos(&self) -> &[Vec<u32>] {
        &self.autos
    }

    /// The automorphism for one signed letter.
    pub fn letter_map(&self, l: i8) -> &[u32] {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.autos[i]
        } else {
            &self.inverse_autos[i]
        }
    }

    /// `β_w`; for `w = l_1 ... l_k` this is `β_{l_1} ∘ ... ∘ β_{l_k}`.
    pub fn word_map(&self, w: &FreeWord) -> Vec<u32> {
        let mut f: Vec<u32> = self.group.elements().collect();
        for &l in w.letters().iter().rev() {
            let m = self.letter_map(l);
            for v in f.iter_mut() {
                *v = m[*v as usize];
            }
        }
        f
    }

    pub fn apply(&self, w: &FreeWord, g: u32) -> u32 {
        w.letters()
            .iter()
            .rev()
            .fold(g, |acc, &l| self.letter_map(l)[acc as usize])
    }

    /// Whether the subgroup is normal and mapped into itself by every generator.
    pub fn check_invariant_normal(&self, n: &BTreeSet<u32>) -> Result<()> {
        if !self.group.is_normal(n) {
            return Err(Error::NotNormal);
        }
        if !is_invariant(n, &self.autos) {
            return Err(Error::NotInvariant);
        }
        Ok(())
    }

    /// Normal subgroups invariant under every generator.
    pub fn invariant_normal_subgroups(&self) -> Vec<BTreeSet<u32>> {
        self.group
            .normal_subgroups()
            .into_iter()
            .filter(|h| is_invariant(h, &self.autos))
            .collect()
    }
}

/// JSON description of a finite group action.
#[derive(Clone, Debug, Deserialize)]
pub struct GroupActionSpec {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub table: Option<Vec<Vec<u32>>>,
    /// One permutation of the elements per free generator.
    pub automorphisms: Vec<Vec<u32>>,
}

impl GroupActionSpec {
    pub fn build(&self) -> Result<FiniteGroupAction> {
        let group = match (&self.preset, &self.table) {
            (Some(p), None) => FiniteGroup::preset(p)?,
            (None, Some(t)) => FiniteGroup::from_table("table", t.clone())?,
            _ => {
                return Err(Error::InvalidGroup(
                    "give exactly one of \"preset\" and \"table\"".into(),
                ))
            }
        };
        FiniteGroupAction::new(group, self.automorphisms.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_orders() {
        for (name, n) in [("Z/4", 4), ("Z/2xZ/2", 4), ("D4", 8), ("Q8", 8), ("Z/8", 8), ("Z/3", 3)] {
            assert_eq!(FiniteGroup::preset(name).unwrap().order(), n, "{name}");
        }
        assert!(FiniteGroup::preset("S3").is_err());
    }

    #[test]
    fn abelian_flags() {
        assert!(FiniteGroup::preset("Z/2xZ/2").unwrap().is_abelian());
        assert!(!FiniteGroup::dihedral8().is_abelian());
        assert!(!FiniteGroup::quaternion8().is_abelian());
    }

    #[test]
    fn automorphism_group_orders() {
        // |Aut(Z/4)| = 2, |Aut(Z/2^2)| = 6, |Aut(D4)| = 8, |Aut(Q8)| = 24, |Aut(Z/8)| = 4
        let cases = [("Z/4", 2), ("Z/2xZ/2", 6), ("D4", 8), ("Q8", 24), ("Z/8", 4)];
        for (name, n) in cases {
            let g = FiniteGroup::preset(name).unwrap();
            let autos = g.automorphisms();
            assert_eq!(autos.len(), n, "{name}");
            assert_eq!(autos[0], g.elements().collect::<Vec<_>>());
        }
    }

    #[test]
    fn subgroup_counts() {
        // D4 has 10 subgroups, 6 of them normal; Q8 has 6, all normal.
        let d4 = FiniteGroup::dihedral8();
        assert_eq!(d4.subgroups().len(), 10);
        assert_eq!(d4.normal_subgroups().len(), 6);
        let q8 = FiniteGroup::quaternion8();
        assert_eq!(q8.subgroups().len(), 6);
        assert_eq!(q8.normal_subgroups().len(), 6);
        assert_eq!(FiniteGroup::preset("Z/2xZ/2").unwrap().subgroups().len(), 5);
    }

    #[test]
    fn cosets_of_even_subgroup() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let n: BTreeSet<u32> = [0, 2].into();
        assert_eq!(z4.coset_labels(&n), vec![0, 1, 0, 1]);
    }

    #[test]
    fn word_maps_compose() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let neg = vec![0, 3, 2, 1];
        let id = vec![0, 1, 2, 3];
        let act = FiniteGroupAction::new(z4, vec![neg.clone(), id]).unwrap();
        let w = FreeWord::parse("aBa", 2).unwrap();
        assert_eq!(act.word_map(&w), id_after(&neg, &neg));
        assert_eq!(act.apply(&w, 1), 1);
        assert!(FiniteGroupAction::new(FiniteGroup::cyclic(4).unwrap(), vec![vec![0, 2, 1, 3]]).is_err());
    }

    fn id_after(f: &[u32], g: &[u32]) -> Vec<u32> {
        g.iter().map(|&x| f[x as usize]).collect()
    }

    #[test]
    fn spec_parsing() {
        let spec: GroupActionSpec =
            serde_json::from_str(r#"{"preset": "Z/4", "automorphisms": [[0,3,2,1],[0,1,2,3]]}"#)
                .unwrap();
        let act = spec.build().unwrap();
        assert_eq!(act.rank(), 2);
        assert_eq!(act.invariant_normal_subgroups().len(), 3);
    }
}

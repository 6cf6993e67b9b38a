//! Reduced words in the free group of rank `r` and the geometry of its
//! Cayley tree.
//!
//! A [`FreeWord`] stores a reduced sequence of signed generator indices:
//! `+i` is the generator `s_i` and `-i` its inverse. Words are reduced on
//! construction, so the stored length is the word-metric distance to the
//! identity.
//!
//! Text syntax: lowercase letters `a`..`z` name `s_1`..`s_26`, uppercase
//! letters their inverses, and `"e"` or `""` the identity. For ranks up to 4
//! the syntax round-trips exactly; from rank 5 on, the single-letter word
//! `s_5` prints as `"e"` and is therefore ambiguous.
//!
//! Sets of words ([`WordSet`]) iterate in length-lexicographic order where
//! letters are compared as `s_1 < s_1^-1 < s_2 < s_2^-1 < ...`. For balls
//! this order coincides with breadth-first order from the identity.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

/// A reduced word in the free group `F_r`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    rank: u8,
    letters: Vec<i8>,
}

fn letter_key(l: i8) -> u8 {
    let i = l.unsigned_abs() - 1;
    2 * i + u8::from(l < 0)
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::InvalidRank(rank));
    }
    Ok(())
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        assert!(rank >= 1 && rank <= MAX_RANK, "invalid rank {rank}");
        FreeWord {
            rank: rank as u8,
            letters: Vec::new(),
        }
    }

    /// The generator `s_i` (1-based index).
    pub fn generator(rank: usize, i: usize) -> Result<Self> {
        Self::letter(rank, i as i64)
    }

    /// A single signed letter: `i > 0` is `s_i`, `i < 0` is `s_{|i|}^-1`.
    pub fn letter(rank: usize, i: i64) -> Result<Self> {
        check_rank(rank)?;
        let a = i.unsigned_abs() as usize;
        if a == 0 || a > rank {
            return Err(Error::GeneratorOutOfRange { index: a, rank });
        }
        Ok(FreeWord {
            rank: rank as u8,
            letters: vec![i as i8],
        })
    }

    /// Builds a word from signed letters, reducing as it goes.
    pub fn from_letters<I: IntoIterator<Item = i64>>(rank: usize, letters: I) -> Result<Self> {
        check_rank(rank)?;
        let mut out: Vec<i8> = Vec::new();
        for l in letters {
            let a = l.unsigned_abs() as usize;
            if a == 0 || a > rank {
                return Err(Error::GeneratorOutOfRange { index: a, rank });
            }
            let l = l as i8;
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeWord {
            rank: rank as u8,
            letters: out,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn letters(&self) -> &[i8] {
        &self.letters
    }

    /// Word length `|w|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// Reduced product `self * other`.
    pub fn try_mul(&self, other: &FreeWord) -> Result<FreeWord> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        Ok(self.mul_same_rank(other))
    }

    fn mul_same_rank(&self, other: &FreeWord) -> FreeWord {
        let mut cancel = 0;
        let n = self.letters.len();
        while cancel < n
            && cancel < other.letters.len()
            && self.letters[n - 1 - cancel] == -other.letters[cancel]
        {
            cancel += 1;
        }
        let mut letters = Vec::with_capacity(n - cancel + other.letters.len() - cancel);
        letters.extend_from_slice(&self.letters[..n - cancel]);
        letters.extend_from_slice(&other.letters[cancel..]);
        FreeWord {
            rank: self.rank,
            letters,
        }
    }

    /// Multiplies on the right by one signed letter.
    pub fn mul_letter(&self, l: i8) -> FreeWord {
        debug_assert!(l != 0 && l.unsigned_abs() <= self.rank);
        let mut letters = self.letters.clone();
        if letters.last() == Some(&-l) {
            letters.pop();
        } else {
            letters.push(l);
        }
        FreeWord {
            rank: self.rank,
            letters,
        }
    }

    /// Word-metric distance `d(self, other) = |self^-1 other|`.
    pub fn dist(&self, other: &FreeWord) -> usize {
        let common = self
            .letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count();
        self.letters.len() + other.letters.len() - 2 * common
    }

    /// Integer power `self^k` (negative exponents invert).
    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord {
            rank: self.rank,
            letters: Vec::new(),
        };
        for _ in 0..k.unsigned_abs() {
            out = out.mul_same_rank(&base);
        }
        out
    }

    /// The `2r` neighbours `w t`, `t` ranging over `s_1, s_1^-1, ..., s_r^-1`.
    pub fn neighbors(&self) -> impl Iterator<Item = FreeWord> + '_ {
        all_letters(self.rank()).map(move |l| self.mul_letter(l))
    }

    /// Parses the text syntax (`"abA"`, `"e"`, `""`).
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let t = text.trim();
        if t.is_empty() || t == "e" {
            return Ok(FreeWord::identity(rank));
        }
        let mut letters = Vec::with_capacity(t.len());
        for c in t.chars() {
            let l = match c {
                'a'..='z' => (c as i64) - ('a' as i64) + 1,
                'A'..='Z' => -((c as i64) - ('A' as i64) + 1),
                _ => {
                    return Err(Error::WordSyntax {
                        text: text.to_string(),
                        reason: format!("unexpected character {c:?}"),
                    })
                }
            };
            if l.unsigned_abs() as usize > rank {
                return Err(Error::WordSyntax {
                    text: text.to_string(),
                    reason: format!("letter {c:?} exceeds rank {rank}"),
                });
            }
            letters.push(l);
        }
        FreeWord::from_letters(rank, letters)
    }

    pub fn to_text(&self) -> String {
        if self.letters.is_empty() {
            return "e".to_string();
        }
        self.letters
            .iter()
            .map(|&l| {
                let i = l.unsigned_abs() - 1;
                if l > 0 {
                    (b'a' + i) as char
                } else {
                    (b'A' + i) as char
                }
            })
            .collect()
    }
}

impl std::ops::Mul for &FreeWord {
    type Output = FreeWord;

    /// Panics on rank mismatch; use [`FreeWord::try_mul`] for the fallible form.
    fn mul(self, rhs: &FreeWord) -> FreeWord {
        self.try_mul(rhs).expect("rank mismatch in word product")
    }
}

impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| {
                self.letters
                    .iter()
                    .map(|&l| letter_key(l))
                    .cmp(other.letters.iter().map(|&l| letter_key(l)))
            })
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({})", self.to_text())
    }
}

/// Signed letters in generator order `s_1, s_1^-1, ..., s_r, s_r^-1`.
pub fn all_letters(rank: usize) -> impl Iterator<Item = i8> {
    (1..=rank as i8).flat_map(|i| [i, -i])
}

/// A finite set of words with deterministic (length-lexicographic) iteration.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WordSet {
    rank: usize,
    elements: BTreeSet<FreeWord>,
}

impl WordSet {
    pub fn new(rank: usize) -> Self {
        WordSet {
            rank,
            elements: BTreeSet::new(),
        }
    }

    pub fn from_words<I: IntoIterator<Item = FreeWord>>(rank: usize, words: I) -> Result<Self> {
        let mut s = WordSet::new(rank);
        for w in words {
            s.insert(w)?;
        }
        Ok(s)
    }

    /// Parses a list of words in text syntax.
    pub fn parse(rank: usize, words: &[&str]) -> Result<Self> {
        WordSet::from_words(
            rank,
            words
                .iter()
                .map(|t| FreeWord::parse(t, rank))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn insert(&mut self, w: FreeWord) -> Result<bool> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch(self.rank, w.rank()));
        }
        Ok(self.elements.insert(w))
    }

    pub fn contains(&self, w: &FreeWord) -> bool {
        self.elements.contains(w)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FreeWord> + '_ {
        self.elements.iter()
    }

    pub fn first(&self) -> Option<&FreeWord> {
        self.elements.iter().next()
    }

    pub fn to_vec(&self) -> Vec<FreeWord> {
        self.elements.iter().cloned().collect()
    }

    pub fn union(&self, other: &WordSet) -> WordSet {
        let mut out = self.clone();
        out.elements.extend(other.elements.iter().cloned());
        out
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Left translate `g W`.
    pub fn translate(&self, g: &FreeWord) -> WordSet {
        WordSet {
            rank: self.rank,
            elements: self.elements.iter().map(|w| g * w).collect(),
        }
    }

    /// Maximum word length, `None` when empty.
    pub fn max_len(&self) -> Option<usize> {
        self.elements.iter().map(FreeWord::len).max()
    }

    /// Connectivity of the induced subgraph of the Cayley tree.
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.first() else {
            return true;
        };
        let mut seen: HashSet<&FreeWord> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start);
        queue.push_back(start.clone());
        while let Some(v) = queue.pop_front() {
            for n in v.neighbors() {
                if let Some(m) = self.elements.get(&n) {
                    if seen.insert(m) {
                        queue.push_back(n);
                    }
                }
            }
        }
        seen.len() == self.len()
    }

    /// Degree of `v` in the induced subgraph.
    pub fn degree(&self, v: &FreeWord) -> usize {
        v.neighbors().filter(|n| self.contains(n)).count()
    }

    /// All words within distance `k` of the set.
    pub fn thicken(&self, k: usize) -> WordSet {
        let mut out = self.clone();
        let mut frontier: Vec<FreeWord> = self.to_vec();
        for _ in 0..k {
            let mut next = Vec::new();
            for v in &frontier {
                for n in v.neighbors() {
                    if out.elements.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

impl fmt::Debug for WordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements.iter().map(|w| w.to_text())).finish()
    }
}

impl<'a> IntoIterator for &'a WordSet {
    type Item = &'a FreeWord;
    type IntoIter = std::collections::btree_set::Iter<'a, FreeWord>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// The ball `B(n)` around the identity.
pub fn ball(rank: usize, n: usize) -> Result<WordSet> {
    check_rank(rank)?;
    Ok(ball_around(&FreeWord::identity(rank), n))
}

/// The ball `B(v, n)`.
pub fn ball_around(v: &FreeWord, n: usize) -> WordSet {
    let mut s = WordSet::new(v.rank());
    s.elements.insert(v.clone());
    s.thicken(n)
}

/// Closed-form size of `B(n)` in rank `r`.
pub fn ball_size(rank: usize, n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    if rank == 1 {
        return 2 * n + 1;
    }
    let q = 2 * rank - 1;
    1 + 2 * rank * (q.pow(n as u32) - 1) / (q - 1)
}

/// Vertices on the tree path from `v` to `w`, inclusive.
pub fn geodesic_interval(v: &FreeWord, w: &FreeWord) -> Result<WordSet> {
    let u = v.inverse().try_mul(w)?;
    let mut out = WordSet::new(v.rank());
    let mut cur = v.clone();
    out.elements.insert(cur.clone());
    for &l in u.letters() {
        cur = cur.mul_letter(l);
        out.elements.insert(cur.clone());
    }
    Ok(out)
}

/// Smallest connected superset.
pub fn convex_hull(s: &WordSet) -> Result<WordSet> {
    let root = s.first().ok_or(Error::EmptySet)?;
    let mut out = WordSet::new(s.rank());
    for w in s {
        out.elements
            .extend(geodesic_interval(root, w)?.elements.into_iter());
    }
    Ok(out)
}

/// Elements of degree exactly one in the induced subgraph.
pub fn extreme_points(s: &WordSet) -> WordSet {
    WordSet {
        rank: s.rank,
        elements: s.iter().filter(|v| s.degree(v) == 1).cloned().collect(),
    }
}

/// Radius and all centers of a finite set.
///
/// The centers are the middle vertex (or the two middle vertices) of a
/// longest path between elements of `s`.
pub fn radius_center(s: &WordSet) -> Result<(usize, WordSet)> {
    let a = s.first().ok_or(Error::EmptySet)?;
    let farthest = |from: &FreeWord| -> FreeWord {
        s.iter()
            .max_by(|x, y| from.dist(x).cmp(&from.dist(y)).then(y.cmp(x)))
            .cloned()
            .expect("nonempty")
    };
    let b = farthest(a);
    let c = farthest(&b);
    let path = geodesic_interval(&b, &c)?;
    let diameter = b.dist(&c);
    let radius = diameter.div_ceil(2);
    let mut centers = WordSet::new(s.rank());
    for v in path.iter() {
        let d = b.dist(v);
        if d == diameter / 2 || d == radius {
            centers.elements.insert(v.clone());
        }
    }
    Ok((radius, centers))
}

/// Breadth-first enumeration of `B(n)` from the identity, generators taken
/// in the order `s_1, s_1^-1, ..., s_r, s_r^-1`. Every prefix is connected.
pub fn spiral_ordering(rank: usize, n: usize) -> Result<Vec<FreeWord>> {
    check_rank(rank)?;
    let e = FreeWord::identity(rank);
    let mut out = vec![e.clone()];
    let mut head = 0;
    while head < out.len() {
        let v = out[head].clone();
        head += 1;
        if v.len() == n {
            continue;
        }
        for l in all_letters(rank) {
            if v.letters().last() == Some(&-l) {
                continue;
            }
            out.push(v.mul_letter(l));
        }
    }
    Ok(out)
}

/// First index `n >= 1` at which `ordering[n] * hull` is covered by the
/// earlier translates, or `None` when the condition holds throughout.
pub fn ordering_condition_failure(hull: &WordSet, ordering: &[FreeWord]) -> Option<usize> {
    let mut covered: HashSet<FreeWord> = HashSet::new();
    let mut seen: HashSet<&FreeWord> = HashSet::new();
    for (n, g) in ordering.iter().enumerate() {
        let translate: Vec<FreeWord> = hull.iter().map(|f| g * f).collect();
        if n >= 1 && (!seen.insert(g) || translate.iter().all(|t| covered.contains(t))) {
            return Some(n);
        }
        seen.insert(g);
        covered.extend(translate);
    }
    None
}

/// True iff for every `n >= 1`, `ordering[n] * hull` is not contained in
/// the union of the translates by `ordering[0..n]`.
pub fn check_ordering_condition(hull: &WordSet, ordering: &[FreeWord]) -> bool {
    ordering_condition_failure(hull, ordering).is_none()
}

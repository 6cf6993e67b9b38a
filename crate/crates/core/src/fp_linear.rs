//! Linear algebra over the prime field `Z/pZ` for `p < 2^15`.
//!
//! Elimination pivots on the first nonzero entry in column order, so every
//! echelon form (and every certificate built from one) is reproducible.
//! For `p = 2` the elimination runs on bit-packed rows.

use crate::error::{Error, Result};

pub const MAX_MODULUS: u32 = 1 << 15;

pub fn check_prime(p: u64) -> Result<u32> {
    if p < 2 || p >= u64::from(MAX_MODULUS) {
        return Err(Error::InvalidModulus(p));
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::InvalidModulus(p));
        }
        d += 1;
    }
    Ok(p as u32)
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    let mut result = 1u64;
    let mut base = u64::from(a % p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % u64::from(p);
        }
        base = base * base % u64::from(p);
        e >>= 1;
    }
    result as u32
}

pub fn reduce(v: i64, p: u32) -> u32 {
    v.rem_euclid(i64::from(p)) as u32
}

/// A dense matrix over `Z/pZ`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        let p = check_prime(p)?;
        Ok(FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        let mut m = FpMatrix::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix from integer rows, reducing every entry mod `p`.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = FpMatrix::zeros(p, rows.len(), cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, reduce(v, m.p));
            }
        }
        Ok(m)
    }

    pub(crate) fn from_raw(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FpMatrix { p, rows, cols, data }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        FpMatrix::from_raw(self.p, self.cols, self.rows, data)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        let p = u64::from(self.p);
        Ok((0..self.rows)
            .map(|i| {
                let s: u64 = self
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| u64::from(a) * u64::from(b) % p)
                    .sum();
                (s % p) as u32
            })
            .collect())
    }

    /// Appends `b` as an extra column.
    pub fn augment(&self, b: &[u32]) -> Result<FpMatrix> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.push(b[i] % self.p);
        }
        Ok(FpMatrix::from_raw(self.p, self.rows, cols, data))
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        FpMatrix::from_raw(self.p, self.rows, cols.len(), data)
    }

    /// Reduced row echelon form in place; returns the pivot columns and
    /// truncates the zero rows.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        if self.p == 2 {
            return self.rref_gf2();
        }
        let p = u64::from(self.p);
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = u64::from(inv_mod(self.data[r * cols + c], self.p));
            for j in c..cols {
                let v = &mut self.data[r * cols + j];
                *v = (u64::from(*v) * inv % p) as u32;
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            let eliminate = |row: &mut [u32]| {
                let f = u64::from(row[c]);
                if f == 0 {
                    return;
                }
                for j in c..cols {
                    let sub = f * u64::from(pivot_row[j]) % p;
                    row[j] = ((u64::from(row[j]) + p - sub) % p) as u32;
                }
            };
            before.chunks_mut(cols).for_each(eliminate);
            after.chunks_mut(cols).for_each(eliminate);
            pivots.push(c);
            r += 1;
        }
        self.rows = r;
        self.data.truncate(r * cols);
        pivots
    }

    fn rref_gf2(&mut self) -> Vec<usize> {
        let cols = self.cols;
        let words = cols.div_ceil(64).max(1);
        let mut bits: Vec<u64> = vec![0; self.rows * words];
        for i in 0..self.rows {
            for j in 0..cols {
                if self.data[i * cols + j] != 0 {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let (w, b) = (c / 64, 1u64 << (c % 64));
            let Some(pr) = (r..self.rows).find(|&i| bits[i * words + w] & b != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..words {
                    bits.swap(pr * words + k, r * words + k);
                }
            }
            for i in 0..self.rows {
                if i != r && bits[i * words + w] & b != 0 {
                    for k in w..words {
                        let v = bits[r * words + k];
                        bits[i * words + k] ^= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.rows = r;
        self.data = vec![0; r * cols];
        for i in 0..r {
            for j in 0..cols {
                if bits[i * words + j / 64] >> (j % 64) & 1 == 1 {
                    self.data[i * cols + j] = 1;
                }
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// A basis of `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        nullspace_from_rref(&m, &pivots)
    }

    /// The full solution set of `M x = b`.
    pub fn solve(&self, b: &[u32]) -> Result<AffineSolutionSet> {
        let mut aug = self.augment(b)?;
        let pivots = aug.rref_in_place();
        let n = self.cols;
        if pivots.last() == Some(&n) {
            return Ok(AffineSolutionSet::empty(self.p, n));
        }
        let mut particular = vec![0; n];
        for (i, &c) in pivots.iter().enumerate() {
            particular[c] = aug.get(i, n);
        }
        let coef = aug.select_columns(&(0..n).collect::<Vec<_>>());
        let basis = nullspace_from_rref(&coef, &pivots);
        Ok(AffineSolutionSet {
            p: self.p,
            vars: n,
            particular: Some(particular),
            basis,
        })
    }
}

fn nullspace_from_rref(m: &FpMatrix, pivots: &[usize]) -> Vec<Vec<u32>> {
    let p = m.p;
    let mut is_pivot = vec![false; m.cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0; m.cols];
            v[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = (p - m.get(i, f)) % p;
            }
            v
        })
        .collect()
}

/// An affine subspace `particular + span(basis)` of `(Z/pZ)^vars`, or empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolutionSet {
    p: u32,
    vars: usize,
    particular: Option<Vec<u32>>,
    basis: Vec<Vec<u32>>,
}

impl AffineSolutionSet {
    pub fn empty(p: u32, vars: usize) -> Self {
        AffineSolutionSet {
            p,
            vars,
            particular: None,
            basis: Vec::new(),
        }
    }

    /// The single point `v`.
    pub fn point(p: u32, v: Vec<u32>) -> Self {
        AffineSolutionSet {
            p,
            vars: v.len(),
            particular: Some(v),
            basis: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn particular(&self) -> Option<&[u32]> {
        self.particular.as_deref()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Dimension; `None` for the empty set.
    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.basis.len())
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let Some(part) = &self.particular else {
            return false;
        };
        if v.len() != self.vars {
            return false;
        }
        let diff: Vec<u32> = v
            .iter()
            .zip(part)
            .map(|(&a, &b)| (a % self.p + self.p - b) % self.p)
            .collect();
        if diff.iter().all(|&d| d == 0) {
            return true;
        }
        let mut rows = self.basis.clone();
        let before = rank_of_rows(self.p, self.vars, &rows);
        rows.push(diff);
        rank_of_rows(self.p, self.vars, &rows) == before
    }

    /// Every member, in lexicographic order of basis coefficients.
    /// Returns an error when there are more than `limit` members.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Vec<u32>>> {
        let Some(part) = &self.particular else {
            return Ok(Vec::new());
        };
        let d = self.basis.len() as u32;
        let count = (self.p as usize)
            .checked_pow(d)
            .filter(|&c| c <= limit)
            .ok_or_else(|| Error::InvalidArgument(format!("more than {limit} solutions")))?;
        let p = u64::from(self.p);
        let mut out = Vec::with_capacity(count);
        for idx in 0..count {
            let mut v: Vec<u64> = part.iter().map(|&x| u64::from(x)).collect();
            let mut k = idx;
            for b in &self.basis {
                let c = (k % self.p as usize) as u64;
                k /= self.p as usize;
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = (*vi + c * u64::from(bi)) % p;
                }
            }
            out.push(v.into_iter().map(|x| x as u32).collect());
        }
        Ok(out)
    }
}

fn rank_of_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> usize {
    let data: Vec<u32> = rows.iter().flatten().copied().collect();
    FpMatrix::from_raw(p, rows.len(), cols, data).rank()
}

/// Image of `s` under the coordinate projection onto `coords` (in that order).
pub fn project_solution_set(s: &AffineSolutionSet, coords: &[usize]) -> Result<AffineSolutionSet> {
    if let Some(&bad) = coords.iter().find(|&&c| c >= s.vars) {
        return Err(Error::CoordinateOutOfRange {
            index: bad,
            len: s.vars,
        });
    }
    let Some(part) = &s.particular else {
        return Ok(AffineSolutionSet::empty(s.p, coords.len()));
    };
    let particular: Vec<u32> = coords.iter().map(|&c| part[c]).collect();
    let projected: Vec<u32> = s
        .basis
        .iter()
        .flat_map(|b| coords.iter().map(move |&c| b[c]))
        .collect();
    let mut m = FpMatrix::from_raw(s.p, s.basis.len(), coords.len(), projected);
    m.rref_in_place();
    let basis = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    Ok(AffineSolutionSet {
        p: s.p,
        vars: coords.len(),
        particular: Some(particular),
        basis,
    })
}

/// The image of `{x : M x = b}` on a coordinate subset, described by the
/// linear constraints it satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedSystem {
    /// Constraint rows over the projected coordinates, in reduced echelon form.
    pub constraints: FpMatrix,
    pub rhs: Vec<u32>,
    /// False when the original system has no solution.
    pub consistent: bool,
}

impl ProjectedSystem {
    pub fn vars(&self) -> usize {
        self.constraints.cols()
    }

    /// Dimension of the projected set; `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.consistent
            .then(|| self.constraints.cols() - self.constraints.rows())
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        if !self.consistent || v.len() != self.vars() {
            return false;
        }
        let p = self.constraints.modulus();
        let v: Vec<u32> = v.iter().map(|&x| x % p).collect();
        match self.constraints.apply(&v) {
            Ok(lhs) => lhs == self.rhs,
            Err(_) => false,
        }
    }
}

/// Projects the solution set of `M x = b` onto `coords` by eliminating the
/// remaining variables first. Never enumerates solutions.
pub fn project_system(m: &FpMatrix, b: &[u32], coords: &[usize]) -> Result<ProjectedSystem> {
    let n = m.cols();
    let mut keep = vec![false; n];
    for &c in coords {
        if c >= n {
            return Err(Error::CoordinateOutOfRange { index: c, len: n });
        }
        if keep[c] {
            return Err(Error::InvalidArgument(format!("coordinate {c} listed twice")));
        }
        keep[c] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|&c| !keep[c]).collect();
    let eliminated = order.len();
    order.extend_from_slice(coords);
    let reordered = m.select_columns(&order).augment(b)?;
    let mut red = reordered;
    let pivots = red.rref_in_place();
    let total = n + 1;
    if pivots.last() == Some(&n) {
        return Ok(ProjectedSystem {
            constraints: FpMatrix::from_raw(m.modulus(), 0, coords.len(), Vec::new()),
            rhs: Vec::new(),
            consistent: false,
        });
    }
    let first = pivots.iter().position(|&c| c >= eliminated).unwrap_or(pivots.len());
    let k = coords.len();
    let mut data = Vec::with_capacity((pivots.len() - first) * k);
    let mut rhs = Vec::new();
    for i in first..pivots.len() {
        let row = &red.data[i * total..(i + 1) * total];
        data.extend_from_slice(&row[eliminated..n]);
        rhs.push(row[n]);
    }
    Ok(ProjectedSystem {
        constraints: FpMatrix::from_raw(m.modulus(), pivots.len() - first, k, data),
        rhs,
        consistent: true,
    })
}

/// Dimension of the projection of `ker M` onto `coords`.
pub fn projected_kernel_dimension(m: &FpMatrix, coords: &[usize]) -> Result<usize> {
    let zeros = vec![0; m.rows()];
    Ok(project_system(m, &zeros, coords)?
        .dimension()
        .expect("homogeneous systems are consistent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(p: u64, rows: &[&[i64]]) -> FpMatrix {
        FpMatrix::from_rows(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Column elimination, written independently of the row routine.
    fn rank_by_columns(m: &FpMatrix) -> usize {
        let p = m.modulus() as i64;
        let mut cols: Vec<Vec<i64>> = (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| m.get(i, j) as i64).collect())
            .collect();
        let mut rank = 0;
        for i in 0..m.rows() {
            let Some(pc) = (rank..cols.len()).find(|&j| cols[j][i] != 0) else {
                continue;
            };
            cols.swap(rank, pc);
            let inv = inv_mod(cols[rank][i] as u32, p as u32) as i64;
            for j in 0..cols.len() {
                if j != rank && cols[j][i] != 0 {
                    let f = cols[j][i] * inv % p;
                    for r in 0..m.rows() {
                        cols[j][r] = (cols[j][r] - f * cols[rank][r]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn modulus_guard() {
        assert_eq!(check_prime(4), Err(Error::InvalidModulus(4)));
        assert_eq!(check_prime(1 << 15), Err(Error::InvalidModulus(1 << 15)));
        assert_eq!(check_prime(32749), Ok(32749));
        assert!(FpMatrix::zeros(6, 1, 1).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(FpMatrix::identity(2, 3).unwrap().rank(), 3);
        assert_eq!(mat(2, &[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(mat(3, &[&[1, 2], &[2, 1]]).rank(), 1);
        assert_eq!(mat(5, &[&[1, 2], &[2, 1]]).rank(), 2);
    }

    #[test]
    fn solve_cases() {
        let s = FpMatrix::identity(3, 3).unwrap().solve(&[1, 2, 0]).unwrap();
        assert_eq!(s.dimension(), Some(0));
        assert_eq!(s.particular(), Some(&[1, 2, 0][..]));
        let z = FpMatrix::zeros(2, 2, 4).unwrap().solve(&[0, 0]).unwrap();
        assert_eq!(z.dimension(), Some(4));
        let bad = mat(2, &[&[1], &[1]]).solve(&[0, 1]).unwrap();
        assert!(bad.is_empty());
        assert!(FpMatrix::identity(2, 2).unwrap().solve(&[1]).is_err());
    }

    #[test]
    fn projection_of_parity_constraint() {
        let m = mat(2, &[&[1, 1, 0]]);
        let s = m.solve(&[0]).unwrap();
        let proj = project_solution_set(&s, &[0, 2]).unwrap();
        assert_eq!(proj.dimension(), Some(2));
        let sys = project_system(&m, &[0], &[0, 2]).unwrap();
        assert_eq!(sys.dimension(), Some(2));
        let sys01 = project_system(&m, &[0], &[0, 1]).unwrap();
        assert_eq!(sys01.dimension(), Some(1));
        assert!(sys01.contains(&[1, 1]) && !sys01.contains(&[1, 0]));
        assert_eq!(
            project_solution_set(&s, &[0, 1, 2]).unwrap().dimension(),
            s.dimension()
        );
        assert!(project_solution_set(&s, &[3]).is_err());
    }

    #[test]
    fn projecting_a_point() {
        let s = AffineSolutionSet::point(3, vec![1, 2, 0]);
        let proj = project_solution_set(&s, &[2, 0]).unwrap();
        assert_eq!(proj.enumerate(10).unwrap(), vec![vec![0, 1]]);
    }

    fn arb_matrix(p: u64, max_r: usize, max_c: usize) -> impl Strategy<Value = FpMatrix> {
        (1..=max_r, 1..=max_c).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(0..p as i64, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c).map(|x| x.to_vec()).collect();
                FpMatrix::from_rows(p, &rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_matches_transpose_and_column_oracle(m in arb_matrix(3, 6, 9)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert_eq!(m.rank(), rank_by_columns(&m));
        }

        #[test]
        fn gf2_path_matches_column_oracle(m in arb_matrix(2, 8, 70)) {
            prop_assert_eq!(m.rank(), rank_by_columns(&m));
        }

        #[test]
        fn rank_nullity(m in arb_matrix(5, 5, 7)) {
            let ns = m.nullspace();
            prop_assert_eq!(m.rank() + ns.len(), m.cols());
            for v in &ns {
                prop_assert!(m.apply(v).unwrap().iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn enumeration_counts_and_satisfies(
            m in arb_matrix(3, 4, 6),
            b in proptest::collection::vec(0u32..3, 4),
        ) {
            let b = &b[..m.rows()];
            let s = m.solve(b).unwrap();
            if let Some(d) = s.dimension() {
                let all = s.enumerate(1 << 12).unwrap();
                prop_assert_eq!(all.len(), 3usize.pow(d as u32));
                for v in &all {
                    prop_assert_eq!(&m.apply(v).unwrap()[..], b);
                    prop_assert!(s.contains(v));
                }
            } else {
                prop_assert!(m.rank() < m.augment(b).unwrap().rank());
            }
        }

        #[test]
        fn both_projection_routes_agree_with_brute_force(
            m in arb_matrix(2, 5, 8),
            b in proptest::collection::vec(0u32..2, 5),
            mask in proptest::collection::vec(any::<bool>(), 8),
        ) {
            let b = &b[..m.rows()];
            let coords: Vec<usize> = (0..m.cols()).filter(|&j| mask[j]).collect();
            let s = m.solve(b).unwrap();
            let via_set = project_solution_set(&s, &coords).unwrap();
            let via_sys = project_system(&m, b, &coords).unwrap();
            prop_assert_eq!(via_set.dimension(), via_sys.dimension());
            let members = s.enumerate(1 << 12).unwrap();
            let brute: std::collections::BTreeSet<Vec<u32>> = members
                .iter()
                .map(|v| coords.iter().map(|&c| v[c]).collect())
                .collect();
            let mut listed: std::collections::BTreeSet<Vec<u32>> = Default::default();
            for v in via_set.enumerate(1 << 12).unwrap() {
                prop_assert!(via_sys.contains(&v));
                listed.insert(v);
            }
            prop_assert_eq!(brute, listed);
        }
    }
}

//! Finitely supported matrix-valued convolution kernels over `Z/pZ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp_linear::{check_prime, inv_mod, reduce};
use crate::free_group::{convex_hull, extreme_points, radius_center, FreeWord, WordSet};

/// A kernel `h` with `d_out x d_in` matrix coefficients. The operator it
/// defines is `φ_h(x)(g) = Σ_s h(s^-1) x(g s)`, so `φ_h(x)(g)` reads `x` on
/// the translate `g F` of `F = {g : h(g^-1) != 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvolutionKernel {
    p: u32,
    rank: usize,
    d_in: usize,
    d_out: usize,
    /// Nonzero coefficients, each `d_out x d_in` row-major.
    coeffs: BTreeMap<FreeWord, Vec<u32>>,
}

impl ConvolutionKernel {
    pub fn new(
        p: u64,
        rank: usize,
        d_in: usize,
        d_out: usize,
        coeffs: impl IntoIterator<Item = (FreeWord, Vec<i64>)>,
    ) -> Result<Self> {
        let p = check_prime(p)?;
        if d_in == 0 || d_out == 0 {
            return Err(Error::InvalidKernel("dimensions must be positive".into()));
        }
        let mut map: BTreeMap<FreeWord, Vec<u32>> = BTreeMap::new();
        for (w, m) in coeffs {
            if w.rank() != rank {
                return Err(Error::RankMismatch(rank, w.rank()));
            }
            if m.len() != d_in * d_out {
                return Err(Error::InvalidKernel(format!(
                    "coefficient at {w} has {} entries, expected {}",
                    m.len(),
                    d_in * d_out
                )));
            }
            let slot = map.entry(w).or_insert_with(|| vec![0; d_in * d_out]);
            for (s, v) in slot.iter_mut().zip(m) {
                *s = (*s + reduce(v, p)) % p;
            }
        }
        map.retain(|_, m| m.iter().any(|&v| v != 0));
        Ok(ConvolutionKernel {
            p,
            rank,
            d_in,
            d_out,
            coeffs: map,
        })
    }

    /// A scalar kernel `Σ c_w δ_w`.
    pub fn scalar(p: u64, rank: usize, terms: &[(&str, i64)]) -> Result<Self> {
        let coeffs = terms
            .iter()
            .map(|(w, c)| Ok((FreeWord::parse(w, rank)?, vec![*c])))
            .collect::<Result<Vec<_>>>()?;
        ConvolutionKernel::new(p, rank, 1, 1, coeffs)
    }

    /// The map `x ↦ (x(g) + x(g s_1), ..., x(g) + x(g s_r))` over `Z/2Z`.
    pub fn binary_difference(rank: usize) -> Result<Self> {
        ConvolutionKernel::difference_map(2, rank)
    }

    /// The map `x ↦ (x(g s_i) - x(g))_i` over `Z/pZ`, whose kernel is the
    /// constant configurations.
    pub fn difference_map(p: u64, rank: usize) -> Result<Self> {
        let mut coeffs = vec![(FreeWord::identity(rank), vec![-1; rank])];
        for i in 1..=rank {
            let mut col = vec![0; rank];
            col[i - 1] = 1;
            coeffs.push((FreeWord::letter(rank, -(i as i64))?, col));
        }
        ConvolutionKernel::new(p, rank, 1, rank, coeffs)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn is_scalar(&self) -> bool {
        self.d_in == 1 && self.d_out == 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<FreeWord, Vec<u32>> {
        &self.coeffs
    }

    /// `h(w)` as a `d_out x d_in` matrix; zero outside the support.
    pub fn coeff(&self, w: &FreeWord) -> Vec<u32> {
        self.coeffs
            .get(w)
            .cloned()
            .unwrap_or_else(|| vec![0; self.d_in * self.d_out])
    }

    /// `F = {g : h(g^-1) != 0}`.
    pub fn read_set(&self) -> WordSet {
        WordSet::from_words(self.rank, self.coeffs.keys().map(FreeWord::inverse))
            .expect("coefficients share the kernel rank")
    }

    /// `(t, h(t^-1))` for every `t` in `F`, in word order.
    pub fn taps(&self) -> Vec<(FreeWord, Vec<u32>)> {
        let mut v: Vec<_> = self
            .coeffs
            .iter()
            .map(|(w, m)| (w.inverse(), m.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// `h * δ_c`, i.e. `h'(u) = h(u c^-1)`. The read set becomes `c^-1 F` and
    /// `φ_{h'}(x)(g) = φ_h(x)(g c^-1)`, so both operators have the same kernel.
    pub fn recentered(&self, c: &FreeWord) -> ConvolutionKernel {
        ConvolutionKernel {
            coeffs: self.coeffs.iter().map(|(w, m)| (w * c, m.clone())).collect(),
            ..self.clone()
        }
    }

    /// Evaluates `φ_h(x)(g)`, reading missing coordinates as zero.
    pub fn evaluate_at(&self, x: &impl Fn(&FreeWord) -> Option<Vec<u32>>, g: &FreeWord) -> Vec<u32> {
        let p = u64::from(self.p);
        let mut out = vec![0u64; self.d_out];
        for (t, m) in self.taps() {
            let Some(v) = x(&(g * &t)) else { continue };
            for (i, o) in out.iter_mut().enumerate() {
                for (j, &vj) in v.iter().enumerate() {
                    *o = (*o + u64::from(m[i * self.d_in + j]) * u64::from(vj)) % p;
                }
            }
        }
        out.into_iter().map(|v| v as u32).collect()
    }

    /// Scalar coefficient `h(w)`; panics on matrix kernels.
    pub(crate) fn scalar_coeff(&self, w: &FreeWord) -> u32 {
        assert!(self.is_scalar());
        self.coeffs.get(w).map_or(0, |m| m[0])
    }

    pub(crate) fn scalar_inverse(&self, w: &FreeWord) -> u32 {
        inv_mod(self.scalar_coeff(w), self.p)
    }
}

/// JSON form: `{"p": 2, "rank": 2, "d_in": 1, "d_out": 1, "coeffs": {"e": [[1]], "A": [[1]]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    pub p: u64,
    pub rank: usize,
    #[serde(default = "one")]
    pub d_in: usize,
    #[serde(default = "one")]
    pub d_out: usize,
    pub coeffs: BTreeMap<String, Vec<Vec<i64>>>,
}

fn one() -> usize {
    1
}

impl KernelSpec {
    pub fn build(&self) -> Result<ConvolutionKernel> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, rows)| {
                if rows.len() != self.d_out || rows.iter().any(|r| r.len() != self.d_in) {
                    return Err(Error::InvalidKernel(format!(
                        "coefficient at {w:?} is not {}x{}",
                        self.d_out, self.d_in
                    )));
                }
                Ok((FreeWord::parse(w, self.rank)?, rows.concat()))
            })
            .collect::<Result<Vec<_>>>()?;
        ConvolutionKernel::new(self.p, self.rank, self.d_in, self.d_out, coeffs)
    }

    pub fn from_kernel(k: &ConvolutionKernel) -> Self {
        KernelSpec {
            p: u64::from(k.p),
            rank: k.rank,
            d_in: k.d_in,
            d_out: k.d_out,
            coeffs: k
                .coeffs
                .iter()
                .map(|(w, m)| {
                    let rows = m
                        .chunks(k.d_in)
                        .map(|r| r.iter().map(|&v| i64::from(v)).collect())
                        .collect();
                    (w.to_text(), rows)
                })
                .collect(),
        }
    }
}

/// The read set of a kernel and its tree geometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGeometry {
    /// `F = {g : h(g^-1) != 0}`.
    pub support: WordSet,
    pub hull: WordSet,
    pub extremes: WordSet,
    pub radius: usize,
    pub centers: WordSet,
}

pub fn support_geometry(k: &ConvolutionKernel) -> Result<SupportGeometry> {
    if k.is_zero() {
        return Err(Error::ZeroKernel);
    }
    let support = k.read_set();
    let hull = convex_hull(&support)?;
    let extremes = extreme_points(&hull);
    let (radius, centers) = radius_center(&hull)?;
    Ok(SupportGeometry {
        support,
        hull,
        extremes,
        radius,
        centers,
    })
}

/// Largest distance between two elements of the read set.
pub fn support_diameter(k: &ConvolutionKernel) -> usize {
    let f = k.read_set().to_vec();
    f.iter()
        .flat_map(|a| f.iter().map(move |b| a.dist(b)))
        .max()
        .unwrap_or(0)
}

/// The kernel moved so that `e` is a center of its hull, together with the
/// center `c` that was moved to `e` (the length-lexicographic least center).
pub fn centered(k: &ConvolutionKernel) -> Result<(ConvolutionKernel, FreeWord)> {
    let geo = support_geometry(k)?;
    let c = geo.centers.first().expect("nonempty").clone();
    Ok((k.recentered(&c), c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ws: &[&str]) -> WordSet {
        WordSet::parse(2, ws).unwrap()
    }

    #[test]
    fn geometry_of_two_term_kernel() {
        let k = ConvolutionKernel::scalar(2, 2, &[("e", 1), ("a", 1)]).unwrap();
        let g = support_geometry(&k).unwrap();
        assert_eq!(g.support, set(&["e", "A"]));
        assert_eq!(g.hull, g.support);
        assert_eq!(g.extremes, g.support);
        assert_eq!(g.radius, 1);
    }

    #[test]
    fn geometry_of_delta() {
        let k = ConvolutionKernel::scalar(2, 2, &[("e", 1)]).unwrap();
        let g = support_geometry(&k).unwrap();
        assert_eq!(g.support, set(&["e"]));
        assert_eq!(g.radius, 0);
        assert!(g.extremes.is_empty());
    }

    #[test]
    fn geometry_of_binary_difference_map() {
        // φ(x)(g) = (x(g) + x(g s_1), x(g) + x(g s_2)) reads x on g{e, s_1, s_2}.
        let k = ConvolutionKernel::binary_difference(2).unwrap();
        let g = support_geometry(&k).unwrap();
        assert_eq!(g.support, set(&["e", "a", "b"]));
        assert_eq!(g.hull, g.support);
        assert_eq!(g.extremes, set(&["a", "b"]));
        assert_eq!(set(&["e", "A", "B"]), WordSet::from_words(2, k.coeffs().keys().cloned()).unwrap());
    }

    #[test]
    fn zero_kernel_is_rejected() {
        let k = ConvolutionKernel::scalar(3, 2, &[("a", 3)]).unwrap();
        assert!(k.is_zero());
        assert_eq!(support_geometry(&k), Err(Error::ZeroKernel));
    }

    #[test]
    fn recentering_preserves_values() {
        let k = ConvolutionKernel::scalar(3, 2, &[("e", 1), ("aa", 2), ("b", 1)]).unwrap();
        let (h2, c) = centered(&k).unwrap();
        let geo = support_geometry(&h2).unwrap();
        assert!(geo.centers.contains(&FreeWord::identity(2)));
        let x = |w: &FreeWord| -> Option<Vec<u32>> {
            Some(vec![(w.letters().iter().map(|&l| l as i64 + 5).sum::<i64>() % 3) as u32])
        };
        for g in crate::free_group::ball(2, 2).unwrap().iter() {
            assert_eq!(h2.evaluate_at(&x, g), k.evaluate_at(&x, &(g * &c.inverse())));
        }
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"p": 2, "rank": 2, "d_in": 1, "d_out": 1, "coeffs": {"e": [[1]], "A": [[1]]}}"#;
        let spec: KernelSpec = serde_json::from_str(json).unwrap();
        let k = spec.build().unwrap();
        assert_eq!(k.read_set(), set(&["e", "a"]));
        assert_eq!(KernelSpec::from_kernel(&k).build().unwrap(), k);
        let bad = r#"{"p": 4, "rank": 2, "coeffs": {"e": [[1]]}}"#;
        assert!(serde_json::from_str::<KernelSpec>(bad).unwrap().build().is_err());
    }
}

//! Surjectivity of convolution operators and an explicit preimage solver.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::kernel::{centered, support_geometry, ConvolutionKernel};
use super::window::{OffsetTable, WindowIndex};
use crate::error::{Error, Result};
use crate::fp_linear::{reduce, FpMatrix};
use crate::free_group::{ball, ordering_condition_failure, spiral_ordering, FreeWord, WordSet};

/// Evidence behind a surjectivity verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectivityVerdict {
    pub surjective: bool,
    /// True when the verdict follows from the ordering argument for nonzero
    /// scalar kernels; false for window-only verdicts on matrix kernels.
    pub theorem_backed: bool,
    /// Center moved to `e` before the ordering test.
    pub center: Option<String>,
    /// Hull of the recentered read set.
    pub hull: Vec<String>,
    /// Radius of the ball whose spiral ordering was tested.
    pub depth: usize,
    /// First index where the ordering condition failed, if any.
    pub ordering_failure: Option<usize>,
    /// Ball radii on which every target pattern was shown attainable.
    pub windows_checked: Vec<usize>,
}

/// Whether every target on `B(n)` is attained by `φ_h` from some
/// configuration, decided by the rank of the restricted operator.
pub fn window_surjective(k: &ConvolutionKernel, n: usize) -> Result<bool> {
    if k.is_zero() {
        return Ok(false);
    }
    let (m, _) = restricted_operator(k, n)?;
    Ok(m.rank() == m.rows())
}

/// Matrix of `x ↦ φ_h(x)|_{B(n)}` with columns over `B(n) F`.
pub fn restricted_operator(k: &ConvolutionKernel, n: usize) -> Result<(FpMatrix, WindowIndex)> {
    let targets = ball(k.rank(), n)?;
    let read = k.read_set();
    let domain = WordSet::from_words(
        k.rank(),
        targets.iter().flat_map(|g| read.iter().map(move |t| g * t)),
    )?;
    let table = OffsetTable::new(&domain, &read);
    let index = table.index().clone();
    let (d_in, d_out) = (k.d_in(), k.d_out());
    let cols = index.len() * d_in;
    let mut m = FpMatrix::zeros(u64::from(k.modulus()), targets.len() * d_out, cols)?;
    for (r, g) in targets.iter().enumerate() {
        for (t, c) in k.taps() {
            let pos = index.position(&(g * &t)).expect("domain contains all reads");
            for i in 0..d_out {
                for j in 0..d_in {
                    m.set(r * d_out + i, pos * d_in + j, c[i * d_in + j]);
                }
            }
        }
    }
    Ok((m, index))
}

/// Decides whether `φ_h` is onto.
///
/// Nonzero scalar kernels are onto; the certificate is the recentered hull
/// together with a successful ordering-condition check on the spiral
/// ordering of `B(depth)`. Zero kernels are not onto. Matrix kernels get a
/// window verdict on `B(0), ..., B(depth)` that is not backed by the theorem.
pub fn is_surjective(k: &ConvolutionKernel, depth: usize) -> Result<SurjectivityVerdict> {
    if k.is_zero() {
        return Ok(SurjectivityVerdict {
            surjective: false,
            theorem_backed: true,
            center: None,
            hull: Vec::new(),
            depth,
            ordering_failure: None,
            windows_checked: Vec::new(),
        });
    }
    if !k.is_scalar() {
        let mut checked = Vec::new();
        for n in 0..=depth {
            if !window_surjective(k, n)? {
                return Ok(SurjectivityVerdict {
                    surjective: false,
                    theorem_backed: false,
                    center: None,
                    hull: Vec::new(),
                    depth,
                    ordering_failure: None,
                    windows_checked: checked,
                });
            }
            checked.push(n);
        }
        return Ok(SurjectivityVerdict {
            surjective: true,
            theorem_backed: false,
            center: None,
            hull: Vec::new(),
            depth,
            ordering_failure: None,
            windows_checked: checked,
        });
    }
    let (h, c) = centered(k)?;
    let geo = support_geometry(&h)?;
    let order = spiral_ordering(k.rank(), depth)?;
    let failure = ordering_condition_failure(&geo.hull, &order);
    Ok(SurjectivityVerdict {
        surjective: failure.is_none(),
        theorem_backed: true,
        center: Some(c.to_text()),
        hull: geo.hull.iter().map(FreeWord::to_text).collect(),
        depth,
        ordering_failure: failure,
        windows_checked: Vec::new(),
    })
}

/// Builds a finite configuration `x` with `φ_h(x) = y` on `B(n)`.
///
/// `target` lists `y` over `B(n)` in word order. The construction walks the
/// spiral ordering and, at each site `γ`, solves for one coordinate `γ f`
/// with `f` an extreme point of the recentered hull that no earlier
/// translate covers. Coordinates that are read but never solved for are 0.
/// The result is re-checked against `φ_h` before it is returned.
pub fn preimage_on_ball(
    k: &ConvolutionKernel,
    n: usize,
    target: &[u32],
) -> Result<BTreeMap<FreeWord, u32>> {
    if !k.is_scalar() {
        return Err(Error::NotScalar);
    }
    let p = k.modulus();
    let targets = ball(k.rank(), n)?;
    if target.len() != targets.len() {
        return Err(Error::PatternMismatch(format!(
            "{} target values for {} words",
            target.len(),
            targets.len()
        )));
    }
    let y: BTreeMap<FreeWord, u32> = targets
        .iter()
        .cloned()
        .zip(target.iter().map(|&v| v % p))
        .collect();
    let (h, c) = centered(k)?;
    let geo = support_geometry(&h)?;
    let pick_from: Vec<FreeWord> = if geo.extremes.is_empty() {
        geo.hull.to_vec()
    } else {
        geo.extremes.to_vec()
    };
    let taps = h.taps();
    let c_inv = c.inverse();
    let order = spiral_ordering(k.rank(), n + c.len())?;

    let mut x: BTreeMap<FreeWord, u32> = BTreeMap::new();
    let mut region: HashSet<FreeWord> = HashSet::new();
    for (i, g) in order.iter().enumerate() {
        let want = y.get(&(g * &c_inv)).copied().unwrap_or(0);
        let f = pick_from
            .iter()
            .find(|f| !region.contains(&(g * f)))
            .ok_or(Error::OrderingConditionFailed(i))?;
        let gf = g * f;
        let mut acc = 0i64;
        for (t, m) in &taps {
            let gt = g * t;
            if gt == gf {
                continue;
            }
            let v = *x.entry(gt).or_insert(0);
            acc += i64::from(v) * i64::from(m[0]);
        }
        let inv = h.scalar_inverse(&f.inverse());
        let value = reduce((i64::from(want) - acc) * i64::from(inv), p);
        x.insert(gf, value);
        region.extend(geo.hull.iter().map(|u| g * u));
    }

    let lookup = |w: &FreeWord| x.get(w).map(|&v| vec![v]);
    for (g, &want) in &y {
        if k.evaluate_at(&lookup, g)[0] != want {
            return Err(Error::InvalidArgument(format!(
                "preimage re-check failed at {g}"
            )));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_kernel_is_onto() {
        let k = ConvolutionKernel::scalar(2, 2, &[("e", 1), ("a", 1)]).unwrap();
        let v = is_surjective(&k, 3).unwrap();
        assert!(v.surjective && v.theorem_backed);
        assert!(window_surjective(&k, 1).unwrap());
    }

    #[test]
    fn zero_kernel_is_not_onto() {
        let k = ConvolutionKernel::scalar(2, 2, &[]).unwrap();
        assert!(!is_surjective(&k, 2).unwrap().surjective);
    }

    #[test]
    fn binary_difference_is_window_onto() {
        let k = ConvolutionKernel::binary_difference(2).unwrap();
        let v = is_surjective(&k, 1).unwrap();
        assert!(v.surjective);
        assert!(!v.theorem_backed);
        assert_eq!(v.windows_checked, vec![0, 1]);
    }

    #[test]
    fn zero_target_gives_zero_preimage() {
        let k = ConvolutionKernel::scalar(3, 2, &[("e", 1), ("A", 2), ("B", 1)]).unwrap();
        let x = preimage_on_ball(&k, 1, &[0; 5]).unwrap();
        assert!(x.values().all(|&v| v == 0));
    }

    #[test]
    fn indicator_target() {
        let k = ConvolutionKernel::scalar(2, 2, &[("e", 1), ("a", 1)]).unwrap();
        let x = preimage_on_ball(&k, 0, &[1]).unwrap();
        let e = FreeWord::identity(2);
        let a_inv = FreeWord::parse("A", 2).unwrap();
        let get = |w: &FreeWord| x.get(w).copied().unwrap_or(0);
        assert_eq!((get(&e) + get(&a_inv)) % 2, 1);
    }

    #[test]
    fn off_center_kernel_preimages() {
        let k = ConvolutionKernel::scalar(3, 2, &[("ab", 1), ("aab", 2), ("abB", 1)]).unwrap();
        for seed in 0..5u32 {
            let t: Vec<u32> = (0..17).map(|i| (i * 7 + seed) % 3).collect();
            preimage_on_ball(&k, 2, &t).unwrap();
        }
    }
}

//! Linear systems cutting out `X_{h,p} = ker φ_h` on finite windows, and
//! certified projections of the Haar measure on `X_{h,p}` to finite sets.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::kernel::{centered, support_diameter, support_geometry, ConvolutionKernel};
use crate::error::{Error, Result};
use crate::fp_linear::{project_system, FpMatrix, ProjectedSystem};
use crate::free_group::{convex_hull, FreeWord, WordSet};

/// Column positions of a window: each word owns `d_in` consecutive columns.
#[derive(Clone, Debug)]
pub struct WindowIndex {
    words: Vec<FreeWord>,
    pos: HashMap<FreeWord, usize>,
}

impl WindowIndex {
    pub fn new(window: &WordSet) -> Self {
        let words = window.to_vec();
        let pos = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        WindowIndex { words, pos }
    }

    pub fn words(&self) -> &[FreeWord] {
        &self.words
    }

    pub fn position(&self, w: &FreeWord) -> Option<usize> {
        self.pos.get(w).copied()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Precomputed positions of `g t` inside a window for a list of sites `g`
/// and offsets `t`. Lets many kernels with read sets inside the offsets
/// share one geometric pass.
#[derive(Clone, Debug)]
pub struct OffsetTable {
    index: WindowIndex,
    offsets: Vec<FreeWord>,
    offset_pos: HashMap<FreeWord, usize>,
    sites: Vec<FreeWord>,
    /// `table[site][offset]` is the window position of `site * offset`.
    table: Vec<Vec<Option<u32>>>,
}

impl OffsetTable {
    /// Sites are all `g` with `g t` in the window for at least one offset `t`.
    pub fn new(window: &WordSet, offsets: &WordSet) -> Self {
        let index = WindowIndex::new(window);
        let offsets_v = offsets.to_vec();
        let mut sites: Vec<FreeWord> = window
            .iter()
            .flat_map(|v| offsets_v.iter().map(move |t| v * &t.inverse()))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        sites.sort();
        let table = sites
            .iter()
            .map(|g| {
                offsets_v
                    .iter()
                    .map(|t| index.position(&(g * t)).map(|i| i as u32))
                    .collect()
            })
            .collect();
        let offset_pos = offsets_v.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        OffsetTable {
            index,
            offsets: offsets_v,
            offset_pos,
            sites,
            table,
        }
    }

    pub fn index(&self) -> &WindowIndex {
        &self.index
    }

    pub fn offset_position(&self, t: &FreeWord) -> Option<usize> {
        self.offset_pos.get(t).copied()
    }

    pub fn offsets(&self) -> &[FreeWord] {
        &self.offsets
    }
}

/// The constraints `φ_h(x)(g) = 0` for every site `g` whose read translate
/// `g F` lies in the window.
#[derive(Clone, Debug)]
pub struct WindowSystem {
    pub matrix: FpMatrix,
    pub index: WindowIndex,
    /// Constraint sites, each contributing `d_out` consecutive rows.
    pub sites: Vec<FreeWord>,
    pub d_in: usize,
}

impl WindowSystem {
    /// Column indices of the coordinates over `w` (which must lie in the window).
    pub fn columns_of(&self, w: &WordSet) -> Result<Vec<usize>> {
        let mut cols = Vec::with_capacity(w.len() * self.d_in);
        for v in w {
            let i = self.index.position(v).ok_or_else(|| {
                Error::InvalidArgument(format!("word {v} is outside the window"))
            })?;
            cols.extend((0..self.d_in).map(|j| i * self.d_in + j));
        }
        Ok(cols)
    }
}

pub fn window_system(k: &ConvolutionKernel, window: &WordSet) -> Result<WindowSystem> {
    if k.is_zero() {
        return Ok(WindowSystem {
            matrix: FpMatrix::zeros(u64::from(k.modulus()), 0, window.len() * k.d_in())?,
            index: WindowIndex::new(window),
            sites: Vec::new(),
            d_in: k.d_in(),
        });
    }
    let table = OffsetTable::new(window, &k.read_set());
    window_system_with(k, &table)
}

/// Builds the window system from a precomputed table; the kernel's read set
/// must be among the table's offsets.
pub fn window_system_with(k: &ConvolutionKernel, table: &OffsetTable) -> Result<WindowSystem> {
    let taps: Vec<(usize, Vec<u32>)> = k
        .taps()
        .into_iter()
        .map(|(t, m)| {
            table
                .offset_position(&t)
                .map(|i| (i, m))
                .ok_or_else(|| Error::InvalidArgument(format!("offset {t} missing from table")))
        })
        .collect::<Result<_>>()?;
    let (d_in, d_out) = (k.d_in(), k.d_out());
    let cols = table.index.len() * d_in;
    let mut data = Vec::new();
    let mut sites = Vec::new();
    for (g, row) in table.sites.iter().zip(&table.table) {
        let cells: Option<Vec<u32>> = taps.iter().map(|(i, _)| row[*i]).collect();
        let Some(cells) = cells else { continue };
        let start = data.len();
        data.resize(start + d_out * cols, 0);
        for ((_, m), &c) in taps.iter().zip(&cells) {
            for i in 0..d_out {
                for j in 0..d_in {
                    data[start + i * cols + c as usize * d_in + j] = m[i * d_in + j];
                }
            }
        }
        sites.push(g.clone());
    }
    let rows = sites.len() * d_out;
    Ok(WindowSystem {
        matrix: FpMatrix::from_raw(k.modulus(), rows, cols, data),
        index: table.index.clone(),
        sites,
        d_in,
    })
}

/// How a projected dimension was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum WindowCertificate {
    /// Every window solution restricted to the target extends to a point of
    /// `X_{h,p}`, so the projection is exact. Also stabilized.
    ExtensionCertified,
    /// Two nested enclosing windows gave the same projection.
    Stabilized,
}

#[derive(Clone, Debug)]
pub struct ProjectedDimension {
    pub dimension: usize,
    pub certificate: WindowCertificate,
    /// Whether the next larger window agreed.
    pub stabilized: bool,
    /// The enclosing window the projection was read from.
    pub window: WordSet,
    /// Linear description of the projected set over the target coordinates.
    pub system: ProjectedSystem,
}

/// Options for the enclosing-window schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowOptions {
    /// Extra thickening steps allowed beyond the starting window.
    pub window_cap: usize,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions { window_cap: 4 }
    }
}

fn project_onto(k: &ConvolutionKernel, v: &WordSet, w: &WordSet) -> Result<ProjectedSystem> {
    let sys = window_system(k, v)?;
    let cols = sys.columns_of(w)?;
    let zeros = vec![0; sys.matrix.rows()];
    project_system(&sys.matrix, &zeros, &cols)
}

fn dim(s: &ProjectedSystem) -> usize {
    s.dimension().expect("homogeneous systems are consistent")
}

/// Whether the window `v` proves that its projection onto `w` is exact for
/// a scalar kernel with centered hull `hull` (a connected set containing `e`):
/// the sites `C = {g : g hull ⊆ v}` must be nonempty and connected and their
/// translates must cover `w`.
pub fn extension_certifies(hull: &WordSet, v: &WordSet, w: &WordSet) -> bool {
    let anchor = hull.first().expect("nonempty hull");
    let sites: WordSet = WordSet::from_words(
        v.rank(),
        v.iter()
            .map(|x| x * &anchor.inverse())
            .filter(|g| hull.iter().all(|f| v.contains(&(g * f)))),
    )
    .expect("same rank");
    if sites.is_empty() || !sites.is_connected() {
        return false;
    }
    let covered: HashSet<FreeWord> = sites
        .iter()
        .flat_map(|g| hull.iter().map(move |f| g * f))
        .collect();
    w.iter().all(|x| covered.contains(x))
}

/// Dimension of the projection of `X_{h,p}` onto the coordinates over `w`.
///
/// Scalar kernels: enclosing windows are thickenings of the hull of `w` by
/// `R, R+1, ...` (with `R` the radius of the read set's hull), and the first
/// window passing [`extension_certifies`] gives an exact answer. Matrix
/// kernels: thickenings by `D, D+1, ...` (with `D` the read-set diameter)
/// until two successive windows agree.
pub fn projected_dimension(
    k: &ConvolutionKernel,
    w: &WordSet,
    opts: WindowOptions,
) -> Result<ProjectedDimension> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    let base = convex_hull(w)?;
    if k.is_zero() {
        let sys = project_onto(k, &base, w)?;
        return Ok(ProjectedDimension {
            dimension: dim(&sys),
            certificate: WindowCertificate::ExtensionCertified,
            stabilized: true,
            window: base,
            system: sys,
        });
    }
    if k.is_scalar() {
        let (h, _) = centered(k)?;
        let geo = support_geometry(&h)?;
        for extra in 0..=opts.window_cap {
            let v = base.thicken(geo.radius + extra);
            if !extension_certifies(&geo.hull, &v, w) {
                continue;
            }
            let sys = project_onto(k, &v, w)?;
            let next = project_onto(k, &base.thicken(geo.radius + extra + 1), w)?;
            return Ok(ProjectedDimension {
                dimension: dim(&sys),
                certificate: WindowCertificate::ExtensionCertified,
                stabilized: dim(&next) == dim(&sys),
                window: v,
                system: sys,
            });
        }
        let last = dim(&project_onto(k, &base.thicken(geo.radius + opts.window_cap), w)?);
        return Err(Error::Uncertified {
            lower: 0,
            upper: last,
        });
    }
    let start = support_diameter(k);
    let mut prev = project_onto(k, &base.thicken(start), w)?;
    for extra in 1..=opts.window_cap.max(1) {
        let v = base.thicken(start + extra);
        let cur = project_onto(k, &v, w)?;
        if dim(&cur) == dim(&prev) {
            return Ok(ProjectedDimension {
                dimension: dim(&cur),
                certificate: WindowCertificate::Stabilized,
                stabilized: true,
                window: v,
                system: cur,
            });
        }
        prev = cur;
    }
    Err(Error::Uncertified {
        lower: 0,
        upper: dim(&prev),
    })
}

/// `X_{h,p}` with a per-window cache of certified projections.
#[derive(Debug)]
pub struct KernelSubshift {
    kernel: ConvolutionKernel,
    opts: WindowOptions,
    cache: Mutex<HashMap<WordSet, ProjectedDimension>>,
}

impl KernelSubshift {
    pub fn new(kernel: ConvolutionKernel, opts: WindowOptions) -> Self {
        KernelSubshift {
            kernel,
            opts,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn kernel(&self) -> &ConvolutionKernel {
        &self.kernel
    }

    pub fn projection(&self, w: &WordSet) -> Result<ProjectedDimension> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(w) {
            return Ok(hit.clone());
        }
        let r = projected_dimension(&self.kernel, w, self.opts)?;
        self.cache
            .lock()
            .expect("cache lock")
            .insert(w.clone(), r.clone());
        Ok(r)
    }

    /// Haar measure of the cylinder `{x : x|_w = pattern}`; the pattern lists
    /// `d_in` residues per word of `w` in word order.
    pub fn cylinder_measure(&self, w: &WordSet, pattern: &[u32]) -> Result<BigRational> {
        let proj = self.projection(w)?;
        if pattern.len() != w.len() * self.kernel.d_in() {
            return Err(Error::PatternMismatch(format!(
                "{} residues for {} coordinates",
                pattern.len(),
                w.len() * self.kernel.d_in()
            )));
        }
        if !proj.system.contains(pattern) {
            return Ok(BigRational::zero());
        }
        let denom = num_traits::pow(BigInt::from(self.kernel.modulus()), proj.dimension);
        Ok(BigRational::new(BigInt::one(), denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::ball;

    fn set(ws: &[&str]) -> WordSet {
        WordSet::parse(2, ws).unwrap()
    }

    fn two_term() -> ConvolutionKernel {
        ConvolutionKernel::scalar(2, 2, &[("e", 1), ("a", 1)]).unwrap()
    }

    #[test]
    fn two_term_constraints_on_unit_ball() {
        let sys = window_system(&two_term(), &ball(2, 1).unwrap()).unwrap();
        assert_eq!(sys.sites, vec![FreeWord::identity(2), FreeWord::parse("a", 2).unwrap()]);
        assert_eq!(sys.matrix.rows(), 2);
        let cols_e_a = sys.columns_of(&set(&["e", "A"])).unwrap();
        assert_eq!(sys.matrix.get(0, cols_e_a[0]), 1);
        assert_eq!(sys.matrix.get(0, cols_e_a[1]), 1);
        let none = window_system(&two_term(), &set(&["e"])).unwrap();
        assert_eq!(none.matrix.rows(), 0);
    }

    #[test]
    fn binary_difference_on_unit_ball_has_one_site() {
        let sys = window_system(&ConvolutionKernel::binary_difference(2).unwrap(), &ball(2, 1).unwrap()).unwrap();
        assert_eq!(sys.sites, vec![FreeWord::identity(2)]);
        assert_eq!(sys.matrix.rows(), 2);
    }

    #[test]
    fn projected_dimensions_of_two_term_kernel() {
        let k = two_term();
        let o = WindowOptions::default();
        let b1 = ball(2, 1).unwrap();
        let pd = projected_dimension(&k, &b1, o).unwrap();
        assert_eq!(pd.dimension, 3);
        assert_eq!(pd.certificate, WindowCertificate::ExtensionCertified);
        assert!(pd.stabilized);
        let b = FreeWord::parse("b", 2).unwrap();
        let w = b1.union(&b1.translate(&b));
        assert_eq!(w.len(), 8);
        assert_eq!(projected_dimension(&k, &w, o).unwrap().dimension, 4);
        assert_eq!(projected_dimension(&k, &set(&["e"]), o).unwrap().dimension, 1);
    }

    #[test]
    fn delta_kernel_is_trivial() {
        let k = ConvolutionKernel::scalar(3, 2, &[("ab", 2)]).unwrap();
        let pd = projected_dimension(&k, &ball(2, 2).unwrap(), WindowOptions::default()).unwrap();
        assert_eq!(pd.dimension, 0);
    }

    #[test]
    fn binary_difference_kernel_is_the_constants() {
        let k = ConvolutionKernel::binary_difference(2).unwrap();
        for n in 0..=2 {
            let pd = projected_dimension(&k, &ball(2, n).unwrap(), WindowOptions::default()).unwrap();
            assert_eq!(pd.dimension, 1, "n = {n}");
            assert_eq!(pd.certificate, WindowCertificate::Stabilized);
        }
    }

    #[test]
    fn cylinder_measures() {
        let x = KernelSubshift::new(two_term(), WindowOptions::default());
        assert_eq!(
            x.cylinder_measure(&set(&["e"]), &[0]).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        // coordinates e, a, A, b, B in word order; x(e) + x(A) = 1 violates the kernel
        let b1 = ball(2, 1).unwrap();
        assert!(x.cylinder_measure(&b1, &[1, 0, 0, 0, 0]).unwrap().is_zero());
        assert!(!x.cylinder_measure(&b1, &[0, 0, 0, 0, 0]).unwrap().is_zero());
        assert!(x.cylinder_measure(&b1, &[0]).is_err());
    }
}

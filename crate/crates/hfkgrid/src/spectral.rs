//! The spectral sequence of a bounded filtered complex over `F2`.
//!
//! Pages are built by literal subspace arithmetic from the defining
//! subobjects
//!
//! ```text
//! Z^r_{p,q} = F_p C_{p+q} ∩ d^{-1}(F_{p-r} C_{p+q-1})
//! B^r_{p,q} = F_p C_{p+q} ∩ d(F_{p+r} C_{p+q+1})
//! E^r_{p,q} = Z^r_{p,q} / (Z^{r-1}_{p-1,q+1} + B^{r-1}_{p,q})
//! ```
//!
//! with the page differential induced on canonical coset representatives.
//! Cells are indexed by `(p, m)` with `m = p + q` the homological grading.
//!
//! Alongside the page tower the module carries a filtration-adapted
//! decomposition of each degree block (a sorted column reduction), which
//! yields the `E^∞` dimension profile, `tau`, and the survival sets without
//! materializing pages; the two routes are checked against each other by
//! `e_infinity_check` and the test suite.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::FilteredComplexF2;
use crate::f2linalg::{preimage, quotient, F2Error, MatF2, QuotientSpace, Subspace, VecF2};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    F2(#[from] F2Error),
    #[error("induced page differential is ill-defined at page {page}, cell ({p}, {m}): internal invariant violated")]
    InducedMapIllDefined { page: usize, p: i64, m: i64 },
    #[error("Maslov-0 homology has dimension {dim}, tau extraction needs 1")]
    MaslovZeroHomology { dim: usize },
    #[error("complex is acyclic; tau is undefined")]
    AcyclicComplex,
    #[error("E^infinity dims from pages differ from total-homology subquotients at ({p}, {m}): {pages} vs {subquotient}")]
    EInfinityMismatch {
        p: i64,
        m: i64,
        pages: usize,
        subquotient: usize,
    },
    #[error("not a filtered chain map: {0}")]
    InvalidFilteredMap(String),
    #[error("morphism contract violated at page {page}, cell ({p}, {m}): {what}")]
    MorphismContract {
        page: usize,
        p: i64,
        m: i64,
        what: String,
    },
}

/// One cell `E^r_{p,q}` with its defining subspaces, in the coordinates of
/// the degree-`m` block of the complex.
#[derive(Clone)]
pub struct PageCell {
    pub z: Subspace,
    pub denom: Subspace,
    pub quotient: QuotientSpace,
}

/// One page of the spectral sequence.
#[derive(Clone)]
pub struct Page {
    pub r: usize,
    cells: BTreeMap<(i64, i64), PageCell>,
    diffs: BTreeMap<(i64, i64), MatF2>,
}

impl Page {
    pub fn cell(&self, p: i64, m: i64) -> Option<&PageCell> {
        self.cells.get(&(p, m))
    }

    pub fn dim(&self, p: i64, m: i64) -> usize {
        self.cells.get(&(p, m)).map_or(0, |c| c.quotient.dim())
    }

    /// Nonzero cell dimensions.
    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.cells
            .iter()
            .filter(|(_, c)| c.quotient.dim() > 0)
            .map(|(&k, c)| (k, c.quotient.dim()))
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.cells.values().map(|c| c.quotient.dim()).sum()
    }

    /// The differential leaving `(p, m)`, mapping to `(p - r, m - 1)`.
    pub fn diff(&self, p: i64, m: i64) -> Option<&MatF2> {
        self.diffs.get(&(p, m))
    }

    pub fn diffs_are_zero(&self) -> bool {
        self.diffs.values().all(MatF2::is_zero)
    }
}

/// The tower `E^0, E^1, ...` through stabilization.
pub struct SpectralPages {
    pages: Vec<Page>,
    stabilization_page: Option<usize>,
}

impl SpectralPages {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.get(r)
    }

    pub fn pages(&self) -> &[Page] {
        &self.pages
    }

    pub fn max_page(&self) -> usize {
        self.pages.len() - 1
    }

    /// Smallest `r >= 1` with `E^r = E^infinity`, when the tower was run to
    /// stabilization.
    pub fn stabilization_page(&self) -> Option<usize> {
        self.stabilization_page
    }

    /// The limit page; available when the tower stabilized.
    pub fn einf(&self) -> Option<&Page> {
        self.stabilization_page.map(|r| &self.pages[r])
    }
}

fn block_matrices(c: &FilteredComplexF2) -> BTreeMap<i64, MatF2> {
    c.degrees().map(|m| (m, c.block_matrix(m))).collect()
}

/// All pages of the spectral sequence by literal subspace arithmetic.
///
/// `r_max` caps the tower; the default runs through `p_max - p_min + 1`,
/// which is guaranteed past stabilization for a bounded filtration.
pub fn compute_pages(
    c: &FilteredComplexF2,
    r_max: Option<usize>,
) -> Result<SpectralPages, SpectralError> {
    let (p_min, p_max) = c.filtration_range();
    let width = (p_max - p_min).max(0) as usize;
    let target = r_max.unwrap_or(width + 1);
    let mats = block_matrices(c);
    let degrees: Vec<i64> = c.degrees().collect();

    let mut pages = Vec::with_capacity(target + 1);
    for r in 0..=target {
        let ri = r as i64;
        let keys: Vec<(i64, i64)> = degrees
            .iter()
            .flat_map(|&m| (p_min..=p_max).map(move |p| (p, m)))
            .collect();
        let cells: BTreeMap<(i64, i64), PageCell> = keys
            .par_iter()
            .map(|&(p, m)| {
                let cell = build_cell(c, &mats, p, m, ri)?;
                Ok(((p, m), cell))
            })
            .collect::<Result<_, SpectralError>>()?;

        let mut diffs = BTreeMap::new();
        for (&(p, m), cell) in &cells {
            if cell.quotient.dim() == 0 {
                continue;
            }
            let d = mats.get(&m).expect("degree block exists");
            let target_key = (p - ri, m - 1);
            let target_cell = cells.get(&target_key);
            let target_dim = target_cell.map_or(0, |t| t.quotient.dim());
            let mut mat = MatF2::zeros(target_dim, cell.quotient.dim());
            for (col, rep) in cell.quotient.reps().iter().enumerate() {
                let image = d.mul_vec(rep);
                match target_cell {
                    Some(t) => {
                        let coords = t
                            .quotient
                            .project(&image)
                            .map_err(|_| SpectralError::InducedMapIllDefined { page: r, p, m })?;
                        for row in coords.ones() {
                            mat.set(row, col, true);
                        }
                    }
                    None => {
                        // target lies outside the filtration range, so the
                        // image must already vanish
                        if !image.is_zero() {
                            return Err(SpectralError::InducedMapIllDefined { page: r, p, m });
                        }
                    }
                }
            }
            diffs.insert((p, m), mat);
        }
        pages.push(Page { r, cells, diffs });
    }

    let stabilization_page = if target > width {
        let final_dim = pages[target].total_dim();
        (1..=target).find(|&r| {
            pages[r].total_dim() == final_dim && pages[r..].iter().all(Page::diffs_are_zero)
        })
    } else {
        None
    };

    Ok(SpectralPages {
        pages,
        stabilization_page,
    })
}

fn build_cell(
    c: &FilteredComplexF2,
    mats: &BTreeMap<i64, MatF2>,
    p: i64,
    m: i64,
    r: i64,
) -> Result<PageCell, SpectralError> {
    let dim_m = c.block(m).len();
    let f_p = Subspace::prefix(dim_m, c.prefix_len(m, p));
    let f_p1 = Subspace::prefix(dim_m, c.prefix_len(m, p - 1));
    let d_out = mats.get(&m).expect("block matrix");

    // d^{-1}(F_{p-r} C_{m-1}) is shared by Z^r_{p} and Z^{r-1}_{p-1}
    let dim_m1 = c.block(m - 1).len();
    let f_target = Subspace::prefix(dim_m1, c.prefix_len(m - 1, p - r));
    let pre = preimage(d_out, &f_target)?;
    let z = f_p.intersect(&pre)?;
    let z_prev = f_p1.intersect(&pre)?;

    // B^{r-1}_{p,q} = F_p ∩ d(F_{p+r-1} C_{m+1})
    let b = match mats.get(&(m + 1)) {
        Some(d_in) => {
            let dim_m2 = c.block(m + 1).len();
            let f_src = Subspace::prefix(dim_m2, c.prefix_len(m + 1, p + r - 1));
            let w = f_src.intersect(&preimage(d_in, &f_p)?)?;
            Subspace::from_vectors(dim_m, w.basis().iter().map(|v| d_in.mul_vec(v)).collect())
        }
        None => Subspace::zero(dim_m),
    };
    let denom = z_prev.sum(&b)?;
    let q = quotient(&z, &denom)?;
    Ok(PageCell {
        z,
        denom,
        quotient: q,
    })
}

// ---------------------------------------------------------------------------
// Filtration-adapted block reduction (the fast route to E^infinity)
// ---------------------------------------------------------------------------

/// A pair of the adapted decomposition: a source generator `u` in degree `m`
/// whose boundary `v = d(u)` has top filtration level `tgt_level`.
pub(crate) struct PairData {
    pub src_level: i64,
    pub tgt_level: i64,
    pub src_combo: VecF2,
    pub tgt_vec: VecF2,
}

/// Filtration-adapted reduction of one degree block.
///
/// Columns of the block matrix (sorted by filtration level) are reduced left
/// to right with the pivot at the highest remaining row; the change of basis
/// is unitriangular and filtration-preserving, so the kernel combinations and
/// pair vectors read off the filtration profiles of `ker d` and `im d`.
pub(crate) struct BlockReduction {
    pub levels: Vec<i64>,
    pub kernel: Vec<(usize, VecF2)>,
    pub pairs: Vec<PairData>,
}

pub(crate) fn reduce_block(c: &FilteredComplexF2, m: i64) -> BlockReduction {
    let mat = c.block_matrix(m);
    let levels = c.block_levels(m);
    let tgt_levels = c.block_levels(m - 1);
    let n = mat.cols();
    let mut lows: BTreeMap<usize, usize> = BTreeMap::new(); // low row -> pair index
    let mut kernel = Vec::new();
    let mut pairs: Vec<PairData> = Vec::new();
    for (j, &src_level) in levels.iter().enumerate() {
        let mut col = mat.column(j);
        let mut combo = VecF2::unit(n, j);
        loop {
            match col.highest() {
                None => {
                    kernel.push((j, combo));
                    break;
                }
                Some(low) => {
                    if let Some(&pi) = lows.get(&low) {
                        col.xor_assign(&pairs[pi].tgt_vec);
                        combo.xor_assign(&pairs[pi].src_combo);
                    } else {
                        lows.insert(low, pairs.len());
                        pairs.push(PairData {
                            src_level,
                            tgt_level: tgt_levels[low],
                            src_combo: combo,
                            tgt_vec: col,
                        });
                        break;
                    }
                }
            }
        }
    }
    BlockReduction {
        levels,
        kernel,
        pairs,
    }
}

/// `E^infinity` cell dimensions from the adapted decomposition:
/// `dim E^inf_{p,m} = F_p(H_m) - F_{p-1}(H_m)` with
/// `F_p(H_m) = dim(ker ∩ F_p) - dim(im ∩ F_p)`.
pub fn einf_dims(c: &FilteredComplexF2) -> BTreeMap<(i64, i64), usize> {
    let degrees: Vec<i64> = c.degrees().collect();
    let reductions: BTreeMap<i64, BlockReduction> = degrees
        .par_iter()
        .map(|&m| (m, reduce_block(c, m)))
        .collect();
    let mut out = BTreeMap::new();
    for &m in &degrees {
        for (p, d) in einf_profile_at(c, m, &reductions) {
            if d > 0 {
                out.insert((p, m), d);
            }
        }
    }
    out
}

fn einf_profile_at(
    c: &FilteredComplexF2,
    m: i64,
    reductions: &BTreeMap<i64, BlockReduction>,
) -> BTreeMap<i64, usize> {
    let ker: Vec<i64> = reductions
        .get(&m)
        .map(|r| r.kernel.iter().map(|(pos, _)| r.levels[*pos]).collect())
        .unwrap_or_default();
    let im: Vec<i64> = reductions
        .get(&(m + 1))
        .map(|r| r.pairs.iter().map(|pair| pair.tgt_level).collect())
        .unwrap_or_default();
    let f = |p: i64| -> i64 {
        ker.iter().filter(|&&v| v <= p).count() as i64
            - im.iter().filter(|&&v| v <= p).count() as i64
    };
    let mut out = BTreeMap::new();
    let (p_min, p_max) = c.filtration_range();
    for p in p_min..=p_max {
        let d = f(p) - f(p - 1);
        debug_assert!(d >= 0);
        if d > 0 {
            out.insert(p, d as usize);
        }
    }
    out
}

/// `E^infinity` profile in one homological degree; needs only the two
/// adjacent block reductions, so it stays cheap on large complexes.
pub fn einf_dims_at(c: &FilteredComplexF2, m: i64) -> BTreeMap<i64, usize> {
    let mut reductions = BTreeMap::new();
    reductions.insert(m, reduce_block(c, m));
    reductions.insert(m + 1, reduce_block(c, m + 1));
    einf_profile_at(c, m, &reductions)
}

/// Page dimensions from the adapted decomposition, without building pages:
/// a pair with filtration gap `g` contributes to both its cells on pages
/// `1..=g`, survivors contribute everywhere.
pub fn page_dims_via_pairs(c: &FilteredComplexF2, r: usize) -> BTreeMap<(i64, i64), usize> {
    if r == 0 {
        return generator_dims(c);
    }
    let degrees: Vec<i64> = c.degrees().collect();
    let reductions: BTreeMap<i64, BlockReduction> = degrees
        .par_iter()
        .map(|&m| (m, reduce_block(c, m)))
        .collect();
    page_dims_from_reductions(c, &degrees, &reductions, r)
}

/// Every page's dimensions through stabilization, from one reduction pass.
pub fn page_dims_tower(c: &FilteredComplexF2) -> Vec<BTreeMap<(i64, i64), usize>> {
    let (p_min, p_max) = c.filtration_range();
    let width = (p_max - p_min).max(0) as usize;
    let degrees: Vec<i64> = c.degrees().collect();
    let reductions: BTreeMap<i64, BlockReduction> = degrees
        .par_iter()
        .map(|&m| (m, reduce_block(c, m)))
        .collect();
    let mut out = vec![generator_dims(c)];
    for r in 1..=width + 1 {
        out.push(page_dims_from_reductions(c, &degrees, &reductions, r));
    }
    out
}

fn generator_dims(c: &FilteredComplexF2) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for g in c.generators() {
        *out.entry((g.p, g.m)).or_insert(0) += 1;
    }
    out
}

fn page_dims_from_reductions(
    c: &FilteredComplexF2,
    degrees: &[i64],
    reductions: &BTreeMap<i64, BlockReduction>,
    r: usize,
) -> BTreeMap<(i64, i64), usize> {
    let mut out: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for &m in degrees {
        for (p, d) in einf_profile_at(c, m, reductions) {
            *out.entry((p, m)).or_insert(0) += d;
        }
        let red = &reductions[&m];
        for pair in &red.pairs {
            let gap = (pair.src_level - pair.tgt_level) as usize;
            if gap >= r {
                *out.entry((pair.src_level, m)).or_insert(0) += 1;
                *out.entry((pair.tgt_level, m - 1)).or_insert(0) += 1;
            }
        }
    }
    out.retain(|_, d| *d > 0);
    out
}

// ---------------------------------------------------------------------------
// tau
// ---------------------------------------------------------------------------

/// The filtration level of the surviving class in homological degree zero.
///
/// Requires `H_0(C)` to be one-dimensional (true for grid complexes, where
/// the total homology is the diluted homology of the three-sphere).
pub fn tau(c: &FilteredComplexF2) -> Result<i64, SpectralError> {
    let r0 = reduce_block(c, 0);
    let r1 = reduce_block(c, 1);
    let h0 = r0.kernel.len() - r1.pairs.len();
    if h0 != 1 {
        return Err(SpectralError::MaslovZeroHomology { dim: h0 });
    }
    let mut reductions = BTreeMap::new();
    reductions.insert(0, r0);
    reductions.insert(1, r1);
    let profile = einf_profile_at(c, 0, &reductions);
    debug_assert_eq!(profile.values().sum::<usize>(), 1);
    profile
        .into_iter()
        .next()
        .map(|(p, _)| p)
        .ok_or(SpectralError::MaslovZeroHomology { dim: 0 })
}

/// The raw minimum of the defining property: the smallest `p` such that
/// `H(F_p C) -> H(C)` is non-trivial, computed directly from kernels and
/// images. On a grid complex this equals `tau - (n - 1)` because the bottom
/// diluted class sits `n - 1` levels below the top one.
pub fn naive_tau(c: &FilteredComplexF2) -> Result<i64, SpectralError> {
    let degrees: Vec<i64> = c.degrees().collect();
    let data: Vec<(i64, Subspace, Subspace)> = degrees
        .par_iter()
        .map(|&m| {
            let k = c.block_matrix(m).kernel();
            let i = c.block_matrix(m + 1).image();
            (m, k, i)
        })
        .collect();
    if data.iter().all(|(_, k, i)| k.dim() == i.dim()) {
        return Err(SpectralError::AcyclicComplex);
    }
    let (p_min, p_max) = c.filtration_range();
    for p in p_min..=p_max {
        for (m, k, im) in &data {
            let f_p = Subspace::prefix(c.block(*m).len(), c.prefix_len(*m, p));
            let kf = k.intersect(&f_p).expect("same ambient");
            if kf.dim() > 0 {
                let imf = im.intersect(&f_p).expect("same ambient");
                if kf.dim() > imf.dim() {
                    return Ok(p);
                }
            }
        }
    }
    Err(SpectralError::AcyclicComplex)
}

// ---------------------------------------------------------------------------
// E^infinity identification check
// ---------------------------------------------------------------------------

pub struct EInfReport {
    pub pages_dims: BTreeMap<(i64, i64), usize>,
    pub subquotient_dims: BTreeMap<(i64, i64), usize>,
}

/// Verifies the canonical identification of the stabilized page with the
/// filtration subquotients of the total homology,
/// `F_p(H_m) / F_{p-1}(H_m)` with `F_p(H) = im(H(F_p C) -> H(C))`.
///
/// The subquotient side is computed from kernels and images by literal
/// subspace arithmetic, independent of the page tower.
pub fn e_infinity_check(c: &FilteredComplexF2) -> Result<EInfReport, SpectralError> {
    let pages = compute_pages(c, None)?;
    let einf = pages.einf().expect("default tower runs to stabilization");
    let pages_dims = einf.dims();

    let mut subquotient_dims = BTreeMap::new();
    let (p_min, p_max) = c.filtration_range();
    for m in c.degrees().collect::<Vec<_>>() {
        let k = c.block_matrix(m).kernel();
        let im = c.block_matrix(m + 1).image();
        let fdim = |p: i64| -> Result<i64, SpectralError> {
            if p < p_min {
                return Ok(0);
            }
            let f_p = Subspace::prefix(c.block(m).len(), c.prefix_len(m, p));
            let kf = k.intersect(&f_p)?.dim() as i64;
            let imf = im.intersect(&f_p)?.dim() as i64;
            Ok(kf - imf)
        };
        for p in p_min..=p_max {
            let d = fdim(p)? - fdim(p - 1)?;
            if d > 0 {
                subquotient_dims.insert((p, m), d as usize);
            }
        }
    }

    for key in pages_dims.keys().chain(subquotient_dims.keys()) {
        let a = pages_dims.get(key).copied().unwrap_or(0);
        let b = subquotient_dims.get(key).copied().unwrap_or(0);
        if a != b {
            return Err(SpectralError::EInfinityMismatch {
                p: key.0,
                m: key.1,
                pages: a,
                subquotient: b,
            });
        }
    }
    Ok(EInfReport {
        pages_dims,
        subquotient_dims,
    })
}

// ---------------------------------------------------------------------------
// Survival sets
// ---------------------------------------------------------------------------

/// RREF a list of (value, companion) pairs by the value part, mirroring the
/// subspace canonical form; companions follow the row operations.
fn echelon_with_companions(items: Vec<(VecF2, VecF2)>) -> Vec<(VecF2, VecF2)> {
    let mut rows: Vec<(VecF2, VecF2)> = Vec::new();
    for (mut v, mut comp) in items {
        while let Some(lead) = v.leading() {
            if let Some(pos) = rows.iter().position(|(r, _)| r.leading() == Some(lead)) {
                let (rv, rc) = rows[pos].clone();
                v.xor_assign(&rv);
                comp.xor_assign(&rc);
            } else {
                rows.push((v, comp));
                break;
            }
        }
    }
    rows.sort_by_key(|(v, _)| v.leading().unwrap());
    // clear pivots above
    for i in 0..rows.len() {
        let (pv, pc) = rows[i].clone();
        let lead = pv.leading().unwrap();
        for (j, (v, c)) in rows.iter_mut().enumerate() {
            if j != i && v.get(lead) {
                v.xor_assign(&pv);
                c.xor_assign(&pc);
            }
        }
    }
    rows
}

/// Per-cell survival data: the subspace of `E^1` classes representable by
/// global cycles, and where those classes land on the limit page.
pub struct SurvivalCell {
    pub alive: Subspace,
    pub to_infinity: MatF2,
}

/// Survival of `E^1` classes through the spectral sequence.
pub struct SurvivalData {
    pub cells: BTreeMap<(i64, i64), SurvivalCell>,
    pub e1_dims: BTreeMap<(i64, i64), usize>,
    pub einf_dims: BTreeMap<(i64, i64), usize>,
    /// The cell `(tau, 0)` carrying the distinguished degree-0 generator of
    /// the limit, when the total homology is non-trivial with 1-dimensional
    /// degree-0 part.
    pub distinguished: Option<(i64, i64)>,
}

/// The survival sets: `A` is the set of classes surviving every page (a
/// subspace over `F2`), split by the limit value at the distinguished cell
/// into the linear part `A0` and the affine coset `A1`.
pub struct ASets {
    /// Span of all surviving classes, in block coordinates over the nonzero
    /// `E^1` cells (ordered by `(p, m)`).
    pub a: Subspace,
    pub a0: Subspace,
    pub a1: Option<AffineCoset>,
    pub a1_prime: Option<AffineCoset>,
    /// False when the complex is acyclic: nothing survives "to" the limit,
    /// `A` degenerates to the zero subspace and `A1` is flagged empty.
    pub applicable: bool,
    pub e1_offsets: BTreeMap<(i64, i64), usize>,
    pub e1_total: usize,
}

#[derive(Clone)]
pub struct AffineCoset {
    pub base: VecF2,
    pub directions: Subspace,
}

pub fn survival(c: &FilteredComplexF2) -> Result<SurvivalData, SpectralError> {
    survival_impl(c, None)
}

/// Survival data restricted to one homological degree; needs only the block
/// reductions adjacent to `m` (plus degrees 0 and 1 for the distinguished
/// class), so it stays cheap on large complexes.
pub fn survival_degree(c: &FilteredComplexF2, m: i64) -> Result<SurvivalData, SpectralError> {
    survival_impl(c, Some(m))
}

fn survival_impl(
    c: &FilteredComplexF2,
    filter: Option<i64>,
) -> Result<SurvivalData, SpectralError> {
    let degrees: Vec<i64> = match filter {
        None => c.degrees().collect(),
        Some(m) => c.degrees().filter(|&d| d == m).collect(),
    };
    let needed: Vec<i64> = {
        let mut set = std::collections::BTreeSet::new();
        for &m in &degrees {
            set.insert(m);
            set.insert(m + 1);
        }
        set.insert(0);
        set.insert(1);
        set.into_iter()
            .filter(|d| c.degrees().any(|x| x == *d))
            .collect()
    };
    let reductions: BTreeMap<i64, BlockReduction> = needed
        .par_iter()
        .map(|&m| (m, reduce_block(c, m)))
        .collect();
    let einf: BTreeMap<(i64, i64), usize> = {
        let mut out = BTreeMap::new();
        for &m in &degrees {
            for (p, d) in einf_profile_at(c, m, &reductions) {
                out.insert((p, m), d);
            }
        }
        out
    };

    // degree-0 distinguished cell (blocks 0 and 1 are always reduced)
    let h0 = reductions.get(&0).map_or(0, |r| r.kernel.len()) as i64
        - reductions.get(&1).map_or(0, |r| r.pairs.len()) as i64;
    let distinguished = if h0 == 1 {
        einf_profile_at(c, 0, &reductions)
            .into_iter()
            .next()
            .map(|(p, _)| (p, 0))
    } else {
        None
    };

    let mut cells = BTreeMap::new();
    let mut e1_dims = BTreeMap::new();
    for &m in &degrees {
        let red = &reductions[&m];
        let dim_m = c.block(m).len();
        let levels = &red.levels;
        // E^1 cells of this degree, by literal page-1 arithmetic on
        // filtration-adapted bases:
        //   Z^1_p   = span{kernel combos ≤ p}
        //             + span{pair sources with src ≤ p, tgt ≤ p-1}
        //   denom_p = F_{p-1} + span{pair boundaries with src ≤ p}
        let in_pairs: Vec<&PairData> = reductions
            .get(&(m + 1))
            .map(|r| r.pairs.iter().collect())
            .unwrap_or_default();
        let p_levels: std::collections::BTreeSet<i64> = levels.iter().copied().collect();
        for &p in &p_levels {
            let mut znum: Vec<VecF2> = red
                .kernel
                .iter()
                .filter(|(pos, _)| levels[*pos] <= p)
                .map(|(_, combo)| combo.clone())
                .collect();
            znum.extend(
                red.pairs
                    .iter()
                    .filter(|pr| pr.src_level <= p && pr.tgt_level < p)
                    .map(|pr| pr.src_combo.clone()),
            );
            let z1 = Subspace::from_vectors(dim_m, znum);
            let mut den: Vec<VecF2> = (0..c.prefix_len(m, p - 1))
                .map(|i| VecF2::unit(dim_m, i))
                .collect();
            den.extend(
                in_pairs
                    .iter()
                    .filter(|pr| pr.src_level <= p)
                    .map(|pr| pr.tgt_vec.clone()),
            );
            let denom = Subspace::from_vectors(dim_m, den);
            let e1_cell = quotient(&z1, &denom.intersect(&z1)?)?;
            if e1_cell.dim() == 0 {
                continue;
            }
            e1_dims.insert((p, m), e1_cell.dim());

            // alive classes: projections of the global cycles in F_p
            let cycles: Vec<(VecF2, VecF2)> = red
                .kernel
                .iter()
                .filter(|(pos, _)| levels[*pos] <= p)
                .map(|(_, combo)| {
                    let class = e1_cell.project(combo).expect("cycles lie in Z^1");
                    (class, combo.clone())
                })
                .filter(|(class, _)| !class.is_zero())
                .collect();
            let alive_rows = echelon_with_companions(cycles);
            let alive = Subspace::from_vectors(
                e1_cell.dim(),
                alive_rows.iter().map(|(v, _)| v.clone()).collect(),
            );

            // E^infinity cell on the adapted bases:
            //   Z^inf_p = span{kernel ≤ p}, denom = Z^inf_{p-1} + B^inf_p
            let einf_dim = einf.get(&(p, m)).copied().unwrap_or(0);
            let to_infinity = if einf_dim == 0 {
                MatF2::zeros(0, alive.dim())
            } else {
                let zinf = Subspace::from_vectors(
                    dim_m,
                    red.kernel
                        .iter()
                        .filter(|(pos, _)| levels[*pos] <= p)
                        .map(|(_, combo)| combo.clone())
                        .collect(),
                );
                let mut den_inf: Vec<VecF2> = red
                    .kernel
                    .iter()
                    .filter(|(pos, _)| levels[*pos] < p)
                    .map(|(_, combo)| combo.clone())
                    .collect();
                den_inf.extend(
                    in_pairs
                        .iter()
                        .filter(|pr| pr.tgt_level <= p)
                        .map(|pr| pr.tgt_vec.clone()),
                );
                let einf_cell = quotient(&zinf, &Subspace::from_vectors(dim_m, den_inf))?;
                debug_assert_eq!(einf_cell.dim(), einf_dim);
                let mut mat = MatF2::zeros(einf_cell.dim(), alive_rows.len());
                for (col, (_, rep)) in alive_rows.iter().enumerate() {
                    let coords = einf_cell.project(rep).expect("cycle lies in Z^inf");
                    for row in coords.ones() {
                        mat.set(row, col, true);
                    }
                }
                mat
            };
            cells.insert((p, m), SurvivalCell { alive, to_infinity });
        }
    }

    Ok(SurvivalData {
        cells,
        e1_dims,
        einf_dims: einf,
        distinguished,
    })
}

/// The survival sets `A`, `A0`, `A1`, `A1'` of a filtered complex.
pub fn a_sets(c: &FilteredComplexF2) -> Result<ASets, SpectralError> {
    let data = survival(c)?;
    let acyclic = data.einf_dims.is_empty();

    // E^1 total coordinates
    let mut e1_offsets = BTreeMap::new();
    let mut e1_total = 0usize;
    for (&k, &d) in &data.e1_dims {
        e1_offsets.insert(k, e1_total);
        e1_total += d;
    }

    if acyclic {
        // Nothing survives "to" a trivial limit; A degenerates to zero and
        // A1 is flagged inapplicable.
        return Ok(ASets {
            a: Subspace::zero(e1_total),
            a0: Subspace::zero(e1_total),
            a1: None,
            a1_prime: None,
            applicable: false,
            e1_offsets,
            e1_total,
        });
    }

    // assemble alive in total coordinates, tracking the limit value at the
    // distinguished generator
    let dist = data.distinguished;
    let mut items: Vec<(VecF2, VecF2)> = Vec::new();
    for (&key, cell) in &data.cells {
        let off = e1_offsets[&key];
        for (j, b) in cell.alive.basis().iter().enumerate() {
            let mut total = VecF2::zeros(e1_total);
            for i in b.ones() {
                total.set(off + i, true);
            }
            let phi = dist
                .filter(|d| *d == key)
                .is_some_and(|_| cell.to_infinity.get(0, j));
            items.push((total, VecF2::from_indices(1, if phi { &[0] } else { &[] })));
        }
    }
    let a = Subspace::from_vectors(e1_total, items.iter().map(|(v, _)| v.clone()).collect());

    let Some(dist_key) = dist else {
        return Ok(ASets {
            a0: a.clone(),
            a,
            a1: None,
            a1_prime: None,
            applicable: false,
            e1_offsets,
            e1_total,
        });
    };

    let rows = echelon_with_companions(items);
    let mut a0_vecs = Vec::new();
    let mut witness: Option<VecF2> = None;
    for (v, phi) in &rows {
        if phi.get(0) {
            match &witness {
                None => witness = Some(v.clone()),
                Some(w) => a0_vecs.push(v.xor(w)),
            }
        } else {
            a0_vecs.push(v.clone());
        }
    }
    let a0 = Subspace::from_vectors(e1_total, a0_vecs);
    let a1 = witness.map(|base| AffineCoset {
        base,
        directions: a0.clone(),
    });

    // A1': solutions supported in the distinguished cell alone
    let a1_prime = {
        let cell = &data.cells[&dist_key];
        let off = e1_offsets[&dist_key];
        let cell_items: Vec<(VecF2, VecF2)> = cell
            .alive
            .basis()
            .iter()
            .enumerate()
            .map(|(j, b)| {
                (
                    b.clone(),
                    VecF2::from_indices(
                        1,
                        if cell.to_infinity.get(0, j) {
                            &[0]
                        } else {
                            &[]
                        },
                    ),
                )
            })
            .collect();
        let rows = echelon_with_companions(cell_items);
        let mut dirs = Vec::new();
        let mut base: Option<VecF2> = None;
        for (v, phi) in &rows {
            if phi.get(0) {
                match &base {
                    None => base = Some(v.clone()),
                    Some(w) => dirs.push(v.xor(w)),
                }
            } else {
                dirs.push(v.clone());
            }
        }
        let into_total = |v: &VecF2| {
            let mut t = VecF2::zeros(e1_total);
            for i in v.ones() {
                t.set(off + i, true);
            }
            t
        };
        base.map(|b| AffineCoset {
            base: into_total(&b),
            directions: Subspace::from_vectors(e1_total, dirs.iter().map(&into_total).collect()),
        })
    };

    Ok(ASets {
        a,
        a0,
        a1,
        a1_prime,
        applicable: true,
        e1_offsets,
        e1_total,
    })
}

// ---------------------------------------------------------------------------
// Morphisms of spectral sequences
// ---------------------------------------------------------------------------

/// A filtered chain map of homological degree zero.
pub struct FilteredMap {
    pub source: FilteredComplexF2,
    pub target: FilteredComplexF2,
    columns: Vec<Vec<u32>>,
}

impl FilteredMap {
    /// Validates the three morphism conditions: degree zero, commutation
    /// with the boundaries, and filtration preservation.
    pub fn new(
        source: FilteredComplexF2,
        target: FilteredComplexF2,
        columns: Vec<Vec<u32>>,
    ) -> Result<Self, SpectralError> {
        if columns.len() != source.dim() {
            return Err(SpectralError::InvalidFilteredMap(format!(
                "expected {} columns, got {}",
                source.dim(),
                columns.len()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            for &t in col {
                let t = t as usize;
                if t >= target.dim() {
                    return Err(SpectralError::InvalidFilteredMap(format!(
                        "column {j} references target generator {t} out of range"
                    )));
                }
                if target.generators()[t].m != source.generators()[j].m {
                    return Err(SpectralError::InvalidFilteredMap(format!(
                        "entry ({t}, {j}) is not of homological degree zero"
                    )));
                }
                if target.generators()[t].p > source.generators()[j].p {
                    return Err(SpectralError::InvalidFilteredMap(format!(
                        "entry ({t}, {j}) raises the filtration level"
                    )));
                }
            }
        }
        let map = Self {
            source,
            target,
            columns,
        };
        for j in 0..map.source.dim() {
            // f(d e_j) vs d(f e_j)
            let mut fd: Vec<u32> = Vec::new();
            for &k in map.source.boundary_column(j) {
                fd.extend_from_slice(&map.columns[k as usize]);
            }
            let mut df: Vec<u32> = Vec::new();
            for &t in &map.columns[j] {
                df.extend_from_slice(map.target.boundary_column(t as usize));
            }
            if parity_set(fd) != parity_set(df) {
                return Err(SpectralError::InvalidFilteredMap(format!(
                    "does not commute with the boundary at generator {j}"
                )));
            }
        }
        Ok(map)
    }

    /// The map on a degree block, in block coordinates.
    pub fn block_matrix(&self, m: i64) -> MatF2 {
        let src = self.source.block(m);
        let tgt = self.target.block(m);
        let tpos: std::collections::HashMap<usize, usize> =
            tgt.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut mat = MatF2::zeros(tgt.len(), src.len());
        for (col, &g) in src.iter().enumerate() {
            for &t in &self.columns[g] {
                let row = tpos[&(t as usize)];
                mat.set(row, col, !mat.get(row, col));
            }
        }
        mat
    }
}

fn parity_set(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

/// The morphism of spectral sequences induced by a filtered map, with the
/// morphism contract (commutation with the page differentials and the
/// homology recursion between consecutive pages) asserted page by page.
pub struct InducedMorphism {
    /// `f^r` per page and cell, in the page quotient coordinates.
    pub pages: Vec<BTreeMap<(i64, i64), MatF2>>,
    /// `f^infinity` on the stabilized pages.
    pub limit: BTreeMap<(i64, i64), MatF2>,
    /// `H(f)` on total homology, one matrix per degree.
    pub homology_map: BTreeMap<i64, MatF2>,
    pub source_pages: SpectralPages,
    pub target_pages: SpectralPages,
}

pub fn induced_morphism(f: &FilteredMap) -> Result<InducedMorphism, SpectralError> {
    let mut src_pages = compute_pages(&f.source, None)?;
    let mut tgt_pages = compute_pages(&f.target, None)?;
    let max_r = src_pages.max_page().max(tgt_pages.max_page());
    if src_pages.max_page() < max_r {
        src_pages = compute_pages(&f.source, Some(max_r))?;
        src_pages.stabilization_page = compute_pages(&f.source, None)?.stabilization_page;
    }
    if tgt_pages.max_page() < max_r {
        tgt_pages = compute_pages(&f.target, Some(max_r))?;
        tgt_pages.stabilization_page = compute_pages(&f.target, None)?.stabilization_page;
    }

    let fmats: BTreeMap<i64, MatF2> = f.source.degrees().map(|m| (m, f.block_matrix(m))).collect();
    let src_mats = block_matrices(&f.source);
    let tgt_mats = block_matrices(&f.target);

    let mut per_page: Vec<BTreeMap<(i64, i64), MatF2>> = Vec::new();
    for r in 0..=max_r {
        let sp = src_pages.page(r).unwrap();
        let tp = tgt_pages.page(r).unwrap();
        let mut maps = BTreeMap::new();
        for (&(p, m), cell) in &sp.cells {
            if cell.quotient.dim() == 0 {
                continue;
            }
            let Some(fm) = fmats.get(&m) else { continue };
            let tdim = tp.dim(p, m);
            let mut mat = MatF2::zeros(tdim, cell.quotient.dim());
            for (col, rep) in cell.quotient.reps().iter().enumerate() {
                let image = fm.mul_vec(rep);
                if let Some(tc) = tp.cell(p, m) {
                    if tc.quotient.dim() > 0 {
                        let coords = tc.quotient.project(&image).map_err(|_| {
                            SpectralError::MorphismContract {
                                page: r,
                                p,
                                m,
                                what: "image of a representative misses the target cell".into(),
                            }
                        })?;
                        for row in coords.ones() {
                            mat.set(row, col, true);
                        }
                    }
                }
            }
            maps.insert((p, m), mat);
        }
        per_page.push(maps);
    }

    verify_morphism_contract(&src_pages, &tgt_pages, &per_page, &tgt_mats, &fmats)?;

    let stab = src_pages
        .stabilization_page()
        .unwrap_or(max_r)
        .max(tgt_pages.stabilization_page().unwrap_or(max_r));
    let limit = per_page[stab.min(max_r)].clone();

    // H(f) by degree
    let mut homology_map = BTreeMap::new();
    for m in f.source.degrees().collect::<Vec<_>>() {
        let src_dim = f.source.block(m).len();
        let tgt_dim = f.target.block(m).len();
        let sk = src_mats
            .get(&m)
            .map_or(Subspace::zero(src_dim), MatF2::kernel);
        let si = src_mats
            .get(&(m + 1))
            .map_or(Subspace::zero(src_dim), MatF2::image);
        let sq = quotient(&sk, &si)?;
        let tk = tgt_mats
            .get(&m)
            .map_or(Subspace::zero(tgt_dim), MatF2::kernel);
        let ti = tgt_mats
            .get(&(m + 1))
            .map_or(Subspace::zero(tgt_dim), MatF2::image);
        let tq = quotient(&tk, &ti)?;
        let mut mat = MatF2::zeros(tq.dim(), sq.dim());
        if let Some(fm) = fmats.get(&m) {
            for (col, rep) in sq.reps().iter().enumerate() {
                let coords =
                    tq.project(&fm.mul_vec(rep))
                        .map_err(|_| SpectralError::MorphismContract {
                            page: 0,
                            p: 0,
                            m,
                            what: "H(f) image is not a cycle class".into(),
                        })?;
                for row in coords.ones() {
                    mat.set(row, col, true);
                }
            }
        }
        if sq.dim() > 0 || tq.dim() > 0 {
            homology_map.insert(m, mat);
        }
    }

    Ok(InducedMorphism {
        pages: per_page,
        limit,
        homology_map,
        source_pages: src_pages,
        target_pages: tgt_pages,
    })
}

fn verify_morphism_contract(
    src_pages: &SpectralPages,
    tgt_pages: &SpectralPages,
    per_page: &[BTreeMap<(i64, i64), MatF2>],
    tgt_mats: &BTreeMap<i64, MatF2>,
    fmats: &BTreeMap<i64, MatF2>,
) -> Result<(), SpectralError> {
    for r in 0..per_page.len() {
        let sp = src_pages.page(r).unwrap();
        let tp = tgt_pages.page(r).unwrap();
        let ri = r as i64;
        // f^r commutes with the page differentials
        for (&(p, m), fmap) in &per_page[r] {
            let tgt_key = (p - ri, m - 1);
            let sd = sp.diff(p, m);
            let td = tp.diff(p, m);
            let f_tgt = per_page[r].get(&tgt_key);
            let lhs = match (f_tgt, sd) {
                (Some(ft), Some(sd)) if ft.rows() > 0 => Some(ft.mul(sd)),
                _ => None,
            };
            let rhs = td.map(|td| td.mul(fmap));
            let bad = match (&lhs, &rhs) {
                (Some(a), Some(b)) => a != b,
                (Some(a), None) => !a.is_zero(),
                (None, Some(b)) => !b.is_zero(),
                (None, None) => false,
            };
            if bad {
                return Err(SpectralError::MorphismContract {
                    page: r,
                    p,
                    m,
                    what: "f^r does not commute with the page differential".into(),
                });
            }
        }

        // f^{r+1} = H(f^r): compare in page-r target coordinates modulo the
        // image of the incoming page-r differential
        if r + 1 >= per_page.len() {
            continue;
        }
        let sp_next = src_pages.page(r + 1).unwrap();
        let tp_next = tgt_pages.page(r + 1).unwrap();
        for (&(p, m), cell_next) in &sp_next.cells {
            if cell_next.quotient.dim() == 0 {
                continue;
            }
            let (Some(tc_r), Some(tc_next)) = (tp.cell(p, m), tp_next.cell(p, m)) else {
                continue;
            };
            if tc_r.quotient.dim() == 0 {
                continue;
            }
            let Some(fm) = fmats.get(&m) else { continue };
            let incoming: Subspace = match (tp.cell(p + ri, m + 1), tgt_mats.get(&(m + 1))) {
                (Some(icell), Some(d_in)) if icell.quotient.dim() > 0 => Subspace::from_vectors(
                    tc_r.quotient.dim(),
                    icell
                        .quotient
                        .reps()
                        .iter()
                        .map(|rep| {
                            tc_r.quotient
                                .project(&d_in.mul_vec(rep))
                                .unwrap_or_else(|_| VecF2::zeros(tc_r.quotient.dim()))
                        })
                        .collect(),
                ),
                _ => Subspace::zero(tc_r.quotient.dim()),
            };
            for rep in cell_next.quotient.reps() {
                let lhs = tc_r.quotient.project(&fm.mul_vec(rep)).map_err(|_| {
                    SpectralError::MorphismContract {
                        page: r,
                        p,
                        m,
                        what: "page r+1 representative not in target page r".into(),
                    }
                })?;
                let coords_next = cell_next
                    .quotient
                    .project(rep)
                    .expect("representative of its own cell");
                let rhs = match per_page[r + 1].get(&(p, m)) {
                    Some(f_next) if tc_next.quotient.dim() > 0 => {
                        let img_next = f_next.mul_vec(&coords_next);
                        let chain = tc_next.quotient.lift(&img_next);
                        tc_r.quotient.project(&chain).map_err(|_| {
                            SpectralError::MorphismContract {
                                page: r,
                                p,
                                m,
                                what: "page r+1 target representative not in page r".into(),
                            }
                        })?
                    }
                    _ => VecF2::zeros(tc_r.quotient.dim()),
                };
                if !incoming.contains(&lhs.xor(&rhs)) {
                    return Err(SpectralError::MorphismContract {
                        page: r + 1,
                        p,
                        m,
                        what: "f^{r+1} is not induced by f^r on homology".into(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the limit-page isomorphism criterion for filtered maps between
/// non-acyclic complexes with one-dimensional total homology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaVerdict {
    Holds,
    HypothesisFails {
        failing: Vec<&'static str>,
        conclusion_holds: bool,
    },
}

pub struct LemmaReview {
    pub total_homology_is_f2: bool,
    pub tau_source: Option<i64>,
    pub tau_target: Option<i64>,
    pub hf_iso: bool,
    pub f_infinity_iso: bool,
    pub verdict: LemmaVerdict,
}

/// Checks: if both complexes have total homology `F2`, equal tau, and `H(f)`
/// is an isomorphism, then `f^infinity` at filtration level tau is an
/// isomorphism. Reports which hypothesis fails otherwise.
pub fn lemma_review_check(f: &FilteredMap) -> Result<LemmaReview, SpectralError> {
    let morphism = induced_morphism(f)?;
    let src_h: usize = f.source.total_homology().values().sum();
    let tgt_h: usize = f.target.total_homology().values().sum();
    let total_homology_is_f2 = src_h == 1 && tgt_h == 1;
    let tau_source = naive_tau(&f.source).ok();
    let tau_target = naive_tau(&f.target).ok();
    let tau_equal = matches!((tau_source, tau_target), (Some(a), Some(b)) if a == b);
    let hf_iso = {
        let src_dims = f.source.total_homology();
        let tgt_dims = f.target.total_homology();
        src_dims == tgt_dims
            && morphism.homology_map.iter().all(|(m, mat)| {
                let d = src_dims.get(m).copied().unwrap_or(0);
                mat.rows() == d && mat.cols() == d && mat.rank() == d
            })
    };

    // conclusion: f^infinity at the source's tau level
    let f_infinity_iso = match tau_source {
        Some(t) => {
            let src_dim: usize = morphism
                .source_pages
                .einf()
                .map(|page| {
                    page.dims()
                        .iter()
                        .filter(|(&(p, _), _)| p == t)
                        .map(|(_, &d)| d)
                        .sum()
                })
                .unwrap_or(0);
            let tgt_dim: usize = morphism
                .target_pages
                .einf()
                .map(|page| {
                    page.dims()
                        .iter()
                        .filter(|(&(p, _), _)| p == t)
                        .map(|(_, &d)| d)
                        .sum()
                })
                .unwrap_or(0);
            let rank: usize = morphism
                .limit
                .iter()
                .filter(|(&(p, _), _)| p == t)
                .map(|(_, mat)| mat.rank())
                .sum();
            src_dim > 0 && src_dim == tgt_dim && rank == src_dim
        }
        None => false,
    };

    let mut failing = Vec::new();
    if !total_homology_is_f2 {
        failing.push("total homology is F2");
    }
    if !tau_equal {
        failing.push("tau");
    }
    if !hf_iso {
        failing.push("H(f) isomorphism");
    }
    let verdict = if failing.is_empty() {
        debug_assert!(
            f_infinity_iso,
            "lemma conclusion must hold when hypotheses do"
        );
        LemmaVerdict::Holds
    } else {
        LemmaVerdict::HypothesisFails {
            failing,
            conclusion_holds: f_infinity_iso,
        }
    };
    Ok(LemmaReview {
        total_homology_is_f2,
        tau_source,
        tau_target,
        hf_iso,
        f_infinity_iso,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;

    fn single(p: i64, m: i64) -> FilteredComplexF2 {
        FilteredComplexF2::from_parts(vec![Generator { p, m }], vec![vec![]]).unwrap()
    }

    /// x at filtration 1, y at filtration 0, dx = y.
    fn two_step() -> FilteredComplexF2 {
        FilteredComplexF2::from_parts(
            vec![Generator { p: 1, m: 1 }, Generator { p: 0, m: 0 }],
            vec![vec![1], vec![]],
        )
        .unwrap()
    }

    #[test]
    fn single_generator_pages() {
        let c = single(3, 0);
        let pages = compute_pages(&c, None).unwrap();
        assert_eq!(pages.stabilization_page(), Some(1));
        for r in 1..=pages.max_page() {
            assert_eq!(
                pages.page(r).unwrap().dims(),
                [((3, 0), 1)].into_iter().collect()
            );
        }
        assert_eq!(tau(&c).unwrap(), 3);
        assert_eq!(naive_tau(&c).unwrap(), 3);
    }

    #[test]
    fn two_step_cancels_on_page_two() {
        let c = two_step();
        let pages = compute_pages(&c, None).unwrap();
        let e1 = pages.page(1).unwrap();
        assert_eq!(e1.dims(), [((1, 1), 1), ((0, 0), 1)].into_iter().collect());
        let d1 = e1.diff(1, 1).unwrap();
        assert_eq!(d1.rank(), 1);
        let e2 = pages.page(2).unwrap();
        assert!(e2.dims().is_empty());
        assert_eq!(pages.stabilization_page(), Some(2));
        assert!(matches!(naive_tau(&c), Err(SpectralError::AcyclicComplex)));
    }

    #[test]
    fn pair_dims_agree_with_pages_on_toys() {
        for c in [single(0, 0), single(2, -1), two_step()] {
            let pages = compute_pages(&c, None).unwrap();
            for r in 0..=pages.max_page() {
                assert_eq!(
                    page_dims_via_pairs(&c, r),
                    pages.page(r).unwrap().dims(),
                    "page {r}"
                );
            }
        }
    }

    #[test]
    fn einf_check_toys() {
        for c in [single(1, 0), two_step()] {
            e_infinity_check(&c).unwrap();
        }
    }

    #[test]
    fn survival_zero_differential() {
        // two generators, no differential: everything survives, A = E^1
        let c = FilteredComplexF2::from_parts(
            vec![Generator { p: 2, m: 0 }, Generator { p: 0, m: -1 }],
            vec![vec![], vec![]],
        )
        .unwrap();
        let sets = a_sets(&c).unwrap();
        assert!(sets.applicable);
        assert_eq!(sets.a.dim(), 2);
        assert_eq!(sets.a0.dim(), 1);
        let a1 = sets.a1.unwrap();
        assert!(!a1.base.is_zero());
        assert_eq!(a1.directions.dim(), 1);
        assert!(sets.a1_prime.is_some());
    }

    #[test]
    fn survival_acyclic_toy_flags_a1() {
        let sets = a_sets(&two_step()).unwrap();
        assert!(!sets.applicable);
        assert!(sets.a.is_zero());
        assert!(sets.a1.is_none());
        assert!(sets.a1_prime.is_none());
    }

    #[test]
    fn filtration_shift_toy_morphism() {
        // C = F2 in filtration 1, Cbar = F2 in filtration 0, f the identity:
        // H(f) is an isomorphism but f^infinity vanishes
        let c = single(1, 0);
        let cbar = single(0, 0);
        let f = FilteredMap::new(c, cbar, vec![vec![0]]).unwrap();
        let m = induced_morphism(&f).unwrap();
        let hf = &m.homology_map[&0];
        assert_eq!(hf.rank(), 1);
        for mat in m.limit.values() {
            assert!(mat.is_zero());
        }
        let review = lemma_review_check(&f).unwrap();
        assert_eq!(review.tau_source, Some(1));
        assert_eq!(review.tau_target, Some(0));
        assert!(review.hf_iso);
        assert!(!review.f_infinity_iso);
        match review.verdict {
            LemmaVerdict::HypothesisFails {
                failing,
                conclusion_holds,
            } => {
                assert_eq!(failing, vec!["tau"]);
                assert!(!conclusion_holds);
            }
            other => panic!("expected hypothesis failure, got {other:?}"),
        }
    }

    #[test]
    fn identity_morphism_is_identity_on_pages() {
        let c = two_step();
        let cols: Vec<Vec<u32>> = (0..c.dim() as u32).map(|j| vec![j]).collect();
        let f = FilteredMap::new(c.clone(), c, cols).unwrap();
        let m = induced_morphism(&f).unwrap();
        for page in &m.pages {
            for mat in page.values() {
                assert_eq!(mat.rows(), mat.cols());
                assert_eq!(mat, &MatF2::identity(mat.rows()));
            }
        }
        let review = lemma_review_check(&f).unwrap();
        // hypotheses fail (acyclic), and that is the reported reason
        assert!(matches!(
            review.verdict,
            LemmaVerdict::HypothesisFails { .. }
        ));
    }

    #[test]
    fn filtered_map_validation() {
        let c = single(0, 0);
        let d = single(1, 0);
        // raises filtration: invalid
        assert!(FilteredMap::new(c.clone(), d.clone(), vec![vec![0]]).is_err());
        // drops filtration: fine
        assert!(FilteredMap::new(d, c, vec![vec![0]]).is_ok());
        // not a chain map: sends the cycle y to nothing while x maps across
        let two = two_step();
        let bad = FilteredMap::new(two.clone(), two.clone(), vec![vec![0], vec![]]);
        assert!(bad.is_err());
    }

    #[test]
    fn lemma_holds_for_identity_on_nonacyclic() {
        let c = single(2, 0);
        let f = FilteredMap::new(c.clone(), c, vec![vec![0]]).unwrap();
        let review = lemma_review_check(&f).unwrap();
        assert_eq!(review.verdict, LemmaVerdict::Holds);
        assert!(review.f_infinity_iso);
    }
}

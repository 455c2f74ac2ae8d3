//! The two chain complexes of a grid diagram.
//!
//! The fully blocked ("tilde") complex counts empty rectangles that avoid
//! every marking; it splits into finite blocks indexed by the bigrading
//! `(alexander, maslov)` and its homology is the `2^(n-1)`-diluted
//! `HFK-hat`. The filtered complex counts empty rectangles that avoid the
//! X markings only; the O-count of a rectangle is its Alexander filtration
//! drop, and the associated graded of the filtered complex is the tilde
//! complex matrix for matrix.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::f2linalg::MatF2;
use crate::grid::{GridDiagram, GridError};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("d^2 != 0 at generator {index}: internal invariant violated")]
    D2NotZero { index: usize },
    #[error("boundary entry ({row}, {col}) does not drop the homological grading by 1")]
    DegreeViolation { row: usize, col: usize },
    #[error("boundary entry ({row}, {col}) increases the filtration level")]
    FiltrationViolation { row: usize, col: usize },
    #[error("boundary column {col} references generator {row} out of range")]
    IndexOutOfRange { row: usize, col: usize },
}

/// The blocked bigraded complex: one block of generators per `(a, m)`, with
/// the differential mapping block `(a, m)` into block `(a, m-1)`.
#[derive(Clone)]
pub struct BigradedComplexF2 {
    n: usize,
    blocks: BTreeMap<(i64, i64), Vec<Vec<usize>>>,
    diffs: BTreeMap<(i64, i64), MatF2>,
}

impl BigradedComplexF2 {
    /// Blocked complex of empty rectangles avoiding all X and all O.
    pub fn build_tilde(grid: &GridDiagram, cap: usize) -> Result<Self, ComplexError> {
        grid.require_knot()?;
        let mut blocks: BTreeMap<(i64, i64), Vec<Vec<usize>>> = BTreeMap::new();
        for s in grid.states(cap)? {
            blocks
                .entry((s.alexander, s.maslov))
                .or_default()
                .push(s.perm);
        }
        let index: HashMap<&[usize], (i64, i64, usize)> = blocks
            .iter()
            .flat_map(|(&(a, m), states)| {
                states
                    .iter()
                    .enumerate()
                    .map(move |(i, s)| (s.as_slice(), (a, m, i)))
            })
            .collect();
        let mut diffs = BTreeMap::new();
        for (&(a, m), states) in &blocks {
            let target_dim = blocks.get(&(a, m - 1)).map_or(0, Vec::len);
            let mut mat = MatF2::zeros(target_dim, states.len());
            for (col, x) in states.iter().enumerate() {
                for (y, o_count) in grid.boundary_targets(x) {
                    if o_count != 0 {
                        continue;
                    }
                    let &(ta, tm, row) = index
                        .get(y.as_slice())
                        .expect("rectangle target is a valid state");
                    debug_assert_eq!((ta, tm), (a, m - 1));
                    // two empty rectangles to the same target cancel mod 2
                    mat.set(row, col, !mat.get(row, col));
                }
            }
            diffs.insert((a, m), mat);
        }
        let complex = Self {
            n: grid.n(),
            blocks,
            diffs,
        };
        complex.verify_d2()?;
        Ok(complex)
    }

    fn verify_d2(&self) -> Result<(), ComplexError> {
        let failures: Vec<usize> = self
            .diffs
            .par_iter()
            .filter_map(|(&(a, m), d)| {
                let next = self.diffs.get(&(a, m - 1))?;
                let composed = next.mul(d);
                (!composed.is_zero()).then_some(0usize)
            })
            .collect();
        match failures.first() {
            Some(&index) => Err(ComplexError::D2NotZero { index }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.blocks.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    pub fn block_states(&self, key: (i64, i64)) -> Option<&[Vec<usize>]> {
        self.blocks.get(&key).map(Vec::as_slice)
    }

    pub fn differential(&self, key: (i64, i64)) -> Option<&MatF2> {
        self.diffs.get(&key)
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.values().map(Vec::len).sum()
    }

    /// `dim ker - dim im` per block, computed blockwise in parallel.
    pub fn homology_dims(&self) -> BTreeMap<(i64, i64), usize> {
        let ranks: BTreeMap<(i64, i64), usize> =
            self.diffs.par_iter().map(|(&k, d)| (k, d.rank())).collect();
        let mut out = BTreeMap::new();
        for (&(a, m), states) in &self.blocks {
            let out_rank = ranks.get(&(a, m)).copied().unwrap_or(0);
            let in_rank = ranks.get(&(a, m + 1)).copied().unwrap_or(0);
            let dim = states.len() - out_rank - in_rank;
            if dim > 0 {
                out.insert((a, m), dim);
            }
        }
        out
    }

    /// `sum_x (-1)^M t^A`, which needs no homology at all.
    pub fn euler_polynomial(&self) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for (&(a, m), states) in &self.blocks {
            let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
            *out.entry(a).or_insert(0) += sign * states.len() as i64;
        }
        out.retain(|_, c| *c != 0);
        out
    }
}

/// A generator of a filtered complex: Alexander filtration level `p` and
/// homological (Maslov) grading `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub p: i64,
    pub m: i64,
}

/// A finite bounded filtered chain complex over `F2`.
///
/// Generators are stored in a fixed global order; the boundary is kept as
/// sparse columns over that order. Within each homological degree the
/// generators are additionally indexed sorted by `(p, global index)`, so the
/// filtration subspaces of a degree block are coordinate prefixes.
#[derive(Clone)]
pub struct FilteredComplexF2 {
    gens: Vec<Generator>,
    boundary: Vec<Vec<u32>>,
    m_blocks: BTreeMap<i64, Vec<usize>>,
    p_range: (i64, i64),
}

impl FilteredComplexF2 {
    /// Build from explicit generators and sparse boundary columns
    /// (`boundary[j]` lists the generators of `d e_j`). Validates the degree
    /// drop, the filtration condition, and `d^2 = 0`.
    pub fn from_parts(gens: Vec<Generator>, boundary: Vec<Vec<u32>>) -> Result<Self, ComplexError> {
        assert_eq!(
            gens.len(),
            boundary.len(),
            "one boundary column per generator"
        );
        for (col, targets) in boundary.iter().enumerate() {
            for &row in targets {
                let row = row as usize;
                if row >= gens.len() {
                    return Err(ComplexError::IndexOutOfRange { row, col });
                }
                if gens[row].m != gens[col].m - 1 {
                    return Err(ComplexError::DegreeViolation { row, col });
                }
                if gens[row].p > gens[col].p {
                    return Err(ComplexError::FiltrationViolation { row, col });
                }
            }
        }
        let mut boundary = boundary;
        for col in &mut boundary {
            col.sort_unstable();
            // repeated entries are zero mod 2
            let mut dedup = Vec::with_capacity(col.len());
            let mut i = 0;
            while i < col.len() {
                let mut j = i;
                while j < col.len() && col[j] == col[i] {
                    j += 1;
                }
                if (j - i) % 2 == 1 {
                    dedup.push(col[i]);
                }
                i = j;
            }
            *col = dedup;
        }
        let mut m_blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            m_blocks.entry(g.m).or_default().push(i);
        }
        for block in m_blocks.values_mut() {
            block.sort_by_key(|&i| (gens[i].p, i));
        }
        let p_min = gens.iter().map(|g| g.p).min().unwrap_or(0);
        let p_max = gens.iter().map(|g| g.p).max().unwrap_or(0);
        let complex = Self {
            gens,
            boundary,
            m_blocks,
            p_range: (p_min, p_max),
        };
        complex.verify_d2()?;
        Ok(complex)
    }

    /// The Alexander-filtered complex of a knot grid: empty rectangles
    /// avoiding X, with the O-count as the filtration drop.
    pub fn build_filtered(grid: &GridDiagram, cap: usize) -> Result<Self, ComplexError> {
        grid.require_knot()?;
        let states: Vec<_> = grid.states(cap)?.collect();
        let index: HashMap<&[usize], u32> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.perm.as_slice(), i as u32))
            .collect();
        let gens: Vec<Generator> = states
            .iter()
            .map(|s| Generator {
                p: s.alexander,
                m: s.maslov,
            })
            .collect();
        let boundary: Vec<Vec<u32>> = states
            .par_iter()
            .map(|x| {
                grid.boundary_targets(&x.perm)
                    .into_iter()
                    .map(|(y, _)| index[y.as_slice()])
                    .collect()
            })
            .collect();
        Self::from_parts(gens, boundary)
    }

    fn verify_d2(&self) -> Result<(), ComplexError> {
        let bad: Option<usize> = (0..self.dim()).into_par_iter().find_any(|&j| {
            let mut acc: Vec<u32> = Vec::new();
            for &mid in &self.boundary[j] {
                acc.extend_from_slice(&self.boundary[mid as usize]);
            }
            acc.sort_unstable();
            let mut odd = false;
            let mut i = 0;
            while i < acc.len() {
                let mut k = i;
                while k < acc.len() && acc[k] == acc[i] {
                    k += 1;
                }
                if (k - i) % 2 == 1 {
                    odd = true;
                    break;
                }
                i = k;
            }
            odd
        });
        match bad {
            Some(index) => Err(ComplexError::D2NotZero { index }),
            None => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn boundary_column(&self, j: usize) -> &[u32] {
        &self.boundary[j]
    }

    /// `(p_min, p_max)` over the generators; `F_{p_min - 1} = 0` and
    /// `F_{p_max} = C`.
    pub fn filtration_range(&self) -> (i64, i64) {
        self.p_range
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.m_blocks.keys().copied()
    }

    /// Generator indices of homological degree `m`, sorted by `(p, index)`.
    pub fn block(&self, m: i64) -> &[usize] {
        self.m_blocks.get(&m).map_or(&[], Vec::as_slice)
    }

    /// The boundary restricted to degree `m`, as a matrix from the degree-`m`
    /// block to the degree-`m-1` block (both in block order).
    pub fn block_matrix(&self, m: i64) -> MatF2 {
        let src = self.block(m);
        let tgt = self.block(m - 1);
        let tpos: HashMap<usize, usize> = tgt.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut mat = MatF2::zeros(tgt.len(), src.len());
        for (col, &g) in src.iter().enumerate() {
            for &row_gen in &self.boundary[g] {
                let row = tpos[&(row_gen as usize)];
                mat.set(row, col, !mat.get(row, col));
            }
        }
        mat
    }

    /// Number of degree-`m` block coordinates with filtration level `<= p`;
    /// the filtration subspace of the block is the prefix of that length.
    pub fn prefix_len(&self, m: i64, p: i64) -> usize {
        self.block(m)
            .iter()
            .take_while(|&&g| self.gens[g].p <= p)
            .count()
    }

    /// Filtration levels of the degree-`m` block, in block order.
    pub fn block_levels(&self, m: i64) -> Vec<i64> {
        self.block(m).iter().map(|&g| self.gens[g].p).collect()
    }

    /// Dimensions of the total homology `H_m(C)`, by degree.
    pub fn total_homology(&self) -> BTreeMap<i64, usize> {
        let degrees: Vec<i64> = self.degrees().collect();
        let ranks: HashMap<i64, usize> = degrees
            .par_iter()
            .map(|&m| (m, self.block_matrix(m).rank()))
            .collect();
        let mut out = BTreeMap::new();
        for &m in &degrees {
            let dim = self.block(m).len()
                - ranks.get(&m).copied().unwrap_or(0)
                - ranks.get(&(m + 1)).copied().unwrap_or(0);
            if dim > 0 {
                out.insert(m, dim);
            }
        }
        out
    }

    /// The filtration-preserving part of the boundary, blocked by `(p, m)` —
    /// the associated graded complex. Matrices are indexed like the tilde
    /// complex of the same grid: lexicographically within each block.
    pub fn associated_graded(&self) -> BTreeMap<(i64, i64), MatF2> {
        let mut out = BTreeMap::new();
        for (&m, block) in &self.m_blocks {
            let levels: Vec<i64> = block.iter().map(|&g| self.gens[g].p).collect();
            let tgt = self.block(m - 1);
            for &p in levels.iter().collect::<std::collections::BTreeSet<_>>() {
                let src_idx: Vec<usize> = block
                    .iter()
                    .copied()
                    .filter(|&g| self.gens[g].p == p)
                    .collect();
                let tgt_idx: Vec<usize> = tgt
                    .iter()
                    .copied()
                    .filter(|&g| self.gens[g].p == p)
                    .collect();
                let tpos: HashMap<usize, usize> =
                    tgt_idx.iter().enumerate().map(|(i, &g)| (g, i)).collect();
                let mut mat = MatF2::zeros(tgt_idx.len(), src_idx.len());
                for (col, &g) in src_idx.iter().enumerate() {
                    for &row_gen in &self.boundary[g] {
                        if let Some(&row) = tpos.get(&(row_gen as usize)) {
                            mat.set(row, col, !mat.get(row, col));
                        }
                    }
                }
                out.insert((p, m), mat);
            }
        }
        out
    }
}

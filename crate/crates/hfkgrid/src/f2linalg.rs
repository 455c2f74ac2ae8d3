//! Bit-packed linear algebra over the two-element field.
//!
//! Everything downstream — chain complexes, spectral sequence pages, survival
//! sets — reduces to rank, kernel, image, sum, intersection, preimage and
//! quotient computations on subspaces of `F2^n`. Vectors are packed 64 bits
//! per word; subspaces are kept in reduced row echelon form so that equality
//! of subspaces is bitwise equality of bases.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here can be shared freely across threads.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum F2Error {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("matrix/vector dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspace is not contained in the claimed superspace")]
    NotContained,
    #[error("vector does not lie in the subspace")]
    NotInSpace,
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A vector in `F2^dim`, packed 64 bits per word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VecF2 {
    dim: usize,
    words: Vec<u64>,
}

impl VecF2 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            words: vec![0; words_for(dim)],
        }
    }

    /// Standard basis vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.set(i, true);
        v
    }

    pub fn from_indices(dim: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(dim);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    /// Parse from a string of `0`/`1` characters, index 0 first.
    pub fn from_bits(bits: &str) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, c) in bits.chars().enumerate() {
            v.set(i, c == '1');
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.dim,
            "bit index {i} out of range (dim {})",
            self.dim
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.dim,
            "bit index {i} out of range (dim {})",
            self.dim
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.dim,
            "bit index {i} out of range (dim {})",
            self.dim
        );
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Addition in `F2^dim`.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.dim, other.dim, "xor_assign dimension mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Index of the lowest set bit.
    pub fn leading(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                let i = wi * WORD_BITS + w.trailing_zeros() as usize;
                return (i < self.dim).then_some(i);
            }
        }
        None
    }

    /// Index of the highest set bit.
    pub fn highest(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD_BITS + (WORD_BITS - 1 - w.leading_zeros() as usize));
            }
        }
        None
    }

    /// The contiguous coordinate window `[start, start + len)` as a vector.
    pub fn segment(&self, start: usize, len: usize) -> VecF2 {
        let mut out = VecF2::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&i| self.get(i))
    }

    /// `<self, other>` mod 2.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.dim, other.dim, "dot dimension mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }
}

impl fmt::Debug for VecF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VecF2({}; {:?})",
            self.dim,
            self.ones().collect::<Vec<_>>()
        )
    }
}

/// A matrix over `F2` with packed rows, representing a linear map
/// `F2^cols -> F2^rows`.
#[derive(Clone, PartialEq, Eq)]
pub struct MatF2 {
    rows: usize,
    cols: usize,
    data: Vec<VecF2>,
}

impl MatF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![VecF2::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<VecF2>) -> Self {
        for r in &rows {
            assert_eq!(r.dim(), cols, "row length mismatch");
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Parse from rows of `0`/`1` strings.
    pub fn from_bit_rows(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| VecF2::from_bits(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &VecF2 {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> VecF2 {
        let mut v = VecF2::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    /// `m * v`.
    pub fn mul_vec(&self, v: &VecF2) -> VecF2 {
        assert_eq!(v.dim(), self.cols, "mul_vec dimension mismatch");
        let mut out = VecF2::zeros(self.rows);
        for r in 0..self.rows {
            if self.data[r].dot(v) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &MatF2) -> MatF2 {
        assert_eq!(self.cols, other.rows, "mul dimension mismatch");
        let mut out = MatF2::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.data[r].ones().collect::<Vec<_>>() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn transpose(&self) -> MatF2 {
        let mut out = MatF2::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].ones().collect::<Vec<_>>() {
                out.set(c, r, true);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    /// Dimension of the column space.
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        rref_in_place(&mut rows).len()
    }

    /// Basis of `{v : m v = 0}`; its dimension is `cols - rank`.
    pub fn kernel(&self) -> Subspace {
        // Row-reduce and read the free columns off the echelon form.
        let mut rows = self.data.clone();
        let pivots = rref_in_place(&mut rows);
        let pivot_set: Vec<Option<usize>> = {
            let mut ps = vec![None; self.cols];
            for (ri, &p) in pivots.iter().enumerate() {
                ps[p] = Some(ri);
            }
            ps
        };
        let mut basis = Vec::new();
        for (free, pivot) in pivot_set.iter().enumerate() {
            if pivot.is_some() {
                continue;
            }
            let mut v = VecF2::unit(self.cols, free);
            for (ri, &p) in pivots.iter().enumerate() {
                if rows[ri].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        Subspace::from_vectors(self.cols, basis)
    }

    /// Echelon basis of the column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_vectors(self.rows, (0..self.cols).map(|c| self.column(c)).collect())
    }
}

impl fmt::Debug for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatF2({}x{}):", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// In-place reduced row echelon form; returns the pivot column of each
/// surviving row, strictly increasing. Zero rows are dropped.
fn rref_in_place(rows: &mut Vec<VecF2>) -> Vec<usize> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut done = 0;
    let total = rows.len();
    let cols = rows.first().map_or(0, |r| r.dim());
    for col in 0..cols {
        let Some(pr) = (done..total).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(done, pr);
        let pivot_row = rows[done].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != done && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        done += 1;
        if done == total {
            break;
        }
    }
    rows.truncate(done);
    // sort rows by pivot so the basis is canonical
    let mut order: Vec<usize> = (0..done).collect();
    order.sort_by_key(|&i| rows[i].leading().unwrap());
    let sorted: Vec<VecF2> = order.iter().map(|&i| rows[i].clone()).collect();
    *rows = sorted;
    pivots.sort_unstable();
    pivots
}

/// A subspace of `F2^ambient` in reduced row echelon form.
///
/// The basis rows have strictly increasing pivot columns and every pivot
/// column is cleared in the other rows, so two `Subspace` values are equal
/// as subspaces if and only if they are equal as data.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<VecF2>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|i| VecF2::unit(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn from_vectors(ambient: usize, vectors: Vec<VecF2>) -> Self {
        for v in &vectors {
            assert_eq!(v.dim(), ambient, "vector/ambient dimension mismatch");
        }
        let mut rows = vectors;
        let pivots = rref_in_place(&mut rows);
        Self {
            ambient,
            basis: rows,
            pivots,
        }
    }

    /// The coordinate subspace spanned by the first `len` basis vectors.
    pub fn prefix(ambient: usize, len: usize) -> Self {
        assert!(len <= ambient, "prefix length exceeds ambient dimension");
        Self {
            ambient,
            basis: (0..len).map(|i| VecF2::unit(ambient, i)).collect(),
            pivots: (0..len).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[VecF2] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residue of `v` after eliminating all pivot coordinates; zero iff
    /// `v` lies in the subspace.
    pub fn reduce(&self, v: &VecF2) -> VecF2 {
        assert_eq!(v.dim(), self.ambient, "reduce dimension mismatch");
        let mut out = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &VecF2) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// `self + other`, echelonized.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, F2Error> {
        if self.ambient != other.ambient {
            return Err(F2Error::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Ok(Subspace::from_vectors(self.ambient, vs))
    }

    /// `self ∩ other`, via the kernel of the stacked coefficient system: a
    /// vector in the intersection is a combination of basis vectors of both
    /// sides simultaneously.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, F2Error> {
        if self.ambient != other.ambient {
            return Err(F2Error::AmbientMismatch(self.ambient, other.ambient));
        }
        let da = self.dim();
        let db = other.dim();
        if da == 0 || db == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        // columns: coefficients (s, t); solve A^T s + B^T t = 0
        let mut stacked = MatF2::zeros(self.ambient, da + db);
        for (j, v) in self.basis.iter().enumerate() {
            for i in v.ones() {
                stacked.set(i, j, true);
            }
        }
        for (j, v) in other.basis.iter().enumerate() {
            for i in v.ones() {
                stacked.set(i, da + j, true);
            }
        }
        let ker = stacked.kernel();
        let mut vs = Vec::with_capacity(ker.dim());
        for combo in ker.basis() {
            let mut v = VecF2::zeros(self.ambient);
            for j in combo.ones() {
                if j < da {
                    v.xor_assign(&self.basis[j]);
                }
            }
            vs.push(v);
        }
        Ok(Subspace::from_vectors(self.ambient, vs))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of F2^{})", self.dim(), self.ambient)
    }
}

/// `{v : m v ∈ w}`, via the kernel of the augmented system `[m | basis(w)]`.
pub fn preimage(m: &MatF2, w: &Subspace) -> Result<Subspace, F2Error> {
    if w.ambient_dim() != m.rows() {
        return Err(F2Error::DimensionMismatch {
            expected: m.rows(),
            got: w.ambient_dim(),
        });
    }
    let k = w.dim();
    let mut aug = MatF2::zeros(m.rows(), m.cols() + k);
    for r in 0..m.rows() {
        for c in m.row(r).ones().collect::<Vec<_>>() {
            aug.set(r, c, true);
        }
    }
    for (j, v) in w.basis().iter().enumerate() {
        for i in v.ones() {
            aug.set(i, m.cols() + j, true);
        }
    }
    let ker = aug.kernel();
    let mut vs = Vec::with_capacity(ker.dim());
    for combo in ker.basis() {
        let mut v = VecF2::zeros(m.cols());
        for j in combo.ones() {
            if j < m.cols() {
                v.set(j, true);
            }
        }
        vs.push(v);
    }
    Ok(Subspace::from_vectors(m.cols(), vs))
}

/// The quotient `v / w` together with its projection.
///
/// Representatives are the echelon basis of a complement of `w` inside `v`,
/// so the choice is canonical and runs are bit-reproducible.
#[derive(Clone)]
pub struct QuotientSpace {
    ambient: usize,
    denom: Subspace,
    reps: Vec<VecF2>,
    rep_pivots: Vec<usize>,
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Chain-level representatives of the quotient basis.
    pub fn reps(&self) -> &[VecF2] {
        &self.reps
    }

    pub fn denominator(&self) -> &Subspace {
        &self.denom
    }

    /// Quotient coordinates of an ambient vector lying in `v`.
    pub fn project(&self, u: &VecF2) -> Result<VecF2, F2Error> {
        if u.dim() != self.ambient {
            return Err(F2Error::DimensionMismatch {
                expected: self.ambient,
                got: u.dim(),
            });
        }
        let mut residue = self.denom.reduce(u);
        let mut coords = VecF2::zeros(self.reps.len());
        for (j, (rep, &p)) in self.reps.iter().zip(&self.rep_pivots).enumerate() {
            if residue.get(p) {
                coords.set(j, true);
                residue.xor_assign(rep);
            }
        }
        if residue.is_zero() {
            Ok(coords)
        } else {
            Err(F2Error::NotInSpace)
        }
    }

    /// The chain-level representative of a coordinate vector.
    pub fn lift(&self, coords: &VecF2) -> VecF2 {
        assert_eq!(coords.dim(), self.reps.len(), "lift dimension mismatch");
        let mut out = VecF2::zeros(self.ambient);
        for j in coords.ones() {
            out.xor_assign(&self.reps[j]);
        }
        out
    }
}

impl fmt::Debug for QuotientSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QuotientSpace(dim {} of F2^{})",
            self.dim(),
            self.ambient
        )
    }
}

/// `v / w`, checking `w ⊆ v`.
pub fn quotient(v: &Subspace, w: &Subspace) -> Result<QuotientSpace, F2Error> {
    if v.ambient_dim() != w.ambient_dim() {
        return Err(F2Error::AmbientMismatch(v.ambient_dim(), w.ambient_dim()));
    }
    if !v.contains_subspace(w) {
        return Err(F2Error::NotContained);
    }
    // Reduce v's basis mod w; the nonzero residues echelonize to coset reps.
    let residues: Vec<VecF2> = v
        .basis()
        .iter()
        .map(|b| w.reduce(b))
        .filter(|r| !r.is_zero())
        .collect();
    let complement = Subspace::from_vectors(v.ambient_dim(), residues);
    let reps = complement.basis().to_vec();
    let rep_pivots = complement.pivots().to_vec();
    Ok(QuotientSpace {
        ambient: v.ambient_dim(),
        denom: w.clone(),
        reps,
        rep_pivots,
    })
}

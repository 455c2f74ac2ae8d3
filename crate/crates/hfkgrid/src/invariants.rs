//! Knot invariants extracted from the homology of a grid.
//!
//! The tilde homology is the `2^(n-1)`-fold dilution of `HFK-hat`: tensoring
//! with `n-1` copies of a two-dimensional factor with bigrading shifts
//! `(0,0)` and `(-1,-1)`. Deconvolution divides that factor back out; the
//! genus is the top nonzero Alexander grading of the result, fibredness is
//! detected by a one-dimensional top group, the graded Euler characteristic
//! is the symmetrized Alexander polynomial, and `tau` comes from the limit
//! page of the filtered complex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{BigradedComplexF2, ComplexError, FilteredComplexF2};
use crate::grid::{GridDiagram, GridError};
use crate::spectral::{self, SpectralError};

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("deconvolution failed: {0} (corrupted complex or link input)")]
    DeconvolutionFailed(String),
    #[error("empty homology table")]
    EmptyTable,
    #[error("Alexander polynomial normalization failed: Delta(1) = {0}")]
    NormalizationFailed(i64),
    #[error("Alexander polynomial is not palindromic at power {0}")]
    NotPalindromic(i64),
    #[error("Euler-characteristic oracle disagrees with the homology polynomial")]
    EulerMismatch,
    #[error("tau = {tau} falls outside [-genus, genus] = [-{genus}, {genus}]")]
    TauOutOfRange { tau: i64, genus: usize },
}

/// One entry of the `HFK-hat` table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HfkEntry {
    pub a: i64,
    pub m: i64,
    pub dim: usize,
}

/// The symmetrized Alexander polynomial as `(power, coefficient)` pairs,
/// sorted by descending power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlexanderPoly(pub Vec<(i64, i64)>);

impl AlexanderPoly {
    pub fn coefficient(&self, power: i64) -> i64 {
        self.0
            .iter()
            .find(|(p, _)| *p == power)
            .map_or(0, |(_, c)| *c)
    }

    pub fn eval_at_one(&self) -> i64 {
        self.0.iter().map(|(_, c)| c).sum()
    }
}

impl std::fmt::Display for AlexanderPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, &(p, c)) in self.0.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (p, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "t")?,
                (1, m) => write!(f, "{m}t")?,
                (p, 1) => write!(f, "t^{p}")?,
                (p, m) => write!(f, "{m}t^{p}")?,
            }
        }
        Ok(())
    }
}

/// Everything the pipeline extracts from one knot grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotInvariantSet {
    pub schema_version: u32,
    pub name: String,
    pub grid_hash: String,
    pub n: usize,
    pub hfk: Vec<HfkEntry>,
    pub tau: i64,
    pub genus: usize,
    pub fibred: bool,
    pub alexander: AlexanderPoly,
    /// Tensor exponent of the dilution factor divided out of the raw tilde
    /// homology (`n - 1`).
    pub dilution_n: usize,
}

pub const SCHEMA_VERSION: u32 = 1;

impl KnotInvariantSet {
    pub fn hfk_map(&self) -> BTreeMap<(i64, i64), usize> {
        self.hfk.iter().map(|e| ((e.a, e.m), e.dim)).collect()
    }

    pub fn total_hfk_dim(&self) -> usize {
        self.hfk.iter().map(|e| e.dim).sum()
    }

    pub fn hfk_dim_at_alexander(&self, a: i64) -> usize {
        self.hfk.iter().filter(|e| e.a == a).map(|e| e.dim).sum()
    }

    /// The built-in unknot table: a single class at bigrading `(0, 0)`.
    pub fn unknot() -> Self {
        KnotInvariantSet {
            schema_version: SCHEMA_VERSION,
            name: "unknot".to_string(),
            grid_hash: String::new(),
            n: 0,
            hfk: vec![HfkEntry { a: 0, m: 0, dim: 1 }],
            tau: 0,
            genus: 0,
            fibred: true,
            alexander: AlexanderPoly(vec![(0, 1)]),
            dilution_n: 0,
        }
    }
}

/// Divides the dilution factor out of the tilde homology: `n - 1` exact
/// divisions by `(1 + u)` where `u` shifts the bigrading by `(-1, -1)`,
/// solved from the top Alexander grading downward.
pub fn deconvolve(
    tilde_dims: &BTreeMap<(i64, i64), usize>,
    n: usize,
) -> Result<BTreeMap<(i64, i64), usize>, InvariantError> {
    let mut cur: BTreeMap<(i64, i64), i64> =
        tilde_dims.iter().map(|(&k, &v)| (k, v as i64)).collect();
    for _ in 0..n.saturating_sub(1) {
        let mut quo: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        let keys: std::collections::BTreeSet<(i64, i64)> = cur
            .keys()
            .copied()
            .chain(cur.keys().map(|&(a, m)| (a + 1, m + 1)))
            .collect();
        for &(a, m) in keys.iter().rev() {
            let v = cur.get(&(a, m)).copied().unwrap_or(0)
                - quo.get(&(a + 1, m + 1)).copied().unwrap_or(0);
            if v < 0 {
                return Err(InvariantError::DeconvolutionFailed(format!(
                    "negative coefficient {v} at ({a}, {m})"
                )));
            }
            if v != 0 {
                quo.insert((a, m), v);
            }
        }
        // exactness: quo * (1 + u) must reproduce cur
        let mut back: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for (&(a, m), &v) in &quo {
            *back.entry((a, m)).or_insert(0) += v;
            *back.entry((a - 1, m - 1)).or_insert(0) += v;
        }
        back.retain(|_, v| *v != 0);
        if back != cur {
            return Err(InvariantError::DeconvolutionFailed(
                "nonzero remainder".to_string(),
            ));
        }
        cur = quo;
    }
    Ok(cur.into_iter().map(|(k, v)| (k, v as usize)).collect())
}

/// The top nonzero Alexander grading.
pub fn genus(hfk: &BTreeMap<(i64, i64), usize>) -> Result<usize, InvariantError> {
    let top = hfk
        .keys()
        .map(|&(a, _)| a)
        .max()
        .ok_or(InvariantError::EmptyTable)?;
    debug_assert!(top >= 0, "symmetrized table has nonnegative top grading");
    Ok(top.max(0) as usize)
}

/// A knot is fibred exactly when the top Alexander group is one-dimensional.
pub fn is_fibred(hfk: &BTreeMap<(i64, i64), usize>) -> Result<bool, InvariantError> {
    let g = genus(hfk)? as i64;
    Ok(hfk
        .iter()
        .filter(|(&(a, _), _)| a == g)
        .map(|(_, &d)| d)
        .sum::<usize>()
        == 1)
}

/// Graded Euler characteristic of the table, with normalization and
/// palindromicity enforced.
pub fn alexander_poly(hfk: &BTreeMap<(i64, i64), usize>) -> Result<AlexanderPoly, InvariantError> {
    let mut coeffs: BTreeMap<i64, i64> = BTreeMap::new();
    for (&(a, m), &d) in hfk {
        let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        *coeffs.entry(a).or_insert(0) += sign * d as i64;
    }
    coeffs.retain(|_, c| *c != 0);
    let poly = AlexanderPoly(coeffs.iter().rev().map(|(&p, &c)| (p, c)).collect());
    let at_one = poly.eval_at_one();
    if at_one.abs() != 1 {
        return Err(InvariantError::NormalizationFailed(at_one));
    }
    for &(p, c) in &poly.0 {
        if poly.coefficient(-p) != c {
            return Err(InvariantError::NotPalindromic(p));
        }
    }
    Ok(poly)
}

/// The Alexander polynomial straight from the state sum: the generator-level
/// Euler characteristic equals `Delta(t) * (1 - t^{-1})^{n-1}`, so `n - 1`
/// exact divisions recover `Delta` without computing any homology.
pub fn euler_oracle(grid: &GridDiagram, cap: usize) -> Result<AlexanderPoly, InvariantError> {
    grid.require_knot()?;
    let mut sum: BTreeMap<i64, i64> = BTreeMap::new();
    for s in grid.states(cap)? {
        let sign = if s.maslov.rem_euclid(2) == 0 { 1 } else { -1 };
        *sum.entry(s.alexander).or_insert(0) += sign;
    }
    sum.retain(|_, c| *c != 0);
    for _ in 0..grid.n() - 1 {
        // divide by (1 - t^{-1}): q(a) = cur(a) + q(a+1), swept top down over
        // the full power range (cancellation can leave holes in the support)
        let hi = sum.keys().max().copied().unwrap_or(0) + 1;
        let lo = sum.keys().min().copied().unwrap_or(0);
        let mut quo: BTreeMap<i64, i64> = BTreeMap::new();
        for a in (lo..=hi).rev() {
            let v = sum.get(&a).copied().unwrap_or(0) + quo.get(&(a + 1)).copied().unwrap_or(0);
            if v != 0 {
                quo.insert(a, v);
            }
        }
        let mut back: BTreeMap<i64, i64> = BTreeMap::new();
        for (&a, &c) in &quo {
            *back.entry(a).or_insert(0) += c;
            *back.entry(a - 1).or_insert(0) -= c;
        }
        back.retain(|_, v| *v != 0);
        if back != sum {
            return Err(InvariantError::DeconvolutionFailed(
                "state-sum polynomial is not divisible by (1 - t^-1)".to_string(),
            ));
        }
        sum = quo;
    }
    Ok(AlexanderPoly(
        sum.iter().rev().map(|(&p, &c)| (p, c)).collect(),
    ))
}

/// The full pipeline: complexes, homology, deconvolution, limit page, and
/// the derived invariants, with every cross-check enforced.
pub fn compute_all(grid: &GridDiagram, cap: usize) -> Result<KnotInvariantSet, InvariantError> {
    grid.require_knot()?;
    let tilde = BigradedComplexF2::build_tilde(grid, cap)?;
    let hfk = deconvolve(&tilde.homology_dims(), grid.n())?;
    let g = genus(&hfk)?;
    let fibred = is_fibred(&hfk)?;
    let poly = alexander_poly(&hfk)?;
    if euler_oracle(grid, cap)? != poly {
        return Err(InvariantError::EulerMismatch);
    }
    let filtered = FilteredComplexF2::build_filtered(grid, cap)?;
    let tau = spectral::tau(&filtered)?;
    if tau.unsigned_abs() as usize > g {
        return Err(InvariantError::TauOutOfRange { tau, genus: g });
    }
    let hfk_entries = hfk
        .iter()
        .rev()
        .map(|(&(a, m), &dim)| HfkEntry { a, m, dim })
        .collect();
    Ok(KnotInvariantSet {
        schema_version: SCHEMA_VERSION,
        name: grid.name().unwrap_or("unnamed").to_string(),
        grid_hash: grid.grid_hash(),
        n: grid.n(),
        hfk: hfk_entries,
        tau,
        genus: g,
        fibred,
        alexander: poly,
        dilution_n: grid.n() - 1,
    })
}

/// The standard symmetry `dim(a, m) = dim(-a, m - 2a)`; violations are
/// reported as warnings, not errors.
pub fn symmetry_warnings(set: &KnotInvariantSet) -> Vec<String> {
    let map = set.hfk_map();
    let mut out = Vec::new();
    for (&(a, m), &d) in &map {
        let mirror = map.get(&(-a, m - 2 * a)).copied().unwrap_or(0);
        if mirror != d {
            out.push(format!(
                "HFK symmetry violated: dim({a}, {m}) = {d} but dim({}, {}) = {mirror}",
                -a,
                m - 2 * a
            ));
        }
    }
    out
}

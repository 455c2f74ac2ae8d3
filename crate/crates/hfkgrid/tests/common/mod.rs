//! Shared helpers for the integration suites: randomized bounded filtered
//! complexes built from a known elementary decomposition and scrambled by
//! filtered changes of basis.
#![allow(dead_code)] // each test binary uses its own subset

use rand::rngs::StdRng;
use rand::Rng;

use hfkgrid::complex::{FilteredComplexF2, Generator};
use hfkgrid::f2linalg::MatF2;

pub struct RandomComplex {
    pub complex: FilteredComplexF2,
    pub gens: Vec<Generator>,
}

/// A random bounded filtered complex: singles and boundary pairs with gaps
/// up to `width`, conjugated by random filtered degree-0 transvections.
pub fn random_filtered_complex(rng: &mut StdRng, width: i64) -> RandomComplex {
    loop {
        let n_pairs = rng.random_range(0..=10usize);
        let n_singles = rng.random_range(0..=(24 - 2 * n_pairs));
        let mut gens: Vec<Generator> = Vec::new();
        for _ in 0..n_singles {
            gens.push(Generator {
                p: rng.random_range(0..=width),
                m: rng.random_range(-3..=3),
            });
        }
        let mut arrows = Vec::new();
        for _ in 0..n_pairs {
            let m = rng.random_range(-3..=3);
            let p_src = rng.random_range(0..=width);
            let p_tgt = rng.random_range(0..=p_src);
            let src = gens.len();
            gens.push(Generator { p: p_src, m });
            let tgt = gens.len();
            gens.push(Generator { p: p_tgt, m: m - 1 });
            arrows.push((src, tgt));
        }
        let dim = gens.len();
        if dim == 0 {
            continue;
        }
        let mut boundary = MatF2::zeros(dim, dim);
        for (src, tgt) in arrows {
            boundary.set(tgt, src, true);
        }
        // each transvection is its own inverse over F2, so conjugating one
        // at a time keeps d^2 = 0 and the filtration condition intact
        for _ in 0..(3 * dim) {
            if let Some(t) = random_transvection(rng, &gens) {
                boundary = t.mul(&boundary).mul(&t);
            }
        }
        let cols: Vec<Vec<u32>> = (0..dim)
            .map(|j| boundary.column(j).ones().map(|i| i as u32).collect())
            .collect();
        let complex =
            FilteredComplexF2::from_parts(gens.clone(), cols).expect("conjugated complex is valid");
        return RandomComplex { complex, gens };
    }
}

/// One random filtered degree-0 transvection `e_j -> e_j + e_i` with
/// `p_i <= p_j` and equal homological degree, when a legal site exists.
pub fn random_transvection(rng: &mut StdRng, gens: &[Generator]) -> Option<MatF2> {
    let dim = gens.len();
    for _ in 0..16 {
        let i = rng.random_range(0..dim);
        let j = rng.random_range(0..dim);
        if i == j || gens[i].m != gens[j].m || gens[i].p > gens[j].p {
            continue;
        }
        let mut t = MatF2::identity(dim);
        t.set(i, j, true);
        return Some(t);
    }
    None
}

/// A random filtered degree-0 isomorphism as a pair `(t, t_inv)`: a product
/// of transvections and the same product reversed.
pub fn random_filtered_iso(rng: &mut StdRng, gens: &[Generator]) -> (MatF2, MatF2) {
    let dim = gens.len();
    let mut factors = Vec::new();
    for _ in 0..(2 * dim) {
        if let Some(t) = random_transvection(rng, gens) {
            factors.push(t);
        }
    }
    let mut fwd = MatF2::identity(dim);
    for t in &factors {
        fwd = t.mul(&fwd);
    }
    let mut inv = MatF2::identity(dim);
    for t in factors.iter().rev() {
        inv = t.mul(&inv);
    }
    (fwd, inv)
}

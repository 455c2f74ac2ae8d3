//! Morphism-of-spectral-sequences properties on randomized complexes:
//! inclusions of filtration subcomplexes, filtered isomorphisms, and the
//! agreement of the decomposition page dimensions with the literal tower.

mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{random_filtered_complex, random_filtered_iso};
use hfkgrid::complex::{FilteredComplexF2, Generator};
use hfkgrid::spectral::{
    self, compute_pages, induced_morphism, lemma_review_check, FilteredMap, LemmaVerdict,
};

/// The subcomplex spanned by generators of filtration level at most `p`,
/// with the inclusion columns into the ambient complex.
fn filtration_subcomplex(
    c: &FilteredComplexF2,
    p: i64,
) -> Option<(FilteredComplexF2, Vec<Vec<u32>>)> {
    let keep: Vec<usize> = (0..c.dim()).filter(|&j| c.generators()[j].p <= p).collect();
    if keep.is_empty() {
        return None;
    }
    let pos: std::collections::HashMap<usize, u32> = keep
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new as u32))
        .collect();
    let gens: Vec<Generator> = keep.iter().map(|&j| c.generators()[j]).collect();
    let cols: Vec<Vec<u32>> = keep
        .iter()
        .map(|&j| {
            c.boundary_column(j)
                .iter()
                .map(|&t| pos[&(t as usize)])
                .collect()
        })
        .collect();
    let sub = FilteredComplexF2::from_parts(gens, cols).ok()?;
    let inclusion: Vec<Vec<u32>> = keep.iter().map(|&j| vec![j as u32]).collect();
    Some((sub, inclusion))
}

#[test]
fn inclusion_of_filtration_level_is_injective_on_first_page() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..25 {
        let rc = random_filtered_complex(&mut rng, 5);
        let (p_min, p_max) = rc.complex.filtration_range();
        let p = rng.random_range(p_min..=p_max);
        let Some((sub, inclusion)) = filtration_subcomplex(&rc.complex, p) else {
            continue;
        };
        let f = FilteredMap::new(sub, rc.complex.clone(), inclusion).unwrap();
        let morphism = induced_morphism(&f).unwrap();
        // on the first page, cells at level <= p coincide with the ambient
        // ones, so the induced map must have full column rank there
        for (&(cell_p, _), mat) in &morphism.pages[1] {
            assert!(cell_p <= p);
            assert_eq!(
                mat.rank(),
                mat.cols(),
                "f^1 must be injective at level {cell_p}"
            );
        }
    }
}

#[test]
fn filtered_isomorphisms_satisfy_the_limit_criterion() {
    // source: one surviving generator plus random cancelling pairs; target:
    // the same complex in a scrambled filtered basis; the map between them
    // is an isomorphism on total homology with matching tau, so the limit
    // map at level tau must be an isomorphism as well
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..25 {
        let mut gens = vec![Generator {
            p: rng.random_range(0..=3),
            m: rng.random_range(-1..=1),
        }];
        let n_pairs = rng.random_range(0..=8usize);
        let mut arrows = Vec::new();
        for _ in 0..n_pairs {
            let m = rng.random_range(-2..=2);
            let p_src = rng.random_range(0..=4i64);
            let p_tgt = rng.random_range(0..=p_src);
            let src = gens.len();
            gens.push(Generator { p: p_src, m });
            let tgt = gens.len();
            gens.push(Generator { p: p_tgt, m: m - 1 });
            arrows.push((src, tgt));
        }
        let dim = gens.len();
        let mut boundary = hfkgrid::f2linalg::MatF2::zeros(dim, dim);
        for (src, tgt) in arrows {
            boundary.set(tgt, src, true);
        }
        let (t, t_inv) = random_filtered_iso(&mut rng, &gens);
        let scrambled = t.mul(&boundary).mul(&t_inv);
        let to_cols = |m: &hfkgrid::f2linalg::MatF2| -> Vec<Vec<u32>> {
            (0..dim)
                .map(|j| m.column(j).ones().map(|i| i as u32).collect())
                .collect()
        };
        let source = FilteredComplexF2::from_parts(gens.clone(), to_cols(&boundary)).unwrap();
        let target = FilteredComplexF2::from_parts(gens.clone(), to_cols(&scrambled)).unwrap();
        // f = t intertwines the boundaries: scrambled . t = t . boundary
        let f = FilteredMap::new(source, target, to_cols(&t)).unwrap();
        let review = lemma_review_check(&f).unwrap();
        assert_eq!(review.tau_source, review.tau_target);
        assert!(review.hf_iso);
        assert_eq!(review.verdict, LemmaVerdict::Holds);
        assert!(review.f_infinity_iso);
    }
}

#[test]
fn decomposition_page_dims_match_the_tower_on_randoms() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..50 {
        let rc = random_filtered_complex(&mut rng, 5);
        let pages = compute_pages(&rc.complex, None).unwrap();
        let tower = spectral::page_dims_tower(&rc.complex);
        for r in 0..=pages.max_page() {
            let dims = pages.page(r).unwrap().dims();
            assert_eq!(
                spectral::page_dims_via_pairs(&rc.complex, r),
                dims,
                "page {r}"
            );
            if r < tower.len() {
                assert_eq!(tower[r], dims, "tower page {r}");
            }
        }
    }
}

#[test]
fn survival_composes_with_the_limit_on_randoms() {
    // the image of to_infinity spans the limit cell by cell, and the E^1
    // cells of the adapted route agree with the literal first page
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..25 {
        let rc = random_filtered_complex(&mut rng, 5);
        let data = spectral::survival(&rc.complex).unwrap();
        let pages = compute_pages(&rc.complex, None).unwrap();
        assert_eq!(data.e1_dims, pages.page(1).unwrap().dims(), "E^1 dims");
        for (key, &dim) in &data.einf_dims {
            let cell = data
                .cells
                .get(key)
                .expect("nonzero limit cell has survivors");
            assert_eq!(cell.to_infinity.rows(), dim);
            // surjectivity: the survivors hit every limit class
            assert_eq!(
                cell.to_infinity.rank(),
                dim,
                "to_infinity spans E^inf at {key:?}"
            );
        }
    }
}

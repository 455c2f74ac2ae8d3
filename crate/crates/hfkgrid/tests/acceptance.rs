//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Every tolerance and threshold is pinned here; timing-sensitive criteria
//! measure the pipeline proper (not file IO or test scaffolding).

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::random_filtered_complex;
use hfkgrid::complex::{FilteredComplexF2, Generator};
use hfkgrid::f2linalg::MatF2;
use hfkgrid::grid::{GridDiagram, DEFAULT_SIZE_CAP};
use hfkgrid::invariants::{self, KnotInvariantSet};
use hfkgrid::obstruct;
use hfkgrid::runner::{self, ComputeOptions};
use hfkgrid::spectral::{self, FilteredMap, LemmaVerdict};

fn grids_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../grids")
}

fn load(name: &str) -> GridDiagram {
    runner::load_grid(&grids_dir().join(name)).expect("bundled grid parses")
}

fn compute(name: &str) -> KnotInvariantSet {
    invariants::compute_all(&load(name), DEFAULT_SIZE_CAP).expect("bundled grid computes")
}

fn hfk_of(set: &KnotInvariantSet) -> BTreeMap<(i64, i64), usize> {
    set.hfk_map()
}

#[test]
fn acceptance_01_unknot() {
    let grid = load("unknot_2.grd");
    let t0 = Instant::now();
    let set = invariants::compute_all(&grid, DEFAULT_SIZE_CAP).unwrap();
    let elapsed = t0.elapsed();
    assert_eq!(hfk_of(&set), [((0, 0), 1)].into_iter().collect());
    assert_eq!(set.tau, 0);
    assert_eq!(set.genus, 0);
    assert!(set.fibred);
    assert_eq!(set.alexander.to_string(), "1");
    assert!(
        elapsed.as_secs_f64() < 0.1,
        "unknot pipeline took {elapsed:?}, budget 0.1 s"
    );
    println!("acceptance 1 (unknot n=2 invariants, < 0.1 s): PASS ({elapsed:?})");
}

#[test]
fn acceptance_02_trefoil() {
    let grid = load("trefoil_5.grd");
    let t0 = Instant::now();
    let set = invariants::compute_all(&grid, DEFAULT_SIZE_CAP).unwrap();
    let elapsed = t0.elapsed();
    assert_eq!(
        set.alexander.0,
        vec![(1, 1), (0, -1), (-1, 1)],
        "Delta = t - 1 + t^-1"
    );
    assert_eq!(
        hfk_of(&set),
        [((1, 0), 1), ((0, -1), 1), ((-1, -2), 1)]
            .into_iter()
            .collect()
    );
    assert_eq!(set.tau, 1);
    assert_eq!(set.genus, 1);
    assert!(set.fibred);
    let oracle = invariants::euler_oracle(&grid, DEFAULT_SIZE_CAP).unwrap();
    assert_eq!(
        oracle, set.alexander,
        "state-sum oracle equals homology polynomial"
    );
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "trefoil pipeline took {elapsed:?}, budget 1 s"
    );
    println!("acceptance 2 (trefoil n=5 invariants + Euler oracle, < 1 s): PASS ({elapsed:?})");
}

#[test]
fn acceptance_03_figure_eight() {
    let grid = load("figure_eight_6.grd");
    let t0 = Instant::now();
    let set = invariants::compute_all(&grid, DEFAULT_SIZE_CAP).unwrap();
    let elapsed = t0.elapsed();
    assert_eq!(set.genus, 1);
    assert!(set.fibred);
    assert_eq!(set.tau, 0);
    assert_eq!(
        set.alexander.0,
        vec![(1, -1), (0, 3), (-1, -1)],
        "Delta = -t + 3 - t^-1"
    );
    let oracle = invariants::euler_oracle(&grid, DEFAULT_SIZE_CAP).unwrap();
    assert_eq!(oracle, set.alexander, "two independent computations agree");
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "figure-eight pipeline took {elapsed:?}, budget 5 s"
    );
    println!("acceptance 3 (figure-eight n=6 invariants, < 5 s): PASS ({elapsed:?})");
}

#[test]
fn acceptance_04_spectral_engine_on_random_complexes() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut checked = 0usize;
    for _ in 0..200 {
        let c = random_filtered_complex(&mut rng, 5).complex;
        let pages = spectral::compute_pages(&c, None).unwrap();
        // page recursion: dim E^{r+1} = dim H(E^r, d^r) at every cell
        for r in 0..pages.max_page() {
            let page = pages.page(r).unwrap();
            let next = pages.page(r + 1).unwrap();
            let keys: Vec<(i64, i64)> = page.dims().keys().copied().collect();
            for (p, m) in keys {
                let dim = page.dim(p, m);
                let out_rank = page.diff(p, m).map_or(0, MatF2::rank);
                let in_rank = page.diff(p + r as i64, m + 1).map_or(0, MatF2::rank);
                assert_eq!(
                    next.dim(p, m),
                    dim - out_rank - in_rank,
                    "page recursion fails at r={r}, cell ({p}, {m})"
                );
                // monotonicity comes with the recursion
                assert!(next.dim(p, m) <= dim);
            }
        }
        // limit identification against the independent subquotient route
        spectral::e_infinity_check(&c).unwrap();
        // limit dims by degree sum to the total homology
        let einf = pages.einf().expect("bounded tower stabilizes").dims();
        let mut by_degree: BTreeMap<i64, usize> = BTreeMap::new();
        for (&(_, m), &d) in &einf {
            *by_degree.entry(m).or_insert(0) += d;
        }
        assert_eq!(by_degree, c.total_homology());
        checked += 1;
    }
    assert_eq!(checked, 200);
    println!(
        "acceptance 4 (200 random filtered complexes, recursion + E^inf identification): PASS"
    );
}

#[test]
fn acceptance_05_filtration_shift_toy_morphism() {
    // one generator in filtration level one maps isomorphically onto one in
    // filtration level zero: an isomorphism on total homology whose limit
    // page map vanishes
    let c = FilteredComplexF2::from_parts(vec![Generator { p: 1, m: 0 }], vec![vec![]]).unwrap();
    let cbar = FilteredComplexF2::from_parts(vec![Generator { p: 0, m: 0 }], vec![vec![]]).unwrap();
    let f = FilteredMap::new(c, cbar, vec![vec![0]]).unwrap();
    let morphism = spectral::induced_morphism(&f).unwrap();
    assert_eq!(morphism.homology_map[&0].rank(), 1, "H(f) has rank 1");
    assert!(
        morphism.limit.values().all(MatF2::is_zero),
        "f^infinity vanishes"
    );
    let review = spectral::lemma_review_check(&f).unwrap();
    match review.verdict {
        LemmaVerdict::HypothesisFails {
            failing,
            conclusion_holds,
        } => {
            assert_eq!(
                failing,
                vec!["tau"],
                "failure attributed to the tau hypothesis"
            );
            assert!(!conclusion_holds);
        }
        LemmaVerdict::Holds => panic!("lemma hypotheses must fail on the toy"),
    }
    println!("acceptance 5 (toy morphism: H(f) iso, f^inf = 0, tau hypothesis blamed): PASS");
}

#[test]
fn acceptance_06_survival_sets_on_bundled_knots() {
    let bundled = [
        "unknot_2.grd",
        "unknot_3.grd",
        "trefoil_5.grd",
        "trefoil_6.grd",
        "figure_eight_6.grd",
        "torus_2_5_7.grd",
        "torus_3_4_8.grd",
    ];
    for name in bundled {
        let grid = load(name);
        let c = FilteredComplexF2::build_filtered(&grid, DEFAULT_SIZE_CAP).unwrap();
        let tau = spectral::tau(&c).unwrap();
        let sets = spectral::a_sets(&c).unwrap();
        assert!(sets.applicable, "{name}: survival applies");
        // A0 is a linear subspace by representation; verify it sits inside A
        // and that A1 is the affine translate of A0 by its base point
        assert!(sets.a.contains_subspace(&sets.a0), "{name}: A0 ⊆ A");
        assert_eq!(sets.a.dim(), sets.a0.dim() + 1, "{name}: A = A0 ∪ (x + A0)");
        let a1 = sets.a1.as_ref().expect("A1 nonempty");
        assert!(sets.a.contains(&a1.base), "{name}: A1 ⊆ A");
        assert!(!sets.a0.contains(&a1.base), "{name}: A1 disjoint from A0");
        assert_eq!(
            a1.directions, sets.a0,
            "{name}: A1 is an affine translate of A0"
        );
        let a1p = sets.a1_prime.as_ref().expect("A1' nonempty");
        // A1' is supported in the distinguished cell (tau, 0)
        let off = sets.e1_offsets[&(tau, 0)];
        let end = sets
            .e1_offsets
            .values()
            .copied()
            .filter(|&o| o > off)
            .min()
            .unwrap_or(sets.e1_total);
        assert!(
            a1p.base.ones().all(|i| i >= off && i < end),
            "{name}: A1' support at (tau, 0)"
        );
        assert!(!sets.a0.contains(&a1p.base));
    }
    println!(
        "acceptance 6 (A1' nonempty at (tau, 0), A0 linear, A1 affine, all bundled knots): PASS"
    );
}

#[test]
fn acceptance_07_obstructions() {
    let unknot = compute("unknot_2.grd");
    let trefoil = compute("trefoil_5.grd");
    let fig8 = compute("figure_eight_6.grd");

    let r = obstruct::invertible_obstruction(&unknot, &trefoil);
    assert_eq!(r.verdict, obstruct::Verdict::Obstructed);
    assert!(
        r.witnesses
            .iter()
            .any(|w| w.check == "hfk dimension" && w.location == "(i=0, j=0)"),
        "witness at the origin"
    );
    assert!(
        r.witnesses
            .iter()
            .any(|w| w.check == "tau" && w.lhs == "0" && w.rhs == "1"),
        "tau witness 0 != 1"
    );

    let r = obstruct::invertible_obstruction(&trefoil, &trefoil);
    assert_eq!(r.verdict, obstruct::Verdict::NotObstructed);

    let r = obstruct::doubly_slice_obstruction(&trefoil);
    assert_eq!(r.verdict, obstruct::Verdict::Obstructed);
    let r = obstruct::doubly_slice_obstruction(&fig8);
    assert_eq!(r.verdict, obstruct::Verdict::NotObstructed);
    println!("acceptance 7 (obstruction verdicts and witnesses): PASS");
}

#[test]
fn acceptance_08_stabilization_invariance() {
    let five = compute("trefoil_5.grd");
    let six = compute("trefoil_6.grd");
    // identical invariants; n, grid hash, and the n-derived metadata differ
    assert_eq!(five.hfk, six.hfk);
    assert_eq!(five.tau, six.tau);
    assert_eq!(five.genus, six.genus);
    assert_eq!(five.fibred, six.fibred);
    assert_eq!(five.alexander, six.alexander);
    assert_ne!(five.grid_hash, six.grid_hash);
    assert_eq!(five.n + 1, six.n);

    // both diluted limit profiles are binomial with the same tau
    for (name, n) in [("trefoil_5.grd", 5i64), ("trefoil_6.grd", 6i64)] {
        let c = FilteredComplexF2::build_filtered(&load(name), DEFAULT_SIZE_CAP).unwrap();
        let tau = spectral::tau(&c).unwrap();
        assert_eq!(tau, five.tau);
        let einf = spectral::einf_dims(&c);
        let mut expected = BTreeMap::new();
        for k in 0..n {
            expected.insert((tau - k, -k), binomial(n - 1, k));
        }
        assert_eq!(einf, expected, "{name}: binomial dilution profile");
    }
    println!("acceptance 8 (stabilization invariance + binomial limit profiles): PASS");
}

fn binomial(n: i64, k: i64) -> usize {
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out as usize
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

#[test]
fn acceptance_09_performance_and_batch_determinism() {
    // full pipeline on the (3,4) torus knot: 8! = 40,320 states
    let grid = load("torus_3_4_8.grd");
    let t0 = Instant::now();
    let set = invariants::compute_all(&grid, DEFAULT_SIZE_CAP).unwrap();
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "T(3,4) pipeline took {elapsed:?}, budget 60 s"
    );
    assert_eq!(set.tau, 3);
    assert_eq!(set.genus, 3);
    assert!(set.fibred);
    assert_eq!(
        set.alexander.0,
        vec![(3, 1), (2, -1), (0, 1), (-2, -1), (-3, 1)]
    );
    assert_eq!(set.hfk_dim_at_alexander(1), 0);
    if let Some(rss) = peak_rss_bytes() {
        assert!(rss < 4 * 1024 * 1024 * 1024, "peak RSS {rss} exceeds 4 GB");
    }

    // batch over the bundled set: --jobs 1 and --jobs 4 byte-for-byte
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("jobs1");
    let out4 = tmp.path().join("jobs4");
    let mk_opts = |cache: &str| ComputeOptions {
        cap: DEFAULT_SIZE_CAP,
        no_cache: false,
        cache_dir: Some(tmp.path().join(cache)),
    };
    let one = runner::cmd_batch(&grids_dir(), Some(1), Some(&out1), &mk_opts("c1")).unwrap();
    let four = runner::cmd_batch(&grids_dir(), Some(4), Some(&out4), &mk_opts("c4")).unwrap();
    assert!(one.errors.is_empty() && four.errors.is_empty());
    assert_eq!(one.summary_tsv, four.summary_tsv);
    let mut names: Vec<_> = std::fs::read_dir(&out1)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let a = std::fs::read(out1.join(&name)).unwrap();
        let b = std::fs::read(out4.join(&name)).unwrap();
        assert_eq!(a, b, "document {name:?} differs between job counts");
    }
    println!(
        "acceptance 9 (T(3,4) pipeline {elapsed:?} < 60 s, batch jobs 1 vs 4 byte-identical): PASS"
    );
}

#[test]
#[ignore = "optional stretch input: no cable grid is bundled; the polynomial and vanishing pattern are exercised on the (3,4) torus knot in criterion 9"]
fn acceptance_10_cable_stretch_goal() {
    // would verify Delta = t^3 - t^2 + 1 - t^-2 + t^-3 and dim HFK(K, 1) = 0
    // on a shipped (2,3)-cable grid
}

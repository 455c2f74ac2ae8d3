//! Concordance-order obstructions evaluated on pairs of invariant sets.
//!
//! An invertible concordance from `K0` to `K1` forces, bigrading by
//! bigrading, `dim HFK(K0) <= dim HFK(K1)`; in particular the genus is
//! monotonic, fibredness transfers back when the genera agree, and `tau`
//! must match (as it must for any concordance). A knot is doubly slice only
//! if the unknot sits below it, so the doubly-slice test runs the invertible
//! obstruction from the unknot table.
//!
//! A verdict of `not_obstructed` never asserts that a concordance exists;
//! these are one-sided tests.

use serde::{Deserialize, Serialize};

use crate::invariants::KnotInvariantSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionMode {
    Invertible,
    Concordance,
    DoublySlice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Obstructed,
    NotObstructed,
}

/// One failed check, naming the result that licenses it and the two values
/// that disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionWitness {
    pub check: String,
    pub theorem: String,
    pub location: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub mode: ObstructionMode,
    pub verdict: Verdict,
    pub witnesses: Vec<ObstructionWitness>,
    /// Total dimensions of the two tables, recorded for comparison with the
    /// epimorphism partial order; no conclusion is drawn from them.
    pub total_hfk_dims: (usize, usize),
    pub footnote: String,
}

const DIM_THEOREM: &str = "bigraded dimension monotonicity under invertible concordance";
const GENUS_THEOREM: &str = "genus monotonicity under invertible concordance";
const FIBRED_THEOREM: &str = "fibredness transfer at equal genus";
const TAU_THEOREM: &str = "tau invariance under concordance";

fn footnote() -> String {
    "not_obstructed does not assert existence of a concordance; total HFK dimensions are \
     recorded for the epimorphism order without drawing a conclusion"
        .to_string()
}

fn report(
    mode: ObstructionMode,
    witnesses: Vec<ObstructionWitness>,
    k0: &KnotInvariantSet,
    k1: &KnotInvariantSet,
) -> ObstructionReport {
    ObstructionReport {
        mode,
        verdict: if witnesses.is_empty() {
            Verdict::NotObstructed
        } else {
            Verdict::Obstructed
        },
        witnesses,
        total_hfk_dims: (k0.total_hfk_dim(), k1.total_hfk_dim()),
        footnote: footnote(),
    }
}

/// Obstructions to an invertible concordance from `k0` to `k1`: bigraded
/// dimension monotonicity, genus monotonicity, fibredness transfer, and
/// `tau` equality, each failure recorded as a witness.
pub fn invertible_obstruction(k0: &KnotInvariantSet, k1: &KnotInvariantSet) -> ObstructionReport {
    let mut witnesses = Vec::new();
    let d0 = k0.hfk_map();
    let d1 = k1.hfk_map();
    for (&(i, j), &dim0) in &d0 {
        let dim1 = d1.get(&(i, j)).copied().unwrap_or(0);
        if dim0 > dim1 {
            witnesses.push(ObstructionWitness {
                check: "hfk dimension".to_string(),
                theorem: DIM_THEOREM.to_string(),
                location: format!("(i={i}, j={j})"),
                lhs: dim0.to_string(),
                rhs: dim1.to_string(),
            });
        }
    }
    if k0.genus > k1.genus {
        witnesses.push(ObstructionWitness {
            check: "genus".to_string(),
            theorem: GENUS_THEOREM.to_string(),
            location: "genus".to_string(),
            lhs: k0.genus.to_string(),
            rhs: k1.genus.to_string(),
        });
    }
    if k0.genus == k1.genus && k1.fibred && !k0.fibred {
        witnesses.push(ObstructionWitness {
            check: "fibredness".to_string(),
            theorem: FIBRED_THEOREM.to_string(),
            location: format!("genus {}", k0.genus),
            lhs: "not fibred".to_string(),
            rhs: "fibred".to_string(),
        });
    }
    if k0.tau != k1.tau {
        witnesses.push(ObstructionWitness {
            check: "tau".to_string(),
            theorem: TAU_THEOREM.to_string(),
            location: "tau".to_string(),
            lhs: k0.tau.to_string(),
            rhs: k1.tau.to_string(),
        });
    }
    report(ObstructionMode::Invertible, witnesses, k0, k1)
}

/// The obstruction valid for any concordance: `tau` equality.
pub fn concordance_obstruction(k0: &KnotInvariantSet, k1: &KnotInvariantSet) -> ObstructionReport {
    let mut witnesses = Vec::new();
    if k0.tau != k1.tau {
        witnesses.push(ObstructionWitness {
            check: "tau".to_string(),
            theorem: TAU_THEOREM.to_string(),
            location: "tau".to_string(),
            lhs: k0.tau.to_string(),
            rhs: k1.tau.to_string(),
        });
    }
    report(ObstructionMode::Concordance, witnesses, k0, k1)
}

/// A knot is doubly slice only if the unknot is below it in the invertible
/// order, so this runs the invertible obstruction from the built-in unknot
/// table. `not_obstructed` is not a proof of double sliceness.
pub fn doubly_slice_obstruction(k: &KnotInvariantSet) -> ObstructionReport {
    let unknot = KnotInvariantSet::unknot();
    let mut r = invertible_obstruction(&unknot, k);
    r.mode = ObstructionMode::DoublySlice;
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{AlexanderPoly, HfkEntry, SCHEMA_VERSION};

    fn table(name: &str, entries: &[(i64, i64, usize)], tau: i64) -> KnotInvariantSet {
        let hfk: Vec<HfkEntry> = entries
            .iter()
            .map(|&(a, m, dim)| HfkEntry { a, m, dim })
            .collect();
        let genus = entries.iter().map(|&(a, _, _)| a).max().unwrap_or(0).max(0) as usize;
        let top: usize = entries
            .iter()
            .filter(|&&(a, _, _)| a == genus as i64)
            .map(|&(_, _, d)| d)
            .sum();
        let mut coeffs = std::collections::BTreeMap::new();
        for &(a, m, d) in entries {
            let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
            *coeffs.entry(a).or_insert(0i64) += sign * d as i64;
        }
        coeffs.retain(|_, c| *c != 0);
        KnotInvariantSet {
            schema_version: SCHEMA_VERSION,
            name: name.to_string(),
            grid_hash: String::new(),
            n: 0,
            hfk,
            tau,
            genus,
            fibred: top == 1,
            alexander: AlexanderPoly(coeffs.iter().rev().map(|(&p, &c)| (p, c)).collect()),
            dilution_n: 0,
        }
    }

    fn trefoil() -> KnotInvariantSet {
        table("trefoil", &[(1, 0, 1), (0, -1, 1), (-1, -2, 1)], 1)
    }

    fn figure_eight() -> KnotInvariantSet {
        table("figure-eight", &[(1, 1, 1), (0, 0, 3), (-1, -1, 1)], 0)
    }

    #[test]
    fn unknot_below_trefoil_is_obstructed_at_origin() {
        let r = invertible_obstruction(&KnotInvariantSet::unknot(), &trefoil());
        assert_eq!(r.verdict, Verdict::Obstructed);
        let dim_witness = r
            .witnesses
            .iter()
            .find(|w| w.check == "hfk dimension")
            .expect("dimension witness at the origin");
        assert_eq!(dim_witness.location, "(i=0, j=0)");
        assert_eq!(dim_witness.lhs, "1");
        assert_eq!(dim_witness.rhs, "0");
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.check == "tau" && w.lhs == "0" && w.rhs == "1"));
    }

    #[test]
    fn reflexivity_never_obstructs() {
        for k in [KnotInvariantSet::unknot(), trefoil(), figure_eight()] {
            let r = invertible_obstruction(&k, &k);
            assert_eq!(r.verdict, Verdict::NotObstructed);
            assert!(r.witnesses.is_empty());
        }
    }

    #[test]
    fn dimension_violation_pattern_between_cable_style_tables() {
        // dim HFK(K', 1) = 1 > 0 = dim HFK(K, 1) for K the (2,3)-cable
        // pattern (shared by the (3,4) torus knot) and K' the trefoil
        let cable_style = table(
            "cable-pattern",
            &[(3, 0, 1), (2, -1, 1), (0, -2, 1), (-2, -5, 1), (-3, -6, 1)],
            3,
        );
        assert_eq!(cable_style.hfk_dim_at_alexander(1), 0);
        assert_eq!(trefoil().hfk_dim_at_alexander(1), 1);
        let r = invertible_obstruction(&trefoil(), &cable_style);
        assert_eq!(r.verdict, Verdict::Obstructed);
        assert!(r.witnesses.iter().any(|w| w.location == "(i=1, j=0)"));
    }

    #[test]
    fn concordance_mode_checks_tau_only() {
        let r = concordance_obstruction(&trefoil(), &KnotInvariantSet::unknot());
        assert_eq!(r.verdict, Verdict::Obstructed);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].check, "tau");
        let r = concordance_obstruction(&KnotInvariantSet::unknot(), &figure_eight());
        assert_eq!(r.verdict, Verdict::NotObstructed);
    }

    #[test]
    fn doubly_slice_flags_trefoil_not_figure_eight() {
        let r = doubly_slice_obstruction(&trefoil());
        assert_eq!(r.mode, ObstructionMode::DoublySlice);
        assert_eq!(r.verdict, Verdict::Obstructed);
        assert!(r.witnesses.iter().any(|w| w.location == "(i=0, j=0)"));
        assert!(r.witnesses.iter().any(|w| w.check == "tau"));
        // the figure-eight is in fact doubly slice; the test must not flag it
        let r = doubly_slice_obstruction(&figure_eight());
        assert_eq!(r.verdict, Verdict::NotObstructed);
    }

    #[test]
    fn pass_verdict_is_transitive_on_dimension_check() {
        let a = table("a", &[(0, 0, 1)], 0);
        let b = table("b", &[(1, 1, 1), (0, 0, 3), (-1, -1, 1)], 0);
        let c = table("c", &[(1, 1, 2), (0, 0, 5), (-1, -1, 2)], 0);
        let ab = invertible_obstruction(&a, &b);
        let bc = invertible_obstruction(&b, &c);
        let ac = invertible_obstruction(&a, &c);
        assert_eq!(ab.verdict, Verdict::NotObstructed);
        assert_eq!(bc.verdict, Verdict::NotObstructed);
        assert_eq!(ac.verdict, Verdict::NotObstructed);
    }

    #[test]
    fn genus_witness_implies_dimension_witness() {
        // genus is detected by a nonvanishing group, so a genus failure
        // always comes with a dimension failure at i = genus(k0)
        let k0 = table("big", &[(2, 0, 1), (0, -1, 1), (-2, -4, 1)], 0);
        let k1 = table("small", &[(1, 0, 1), (0, -1, 1), (-1, -2, 1)], 0);
        let r = invertible_obstruction(&k0, &k1);
        assert!(r.witnesses.iter().any(|w| w.check == "genus"));
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.check == "hfk dimension" && w.location.starts_with("(i=2,")));
    }

    #[test]
    fn genus_witness_redundancy_on_random_tables() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(21);
        let mut random_table = |name: &str| loop {
            let g = rng.random_range(0..=3i64);
            let entries: Vec<(i64, i64, usize)> = (-g..=g)
                .map(|a| (a, rng.random_range(-3..=3), rng.random_range(0..=2usize)))
                .filter(|&(_, _, d)| d > 0)
                .collect();
            if entries.iter().any(|&(a, _, _)| a == g) {
                return table(name, &entries, 0);
            }
        };
        for _ in 0..200 {
            let k0 = random_table("k0");
            let k1 = random_table("k1");
            let r = invertible_obstruction(&k0, &k1);
            if r.witnesses.iter().any(|w| w.check == "genus") {
                let g0 = k0.genus as i64;
                assert!(
                    r.witnesses.iter().any(|w| w.check == "hfk dimension"
                        && w.location.starts_with(&format!("(i={g0},"))),
                    "genus witness without a dimension witness at i = {g0}"
                );
            }
        }
    }

    #[test]
    fn report_serialization_shape() {
        let r = doubly_slice_obstruction(&trefoil());
        let doc = serde_json::to_string(&r).unwrap();
        assert!(doc.contains("\"mode\":\"doubly_slice\""));
        assert!(doc.contains("\"verdict\":\"obstructed\""));
        assert!(doc.contains("\"witnesses\":["));
        let back: ObstructionReport = serde_json::from_str(&doc).unwrap();
        assert_eq!(back, r);
    }
}

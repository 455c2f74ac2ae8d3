//! Knot Floer homology of grid diagrams over the two-element field.
//!
//! A grid diagram determines two chain complexes over `F2`: the fully blocked
//! bigraded complex whose homology is (a diluted copy of) `HFK-hat`, and the
//! Alexander-filtered complex whose spectral sequence converges to the diluted
//! `HF-hat(S^3)`. From these the crate extracts the genus, fibredness,
//! the symmetrized Alexander polynomial, and the concordance invariant tau,
//! and evaluates obstructions to invertible concordance, concordance, and
//! double sliceness.
//!
//! The `book/` directory of the repository walks through the same pipeline
//! chapter by chapter; its code snippets are compiled as doc-tests.

pub mod complex;
pub mod f2linalg;
pub mod grid;
pub mod invariants;
pub mod obstruct;
pub mod runner;
pub mod spectral;

#[cfg(doctest)]
mod book;

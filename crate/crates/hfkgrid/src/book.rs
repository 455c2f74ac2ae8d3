//! The book chapters, compiled as doc-tests so their code blocks stay in
//! sync with the library. One module per chapter keeps failures traceable
//! to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/subspace-calculus.md")]
mod subspace_calculus {}

#[doc = include_str!("../../../book/src/grid-diagrams.md")]
mod grid_diagrams {}

#[doc = include_str!("../../../book/src/complexes.md")]
mod complexes {}

#[doc = include_str!("../../../book/src/spectral-sequences.md")]
mod spectral_sequences {}

#[doc = include_str!("../../../book/src/invariants.md")]
mod invariants {}

#[doc = include_str!("../../../book/src/obstructions.md")]
mod obstructions {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}

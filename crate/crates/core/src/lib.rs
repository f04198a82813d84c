//! Exact traces of homotopy colimits over finite EI-categories.
//!
//! The trace of `hocolim f` for a twisted endomorphism `f` of a presheaf of
//! finite-dimensional rational vector spaces on a finite EI-category `I` is
//! computed two ways: as a coweighted sum of local traces
//! `Σ λ_(i,h) · tr(h* ∘ f_i)` over the iso classes of the endomorphism category,
//! and directly from chain-level models of the homotopy colimit (projective
//! resolutions over the category algebra, the bar complex, group averaging).

// Index loops mirror the matrix and table formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod constructions;
pub mod coweight;
pub mod exactla;
pub mod fincat;
pub mod harness;
pub mod hocolim;
pub mod rep;

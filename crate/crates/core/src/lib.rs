//! Judgment aggregation over finite algebras of truth values.
//!
//! Logics are presented by finite matrices. Agendas, attitude profiles and
//! aggregators live over a finite algebra `B`, and rational, universal,
//! strongly systematic aggregators are matched with homomorphisms
//! `B^N → B`.

pub mod agenda;
pub mod aggregation;
pub mod algebra;
pub mod impossibility;
pub mod modal;
pub mod semantics;
pub mod syntax;

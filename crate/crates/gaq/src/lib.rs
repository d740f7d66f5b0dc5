//! Group-approach quantization engine.
//!
//! Given a Lie group law with a U(1) 2-cocycle, the crate derives the
//! machinery of group quantization mechanically: left/right invariant
//! vector fields, the quantization 1-form and its curvature, Noether
//! invariants, characteristic subalgebras, first-order and higher-order
//! polarizations, and the explicit representations they induce. Built-in
//! registry groups (Heisenberg-Weyl, SU(2), the harmonic oscillator group
//! and the abstract Schrödinger algebra) reproduce the standard results,
//! including the Schrödinger anomaly scan whose closure root has magnitude
//! 1/4.
//!
//! Start with [`group_model::registry_get`], derive with
//! [`invariant_calculus`], validate polarizations with [`lie_structure`]
//! and [`enveloping`], and build representations with [`representations`].
//! The `examples/` directory has one runnable example per capability; the
//! thin `gaq` binary exposes the same flows as subcommands.

pub mod enveloping;
pub mod group_model;
pub mod invariant_calculus;
pub mod lie_structure;
pub mod report;
pub mod representations;
pub mod scenarios;
pub mod symexpr;

/// Seed used by every stochastic check unless `GAQ_SEED` overrides it.
pub const DEFAULT_SEED: u64 = 0x6741_5121;

/// Resolve the effective engine seed.
pub fn engine_seed() -> u64 {
    std::env::var("GAQ_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

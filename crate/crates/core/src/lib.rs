//! Exact Wigner 3j symbols, the structure constants of the Lie algebra of
//! divergence-free vector fields on the 2-sphere, and evaluation of the
//! Misiolek curvature criterion for conjugate points.

pub mod cli;
pub mod exact;
pub mod misiolek;
pub mod oracle;
pub mod structure;
pub mod wigner;

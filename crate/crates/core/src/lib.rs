//! Exact construction and verification of G-twisted Frobenius algebras,
//! with the symmetric-power (second quantization) construction on S_n.

pub mod cocycles;
pub mod exact;
pub mod frobenius;
pub mod gfrob;
pub mod report;
pub mod symgroup;
pub mod sympow;

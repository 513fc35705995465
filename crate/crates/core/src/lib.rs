//! Exact-arithmetic toolkit for step cocycles over irrational rotations.

pub mod constants;
pub mod continued_fractions;
pub mod exact;
pub mod step_circle;
pub mod interval;
pub mod trig;
pub mod ostrowski;
pub mod cocycle_diagnostics;
pub mod fourier_tools;

//! Exact concentration functionals of random walks on finite Abelian groups and
//! on the integers, together with an executable inverse-theorem pipeline that
//! recovers coset-progression structure from large concentration.

pub mod error;
pub mod brute;
pub mod concentration;
pub mod experiments;
pub mod group;
pub mod instance;
pub mod pipeline;
pub mod progression;
pub mod verify;

pub use error::{Error, Result};
pub use group::{AbelianGroup, FracValue, GroupElement};
pub use progression::{CosetProgression, Gap};

//! Computable objects around directional maximal operators and Perron capacity.
//!
//! The crate is organised by subsystem:
//!
//! - [`stream`]: counter-addressable uniform random stream `X_k`.
//! - [`directionsets`]: the named direction sets and the map `Ω ↦ Ω⁻¹ = π/Ω`.
//! - [`perron`]: Perron factor `G` and exact / heuristic capacity estimates.
//! - [`lacunary`]: lacunary sequences and finite-order certificate verification.
//! - [`witnesses`]: homogeneous sets, perturbations, and the two witness searches.
//! - [`probability`]: closed-form probabilities, schedules and Monte Carlo checks.
//! - [`kakeya`]: raster geometry, Perron trees, blow ratios, discrete maximal operator.
//! - [`figures`]: deterministic SVG rendering of samples, fillings and rectangle families.

pub mod directionsets;
pub mod figures;
pub mod kakeya;
pub mod lacunary;
pub mod perron;
pub mod probability;
pub mod stream;
pub mod witnesses;

pub use directionsets::{Direction, DirectionSample, Generator, GeneratorSpec, OrderedSample};
pub use perron::{CapacityEstimate, PerronTerm, SearchStrategy, Variant};
pub use stream::{ConstantStream, RandomStream, UniformSource};

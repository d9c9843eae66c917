//! Cell-free massive MIMO uplink: joint max-min power control and
//! user-centric AP clustering.
//!
//! The crate models a network of multi-antenna access points serving
//! single-antenna users over a shared uplink with maximum-ratio combining,
//! and solves for the transmit powers and per-user serving clusters that
//! maximize the minimum SINR under per-user power caps. Two independent
//! solution paths are provided:
//!
//! * [`solver::solve_max_min`]: a normalized fixed-point iteration on the
//!   best-cluster interference map, fast enough for Monte Carlo campaigns;
//! * [`spectral::oracle_max_min`]: exhaustive association enumeration scored
//!   by Perron roots of augmented coupling matrices, used to certify the
//!   iterative results on small instances.
//!
//! All numerics are generic over the [`scalar::Scalar`] float type; the
//! `*64` aliases below fix `f64`, the recommended precision.

pub mod channel;
pub mod clustering;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod sinr;
pub mod solver;
pub mod spectral;
pub mod units;

pub use channel::{ChannelRealization, NetworkConfig, NetworkInstance};
pub use clustering::{CandidateSet, ClusterIndicator, SchemeId};
pub use error::{Error, Result};
pub use sinr::AffineInterference;
pub use solver::{MaxMinSolution, SolverConfig};
pub use spectral::GainMatrix;

/// Double-precision aliases for the main entry types.
pub type NetworkConfig64 = channel::NetworkConfig<f64>;
pub type NetworkInstance64 = channel::NetworkInstance<f64>;
pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type MaxMinSolution64 = solver::MaxMinSolution<f64>;
pub type GainMatrix64 = spectral::GainMatrix<f64>;

/// Single-precision aliases; fine for channel generation, but the solver
/// tolerances below `1e-7` only make sense in `f64`.
pub type NetworkConfig32 = channel::NetworkConfig<f32>;
pub type ChannelRealization32 = channel::ChannelRealization<f32>;

//! Rank-three parabolic φ-connections on the projective line with three poles.
//!
//! Pole indices are 0-based throughout the library.

pub mod acceptance;
pub mod bundle;
pub mod connection;
pub mod error;
pub mod flags;
pub mod lambda_family;
pub mod normal_forms;
pub mod poles;
pub mod random;
pub mod polymat;
pub mod stability;
pub mod subbundle;
pub mod subspace;
pub mod surface;

pub use bundle::BundleConnection;
pub use connection::{GaugeTransform, PhiConnection, ADAPTED_TWISTS};
pub use error::{PhiError, Result};
pub use poles::{PoleConfig, SpectralData, P1};
pub use subspace::{Flag, Subspace};

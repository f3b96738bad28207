//! Interference MGF, coverage probability and ergodic rate of Poisson
//! cellular networks, with an idle-mode load model and a Monte Carlo oracle.
//!
//! The analytical layers are generic over [`Scalar`] (`f32`, `f64`); the
//! simulator runs in `f64`.

// `!(x > 0)` rejects NaN on purpose; quadrature nodes are kept at full precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytics;
pub mod error;
pub mod mgf;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod simulator;
pub mod specfun;

pub use analytics::{
    load_model, load_model_from_ratio, pcov, pcov_partial_load, rate_actual, rate_closed_general, rate_fully_loaded,
    rate_peak, rate_quadrature, CoverageCurve, LoadModel, PcovKind, RateMethod, RateResult,
};
pub use error::{Error, Result};
pub use mgf::{solve_c, IntersectionConstant, MgfMode, MgfQuery, NetworkParams};
pub use scalar::Scalar;
pub use simulator::{run_simulation, SimConfig, SimulationRun};

pub type NetworkParamsF64 = NetworkParams<f64>;
pub type NetworkParamsF32 = NetworkParams<f32>;
pub type IntersectionConstantF64 = IntersectionConstant<f64>;
pub type IntersectionConstantF32 = IntersectionConstant<f32>;
pub type RateResultF64 = RateResult<f64>;
pub type RateResultF32 = RateResult<f32>;
pub type LoadModelF64 = LoadModel<f64>;
pub type LoadModelF32 = LoadModel<f32>;

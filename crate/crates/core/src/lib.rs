//! Lead-lag (Hoff) paths of sampled signals, their exact level-2 rough path
//! lifts, the quadratic-variation-corrected limit rough path, and the random
//! ODEs driven by them, whose solutions recover Itô integrals.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` or `f32`); the `*64`
//! aliases fix `f64`.

pub mod csvfmt;
mod error;
pub mod experiments;
pub mod leadlag;
pub mod rde;
pub mod roughlift;
mod scalar;
pub mod tensor_group;
pub mod timeseries;

pub use error::{Error, Result};
pub use leadlag::{build_hoff, eval_hoff, lag_of, lead_of, HoffPath, Mover};
pub use roughlift::{
    build_limit, build_limit_on, d0_dist, dinf_dist, hoff_lift, holder_norm, lift_piecewise_linear,
    pvar_dist, pvar_norm, realized_qv, window_sup_norm, GroupPathSkeleton, LinearSegment, QvMode,
};
pub use scalar::Scalar;
pub use tensor_group::{
    dist, exp2, group_inv, group_mul, homog_norm, log2, Level2Group, Level2Tensor,
};
pub use timeseries::{
    dyadic_halfsplit_partition, load_csv, save_csv, simulate, uniform_partition, Partition,
    SampledSeries, SimKind, SimSpec, Simulation,
};

pub type Level2Group64 = Level2Group<f64>;
pub type Level2Group32 = Level2Group<f32>;
pub type Level2Tensor64 = Level2Tensor<f64>;
pub type Partition64 = Partition<f64>;
pub type SampledSeries64 = SampledSeries<f64>;
pub type HoffPath64 = HoffPath<f64>;
pub type GroupPathSkeleton64 = GroupPathSkeleton<f64>;

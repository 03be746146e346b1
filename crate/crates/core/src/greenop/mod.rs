//! Integral operators with Green's kernels on unbounded domains.

mod hypotheses;
mod kernel;
mod operator;
pub mod quadrature;

pub use hypotheses::{
    check_hypotheses, Check, FaceSample, HypothesisConfig, HypothesisReport, Integral, OrderReport, Sample, Status,
};
pub use kernel::{kernel_abs_integral, AxisFactor, Kernel, Nonlinearity, Profile, Source, Support};
pub use operator::{apply_t, default_map, ApplyOptions, IntegralOperator};
pub use quadrature::{adaptive, box_quadrature, gauss_legendre, unbounded_quadrature, QuadConfig, QuadResult, TailEnvelope};

//! The nonlinear mean, the dyadic suspension bridge `A`, and `B = 1 - A^{-1}`.

mod audit;
mod mean;
mod value;

pub use audit::{
    audit_double_bound, audit_midpoint, audit_monotone, audit_neighbor_bound, check_bellman_triple,
    check_ratio_monotone, max_neighbor_gap, mean_increasing, mean_properties, width_target, Audit,
    BellmanCandidate, BigB, Check, TildeB,
};
pub(crate) use audit::{audit_on_grid, le};
pub use mean::{nonlinear_mean, tau_of, x_map};
pub use value::{
    big_b, big_b_interval, bridge_inverse, bridge_value, tilde_b, tilde_b_interval, BridgeCache,
};

//! Machine-checkable reproductions of the computer-assisted steps.

mod auxiliary;
mod certificate;
mod engine;
mod level5;
mod pipelines;
mod reductions;

pub use auxiliary::{
    prove_case3_boundary, prove_phi_coeffs, prove_tilde_b_supersolution, tilde_b_pipeline,
};
pub use certificate::{Certificate, Status, StepKind, StepRecord};
pub use engine::{break_weakest_sum, Op, Pipeline};
pub use level5::{level5_margin, prove_level5, QuadElem};
pub use pipelines::{
    mean_assoc_pipeline, merge_max_pipeline, midpoint_step_pipeline, negative_controls,
    prove_mean_assoc, prove_merge_max, prove_midpoint_step, prove_tail_ratio, tail_ratio_pipeline,
};
pub use reductions::{audit_reduction_instances, audit_reduction_instances_at};

use rayon::prelude::*;

/// Default range for the coefficient check.
pub const PHI_COEFFS_K: u64 = 10_000;

/// Identifiers accepted by [`prove`], in the order `all` runs them.
pub const PIPELINES: [&str; 8] = [
    "4.3", "4.4", "4.5", "4.6", "level5", "phi", "tilde-b", "case3",
];

/// Runs one pipeline by identifier; `reductions` audits `D_6`.
pub fn prove(id: &str) -> Option<Certificate> {
    Some(match id {
        "4.3" => prove_mean_assoc(),
        "4.4" => prove_merge_max(),
        "4.5" => prove_tail_ratio(),
        "4.6" => prove_midpoint_step(),
        "level5" => prove_level5(),
        "phi" => prove_phi_coeffs(PHI_COEFFS_K),
        "tilde-b" | "tilde_b" => prove_tilde_b_supersolution(),
        "case3" => prove_case3_boundary(),
        "reductions" => audit_reduction_instances(6),
        _ => return None,
    })
}

/// All pipelines in [`PIPELINES`], run concurrently, reported in that order.
pub fn prove_all() -> Vec<Certificate> {
    PIPELINES
        .par_iter()
        .map(|id| prove(id).expect("known pipeline"))
        .collect()
}

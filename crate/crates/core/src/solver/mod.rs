//! Riemannian trust-region solver and the rank staircase.

mod rtr;
mod staircase;

pub use rtr::{
    cost_decrease, manifold_dim, rtr, Escalation, EscapeStep, PSchedule, SolveReport, SolveStatus, SolverOptions,
    RANK_TOLERANCE,
};
pub use staircase::{
    auto_start_rank, escalate, escape_direction, escape_step, stage_certificate, staircase, staircase_from,
};

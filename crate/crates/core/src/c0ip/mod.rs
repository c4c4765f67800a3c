//! C0 interior penalty form for the clamped biharmonic problem.
//!
//! On an interior edge with normal `n` pointing from `T-` to `T+` the
//! average is `{v} = (v+ + v-) / 2` and the jump `[v] = v+ - v-`. On a
//! boundary edge `n` is the outward normal, `{v_nn} = v_nn` and
//! `[v_n] = -v_n`, i.e. the missing outer trace is taken as zero.

mod assemble;
mod norms;
mod trace;

pub use assemble::{
    apply_clamped_bc, assemble_bilinear, assemble_bilinear_oriented, assemble_load, assemble_system,
    default_gamma, solve_clamped, AssembledSystem,
};
pub use norms::{energy_norm, energy_parts, seminorm_on_subdomain, Difference, EnergyParts, PiecewiseField, SmoothField};
pub use trace::{EdgeTrace, SideTrace};

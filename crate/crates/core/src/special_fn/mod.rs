//! Incomplete Beta, the g_v transform and its inverse, root finding and quadrature.

pub mod beta;
pub mod gv;
pub mod quadrature;
pub mod roots;

pub use beta::{complete_beta, incomplete_beta};
pub use gv::{g_v, g_v_direct, g_v_inverse, GvParams};
pub use roots::find_root_monotone;

//! Exact symbolic workbench for bivariate Laurent polynomial algebra,
//! Newton-polygon gradings, Jacobian-bracket differential systems and the
//! associated plane automorphism pipeline.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point and no approximate comparison anywhere in the crate.

pub mod error;
pub mod expr;
pub mod frac;
pub mod grading;
pub mod jacobian;

pub mod laurent;
pub mod param;
pub mod pipeline;

pub mod rat;
pub mod sampling;
pub mod solver;


pub mod subst;

pub use error::{Error, Result};
pub use expr::{parse_poly, print_poly};
pub use frac::FracElem;
pub use jacobian::{bracket, bracket_frac, edpol_residual, reconstruct, EdpolInstance, MuVec, SystemData};
pub use grading::{directions, edge_endpoints, leading_form, pred_dir, succ_dir, trailing_form, vdeg, Direction, EdgeData};
pub use laurent::{LaurentPoly, Var};
pub use param::{Ctx, ParamPoly};
pub use rat::{int, rat, Rat};
pub use subst::SubstMap;

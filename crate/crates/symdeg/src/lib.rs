//! Exact computation of minimum approximate degrees for symmetric
//! properties of function tuples, with the polynomial machinery and
//! reductions that make every claim checkable at small sizes.

pub mod approxdeg;
pub mod lp;
pub mod multisym;
pub mod poly;
pub mod properties;
pub mod rat;

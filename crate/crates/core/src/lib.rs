//! Exact computation of the normalized Alexander polynomial and the perturbed-Alexander
//! invariant `rho_1` of knot diagrams, with a Reidemeister-move engine, a traffic-model
//! numeric oracle and a symbolic g-rules checker.

pub mod diagram;
pub mod exec;
pub mod grules;
pub mod invariant;
pub mod laurent;
pub mod polymat;
pub mod table;
pub mod traffic;
pub mod verify;

pub use exec::Exec;
pub use laurent::LaurentPoly;

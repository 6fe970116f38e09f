//! Power residues of Fourier coefficients of CM newforms and elliptic curves.

pub mod ap_sources;
pub mod arith;
pub mod classfield;
pub mod cmforms;
pub mod density;
pub mod quadfield;
pub mod residue;

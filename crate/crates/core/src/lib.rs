pub mod dual;
pub mod error;
pub mod exact;
pub mod harness;
pub mod lp;
pub mod primal;
pub mod quadrature;
pub mod regions;
pub mod scalar;
pub mod spectra;

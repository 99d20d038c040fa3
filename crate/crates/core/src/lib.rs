//! Desk-scale numerical laboratory for sweeps through quantum phase
//! transitions: Gaussian mode freezing and squeezing, analogue horizons,
//! Bose-Hubbard number fluctuations, spinor-quench vortex statistics,
//! adiabatic quantum algorithms and gap-scaling models.

pub mod aqc;
pub mod bosehubbard;
pub mod dispersion;
pub mod exec;
pub mod modes;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod scaling;
pub mod spinor;

pub use profile::{Domain, Form, ProfileError, SweepProfile};

//! Semiclassical optomechanical cooling for driven nonlinear cavities.
//!
//! The engine works in internal units where the cavity decay rate `gamma`
//! sets the frequency scale and energies are measured in units of
//! `hbar * gamma`. Conversion from laboratory units happens only in
//! [`cli_io::units`].
//!
//! Layout:
//! - [`specfun`]: Bessel functions of the first kind and series checks.
//! - [`cavity`]: cavity models, Wirtinger derivatives, fixed points and
//!   bifurcation thresholds.
//! - [`semiclassical`]: photon-number spectrum, optomechanical damping,
//!   residual heating, fluctuation eigenvalues and correlators.
//! - [`sweep`]: parameter sweeps, detuning optimisation, the cooling design
//!   pipeline and figure datasets.
//! - [`cli_io`]: configuration parsing, units and table emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod cavity;
pub mod cli_io;
mod ddouble;
pub mod error;
pub mod semiclassical;
pub mod specfun;
pub mod sweep;
pub mod table;

pub use cavity::{
    bifurcation_threshold, classical_hamiltonian, fd_hamiltonian_derivatives, find_fixed_points,
    hamiltonian_derivatives, Branch, FixedPoint, ModelDescriptor, SearchSpec, WirtingerDerivs,
};
pub use error::{Error, Result};
pub use semiclassical::{MechanicalMode, UniversalParams};
pub use table::{Cell, Table};

//! Squeezed angular-momentum wave packets on the sphere.
//!
//! The library builds a family of localized wave packets parameterized by a
//! complex squeezing parameter `eta`, a concentration parameter `N`, and a
//! ladder index `k`, expands them in orthonormal spherical harmonics, measures
//! their angular-momentum statistics, and evolves them under a rigid-rotor
//! spectrum `E_l = omega0 * l(l+1)` to detect fractional revivals (clones,
//! mutants, and ring-like profiles).
//!
//! Modules:
//! - [`harmonics`]: normalized associated Legendre recurrences, spherical
//!   harmonics, and Gauss-Legendre sphere grids.
//! - [`states`]: packet construction, the SU(2)-type ladder, and coefficient
//!   tables.
//! - [`observables`]: moments, squeezing ratio, uncertainty products.
//! - [`dynamics`]: time evolution, autocorrelation, revival scans, density
//!   grids, packet counting and clone fidelity.
//! - [`io`]: the JSON/CSV wire formats used by the CLI.
//!
//! All numeric kernels are generic over the scalar type via [`Real`]
//! (`f32` or `f64`); the aliases below fix `f64`, which is what the CLI and
//! the test suites use.

pub mod dynamics;
pub mod error;
pub mod harmonics;
pub mod io;
pub mod observables;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

pub use dynamics::{DensityGrid, PacketCount, RevivalEvent, RevivalScanResult};
pub use harmonics::SphereGrid;
pub use observables::ObservableReport;
pub use states::{SphericalState, SqueezeParam, WavepacketSpec};

/// `f64` instantiations of the main types.
pub type SphereGrid64 = SphereGrid<f64>;
pub type SqueezeParam64 = SqueezeParam<f64>;
pub type WavepacketSpec64 = WavepacketSpec<f64>;
pub type SphericalState64 = SphericalState<f64>;
pub type ObservableReport64 = ObservableReport<f64>;
pub type DensityGrid64 = DensityGrid<f64>;
pub type RevivalScanResult64 = RevivalScanResult<f64>;

/// `f32` instantiations, for callers that trade precision for footprint.
pub type SphereGrid32 = SphereGrid<f32>;
pub type SqueezeParam32 = SqueezeParam<f32>;
pub type WavepacketSpec32 = WavepacketSpec<f32>;
pub type SphericalState32 = SphericalState<f32>;

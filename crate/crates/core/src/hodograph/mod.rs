//! Degenerate characteristic system for (X̃, Ỹ, W̃) in the partial
//! hodograph plane (z, t) = (φ − φ_M, cos ω), solved from the image of
//! the streamline down to the sonic line t = 0.

pub mod coeffs;
pub mod domain;
pub mod march;
pub mod monitors;

pub use coeffs::{char_speeds, coefficients, Coefficients};
pub use domain::{build_domain, DomainOmega};
pub use march::{march, Foot, GridSpec, HodographField, Level, MarchError, MarchMonitors, MarchTolerances, SonicTrace};
pub use monitors::{regularity_monitors, RegularityReport};

//! Genus-zero open and closed string amplitudes via dihedral coordinates.
//!
//! The crate implements, with exact rational arithmetic wherever the objects
//! are algebraic and high-precision quadrature where they are not:
//!
//! * dihedral polygons, chords and their cutting calculus ([`polygon`]);
//! * momentum-conserving Mandelstam variables and their chord coordinates
//!   ([`mandelstam`]);
//! * logarithmic forms in the chord basis, residues, forgetful and
//!   trivialisation pullbacks, the canonical cell forms and Parke–Taylor
//!   forms ([`forms`]);
//! * the formal integrand algebra with its renormalisation calculus
//!   ([`integrand`]);
//! * truncated multivariate Laurent series over pluggable coefficient rings,
//!   including a zeta-symbol ring with the single-valued projection
//!   ([`series`]);
//! * tanh-sinh/exp-sinh quadrature, complex-plane integrals, quasi-Monte
//!   Carlo and Gamma-function oracles ([`quadrature`]);
//! * amplitude Laurent expansions and their consistency checks
//!   ([`amplitudes`]);
//! * the Arnol'd algebra of the configuration space of points with its
//!   twisted top cohomology and basis certificates ([`twisted`]);
//! * four-point intersection pairings, twisted period relations and the
//!   double-copy identities ([`pairings`]).

pub mod amplitudes;
pub mod forms;
pub mod integrand;
pub mod mandelstam;
pub mod pairings;
pub mod polygon;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod twisted;
pub mod verify;

pub use polygon::{Chord, Polygon};
pub use scalar::{BigReal, Complex, Field, Rat, Real};

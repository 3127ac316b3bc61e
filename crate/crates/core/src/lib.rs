//! Exact arithmetic and simulation for arithmetic-group dynamics on the period
//! domain of positive oriented 2-planes in an indefinite integral quadratic space.

pub mod diagnostic;
pub mod disk;
pub mod error;
pub mod field;
pub mod horocycle;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod metric;
pub mod monodromy;
pub mod par;
pub mod period;
pub mod svg;
mod zvec;

pub use diagnostic::{closure_diagnostic, ClosureReport};
pub use disk::{chamber_decompose, disk_coords, has_round_bits, wall_geodesic, Chamber, DiskModel, DiskPoint, Wall};
pub use error::{Error, Result};
pub use horocycle::{fit_circle, horocycle_orbit, horocycle_orbit_conformal, tangency_residual, unipotent_subgroup, CircleFit, UnipotentFamily};
pub use field::{FieldVector, QuadScalar};
pub use lattice::{gram_signature, primitive_part, QuadraticLattice, RationalPart, Signature};
pub use par::Execution;
pub use metric::{plane_distance, FloatPlane};
pub use monodromy::{orbit_ball, reflection_generators, so_plus_membership, IntegralIsometry, OrbitSample};
pub use period::{orbit_type, plane_contains, AntiHolomorphicInvolution, OrbitType, PeriodPoint, PlaneKey, PositivePlane};

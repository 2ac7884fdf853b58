//! Energy-aware planning and simulation for a robot that can both walk and
//! fly.
//!
//! * [`geometry`]: box-obstacle worlds, collision and walkability queries,
//!   seeded node sampling.
//! * [`rom`]: reduced-order rigid-body model with compliant contact.
//! * [`governor`]: reference governor keeping stance feet inside the
//!   friction pyramid.
//! * [`planner`]: multi-modal roadmaps, energy costs and A*.
//! * [`sim`]: mission execution with a trot gait, flight tracker, morphing
//!   sequences and energy metering.

pub mod error;
pub mod geometry;
pub mod governor;
pub mod planner;
pub mod rng;
pub mod rom;
pub mod scenario;
pub mod sim;

pub use error::{DynamicsError, GeometryError, GovernorError, PlannerError, SimError};
pub use geometry::{Box3, EnvironmentMap, Vec3};
pub use scenario::Scenario;

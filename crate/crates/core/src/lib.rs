//! Satellite ground network planning with feed-switching.
//!
//! - [`model`]: instances, schedules, the profit objective and the feasibility checker.
//! - [`io`] and [`generator`]: instance files and the seeded instance generator.
//! - [`similarity`]: attribute weighting and task/individual similarity.
//! - [`decoder`]: the TSMFS decoder from task orders to feasible schedules.
//! - [`dsga`]: the distance-similarity genetic algorithm.
//! - [`oracle`]: exact search for tiny instances plus random and greedy baselines.
//! - [`bench`]: repeated seeded runs, summary tables and convergence traces.

pub mod bench;
pub mod decoder;
pub mod dsga;
pub mod error;
pub mod generator;
pub mod io;
pub mod model;
pub mod oracle;
pub mod similarity;

pub use decoder::{decode, Decoder};
pub use dsga::{evolve, DsgaConfig, EvolveResult};
pub use error::{DecodeError, GeneratorError, InstanceError, ModelError, SimilarityError, SolverError};
pub use generator::{generate_instance, GeneratorConfig, InstanceLabel};
pub use model::{fitness, validate_schedule, Instance, Schedule, TaskId};

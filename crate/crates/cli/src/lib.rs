//! Scenario-driven front end for `fovstat`: the negative-information demo,
//! FoV cardinality pmfs, FoV placement and split-library generation. Every
//! command reads a JSON scenario and writes CSV and JSON artifacts.

pub mod count;
pub mod demo;
pub mod error;
pub mod library;
pub mod output;
pub mod plan;
pub mod scenario;

pub use count::{run_cardinality, CardinalityReport};
pub use demo::{run_partition_demo, DemoReport, StepReport};
pub use error::{CliError, CliResult};
pub use library::generate_library;
pub use plan::{run_plan, PlanReport};
pub use scenario::Scenario;

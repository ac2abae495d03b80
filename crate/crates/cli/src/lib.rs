//! Scenario parser and runner for the `derivlab` command-line tool.

pub mod bundled;
pub mod error;
pub mod expr;
pub mod lexer;
pub mod runner;
pub mod scenario;

pub use error::{Pos, ScenarioError};
pub use expr::parse_element;
pub use runner::{run_scenario, RunOptions, RunReport};
pub use scenario::{parse_scenario, parse_tower_str, Scenario};

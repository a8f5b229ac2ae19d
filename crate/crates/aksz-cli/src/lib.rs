//! Model language, check runner and reports for the `aksz` command.

pub mod ast;
pub mod checks;
pub mod cli;
pub mod error;
pub mod files;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod printer;
pub mod report;

pub use checks::{run_checks, RunOptions};
pub use error::{ErrorKind, ModelError, Pos};
pub use model::{load_path, load_str, Model};
pub use parser::{parse_expr, parse_model};
pub use printer::print_model;
pub use report::CheckReport;

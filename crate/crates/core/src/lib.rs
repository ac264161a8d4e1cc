pub mod checks;
pub mod error;
pub mod evaluator;
pub mod images;
pub mod numeric;
pub mod objects;
pub mod reader;
pub mod syntax;
pub mod universe;
pub mod wire;

pub use checks::{run_tests, TestReport};
pub use error::{Error, Position, Result};
pub use evaluator::{eval_program, load_program, Interp, LoadedProgram, Value};
pub use images::Scene;
pub use reader::LanguageLevel;

pub type Number = numeric::Tower<num_bigint::BigInt, f64>;
pub type ExactRational = numeric::Rational<num_bigint::BigInt>;

//! Sparse least squares instances with a certified optimum, their on-disk
//! format, and small fixed fixtures.

mod fixtures;
mod generator;
mod io;
mod profiles;

pub use fixtures::{logistic_fixture, read_dense_text, toy_lasso, LOGISTIC_FIXTURE};
pub use generator::{generate_nesterov_lasso, kkt_residual, GeneratorParams, LassoInstance};
pub use io::{load_instance, read_matrix_market, read_vector, save_instance, write_matrix_market, write_vector, InstanceMeta};
pub use profiles::{profile_params, PROFILES};

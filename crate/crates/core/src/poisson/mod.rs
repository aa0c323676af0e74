//! Counting processes with time-dependent rate: exact laws and two
//! independent samplers.

pub mod path;
pub mod rate;
pub mod sampler;
pub mod stats;

pub use path::{count_at, read_paths, write_paths, PoissonPath};
pub use rate::RateProfile;
pub use sampler::{path_seed, sample_path_inversion, sample_path_thinning, sample_paths, Sampler};
pub use stats::{
    histogram, increment_pmf, mean_function, poisson_gof, poisson_pmf, two_sample_chi_square,
    ChiSquare,
};

pub mod baselines;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod io;
pub mod noise;
pub mod optimize;
pub mod persistence;
pub mod render;
pub mod rng;
pub mod series;
pub mod signals;
pub mod special;

pub use error::{Error, Result};
pub use estimator::{anapt, AnaptConfig, CompensationConstants, CutoffReport};
pub use noise::{CutoffQuery, Family, NoiseModel};
pub use series::TimeSeries;

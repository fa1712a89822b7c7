pub mod error;
pub mod tensor;
pub mod kinematics;
pub mod spectral_calculus;
pub mod energy;
pub mod stress;
pub mod lab;
pub mod calibration;
pub mod verify;
pub mod cli;
mod divdiff;
mod jet;

pub use jet::Order;

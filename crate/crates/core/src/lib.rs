pub mod beam_model;
pub mod cli;
pub mod config;
pub mod error;
pub mod euler_bernoulli;
pub mod numeric;
pub mod response;
pub mod timoshenko;
pub mod verification;

pub mod analysis;
pub mod evalkit;
pub mod factory;
pub mod generators;
pub mod render;
pub mod sample;
pub mod solvers;

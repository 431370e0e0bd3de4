pub mod cli;
pub mod corpus;
pub mod evaluator;
pub mod experiment;
pub mod injector;
pub mod irloc;
pub mod minij;
pub mod patterns;
pub mod rng;

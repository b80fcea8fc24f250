pub mod analysis;
pub mod bounds;
pub mod cli;
pub mod dtn;
pub mod flow;
pub mod ite;
pub mod media;
pub mod specfun;
pub mod symbols;

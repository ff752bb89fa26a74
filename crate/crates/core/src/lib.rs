pub mod cli;
pub mod conley;
pub mod dynsys;
pub mod equilibria;
pub mod expr;
pub mod flow;
pub mod integrator;
pub mod linalg;
pub mod region;
pub mod topo;
pub mod verifier;

pub mod catalog;
pub mod cli;
pub mod driver;
pub mod expr;
pub mod hopf;
pub mod lattice;
pub mod ncalg;
pub mod opalg;
pub mod qseries;
pub mod report;

pub mod clausal_form;
pub mod graph;
pub mod lattice;
pub mod encoder;
pub mod matcher;
pub mod cli;

//! Pell graphs, their edge irregularity, and expansions of partial cubes.

pub mod expansion;
pub mod graphs;
pub mod irregularity;
pub mod pellstruct;
pub mod seq;
pub mod verify;
pub mod words;

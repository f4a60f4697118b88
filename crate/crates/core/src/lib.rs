//! Toolkit for the desk-scale computations behind the classification of
//! PSL2(8) subgroups with 7B elements in the Monster.

pub mod fields;
pub mod group;
pub mod linalg;
pub mod words;
pub mod actions;
pub mod mtxio;
pub mod formula;
pub mod scenarios;

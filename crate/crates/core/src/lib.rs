//! Differentiable first-order fuzzy knowledge bases trained in staged
//! curricula with rehearsal of earlier rules.

pub mod autodiff;
pub mod fol;
pub mod logic;
pub mod curriculum;
pub mod tasks;
pub mod experiment;

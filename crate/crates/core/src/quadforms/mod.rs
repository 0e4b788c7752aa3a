//! Positive definite binary quadratic forms and their `Gamma_0(N)`-classes.

pub mod classes;
pub mod form;

pub use classes::{
    admissible_betas, all_classes, class_representatives, class_representatives_search, gamma0_equivalent, genus_character,
    genus_character_with, omega, ClassList, ClassRep, RepresentationSearch,
};
pub use form::{reduced_forms, Bqf, UnimodularMatrix};

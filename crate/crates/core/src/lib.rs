//! Exact and numeric computations on the étale coordinate chart of zastava
//! spaces: polynomial algebra, root data, coordinate conversions, Poisson
//! brackets, Whittaker pairings and superpotentials.

pub mod poisson;
pub mod polyalg;
pub mod rootdata;
pub mod sample;
pub mod scalar;
pub mod superpotential;
pub mod whittaker;
pub mod zastava;

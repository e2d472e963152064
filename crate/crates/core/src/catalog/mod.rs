//! Measure representations, the catalog of named laws, and pushforwards.

mod law;
mod measure;
mod ops;

pub use law::{commutator_ww_edge, Law, LAW_NAMES, MAX_CLOSED_FORM_ORDER, MAX_QUADRATURE_ORDER};
pub use measure::{atomic_moments, MeasureSpec, Push, PushedLaw, ATOM_MASS_TOL, GRID_MASS_TOL};
pub use ops::{
    catalog_atoms, catalog_density, catalog_free_cumulants, catalog_moments, catalog_moments_exact, dilate,
    dilate_seq, grid_mass, push_sqrt, push_square, shift, shift_seq, square_moments, symmetrize, symmetrize_seq,
};

//! Exact lattice machinery.

pub mod linalg;
pub mod membership;
pub mod octahedra;
pub mod simplex;

pub use linalg::{determinant, diagonal_form, integer_solve, kernel_basis, rank, ColumnEchelon, DiagonalForm, IntMatrix};
pub use simplex::{rational_feasible, Bounds, Feasibility};
pub use membership::{
    is_null, lattice_constant, lattice_constant_split, lattice_member_l, lattice_member_lminus, lattice_member_oracle, null_check,
    sharp_degree, Membership, Method, MoleculeLattice,
};
pub use octahedra::{fold, is_symmetric, octahedra, octahedron_vector, symmetric_null_basis, unfold, OctahedralSpan, Octahedron};

mod assign;
mod grid;
mod identities;
mod params;
mod reduction;
mod tau;
mod time;

pub use assign::{assign_finite, max_imaginary, real_data, scan_infinite, InfiniteScan, Variant};
pub use grid::GridSpec;
pub use identities::{blaux, conjugation, index_shift, neutral_odd, neutral_shifted, three_term, IdentityCheck, ThreeTerm};
pub use params::FermionParams;
pub use reduction::{
    b_partner, c_partner, h_parameters, reduction_identity, reduction_residuals, satisfies_reduction, solve_reduction,
    specialize_family, ReductionInput, ReductionMode,
};
pub use tau::{eval_f, eval_F};
pub use time::{z_shift, Domain, TimeArray, VertexTimes};

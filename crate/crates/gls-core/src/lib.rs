//! Numerical toolkit for sup-weighted Lebesgue families: weight functions
//! on exponent intervals, fundamental functions, anisotropic mixed norms,
//! and dilation operators f ↦ f(A·) with their exact norm laws and bounds,
//! plus quadrature and Monte Carlo engines to verify all of it.

pub mod dilation;
pub mod fundamental;
pub mod integrate;
pub mod linalg;
pub mod mathcore;
pub mod psi;
pub mod sup;

pub use dilation::{Dilation, DilationError, TensorDilation, WeightedBoundPair};
pub use fundamental::{
    fundamental_agls, fundamental_box, fundamental_gls, fundamental_lp, fundamental_product_set,
    theta_scaled, theta_unit, tilde_phi_asymptotics, Ellipsoid, FundamentalError, MixedExponent,
    Parallelepiped, ProductSet, PsiMulti, SetBlock,
};
pub use integrate::{
    agls_norm, gls_norm, lp_norm, lp_norm_with, mc_region_norm, mixed_norm, mixed_norm_with,
    weighted_norm, weighted_norm_with, Backend, Method, NormError, NormEstimate, RegionSolid,
    TestFunction,
};
pub use linalg::{LinAlgError, Matrix};
pub use mathcore::{ball_volume, beta, bisect_root, ln_beta, log_gamma, MathError, RealPos};
pub use psi::{natural_psi, precedes, PrecedesOptions, PsiError, PsiFunction, PsiTilde, Verdict};
pub use sup::{sup_scalar, sup_vector, SupConfig, SupOutcome};

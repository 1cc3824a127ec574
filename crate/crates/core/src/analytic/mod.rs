//! Analytic bounds for quaternary forms of fundamental discriminant: Bessel and ψ evaluation,
//! the Petersson norm of the cusp part, newform lower bounds, dimensions, cusp-constant
//! certificates and the F₄ candidate search.

pub mod bessel;
pub mod certificate;
pub mod f4;
pub mod newform;
pub mod petersson;
pub mod psi;

pub use bessel::{bessel_k0, bessel_k1, k0_majorant, BesselEval};
pub use certificate::{audit_cusp_bound, cusp_constant, cusp_constant_with, CertificateConfig, CuspConstantCertificate};
pub use f4::{f4_candidates, f4_scan, f4_value, F4Params, F4Search, F4Summary, PrimeCounter};
pub use newform::{adjoint_lower_bound, dim_s2, gamma0_index, newform_petersson_lower, zero_free_beta, AdjointBound, NewformBound};
pub use petersson::{
    dual_cusp_coefficients, petersson_norm_c, petersson_norm_c_with, rs_coefficients, s2_minus_violations, PeterssonBound,
};
pub use psi::{psi, psi_sum, PsiSum};

//! Band-limited calculus on the unit sphere.
//!
//! # Conventions
//!
//! Real orthonormal harmonics without the Condon-Shortley phase:
//!
//! ```text
//! Y_l0     = P̄_l0(cosθ)
//! Y_l,+m   = √2 P̄_lm(cosθ) cos mφ
//! Y_l,-m   = √2 P̄_lm(cosθ) sin mφ        (m > 0)
//! ```
//!
//! with `∫ Y_lm² dμ = 1`. Vectors and tensors are stored in the orthonormal
//! dyad `{e_θ, e_φ}`. The dual is `*V = r̂ × V`, i.e. `(*V)_θ = -V_φ`,
//! `(*V)_φ = V_θ`; on STT fields `(*T)_θθ = -T_θφ`, `(*T)_θφ = T_θθ`.
//! The tensor potential operators are `D̂²_e f = ∇∇f - ½γ̊Δ̊f` and
//! `D̂²_b f = *D̂²_e f`. `curl̊V` is defined as `-div̊(*V)`.
//!
//! Grids are Gauss-Legendre in `cosθ` times equispaced in `φ`; no node
//! sits on a pole.

mod calculus;
mod coeffs;
pub mod constants;
mod field;
mod grid;
mod kernel;
mod transform;

pub use calculus::{
    curl_oneform, decompose_stt, divergence_oneform, divergence_stt, gradient, invert_div_stt,
    invert_div_stt_projected, laplacian, solve_poisson, solve_poisson_detailed, solve_poisson_relative_to,
    PoissonSolution,
    SttDecomposition, TOL_MEAN, TOL_STT_SOURCE,
};
pub use coeffs::ShCoefficients;
pub use constants::OperatorConstants;
pub use field::{OneFormField, ScalarField, SttField};
pub(crate) use calculus::invert_div_stt_potentials;
pub(crate) use field::check_same_grid;
pub use grid::{gauss_legendre, legendre_table, SphereGrid};
pub use kernel::{kernel_integral, kernel_integral_with, KernelQuadrature, COLLISION_THRESHOLD};
pub use transform::{
    analyze, analyze_oneform, analyze_to, evaluate, recompose_stt, synthesize, synthesize_oneform,
};
